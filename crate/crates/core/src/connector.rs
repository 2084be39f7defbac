//! Prioritized local connector.
//!
//! Each robot gets its Euclidean-shortest roadmap path between the two
//! composite vertices. Robots are then ordered by a priority digraph: if
//! robot `i` sweeping its path hits robot `j` parked at `j`'s start, `i`
//! must move after `j`; if it hits `j` parked at `j`'s goal, `i` must move
//! before `j`. An acyclic digraph yields a sequential plan where one robot
//! moves at a time and everybody else stays put.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::composite::{CompositeRoadmap, CompositeVertex};
use crate::drrt::LocalConnector;
use crate::error::{Error, Result};
use crate::geometry::{moving_discs_clear, Point2};
use crate::path::{Path, StepKind};
use crate::prm::VertexId;

pub type CompositePath = Path<CompositeVertex>;

/// Edges `(i, j)` mean robot `i` moves after robot `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityDigraph {
    robots: usize,
    edges: Vec<(usize, usize)>,
}

impl PriorityDigraph {
    pub fn robots(&self) -> usize {
        self.robots
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, after: usize, before: usize) -> bool {
        self.edges.binary_search(&(after, before)).is_ok()
    }

    /// Kahn's algorithm, lowest robot index first among the ready ones.
    /// `None` if the digraph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut pending = vec![0usize; self.robots];
        let mut unlocks: Vec<Vec<usize>> = vec![Vec::new(); self.robots];
        for &(after, before) in &self.edges {
            pending[after] += 1;
            unlocks[before].push(after);
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..self.robots).filter(|&i| pending[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.robots);
        while let Some(Reverse(r)) = ready.pop() {
            order.push(r);
            for &next in &unlocks[r] {
                pending[next] -= 1;
                if pending[next] == 0 {
                    ready.push(Reverse(next));
                }
            }
        }
        (order.len() == self.robots).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }
}

fn sweep_hits(graph: &CompositeRoadmap<'_>, robot: usize, path: &[VertexId], other: usize, parked: Point2) -> bool {
    let map = &graph.roadmaps()[robot];
    let (ri, rj) = (graph.radii()[robot], graph.radii()[other]);
    if path.len() == 1 {
        let p = map.config(path[0]);
        return !moving_discs_clear(p, p, ri, parked, parked, rj);
    }
    path.windows(2).any(|w| {
        let (a, b) = (map.config(w[0]), map.config(w[1]));
        !moving_discs_clear(a, b, ri, parked, parked, rj)
    })
}

/// Builds the priority digraph for moving each robot along `paths[i]` from
/// `from` to `to`.
pub fn build_priority_digraph(
    graph: &CompositeRoadmap<'_>,
    from: &CompositeVertex,
    to: &CompositeVertex,
    paths: &[Vec<VertexId>],
) -> Result<PriorityDigraph> {
    let m = graph.robots();
    graph.check_ids(from)?;
    graph.check_ids(to)?;
    if paths.len() != m {
        return Err(Error::InvalidPlan(format!("expected {m} robot paths, got {}", paths.len())));
    }
    for (i, p) in paths.iter().enumerate() {
        let map = &graph.roadmaps()[i];
        if p.first() != Some(&from.ids()[i]) || p.last() != Some(&to.ids()[i]) {
            return Err(Error::InvalidPlan(format!("robot {i}: path does not join its endpoints")));
        }
        if p.windows(2).any(|w| !map.has_edge(w[0], w[1])) {
            return Err(Error::InvalidPlan(format!("robot {i}: path leaves the roadmap")));
        }
    }
    let mut edges = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        for j in 0..m {
            if i == j {
                continue;
            }
            if sweep_hits(graph, i, path, j, graph.config(j, from.ids()[j])) {
                edges.push((i, j));
            }
            if sweep_hits(graph, i, path, j, graph.config(j, to.ids()[j])) {
                edges.push((j, i));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(PriorityDigraph { robots: m, edges })
}

/// Per-robot shortest paths between two composite vertices; `None` if some
/// robot cannot reach its goal on its roadmap.
pub fn robot_paths(graph: &CompositeRoadmap<'_>, from: &CompositeVertex, to: &CompositeVertex) -> Option<Vec<Vec<VertexId>>> {
    (0..graph.robots())
        .map(|i| graph.roadmaps()[i].shortest_path(from.ids()[i], to.ids()[i]).ok().flatten())
        .collect()
}

/// Moves robots one at a time, in `order`, along `paths`. Every step is
/// checked against all parked robots at their current positions; `None` if
/// any step collides.
pub fn execute_sequential(
    graph: &CompositeRoadmap<'_>,
    from: &CompositeVertex,
    paths: &[Vec<VertexId>],
    order: &[usize],
) -> Option<CompositePath> {
    let mut cur = from.clone();
    let mut path = Path::single(cur.clone());
    for &r in order {
        for w in paths[r].windows(2) {
            let (a, b) = (graph.config(r, w[0]), graph.config(r, w[1]));
            for j in 0..graph.robots() {
                if j == r {
                    continue;
                }
                let p = graph.config(j, cur.ids()[j]);
                if !moving_discs_clear(a, b, graph.radii()[r], p, p, graph.radii()[j]) {
                    return None;
                }
            }
            cur = cur.with(r, w[1]);
            path.push(cur.clone(), StepKind::Single(r));
        }
    }
    Some(path)
}

/// Connects `from` to `to` with a sequential, priority-ordered plan.
pub fn local_connect(graph: &CompositeRoadmap<'_>, from: &CompositeVertex, to: &CompositeVertex) -> Option<CompositePath> {
    if from == to {
        return Some(Path::single(to.clone()));
    }
    let paths = robot_paths(graph, from, to)?;
    let digraph = build_priority_digraph(graph, from, to, &paths).ok()?;
    let order = digraph.topological_order()?;
    execute_sequential(graph, from, &paths, &order)
}

/// [`local_connect`] as a dRRT connector.
#[derive(Debug, Default, Clone, Copy)]
pub struct PrioritizedConnector;

impl<'a> LocalConnector<CompositeRoadmap<'a>> for PrioritizedConnector {
    fn connect(&mut self, graph: &CompositeRoadmap<'a>, from: &CompositeVertex, to: &CompositeVertex) -> Option<CompositePath> {
        local_connect(graph, from, to)
    }
}

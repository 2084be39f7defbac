//! Ground truth for small instances: explicit construction of the composite
//! roadmap, breadth-first search over it, a path validator and a brute-force
//! check over sequential robot orderings.
//!
//! Motion checks here solve the contact quadratic for its roots instead of
//! minimising the separation, so they do not share arithmetic with the
//! predicates in `geometry`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::composite::{CompositeVertex, ProductMode};
use crate::connector::CompositePath;
use crate::error::{Error, Result};
use crate::geometry::{swept_disc_free, Disc, Point2};
use crate::path::{Path, StepKind};
use crate::prm::{Roadmap, VertexId};
use crate::scenario::Scenario;

/// Default cap on the number of composite tuples enumerated.
pub const DEFAULT_CAP: usize = 1_000_000;

/// True iff discs of radius `r1`, `r2` moving linearly and simultaneously
/// (`a1 → b1`, `a2 → b2`, t ∈ [0, 1]) ever come within `r1 + r2`.
pub fn motion_collides(a1: Point2, b1: Point2, r1: f64, a2: Point2, b2: Point2, r2: f64) -> bool {
    // |p + t d|² - R² = A t² + 2 B t + C
    let (px, py) = (a1.x - a2.x, a1.y - a2.y);
    let (dx, dy) = ((b1.x - a1.x) - (b2.x - a2.x), (b1.y - a1.y) - (b2.y - a2.y));
    let reach = r1 + r2;
    let a = dx * dx + dy * dy;
    let b = px * dx + py * dy;
    let c = px * px + py * py - reach * reach;
    if c <= 0.0 || a + 2.0 * b + c <= 0.0 {
        return true;
    }
    if a == 0.0 || b >= 0.0 || -b >= a {
        // minimum at an endpoint, both of which are clear
        return false;
    }
    b * b - a * c >= 0.0
}

/// Composite roadmap materialised vertex by vertex.
#[derive(Debug, Clone)]
pub struct ExplicitComposite {
    mode: ProductMode,
    vertices: Vec<CompositeVertex>,
    index: HashMap<CompositeVertex, usize>,
    adjacency: Vec<Vec<usize>>,
}

fn tuple_valid(maps: &[Roadmap], radii: &[Disc], ids: &[VertexId]) -> bool {
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            let (p, q) = (maps[i].config(ids[i]), maps[j].config(ids[j]));
            if motion_collides(p, p, radii[i].radius(), q, q, radii[j].radius()) {
                return false;
            }
        }
    }
    true
}

fn motion_valid(maps: &[Roadmap], radii: &[Disc], from: &[VertexId], to: &[VertexId]) -> bool {
    for i in 0..from.len() {
        let (a1, b1) = (maps[i].config(from[i]), maps[i].config(to[i]));
        for j in (i + 1)..from.len() {
            let (a2, b2) = (maps[j].config(from[j]), maps[j].config(to[j]));
            if motion_collides(a1, b1, radii[i].radius(), a2, b2, radii[j].radius()) {
                return false;
            }
        }
    }
    true
}

// Odometer over per-robot option lists.
fn for_each_tuple(options: &[Vec<VertexId>], mut f: impl FnMut(&[VertexId])) {
    if options.iter().any(Vec::is_empty) {
        return;
    }
    let mut digits = vec![0usize; options.len()];
    let mut tuple: Vec<VertexId> = options.iter().map(|o| o[0]).collect();
    loop {
        f(&tuple);
        let mut i = 0;
        loop {
            if i == options.len() {
                return;
            }
            digits[i] += 1;
            if digits[i] < options[i].len() {
                tuple[i] = options[i][digits[i]];
                break;
            }
            digits[i] = 0;
            tuple[i] = options[i][0];
            i += 1;
        }
    }
}

/// Enumerates every valid composite vertex and every valid edge.
pub fn build_explicit_composite(
    maps: &[Roadmap],
    radii: &[Disc],
    mode: ProductMode,
    cap: usize,
) -> Result<ExplicitComposite> {
    let size: u128 = maps.iter().map(|m| m.len() as u128).product();
    if size > cap as u128 {
        return Err(Error::CapExceeded { size, cap });
    }
    let all: Vec<Vec<VertexId>> = maps.iter().map(|m| (0..m.len() as VertexId).collect()).collect();
    let mut vertices = Vec::new();
    for_each_tuple(&all, |ids| {
        if tuple_valid(maps, radii, ids) {
            vertices.push(CompositeVertex(ids.to_vec()));
        }
    });
    let index: HashMap<CompositeVertex, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();

    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (u, c) in vertices.iter().enumerate() {
        match mode {
            ProductMode::Tensor => {
                let options: Vec<Vec<VertexId>> = c
                    .ids()
                    .iter()
                    .zip(maps)
                    .map(|(&id, m)| {
                        let mut o = vec![id];
                        o.extend_from_slice(m.neighbors(id).expect("valid id"));
                        o
                    })
                    .collect();
                for_each_tuple(&options, |ids| {
                    if ids == c.ids() {
                        return;
                    }
                    if let Some(&v) = index.get(&CompositeVertex(ids.to_vec())) {
                        if motion_valid(maps, radii, c.ids(), ids) {
                            adjacency[u].push(v);
                        }
                    }
                });
            }
            ProductMode::Cartesian => {
                for (i, m) in maps.iter().enumerate() {
                    for &n in m.neighbors(c.ids()[i]).expect("valid id") {
                        let d = c.with(i, n);
                        if let Some(&v) = index.get(&d) {
                            if motion_valid(maps, radii, c.ids(), d.ids()) {
                                adjacency[u].push(v);
                            }
                        }
                    }
                }
            }
        }
        adjacency[u].sort_unstable();
    }
    Ok(ExplicitComposite { mode, vertices, index, adjacency })
}

impl ExplicitComposite {
    pub fn mode(&self) -> ProductMode {
        self.mode
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Undirected edge count.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Directed (ordered pair) edge count.
    pub fn directed_edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> &[CompositeVertex] {
        &self.vertices
    }

    pub fn contains(&self, c: &CompositeVertex) -> bool {
        self.index.contains_key(c)
    }

    pub fn neighbors(&self, c: &CompositeVertex) -> Vec<&CompositeVertex> {
        match self.index.get(c) {
            Some(&u) => self.adjacency[u].iter().map(|&v| &self.vertices[v]).collect(),
            None => Vec::new(),
        }
    }

    pub fn has_edge(&self, a: &CompositeVertex, b: &CompositeVertex) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&u), Some(&v)) => self.adjacency[u].binary_search(&v).is_ok(),
            _ => false,
        }
    }

    fn step_kind(&self, a: &CompositeVertex, b: &CompositeVertex) -> StepKind {
        match self.mode {
            ProductMode::Tensor => StepKind::Simultaneous,
            ProductMode::Cartesian => {
                StepKind::Single(a.ids().iter().zip(b.ids()).position(|(x, y)| x != y).unwrap_or(0))
            }
        }
    }
}

/// Hop-shortest path from `s` to `t`, or `None` if disconnected.
pub fn explicit_search(g: &ExplicitComposite, s: &CompositeVertex, t: &CompositeVertex) -> Result<Option<CompositePath>> {
    let (&si, &ti) = match (g.index.get(s), g.index.get(t)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidCompositeVertex("search endpoint is not a composite vertex".into())),
    };
    let mut prev = vec![usize::MAX; g.vertices.len()];
    prev[si] = si;
    let mut queue = VecDeque::from([si]);
    while let Some(u) = queue.pop_front() {
        if u == ti {
            break;
        }
        for &v in &g.adjacency[u] {
            if prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    if prev[ti] == usize::MAX {
        return Ok(None);
    }
    let mut chain = vec![ti];
    while *chain.last().unwrap() != si {
        chain.push(prev[*chain.last().unwrap()]);
    }
    chain.reverse();
    let mut path = Path::single(g.vertices[si].clone());
    for w in chain.windows(2) {
        let (a, b) = (&g.vertices[w[0]], &g.vertices[w[1]]);
        path.push(b.clone(), g.step_kind(a, b));
    }
    Ok(Some(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    RobotCount,
    UnknownVertex,
    UnknownConfiguration,
    WrongStart,
    WrongTarget,
    NotRoadmapEdge,
    NotSingleMover,
    ObstacleCollision,
    RobotCollision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Step index (motion from vertex `step` to `step + 1`); absent for
    /// path-level problems.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    pub kind: ViolationKind,
    pub robots: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { ok: violations.is_empty(), violations }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks that `path` is a collision-free motion for the scenario's robots
/// from their starts to their targets, moving only along roadmap edges.
pub fn validate_path(scenario: &Scenario, maps: &[Roadmap], path: &CompositePath) -> ValidationReport {
    let mut out = Vec::new();
    let m = scenario.robots.len();
    let violation = |step: Option<usize>, kind, robots: Vec<usize>, detail: String| Violation { step, kind, robots, detail };

    let radii: Vec<f64> = scenario.robots.iter().map(|r| r.radius).collect();
    if maps.len() != m {
        out.push(violation(None, ViolationKind::RobotCount, vec![], format!("{m} robots, {} roadmaps", maps.len())));
        return ValidationReport::from_violations(out);
    }
    for (s, v) in path.vertices().iter().enumerate() {
        if v.robots() != m {
            out.push(violation(Some(s.saturating_sub(1)), ViolationKind::RobotCount, vec![], format!("vertex {s} has {} ids", v.robots())));
            return ValidationReport::from_violations(out);
        }
        for (i, &id) in v.ids().iter().enumerate() {
            if id as usize >= maps[i].len() {
                out.push(violation(Some(s.saturating_sub(1)), ViolationKind::UnknownVertex, vec![i], format!("vertex {s}: id {id} not in roadmap {i}")));
            }
        }
    }
    if !out.is_empty() {
        return ValidationReport::from_violations(out);
    }

    let first = path.first();
    for (i, (map, robot)) in maps.iter().zip(&scenario.robots).enumerate() {
        let p = map.config(first.ids()[i]);
        if p != robot.start {
            out.push(violation(None, ViolationKind::WrongStart, vec![i], format!("robot {i} starts at {p:?}")));
        }
        let q = map.config(path.last().ids()[i]);
        if q != robot.target {
            out.push(violation(None, ViolationKind::WrongTarget, vec![i], format!("robot {i} ends at {q:?}")));
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let (p, q) = (maps[i].config(first.ids()[i]), maps[j].config(first.ids()[j]));
            if motion_collides(p, p, radii[i], q, q, radii[j]) {
                out.push(violation(None, ViolationKind::RobotCollision, vec![i, j], "robots overlap at the first vertex".into()));
            }
        }
    }

    for (s, (w, kind)) in path.vertices().windows(2).zip(path.steps()).enumerate() {
        let (from, to) = (&w[0], &w[1]);
        let movers: Vec<usize> = (0..m).filter(|&i| from.ids()[i] != to.ids()[i]).collect();
        if let StepKind::Single(r) = *kind {
            if movers.iter().any(|&i| i != r) || r >= m {
                out.push(violation(Some(s), ViolationKind::NotSingleMover, movers.clone(), format!("step annotated single mover {r}")));
            }
        }
        for &i in &movers {
            let (u, v) = (from.ids()[i], to.ids()[i]);
            if !maps[i].has_edge(u, v) {
                out.push(violation(Some(s), ViolationKind::NotRoadmapEdge, vec![i], format!("robot {i} jumps {u} -> {v}")));
                continue;
            }
            let disc = match Disc::new(radii[i]) {
                Ok(d) => d,
                Err(_) => continue,
            };
            if !swept_disc_free(maps[i].config(u), maps[i].config(v), disc, &scenario.workspace, &scenario.obstacles) {
                out.push(violation(Some(s), ViolationKind::ObstacleCollision, vec![i], format!("robot {i} edge {u} -> {v} hits the environment")));
            }
        }
        for i in 0..m {
            let (a1, b1) = (maps[i].config(from.ids()[i]), maps[i].config(to.ids()[i]));
            for j in (i + 1)..m {
                let (a2, b2) = (maps[j].config(from.ids()[j]), maps[j].config(to.ids()[j]));
                if motion_collides(a1, b1, radii[i], a2, b2, radii[j]) {
                    out.push(violation(Some(s), ViolationKind::RobotCollision, vec![i, j], format!("robots {i} and {j} collide")));
                }
            }
        }
    }
    ValidationReport::from_violations(out)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Tries every order of moving the robots one at a time along `paths`,
/// checking each move against the robots parked at their current positions.
/// Returns the first (lexicographic) order that works.
pub fn sequential_ordering_exists(
    maps: &[Roadmap],
    radii: &[Disc],
    from: &CompositeVertex,
    paths: &[Vec<VertexId>],
) -> Option<Vec<usize>> {
    let m = maps.len();
    'orders: for order in permutations(m) {
        let mut at: Vec<VertexId> = from.ids().to_vec();
        for &r in &order {
            for w in paths[r].windows(2) {
                let (a, b) = (maps[r].config(w[0]), maps[r].config(w[1]));
                for j in (0..m).filter(|&j| j != r) {
                    let p = maps[j].config(at[j]);
                    if motion_collides(a, b, radii[r].radius(), p, p, radii[j].radius()) {
                        continue 'orders;
                    }
                }
                at[r] = w[1];
            }
        }
        return Some(order);
    }
    None
}

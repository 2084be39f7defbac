//! Discrete RRT: rapidly-exploring tree search over a geometrically embedded
//! graph that is only accessible through a direction oracle.
//!
//! The tree grows by drawing a uniform sample in the embedding box, picking
//! the exact Euclidean-nearest tree node and asking the graph for the
//! neighbour of that node pointing most directly at the sample. After every
//! expansion round the `K` tree nodes nearest to the target are handed to a
//! local connector. Expansion rounds follow a doubling schedule: round `i`
//! draws `2^i` samples and tries `min(i, |tree|)` connector candidates.
//!
//! An optional fallback exposes one untried edge per round in a fixed order,
//! which makes the search complete on finite graphs.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between_dirs, EPS};
use crate::path::{Path, StepKind};
use crate::spatial::KdTree;

/// A graph whose vertices are embedded in ℝ^d, queried implicitly.
pub trait EmbeddedGraph {
    type Vertex: Clone + Eq + Hash + Debug;

    fn dimension(&self) -> usize;

    /// Per-coordinate sampling interval; `dimension()` entries.
    fn sample_box(&self) -> &[(f64, f64)];

    fn embed(&self, v: &Self::Vertex, out: &mut [f64]);

    /// Neighbour of `v` best aligned with the direction towards `q`, or
    /// `None` if the graph declines to produce one.
    fn direction_oracle(&self, v: &Self::Vertex, q: &[f64]) -> Option<Self::Vertex>;

    /// Enumerates the neighbours of `v` one at a time in a fixed order.
    /// `cursor` starts at 0 and is advanced by the graph.
    fn next_neighbor(&self, v: &Self::Vertex, cursor: &mut usize) -> Option<Self::Vertex>;

    /// Annotation for a tree edge `from → to`.
    fn step_kind(&self, _from: &Self::Vertex, _to: &Self::Vertex) -> StepKind {
        StepKind::Simultaneous
    }

    /// Whether `v` is a vertex of the graph.
    fn contains(&self, v: &Self::Vertex) -> bool;
}

/// Attempts to join two graph vertices with a path starting at `from` and
/// ending at `to`.
pub trait LocalConnector<G: EmbeddedGraph + ?Sized> {
    fn connect(&mut self, graph: &G, from: &G::Vertex, to: &G::Vertex) -> Option<Path<G::Vertex>>;
}

impl<G, F> LocalConnector<G> for F
where
    G: EmbeddedGraph + ?Sized,
    F: FnMut(&G, &G::Vertex, &G::Vertex) -> Option<Path<G::Vertex>>,
{
    fn connect(&mut self, graph: &G, from: &G::Vertex, to: &G::Vertex) -> Option<Path<G::Vertex>> {
        self(graph, from, to)
    }
}

/// A connector that only succeeds on `from == to`.
#[derive(Debug, Default, Clone, Copy)]
pub struct IdentityConnector;

impl<G: EmbeddedGraph + ?Sized> LocalConnector<G> for IdentityConnector {
    fn connect(&mut self, _graph: &G, from: &G::Vertex, to: &G::Vertex) -> Option<Path<G::Vertex>> {
        (from == to).then(|| Path::single(to.clone()))
    }
}

/// Number of samples `N` and connector candidates `K` per main-loop round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schedule {
    /// `N = 2^min(i, max_exponent)`, `K = i`.
    Doubling { max_exponent: u32 },
    /// Constant `N` and `K`.
    Fixed { samples: usize, candidates: usize },
}

impl Schedule {
    /// `(N, K)` for round `i` (1-based), before clamping `K` to the tree size.
    pub fn round(&self, i: usize) -> (usize, usize) {
        match *self {
            Schedule::Doubling { max_exponent } => {
                let e = (i as u32).min(max_exponent).min(usize::BITS - 2);
                (1usize << e, i)
            }
            Schedule::Fixed { samples, candidates } => (samples.max(1), candidates.max(1)),
        }
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Doubling { max_exponent: 40 }
    }
}

#[derive(Debug, Clone)]
pub struct DrrtParams {
    pub schedule: Schedule,
    /// Main-loop rounds before reporting failure.
    pub max_iterations: usize,
    pub seed: u64,
    /// Expose one untried edge per round (complete on finite graphs).
    pub fallback: bool,
    pub time_budget: Option<Duration>,
}

impl Default for DrrtParams {
    fn default() -> Self {
        DrrtParams {
            schedule: Schedule::default(),
            max_iterations: 30,
            seed: 0,
            fallback: false,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeNode<V> {
    pub vertex: V,
    pub parent: Option<usize>,
}

/// Search tree over graph vertices with an exact nearest-neighbour index on
/// their embeddings.
#[derive(Debug, Clone)]
pub struct DrrtTree<V> {
    nodes: Vec<TreeNode<V>>,
    index: KdTree,
    members: HashMap<V, usize>,
}

impl<V: Clone + Eq + Hash> DrrtTree<V> {
    fn new(root: V, embedding: &[f64]) -> Self {
        let mut index = KdTree::new(embedding.len());
        index.insert(embedding);
        let mut members = HashMap::new();
        members.insert(root.clone(), 0);
        DrrtTree { nodes: vec![TreeNode { vertex: root, parent: None }], index, members }
    }

    fn add(&mut self, v: V, embedding: &[f64], parent: usize) -> usize {
        let id = self.nodes.len();
        self.index.insert(embedding);
        self.members.insert(v.clone(), id);
        self.nodes.push(TreeNode { vertex: v, parent: Some(parent) });
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &V {
        &self.nodes[0].vertex
    }

    pub fn node(&self, i: usize) -> &TreeNode<V> {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[TreeNode<V>] {
        &self.nodes
    }

    pub fn contains(&self, v: &V) -> bool {
        self.members.contains_key(v)
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.members.get(v).copied()
    }

    /// `(parent, child)` vertex pairs, one per non-root node.
    pub fn edges(&self) -> impl Iterator<Item = (&V, &V)> + '_ {
        self.nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (&self.nodes[p].vertex, &n.vertex)))
    }

    pub fn nearest(&self, q: &[f64]) -> usize {
        self.index.nearest(q).expect("tree is never empty").0
    }

    pub fn k_nearest(&self, q: &[f64], k: usize) -> Vec<usize> {
        self.index.k_nearest(q, k).into_iter().map(|(i, _)| i).collect()
    }
}

/// Counters collected during a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub rounds: usize,
    /// Samples drawn in each round.
    pub samples_per_round: Vec<usize>,
    /// Connector invocations in each round.
    pub candidates_per_round: Vec<usize>,
    pub oracle_absent: usize,
    pub duplicates: usize,
    pub fallback_added: usize,
    #[serde(with = "duration_ms")]
    pub expand_time: Duration,
    #[serde(with = "duration_ms")]
    pub connect_time: Duration,
}

mod duration_ms {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        (d.as_millis() as u64).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    MaxIterations,
    TimeBudget,
    /// Fallback mode exposed every reachable edge without reaching the target.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub reason: FailureReason,
    pub iterations: usize,
    pub tree_size: usize,
}

/// Result of a single exhaustive exposure step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exposure {
    Added,
    AlreadyInTree,
    Exhausted,
}

/// A dRRT search in progress over `graph`.
pub struct Drrt<'g, G: EmbeddedGraph> {
    graph: &'g G,
    tree: DrrtTree<G::Vertex>,
    rng: ChaCha8Rng,
    exposed: VecDeque<usize>,
    cursors: Vec<usize>,
    stats: Stats,
    deadline: Option<Instant>,
    scratch: Vec<f64>,
}

impl<'g, G: EmbeddedGraph> Drrt<'g, G> {
    pub fn new(graph: &'g G, root: G::Vertex, seed: u64) -> Self {
        let mut scratch = vec![0.0; graph.dimension()];
        graph.embed(&root, &mut scratch);
        let tree = DrrtTree::new(root, &scratch);
        Drrt {
            graph,
            tree,
            rng: ChaCha8Rng::seed_from_u64(seed),
            exposed: VecDeque::from([0]),
            cursors: vec![0],
            stats: Stats::default(),
            deadline: None,
            scratch,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn tree(&self) -> &DrrtTree<G::Vertex> {
        &self.tree
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn into_parts(self) -> (DrrtTree<G::Vertex>, Stats) {
        (self.tree, self.stats)
    }

    fn past_deadline(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub(crate) fn add_node(&mut self, v: G::Vertex, parent: usize) {
        self.graph.embed(&v, &mut self.scratch);
        let id = self.tree.add(v, &self.scratch, parent);
        self.exposed.push_back(id);
        self.cursors.push(0);
    }

    /// Runs `n` expansion iterations and returns the number of nodes added.
    /// Stops early (without error) once the deadline passes.
    pub fn expand(&mut self, n: usize) -> usize {
        let started = Instant::now();
        let dim = self.graph.dimension();
        let mut q = vec![0.0; dim];
        let mut added = 0;
        let mut drawn = 0;
        for it in 0..n {
            if it % 64 == 63 && self.past_deadline() {
                break;
            }
            for (x, &(lo, hi)) in q.iter_mut().zip(self.graph.sample_box()) {
                *x = if hi > lo { self.rng.gen_range(lo..hi) } else { lo };
            }
            drawn += 1;
            let near = self.tree.nearest(&q);
            match self.graph.direction_oracle(&self.tree.nodes[near].vertex, &q) {
                Some(v) if !self.tree.contains(&v) => {
                    self.add_node(v, near);
                    added += 1;
                }
                Some(_) => self.stats.duplicates += 1,
                None => self.stats.oracle_absent += 1,
            }
        }
        self.stats.expand_time += started.elapsed();
        if let Some(last) = self.stats.samples_per_round.last_mut() {
            *last += drawn;
        }
        added
    }

    /// Tries the connector from each of the `k` tree nodes nearest to `target`
    /// in ascending distance. Returns the tree node used and the connector's
    /// path on success.
    pub fn connect_to_target<C: LocalConnector<G> + ?Sized>(
        &mut self,
        target: &G::Vertex,
        k: usize,
        connector: &mut C,
    ) -> Option<(usize, Path<G::Vertex>)> {
        let started = Instant::now();
        let mut t = vec![0.0; self.graph.dimension()];
        self.graph.embed(target, &mut t);
        let mut result = None;
        let mut tried = 0;
        for q in self.tree.k_nearest(&t, k) {
            tried += 1;
            if let Some(p) = connector.connect(self.graph, &self.tree.nodes[q].vertex, target) {
                result = Some((q, p));
                break;
            }
        }
        self.stats.connect_time += started.elapsed();
        if let Some(last) = self.stats.candidates_per_round.last_mut() {
            *last += tried;
        }
        result
    }

    /// Root-to-`q` tree path followed by `suffix`, which must start at `q`.
    pub fn retrieve_path(&self, q: usize, suffix: &Path<G::Vertex>) -> Result<Path<G::Vertex>> {
        let node = self.tree.nodes.get(q).ok_or(Error::SuffixMismatch)?;
        if suffix.first() != &node.vertex {
            return Err(Error::SuffixMismatch);
        }
        let mut chain = vec![q];
        let mut cur = q;
        while let Some(p) = self.tree.nodes[cur].parent {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        let mut path = Path::single(self.tree.nodes[chain[0]].vertex.clone());
        for w in chain.windows(2) {
            let (a, b) = (&self.tree.nodes[w[0]].vertex, &self.tree.nodes[w[1]].vertex);
            path.push(b.clone(), self.graph.step_kind(a, b));
        }
        path.concat(suffix).ok_or(Error::SuffixMismatch)
    }

    /// Exposes one untried edge of the oldest tree node that still has one.
    pub fn expose(&mut self) -> Exposure {
        while let Some(&front) = self.exposed.front() {
            let v = self.tree.nodes[front].vertex.clone();
            match self.graph.next_neighbor(&v, &mut self.cursors[front]) {
                Some(nb) if self.tree.contains(&nb) => return Exposure::AlreadyInTree,
                Some(nb) => {
                    self.add_node(nb, front);
                    self.stats.fallback_added += 1;
                    return Exposure::Added;
                }
                None => {
                    self.exposed.pop_front();
                }
            }
        }
        Exposure::Exhausted
    }

    /// [`Drrt::expose`] reduced to "did the tree grow".
    pub fn expose_fallback_edge(&mut self) -> bool {
        self.expose() == Exposure::Added
    }

    /// Main loop: expand, try to connect, optionally expose one fallback
    /// edge; repeat.
    pub fn run<C: LocalConnector<G> + ?Sized>(
        &mut self,
        target: &G::Vertex,
        params: &DrrtParams,
        connector: &mut C,
    ) -> std::result::Result<Path<G::Vertex>, FailureReport> {
        if self.tree.root() == target {
            return Ok(Path::single(target.clone()));
        }
        let fail = |this: &Self, reason| FailureReport {
            reason,
            iterations: this.stats.rounds,
            tree_size: this.tree.len(),
        };
        for i in 1..=params.max_iterations {
            if self.past_deadline() {
                return Err(fail(self, FailureReason::TimeBudget));
            }
            let (n, k) = params.schedule.round(i);
            self.stats.rounds = i;
            self.stats.samples_per_round.push(0);
            self.stats.candidates_per_round.push(0);
            self.expand(n);
            let k = k.min(self.tree.len());
            if let Some((q, suffix)) = self.connect_to_target(target, k, connector) {
                return self.retrieve_path(q, &suffix).map_err(|_| fail(self, FailureReason::MaxIterations));
            }
            if params.fallback && self.expose() == Exposure::Exhausted {
                return Err(fail(self, FailureReason::Exhausted));
            }
        }
        Err(fail(self, FailureReason::MaxIterations))
    }
}

/// Outcome of [`plan`]: the path or failure report, plus the final tree and
/// counters.
pub struct PlanOutcome<V> {
    pub result: std::result::Result<Path<V>, FailureReport>,
    pub tree: DrrtTree<V>,
    pub stats: Stats,
}

/// Runs dRRT from `s` to `t`.
pub fn plan<G, C>(
    graph: &G,
    s: &G::Vertex,
    t: &G::Vertex,
    params: &DrrtParams,
    connector: &mut C,
) -> Result<PlanOutcome<G::Vertex>>
where
    G: EmbeddedGraph,
    C: LocalConnector<G> + ?Sized,
{
    if !graph.contains(s) {
        return Err(Error::InvalidCompositeVertex(format!("start {s:?} is not a graph vertex")));
    }
    if !graph.contains(t) {
        return Err(Error::InvalidCompositeVertex(format!("target {t:?} is not a graph vertex")));
    }
    let deadline = params.time_budget.map(|b| Instant::now() + b);
    let mut search = Drrt::new(graph, s.clone(), params.seed).with_deadline(deadline);
    let result = search.run(t, params, connector);
    let (tree, stats) = search.into_parts();
    Ok(PlanOutcome { result, tree, stats })
}

/// Explicit graph embedded in ℝ^d with the angle-argmin direction oracle.
#[derive(Debug, Clone)]
pub struct GeometricGraph {
    dim: usize,
    points: Vec<Vec<f64>>,
    adjacency: Vec<Vec<usize>>,
    sample_box: Vec<(f64, f64)>,
}

impl GeometricGraph {
    pub fn new(points: Vec<Vec<f64>>, edges: &[(usize, usize)], sample_box: Vec<(f64, f64)>) -> Result<Self> {
        let dim = sample_box.len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidRoadmap("point dimension does not match sampling box".into()));
        }
        let mut adjacency = vec![Vec::new(); points.len()];
        for &(u, v) in edges {
            if u >= points.len() || v >= points.len() || u == v {
                return Err(Error::InvalidRoadmap(format!("bad edge ({u}, {v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(GeometricGraph { dim, points, adjacency, sample_box })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn point(&self, v: usize) -> &[f64] {
        &self.points[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|l| l.binary_search(&v).is_ok())
    }
}

impl EmbeddedGraph for GeometricGraph {
    type Vertex = usize;

    fn dimension(&self) -> usize {
        self.dim
    }

    fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    fn embed(&self, v: &usize, out: &mut [f64]) {
        out.copy_from_slice(&self.points[*v]);
    }

    fn direction_oracle(&self, v: &usize, q: &[f64]) -> Option<usize> {
        let origin = &self.points[*v];
        let dq: Vec<f64> = q.iter().zip(origin).map(|(a, b)| a - b).collect();
        let degenerate = dq.iter().map(|x| x * x).sum::<f64>().sqrt() < EPS;
        let mut best: Option<(f64, usize)> = None;
        for &u in &self.adjacency[*v] {
            let du: Vec<f64> = self.points[u].iter().zip(origin).map(|(a, b)| a - b).collect();
            let key = if degenerate {
                self.points[u].iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
            } else {
                angle_between_dirs(&dq, &du).unwrap_or(f64::INFINITY)
            };
            if best.is_none_or(|(b, _)| key < b) {
                best = Some((key, u));
            }
        }
        best.map(|(_, u)| u)
    }

    fn next_neighbor(&self, v: &usize, cursor: &mut usize) -> Option<usize> {
        let n = self.adjacency[*v].get(*cursor).copied();
        if n.is_some() {
            *cursor += 1;
        }
        n
    }

    fn contains(&self, v: &usize) -> bool {
        *v < self.points.len()
    }
}

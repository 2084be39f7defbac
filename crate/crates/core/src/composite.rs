//! The implicitly represented composite roadmap of `m` robots.
//!
//! A composite vertex is an `m`-tuple of per-robot roadmap vertices whose
//! discs are pairwise disjoint. Nothing is materialised: validity of vertices
//! and edges is decided on demand from the per-robot roadmaps, and the
//! direction oracle combines the `m` single-robot argmins.
//!
//! Robot-obstacle validity is inherited from the per-robot roadmaps and is
//! never rechecked here; only robot-robot interactions are.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::drrt::EmbeddedGraph;
use crate::error::{Error, Result};
use crate::geometry::{angle_between, moving_discs_clear, Disc, Point2, EPS};
use crate::path::StepKind;
use crate::prm::{Roadmap, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompositeVertex(pub Vec<VertexId>);

impl CompositeVertex {
    pub fn ids(&self) -> &[VertexId] {
        &self.0
    }

    pub fn robots(&self) -> usize {
        self.0.len()
    }

    /// Copy of `self` with robot `robot` moved to `id`.
    pub fn with(&self, robot: usize, id: VertexId) -> Self {
        let mut ids = self.0.clone();
        ids[robot] = id;
        CompositeVertex(ids)
    }
}

impl fmt::Display for CompositeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMode {
    /// All robots may move at once. A robot whose id is unchanged is treated
    /// as staying put, so single-mover motions are also tensor edges.
    #[default]
    Tensor,
    /// Exactly one robot moves along a roadmap edge.
    Cartesian,
}

impl std::str::FromStr for ProductMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tensor" => Ok(ProductMode::Tensor),
            "cartesian" => Ok(ProductMode::Cartesian),
            other => Err(format!("unknown product mode {other:?} (expected tensor|cartesian)")),
        }
    }
}

/// Implicit composite roadmap over borrowed per-robot roadmaps.
#[derive(Debug, Clone)]
pub struct CompositeRoadmap<'a> {
    roadmaps: &'a [Roadmap],
    radii: Vec<Disc>,
    mode: ProductMode,
    sample_box: Vec<(f64, f64)>,
}

impl<'a> CompositeRoadmap<'a> {
    /// `bounds` is the per-robot sampling box `(min, max)` used by the
    /// planner; typically the workspace bounding box for every robot.
    pub fn new(
        roadmaps: &'a [Roadmap],
        radii: Vec<Disc>,
        bounds: &[(Point2, Point2)],
        mode: ProductMode,
    ) -> Result<Self> {
        if roadmaps.is_empty() {
            return Err(Error::InvalidCompositeVertex("no robots".into()));
        }
        if radii.len() != roadmaps.len() || bounds.len() != roadmaps.len() {
            return Err(Error::InvalidCompositeVertex(format!(
                "{} roadmaps, {} radii, {} bounds",
                roadmaps.len(),
                radii.len(),
                bounds.len()
            )));
        }
        let sample_box = bounds
            .iter()
            .flat_map(|(lo, hi)| [(lo.x, hi.x), (lo.y, hi.y)])
            .collect();
        Ok(CompositeRoadmap { roadmaps, radii, mode, sample_box })
    }

    pub fn robots(&self) -> usize {
        self.roadmaps.len()
    }

    pub fn roadmaps(&self) -> &'a [Roadmap] {
        self.roadmaps
    }

    pub fn radii(&self) -> &[Disc] {
        &self.radii
    }

    pub fn mode(&self) -> ProductMode {
        self.mode
    }

    pub fn with_mode(&self, mode: ProductMode) -> Self {
        CompositeRoadmap { mode, ..self.clone() }
    }

    pub fn start(&self) -> CompositeVertex {
        CompositeVertex(self.roadmaps.iter().map(Roadmap::start).collect())
    }

    pub fn target(&self) -> CompositeVertex {
        CompositeVertex(self.roadmaps.iter().map(Roadmap::target).collect())
    }

    pub fn config(&self, robot: usize, id: VertexId) -> Point2 {
        self.roadmaps[robot].config(id)
    }

    pub fn configs(&self, c: &CompositeVertex) -> Vec<Point2> {
        c.0.iter().enumerate().map(|(i, &id)| self.config(i, id)).collect()
    }

    pub fn embedding(&self, c: &CompositeVertex) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.robots()];
        self.embed(c, &mut out);
        out
    }

    pub fn check_ids(&self, c: &CompositeVertex) -> Result<()> {
        if c.robots() != self.robots() {
            return Err(Error::InvalidCompositeVertex(format!(
                "expected {} ids, got {}",
                self.robots(),
                c.robots()
            )));
        }
        for (map, &id) in self.roadmaps.iter().zip(&c.0) {
            if id as usize >= map.len() {
                return Err(Error::UnknownVertex { id: id as usize, len: map.len() });
            }
        }
        Ok(())
    }

    /// Pairwise static clearance of the referenced configurations.
    pub fn vertex_valid(&self, c: &CompositeVertex) -> Result<bool> {
        self.check_ids(c)?;
        Ok(self.vertex_valid_unchecked(c))
    }

    pub(crate) fn vertex_valid_unchecked(&self, c: &CompositeVertex) -> bool {
        let m = self.robots();
        for i in 0..m {
            let pi = self.config(i, c.0[i]);
            for j in (i + 1)..m {
                let pj = self.config(j, c.0[j]);
                let reach = self.radii[i].radius() + self.radii[j].radius();
                if pi.dist2(pj) <= reach * reach {
                    return false;
                }
            }
        }
        true
    }

    /// Edge test under `mode`. Both endpoints must be valid composite
    /// vertices.
    pub fn edge_valid(&self, from: &CompositeVertex, to: &CompositeVertex, mode: ProductMode) -> Result<bool> {
        for (c, which) in [(from, "from"), (to, "to")] {
            if !self.vertex_valid(c)? {
                return Err(Error::InvalidCompositeVertex(format!("{which} endpoint {c} has colliding robots")));
            }
        }
        Ok(self.edge_valid_unchecked(from, to, mode))
    }

    pub(crate) fn edge_valid_unchecked(&self, from: &CompositeVertex, to: &CompositeVertex, mode: ProductMode) -> bool {
        let m = self.robots();
        let mut movers = 0;
        for i in 0..m {
            let (u, v) = (from.0[i], to.0[i]);
            if u != v {
                if !self.roadmaps[i].has_edge(u, v) {
                    return false;
                }
                movers += 1;
            }
        }
        if mode == ProductMode::Cartesian && movers != 1 {
            return false;
        }
        self.motion_clear(from, to)
    }

    /// Pairwise robot-robot clearance under simultaneous linear motion.
    fn motion_clear(&self, from: &CompositeVertex, to: &CompositeVertex) -> bool {
        let m = self.robots();
        for i in 0..m {
            let (a1, b1) = (self.config(i, from.0[i]), self.config(i, to.0[i]));
            for j in (i + 1)..m {
                let (a2, b2) = (self.config(j, from.0[j]), self.config(j, to.0[j]));
                if !moving_discs_clear(a1, b1, self.radii[i], a2, b2, self.radii[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Per-robot direction oracle: the neighbour of `c` in roadmap `robot`
    /// whose ray from `c` makes the smallest angle with the ray towards `q`.
    /// Ties go to the lowest id. If `q` coincides with `c` the nearest
    /// neighbour to `q` is returned instead.
    pub fn robot_direction(&self, robot: usize, c: VertexId, q: Point2) -> Option<VertexId> {
        let map = &self.roadmaps[robot];
        let origin = map.config(c);
        let nbrs = map.neighbors_unchecked(c);
        let mut best: Option<(f64, VertexId)> = None;
        if origin.dist(q) < EPS {
            for &v in nbrs {
                let d = map.config(v).dist2(q);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, v));
                }
            }
        } else {
            for &v in nbrs {
                // Neighbours are distinct configurations, so only q could
                // produce a degenerate ray and that case is handled above.
                let a = angle_between(origin, q, map.config(v)).unwrap_or(f64::INFINITY);
                if best.is_none_or(|(ba, _)| a < ba) {
                    best = Some((a, v));
                }
            }
        }
        best.map(|(_, v)| v)
    }

    /// Composite direction oracle. Returns `None` when any robot has no
    /// neighbours or the combined candidate is not a valid edge.
    pub fn direction_oracle(&self, c: &CompositeVertex, q: &[f64]) -> Option<CompositeVertex> {
        assert_eq!(q.len(), 2 * self.robots(), "sample dimension mismatch");
        let candidate = match self.mode {
            ProductMode::Tensor => {
                let mut ids = Vec::with_capacity(self.robots());
                for (i, &ci) in c.0.iter().enumerate() {
                    ids.push(self.robot_direction(i, ci, Point2::new(q[2 * i], q[2 * i + 1]))?);
                }
                CompositeVertex(ids)
            }
            ProductMode::Cartesian => self.cartesian_direction(c, q)?,
        };
        self.edge_valid_unchecked(c, &candidate, self.mode).then_some(candidate)
    }

    // Exact argmin over all single-mover neighbours in the joint space.
    fn cartesian_direction(&self, c: &CompositeVertex, q: &[f64]) -> Option<CompositeVertex> {
        let origin = self.embedding(c);
        let dq: Vec<f64> = q.iter().zip(&origin).map(|(a, b)| a - b).collect();
        let qq: f64 = dq.iter().map(|x| x * x).sum();
        let mut best: Option<(f64, usize, VertexId)> = None;
        for (i, &ci) in c.0.iter().enumerate() {
            let pi = self.config(i, ci);
            for &v in self.roadmaps[i].neighbors_unchecked(ci) {
                let d = self.config(i, v) - pi;
                let key = if qq.sqrt() < EPS {
                    // degenerate sample: nearest neighbour to q
                    let p = self.config(i, v);
                    (p.x - q[2 * i]).powi(2) + (p.y - q[2 * i + 1]).powi(2)
                } else {
                    let dot = d.x * dq[2 * i] + d.y * dq[2 * i + 1];
                    let cross2 = (d.norm2() * qq - dot * dot).max(0.0);
                    cross2.sqrt().atan2(dot)
                };
                if best.is_none_or(|(b, _, _)| key < b) {
                    best = Some((key, i, v));
                }
            }
        }
        best.map(|(_, i, v)| c.with(i, v))
    }

    /// Candidate moves from `c` for the exhaustive fallback, in a fixed
    /// order indexed by `cursor`. Returns the number of candidate slots.
    fn candidate_count(&self, c: &CompositeVertex) -> usize {
        match self.mode {
            ProductMode::Tensor => c
                .0
                .iter()
                .enumerate()
                .map(|(i, &id)| self.roadmaps[i].neighbors_unchecked(id).len() + 1)
                .try_fold(1usize, |acc, x| acc.checked_mul(x))
                .unwrap_or(usize::MAX),
            ProductMode::Cartesian => c
                .0
                .iter()
                .enumerate()
                .map(|(i, &id)| self.roadmaps[i].neighbors_unchecked(id).len())
                .sum(),
        }
    }

    fn candidate_at(&self, c: &CompositeVertex, mut slot: usize) -> CompositeVertex {
        match self.mode {
            ProductMode::Tensor => {
                // mixed radix; digit 0 means "stay"
                let mut ids = c.0.clone();
                for (i, id) in ids.iter_mut().enumerate() {
                    let nbrs = self.roadmaps[i].neighbors_unchecked(c.0[i]);
                    let radix = nbrs.len() + 1;
                    let digit = slot % radix;
                    slot /= radix;
                    if digit > 0 {
                        *id = nbrs[digit - 1];
                    }
                }
                CompositeVertex(ids)
            }
            ProductMode::Cartesian => {
                for (i, &id) in c.0.iter().enumerate() {
                    let nbrs = self.roadmaps[i].neighbors_unchecked(id);
                    if slot < nbrs.len() {
                        return c.with(i, nbrs[slot]);
                    }
                    slot -= nbrs.len();
                }
                unreachable!("slot out of range")
            }
        }
    }

    /// All valid neighbours of `c` in enumeration order.
    pub fn neighbors(&self, c: &CompositeVertex) -> Vec<CompositeVertex> {
        let mut cursor = 0;
        let mut out = Vec::new();
        while let Some(v) = self.next_neighbor(c, &mut cursor) {
            out.push(v);
        }
        out
    }
}

impl EmbeddedGraph for CompositeRoadmap<'_> {
    type Vertex = CompositeVertex;

    fn dimension(&self) -> usize {
        2 * self.robots()
    }

    fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    fn embed(&self, v: &CompositeVertex, out: &mut [f64]) {
        for (i, &id) in v.0.iter().enumerate() {
            let p = self.config(i, id);
            out[2 * i] = p.x;
            out[2 * i + 1] = p.y;
        }
    }

    fn direction_oracle(&self, v: &CompositeVertex, q: &[f64]) -> Option<CompositeVertex> {
        CompositeRoadmap::direction_oracle(self, v, q)
    }

    fn next_neighbor(&self, v: &CompositeVertex, cursor: &mut usize) -> Option<CompositeVertex> {
        let total = self.candidate_count(v);
        if self.mode == ProductMode::Tensor && *cursor == 0 {
            // slot 0 is the all-stay self loop
            *cursor = 1;
        }
        while *cursor < total {
            let cand = self.candidate_at(v, *cursor);
            *cursor += 1;
            if self.edge_valid_unchecked(v, &cand, self.mode) {
                return Some(cand);
            }
        }
        None
    }

    fn step_kind(&self, from: &CompositeVertex, to: &CompositeVertex) -> StepKind {
        match self.mode {
            ProductMode::Tensor => StepKind::Simultaneous,
            ProductMode::Cartesian => {
                let mover = (0..self.robots()).find(|&i| from.0[i] != to.0[i]).unwrap_or(0);
                StepKind::Single(mover)
            }
        }
    }

    fn contains(&self, v: &CompositeVertex) -> bool {
        self.check_ids(v).is_ok() && self.vertex_valid_unchecked(v)
    }
}

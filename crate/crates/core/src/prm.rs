//! Single-robot probabilistic roadmaps.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{disc_free_at, swept_disc_free, Disc, Point2, Polygon2};
use crate::spatial::KdTree;

/// Index of a vertex inside one robot's roadmap.
pub type VertexId = u32;

/// Embedded graph of collision-free configurations for one disc robot.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    vertices: Vec<Point2>,
    adjacency: Vec<Vec<VertexId>>,
    start: VertexId,
    target: VertexId,
}

#[derive(Debug, Clone, Copy)]
pub struct PrmConfig {
    /// Vertices per sampling batch, including start and target.
    pub n: usize,
    /// Nearest neighbours each vertex attempts to connect to.
    pub k: usize,
    /// Batches of `n` samples before giving up on connecting start and target.
    pub max_batches: usize,
    pub seed: u64,
}

impl Default for PrmConfig {
    fn default() -> Self {
        PrmConfig { n: 200, k: 8, max_batches: 10, seed: 0 }
    }
}

/// Obstacle-free geometry a roadmap is built in.
#[derive(Debug, Clone, Copy)]
pub struct Environment<'a> {
    pub workspace: &'a Polygon2,
    pub obstacles: &'a [Polygon2],
}

impl<'a> Environment<'a> {
    pub fn is_free(&self, p: Point2, r: Disc) -> bool {
        disc_free_at(p, r, self.workspace, self.obstacles)
    }

    pub fn sweep_free(&self, a: Point2, b: Point2, r: Disc) -> bool {
        swept_disc_free(a, b, r, self.workspace, self.obstacles)
    }
}

// Rejected samples per accepted vertex before declaring free space empty.
const MAX_REJECTIONS_PER_VERTEX: usize = 10_000;

/// Builds a PRM for one robot. Start and target are vertices 0 and 1 (or a
/// single vertex 0 when they coincide).
pub fn build_roadmap(
    radius: Disc,
    start: Point2,
    target: Point2,
    env: Environment<'_>,
    cfg: &PrmConfig,
) -> Result<Roadmap> {
    if cfg.n < 2 || cfg.k < 1 {
        return Err(Error::InvalidRoadmap(format!("need n >= 2 and k >= 1, got n={} k={}", cfg.n, cfg.k)));
    }
    if !env.is_free(start, radius) {
        return Err(Error::ConfigurationInCollision { robot: 0, which: "start" });
    }
    if !env.is_free(target, radius) {
        return Err(Error::ConfigurationInCollision { robot: 0, which: "target" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = env.workspace.bounding_box();

    let mut vertices = vec![start];
    let target_id = if target == start {
        0
    } else {
        vertices.push(target);
        1
    };

    for batch in 1..=cfg.max_batches {
        let goal = batch * cfg.n;
        let mut rejected = 0usize;
        while vertices.len() < goal {
            let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            if env.is_free(p, radius) {
                vertices.push(p);
            } else {
                rejected += 1;
                if rejected > MAX_REJECTIONS_PER_VERTEX * cfg.n {
                    return Err(Error::SamplingExhausted { attempts: rejected });
                }
            }
        }
        let adjacency = connect_k_nearest(&vertices, cfg.k, radius, env);
        let map = Roadmap { vertices: vertices.clone(), adjacency, start: 0, target: target_id };
        if map.connected(0, target_id) {
            return Ok(map);
        }
    }
    Err(Error::RoadmapDisconnected { batches: cfg.max_batches })
}

fn connect_k_nearest(vertices: &[Point2], k: usize, radius: Disc, env: Environment<'_>) -> Vec<Vec<VertexId>> {
    let mut index = KdTree::new(2);
    for p in vertices {
        index.insert(&[p.x, p.y]);
    }
    let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); vertices.len()];
    for (u, p) in vertices.iter().enumerate() {
        // k + 1 because the query point itself comes back first.
        for (v, _) in index.k_nearest(&[p.x, p.y], k + 1) {
            if v == u || adjacency[u].contains(&(v as VertexId)) {
                continue;
            }
            if env.sweep_free(*p, vertices[v], radius) {
                adjacency[u].push(v as VertexId);
                adjacency[v].push(u as VertexId);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    adjacency
}

impl Roadmap {
    /// Assembles a roadmap from explicit parts, checking structural
    /// invariants only (see [`Roadmap::check_geometry`]).
    pub fn from_parts(
        vertices: Vec<Point2>,
        edges: &[(VertexId, VertexId)],
        start: VertexId,
        target: VertexId,
    ) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::InvalidRoadmap("no vertices".into()));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidRoadmap("non-finite vertex".into()));
        }
        for id in [start, target] {
            if id as usize >= n {
                return Err(Error::UnknownVertex { id: id as usize, len: n });
            }
        }
        let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidRoadmap(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidRoadmap(format!("self-loop at {u}")));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let mut sorted: Vec<(u64, u64)> = vertices.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidRoadmap("duplicate vertex configuration".into()));
        }
        let map = Roadmap { vertices, adjacency, start, target };
        if !map.connected(start, target) {
            return Err(Error::InvalidRoadmap("start and target are not connected".into()));
        }
        Ok(map)
    }

    /// Verifies that every vertex and edge is collision-free for a disc of
    /// the given radius.
    pub fn check_geometry(&self, radius: Disc, env: Environment<'_>) -> Result<()> {
        for (i, p) in self.vertices.iter().enumerate() {
            if !env.is_free(*p, radius) {
                return Err(Error::InvalidRoadmap(format!("vertex {i} is in collision")));
            }
        }
        for (u, v) in self.edges() {
            if !env.sweep_free(self.vertices[u as usize], self.vertices[v as usize], radius) {
                return Err(Error::InvalidRoadmap(format!("edge ({u}, {v}) is in collision")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Configuration of vertex `v`. Panics on an unknown id.
    pub fn config(&self, v: VertexId) -> Point2 {
        self.vertices[v as usize]
    }

    pub fn try_config(&self, v: VertexId) -> Result<Point2> {
        self.vertices
            .get(v as usize)
            .copied()
            .ok_or(Error::UnknownVertex { id: v as usize, len: self.len() })
    }

    /// Neighbours of `v` in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId]> {
        self.adjacency
            .get(v as usize)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownVertex { id: v as usize, len: self.len() })
    }

    pub(crate) fn neighbors_unchecked(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v as usize]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency
            .get(u as usize)
            .is_some_and(|list| list.binary_search(&v).is_ok())
    }

    /// Undirected edge list with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter().filter(move |&&v| (u as VertexId) < v).map(move |&v| (u as VertexId, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn connected(&self, a: VertexId, b: VertexId) -> bool {
        if a == b {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![a];
        seen[a as usize] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u as usize] {
                if v == b {
                    return true;
                }
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        false
    }

    /// Euclidean-shortest path from `from` to `to`, inclusive of both ends.
    /// `None` if they lie in different components.
    pub fn shortest_path(&self, from: VertexId, to: VertexId) -> Result<Option<Vec<VertexId>>> {
        let n = self.len();
        for id in [from, to] {
            if id as usize >= n {
                return Err(Error::UnknownVertex { id: id as usize, len: n });
            }
        }
        Ok(self.dijkstra(from, to))
    }

    fn dijkstra(&self, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
        #[derive(PartialEq)]
        struct Key(f64, VertexId);
        impl Eq for Key {}
        impl Ord for Key {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
            }
        }
        impl PartialOrd for Key {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }

        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<VertexId>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[from as usize] = 0.0;
        heap.push(Reverse(Key(0.0, from)));
        while let Some(Reverse(Key(d, u))) = heap.pop() {
            if done[u as usize] {
                continue;
            }
            done[u as usize] = true;
            if u == to {
                break;
            }
            let pu = self.vertices[u as usize];
            for &v in &self.adjacency[u as usize] {
                let nd = d + pu.dist(self.vertices[v as usize]);
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    prev[v as usize] = Some(u);
                    heap.push(Reverse(Key(nd, v)));
                }
            }
        }
        if !done[to as usize] {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while let Some(p) = prev[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Summed Euclidean length of a vertex sequence.
    pub fn path_length(&self, path: &[VertexId]) -> f64 {
        path.windows(2).map(|w| self.config(w[0]).dist(self.config(w[1]))).sum()
    }

    pub fn to_file(&self) -> RoadmapFile {
        RoadmapFile {
            vertices: self.vertices.clone(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
            start: self.start,
            target: self.target,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: RoadmapFile = serde_json::from_str(s)?;
        Roadmap::try_from(file)
    }
}

/// On-disk roadmap format. Each undirected edge is stored once with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmapFile {
    pub vertices: Vec<Point2>,
    pub edges: Vec<[VertexId; 2]>,
    pub start: VertexId,
    pub target: VertexId,
}

impl TryFrom<RoadmapFile> for Roadmap {
    type Error = Error;

    fn try_from(f: RoadmapFile) -> Result<Self> {
        let edges: Vec<(VertexId, VertexId)> = f.edges.iter().map(|e| (e[0], e[1])).collect();
        Roadmap::from_parts(f.vertices, &edges, f.start, f.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room() -> Polygon2 {
        Polygon2::rect(0.0, 0.0, 10.0, 10.0)
    }

    fn disc() -> Disc {
        Disc::new(0.5).unwrap()
    }

    fn union_find_connected(n: usize, edges: &[(VertexId, VertexId)], a: usize, b: usize) -> bool {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let nx = p[c];
                p[c] = r;
                c = nx;
            }
            r
        }
        for &(u, v) in edges {
            let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            parent[ru] = rv;
        }
        find(&mut parent, a) == find(&mut parent, b)
    }

    #[test]
    fn empty_room_connects() {
        let ws = room();
        let env = Environment { workspace: &ws, obstacles: &[] };
        let cfg = PrmConfig { n: 50, k: 5, max_batches: 10, seed: 7 };
        let map = build_roadmap(disc(), Point2::new(1.0, 1.0), Point2::new(9.0, 9.0), env, &cfg).unwrap();
        assert_eq!(map.len(), 50);
        let edges: Vec<_> = map.edges().collect();
        assert!(union_find_connected(map.len(), &edges, map.start() as usize, map.target() as usize));
        map.check_geometry(disc(), env).unwrap();
    }

    #[test]
    fn start_equals_target() {
        let ws = room();
        let env = Environment { workspace: &ws, obstacles: &[] };
        let p = Point2::new(3.0, 3.0);
        let map = build_roadmap(disc(), p, p, env, &PrmConfig { n: 10, k: 3, ..Default::default() }).unwrap();
        assert_eq!(map.start(), map.target());
        assert_eq!(map.shortest_path(map.start(), map.target()).unwrap(), Some(vec![0]));
    }

    #[test]
    fn full_wall_is_disconnected() {
        let ws = room();
        let wall = [Polygon2::rect(4.5, -1.0, 5.5, 11.0)];
        let env = Environment { workspace: &ws, obstacles: &wall };
        let cfg = PrmConfig { n: 30, k: 4, max_batches: 10, seed: 1 };
        let err = build_roadmap(disc(), Point2::new(1.0, 5.0), Point2::new(9.0, 5.0), env, &cfg).unwrap_err();
        assert!(matches!(err, Error::RoadmapDisconnected { batches: 10 }));
        assert!(err.to_string().contains("roadmap disconnected"));
    }

    #[test]
    fn colliding_start_rejected() {
        let ws = room();
        let env = Environment { workspace: &ws, obstacles: &[] };
        let err = build_roadmap(disc(), Point2::new(0.2, 5.0), Point2::new(9.0, 5.0), env, &PrmConfig::default());
        assert!(matches!(err, Err(Error::ConfigurationInCollision { which: "start", .. })));
    }

    #[test]
    fn deterministic_bitwise() {
        let ws = room();
        let obs = [Polygon2::rect(3.0, 3.0, 6.0, 6.0)];
        let env = Environment { workspace: &ws, obstacles: &obs };
        let cfg = PrmConfig { n: 80, k: 6, max_batches: 10, seed: 99 };
        let a = build_roadmap(disc(), Point2::new(1.0, 1.0), Point2::new(9.0, 9.0), env, &cfg).unwrap();
        let b = build_roadmap(disc(), Point2::new(1.0, 1.0), Point2::new(9.0, 9.0), env, &cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn roadmap_invariants_hold() {
        let ws = room();
        let obs = [Polygon2::rect(2.0, 2.0, 4.0, 8.0), Polygon2::rect(6.0, 2.0, 8.0, 8.0)];
        let env = Environment { workspace: &ws, obstacles: &obs };
        let cfg = PrmConfig { n: 120, k: 8, max_batches: 10, seed: 3 };
        let map = build_roadmap(disc(), Point2::new(1.0, 5.0), Point2::new(9.0, 5.0), env, &cfg).unwrap();
        map.check_geometry(disc(), env).unwrap();
        // symmetric adjacency, exhaustive
        for u in 0..map.len() as VertexId {
            let nb = map.neighbors(u).unwrap();
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &v in nb {
                assert!(map.neighbors(v).unwrap().contains(&u));
            }
        }
        // pairwise distinct
        for i in 0..map.len() {
            for j in (i + 1)..map.len() {
                assert_ne!(map.vertices()[i], map.vertices()[j]);
            }
        }
        let path = map.shortest_path(map.start(), map.target()).unwrap().unwrap();
        let straight = map.config(map.start()).dist(map.config(map.target()));
        assert!(map.path_length(&path) >= straight);
    }

    #[test]
    fn neighbors_edge_cases() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(5.0, 5.0),
        ];
        let map = Roadmap::from_parts(pts, &[(1, 3), (1, 0), (1, 2)], 0, 3).unwrap();
        assert!(map.neighbors(4).unwrap().is_empty());
        assert_eq!(map.neighbors(1).unwrap(), &[0, 2, 3]);
        assert!(matches!(map.neighbors(9), Err(Error::UnknownVertex { id: 9, len: 5 })));
    }

    #[test]
    fn shortest_path_cases() {
        let line = Roadmap::from_parts(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)],
            &[(0, 1), (1, 2)],
            0,
            2,
        )
        .unwrap();
        assert_eq!(line.shortest_path(0, 0).unwrap(), Some(vec![0]));
        assert_eq!(line.shortest_path(0, 2).unwrap(), Some(vec![0, 1, 2]));
        assert!(line.shortest_path(0, 5).is_err());

        // a -- b -- c with a long detour a -- d -- c
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.1),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 5.0),
        ];
        let tri = Roadmap::from_parts(pts.clone(), &[(0, 1), (1, 2), (0, 3), (3, 2)], 0, 2).unwrap();
        let via_b = pts[0].dist(pts[1]) + pts[1].dist(pts[2]);
        let via_d = pts[0].dist(pts[3]) + pts[3].dist(pts[2]);
        assert!(via_b < via_d);
        assert_eq!(tri.shortest_path(0, 2).unwrap(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn disconnected_shortest_path_is_none() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(9.0, 9.0)];
        let map = Roadmap::from_parts(pts, &[(0, 1)], 0, 1).unwrap();
        assert_eq!(map.shortest_path(0, 2).unwrap(), None);
    }

    #[test]
    fn json_round_trip() {
        let ws = room();
        let env = Environment { workspace: &ws, obstacles: &[] };
        let cfg = PrmConfig { n: 40, k: 5, max_batches: 10, seed: 5 };
        let map = build_roadmap(disc(), Point2::new(1.0, 1.0), Point2::new(9.0, 2.0), env, &cfg).unwrap();
        let json = map.to_json().unwrap();
        let back = Roadmap::from_json(&json).unwrap();
        assert_eq!(back, map);
        let file: RoadmapFile = serde_json::from_str(&json).unwrap();
        assert!(file.edges.iter().all(|e| e[0] < e[1]));
    }
}

use serde::{Deserialize, Serialize};

/// How consecutive vertices of a path are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    /// Every robot moves along its own edge (or stays) at the same time.
    Simultaneous,
    /// Only the given robot moves; everyone else is parked.
    Single(usize),
}

/// Vertex sequence with one step annotation per consecutive pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path<V> {
    vertices: Vec<V>,
    steps: Vec<StepKind>,
}

impl<V: Clone + PartialEq> Path<V> {
    pub fn single(v: V) -> Self {
        Path { vertices: vec![v], steps: Vec::new() }
    }

    pub fn from_parts(vertices: Vec<V>, steps: Vec<StepKind>) -> Self {
        assert!(!vertices.is_empty(), "a path has at least one vertex");
        assert_eq!(vertices.len(), steps.len() + 1, "one annotation per step");
        Path { vertices, steps }
    }

    pub fn push(&mut self, v: V, kind: StepKind) {
        self.vertices.push(v);
        self.steps.push(kind);
    }

    pub fn first(&self) -> &V {
        &self.vertices[0]
    }

    pub fn last(&self) -> &V {
        self.vertices.last().unwrap()
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn steps(&self) -> &[StepKind] {
        &self.steps
    }

    /// Number of motion steps (vertices minus one).
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends `suffix`, which must start where `self` ends; the shared
    /// junction vertex appears once.
    pub fn concat(mut self, suffix: &Path<V>) -> Option<Self> {
        if suffix.first() != self.last() {
            return None;
        }
        self.vertices.extend_from_slice(&suffix.vertices[1..]);
        self.steps.extend_from_slice(&suffix.steps);
        Some(self)
    }
}

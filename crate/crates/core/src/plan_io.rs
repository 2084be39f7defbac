//! On-disk formats: plan files and roadmap directories.

use std::collections::HashMap;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::composite::CompositeVertex;
use crate::connector::CompositePath;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::oracle::{validate_path, ValidationReport, Violation, ViolationKind};
use crate::path::{Path, StepKind};
use crate::prm::{Roadmap, VertexId};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepTag {
    Simultaneous,
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub kind: StepTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mover: Option<usize>,
    /// Placement of every robot after the step.
    pub targets: Vec<Point2>,
}

/// A plan: robots start at the scenario's starts and pass through each
/// step's targets in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub scenario: String,
    pub seed: u64,
    pub steps: Vec<PlanStep>,
}

impl PlanFile {
    pub fn from_path(scenario: &str, seed: u64, roadmaps: &[Roadmap], path: &CompositePath) -> PlanFile {
        let steps = path
            .vertices()
            .iter()
            .skip(1)
            .zip(path.steps())
            .map(|(v, kind)| {
                let targets = v.ids().iter().zip(roadmaps).map(|(&id, m)| m.config(id)).collect();
                match *kind {
                    StepKind::Simultaneous => PlanStep { kind: StepTag::Simultaneous, mover: None, targets },
                    StepKind::Single(r) => PlanStep { kind: StepTag::Single, mover: Some(r), targets },
                }
            })
            .collect();
        PlanFile { scenario: scenario.to_string(), seed, steps }
    }

    /// Maps placements back to roadmap vertices by exact coordinates.
    pub fn to_path(&self, roadmaps: &[Roadmap]) -> std::result::Result<CompositePath, Violation> {
        let lookup: Vec<HashMap<(u64, u64), VertexId>> = roadmaps
            .iter()
            .map(|m| {
                let mut h = HashMap::new();
                for (i, p) in m.vertices().iter().enumerate() {
                    h.entry((p.x.to_bits(), p.y.to_bits())).or_insert(i as VertexId);
                }
                h
            })
            .collect();
        let start = CompositeVertex(roadmaps.iter().map(Roadmap::start).collect());
        let mut path = Path::single(start);
        for (s, step) in self.steps.iter().enumerate() {
            if step.targets.len() != roadmaps.len() {
                return Err(Violation {
                    step: Some(s),
                    kind: ViolationKind::RobotCount,
                    robots: vec![],
                    detail: format!("{} targets for {} robots", step.targets.len(), roadmaps.len()),
                });
            }
            let mut ids = Vec::with_capacity(roadmaps.len());
            for (r, p) in step.targets.iter().enumerate() {
                match lookup[r].get(&(p.x.to_bits(), p.y.to_bits())) {
                    Some(&id) => ids.push(id),
                    None => {
                        return Err(Violation {
                            step: Some(s),
                            kind: ViolationKind::UnknownConfiguration,
                            robots: vec![r],
                            detail: format!("robot {r} target ({}, {}) is not a roadmap vertex", p.x, p.y),
                        })
                    }
                }
            }
            let kind = match (step.kind, step.mover) {
                (StepTag::Simultaneous, _) => StepKind::Simultaneous,
                (StepTag::Single, Some(r)) => StepKind::Single(r),
                (StepTag::Single, None) => {
                    return Err(Violation {
                        step: Some(s),
                        kind: ViolationKind::NotSingleMover,
                        robots: vec![],
                        detail: "single step without a mover".into(),
                    })
                }
            };
            path.push(CompositeVertex(ids), kind);
        }
        Ok(path)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        PlanFile::from_json(&fs::read_to_string(path)?)
    }

    /// Waypoints per robot, starting at the robot's start.
    pub fn waypoints(&self, scenario: &Scenario) -> Vec<Vec<Point2>> {
        scenario
            .robots
            .iter()
            .enumerate()
            .map(|(r, spec)| {
                let mut w = vec![spec.start];
                w.extend(self.steps.iter().filter_map(|s| s.targets.get(r).copied()));
                w
            })
            .collect()
    }
}

/// Validates a plan file against a scenario and its roadmaps.
pub fn validate_plan(scenario: &Scenario, roadmaps: &[Roadmap], plan: &PlanFile) -> ValidationReport {
    if roadmaps.len() != scenario.robots.len() {
        return ValidationReport::from_violations(vec![Violation {
            step: None,
            kind: ViolationKind::RobotCount,
            robots: vec![],
            detail: format!("{} robots, {} roadmaps", scenario.robots.len(), roadmaps.len()),
        }]);
    }
    match plan.to_path(roadmaps) {
        Ok(path) => validate_path(scenario, roadmaps, &path),
        Err(v) => ValidationReport::from_violations(vec![v]),
    }
}

pub fn roadmap_file(dir: &FsPath, robot: usize) -> PathBuf {
    dir.join(format!("robot-{robot}.json"))
}

/// Writes `robot-<i>.json` for each roadmap.
pub fn save_roadmaps(dir: &FsPath, roadmaps: &[Roadmap]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    roadmaps
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let file = roadmap_file(dir, i);
            fs::write(&file, m.to_json()? + "\n")?;
            Ok(file)
        })
        .collect()
}

pub fn load_roadmaps(dir: &FsPath, robots: usize) -> Result<Vec<Roadmap>> {
    (0..robots)
        .map(|i| {
            let file = roadmap_file(dir, i);
            let text = fs::read_to_string(&file)
                .map_err(|e| Error::InvalidRoadmap(format!("{}: {e}", file.display())))?;
            Roadmap::from_json(&text)
        })
        .collect()
}

//! Planning problems: a workspace polygon, obstacles and disc robots with
//! start and target placements.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::composite::{CompositeRoadmap, ProductMode};
use crate::error::{Error, Result};
use crate::geometry::{Disc, Point2, Polygon2};
use crate::prm::{build_roadmap, Environment, PrmConfig, Roadmap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub radius: f64,
    pub start: Point2,
    pub target: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub workspace: Polygon2,
    #[serde(default)]
    pub obstacles: Vec<Polygon2>,
    pub robots: Vec<RobotSpec>,
}

/// Mixes a run seed with a stream index (splitmix64 finaliser).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Scenario {
    pub fn from_json(s: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn environment(&self) -> Environment<'_> {
        Environment { workspace: &self.workspace, obstacles: &self.obstacles }
    }

    pub fn radii(&self) -> Result<Vec<Disc>> {
        self.robots.iter().map(|r| Disc::new(r.radius)).collect()
    }

    /// Per-robot sampling box: the workspace bounding box.
    pub fn bounds(&self) -> Vec<(Point2, Point2)> {
        vec![self.workspace.bounding_box(); self.robots.len()]
    }

    /// Checks radii, start/target freedom against obstacles, and pairwise
    /// clearance of the start tuple and of the target tuple.
    pub fn validate(&self) -> Result<()> {
        if self.robots.is_empty() {
            return Err(Error::InvalidScenario("no robots".into()));
        }
        let radii = self.radii()?;
        let env = self.environment();
        for (i, (r, d)) in self.robots.iter().zip(&radii).enumerate() {
            if !r.start.is_finite() || !r.target.is_finite() {
                return Err(Error::InvalidScenario(format!("robot {i}: non-finite placement")));
            }
            if !env.is_free(r.start, *d) {
                return Err(Error::ConfigurationInCollision { robot: i, which: "start" });
            }
            if !env.is_free(r.target, *d) {
                return Err(Error::ConfigurationInCollision { robot: i, which: "target" });
            }
        }
        for i in 0..self.robots.len() {
            for j in (i + 1)..self.robots.len() {
                let reach = radii[i].radius() + radii[j].radius();
                let (a, b) = (&self.robots[i], &self.robots[j]);
                if a.start.dist(b.start) <= reach {
                    return Err(Error::InvalidScenario(format!("robots {i} and {j} overlap at start")));
                }
                if a.target.dist(b.target) <= reach {
                    return Err(Error::InvalidScenario(format!("robots {i} and {j} overlap at target")));
                }
            }
        }
        Ok(())
    }

    /// One PRM per robot; robot `i` uses seed `derive_seed(cfg.seed, i)`.
    pub fn build_roadmaps(&self, cfg: &PrmConfig) -> Result<Vec<Roadmap>> {
        self.validate()?;
        let radii = self.radii()?;
        self.robots
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let robot_cfg = PrmConfig { seed: derive_seed(cfg.seed, i as u64), ..*cfg };
                build_roadmap(radii[i], r.start, r.target, self.environment(), &robot_cfg).map_err(|e| match e {
                    Error::ConfigurationInCollision { which, .. } => Error::ConfigurationInCollision { robot: i, which },
                    other => other,
                })
            })
            .collect()
    }

    pub fn composite<'a>(&self, roadmaps: &'a [Roadmap], mode: ProductMode) -> Result<CompositeRoadmap<'a>> {
        if roadmaps.len() != self.robots.len() {
            return Err(Error::InvalidScenario(format!(
                "{} robots but {} roadmaps",
                self.robots.len(),
                roadmaps.len()
            )));
        }
        for (i, (map, r)) in roadmaps.iter().zip(&self.robots).enumerate() {
            if map.config(map.start()) != r.start || map.config(map.target()) != r.target {
                return Err(Error::InvalidScenario(format!("roadmap {i} does not match robot {i}'s start/target")));
            }
        }
        CompositeRoadmap::new(roadmaps, self.radii()?, &self.bounds(), mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "name": "two-rooms",
        "workspace": [[0,0],[10,0],[10,6],[0,6]],
        "obstacles": [[[4.5,0],[5.5,0],[5.5,2.5],[4.5,2.5]]],
        "robots": [
            {"radius": 0.5, "start": [1,1], "target": [9,5]},
            {"radius": 0.4, "start": [9,1], "target": [1,5]}
        ]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let sc = Scenario::from_json(SAMPLE).unwrap();
        assert_eq!(sc.robots.len(), 2);
        assert_eq!(sc.obstacles.len(), 1);
        let back = Scenario::from_json(&sc.to_json().unwrap()).unwrap();
        assert_eq!(back, sc);
    }

    #[test]
    fn rejects_colliding_start() {
        let bad = SAMPLE.replace("\"start\": [1,1]", "\"start\": [5,1]");
        assert!(matches!(
            Scenario::from_json(&bad),
            Err(Error::ConfigurationInCollision { robot: 0, which: "start" })
        ));
    }

    #[test]
    fn rejects_overlapping_targets() {
        let bad = SAMPLE.replace("\"target\": [1,5]", "\"target\": [8.5,5]");
        assert!(matches!(Scenario::from_json(&bad), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn rejects_clockwise_workspace() {
        let bad = SAMPLE.replace("[[0,0],[10,0],[10,6],[0,6]]", "[[0,0],[0,6],[10,6],[10,0]]");
        assert!(Scenario::from_json(&bad).is_err());
    }

    #[test]
    fn seeds_differ_per_robot() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }

    #[test]
    fn roadmaps_match_robots() {
        let sc = Scenario::from_json(SAMPLE).unwrap();
        let cfg = PrmConfig { n: 60, k: 6, max_batches: 10, seed: 1 };
        let maps = sc.build_roadmaps(&cfg).unwrap();
        assert_eq!(maps.len(), 2);
        let g = sc.composite(&maps, ProductMode::Tensor).unwrap();
        assert!(g.vertex_valid(&g.start()).unwrap());
        assert!(g.vertex_valid(&g.target()).unwrap());
    }
}

//! Multi-robot motion planning for disc robots in the plane by discrete RRT
//! search over an implicit product of per-robot probabilistic roadmaps.

pub mod bench;
pub mod composite;
pub mod connector;
pub mod drrt;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod path;
pub mod plan_io;
pub mod planner;
pub mod prm;
pub mod render;
pub mod scenario;
pub mod scenarios;
pub mod spatial;

pub use composite::{CompositeRoadmap, CompositeVertex, ProductMode};
pub use connector::{local_connect, CompositePath, PrioritizedConnector};
pub use drrt::{plan, Drrt, DrrtParams, EmbeddedGraph, FailureReason, FailureReport, LocalConnector, Schedule, Stats};
pub use error::{Error, Result};
pub use geometry::{Disc, Point2, Polygon2};
pub use path::{Path, StepKind};
pub use plan_io::PlanFile;
pub use planner::{solve, PlannerOptions, RunReport};
pub use prm::{PrmConfig, Roadmap, VertexId};
pub use scenario::{RobotSpec, Scenario};

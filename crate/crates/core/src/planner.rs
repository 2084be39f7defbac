//! End-to-end planning runs: roadmaps, dRRT search, validation and a report.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::composite::{CompositeRoadmap, ProductMode};
use crate::connector::{CompositePath, PrioritizedConnector};
use crate::drrt::{plan, DrrtParams, FailureReason, LocalConnector, Schedule};
use crate::error::Result;
use crate::oracle::{validate_path, Violation};
use crate::prm::{PrmConfig, Roadmap};
use crate::scenario::{derive_seed, Scenario};

// Stream index for the search RNG; robot roadmaps use streams 0..m.
const SEARCH_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone)]
pub struct PlannerOptions {
    pub prm: PrmConfig,
    pub seed: u64,
    pub max_iterations: usize,
    pub schedule: Schedule,
    pub mode: ProductMode,
    pub fallback: bool,
    pub time_budget: Option<Duration>,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            prm: PrmConfig::default(),
            seed: 0,
            max_iterations: 30,
            schedule: Schedule::default(),
            mode: ProductMode::Tensor,
            fallback: false,
            time_budget: Some(Duration::from_secs(60)),
        }
    }
}

impl PlannerOptions {
    pub fn prm_config(&self) -> PrmConfig {
        PrmConfig { seed: self.seed, ..self.prm }
    }

    pub fn drrt_params(&self) -> DrrtParams {
        DrrtParams {
            schedule: self.schedule,
            max_iterations: self.max_iterations,
            seed: derive_seed(self.seed, SEARCH_STREAM),
            fallback: self.fallback,
            time_budget: self.time_budget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunFailure {
    MaxIterations,
    TimeBudget,
    Exhausted,
    /// The search returned a path that the validator rejected.
    Rejected,
    /// Roadmap construction or setup failed before the search.
    Setup,
}

impl From<FailureReason> for RunFailure {
    fn from(r: FailureReason) -> Self {
        match r {
            FailureReason::MaxIterations => RunFailure::MaxIterations,
            FailureReason::TimeBudget => RunFailure::TimeBudget,
            FailureReason::Exhausted => RunFailure::Exhausted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub roadmap_ms: u64,
    pub expand_ms: u64,
    pub connect_ms: u64,
    pub total_ms: u64,
    /// Tree size when the search stopped.
    pub visited: usize,
    pub iterations: usize,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<RunFailure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn ms(d: Duration) -> u64 {
    d.as_millis() as u64
}

pub struct PlanRun {
    pub report: RunReport,
    pub path: Option<CompositePath>,
}

/// Searches over prebuilt roadmaps. The path is returned only if it
/// validates.
pub fn plan_with_roadmaps(scenario: &Scenario, roadmaps: &[Roadmap], opts: &PlannerOptions) -> Result<PlanRun> {
    plan_with_connector(scenario, roadmaps, opts, &mut PrioritizedConnector)
}

/// [`plan_with_roadmaps`] with a caller-supplied local connector.
pub fn plan_with_connector<C>(scenario: &Scenario, roadmaps: &[Roadmap], opts: &PlannerOptions, connector: &mut C) -> Result<PlanRun>
where
    C: for<'a> LocalConnector<CompositeRoadmap<'a>> + ?Sized,
{
    let started = Instant::now();
    let graph = scenario.composite(roadmaps, opts.mode)?;
    let outcome = plan(&graph, &graph.start(), &graph.target(), &opts.drrt_params(), connector)?;
    let mut report = RunReport {
        scenario: scenario.name.clone(),
        seed: opts.seed,
        roadmap_ms: 0,
        expand_ms: ms(outcome.stats.expand_time),
        connect_ms: ms(outcome.stats.connect_time),
        total_ms: 0,
        visited: outcome.tree.len(),
        iterations: outcome.stats.rounds,
        success: false,
        path_steps: None,
        failure: None,
        violations: Vec::new(),
        error: None,
    };
    let path = match outcome.result {
        Ok(path) => {
            let check = validate_path(scenario, roadmaps, &path);
            if check.ok {
                report.success = true;
                report.path_steps = Some(path.len());
                Some(path)
            } else {
                report.failure = Some(RunFailure::Rejected);
                report.violations = check.violations;
                None
            }
        }
        Err(f) => {
            report.failure = Some(f.reason.into());
            None
        }
    };
    report.total_ms = ms(started.elapsed());
    Ok(PlanRun { report, path })
}

/// Builds roadmaps with the options' seed, then plans.
pub fn solve(scenario: &Scenario, opts: &PlannerOptions) -> Result<(Vec<Roadmap>, PlanRun)> {
    let started = Instant::now();
    let roadmaps = scenario.build_roadmaps(&opts.prm_config())?;
    let roadmap_ms = ms(started.elapsed());
    let mut run = plan_with_roadmaps(scenario, &roadmaps, opts)?;
    run.report.roadmap_ms = roadmap_ms;
    run.report.total_ms = ms(started.elapsed());
    Ok((roadmaps, run))
}

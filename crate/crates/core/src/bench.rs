//! Benchmark harness: every scenario over a range of seeds, summarised as
//! one CSV row per scenario.

use std::fs;
use std::path::Path as FsPath;

use rayon::prelude::*;

use crate::error::Result;
use crate::planner::{solve, PlannerOptions, RunFailure, RunReport};
use crate::scenario::Scenario;

pub const CSV_HEADER: &str = "scenario,seeds,success_rate,mean_visited,mean_expand_ms,mean_connect_ms,mean_total_ms";

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Seeds `planner.seed .. planner.seed + seeds` are run per scenario.
    pub seeds: usize,
    pub planner: PlannerOptions,
    /// When false, time columns are written as zero so that the CSV is a
    /// pure function of the inputs.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scenario: String,
    pub seeds: usize,
    pub successes: usize,
    pub mean_visited: Option<f64>,
    pub mean_expand_ms: Option<f64>,
    pub mean_connect_ms: Option<f64>,
    pub mean_total_ms: Option<f64>,
}

impl BenchRow {
    pub fn success_rate(&self) -> f64 {
        if self.seeds == 0 {
            0.0
        } else {
            100.0 * self.successes as f64 / self.seeds as f64
        }
    }
}

pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    /// Every run, ordered by scenario then seed.
    pub reports: Vec<RunReport>,
}

impl BenchResult {
    pub fn failures(&self) -> impl Iterator<Item = &RunReport> {
        self.reports.iter().filter(|r| !r.success)
    }
}

/// Loads every `*.json` scenario in `dir`, ordered by file name.
pub fn load_dir(dir: &FsPath) -> Result<Vec<Scenario>> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files.iter().map(Scenario::load).collect()
}

fn run_one(scenario: &Scenario, opts: &PlannerOptions, timing: bool) -> RunReport {
    let mut report = match solve(scenario, opts) {
        Ok((_, run)) => run.report,
        Err(e) => RunReport {
            scenario: scenario.name.clone(),
            seed: opts.seed,
            roadmap_ms: 0,
            expand_ms: 0,
            connect_ms: 0,
            total_ms: 0,
            visited: 0,
            iterations: 0,
            success: false,
            path_steps: None,
            failure: Some(RunFailure::Setup),
            violations: Vec::new(),
            error: Some(e.to_string()),
        },
    };
    if !timing {
        report.roadmap_ms = 0;
        report.expand_ms = 0;
        report.connect_ms = 0;
        report.total_ms = 0;
    }
    report
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn run_bench(scenarios: &[Scenario], opts: &BenchOptions) -> BenchResult {
    let jobs: Vec<(usize, u64)> = (0..scenarios.len())
        .flat_map(|s| (0..opts.seeds as u64).map(move |k| (s, k)))
        .collect();
    let reports: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(s, k)| {
            let planner = PlannerOptions { seed: opts.planner.seed.wrapping_add(k), ..opts.planner.clone() };
            run_one(&scenarios[s], &planner, opts.timing)
        })
        .collect();
    let mut rows: Vec<BenchRow> = scenarios
        .iter()
        .enumerate()
        .map(|(s, sc)| {
            let mine = &reports[s * opts.seeds..(s + 1) * opts.seeds];
            let ok = || mine.iter().filter(|r| r.success);
            BenchRow {
                scenario: sc.name.clone(),
                seeds: opts.seeds,
                successes: ok().count(),
                mean_visited: mean(ok().map(|r| r.visited as f64)),
                mean_expand_ms: mean(ok().map(|r| r.expand_ms as f64)),
                mean_connect_ms: mean(ok().map(|r| r.connect_ms as f64)),
                mean_total_ms: mean(ok().map(|r| r.total_ms as f64)),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    BenchResult { rows, reports }
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "NA".into(),
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.seeds.to_string(),
            format!("{:.1}", r.success_rate()),
            cell(r.mean_visited),
            cell(r.mean_expand_ms),
            cell(r.mean_connect_ms),
            cell(r.mean_total_ms),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, Polygon2};
    use crate::prm::PrmConfig;
    use crate::scenario::RobotSpec;

    fn open(name: &str) -> Scenario {
        Scenario {
            name: name.into(),
            workspace: Polygon2::rect(0.0, 0.0, 6.0, 6.0),
            obstacles: vec![],
            robots: vec![
                RobotSpec { radius: 0.4, start: Point2::new(1.0, 1.0), target: Point2::new(5.0, 5.0) },
                RobotSpec { radius: 0.4, start: Point2::new(5.0, 1.0), target: Point2::new(1.0, 5.0) },
            ],
        }
    }

    // a robot walled into the left half cannot reach the right half
    fn walled(name: &str) -> Scenario {
        Scenario {
            name: name.into(),
            workspace: Polygon2::rect(0.0, 0.0, 6.0, 6.0),
            obstacles: vec![Polygon2::rect(2.8, 0.0, 3.2, 6.0)],
            robots: vec![RobotSpec { radius: 0.4, start: Point2::new(1.0, 1.0), target: Point2::new(5.0, 5.0) }],
        }
    }

    fn opts(seeds: usize) -> BenchOptions {
        BenchOptions {
            seeds,
            planner: PlannerOptions { prm: PrmConfig { n: 50, k: 6, max_batches: 2, seed: 0 }, ..Default::default() },
            timing: false,
        }
    }

    #[test]
    fn rows_and_rates() {
        let res = run_bench(&[walled("b-walled"), open("a-open")], &opts(3));
        let csv = to_csv(&res.rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("a-open,3,100.0,"), "{csv}");
        assert_eq!(lines[2], "b-walled,3,0.0,NA,NA,NA,NA");
        assert_eq!(res.failures().count(), 3);
        assert!(res.failures().all(|r| r.failure == Some(RunFailure::Setup)));
    }

    #[test]
    fn deterministic_without_timing() {
        let a = to_csv(&run_bench(&[open("x")], &opts(2)).rows);
        let b = to_csv(&run_bench(&[open("x")], &opts(2)).rows);
        assert_eq!(a, b);
    }

    #[test]
    fn names_with_commas_are_quoted() {
        let row = BenchRow {
            scenario: "a,b".into(),
            seeds: 1,
            successes: 0,
            mean_visited: None,
            mean_expand_ms: None,
            mean_connect_ms: None,
            mean_total_ms: None,
        };
        assert_eq!(to_csv(&[row]).lines().nth(1), Some("\"a,b\",1,0.0,NA,NA,NA,NA"));
    }
}

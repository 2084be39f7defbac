use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mrdrrt::bench::{load_dir, run_bench, to_csv, BenchOptions};
use mrdrrt::plan_io::{load_roadmaps, save_roadmaps, validate_plan, PlanFile};
use mrdrrt::planner::{plan_with_roadmaps, PlannerOptions};
use mrdrrt::render::render_svg;
use mrdrrt::{scenarios, Error, PrmConfig, ProductMode, Scenario};

#[derive(Parser)]
#[command(name = "mrdrrt", version, about = "Multi-robot disc motion planning with discrete RRT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        matches!(self, Switch::On)
    }
}

#[derive(Args, Clone)]
struct PrmArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Roadmap vertices per batch.
    #[arg(long = "prm-n", default_value_t = 200)]
    prm_n: usize,
    /// Neighbours per roadmap vertex.
    #[arg(long = "prm-k", default_value_t = 8)]
    prm_k: usize,
    /// Sampling batches before giving up on connectivity.
    #[arg(long = "prm-batches", default_value_t = 10)]
    prm_batches: usize,
}

impl PrmArgs {
    fn config(&self) -> PrmConfig {
        PrmConfig { n: self.prm_n, k: self.prm_k, max_batches: self.prm_batches, seed: self.seed }
    }
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[command(flatten)]
    prm: PrmArgs,
    #[arg(long = "max-iters", default_value_t = 30)]
    max_iters: usize,
    #[arg(long, default_value = "tensor")]
    mode: ProductMode,
    #[arg(long, value_enum, default_value = "off")]
    fallback: Switch,
    /// Search time budget per run; 0 disables it.
    #[arg(long = "time-budget-ms", default_value_t = 60_000)]
    time_budget_ms: u64,
}

impl SearchArgs {
    fn options(&self) -> PlannerOptions {
        PlannerOptions {
            prm: self.prm.config(),
            seed: self.prm.seed,
            max_iterations: self.max_iters,
            mode: self.mode,
            fallback: self.fallback.on(),
            time_budget: (self.time_budget_ms > 0).then(|| Duration::from_millis(self.time_budget_ms)),
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build and save one roadmap per robot.
    BuildRoadmaps {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        prm: PrmArgs,
    },
    /// Plan a scenario and write the plan and a run report.
    Plan {
        scenario: PathBuf,
        /// Directory written by build-roadmaps; built on the fly if omitted.
        #[arg(long)]
        roadmaps: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Run report path; printed to stdout if omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check a plan against a scenario and its roadmaps.
    Validate {
        scenario: PathBuf,
        plan: PathBuf,
        #[arg(long)]
        roadmaps: PathBuf,
    },
    /// Draw a scenario, optionally with a plan, as SVG.
    Render {
        scenario: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every scenario in a directory over several seeds and write CSV.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        /// CSV path; printed to stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-run failure reports.
        #[arg(long)]
        reports: Option<PathBuf>,
        /// Record wall times; with off, time columns are zero.
        #[arg(long, value_enum, default_value = "on")]
        timing: Switch,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Write the bundled scenarios as JSON files.
    Scenarios {
        #[arg(long)]
        out: PathBuf,
    },
}

fn write(path: &PathBuf, text: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::BuildRoadmaps { scenario, out, prm } => {
            let sc = Scenario::load(&scenario)?;
            let maps = sc.build_roadmaps(&prm.config())?;
            for f in save_roadmaps(&out, &maps)? {
                println!("{}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan { scenario, roadmaps, out, report, search } => {
            let sc = Scenario::load(&scenario)?;
            let opts = search.options();
            let (maps, roadmap_ms) = match roadmaps {
                Some(dir) => (load_roadmaps(&dir, sc.robots.len())?, 0),
                None => {
                    let t = std::time::Instant::now();
                    (sc.build_roadmaps(&opts.prm_config())?, t.elapsed().as_millis() as u64)
                }
            };
            let mut run = plan_with_roadmaps(&sc, &maps, &opts)?;
            run.report.roadmap_ms = roadmap_ms;
            run.report.total_ms += roadmap_ms;
            let text = run.report.to_json()? + "\n";
            match &report {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            match run.path {
                Some(path) => {
                    let plan = PlanFile::from_path(&sc.name, opts.seed, &maps, &path);
                    write(&out, &(plan.to_json()? + "\n"))?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("planning failed: {:?}", run.report.failure);
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Validate { scenario, plan, roadmaps } => {
            let sc = Scenario::load(&scenario)?;
            let maps = load_roadmaps(&roadmaps, sc.robots.len())?;
            let report = validate_plan(&sc, &maps, &PlanFile::load(&plan)?);
            println!("{}", report.to_json()?);
            Ok(if report.ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Render { scenario, plan, out } => {
            let sc = Scenario::load(&scenario)?;
            let plan = plan.map(PlanFile::load).transpose()?;
            write(&out, &render_svg(&sc, plan.as_ref()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { dir, seeds, out, reports, timing, search } => {
            let scs = load_dir(&dir)?;
            let opts = BenchOptions { seeds, planner: search.options(), timing: timing.on() };
            let res = run_bench(&scs, &opts);
            let csv = to_csv(&res.rows);
            match &out {
                Some(p) => write(p, &csv)?,
                None => print!("{csv}"),
            }
            for r in res.failures() {
                eprintln!("failure: {} seed {}: {:?}", r.scenario, r.seed, r.failure);
                if let Some(dir) = &reports {
                    write(&dir.join(format!("{}-seed{}.json", r.scenario, r.seed)), &(r.to_json()? + "\n"))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scenarios { out } => {
            fs::create_dir_all(&out)?;
            for sc in scenarios::bundled() {
                let path = out.join(format!("{}.json", sc.name));
                fs::write(&path, sc.to_json()? + "\n")?;
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

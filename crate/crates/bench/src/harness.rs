use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use fiberdance_core::patterns::PatternSet;
use fiberdance_core::{
    baseline_plan, check_motion_path, multilevel_plan, seeded_rng, BaselineKind, Clock, PlanResult, PlannerConfig,
    PlannerKind, Ptc, Scenario, State, WorkClock,
};

use crate::clock::WallClock;
use crate::error::BenchError;
use crate::run_file;

/// Environment variable that overrides the base seed.
pub const SEED_ENV: &str = "FIBERDANCE_SEED";

/// Revalidation resolution relative to the planners' own.
const REVALIDATION_REFINEMENT: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlannerChoice {
    Qrrt,
    Qmp,
    /// QMP with the dance reduced to Manhattan and triple step.
    QmpTripleStep,
    Rrt,
    Prm,
}

impl PlannerChoice {
    pub const ALL: [PlannerChoice; 5] =
        [PlannerChoice::Qrrt, PlannerChoice::Qmp, PlannerChoice::QmpTripleStep, PlannerChoice::Rrt, PlannerChoice::Prm];

    pub fn name(self) -> &'static str {
        match self {
            PlannerChoice::Qrrt => "QRRT",
            PlannerChoice::Qmp => "QMP",
            PlannerChoice::QmpTripleStep => "QMP-TS",
            PlannerChoice::Rrt => "RRT",
            PlannerChoice::Prm => "PRM",
        }
    }

    pub fn plan(
        self,
        scenario: &Scenario,
        config: &PlannerConfig,
        ptc: &Ptc,
        seed: u64,
        clock: &dyn Clock,
    ) -> fiberdance_core::Result<PlanResult> {
        let mut rng = seeded_rng(seed);
        match self {
            PlannerChoice::Qrrt => multilevel_plan(scenario, PlannerKind::Qrrt, config, ptc, &mut rng, clock),
            PlannerChoice::Qmp => multilevel_plan(scenario, PlannerKind::Qmp, config, ptc, &mut rng, clock),
            PlannerChoice::QmpTripleStep => {
                let mut config = *config;
                config.dance.patterns = PatternSet::triple_step_only();
                multilevel_plan(scenario, PlannerKind::Qmp, &config, ptc, &mut rng, clock)
            }
            PlannerChoice::Rrt => baseline_plan(scenario, BaselineKind::Rrt, config, ptc, &mut rng, clock),
            PlannerChoice::Prm => baseline_plan(scenario, BaselineKind::Prm, config, ptc, &mut rng, clock),
        }
    }
}

impl fmt::Display for PlannerChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlannerChoice::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(s)).ok_or_else(|| {
            BenchError::Config(format!("unknown planner `{s}` (expected QRRT, QMP, QMP-TS, RRT or PRM)"))
        })
    }
}

/// How run time is measured against the cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClockChoice {
    /// Nominal seconds from counted work. Reproducible.
    Work(WorkClock),
    /// Real elapsed time.
    Wall,
}

impl Default for ClockChoice {
    fn default() -> Self {
        ClockChoice::Work(WorkClock::default())
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub scenarios: Vec<Scenario>,
    pub planners: Vec<PlannerChoice>,
    pub runs: usize,
    pub cutoff: f64,
    pub seed: u64,
    /// Per-run result files go to `out_dir/runs`. `None` keeps everything in memory.
    pub out_dir: Option<PathBuf>,
    pub parallel: usize,
    pub clock: ClockChoice,
    pub planner: PlannerConfig,
}

impl BenchConfig {
    pub fn new(scenarios: Vec<Scenario>, planners: Vec<PlannerChoice>) -> Self {
        BenchConfig {
            scenarios,
            planners,
            runs: 10,
            cutoff: 10.0,
            seed: 0,
            out_dir: None,
            parallel: 1,
            clock: ClockChoice::default(),
            planner: PlannerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.runs < 1 {
            return Err(BenchError::Config("runs must be at least 1".into()));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(BenchError::Config(format!("cutoff must be positive, got {}", self.cutoff)));
        }
        if self.parallel < 1 {
            return Err(BenchError::Config("parallel must be at least 1".into()));
        }
        if self.scenarios.is_empty() || self.planners.is_empty() {
            return Err(BenchError::Config("need at least one scenario and one planner".into()));
        }
        self.planner.dance.validate().map_err(|e| BenchError::Config(e.to_string()))
    }

    /// Replaces the base seed with `FIBERDANCE_SEED` when set.
    pub fn apply_seed_env(&mut self) -> Result<(), BenchError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| BenchError::Config(format!("{SEED_ENV}=`{v}` is not a seed")))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchRecord {
    pub scenario: String,
    pub planner: String,
    pub seed: u64,
    pub solved: bool,
    /// Seconds; the cutoff when unsolved.
    pub wall_time: f64,
    /// Infinite when unsolved.
    pub cost: f64,
    pub manhattan_calls: u64,
    pub wriggle_calls: u64,
    pub tunnel_calls: u64,
    pub triplestep_calls: u64,
    pub vertices_total: usize,
    pub edges_total: usize,
    /// (vertices, edges) per level, coarsest first. Not part of the CSV.
    pub levels: Vec<(usize, usize)>,
    /// Not part of the CSV.
    pub path: Vec<Vec<f64>>,
    /// Why an unsolved run failed, if it did not simply time out.
    pub failure: Option<String>,
}

impl BenchRecord {
    fn failed(scenario: &str, planner: PlannerChoice, seed: u64, cutoff: f64, why: String) -> Self {
        BenchRecord {
            scenario: scenario.to_string(),
            planner: planner.name().to_string(),
            seed,
            solved: false,
            wall_time: cutoff,
            cost: f64::INFINITY,
            failure: Some(why),
            ..Default::default()
        }
    }

    pub fn sort_key(&self) -> (&str, &str, u64) {
        (&self.scenario, &self.planner, self.seed)
    }
}

/// Checks a path against the scenario at ten times the planners' resolution.
pub fn revalidate(scenario: &Scenario, path: &[State]) -> Result<(), String> {
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        return Err("empty path".into());
    };
    let top = scenario.ladder().total();
    let tol = scenario.goal_tolerance();
    if top.space.distance(first, scenario.start()) > tol {
        return Err("path does not begin at the start".into());
    }
    if top.space.distance(last, scenario.goal()) > tol {
        return Err("path does not end at the goal".into());
    }
    let checker = top
        .checker
        .unmetered()
        .with_resolution(top.checker.resolution() / REVALIDATION_REFINEMENT)
        .map_err(|e| e.to_string())?;
    let r = check_motion_path(&checker, &top.space, path);
    if r.motion.reached {
        Ok(())
    } else {
        Err(format!("segment {} invalid at fraction {:.6}", r.segment, r.segment_fraction))
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// One (scenario, planner, seed) cell.
pub fn run_cell(config: &BenchConfig, scenario: &Scenario, planner: PlannerChoice, seed: u64) -> BenchRecord {
    run_cell_detailed(config, scenario, planner, seed).0
}

/// Like [`run_cell`], also handing back the planner's own result when it
/// returned one.
pub fn run_cell_detailed(
    config: &BenchConfig,
    scenario: &Scenario,
    planner: PlannerChoice,
    seed: u64,
) -> (BenchRecord, Option<PlanResult>) {
    let name = scenario.name();
    let ptc = Ptc::time(config.cutoff);
    let outcome = catch_unwind(AssertUnwindSafe(|| match config.clock {
        ClockChoice::Work(clock) => planner.plan(scenario, &config.planner, &ptc, seed, &clock),
        ClockChoice::Wall => planner.plan(scenario, &config.planner, &ptc, seed, &WallClock::start()),
    }));
    let result = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => return (BenchRecord::failed(name, planner, seed, config.cutoff, e.to_string()), None),
        Err(p) => {
            let why = format!("panic: {}", panic_message(&*p));
            return (BenchRecord::failed(name, planner, seed, config.cutoff, why), None);
        }
    };
    let stats = result.pattern_stats();
    let mut record = BenchRecord {
        scenario: name.to_string(),
        planner: planner.name().to_string(),
        seed,
        solved: false,
        wall_time: config.cutoff,
        cost: f64::INFINITY,
        manhattan_calls: stats.manhattan.calls,
        wriggle_calls: stats.wriggle.calls,
        tunnel_calls: stats.tunnel.calls,
        triplestep_calls: stats.triple_step.calls,
        vertices_total: result.vertices_total(),
        edges_total: result.edges_total(),
        levels: result.levels.iter().map(|l| (l.vertices, l.edges)).collect(),
        path: Vec::new(),
        failure: None,
    };
    if !result.solved {
        return (record, Some(result));
    }
    if result.wall_time > config.cutoff {
        record.failure = Some(format!("solved after the cutoff ({:.6} s)", result.wall_time));
    } else if let Err(why) = revalidate(scenario, &result.path) {
        record.failure = Some(format!("path failed revalidation: {why}"));
    } else {
        record.solved = true;
        record.wall_time = result.wall_time;
        record.cost = result.cost;
        record.path = result.path.iter().map(|s| s.values().to_vec()).collect();
    }
    (record, Some(result))
}

/// Runs every (scenario, planner, seed) cell, seeds `seed .. seed + runs`.
/// Records come back sorted by scenario, planner and seed. With an output
/// directory each record is also written to `runs/` as soon as it finishes.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    config.validate()?;
    let runs_dir = config.out_dir.as_ref().map(|d| d.join("runs"));
    if let Some(dir) = &runs_dir {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    }
    let mut cells = Vec::new();
    for scenario in &config.scenarios {
        for &planner in &config.planners {
            for i in 0..config.runs as u64 {
                cells.push((scenario, planner, config.seed.wrapping_add(i)));
            }
        }
    }
    let records = Mutex::new(Vec::with_capacity(cells.len()));
    let first_error = Mutex::new(None);
    let finish = |record: BenchRecord| {
        if let Some(dir) = &runs_dir {
            if let Err(e) = write_record(dir, &record) {
                first_error.lock().unwrap().get_or_insert(e);
            }
        }
        records.lock().unwrap().push(record);
    };
    if config.parallel == 1 {
        for &(s, p, seed) in &cells {
            finish(run_cell(config, s, p, seed));
        }
    } else {
        let next = Mutex::new(cells.iter());
        std::thread::scope(|scope| {
            for _ in 0..config.parallel.min(cells.len()) {
                scope.spawn(|| loop {
                    let cell = next.lock().unwrap().next();
                    let Some(&(s, p, seed)) = cell else { break };
                    finish(run_cell(config, s, p, seed));
                });
            }
        });
    }
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    let mut records = records.into_inner().unwrap();
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(records)
}

pub fn record_file_name(record: &BenchRecord) -> String {
    let safe: String = record
        .scenario
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    format!("{safe}__{}__{}.json", record.planner, record.seed)
}

fn write_record(dir: &Path, record: &BenchRecord) -> Result<(), BenchError> {
    let path = dir.join(record_file_name(record));
    std::fs::write(&path, run_file::to_json(record)).map_err(|e| BenchError::io(&path, e))
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fiberdance_bench::{
    emit_csv, emit_svg, parse_csv, resolve_scenario, run_benchmark, run_file, summarize, BenchConfig, BenchError,
    ClockChoice, PlannerChoice,
};
use fiberdance_core::{State, WorkClock};

#[derive(Parser)]
#[command(name = "bench", version, about = "Seeded benchmark runs for the fiberdance planners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    /// Nominal seconds from counted work; reproducible.
    Work,
    /// Real elapsed time.
    Wall,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario x planner x seed cell and write results.csv.
    Run {
        /// Builtin scenario name or scenario file.
        #[arg(long, num_args = 1.., required = true)]
        scenario: Vec<String>,
        /// Comma-separated planners: QRRT, QMP, QMP-TS, RRT, PRM.
        #[arg(long, value_delimiter = ',', default_value = "QMP,RRT")]
        planner: Vec<String>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Seconds per run.
        #[arg(long, default_value_t = 10.0)]
        cutoff: f64,
        /// Base seed; overridden by FIBERDANCE_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long, value_enum, default_value = "work")]
        clock: ClockArg,
    },
    /// Print the runtime table for a results directory.
    Summarize { dir: PathBuf },
    /// Draw a run's path as SVG.
    Render {
        #[arg(long)]
        scenario: String,
        /// Per-run JSON written by `run`.
        #[arg(long)]
        result: PathBuf,
        #[arg(long, default_value_t = 8)]
        ghosts: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample each bundle of a scenario and count admissibility violations.
    CheckAdmissibility {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), BenchError> {
    std::fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

fn execute(command: Command) -> Result<(), BenchError> {
    match command {
        Command::Run { scenario, planner, runs, cutoff, seed, out, parallel, clock } => {
            let scenarios = scenario.iter().map(|s| resolve_scenario(s)).collect::<Result<Vec<_>, _>>()?;
            let planners = planner.iter().map(|p| p.trim().parse()).collect::<Result<Vec<PlannerChoice>, _>>()?;
            let mut config = BenchConfig::new(scenarios, planners);
            config.runs = runs;
            config.cutoff = cutoff;
            config.seed = seed;
            config.parallel = parallel;
            config.out_dir = Some(out.clone());
            config.clock = match clock {
                ClockArg::Work => ClockChoice::Work(WorkClock::default()),
                ClockArg::Wall => ClockChoice::Wall,
            };
            config.apply_seed_env()?;
            config.validate()?;
            let records = run_benchmark(&config)?;
            write(&out.join("results.csv"), &emit_csv(&records))?;
            print!("{}", summarize(&records));
        }
        Command::Summarize { dir } => {
            let records = parse_csv(&read(&dir.join("results.csv"))?)?;
            print!("{}", summarize(&records));
        }
        Command::Render { scenario, result, ghosts, out } => {
            let scenario = resolve_scenario(&scenario)?;
            let record = run_file::from_json(&read(&result)?)?;
            let path: Vec<State> = record.path.into_iter().map(State::new).collect();
            let robot = scenario.parts().robots.last().expect("scenarios have a level");
            write(&out, &emit_svg(scenario.world(), robot, &path, ghosts)?)?;
        }
        Command::CheckAdmissibility { scenario, samples, seed } => {
            if samples == 0 {
                return Err(BenchError::Config("samples must be at least 1".into()));
            }
            let scenario = resolve_scenario(&scenario)?;
            for (k, report) in scenario.check_admissibility(samples, seed).iter().enumerate() {
                match report {
                    None => println!("bundle {k}: inflated, skipped"),
                    Some(r) => println!("bundle {k}: {} violations in {} samples", r.violations, r.samples),
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

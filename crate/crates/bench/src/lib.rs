//! Benchmark harness for `fiberdance-core`: scenario files, seeded
//! benchmark runs, CSV and table reports, and SVG rendering of solutions.

pub mod clock;
pub mod error;
pub mod harness;
pub mod report;
pub mod run_file;
pub mod scenario_file;
pub mod svg;

pub use clock::WallClock;
pub use error::BenchError;
pub use harness::{run_benchmark, BenchConfig, BenchRecord, ClockChoice, PlannerChoice};
pub use report::{emit_csv, parse_csv, summarize};
pub use scenario_file::{load_scenario, resolve_scenario, to_canonical, LoadError};
pub use svg::emit_svg;

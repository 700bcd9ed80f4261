use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::BenchError;
use crate::harness::BenchRecord;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    scenario: String,
    planner: String,
    seed: u64,
    solved: bool,
    wall_time_s: String,
    cost: String,
    manhattan_calls: u64,
    wriggle_calls: u64,
    tunnel_calls: u64,
    triplestep_calls: u64,
    vertices_total: usize,
    edges_total: usize,
}

fn real(x: f64) -> String {
    format!("{x:.6}")
}

fn parse_real(s: &str, what: &str) -> Result<f64, BenchError> {
    s.parse().map_err(|_| BenchError::RunFile(format!("{what} `{s}` is not a number")))
}

/// CSV with one row per record, sorted by scenario, planner and seed.
/// Reals carry 6 decimals; an unsolved run's cost is `inf`.
pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut sorted: Vec<&BenchRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in sorted {
        w.serialize(Row {
            scenario: r.scenario.clone(),
            planner: r.planner.clone(),
            seed: r.seed,
            solved: r.solved,
            wall_time_s: real(r.wall_time),
            cost: real(r.cost),
            manhattan_calls: r.manhattan_calls,
            wriggle_calls: r.wriggle_calls,
            tunnel_calls: r.tunnel_calls,
            triplestep_calls: r.triplestep_calls,
            vertices_total: r.vertices_total,
            edges_total: r.edges_total,
        })
        .expect("writing to memory");
    }
    let bytes = w.into_inner().expect("flushing to memory");
    let text = String::from_utf8(bytes).expect("CSV is UTF-8");
    if text.is_empty() {
        HEADER.to_string() + "\n"
    } else {
        text
    }
}

const HEADER: &str = "scenario,planner,seed,solved,wall_time_s,cost,manhattan_calls,wriggle_calls,tunnel_calls,triplestep_calls,vertices_total,edges_total";

/// Reads what `emit_csv` writes. Per-level counts and paths are not in the
/// CSV and come back empty.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != HEADER {
        return Err(BenchError::RunFile(format!("unexpected CSV header `{header}`")));
    }
    reader
        .deserialize::<Row>()
        .map(|row| {
            let row = row?;
            Ok(BenchRecord {
                wall_time: parse_real(&row.wall_time_s, "wall_time_s")?,
                cost: parse_real(&row.cost, "cost")?,
                scenario: row.scenario,
                planner: row.planner,
                seed: row.seed,
                solved: row.solved,
                manhattan_calls: row.manhattan_calls,
                wriggle_calls: row.wriggle_calls,
                tunnel_calls: row.tunnel_calls,
                triplestep_calls: row.triplestep_calls,
                vertices_total: row.vertices_total,
                edges_total: row.edges_total,
                ..Default::default()
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub scenario: String,
    pub planner: String,
    pub runs: usize,
    pub solved: usize,
    /// Over all runs, unsolved ones at their recorded cutoff.
    pub mean_time: f64,
}

/// Mean time and success count per (scenario, planner), sorted.
pub fn summary_rows(records: &[BenchRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(&str, &str), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((&r.scenario, &r.planner)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((scenario, planner), rs)| Summary {
            scenario: scenario.to_string(),
            planner: planner.to_string(),
            runs: rs.len(),
            solved: rs.iter().filter(|r| r.solved).count(),
            mean_time: rs.iter().map(|r| r.wall_time).sum::<f64>() / rs.len() as f64,
        })
        .collect()
}

/// Fixed-width runtime table. The planner with the lowest mean time in each
/// scenario is marked `*`.
pub fn summarize(records: &[BenchRecord]) -> String {
    let rows = summary_rows(records);
    let sw = rows.iter().map(|r| r.scenario.len()).chain(["scenario".len()]).max().unwrap();
    let pw = rows.iter().map(|r| r.planner.len()).chain(["planner".len()]).max().unwrap();
    let mut out = String::new();
    writeln!(out, "{:<sw$}  {:<pw$}  {:>12}  {:>9}", "scenario", "planner", "mean time s", "solved").unwrap();
    writeln!(out, "{}", "-".repeat(sw + pw + 29)).unwrap();
    for (i, r) in rows.iter().enumerate() {
        let best = rows.iter().filter(|o| o.scenario == r.scenario).map(|o| o.mean_time).fold(f64::INFINITY, f64::min);
        let first_best =
            rows.iter().position(|o| o.scenario == r.scenario && o.mean_time == best).is_some_and(|j| j == i);
        let solved = format!("{}/{}", r.solved, r.runs);
        let mark = if first_best { " *" } else { "" };
        writeln!(out, "{:<sw$}  {:<pw$}  {:>12.2}  {:>9}{mark}", r.scenario, r.planner, r.mean_time, solved).unwrap();
    }
    out
}

//! Per-run result documents, one JSON object per (scenario, planner, seed).
//! `cost` is omitted for unsolved runs.

use serde::{Deserialize, Serialize};

use crate::error::BenchError;
use crate::harness::BenchRecord;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunDoc {
    scenario: String,
    planner: String,
    seed: u64,
    solved: bool,
    wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost: Option<f64>,
    patterns: PatternCalls,
    levels: Vec<LevelDoc>,
    path: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternCalls {
    manhattan: u64,
    wriggle: u64,
    tunnel: u64,
    triple_step: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelDoc {
    vertices: usize,
    edges: usize,
}

pub fn to_json(r: &BenchRecord) -> String {
    let doc = RunDoc {
        scenario: r.scenario.clone(),
        planner: r.planner.clone(),
        seed: r.seed,
        solved: r.solved,
        wall_time_s: r.wall_time,
        cost: r.cost.is_finite().then_some(r.cost),
        patterns: PatternCalls {
            manhattan: r.manhattan_calls,
            wriggle: r.wriggle_calls,
            tunnel: r.tunnel_calls,
            triple_step: r.triplestep_calls,
        },
        levels: r.levels.iter().map(|&(vertices, edges)| LevelDoc { vertices, edges }).collect(),
        path: r.path.clone(),
        failure: r.failure.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("run document serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<BenchRecord, BenchError> {
    let d: RunDoc = serde_json::from_str(text).map_err(|e| BenchError::RunFile(e.to_string()))?;
    let levels: Vec<(usize, usize)> = d.levels.iter().map(|l| (l.vertices, l.edges)).collect();
    Ok(BenchRecord {
        scenario: d.scenario,
        planner: d.planner,
        seed: d.seed,
        solved: d.solved,
        wall_time: d.wall_time_s,
        cost: d.cost.unwrap_or(f64::INFINITY),
        manhattan_calls: d.patterns.manhattan,
        wriggle_calls: d.patterns.wriggle,
        tunnel_calls: d.patterns.tunnel,
        triplestep_calls: d.patterns.triple_step,
        vertices_total: levels.iter().map(|l| l.0).sum(),
        edges_total: levels.iter().map(|l| l.1).sum(),
        levels,
        path: d.path,
        failure: d.failure,
    })
}

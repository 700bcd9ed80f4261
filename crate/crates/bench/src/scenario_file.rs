//! JSON scenario documents.
//!
//! ```json
//! {
//!   "name": "slit",
//!   "world": { "bounds": { "min": [-2, -2], "max": [2, 2] },
//!              "obstacles": [[[-0.3, 0.12], [0.3, 0.12], [0.3, 2], [-0.3, 2]]] },
//!   "robot_levels": [ { "type": "disk", "radius": 0.1 },
//!                     { "type": "polygon", "vertices": [[-0.4, -0.1], [0.4, -0.1], [0.4, 0.1], [-0.4, 0.1]] } ],
//!   "bundles": [[true, true, false]],
//!   "start": [-1.5, 0, 1.5707963267948966],
//!   "goal": [1.5, 0, 1.5707963267948966],
//!   "goal_tolerance": 1e-6,
//!   "inflated": [false, false]
//! }
//! ```
//!
//! Robot levels are listed coarsest first; `bundles[k]` selects which
//! coordinates of level `k + 1` make up level `k`. Lengths are in meters,
//! angles in radians. Unknown keys are rejected.

use std::io;
use std::path::Path;

use fiberdance_core::geometry::{v2, Aabb, Polygon, Vec2};
use fiberdance_core::robot::{Link, PlanarChain, RobotModel, World};
use fiberdance_core::scenario::{builtin, ScenarioParts};
use fiberdance_core::{Error as CoreError, Scenario, State};
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::BenchError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoadError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown field at line {line}, column {column}: {message}")]
    UnknownField { line: usize, column: usize, message: String },
    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: String, detail: String },
}

#[derive(Debug, Deserialize, SerializeDerive)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    world: WorldDoc,
    robot_levels: Vec<RobotDoc>,
    bundles: Vec<Vec<bool>>,
    start: Vec<f64>,
    goal: Vec<f64>,
    goal_tolerance: f64,
    inflated: Vec<bool>,
}

#[derive(Debug, Deserialize, SerializeDerive)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    bounds: BoundsDoc,
    obstacles: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize, SerializeDerive)]
#[serde(deny_unknown_fields)]
struct BoundsDoc {
    min: [f64; 2],
    max: [f64; 2],
}

#[derive(Debug, Deserialize, SerializeDerive)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RobotDoc {
    Disk { radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    Chain { base: Vec<[f64; 2]>, links: Vec<LinkDoc>, joint_limit: f64 },
}

#[derive(Debug, Deserialize, SerializeDerive)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    length: f64,
    width: f64,
}

fn points(ps: &[[f64; 2]]) -> Vec<Vec2> {
    ps.iter().map(|p| v2(p[0], p[1])).collect()
}

fn arrays(ps: &[Vec2]) -> Vec<[f64; 2]> {
    ps.iter().map(|p| [p.x, p.y]).collect()
}

impl From<CoreError> for LoadError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Invariant(name, detail) => LoadError::Invariant { name: name.to_string(), detail },
            CoreError::DimensionMismatch { expected, found } => LoadError::Invariant {
                name: "dimensions match".into(),
                detail: format!("expected {expected} coordinates, found {found}"),
            },
            CoreError::ContractViolation(detail) => {
                LoadError::Invariant { name: "well-formed scenario".into(), detail }
            }
        }
    }
}

fn polygon(ps: &[[f64; 2]], what: &str) -> Result<Polygon, LoadError> {
    Polygon::new(points(ps)).map_err(|e| match LoadError::from(e) {
        LoadError::Invariant { name, detail } => LoadError::Invariant { name, detail: format!("{what}: {detail}") },
        other => other,
    })
}

fn classify(e: serde_json::Error) -> LoadError {
    let (line, column) = (e.line(), e.column());
    let full = e.to_string();
    let suffix = format!(" at line {line} column {column}");
    let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
    if message.starts_with("unknown field") || message.starts_with("unknown variant") {
        LoadError::UnknownField { line, column, message }
    } else {
        LoadError::Parse { line, column, message }
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario, LoadError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(classify)?;
    let obstacles = doc
        .world
        .obstacles
        .iter()
        .enumerate()
        .map(|(i, o)| polygon(o, &format!("obstacle {i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let bounds = Aabb::new(
        v2(doc.world.bounds.min[0], doc.world.bounds.min[1]),
        v2(doc.world.bounds.max[0], doc.world.bounds.max[1]),
    );
    let world = World::new(bounds, obstacles)?;
    let robots = doc
        .robot_levels
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(match r {
                RobotDoc::Disk { radius } => RobotModel::Disk { radius: *radius },
                RobotDoc::Polygon { vertices } => {
                    RobotModel::RigidPolygon { shape: polygon(vertices, &format!("robot level {i}"))? }
                }
                RobotDoc::Chain { base, links, joint_limit } => RobotModel::PlanarChain(PlanarChain {
                    base: polygon(base, &format!("robot level {i} base"))?,
                    links: links.iter().map(|l| Link { length: l.length, width: l.width }).collect(),
                    joint_limit: *joint_limit,
                }),
            })
        })
        .collect::<Result<Vec<_>, LoadError>>()?;
    Ok(Scenario::new(ScenarioParts {
        name: doc.name,
        description: doc.description,
        world,
        robots,
        masks: doc.bundles,
        inflated: doc.inflated,
        start: State::new(doc.start),
        goal: State::new(doc.goal),
        goal_tolerance: doc.goal_tolerance,
    })?)
}

/// Pretty JSON with every real written to 17 significant digits.
struct CanonicalFormatter(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

/// Canonical document for a scenario: fixed key order, reals with 17
/// significant digits, polygons counter-clockwise.
pub fn to_canonical(scenario: &Scenario) -> String {
    let p = scenario.parts();
    let doc = ScenarioDoc {
        name: p.name.clone(),
        description: p.description.clone(),
        world: WorldDoc {
            bounds: BoundsDoc {
                min: [p.world.bounds.min.x, p.world.bounds.min.y],
                max: [p.world.bounds.max.x, p.world.bounds.max.y],
            },
            obstacles: p.world.obstacles.iter().map(|o| arrays(o.vertices())).collect(),
        },
        robot_levels: p
            .robots
            .iter()
            .map(|r| match r {
                RobotModel::Disk { radius } => RobotDoc::Disk { radius: *radius },
                RobotModel::RigidPolygon { shape } => RobotDoc::Polygon { vertices: arrays(shape.vertices()) },
                RobotModel::PlanarChain(c) => RobotDoc::Chain {
                    base: arrays(c.base.vertices()),
                    links: c.links.iter().map(|l| LinkDoc { length: l.length, width: l.width }).collect(),
                    joint_limit: c.joint_limit,
                },
            })
            .collect(),
        bundles: p.masks.clone(),
        start: p.start.values().to_vec(),
        goal: p.goal.values().to_vec(),
        goal_tolerance: p.goal_tolerance,
        inflated: p.inflated.clone(),
    };
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter(PrettyFormatter::new()));
    doc.serialize(&mut ser).expect("serializing to memory");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// A builtin scenario name, or a path to a scenario document.
pub fn resolve_scenario(name: &str) -> Result<Scenario, BenchError> {
    if let Some(s) = builtin(name) {
        return Ok(s);
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(BenchError::UnknownScenario(name.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    load_scenario(&text).map_err(|source| BenchError::Load { origin: name.to_string(), source })
}

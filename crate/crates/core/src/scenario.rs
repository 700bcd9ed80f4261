//! Planning problems: a world, one robot model per ladder level, projection
//! masks, start and goal; plus the built-in scenario suite.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bundle::{AdmissibilityReport, BundleLadder};
use crate::error::{Error, Result};
use crate::geometry::{v2, Aabb, Polygon, Vec2};
use crate::robot::{GeometricValidity, Link, PlanarChain, RobotModel, World};
use crate::seeded_rng;
use crate::space::{State, StateSpace};
use crate::validity::ValidityChecker;

/// Validity checks sweep motions at this fraction of a level's extent.
pub const RESOLUTION_FRACTION: f64 = 0.001;
/// Default goal tolerance as a fraction of the total space extent.
pub const GOAL_TOLERANCE_FRACTION: f64 = 1e-6;

/// Raw description of a scenario, as written in scenario files.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioParts {
    pub name: String,
    pub description: String,
    pub world: World,
    /// Coarsest first.
    pub robots: Vec<RobotModel>,
    /// `masks[k]` selects the coordinates of level `k + 1` forming level `k`.
    pub masks: Vec<Vec<bool>>,
    /// Per level: the model deliberately enlarges the one above, so the
    /// bundle onto this level is exempt from admissibility checks.
    pub inflated: Vec<bool>,
    pub start: State,
    pub goal: State,
    pub goal_tolerance: f64,
}

/// A validated planning problem.
#[derive(Clone, Debug)]
pub struct Scenario {
    parts: ScenarioParts,
    world: Arc<World>,
    ladder: BundleLadder,
}

impl Scenario {
    pub fn new(parts: ScenarioParts) -> Result<Self> {
        let k = parts.robots.len();
        if k == 0 {
            return Err(Error::Invariant("at least one robot level", "robot_levels is empty".into()));
        }
        if parts.masks.len() + 1 != k {
            return Err(Error::Invariant(
                "one bundle between each pair of levels",
                alloc::format!("{k} levels need {} bundles, got {}", k - 1, parts.masks.len()),
            ));
        }
        if parts.inflated.len() != k {
            return Err(Error::Invariant(
                "one inflated flag per level",
                alloc::format!("{k} levels, {} flags", parts.inflated.len()),
            ));
        }
        if !(parts.goal_tolerance > 0.0 && parts.goal_tolerance.is_finite()) {
            return Err(Error::Invariant("positive goal tolerance", alloc::format!("{}", parts.goal_tolerance)));
        }
        for r in &parts.robots {
            r.validate()?;
        }
        // Re-run world checks in case the parts were assembled by hand.
        let world = Arc::new(World::new(parts.world.bounds, parts.world.obstacles.clone())?);
        let total = parts.robots[k - 1].space(&world.bounds)?;
        let placeholder = ValidityChecker::from_fn(|_| true, 1.0)?;
        let shape = BundleLadder::from_masks(total.clone(), parts.masks.clone(), vec![placeholder; k])?;
        let mut checkers = Vec::with_capacity(k);
        for (level, robot) in shape.levels().iter().zip(&parts.robots) {
            let own = robot.space(&world.bounds)?;
            if own.dim() != level.space.dim() || own.angular_coordinates() != level.space.angular_coordinates() {
                return Err(Error::Invariant(
                    "level spaces match robot models",
                    alloc::format!("projected level has dimension {}, robot expects {}", level.space.dim(), own.dim()),
                ));
            }
            let validity = Arc::new(GeometricValidity { world: world.clone(), robot: robot.clone() });
            checkers.push(ValidityChecker::new(validity, RESOLUTION_FRACTION * level.space.extent())?);
        }
        let ladder = BundleLadder::from_masks(total.clone(), parts.masks.clone(), checkers)?;
        for (x, tag) in [(&parts.start, "x_I valid"), (&parts.goal, "x_G valid")] {
            total.check_dim(x)?;
            if !total.satisfies_bounds(x) {
                return Err(Error::Invariant(tag, "state outside the space bounds".into()));
            }
            for level in 0..k {
                let p = ladder.project_to(level, x)?;
                if !ladder.level(level).checker.is_valid(&p) {
                    return Err(Error::Invariant(tag, alloc::format!("state is in collision on level {level}")));
                }
            }
        }
        Ok(Scenario { parts, world, ladder })
    }

    pub fn parts(&self) -> &ScenarioParts {
        &self.parts
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn world(&self) -> &Arc<World> {
        &self.world
    }

    pub fn ladder(&self) -> &BundleLadder {
        &self.ladder
    }

    pub fn total_space(&self) -> &StateSpace {
        &self.ladder.total().space
    }

    pub fn start(&self) -> &State {
        &self.parts.start
    }

    pub fn goal(&self) -> &State {
        &self.parts.goal
    }

    pub fn goal_tolerance(&self) -> f64 {
        self.parts.goal_tolerance
    }

    /// Start and goal projected onto level `k`.
    pub fn endpoints_at(&self, k: usize) -> (State, State) {
        (
            self.ladder.project_to(k, &self.parts.start).expect("validated"),
            self.ladder.project_to(k, &self.parts.goal).expect("validated"),
        )
    }

    /// Admissibility spot check of every bundle whose base is not flagged
    /// as inflated; entry `k` covers the bundle onto level `k`.
    pub fn check_admissibility(&self, samples: usize, seed: u64) -> Vec<Option<AdmissibilityReport>> {
        let mut rng = seeded_rng(seed);
        (0..self.ladder.len() - 1)
            .map(|k| (!self.parts.inflated[k]).then(|| self.ladder.check_admissibility(k, samples, &mut rng)))
            .collect()
    }
}

fn tolerance_for(robot: &RobotModel, bounds: &Aabb) -> f64 {
    GOAL_TOLERANCE_FRACTION * robot.space(bounds).expect("builtin robot").extent()
}

fn rect(min: (f64, f64), max: (f64, f64)) -> Polygon {
    Polygon::axis_box(v2(min.0, min.1), v2(max.0, max.1)).expect("builtin box")
}

fn square_world(half: f64) -> Aabb {
    Aabb::new(v2(-half, -half), v2(half, half))
}

#[allow(clippy::too_many_arguments)]
fn build(
    name: &str,
    half_size: f64,
    description: &str,
    obstacles: Vec<Polygon>,
    robots: Vec<RobotModel>,
    masks: Vec<Vec<bool>>,
    inflated: Vec<bool>,
    start: Vec<f64>,
    goal: Vec<f64>,
) -> Scenario {
    let bounds = square_world(half_size);
    let goal_tolerance = tolerance_for(robots.last().unwrap(), &bounds);
    Scenario::new(ScenarioParts {
        name: name.to_string(),
        description: description.to_string(),
        world: World::new(bounds, obstacles).expect("builtin world"),
        robots,
        masks,
        inflated,
        start: State::new(start),
        goal: State::new(goal),
        goal_tolerance,
    })
    .expect("builtin scenario")
}

/// Rectangle 0.8 x 0.2 that must turn flat to pass a 0.24 gap in a thick
/// wall, starting and ending upright.
pub fn slit_2d() -> Scenario {
    let half_gap = 0.12;
    let (half_wall, half_world) = (0.6, 3.0);
    build(
        "slit_2d",
        half_world,
        "rectangle through a narrow wall gap, ladder SE(2) -> R2 via the inscribed disk",
        vec![
            rect((-half_wall, -half_world), (half_wall, -half_gap)),
            rect((-half_wall, half_gap), (half_wall, half_world)),
        ],
        vec![RobotModel::Disk { radius: 0.1 }, RobotModel::RigidPolygon { shape: Polygon::rectangle(0.4, 0.1) }],
        vec![vec![true, true, false]],
        vec![false, false],
        vec![-1.5, 0.0, core::f64::consts::FRAC_PI_2],
        vec![1.5, 0.0, core::f64::consts::FRAC_PI_2],
    )
}

/// L-shaped body with legs 0.5 and thickness 0.12, posed about the centre
/// of its corner square.
pub fn l_body() -> Polygon {
    let (a, w) = (0.5, 0.12);
    let c = v2(w / 2.0, w / 2.0);
    let pts: Vec<Vec2> =
        [v2(0.0, 0.0), v2(a, 0.0), v2(a, w), v2(w, w), v2(w, a), v2(0.0, a)].iter().map(|p| *p - c).collect();
    Polygon::new(pts).expect("L body")
}

/// The L fits through the wall hole only turned diagonally; the base disk
/// is inflated past the corner square.
pub fn double_l_2d() -> Scenario {
    let (a, w) = (0.5, 0.12);
    let half_gap = 0.6 * (a + w) / core::f64::consts::SQRT_2;
    build(
        "double_L_2d",
        2.0,
        "concave L body through a hole it only clears diagonally, inflated disk base",
        vec![rect((-0.3, -2.0), (0.3, -half_gap)), rect((-0.3, half_gap), (0.3, 2.0))],
        vec![RobotModel::Disk { radius: 1.1 * w / 2.0 }, RobotModel::RigidPolygon { shape: l_body() }],
        vec![vec![true, true, false]],
        vec![true, false],
        vec![-1.2, 0.0, 0.0],
        vec![1.2, 0.0, 0.0],
    )
}

pub fn egress_chain() -> PlanarChain {
    PlanarChain {
        base: Polygon::rectangle(0.08, 0.06),
        links: vec![Link { length: 0.25, width: 0.08 }; 4],
        joint_limit: 2.6,
    }
}

/// Folded four-link chain at the bottom of a U-shaped cup that must leave
/// through the opening and straighten out.
pub fn chain_egress_2d() -> Scenario {
    let cup = Polygon::new(vec![
        v2(-0.5, -0.9),
        v2(0.5, -0.9),
        v2(0.5, 0.0),
        v2(0.4, 0.0),
        v2(0.4, -0.8),
        v2(-0.4, -0.8),
        v2(-0.4, 0.0),
        v2(-0.5, 0.0),
    ])
    .expect("cup");
    let chain = egress_chain();
    build(
        "chain_egress_2d",
        2.0,
        "four-link chain leaving a U-shaped cup, ladder (SE(2) x R3) -> SE(2) -> R2",
        vec![cup],
        vec![
            RobotModel::Disk { radius: 0.06 },
            RobotModel::RigidPolygon { shape: chain.base.clone() },
            RobotModel::PlanarChain(chain),
        ],
        vec![vec![true, true, false], vec![true, true, true, false, false, false]],
        vec![false, false, false],
        vec![-0.25, -0.65, 0.0, 1.5, 1.5, -1.5],
        vec![-0.35, 0.5, 0.0, 0.0, 0.0, 0.0],
    )
}

/// Block with two openings. The short one is a Z-shaped corridor 0.24 wide
/// that the disk follows but the 0.8 rectangle cannot turn in; the wide
/// straight slot is a detour.
pub fn shapesorter_2d() -> Scenario {
    build(
        "shapesorter_2d",
        2.0,
        "shortest base path runs through a hole the rectangle cannot pass",
        shapesorter_obstacles(),
        vec![RobotModel::Disk { radius: 0.1 }, RobotModel::RigidPolygon { shape: Polygon::rectangle(0.4, 0.1) }],
        vec![vec![true, true, false]],
        vec![false, false],
        vec![-1.2, 0.3, 0.0],
        vec![1.2, -0.3, 0.0],
    )
}

fn shapesorter_obstacles() -> Vec<Polygon> {
    vec![
        rect((-0.5, 0.42), (0.5, 1.3)),
        rect((-0.5, -2.0), (-0.12, 0.18)),
        rect((0.12, -0.18), (0.5, 0.42)),
        rect((-0.12, -2.0), (0.5, -0.42)),
        rect((-0.5, 1.8), (0.5, 2.0)),
    ]
}

/// Base path through the Z corridor of [`shapesorter_2d`].
pub fn shapesorter_wrong_hole_path() -> Vec<State> {
    [(-1.2, 0.3), (0.0, 0.3), (0.0, -0.3), (1.2, -0.3)].iter().map(|(x, y)| State::new(vec![*x, *y])).collect()
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![slit_2d(), double_l_2d(), chain_egress_2d(), shapesorter_2d()]
}

pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "slit_2d" => Some(slit_2d()),
        "double_L_2d" => Some(double_l_2d()),
        "chain_egress_2d" => Some(chain_egress_2d()),
        "shapesorter_2d" => Some(shapesorter_2d()),
        _ => None,
    }
}

//! Validity checking against a brute-force rasterization, plus kinematic
//! and containment properties of the builtin robots.

use fiberdance_core::geometry::{v2, Pose, Vec2};
use fiberdance_core::robot::{PlanarChain, RobotModel, World};
use fiberdance_core::scenario::builtin_scenarios;
use fiberdance_core::{seeded_rng, Scenario, State};
use rand::Rng;

const CELL: f64 = 1e-3;

#[derive(Clone, Debug)]
enum Shape {
    Poly(Vec<Vec2>),
    Disk(Vec2, f64),
}

fn pose_points(points: &[Vec2], x: f64, y: f64, theta: f64) -> Vec<Vec2> {
    let (s, c) = theta.sin_cos();
    points.iter().map(|p| v2(x + c * p.x - s * p.y, y + s * p.x + c * p.y)).collect()
}

/// Crossing-number test; boundary points count as inside only by accident,
/// which the tolerance below absorbs.
fn in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

impl Shape {
    fn contains(&self, p: Vec2) -> bool {
        match self {
            Shape::Poly(ps) => in_polygon(p, ps),
            Shape::Disk(c, r) => (p.x - c.x).powi(2) + (p.y - c.y).powi(2) < r * r,
        }
    }

    fn bbox(&self) -> (Vec2, Vec2) {
        match self {
            Shape::Poly(ps) => {
                let lo = ps.iter().fold(v2(f64::INFINITY, f64::INFINITY), |m, p| v2(m.x.min(p.x), m.y.min(p.y)));
                let hi =
                    ps.iter().fold(v2(f64::NEG_INFINITY, f64::NEG_INFINITY), |m, p| v2(m.x.max(p.x), m.y.max(p.y)));
                (lo, hi)
            }
            Shape::Disk(c, r) => (v2(c.x - r, c.y - r), v2(c.x + r, c.y + r)),
        }
    }
}

/// Posed shapes computed from first principles: chain links are laid out
/// by accumulating joint angles along the heading.
fn posed_shapes(robot: &RobotModel, x: &[f64]) -> Vec<Shape> {
    match robot {
        RobotModel::Disk { radius } => vec![Shape::Disk(v2(x[0], x[1]), *radius)],
        RobotModel::RigidPolygon { shape } => vec![Shape::Poly(pose_points(shape.vertices(), x[0], x[1], x[2]))],
        RobotModel::PlanarChain(chain) => chain_shapes(chain, x),
    }
}

fn chain_shapes(chain: &PlanarChain, x: &[f64]) -> Vec<Shape> {
    let mut out = vec![Shape::Poly(pose_points(chain.base.vertices(), x[0], x[1], x[2]))];
    let (mut px, mut py, mut angle) = (x[0], x[1], x[2]);
    for (i, link) in chain.links.iter().enumerate() {
        if i > 0 {
            angle += x[2 + i];
        }
        let h = link.width / 2.0;
        let rect = [v2(0.0, -h), v2(link.length, -h), v2(link.length, h), v2(0.0, h)];
        out.push(Shape::Poly(pose_points(&rect, px, py, angle)));
        px += link.length * angle.cos();
        py += link.length * angle.sin();
    }
    out
}

fn grid_overlap(a: (Vec2, Vec2), b: (Vec2, Vec2), hit: impl Fn(Vec2) -> bool) -> bool {
    let lo = v2(a.0.x.max(b.0.x), a.0.y.max(b.0.y));
    let hi = v2(a.1.x.min(b.1.x), a.1.y.min(b.1.y));
    if lo.x > hi.x || lo.y > hi.y {
        return false;
    }
    let (i0, i1) = ((lo.x / CELL).ceil() as i64, (hi.x / CELL).floor() as i64);
    let (j0, j1) = ((lo.y / CELL).ceil() as i64, (hi.y / CELL).floor() as i64);
    (i0..=i1).any(|i| (j0..=j1).any(|j| hit(v2(i as f64 * CELL, j as f64 * CELL))))
}

fn raster_valid(world: &World, robot: &RobotModel, x: &[f64]) -> bool {
    let shapes = posed_shapes(robot, x);
    let b = world.bounds;
    for s in &shapes {
        let (lo, hi) = s.bbox();
        if lo.x < b.min.x || lo.y < b.min.y || hi.x > b.max.x || hi.y > b.max.y {
            return false;
        }
    }
    for o in &world.obstacles {
        let ov = o.vertices();
        let obox = Shape::Poly(ov.to_vec()).bbox();
        for s in &shapes {
            if grid_overlap(s.bbox(), obox, |p| s.contains(p) && in_polygon(p, ov)) {
                return false;
            }
        }
    }
    for i in 0..shapes.len() {
        for j in i + 2..shapes.len() {
            if grid_overlap(shapes[i].bbox(), shapes[j].bbox(), |p| shapes[i].contains(p) && shapes[j].contains(p)) {
                return false;
            }
        }
    }
    true
}

/// True when a nudge of two cells in some direction flips the verdict.
fn near_boundary(world: &World, robot: &RobotModel, x: &[f64]) -> bool {
    let here = robot.is_valid(world, x);
    let nudge = 2.0 * CELL;
    let mut moves: Vec<Vec<f64>> = Vec::new();
    for (dx, dy) in [(nudge, 0.0), (-nudge, 0.0), (0.0, nudge), (0.0, -nudge)] {
        let mut y = x.to_vec();
        y[0] += dx;
        y[1] += dy;
        moves.push(y);
    }
    for k in 2..x.len() {
        for s in [-1.0, 1.0] {
            let mut y = x.to_vec();
            y[k] += s * nudge;
            moves.push(y);
        }
    }
    moves.iter().any(|y| robot.is_valid(world, y) != here)
}

fn random_state(scenario: &Scenario, rng: &mut impl Rng) -> State {
    scenario.total_space().sample_uniform(rng)
}

#[test]
fn validity_matches_rasterization() {
    let mut rng = seeded_rng(11);
    for s in builtin_scenarios() {
        let world = s.world();
        for robot in &s.parts().robots {
            let space = robot.space(&world.bounds).unwrap();
            let mut disagreements = 0;
            let mut invalid = 0;
            for _ in 0..1000 {
                let x = space.sample_uniform(&mut rng);
                let exact = robot.is_valid(world, &x);
                invalid += usize::from(!exact);
                if exact != raster_valid(world, robot, &x) {
                    disagreements += 1;
                    assert!(near_boundary(world, robot, &x), "{}: {:?} disagrees away from any boundary", s.name(), x);
                }
            }
            assert!(invalid > 0 && invalid < 1000, "{}: degenerate sample mix", s.name());
            assert!(disagreements < 20, "{}: {disagreements} boundary disagreements", s.name());
        }
    }
}

#[test]
fn validity_near_obstacles_matches_rasterization() {
    // Poses concentrated around the passages, where most contacts happen.
    let mut rng = seeded_rng(12);
    for s in builtin_scenarios() {
        let robot = s.parts().robots.last().unwrap();
        let world = s.world();
        for _ in 0..300 {
            let mut x = random_state(&s, &mut rng);
            x = State::new({
                let mut v = x.into_vec();
                v[0] = rng.gen_range(-0.8..0.8);
                v[1] = rng.gen_range(-0.6..0.6);
                v
            });
            let exact = robot.is_valid(world, &x);
            if exact != raster_valid(world, robot, &x) {
                assert!(near_boundary(world, robot, &x), "{}: {:?}", s.name(), x);
            }
        }
    }
}

#[test]
fn forward_kinematics_is_equivariant() {
    let s = fiberdance_core::scenario::chain_egress_2d();
    let RobotModel::PlanarChain(chain) = s.parts().robots.last().unwrap().clone() else { panic!("chain level") };
    let mut rng = seeded_rng(3);
    for _ in 0..1000 {
        let q: Vec<f64> = (0..chain.joints()).map(|_| rng.gen_range(-chain.joint_limit..chain.joint_limit)).collect();
        let g = Pose::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-3.1..3.1));
        let local: Vec<f64> = [0.0, 0.0, 0.0].into_iter().chain(q.iter().copied()).collect();
        let posed: Vec<f64> = [g.position.x, g.position.y, g.theta].into_iter().chain(q.iter().copied()).collect();
        let a = chain.forward_kinematics(&posed);
        let b = chain.forward_kinematics(&local);
        assert_eq!(a.len(), b.len());
        for (pa, pb) in a.iter().zip(&b) {
            for (u, w) in pa.points.iter().zip(&pb.points) {
                let moved = g.apply(*w);
                assert!((u.x - moved.x).abs() < 1e-12 && (u.y - moved.y).abs() < 1e-12);
            }
        }
        let expected = chain_shapes(&chain, &posed);
        for (link, shape) in a.iter().zip(&expected[1..]) {
            let Shape::Poly(ps) = shape else { unreachable!() };
            for p in &link.points {
                assert!(ps.iter().any(|e| (e.x - p.x).abs() < 1e-12 && (e.y - p.y).abs() < 1e-12));
            }
        }
    }
}

fn shape_points(s: &Shape, n: usize) -> Vec<Vec2> {
    match s {
        Shape::Disk(c, r) => {
            let mut out = vec![*c];
            for i in 0..n {
                let a = i as f64 / n as f64 * std::f64::consts::TAU;
                out.push(v2(c.x + r * a.cos(), c.y + r * a.sin()));
            }
            out
        }
        Shape::Poly(ps) => {
            let mut out = ps.clone();
            for i in 0..ps.len() {
                let (a, b) = (ps[i], ps[(i + 1) % ps.len()]);
                for k in 1..n {
                    let t = k as f64 / n as f64;
                    out.push(v2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
                }
            }
            out
        }
    }
}

fn dist_to_polygon_boundary(p: Vec2, ps: &[Vec2]) -> f64 {
    (0..ps.len())
        .map(|i| {
            let (a, b) = (ps[i], ps[(i + 1) % ps.len()]);
            let ab = v2(b.x - a.x, b.y - a.y);
            let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / (ab.x * ab.x + ab.y * ab.y)).clamp(0.0, 1.0);
            ((p.x - a.x - t * ab.x).powi(2) + (p.y - a.y - t * ab.y).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn base_geometry_is_contained_in_total_geometry() {
    let mut rng = seeded_rng(5);
    for s in builtin_scenarios() {
        let ladder = s.ladder();
        for k in 0..ladder.len() - 1 {
            if s.parts().inflated[k] {
                continue;
            }
            let (lower, upper) = (&s.parts().robots[k], &s.parts().robots[k + 1]);
            for _ in 0..10_000 {
                let x = ladder.level(k + 1).space.sample_uniform(&mut rng);
                let b = ladder.bundle_below(k + 1).unwrap().project_base(&x).unwrap();
                let outer = posed_shapes(upper, &x);
                for inner in posed_shapes(lower, &b) {
                    for p in shape_points(&inner, 16) {
                        let covered = outer.iter().any(|o| match o {
                            Shape::Poly(ps) => in_polygon(p, ps) || dist_to_polygon_boundary(p, ps) < 1e-9,
                            Shape::Disk(..) => o.contains(p),
                        });
                        assert!(covered, "{} level {k}: {p:?} of the base body lies outside at {x:?}", s.name());
                    }
                }
            }
        }
    }
}

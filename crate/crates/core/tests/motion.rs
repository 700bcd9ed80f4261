use fiberdance_core::geometry::{v2, Aabb, Polygon};
use fiberdance_core::robot::{RobotModel, World};
use fiberdance_core::{check_motion, check_motion_path, seeded_rng, State, StateSpace, ValidityChecker};
use rand::Rng;

const WALL_X: f64 = 0.5;
const RADIUS: f64 = 0.15;

/// A disk robot and a wall whose face is crossed at x = WALL_X - RADIUS by
/// any segment that stays within |y| <= 1.
fn disk_and_wall() -> (StateSpace, ValidityChecker) {
    let wall = Polygon::axis_box(v2(WALL_X, -1.6), v2(1.0, 1.6)).unwrap();
    let world = World::new(Aabb::new(v2(-2.0, -2.0), v2(2.0, 2.0)), vec![wall]).unwrap();
    let robot = RobotModel::Disk { radius: RADIUS };
    let space = robot.space(&world.bounds).unwrap();
    let resolution = 1e-3 * space.extent();
    let checker = ValidityChecker::from_fn(move |x| robot.is_valid(&world, x), resolution).unwrap();
    (space, checker)
}

#[test]
fn last_valid_brackets_the_contact() {
    let (space, checker) = disk_and_wall();
    let fine = checker.with_resolution(checker.resolution() / 10.0).unwrap();
    let face = WALL_X - RADIUS;
    let mut rng = seeded_rng(9);
    for _ in 0..100 {
        let a = State::new(vec![rng.gen_range(-1.8..-0.5), rng.gen_range(-1.0..1.0)]);
        let b = State::new(vec![rng.gen_range(0.4..0.9), rng.gen_range(-1.0..1.0)]);
        let coarse = check_motion(&checker, &space, &a, &b);
        assert!(!coarse.reached);
        assert!(checker.is_valid(&coarse.last_valid));

        let t_contact = (face - a[0]) / (b[0] - a[0]);
        let contact = space.interpolate(&a, &b, t_contact);
        let gap = space.distance(&coarse.last_valid, &contact);
        assert!(gap <= checker.resolution() + 1e-9, "stopped {gap} short of the contact");
        assert!(coarse.last_valid[0] <= face + 1e-12);

        let refined = check_motion(&fine, &space, &a, &b);
        let fine_step = fine.resolution() / space.distance(&a, &b);
        assert!(refined.last_valid_fraction + fine_step >= coarse.last_valid_fraction);
        let lag = space.distance(&coarse.last_valid, &refined.last_valid);
        assert!(lag <= checker.resolution() + 1e-9);
    }
}

#[test]
fn free_motions_are_reached_exactly() {
    let (space, checker) = disk_and_wall();
    let a = State::new(vec![-1.5, -1.0]);
    let b = State::new(vec![0.2, 1.0]);
    let m = check_motion(&checker, &space, &a, &b);
    assert!(m.reached);
    assert_eq!(m.last_valid, b);
    assert_eq!(m.last_valid_fraction, 1.0);
}

#[test]
fn invalid_start_reports_no_progress() {
    let (space, checker) = disk_and_wall();
    let a = State::new(vec![0.7, 0.0]);
    let m = check_motion(&checker, &space, &a, &State::new(vec![-1.0, 0.0]));
    assert!(!m.reached);
    assert_eq!(m.last_valid_fraction, 0.0);
}

#[test]
fn polyline_reports_the_blocked_segment() {
    let (space, checker) = disk_and_wall();
    let waypoints = vec![
        State::new(vec![-1.5, 0.0]),
        State::new(vec![-0.5, 0.0]),
        State::new(vec![-0.5, 1.5]),
        State::new(vec![1.5, 1.5]),
        State::new(vec![1.5, 0.0]),
    ];
    let r = check_motion_path(&checker, &space, &waypoints);
    assert!(!r.motion.reached);
    assert_eq!(r.segment, 2);
    let mut clear = waypoints.clone();
    clear[2] = State::new(vec![-0.5, 1.8]);
    clear[3] = State::new(vec![1.5, 1.8]);
    assert!(check_motion_path(&checker, &space, &clear).motion.reached);
}

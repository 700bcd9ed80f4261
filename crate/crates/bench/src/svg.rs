use std::fmt::Write as _;

use fiberdance_core::geometry::Vec2;
use fiberdance_core::robot::{Body, RobotModel, World};
use fiberdance_core::State;

use crate::error::BenchError;

const WIDTH_PX: f64 = 600.0;

struct View {
    min: Vec2,
    max: Vec2,
    scale: f64,
}

impl View {
    fn x(&self, p: Vec2) -> f64 {
        (p.x - self.min.x) * self.scale
    }

    fn y(&self, p: Vec2) -> f64 {
        (self.max.y - p.y) * self.scale
    }

    fn points(&self, ps: &[Vec2]) -> String {
        let mut s = String::new();
        for (i, &p) in ps.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{:.3},{:.3}", self.x(p), self.y(p)).unwrap();
        }
        s
    }
}

fn body(out: &mut String, view: &View, b: &Body) {
    match b {
        Body::Disk { center, radius } => {
            writeln!(
                out,
                r#"    <circle cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#,
                view.x(*center),
                view.y(*center),
                radius * view.scale
            )
            .unwrap();
        }
        Body::Convex(pieces) => {
            for c in pieces {
                writeln!(out, r#"    <polygon points="{}"/>"#, view.points(&c.points)).unwrap();
            }
        }
    }
}

fn pose_group(out: &mut String, view: &View, robot: &RobotModel, x: &State, class: &str, style: &str) {
    writeln!(out, r#"  <g class="{class}" {style}>"#).unwrap();
    for b in robot.bodies(x) {
        body(out, view, &b);
    }
    out.push_str("  </g>\n");
}

/// Standalone SVG of the world with `n_ghosts` robot poses spread evenly
/// along the path, the start pose in green, the goal pose in red and the
/// path of the robot's reference point.
pub fn emit_svg(world: &World, robot: &RobotModel, path: &[State], n_ghosts: usize) -> Result<String, BenchError> {
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        return Err(BenchError::Render("path is empty".into()));
    };
    if let Some(bad) = path.iter().find(|s| s.len() != robot.dim()) {
        return Err(BenchError::Render(format!("state has {} coordinates, robot needs {}", bad.len(), robot.dim())));
    }
    let space = robot.space(&world.bounds).map_err(|e| BenchError::Render(e.to_string()))?;
    let (min, max) = (world.bounds.min, world.bounds.max);
    let view = View { min, max, scale: WIDTH_PX / (max.x - min.x) };
    let height = (max.y - min.y) * view.scale;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH_PX:.0}" height="{height:.0}" viewBox="0 0 {WIDTH_PX:.3} {height:.3}">"#
    )
    .unwrap();
    writeln!(out, r#"  <rect class="frame" x="0" y="0" width="{WIDTH_PX:.3}" height="{height:.3}" fill="white" stroke="black" stroke-width="2"/>"#)
        .unwrap();
    out.push_str("  <g class=\"obstacles\" fill=\"#555555\" stroke=\"none\">\n");
    for o in &world.obstacles {
        writeln!(out, r#"    <polygon points="{}"/>"#, view.points(o.vertices())).unwrap();
    }
    out.push_str("  </g>\n");

    let lengths: Vec<f64> = path.windows(2).map(|w| space.distance(&w[0], &w[1])).collect();
    let total: f64 = lengths.iter().sum();
    for i in 0..n_ghosts {
        let t = if n_ghosts == 1 { 0.0 } else { i as f64 / (n_ghosts - 1) as f64 };
        let x = point_at(&space, path, &lengths, t * total);
        pose_group(
            &mut out,
            &view,
            robot,
            &x,
            "ghost",
            r##"fill="#3366cc" fill-opacity="0.15" stroke="#3366cc" stroke-width="0.5""##,
        );
    }
    pose_group(&mut out, &view, robot, first, "start", r#"fill="green" fill-opacity="0.6" stroke="green""#);
    pose_group(&mut out, &view, robot, last, "goal", r#"fill="red" fill-opacity="0.6" stroke="red""#);

    let trace: Vec<Vec2> = path.iter().map(|s| Vec2 { x: s[0], y: s[1] }).collect();
    writeln!(
        out,
        r##"  <polyline class="trace" points="{}" fill="none" stroke="#cc3300" stroke-width="1.5"/>"##,
        view.points(&trace)
    )
    .unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

fn point_at(space: &fiberdance_core::StateSpace, path: &[State], lengths: &[f64], mut s: f64) -> State {
    for (i, &l) in lengths.iter().enumerate() {
        if s <= l && l > 0.0 {
            return space.interpolate(&path[i], &path[i + 1], s / l);
        }
        s -= l;
    }
    path.last().unwrap().clone()
}

//! Planar robot models, their configuration spaces and geometric validity
//! against a polygonal world.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::PI;
use crate::geometry::{
    convex_overlap, disk_convex_overlap, point_convex_distance, v2, Aabb, Convex, Polygon, Pose, Vec2,
};
use crate::space::StateSpace;
use crate::validity::Validity;

#[derive(Clone, Debug, PartialEq)]
pub struct World {
    pub bounds: Aabb,
    pub obstacles: Vec<Polygon>,
}

impl World {
    pub fn new(bounds: Aabb, obstacles: Vec<Polygon>) -> Result<Self> {
        if !(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y) {
            return Err(Error::Invariant("bounds are a nonempty box", "min must be below max".into()));
        }
        for (i, o) in obstacles.iter().enumerate() {
            if !bounds.contains_box(&o.aabb()) {
                return Err(Error::Invariant(
                    "obstacles within bounds",
                    alloc::format!("obstacle {i} leaves the bounds"),
                ));
            }
        }
        Ok(World { bounds, obstacles })
    }

    fn pieces(&self) -> impl Iterator<Item = &Convex> {
        self.obstacles.iter().flat_map(|o| o.pieces())
    }

    pub fn body_is_free(&self, body: &Body) -> bool {
        match body {
            Body::Disk { center, radius } => {
                let r = v2(*radius, *radius);
                self.bounds.contains_box(&Aabb::new(*center - r, *center + r))
                    && !self.pieces().any(|c| disk_convex_overlap(*center, *radius, c))
            }
            Body::Convex(parts) => {
                parts.iter().all(|p| self.bounds.contains_box(&p.aabb) && !self.pieces().any(|c| convex_overlap(p, c)))
            }
        }
    }
}

/// Rigid part of a posed robot.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Disk { center: Vec2, radius: f64 },
    Convex(Vec<Convex>),
}

impl Body {
    fn overlaps(&self, other: &Body) -> bool {
        match (self, other) {
            (Body::Disk { center: a, radius: ra }, Body::Disk { center: b, radius: rb }) => (*a - *b).norm() < ra + rb,
            (Body::Disk { center, radius }, Body::Convex(ps)) | (Body::Convex(ps), Body::Disk { center, radius }) => {
                ps.iter().any(|p| disk_convex_overlap(*center, *radius, p))
            }
            (Body::Convex(a), Body::Convex(b)) => a.iter().any(|p| b.iter().any(|q| convex_overlap(p, q))),
        }
    }

    /// Whether `p` lies in the body (boundary included).
    pub fn contains_point(&self, p: Vec2) -> bool {
        match self {
            Body::Disk { center, radius } => (p - *center).norm() <= *radius,
            Body::Convex(ps) => ps.iter().any(|c| point_convex_distance(p, c) == 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub length: f64,
    pub width: f64,
}

/// Planar chain: a base shape with link 1 rigidly attached at its origin
/// along the heading, and a revolute joint between consecutive links.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarChain {
    pub base: Polygon,
    pub links: Vec<Link>,
    /// Joints range over `[-joint_limit, joint_limit]`.
    pub joint_limit: f64,
}

impl PlanarChain {
    pub fn joints(&self) -> usize {
        self.links.len().saturating_sub(1)
    }

    /// World frame of each link; link `i` spans `[0, length]` along its x axis.
    pub fn link_frames(&self, x: &[f64]) -> Vec<Pose> {
        let mut frames = Vec::with_capacity(self.links.len());
        let mut pose = Pose::new(x[0], x[1], x[2]);
        for (i, link) in self.links.iter().enumerate() {
            frames.push(pose);
            if i + 1 < self.links.len() {
                pose = pose.compose(&Pose::new(link.length, 0.0, x[3 + i]));
            }
        }
        frames
    }

    /// Posed link rectangles in world coordinates.
    pub fn forward_kinematics(&self, x: &[f64]) -> Vec<Convex> {
        self.link_frames(x)
            .iter()
            .zip(&self.links)
            .map(|(f, l)| {
                let h = l.width / 2.0;
                Convex::new(
                    [v2(0.0, -h), v2(l.length, -h), v2(l.length, h), v2(0.0, h)].iter().map(|p| f.apply(*p)).collect(),
                )
            })
            .collect()
    }

    /// Far end of the last link.
    pub fn tip(&self, x: &[f64]) -> Vec2 {
        let frames = self.link_frames(x);
        frames.last().unwrap().apply(v2(self.links.last().unwrap().length, 0.0))
    }

    /// Bound on the distance of any chain point from the base origin.
    pub fn reach(&self) -> f64 {
        let links: f64 = self.links.iter().map(|l| crate::float::hypot(l.length, l.width / 2.0)).sum();
        links.max(self.base.circumradius())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RobotModel {
    /// Disk on `R^2`.
    Disk { radius: f64 },
    /// Polygon on `SE(2)`, posed about its local origin.
    RigidPolygon { shape: Polygon },
    /// Chain on `SE(2) x R^joints`.
    PlanarChain(PlanarChain),
}

impl RobotModel {
    pub fn dim(&self) -> usize {
        match self {
            RobotModel::Disk { .. } => 2,
            RobotModel::RigidPolygon { .. } => 3,
            RobotModel::PlanarChain(c) => 3 + c.joints(),
        }
    }

    /// Configuration space with translations bounded by the world box. The
    /// rotation weight is the largest distance a body point travels per
    /// radian; joint weights are the reach beyond each joint.
    pub fn space(&self, bounds: &Aabb) -> Result<StateSpace> {
        let lo = [bounds.min.x, bounds.min.y];
        let hi = [bounds.max.x, bounds.max.y];
        match self {
            RobotModel::Disk { .. } => StateSpace::euclidean(lo.to_vec(), hi.to_vec()),
            RobotModel::RigidPolygon { shape } => StateSpace::se2(lo, hi, shape.circumradius()),
            RobotModel::PlanarChain(c) => {
                let mut comps = alloc::vec![
                    (StateSpace::euclidean(lo.to_vec(), hi.to_vec())?, 1.0),
                    (StateSpace::rotation(), c.reach()),
                ];
                for j in 0..c.joints() {
                    let distal: f64 = c.links[j + 1..].iter().map(|l| l.length).sum();
                    comps.push((
                        StateSpace::euclidean(alloc::vec![-c.joint_limit], alloc::vec![c.joint_limit])?,
                        distal,
                    ));
                }
                StateSpace::product(comps)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RobotModel::Disk { radius } if !(*radius > 0.0) => {
                Err(Error::Invariant("positive disk radius", alloc::format!("radius {radius}")))
            }
            RobotModel::PlanarChain(c) => {
                if c.links.is_empty() || c.links.iter().any(|l| !(l.length > 0.0 && l.width > 0.0)) {
                    return Err(Error::Invariant("chain links have positive size", "bad link".into()));
                }
                if !(c.joint_limit > 0.0 && c.joint_limit <= PI) {
                    return Err(Error::Invariant("joint limit in (0, pi]", alloc::format!("{}", c.joint_limit)));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Posed rigid bodies; for chains the base comes first, then links in
    /// order.
    pub fn bodies(&self, x: &[f64]) -> Vec<Body> {
        match self {
            RobotModel::Disk { radius } => alloc::vec![Body::Disk { center: v2(x[0], x[1]), radius: *radius }],
            RobotModel::RigidPolygon { shape } => {
                alloc::vec![Body::Convex(shape.transformed_pieces(&Pose::new(x[0], x[1], x[2])).collect())]
            }
            RobotModel::PlanarChain(c) => {
                let mut out =
                    alloc::vec![Body::Convex(c.base.transformed_pieces(&Pose::new(x[0], x[1], x[2])).collect())];
                out.extend(c.forward_kinematics(x).into_iter().map(|r| Body::Convex(alloc::vec![r])));
                out
            }
        }
    }

    /// Inside the world bounds, clear of every obstacle and, for chains,
    /// free of contact between non-adjacent bodies.
    pub fn is_valid(&self, world: &World, x: &[f64]) -> bool {
        if let RobotModel::PlanarChain(c) = self {
            if x[3..].iter().any(|q| q.abs() > c.joint_limit) {
                return false;
            }
        }
        let bodies = self.bodies(x);
        if !bodies.iter().all(|b| world.body_is_free(b)) {
            return false;
        }
        for i in 0..bodies.len() {
            for j in i + 2..bodies.len() {
                if bodies[i].overlaps(&bodies[j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// A robot model checked against a world.
#[derive(Clone, Debug)]
pub struct GeometricValidity {
    pub world: Arc<World>,
    pub robot: RobotModel,
}

impl Validity for GeometricValidity {
    fn is_valid(&self, x: &[f64]) -> bool {
        self.robot.is_valid(&self.world, x)
    }
}

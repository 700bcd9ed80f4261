//! Configuration spaces: Euclidean boxes, planar rotations and weighted
//! products of those, with the metric, geodesic interpolation and sampling
//! the planners need.

use alloc::vec::Vec;
use core::ops::Deref;

use rand::Rng;

use crate::error::{contract, Error, Result};
use crate::float::{self, PI};

/// A point in a [`StateSpace`], stored as a flat coordinate vector.
///
/// Coordinates follow the space layout: Euclidean axes in order, one angle per
/// rotation, products concatenating their components.
#[derive(Clone, Debug, PartialEq)]
pub struct State(Vec<f64>);

impl State {
    pub fn new(values: Vec<f64>) -> Self {
        State(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for State {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for State {
    fn from(v: Vec<f64>) -> Self {
        State(v)
    }
}

impl From<&[f64]> for State {
    fn from(v: &[f64]) -> Self {
        State(v.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    /// `R^n` with an axis-aligned box.
    Euclidean { lower: Vec<f64>, upper: Vec<f64> },
    /// `SO(2)`, angles in `[-pi, pi)`.
    Rotation,
    /// Ordered components with positive metric weights. The metric is the
    /// weighted sum of component distances.
    Product(Vec<(StateSpace, f64)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    kind: SpaceKind,
    dim: usize,
    extent: f64,
}

/// Tries before [`StateSpace::sample_uniform_near`] falls back to shrinking a
/// box sample onto the ball.
const NEAR_REJECTION_TRIES: usize = 64;

impl StateSpace {
    pub fn euclidean(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), found: upper.len() });
        }
        if lower.is_empty() {
            return Err(contract("euclidean space needs at least one axis"));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::Invariant("lower < upper", alloc::format!("axis {i} has bounds [{l}, {u}]")));
            }
        }
        let extent = float::sqrt(lower.iter().zip(&upper).map(|(l, u)| (u - l) * (u - l)).sum());
        Ok(StateSpace { dim: lower.len(), kind: SpaceKind::Euclidean { lower, upper }, extent })
    }

    pub fn rotation() -> Self {
        StateSpace { kind: SpaceKind::Rotation, dim: 1, extent: PI }
    }

    pub fn product(components: Vec<(StateSpace, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(contract("product space needs at least one component"));
        }
        for (i, (_, w)) in components.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::Invariant("weights > 0", alloc::format!("component {i} has weight {w}")));
            }
        }
        let dim = components.iter().map(|(s, _)| s.dim).sum();
        let extent = components.iter().map(|(s, w)| w * s.extent).sum();
        Ok(StateSpace { kind: SpaceKind::Product(components), dim, extent })
    }

    /// `SE(2) = R^2 x SO(2)`; `rotation_weight` converts radians into length.
    pub fn se2(lower: [f64; 2], upper: [f64; 2], rotation_weight: f64) -> Result<Self> {
        StateSpace::product(alloc::vec![
            (StateSpace::euclidean(lower.to_vec(), upper.to_vec())?, 1.0),
            (StateSpace::rotation(), rotation_weight),
        ])
    }

    /// The zero-dimensional space; the fiber of an identity projection.
    pub fn point() -> Self {
        StateSpace { kind: SpaceKind::Product(Vec::new()), dim: 0, extent: 0.0 }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// Total coordinate count.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diameter of the space under its metric.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: x.len() })
        }
    }

    /// Metric distance. Panics if either state has the wrong dimension; see
    /// [`StateSpace::try_distance`] for the checked form.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        assert!(
            a.len() == self.dim && b.len() == self.dim,
            "distance: expected {} coordinates, got {} and {}",
            self.dim,
            a.len(),
            b.len()
        );
        self.raw_distance(a, b)
    }

    pub fn try_distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.raw_distance(a, b))
    }

    fn raw_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Euclidean { .. } => {
                let mut sum = 0.0;
                for (x, y) in a.iter().zip(b) {
                    sum += (x - y) * (x - y);
                }
                float::sqrt(sum)
            }
            SpaceKind::Rotation => float::angle_diff(a[0], b[0]).abs(),
            SpaceKind::Product(components) => {
                let mut offset = 0;
                let mut sum = 0.0;
                for (space, w) in components {
                    let end = offset + space.dim;
                    sum += w * space.raw_distance(&a[offset..end], &b[offset..end]);
                    offset = end;
                }
                sum
            }
        }
    }

    /// Geodesic interpolation; rotations travel along the shorter arc.
    /// Panics on dimension mismatch or `t` outside `[0, 1]`.
    pub fn interpolate(&self, a: &[f64], b: &[f64], t: f64) -> State {
        match self.try_interpolate(a, b, t) {
            Ok(s) => s,
            Err(e) => panic!("interpolate: {e}"),
        }
    }

    pub fn try_interpolate(&self, a: &[f64], b: &[f64], t: f64) -> Result<State> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(contract(alloc::format!("interpolation parameter {t} outside [0, 1]")));
        }
        if t == 0.0 {
            return Ok(State::from(a));
        }
        if t == 1.0 {
            return Ok(State::from(b));
        }
        let mut out = Vec::with_capacity(self.dim);
        self.raw_interpolate(a, b, t, &mut out);
        Ok(State(out))
    }

    fn raw_interpolate(&self, a: &[f64], b: &[f64], t: f64, out: &mut Vec<f64>) {
        match &self.kind {
            SpaceKind::Euclidean { .. } => {
                out.extend(a.iter().zip(b).map(|(x, y)| x + (y - x) * t));
            }
            SpaceKind::Rotation => {
                out.push(float::wrap_angle(a[0] + float::angle_diff(a[0], b[0]) * t));
            }
            SpaceKind::Product(components) => {
                let mut offset = 0;
                for (space, _) in components {
                    let end = offset + space.dim;
                    space.raw_interpolate(&a[offset..end], &b[offset..end], t, out);
                    offset = end;
                }
            }
        }
    }

    pub fn satisfies_bounds(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        self.raw_satisfies_bounds(x)
    }

    fn raw_satisfies_bounds(&self, x: &[f64]) -> bool {
        match &self.kind {
            SpaceKind::Euclidean { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| *l <= *v && *v <= *u)
            }
            SpaceKind::Rotation => (-PI..PI).contains(&x[0]),
            SpaceKind::Product(components) => {
                let mut offset = 0;
                components.iter().all(|(space, _)| {
                    let end = offset + space.dim;
                    let ok = space.raw_satisfies_bounds(&x[offset..end]);
                    offset = end;
                    ok
                })
            }
        }
    }

    /// Clamps Euclidean coordinates into their box and wraps angles.
    pub fn enforce_bounds(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.dim, "enforce_bounds: dimension mismatch");
        self.raw_enforce_bounds(x);
    }

    fn raw_enforce_bounds(&self, x: &mut [f64]) {
        match &self.kind {
            SpaceKind::Euclidean { lower, upper } => {
                for (v, (l, u)) in x.iter_mut().zip(lower.iter().zip(upper)) {
                    *v = v.clamp(*l, *u);
                }
            }
            SpaceKind::Rotation => x[0] = float::wrap_angle(x[0]),
            SpaceKind::Product(components) => {
                let mut offset = 0;
                for (space, _) in components {
                    let end = offset + space.dim;
                    space.raw_enforce_bounds(&mut x[offset..end]);
                    offset = end;
                }
            }
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        let mut out = Vec::with_capacity(self.dim);
        self.raw_sample(rng, &mut out);
        State(out)
    }

    fn raw_sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        match &self.kind {
            SpaceKind::Euclidean { lower, upper } => {
                for (l, u) in lower.iter().zip(upper) {
                    out.push(l + (u - l) * rng.gen::<f64>());
                }
            }
            SpaceKind::Rotation => out.push(float::wrap_angle(-PI + float::TWO_PI * rng.gen::<f64>())),
            SpaceKind::Product(components) => {
                for (space, _) in components {
                    space.raw_sample(rng, out);
                }
            }
        }
    }

    /// Samples within metric distance `eps` of `center`: a box of half-width
    /// `eps / weight` per component, rejected until inside the ball, then
    /// clamped into the bounds.
    pub fn sample_uniform_near<R: Rng + ?Sized>(&self, center: &[f64], eps: f64, rng: &mut R) -> State {
        assert_eq!(center.len(), self.dim, "sample_uniform_near: dimension mismatch");
        if !(eps > 0.0) {
            return State::from(center);
        }
        let mut out = Vec::with_capacity(self.dim);
        for _ in 0..NEAR_REJECTION_TRIES {
            out.clear();
            self.raw_sample_box(center, eps, rng, &mut out);
            if self.raw_distance(center, &out) <= eps {
                self.raw_enforce_bounds(&mut out);
                return State(out);
            }
        }
        // Pull the last box sample back onto the ball.
        let d = self.raw_distance(center, &out);
        let t = (eps / d) * (1.0 - 1e-12);
        let mut pulled = Vec::with_capacity(self.dim);
        self.raw_interpolate(center, &out, t, &mut pulled);
        self.raw_enforce_bounds(&mut pulled);
        State(pulled)
    }

    fn raw_sample_box<R: Rng + ?Sized>(&self, center: &[f64], half: f64, rng: &mut R, out: &mut Vec<f64>) {
        match &self.kind {
            SpaceKind::Euclidean { .. } => {
                for c in center {
                    out.push(c + half * (2.0 * rng.gen::<f64>() - 1.0));
                }
            }
            SpaceKind::Rotation => out.push(float::wrap_angle(center[0] + half * (2.0 * rng.gen::<f64>() - 1.0))),
            SpaceKind::Product(components) => {
                let mut offset = 0;
                for (space, w) in components {
                    let end = offset + space.dim;
                    space.raw_sample_box(&center[offset..end], half / w, rng, out);
                    offset = end;
                }
            }
        }
    }

    /// The subspace formed by the coordinates where `mask` is true, keeping
    /// component weights. Partial selections of a Euclidean block keep the
    /// selected axes. A product left with one unit-weight component collapses
    /// to that component. Returns `None` when nothing is selected.
    pub fn select(&self, mask: &[bool]) -> Result<Option<StateSpace>> {
        if mask.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: mask.len() });
        }
        Ok(self.raw_select(mask))
    }

    fn raw_select(&self, mask: &[bool]) -> Option<StateSpace> {
        match &self.kind {
            SpaceKind::Euclidean { lower, upper } => {
                let (lo, hi): (Vec<f64>, Vec<f64>) =
                    mask.iter().zip(lower.iter().zip(upper)).filter(|(m, _)| **m).map(|(_, (l, u))| (*l, *u)).unzip();
                if lo.is_empty() {
                    None
                } else {
                    Some(StateSpace::euclidean(lo, hi).expect("sub-box of a valid box"))
                }
            }
            SpaceKind::Rotation => mask[0].then(StateSpace::rotation),
            SpaceKind::Product(components) => {
                let mut offset = 0;
                let mut kept = Vec::new();
                for (space, w) in components {
                    let end = offset + space.dim;
                    if let Some(sub) = space.raw_select(&mask[offset..end]) {
                        kept.push((sub, *w));
                    }
                    offset = end;
                }
                match kept.len() {
                    0 => None,
                    1 if kept[0].1 == 1.0 => kept.pop().map(|(s, _)| s),
                    _ => Some(StateSpace::product(kept).expect("weights already validated")),
                }
            }
        }
    }

    /// True for each coordinate that is an angle.
    pub fn angular_coordinates(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.dim);
        self.push_angular(&mut out);
        out
    }

    fn push_angular(&self, out: &mut Vec<bool>) {
        match &self.kind {
            SpaceKind::Euclidean { lower, .. } => out.extend(lower.iter().map(|_| false)),
            SpaceKind::Rotation => out.push(true),
            SpaceKind::Product(components) => components.iter().for_each(|(s, _)| s.push_angular(out)),
        }
    }
}

//! State validity and discretized motion checking.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::budget::WorkMeter;
use crate::error::{contract, Result};
use crate::float;
use crate::space::{State, StateSpace};

/// Constraint function over a configuration space.
pub trait Validity: Send + Sync {
    fn is_valid(&self, x: &[f64]) -> bool;
}

impl<F> Validity for F
where
    F: Fn(&[f64]) -> bool + Send + Sync,
{
    fn is_valid(&self, x: &[f64]) -> bool {
        self(x)
    }
}

/// A [`Validity`] together with the largest metric step allowed between
/// consecutive evaluations along a motion.
#[derive(Clone)]
pub struct ValidityChecker {
    validity: Arc<dyn Validity>,
    resolution: f64,
    meter: Option<Arc<WorkMeter>>,
}

impl fmt::Debug for ValidityChecker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValidityChecker").field("resolution", &self.resolution).finish_non_exhaustive()
    }
}

impl ValidityChecker {
    pub fn new(validity: Arc<dyn Validity>, resolution: f64) -> Result<Self> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(contract(alloc::format!("resolution must be positive, got {resolution}")));
        }
        Ok(ValidityChecker { validity, resolution, meter: None })
    }

    pub fn from_fn<F>(f: F, resolution: f64) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        ValidityChecker::new(Arc::new(f), resolution)
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Same constraint, different motion resolution. Used by the dense
    /// revalidation oracle.
    pub fn with_resolution(&self, resolution: f64) -> Result<Self> {
        let mut c = ValidityChecker::new(self.validity.clone(), resolution)?;
        c.meter = self.meter.clone();
        Ok(c)
    }

    /// Same constraint, with every evaluation recorded on `meter`.
    pub fn metered(&self, meter: Arc<WorkMeter>) -> Self {
        ValidityChecker { validity: self.validity.clone(), resolution: self.resolution, meter: Some(meter) }
    }

    /// Same constraint without metering.
    pub fn unmetered(&self) -> Self {
        ValidityChecker { validity: self.validity.clone(), resolution: self.resolution, meter: None }
    }

    #[inline]
    pub fn is_valid(&self, x: &[f64]) -> bool {
        if let Some(m) = &self.meter {
            m.record_validity_check();
        }
        self.validity.is_valid(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotionResult {
    pub reached: bool,
    pub last_valid: State,
    pub last_valid_fraction: f64,
}

/// Outcome of checking a polyline of states.
#[derive(Clone, Debug, PartialEq)]
pub struct PathMotionResult {
    /// `last_valid_fraction` is measured in arc length along the whole path.
    pub motion: MotionResult,
    /// Index `i` of the segment `s[i] -> s[i + 1]` holding the last valid
    /// state (the final segment when the path was fully reached).
    pub segment: usize,
    /// Position of the last valid state within `segment`.
    pub segment_fraction: f64,
}

/// Sweeps the geodesic from `a` to `b` at spacing at most
/// `checker.resolution()`, evaluating `a` first and `b` last.
pub fn check_motion(checker: &ValidityChecker, space: &StateSpace, a: &[f64], b: &[f64]) -> MotionResult {
    if !checker.is_valid(a) {
        return MotionResult { reached: false, last_valid: State::from(a), last_valid_fraction: 0.0 };
    }
    sweep(checker, space, a, b)
}

/// Sweep without re-evaluating `a`, which the caller knows to be valid.
fn sweep(checker: &ValidityChecker, space: &StateSpace, a: &[f64], b: &[f64]) -> MotionResult {
    let d = space.distance(a, b);
    if d == 0.0 {
        return MotionResult { reached: true, last_valid: State::from(b), last_valid_fraction: 1.0 };
    }
    let steps = (float::ceil(d / checker.resolution()) as usize).max(1);
    let mut last = State::from(a);
    let mut last_t = 0.0;
    for i in 1..=steps {
        let (x, t) = if i == steps {
            (State::from(b), 1.0)
        } else {
            let t = i as f64 / steps as f64;
            (space.interpolate(a, b, t), t)
        };
        if !checker.is_valid(&x) {
            return MotionResult { reached: false, last_valid: last, last_valid_fraction: last_t };
        }
        last = x;
        last_t = t;
    }
    MotionResult { reached: true, last_valid: last, last_valid_fraction: 1.0 }
}

/// Checks the consecutive motions of a polyline, stopping at the first
/// invalid evaluation.
pub fn check_motion_path(checker: &ValidityChecker, space: &StateSpace, s: &[State]) -> PathMotionResult {
    assert!(!s.is_empty(), "check_motion_path: empty path");
    let lengths: Vec<f64> = s.windows(2).map(|w| space.distance(&w[0], &w[1])).collect();
    let total: f64 = lengths.iter().sum();
    let fraction_at = |segment: usize, t: f64| -> f64 {
        if total == 0.0 {
            return if segment + 1 >= s.len() && t >= 1.0 { 1.0 } else { 0.0 };
        }
        (lengths[..segment].iter().sum::<f64>() + t * lengths.get(segment).copied().unwrap_or(0.0)) / total
    };

    if !checker.is_valid(&s[0]) {
        return PathMotionResult {
            motion: MotionResult { reached: false, last_valid: s[0].clone(), last_valid_fraction: 0.0 },
            segment: 0,
            segment_fraction: 0.0,
        };
    }
    if s.len() == 1 {
        return PathMotionResult {
            motion: MotionResult { reached: true, last_valid: s[0].clone(), last_valid_fraction: 1.0 },
            segment: 0,
            segment_fraction: 1.0,
        };
    }
    for (i, w) in s.windows(2).enumerate() {
        let m = sweep(checker, space, &w[0], &w[1]);
        if !m.reached {
            let f = fraction_at(i, m.last_valid_fraction);
            return PathMotionResult {
                motion: MotionResult { reached: false, last_valid: m.last_valid, last_valid_fraction: f },
                segment: i,
                segment_fraction: m.last_valid_fraction,
            };
        }
    }
    PathMotionResult {
        motion: MotionResult { reached: true, last_valid: s[s.len() - 1].clone(), last_valid_fraction: 1.0 },
        segment: s.len() - 2,
        segment_fraction: 1.0,
    }
}

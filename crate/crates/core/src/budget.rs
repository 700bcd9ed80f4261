//! Work accounting and cooperative deadlines.
//!
//! Planners never read a clock directly. They consult a [`Budget`], which
//! asks a [`Clock`] how much time has elapsed given the work recorded on a
//! [`WorkMeter`]. The [`WorkClock`] here converts counted validity checks and
//! metric evaluations into nominal seconds, so a run under it is a pure
//! function of its inputs. Wall-clock time is provided by the std companion
//! crate.

use alloc::sync::Arc;
use core::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Default)]
pub struct WorkMeter {
    validity_checks: AtomicU64,
    distance_evals: AtomicU64,
}

impl WorkMeter {
    pub fn new() -> Arc<Self> {
        Arc::new(WorkMeter::default())
    }

    #[inline]
    pub fn record_validity_check(&self) {
        self.validity_checks.fetch_add(1, Ordering::Relaxed);
    }

    #[inline]
    pub fn record_distances(&self, n: u64) {
        self.distance_evals.fetch_add(n, Ordering::Relaxed);
    }

    pub fn validity_checks(&self) -> u64 {
        self.validity_checks.load(Ordering::Relaxed)
    }

    pub fn distance_evals(&self) -> u64 {
        self.distance_evals.load(Ordering::Relaxed)
    }
}

pub trait Clock {
    /// Seconds elapsed since the run started.
    fn elapsed(&self, meter: &WorkMeter) -> f64;
}

/// Deterministic clock: elapsed time is a linear function of counted work.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkClock {
    pub seconds_per_validity_check: f64,
    pub seconds_per_distance: f64,
}

impl Default for WorkClock {
    /// Per-operation costs of the builtin 2D scenarios in an optimised build,
    /// rounded up.
    fn default() -> Self {
        WorkClock { seconds_per_validity_check: 2.5e-7, seconds_per_distance: 3.5e-8 }
    }
}

impl Clock for WorkClock {
    fn elapsed(&self, meter: &WorkMeter) -> f64 {
        meter.validity_checks() as f64 * self.seconds_per_validity_check
            + meter.distance_evals() as f64 * self.seconds_per_distance
    }
}

/// A time limit checked cooperatively inside planner and pattern loops.
#[derive(Clone)]
pub struct Budget<'a> {
    clock: &'a dyn Clock,
    meter: Arc<WorkMeter>,
    time_limit: Option<f64>,
}

impl<'a> Budget<'a> {
    pub fn new(clock: &'a dyn Clock, meter: Arc<WorkMeter>, time_limit: Option<f64>) -> Self {
        Budget { clock, meter, time_limit }
    }

    pub fn meter(&self) -> &Arc<WorkMeter> {
        &self.meter
    }

    pub fn elapsed(&self) -> f64 {
        self.clock.elapsed(&self.meter)
    }

    pub fn time_limit(&self) -> Option<f64> {
        self.time_limit
    }

    #[inline]
    pub fn expired(&self) -> bool {
        match self.time_limit {
            Some(limit) => self.elapsed() >= limit,
            None => false,
        }
    }
}

//! Base paths, the path restriction they induce, and the head pointer that
//! section patterns move along it.

use alloc::vec::Vec;

use crate::bundle::Bundle;
use crate::error::{contract, Error, Result};
use crate::space::{State, StateSpace};
use crate::validity::ValidityChecker;

/// Polyline on a base space, parameterised by arc length in `[0, L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePath {
    waypoints: Vec<State>,
    cumulative: Vec<f64>,
}

impl BasePath {
    /// Consecutive duplicate waypoints are dropped; at least two distinct
    /// waypoints must remain.
    pub fn new(space: &StateSpace, waypoints: Vec<State>) -> Result<Self> {
        let mut kept: Vec<State> = Vec::with_capacity(waypoints.len());
        let mut cumulative = Vec::with_capacity(waypoints.len());
        for w in waypoints {
            space.check_dim(&w)?;
            match kept.last() {
                None => cumulative.push(0.0),
                Some(prev) => {
                    let d = space.distance(prev, &w);
                    if d == 0.0 {
                        continue;
                    }
                    cumulative.push(cumulative.last().unwrap() + d);
                }
            }
            kept.push(w);
        }
        if kept.len() < 2 {
            return Err(Error::Invariant("at least two waypoints", "base path has zero length".into()));
        }
        Ok(BasePath { waypoints: kept, cumulative })
    }

    pub fn waypoints(&self) -> &[State] {
        &self.waypoints
    }

    pub fn cumulative_lengths(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// State at arc length `l`, clamped to `[0, L]`.
    pub fn at(&self, space: &StateSpace, l: f64) -> State {
        let len = self.length();
        if !(l > 0.0) {
            return self.waypoints[0].clone();
        }
        if l >= len {
            return self.waypoints.last().unwrap().clone();
        }
        // First waypoint strictly beyond l.
        let i = self.cumulative.partition_point(|c| *c <= l);
        let (l0, l1) = (self.cumulative[i - 1], self.cumulative[i]);
        let t = ((l - l0) / (l1 - l0)).clamp(0.0, 1.0);
        space.interpolate(&self.waypoints[i - 1], &self.waypoints[i], t)
    }
}

/// `r(p) = { x | pi(x) in p[I] }`, represented by its defining parts.
#[derive(Clone, Debug)]
pub struct PathRestriction<'a> {
    pub base_path: BasePath,
    pub bundle: &'a Bundle,
    pub checker: &'a ValidityChecker,
}

impl<'a> PathRestriction<'a> {
    pub fn new(base_path: BasePath, bundle: &'a Bundle, checker: &'a ValidityChecker) -> Self {
        PathRestriction { base_path, bundle, checker }
    }

    pub fn length(&self) -> f64 {
        self.base_path.length()
    }

    pub fn base_path_at(&self, l: f64) -> State {
        self.base_path.at(self.bundle.base(), l)
    }

    /// Lifts `fiber` over the base path point at `l`.
    pub fn lift_at(&self, l: f64, fiber: &[f64]) -> State {
        self.bundle.lift(&self.base_path_at(l), fiber).expect("fiber element of the bundle's fiber space")
    }

    pub fn total(&self) -> &StateSpace {
        self.bundle.total()
    }
}

/// Cursor `(state, location)` riding a path restriction.
#[derive(Clone, Debug)]
pub struct HeadPointer<'a> {
    state: State,
    location: f64,
    restriction: &'a PathRestriction<'a>,
}

impl<'a> HeadPointer<'a> {
    pub fn new(restriction: &'a PathRestriction<'a>, state: State, location: f64) -> Result<Self> {
        let mut h = HeadPointer { state: state.clone(), location: 0.0, restriction };
        h.update(state, location)?;
        Ok(h)
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn restriction(&self) -> &'a PathRestriction<'a> {
        self.restriction
    }

    /// Moves the head. The new state must be valid and the location inside
    /// `[0, L]`.
    pub fn update(&mut self, x: State, l: f64) -> Result<()> {
        let len = self.restriction.length();
        if !(0.0..=len).contains(&l) {
            return Err(contract(alloc::format!("head location {l} outside [0, {len}]")));
        }
        self.restriction.total().check_dim(&x)?;
        if !self.restriction.checker.is_valid(&x) {
            return Err(contract("head pointer moved onto an invalid state"));
        }
        self.state = x;
        self.location = l;
        Ok(())
    }

    /// Closed threshold: `distance(state, goal) <= tol`.
    pub fn has_reached_goal(&self, goal: &[f64], tol: f64) -> bool {
        self.restriction.total().distance(&self.state, goal) <= tol
    }
}

//! Section patterns: strategies that push a [`HeadPointer`] forward along a
//! path restriction, recording every certified motion in the level's
//! roadmap.
//!
//! * Manhattan: hold the fiber, sweep the base path, then move to the goal.
//! * Wriggle: random walk in a `delta_fiber` neighbourhood of the fiber,
//!   one `delta_base` step along the base path at a time.
//! * Tunnel: find the next valid state ahead with the head's fiber and
//!   reach it by leaving the restriction within a smoothly growing base
//!   neighbourhood.
//! * Triple step: back up along the base path until the fiber can be
//!   changed, then step forward onto a target state.

use alloc::vec::Vec;

use rand::RngCore;

use crate::budget::Budget;
use crate::bundle::Bundle;
use crate::error::{contract, Result};
use crate::graph::{RoadmapGraph, VertexId};
use crate::restriction::{HeadPointer, PathRestriction};
use crate::space::{State, StateSpace};
use crate::validity::{check_motion, check_motion_path, ValidityChecker};

/// Step sizes and sampling cap shared by the patterns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternParams {
    pub delta_base: f64,
    pub delta_fiber: f64,
    pub s_max: usize,
}

impl PatternParams {
    pub const DEFAULT_STEP_FRACTION: f64 = 0.01;
    pub const DEFAULT_S_MAX: usize = 100;

    /// Steps are a fixed fraction of the base and fiber extents.
    pub fn for_bundle(bundle: &Bundle, step_fraction: f64, s_max: usize) -> Self {
        PatternParams {
            delta_base: step_fraction * bundle.base().extent(),
            delta_fiber: step_fraction * bundle.fiber().extent(),
            s_max,
        }
    }
}

/// Which optional patterns the dance may use. Manhattan always runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternSet {
    pub wriggle: bool,
    pub tunnel: bool,
    pub triple_step: bool,
}

impl Default for PatternSet {
    fn default() -> Self {
        PatternSet { wriggle: true, tunnel: true, triple_step: true }
    }
}

impl PatternSet {
    /// Manhattan and Triple step only.
    pub fn triple_step_only() -> Self {
        PatternSet { wriggle: false, tunnel: false, triple_step: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternKind {
    Manhattan,
    Wriggle,
    Tunnel,
    TripleStep,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PatternCounter {
    pub calls: u64,
    pub successes: u64,
}

impl PatternCounter {
    fn record(&mut self, ok: bool) -> bool {
        self.calls += 1;
        self.successes += ok as u64;
        ok
    }

    fn merge(&mut self, other: &PatternCounter) {
        self.calls += other.calls;
        self.successes += other.successes;
    }
}

/// One pattern invocation in a dance frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CallRecord {
    pub frame: u64,
    pub depth: usize,
    pub pattern: PatternKind,
    pub success: bool,
}

/// Pattern and dance instrumentation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PatternStats {
    pub manhattan: PatternCounter,
    pub wriggle: PatternCounter,
    pub tunnel: PatternCounter,
    pub triple_step: PatternCounter,
    /// Backward iterations taken inside triple step.
    pub triple_step_backsteps: u64,
    pub frames: u64,
    pub max_depth: usize,
    pub max_fiber_samples_per_frame: usize,
    /// Present when tracing: every pattern call in order.
    pub call_log: Option<Vec<CallRecord>>,
    /// Present when tracing: every edge a pattern added, as state pairs.
    pub pattern_edges: Option<Vec<(State, State)>>,
}

impl PatternStats {
    pub fn traced() -> Self {
        PatternStats { call_log: Some(Vec::new()), pattern_edges: Some(Vec::new()), ..Default::default() }
    }

    pub fn counter(&self, kind: PatternKind) -> &PatternCounter {
        match kind {
            PatternKind::Manhattan => &self.manhattan,
            PatternKind::Wriggle => &self.wriggle,
            PatternKind::Tunnel => &self.tunnel,
            PatternKind::TripleStep => &self.triple_step,
        }
    }

    pub(crate) fn log(&mut self, depth: usize, pattern: PatternKind, success: bool) {
        let frame = self.frames;
        if let Some(log) = &mut self.call_log {
            log.push(CallRecord { frame, depth, pattern, success });
        }
    }

    pub fn merge(&mut self, other: &PatternStats) {
        self.manhattan.merge(&other.manhattan);
        self.wriggle.merge(&other.wriggle);
        self.tunnel.merge(&other.tunnel);
        self.triple_step.merge(&other.triple_step);
        self.triple_step_backsteps += other.triple_step_backsteps;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.max_fiber_samples_per_frame = self.max_fiber_samples_per_frame.max(other.max_fiber_samples_per_frame);
        // Frame ids in merged logs are offset so they stay unique.
        let offset = self.frames;
        self.frames += other.frames;
        if let (Some(mine), Some(theirs)) = (&mut self.call_log, &other.call_log) {
            mine.extend(theirs.iter().map(|c| CallRecord { frame: c.frame + offset, ..*c }));
        }
        if let (Some(mine), Some(theirs)) = (&mut self.pattern_edges, &other.pattern_edges) {
            mine.extend(theirs.iter().cloned());
        }
    }
}

/// Cubic Hermite ease from `lo` to `hi` over `s_max` counter steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothSchedule {
    lo: f64,
    hi: f64,
    s_max: usize,
}

pub fn smooth_parameter(lo: f64, hi: f64, s_max: usize) -> SmoothSchedule {
    assert!(lo <= hi, "smooth_parameter: lo > hi");
    assert!(s_max >= 1, "smooth_parameter: s_max must be positive");
    SmoothSchedule { lo, hi, s_max }
}

impl SmoothSchedule {
    pub fn at(&self, ctr: usize) -> f64 {
        let t = (ctr as f64 / self.s_max as f64).clamp(0.0, 1.0);
        self.lo + (self.hi - self.lo) * (t * t * (3.0 - 2.0 * t))
    }
}

/// Everything a pattern needs: the head, the goal, the roadmap being
/// extended, parameters and randomness.
pub struct PatternContext<'a> {
    pub head: HeadPointer<'a>,
    head_vertex: VertexId,
    pub goal: State,
    pub goal_tolerance: f64,
    pub graph: &'a mut RoadmapGraph,
    pub params: PatternParams,
    pub rng: &'a mut dyn RngCore,
    pub budget: Option<&'a Budget<'a>>,
    pub stats: PatternStats,
}

impl<'a> PatternContext<'a> {
    /// `head_vertex` must be the graph vertex holding the head state.
    pub fn new(
        head: HeadPointer<'a>,
        head_vertex: VertexId,
        goal: State,
        goal_tolerance: f64,
        graph: &'a mut RoadmapGraph,
        params: PatternParams,
        rng: &'a mut dyn RngCore,
    ) -> Self {
        assert_eq!(graph.vertex(head_vertex), head.state(), "head vertex does not hold the head state");
        PatternContext {
            head,
            head_vertex,
            goal,
            goal_tolerance,
            graph,
            params,
            rng,
            budget: None,
            stats: PatternStats::default(),
        }
    }

    pub fn with_budget(mut self, budget: &'a Budget<'a>) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_stats(mut self, stats: PatternStats) -> Self {
        self.stats = stats;
        self
    }

    pub fn head_vertex(&self) -> VertexId {
        self.head_vertex
    }

    pub fn restriction(&self) -> &'a PathRestriction<'a> {
        self.head.restriction()
    }

    fn bundle(&self) -> &'a Bundle {
        self.restriction().bundle
    }

    fn checker(&self) -> &'a ValidityChecker {
        self.restriction().checker
    }

    fn total(&self) -> &'a StateSpace {
        self.restriction().bundle.total()
    }

    pub(crate) fn expired(&self) -> bool {
        self.budget.is_some_and(|b| b.expired())
    }

    pub fn has_reached_goal(&self) -> bool {
        self.head.has_reached_goal(&self.goal, self.goal_tolerance)
    }

    fn head_fiber(&self) -> State {
        self.bundle().project_fiber(self.head.state()).expect("head lives in the total space")
    }

    fn vertex_for(&mut self, x: &State) -> VertexId {
        if let Some(g) = self.graph.goal() {
            if self.total().distance(x, &self.goal) <= self.goal_tolerance {
                return g;
            }
        }
        self.graph.add_vertex(x.clone())
    }

    /// Records the certified motion `from -> to` and returns `to`'s vertex.
    fn add_edge(&mut self, from: VertexId, to: &State) -> VertexId {
        let from_state = self.graph.vertex(from).clone();
        let cost = self.total().distance(&from_state, to);
        if cost == 0.0 {
            return from;
        }
        let id = self.vertex_for(to);
        self.graph.add_edge(from, id, cost);
        if let Some(edges) = &mut self.stats.pattern_edges {
            edges.push((from_state, to.clone()));
        }
        id
    }

    fn move_head(&mut self, x: State, l: f64, vertex: VertexId) {
        let l = l.clamp(0.0, self.restriction().length());
        self.head.update(x, l).expect("patterns only advance the head onto certified states");
        self.head_vertex = vertex;
    }
}

/// Sweeps the base path from the head's location with its fiber fixed, then
/// moves to the goal; the head ends on the last valid state.
pub fn manhattan_pattern(ctx: &mut PatternContext<'_>) -> bool {
    let ok = manhattan_inner(ctx);
    ctx.stats.manhattan.record(ok)
}

fn manhattan_inner(ctx: &mut PatternContext<'_>) -> bool {
    let r = ctx.restriction();
    let len = r.length();
    let fiber = ctx.head_fiber();
    let mut section = alloc::vec![ctx.head.state().clone()];
    let mut locations = alloc::vec![ctx.head.location()];
    let mut l = ctx.head.location();
    while l < len {
        section.push(r.lift_at(l, &fiber));
        locations.push(l);
        l += ctx.params.delta_base;
    }
    section.push(ctx.goal.clone());
    locations.push(len);

    let result = check_motion_path(ctx.checker(), ctx.total(), &section);
    let seg = result.segment;
    let reached_up_to = if result.motion.reached { seg + 1 } else { seg };
    let mut vertex = ctx.head_vertex;
    for next in &section[1..=reached_up_to] {
        vertex = ctx.add_edge(vertex, next);
    }
    let (state, location) = if result.motion.reached {
        (section[seg + 1].clone(), locations[seg + 1])
    } else {
        let f = result.segment_fraction;
        if f > 0.0 {
            vertex = ctx.add_edge(vertex, &result.motion.last_valid);
        }
        let loc = locations[seg] + f * (locations[seg + 1] - locations[seg]);
        (result.motion.last_valid, loc)
    };
    // Never move the cursor backwards: the first polyline point can sit
    // behind the head when the head is slightly off the base path.
    let location = location.max(ctx.head.location());
    ctx.move_head(state, location, vertex);
    ctx.has_reached_goal()
}

/// Random walk along the fibers, one base step at a time. True when at
/// least one step was taken.
pub fn wriggle_pattern(ctx: &mut PatternContext<'_>) -> bool {
    let ok = wriggle_inner(ctx);
    ctx.stats.wriggle.record(ok)
}

fn wriggle_inner(ctx: &mut PatternContext<'_>) -> bool {
    let r = ctx.restriction();
    let bundle = ctx.bundle();
    let len = r.length();
    let PatternParams { delta_base, delta_fiber, s_max } = ctx.params;
    let mut l = ctx.head.location() + delta_base;
    let mut steps = 0usize;
    while l < len {
        if ctx.expired() {
            break;
        }
        let base = r.base_path_at(l);
        let head_state = ctx.head.state().clone();
        let head_fiber = ctx.head_fiber();
        let mut ctr = 0;
        while ctr < s_max {
            let fiber = bundle.fiber().sample_uniform_near(&head_fiber, delta_fiber, &mut *ctx.rng);
            let x = bundle.lift(&base, &fiber).expect("lift of base and fiber elements");
            if ctx.checker().is_valid(&x) && check_motion(ctx.checker(), ctx.total(), &head_state, &x).reached {
                let v = ctx.add_edge(ctx.head_vertex, &x);
                ctx.move_head(x, l, v);
                steps += 1;
                break;
            }
            ctr += 1;
        }
        if ctr >= s_max {
            break;
        }
        l += delta_base;
    }
    steps > 0
}

/// First valid state ahead of the head with the head's fiber, past at least
/// one invalid one. When nothing ahead is blocked, the state one base step
/// ahead.
pub fn tunnel_end(ctx: &PatternContext<'_>) -> Option<(State, f64)> {
    let r = ctx.restriction();
    let len = r.length();
    let fiber = ctx.head_fiber();
    let start = ctx.head.location();
    let mut first: Option<(State, f64)> = None;
    let mut seen_invalid = false;
    let mut k = 1u64;
    loop {
        let mut l = start + k as f64 * ctx.params.delta_base;
        let last = l >= len;
        if last {
            l = len;
        }
        let x = r.lift_at(l, &fiber);
        if ctx.checker().is_valid(&x) {
            if seen_invalid {
                return Some((x, l));
            }
            if first.is_none() {
                first = Some((x, l));
            }
        } else {
            seen_invalid = true;
        }
        if last || ctx.expired() {
            break;
        }
        k += 1;
    }
    if seen_invalid {
        None
    } else {
        first
    }
}

/// Crosses a blocked stretch of the restriction by sampling around it.
pub fn tunnel_pattern(ctx: &mut PatternContext<'_>) -> bool {
    let ok = tunnel_inner(ctx);
    ctx.stats.tunnel.record(ok)
}

fn tunnel_inner(ctx: &mut PatternContext<'_>) -> bool {
    let Some((end_state, end_location)) = tunnel_end(ctx) else {
        return false;
    };
    let r = ctx.restriction();
    let bundle = ctx.bundle();
    let PatternParams { delta_base, delta_fiber, s_max } = ctx.params;
    let head_fiber = ctx.head_fiber();
    let mut cur = ctx.head.state().clone();
    let mut cur_vertex = ctx.head_vertex;
    let mut best = ctx.total().distance(&cur, &end_state);
    let eps = smooth_parameter(0.0, 10.0 * delta_base, s_max);
    let mut l = ctx.head.location();
    while l <= end_location {
        if ctx.expired() {
            return false;
        }
        if check_motion(ctx.checker(), ctx.total(), &cur, &end_state).reached {
            let v = ctx.add_edge(cur_vertex, &end_state);
            ctx.move_head(end_state, end_location, v);
            return true;
        }
        l += delta_base;
        let base = r.base_path_at(l);
        let mut ctr = 0;
        while ctr < s_max {
            let b = bundle.base().sample_uniform_near(&base, eps.at(ctr), &mut *ctx.rng);
            let f = bundle.fiber().sample_uniform_near(&head_fiber, delta_fiber, &mut *ctx.rng);
            let x = bundle.lift(&b, &f).expect("lift of base and fiber elements");
            if ctx.checker().is_valid(&x) {
                let d = ctx.total().distance(&x, &end_state);
                if d < best && check_motion(ctx.checker(), ctx.total(), &cur, &x).reached {
                    cur_vertex = ctx.add_edge(cur_vertex, &x);
                    cur = x;
                    best = d;
                    break;
                }
            }
            ctr += 1;
        }
        if ctr >= s_max {
            return false;
        }
    }
    false
}

/// Connects the head to `x` (a valid state one base step ahead) by a
/// backstep, a sidestep along a fiber and a forward step.
pub fn triple_step_pattern(ctx: &mut PatternContext<'_>, x: &State) -> Result<bool> {
    ctx.total().check_dim(x)?;
    if !ctx.checker().is_valid(x) {
        return Err(contract("triple step target is invalid"));
    }
    let ok = triple_step_inner(ctx, x);
    Ok(ctx.stats.triple_step.record(ok))
}

fn triple_step_inner(ctx: &mut PatternContext<'_>, x: &State) -> bool {
    let r = ctx.restriction();
    let bundle = ctx.bundle();
    let total = ctx.total();
    let checker = ctx.checker();
    let delta_base = ctx.params.delta_base;
    let head_state = ctx.head.state().clone();
    let target_location = (ctx.head.location() + delta_base).min(r.length());
    let f1 = ctx.head_fiber();
    let f2 = bundle.project_fiber(x).expect("target in the total space");
    let f_mid = bundle.fiber().interpolate(&f1, &f2, 0.5);
    let mut l = ctx.head.location();
    while l > delta_base {
        if ctx.expired() {
            return false;
        }
        l -= delta_base;
        ctx.stats.triple_step_backsteps += 1;
        let base = r.base_path_at(l);
        let mid = bundle.lift(&base, &f_mid).expect("lift");
        if !checker.is_valid(&mid) {
            continue;
        }
        let x1 = bundle.lift(&base, &f1).expect("lift");
        let x2 = bundle.lift(&base, &f2).expect("lift");
        if check_motion(checker, total, &x1, &x2).reached {
            if check_motion(checker, total, &head_state, &x1).reached && check_motion(checker, total, &x2, x).reached {
                let v1 = ctx.add_edge(ctx.head_vertex, &x1);
                let v2 = ctx.add_edge(v1, &x2);
                let v3 = ctx.add_edge(v2, x);
                ctx.move_head(x.clone(), target_location, v3);
                return true;
            }
            break;
        }
    }
    false
}

//! The pattern dance: try cheap patterns first, recurse on partial progress,
//! and fall back to triple steps onto randomly sampled fibers.

use rand::RngCore;

use crate::budget::Budget;
use crate::bundle::BundleLadder;
use crate::graph::RoadmapGraph;
use crate::patterns::{
    manhattan_pattern, triple_step_pattern, tunnel_pattern, wriggle_pattern, PatternContext, PatternKind,
    PatternParams, PatternSet, PatternStats,
};
use crate::restriction::{BasePath, HeadPointer, PathRestriction};
use crate::validity::check_motion;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DanceParams {
    pub d_max: usize,
    pub b_max: usize,
    /// Pattern step sizes as a fraction of the base and fiber extents.
    pub step_fraction: f64,
    pub s_max: usize,
    pub patterns: PatternSet,
}

impl Default for DanceParams {
    fn default() -> Self {
        DanceParams {
            d_max: 3,
            b_max: 500,
            step_fraction: PatternParams::DEFAULT_STEP_FRACTION,
            s_max: PatternParams::DEFAULT_S_MAX,
            patterns: PatternSet::default(),
        }
    }
}

impl DanceParams {
    pub fn validate(&self) -> crate::Result<()> {
        if self.b_max == 0 || self.s_max == 0 || !(self.step_fraction > 0.0) {
            return Err(crate::error::contract("dance needs b_max >= 1, s_max >= 1 and a positive step fraction"));
        }
        Ok(())
    }
}

pub fn pattern_dance(ctx: &mut PatternContext<'_>, dance: &DanceParams, depth: usize) -> bool {
    ctx.stats.frames += 1;
    ctx.stats.max_depth = ctx.stats.max_depth.max(depth);

    let ok = manhattan_pattern(ctx);
    ctx.stats.log(depth, PatternKind::Manhattan, ok);
    if ok {
        return true;
    }
    if depth >= dance.d_max || ctx.expired() {
        return false;
    }
    if dance.patterns.wriggle {
        let ok = wriggle_pattern(ctx);
        ctx.stats.log(depth, PatternKind::Wriggle, ok);
        if ok {
            return pattern_dance(ctx, dance, depth + 1);
        }
    }
    if dance.patterns.tunnel {
        let ok = tunnel_pattern(ctx);
        ctx.stats.log(depth, PatternKind::Tunnel, ok);
        if ok {
            return pattern_dance(ctx, dance, depth + 1);
        }
    }
    if !dance.patterns.triple_step {
        return false;
    }

    let r = ctx.restriction();
    let bundle = r.bundle;
    let l = (ctx.head.location() + ctx.params.delta_base).min(r.length());
    let base = r.base_path_at(l);
    let mut samples = 0;
    let mut stepped = false;
    for _ in 0..dance.b_max {
        if ctx.expired() {
            break;
        }
        samples += 1;
        let fiber = bundle.fiber().sample_uniform(&mut *ctx.rng);
        let x = bundle.lift(&base, &fiber).expect("lift of base and fiber elements");
        if !r.checker.is_valid(&x) || check_motion(r.checker, bundle.total(), ctx.head.state(), &x).reached {
            continue;
        }
        let ok = triple_step_pattern(ctx, &x).expect("target was just validated");
        ctx.stats.log(depth, PatternKind::TripleStep, ok);
        if ok {
            stepped = true;
            break;
        }
    }
    ctx.stats.max_fiber_samples_per_frame = ctx.stats.max_fiber_samples_per_frame.max(samples);
    stepped && pattern_dance(ctx, dance, depth + 1)
}

/// Tries to lift the shortest start-goal path of `graphs[level - 1]` to a
/// start-goal section of level `level`, recording every certified motion in
/// `graphs[level]`. Levels are 0-indexed; level 0 has no base and always
/// fails.
#[allow(clippy::too_many_arguments)]
pub fn find_section(
    ladder: &BundleLadder,
    level: usize,
    graphs: &mut [RoadmapGraph],
    dance: &DanceParams,
    goal_tolerance: f64,
    rng: &mut dyn RngCore,
    budget: Option<&Budget<'_>>,
    stats: &mut PatternStats,
) -> bool {
    let Some(bundle) = ladder.bundle_below(level) else {
        return false;
    };
    let (lower, upper) = graphs.split_at_mut(level);
    let base_graph = &lower[level - 1];
    let graph = &mut upper[0];
    let Some(goal_id) = graph.goal() else {
        return false;
    };
    let Some(waypoints) = base_graph.extract_path(bundle.base()) else {
        return false;
    };
    let Ok(base_path) = BasePath::new(bundle.base(), waypoints) else {
        return false;
    };
    let checker = &ladder.level(level).checker;
    let restriction = PathRestriction::new(base_path, bundle, checker);
    let start = graph.vertex(graph.start()).clone();
    let goal = graph.vertex(goal_id).clone();
    let start_id = graph.start();
    let Ok(head) = HeadPointer::new(&restriction, start, 0.0) else {
        return false;
    };
    let params = PatternParams::for_bundle(bundle, dance.step_fraction, dance.s_max);
    let taken = core::mem::take(stats);
    let mut ctx = PatternContext::new(head, start_id, goal, goal_tolerance, graph, params, rng).with_stats(taken);
    ctx.budget = budget;
    let ok = pattern_dance(&mut ctx, dance, 0);
    *stats = core::mem::take(&mut ctx.stats);
    ok
}

//! The multilevel planner loop, its RRT and PRM grow steps, and the flat
//! baselines built from the same grow steps.

use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::budget::{Budget, Clock, WorkMeter};
use crate::bundle::BundleLadder;
use crate::dance::{find_section, DanceParams};
use crate::error::{contract, Error, Result};
use crate::float::powf;
use crate::graph::RoadmapGraph;
use crate::patterns::PatternStats;
use crate::restriction::BasePath;
use crate::scenario::Scenario;
use crate::space::State;
use crate::validity::check_motion;

/// Level priority: `1 / (|V|^(1/n) + 1)`.
pub fn importance(vertex_count: usize, dim: usize) -> f64 {
    assert!(dim >= 1, "importance needs a positive dimension");
    1.0 / (powf(vertex_count as f64, 1.0 / dim as f64) + 1.0)
}

/// Planner termination condition; hit when any set limit is reached.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Ptc {
    pub time_limit: Option<f64>,
    pub iteration_limit: Option<u64>,
    pub target_cost: Option<f64>,
}

impl Ptc {
    pub fn time(seconds: f64) -> Self {
        Ptc { time_limit: Some(seconds), ..Default::default() }
    }

    pub fn iterations(n: u64) -> Self {
        Ptc { iteration_limit: Some(n), ..Default::default() }
    }

    pub fn with_iterations(mut self, n: u64) -> Self {
        self.iteration_limit = Some(n);
        self
    }

    pub fn with_target_cost(mut self, cost: f64) -> Self {
        self.target_cost = Some(cost);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_limit.is_none() && self.iteration_limit.is_none() && self.target_cost.is_none() {
            return Err(contract("termination condition sets no limit"));
        }
        if self.time_limit.is_some_and(|t| !(t >= 0.0)) {
            return Err(contract("time limit must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlannerKind {
    Qrrt,
    Qmp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    Rrt,
    Prm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GrowKind {
    Tree,
    Roadmap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerConfig {
    pub dance: DanceParams,
    /// RRT steering range as a fraction of the level extent.
    pub range_fraction: f64,
    /// PRM neighbours per sample.
    pub k_nearest: usize,
    /// Probability of drawing a grow sample from the level below.
    pub base_bias: f64,
    /// Of those, the share taken along the base solution path when one exists.
    pub path_bias: f64,
    /// Whether to run the pattern dance at all.
    pub find_section: bool,
    /// Record the call log and every pattern edge.
    pub trace_patterns: bool,
    /// Samples per bundle for the admissibility gate; 0 disables it.
    pub admissibility_samples: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            dance: DanceParams::default(),
            range_fraction: 0.2,
            k_nearest: 10,
            base_bias: 0.8,
            path_bias: 0.5,
            find_section: true,
            trace_patterns: false,
            admissibility_samples: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelStats {
    pub dim: usize,
    pub vertices: usize,
    pub edges: usize,
    pub grow_steps: u64,
    pub find_section_attempts: u64,
    pub find_section_successes: u64,
    pub patterns: PatternStats,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanResult {
    pub solved: bool,
    /// Start to goal through the top level's roadmap; empty when unsolved.
    pub path: Vec<State>,
    pub cost: f64,
    /// Seconds according to the clock the planner ran under.
    pub wall_time: f64,
    pub iterations: u64,
    pub validity_checks: u64,
    pub distance_evals: u64,
    /// Coarsest level first.
    pub levels: Vec<LevelStats>,
}

impl PlanResult {
    /// Pattern statistics summed over levels.
    pub fn pattern_stats(&self) -> PatternStats {
        let mut total = if self.levels.iter().any(|l| l.patterns.call_log.is_some()) {
            PatternStats::traced()
        } else {
            PatternStats::default()
        };
        for l in &self.levels {
            total.merge(&l.patterns);
        }
        total
    }

    pub fn vertices_total(&self) -> usize {
        self.levels.iter().map(|l| l.vertices).sum()
    }

    pub fn edges_total(&self) -> usize {
        self.levels.iter().map(|l| l.edges).sum()
    }
}

/// Multilevel planning over the scenario's ladder with the pattern dance.
pub fn multilevel_plan(
    scenario: &Scenario,
    kind: PlannerKind,
    config: &PlannerConfig,
    ptc: &Ptc,
    rng: &mut dyn RngCore,
    clock: &dyn Clock,
) -> Result<PlanResult> {
    if config.admissibility_samples > 0 {
        for (k, report) in scenario.check_admissibility(config.admissibility_samples, 0).iter().enumerate() {
            if let Some(r) = report {
                if r.violations > 0 {
                    return Err(Error::Invariant(
                        "ladder is admissible",
                        alloc::format!(
                            "{} of {} samples violate admissibility onto level {k}",
                            r.violations,
                            r.samples
                        ),
                    ));
                }
            }
        }
    }
    let grow = match kind {
        PlannerKind::Qrrt => GrowKind::Tree,
        PlannerKind::Qmp => GrowKind::Roadmap,
    };
    run(scenario.ladder(), scenario, grow, config, ptc, rng, clock)
}

/// Flat planning on the scenario's full space: no bundles, no patterns.
pub fn baseline_plan(
    scenario: &Scenario,
    kind: BaselineKind,
    config: &PlannerConfig,
    ptc: &Ptc,
    rng: &mut dyn RngCore,
    clock: &dyn Clock,
) -> Result<PlanResult> {
    let top = scenario.ladder().total();
    let ladder = BundleLadder::single(top.space.clone(), top.checker.clone());
    let grow = match kind {
        BaselineKind::Rrt => GrowKind::Tree,
        BaselineKind::Prm => GrowKind::Roadmap,
    };
    let config = PlannerConfig { find_section: false, ..*config };
    run(&ladder, scenario, grow, &config, ptc, rng, clock)
}

struct Level {
    graph_dim: usize,
    grow_steps: u64,
    stats: LevelStats,
    /// Cached shortest path of the level below, with its cost and the
    /// vertex count of that graph when it was extracted.
    base_path: Option<(BasePath, f64)>,
    base_checked_at: usize,
}

struct Planner<'a, 'r> {
    ladder: &'a BundleLadder,
    grow: GrowKind,
    config: &'a PlannerConfig,
    goal_tolerance: f64,
    graphs: Vec<RoadmapGraph>,
    levels: Vec<Level>,
    rng: &'r mut dyn RngCore,
    budget: Budget<'a>,
}

fn run(
    ladder: &BundleLadder,
    scenario: &Scenario,
    grow: GrowKind,
    config: &PlannerConfig,
    ptc: &Ptc,
    rng: &mut dyn RngCore,
    clock: &dyn Clock,
) -> Result<PlanResult> {
    ptc.validate()?;
    config.dance.validate()?;
    let meter = WorkMeter::new();
    let ladder = ladder.map_checkers(|c| c.metered(meter.clone()));
    let k_top = ladder.len() - 1;
    let offset = scenario.ladder().len() - ladder.len();
    let graphs: Vec<RoadmapGraph> = (0..ladder.len())
        .map(|k| {
            let (s, g) = scenario.endpoints_at(k + offset);
            RoadmapGraph::with_goal(s, g)
        })
        .collect();
    let levels = ladder
        .levels()
        .iter()
        .map(|l| Level {
            graph_dim: l.space.dim(),
            grow_steps: 0,
            stats: LevelStats {
                dim: l.space.dim(),
                patterns: if config.trace_patterns { PatternStats::traced() } else { PatternStats::default() },
                ..Default::default()
            },
            base_path: None,
            base_checked_at: 0,
        })
        .collect();
    let mut p = Planner {
        ladder: &ladder,
        grow,
        config,
        goal_tolerance: scenario.goal_tolerance(),
        graphs,
        levels,
        rng,
        budget: Budget::new(clock, meter.clone(), ptc.time_limit),
    };

    let mut iterations = 0u64;
    let stop = |it: u64, budget: &Budget<'_>| ptc.iteration_limit.is_some_and(|n| it >= n) || budget.expired();
    'levels: for k in 0..=k_top {
        if k > 0 && config.find_section {
            p.attempt_section(k);
        }
        while !p.graphs[k].is_solved() {
            if stop(iterations, &p.budget) {
                break 'levels;
            }
            // Highest importance wins, ties to the lowest level.
            let mut pick = 0;
            let mut best = f64::NEG_INFINITY;
            for j in 0..=k {
                let w = importance(p.graphs[j].vertex_count(), p.levels[j].graph_dim);
                if w > best {
                    best = w;
                    pick = j;
                }
            }
            p.grow_level(pick, k);
            iterations += 1;
        }
    }

    let top_space = &ladder.total().space;
    let path = if p.graphs[k_top].is_solved() { p.graphs[k_top].extract_path(top_space) } else { None };
    let solved = path.is_some();
    let path = path.unwrap_or_default();
    let cost = if solved { RoadmapGraph::path_cost(top_space, &path) } else { f64::INFINITY };
    let levels = p
        .levels
        .into_iter()
        .zip(&p.graphs)
        .map(|(l, g)| LevelStats {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            grow_steps: l.grow_steps,
            ..l.stats
        })
        .collect();
    Ok(PlanResult {
        solved,
        path,
        cost,
        wall_time: p.budget.elapsed(),
        iterations,
        validity_checks: meter.validity_checks(),
        distance_evals: meter.distance_evals(),
        levels,
    })
}

impl Planner<'_, '_> {
    fn attempt_section(&mut self, k: usize) -> bool {
        let stats = &mut self.levels[k].stats;
        stats.find_section_attempts += 1;
        let ok = find_section(
            self.ladder,
            k,
            &mut self.graphs,
            &self.config.dance,
            self.goal_tolerance,
            &mut *self.rng,
            Some(&self.budget),
            &mut stats.patterns,
        );
        stats.find_section_successes += ok as u64;
        ok
    }

    /// Refreshes level `k`'s cached base path once the level below has grown
    /// by a tenth; a strictly cheaper path earns one more section attempt
    /// while level `top` is still being solved.
    fn refresh_base_path(&mut self, k: usize, top: usize) {
        let below = &self.graphs[k - 1];
        if !below.is_solved() {
            return;
        }
        let n = below.vertex_count();
        if self.levels[k].base_path.is_some() && (n as f64) < 1.1 * self.levels[k].base_checked_at as f64 {
            return;
        }
        self.levels[k].base_checked_at = n;
        let space = &self.ladder.level(k - 1).space;
        let Some(path) = below.extract_path(space).and_then(|w| BasePath::new(space, w).ok()) else {
            return;
        };
        let cost = path.length();
        let improved = self.levels[k].base_path.as_ref().is_some_and(|(_, old)| cost < *old);
        self.levels[k].base_path = Some((path, cost));
        if improved && k == top && self.config.find_section && !self.graphs[k].is_solved() {
            self.attempt_section(k);
        }
    }

    fn sample(&mut self, k: usize) -> State {
        let space = &self.ladder.level(k).space;
        let Some(bundle) = self.ladder.bundle_below(k) else {
            return space.sample_uniform(&mut *self.rng);
        };
        if !(self.rng.gen::<f64>() < self.config.base_bias) {
            return space.sample_uniform(&mut *self.rng);
        }
        let base_space = bundle.base();
        let base = match &self.levels[k].base_path {
            Some((path, _)) if self.rng.gen::<f64>() < self.config.path_bias => {
                let l = self.rng.gen::<f64>() * path.length();
                path.at(base_space, l)
            }
            _ => {
                let below = &self.graphs[k - 1];
                below.vertex(self.rng.gen_range(0..below.vertex_count())).clone()
            }
        };
        let fiber = bundle.fiber().sample_uniform(&mut *self.rng);
        bundle.lift(&base, &fiber).expect("lift of base and fiber elements")
    }

    fn grow_level(&mut self, k: usize, top: usize) {
        if k > 0 {
            self.refresh_base_path(k, top);
        }
        self.levels[k].grow_steps += 1;
        let x = self.sample(k);
        match self.grow {
            GrowKind::Tree => self.grow_tree(k, x),
            GrowKind::Roadmap => self.grow_roadmap(k, x),
        }
    }

    fn grow_tree(&mut self, k: usize, x: State) {
        let level = self.ladder.level(k);
        let space = &level.space;
        let graph = &mut self.graphs[k];
        let meter = self.budget.meter();
        let start = graph.start();
        let Some(near) = graph.nearest(space, &x, Some(meter), |id| graph.same_component(start, id)) else {
            return;
        };
        let near_state = graph.vertex(near).clone();
        let range = self.config.range_fraction * space.extent();
        let d = space.distance(&near_state, &x);
        let x_new = if d > range { space.interpolate(&near_state, &x, range / d) } else { x };
        if !check_motion(&level.checker, space, &near_state, &x_new).reached {
            return;
        }
        let cost = space.distance(&near_state, &x_new);
        if cost == 0.0 {
            return;
        }
        let id = graph.add_vertex(x_new.clone());
        graph.add_edge(near, id, cost);
        let goal = graph.goal().expect("levels are created with a goal");
        let goal_state = graph.vertex(goal).clone();
        let dg = space.distance(&x_new, &goal_state);
        if dg <= range && check_motion(&level.checker, space, &x_new, &goal_state).reached {
            graph.add_edge(id, goal, dg);
        }
    }

    fn grow_roadmap(&mut self, k: usize, x: State) {
        let level = self.ladder.level(k);
        let space = &level.space;
        if !level.checker.is_valid(&x) {
            return;
        }
        let graph = &mut self.graphs[k];
        let id = graph.add_vertex(x.clone());
        let neighbours = graph.k_nearest(space, &x, self.config.k_nearest, Some(id), Some(self.budget.meter()));
        for (n, d) in neighbours {
            if check_motion(&level.checker, space, &x, graph.vertex(n)).reached {
                graph.add_edge(id, n, d);
            }
        }
    }
}

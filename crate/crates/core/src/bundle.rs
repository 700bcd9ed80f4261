//! Fiber bundles over coordinate-selection projections, and ladders of them.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::space::{State, StateSpace};
use crate::validity::ValidityChecker;

/// `(total, base, fiber, projection, fiber projection)` where the projection
/// keeps the coordinates flagged in `base_mask` and the fiber keeps the rest,
/// both in their original order.
#[derive(Clone, Debug, PartialEq)]
pub struct Bundle {
    total: StateSpace,
    base: StateSpace,
    fiber: StateSpace,
    base_mask: Vec<bool>,
}

impl Bundle {
    pub fn new(total: StateSpace, base_mask: Vec<bool>) -> Result<Self> {
        let base = total
            .select(&base_mask)?
            .ok_or(Error::Invariant("nonempty base", "projection selects no coordinates".into()))?;
        let fiber_mask: Vec<bool> = base_mask.iter().map(|m| !m).collect();
        let fiber = total.select(&fiber_mask)?.unwrap_or_else(StateSpace::point);
        debug_assert_eq!(base.dim() + fiber.dim(), total.dim());
        Ok(Bundle { total, base, fiber, base_mask })
    }

    pub fn total(&self) -> &StateSpace {
        &self.total
    }

    pub fn base(&self) -> &StateSpace {
        &self.base
    }

    pub fn fiber(&self) -> &StateSpace {
        &self.fiber
    }

    pub fn base_mask(&self) -> &[bool] {
        &self.base_mask
    }

    pub fn project_base(&self, x: &[f64]) -> Result<State> {
        self.total.check_dim(x)?;
        Ok(self.select(x, true))
    }

    pub fn project_fiber(&self, x: &[f64]) -> Result<State> {
        self.total.check_dim(x)?;
        Ok(self.select(x, false))
    }

    fn select(&self, x: &[f64], base: bool) -> State {
        x.iter().zip(&self.base_mask).filter(|(_, m)| **m == base).map(|(v, _)| *v).collect::<Vec<_>>().into()
    }

    /// Interleaves base and fiber coordinates back into a total-space state.
    pub fn lift(&self, b: &[f64], f: &[f64]) -> Result<State> {
        self.base.check_dim(b)?;
        self.fiber.check_dim(f)?;
        let mut bi = b.iter();
        let mut fi = f.iter();
        let values = self
            .base_mask
            .iter()
            .map(|m| if *m { *bi.next().unwrap() } else { *fi.next().unwrap() })
            .collect::<Vec<_>>();
        Ok(State::new(values))
    }
}

/// One level of a [`BundleLadder`].
#[derive(Clone, Debug)]
pub struct Level {
    pub space: StateSpace,
    pub checker: ValidityChecker,
}

/// Spaces `X_1, ..., X_K` (stored 0-indexed, coarsest first) with a bundle
/// between each adjacent pair and a validity checker per level.
#[derive(Clone, Debug)]
pub struct BundleLadder {
    levels: Vec<Level>,
    /// `bundles[k]` has total space `levels[k + 1].space` and base
    /// `levels[k].space`.
    bundles: Vec<Bundle>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdmissibilityReport {
    pub samples: usize,
    pub violations: usize,
    /// Up to [`AdmissibilityReport::MAX_WITNESSES`] total-space states that are
    /// valid while their projection is not.
    pub witnesses: Vec<State>,
}

impl AdmissibilityReport {
    pub const MAX_WITNESSES: usize = 10;
}

impl BundleLadder {
    /// Builds the ladder downwards from the full space. `masks[k]` selects
    /// the coordinates of level `k + 1` that form level `k`; `checkers` are
    /// coarsest first and must number `masks.len() + 1`.
    pub fn from_masks(total: StateSpace, masks: Vec<Vec<bool>>, checkers: Vec<ValidityChecker>) -> Result<Self> {
        if checkers.len() != masks.len() + 1 {
            return Err(Error::Invariant(
                "one checker per level",
                alloc::format!("{} masks need {} checkers, got {}", masks.len(), masks.len() + 1, checkers.len()),
            ));
        }
        let mut spaces = alloc::vec![total];
        let mut bundles = Vec::with_capacity(masks.len());
        for mask in masks.into_iter().rev() {
            let bundle = Bundle::new(spaces.last().unwrap().clone(), mask)?;
            spaces.push(bundle.base().clone());
            bundles.push(bundle);
        }
        spaces.reverse();
        bundles.reverse();
        let levels = spaces.into_iter().zip(checkers).map(|(space, checker)| Level { space, checker }).collect();
        Ok(BundleLadder { levels, bundles })
    }

    pub fn single(space: StateSpace, checker: ValidityChecker) -> Self {
        BundleLadder { levels: alloc::vec![Level { space, checker }], bundles: Vec::new() }
    }

    /// Same ladder with every level's checker replaced by `f(checker)`.
    pub fn map_checkers(&self, f: impl Fn(&ValidityChecker) -> ValidityChecker) -> Self {
        BundleLadder {
            levels: self.levels.iter().map(|l| Level { space: l.space.clone(), checker: f(&l.checker) }).collect(),
            bundles: self.bundles.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k]
    }

    pub fn total(&self) -> &Level {
        self.levels.last().expect("ladder has at least one level")
    }

    /// Bundle whose total space is level `k` (requires `k >= 1`).
    pub fn bundle_below(&self, k: usize) -> Option<&Bundle> {
        k.checked_sub(1).and_then(|i| self.bundles.get(i))
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    /// Projects a state of the full space onto level `k`.
    pub fn project_to(&self, k: usize, x: &[f64]) -> Result<State> {
        let mut cur = State::from(x);
        for bundle in self.bundles[k..].iter().rev() {
            cur = bundle.project_base(&cur)?;
        }
        Ok(cur)
    }

    /// Empirical admissibility check between level `k` (base, 0-indexed) and
    /// level `k + 1`: counts uniform states of level `k + 1` that are valid
    /// while their projection is invalid. Out-of-range `k` (including a
    /// one-level ladder) yields an empty report.
    pub fn check_admissibility<R: Rng + ?Sized>(&self, k: usize, n_samples: usize, rng: &mut R) -> AdmissibilityReport {
        let Some(bundle) = self.bundles.get(k) else {
            return AdmissibilityReport::default();
        };
        let upper = &self.levels[k + 1];
        let lower = &self.levels[k];
        let mut report = AdmissibilityReport { samples: n_samples, ..Default::default() };
        for _ in 0..n_samples {
            let x = upper.space.sample_uniform(rng);
            if !upper.checker.is_valid(&x) {
                continue;
            }
            let b = bundle.project_base(&x).expect("sampled from the total space");
            if !lower.checker.is_valid(&b) {
                report.violations += 1;
                if report.witnesses.len() < AdmissibilityReport::MAX_WITNESSES {
                    report.witnesses.push(x);
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use alloc::vec;

    fn se2() -> StateSpace {
        StateSpace::se2([-2.0, -2.0], [2.0, 2.0], 0.4).unwrap()
    }

    fn se2_to_r2() -> Bundle {
        Bundle::new(se2(), vec![true, true, false]).unwrap()
    }

    #[test]
    fn se2_projections() {
        let b = se2_to_r2();
        let x = [1.0, 2.0, 0.7];
        assert_eq!(b.project_base(&x).unwrap().values(), &[1.0, 2.0]);
        assert_eq!(b.project_fiber(&x).unwrap().values(), &[0.7]);
        assert_eq!(b.lift(&[1.0, 2.0], &[0.7]).unwrap().values(), &x);
    }

    #[test]
    fn identity_like_projection_of_r3() {
        let r3 = StateSpace::euclidean(vec![-1.0; 3], vec![1.0; 3]).unwrap();
        let b = Bundle::new(r3, vec![true; 3]).unwrap();
        let x = [0.1, 0.2, 0.3];
        assert_eq!(b.project_base(&x).unwrap().values(), &x);
        assert_eq!(b.fiber().dim(), 0);
        assert_eq!(b.lift(&x, &[]).unwrap().values(), &x);
    }

    #[test]
    fn chain_fiber_reassembles_by_mask() {
        let mut comps = vec![
            (StateSpace::euclidean(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap(), 1.0),
            (StateSpace::rotation(), 0.5),
        ];
        for i in 0..6 {
            comps.push((StateSpace::euclidean(vec![-1.5], vec![1.5]).unwrap(), 0.1 * (6 - i) as f64));
        }
        let total = StateSpace::product(comps).unwrap();
        let mut mask = vec![false; 9];
        mask[0] = true;
        mask[1] = true;
        let b = Bundle::new(total, mask.clone()).unwrap();
        let x: Vec<f64> = (0..9).map(|i| 0.1 * i as f64 - 0.3).collect();
        let f = b.project_fiber(&x).unwrap();
        // Oracle: walk the mask and keep the unselected coordinates.
        let oracle: Vec<f64> = x.iter().zip(&mask).filter(|(_, m)| !**m).map(|(v, _)| *v).collect();
        assert_eq!(f.values(), &oracle[..]);
        assert_eq!(f.len(), 7);
    }

    #[test]
    fn zero_fiber_lift() {
        let b = se2_to_r2();
        let x = b.lift(&[0.3, -0.4], &[0.0]).unwrap();
        assert_eq!(x[2], 0.0);
    }

    #[test]
    fn round_trips_are_exact() {
        let b = se2_to_r2();
        let mut rng = seeded_rng(11);
        for _ in 0..1000 {
            let base = b.base().sample_uniform(&mut rng);
            let fiber = b.fiber().sample_uniform(&mut rng);
            let x = b.lift(&base, &fiber).unwrap();
            assert_eq!(b.project_base(&x).unwrap(), base);
            assert_eq!(b.project_fiber(&x).unwrap(), fiber);
            let y = b.total().sample_uniform(&mut rng);
            let back = b.lift(&b.project_base(&y).unwrap(), &b.project_fiber(&y).unwrap()).unwrap();
            assert_eq!(back, y);
        }
    }

    #[test]
    fn dimension_errors() {
        let b = se2_to_r2();
        assert!(b.project_base(&[1.0]).is_err());
        assert!(b.lift(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn single_level_admissibility_is_vacuous() {
        let ladder = BundleLadder::single(se2(), ValidityChecker::from_fn(|_| true, 0.01).unwrap());
        let r = ladder.check_admissibility(0, 100, &mut seeded_rng(0));
        assert_eq!(r.violations, 0);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn admissibility_detects_bad_relaxation() {
        // Base forbids the unit disk, total forbids nothing.
        let ladder = BundleLadder::from_masks(
            se2(),
            vec![vec![true, true, false]],
            vec![
                ValidityChecker::from_fn(|x| x[0] * x[0] + x[1] * x[1] > 1.0, 0.01).unwrap(),
                ValidityChecker::from_fn(|_| true, 0.01).unwrap(),
            ],
        )
        .unwrap();
        let r = ladder.check_admissibility(0, 2000, &mut seeded_rng(0));
        assert!(r.violations > 0);
        assert!(r.witnesses.len() <= AdmissibilityReport::MAX_WITNESSES);
        assert_eq!(ladder.project_to(0, &[0.5, 0.25, 1.0]).unwrap().values(), &[0.5, 0.25]);
    }
}

//! Complementation, the overlap-translate solver, and the procedure that
//! shrinks `B` to the measure of `A` by intersecting it with translates of
//! itself.

use alloc::vec::Vec;

use num_traits::Signed;

use crate::circle::{CirclePoint, IntervalSet};
use crate::functionals::{admissibility, defect_d, defect_dprime, tau_c};
use crate::piecewise::convolve_indicator;
use crate::rational::{fmt_rational, half, int, zero, Rational};
use crate::{Error, Result};

/// `(G∖A, G∖B, C)`. Requires `μA, μB ∈ (0, 1)` and an admissible triple.
pub fn complement_transform(
    a: &IntervalSet,
    b: &IntervalSet,
    c: &IntervalSet,
) -> Result<(IntervalSet, IntervalSet, IntervalSet)> {
    let rep = admissibility(&a.measure(), &b.measure(), &c.measure());
    if let Some(v) = rep.violation() {
        return Err(Error::HypothesisViolated(v));
    }
    Ok((a.complement(), b.complement(), c.clone()))
}

/// Smallest `x >= 0` with `μ(B ∩ (B + x)) = t`, for `t ∈ [μ(B)², μ(B)]`.
pub fn overlap_translate(b: &IntervalSet, t: &Rational) -> Result<CirclePoint> {
    let mu = b.measure();
    if *t < &mu * &mu || *t > mu {
        return Err(Error::Range(alloc::format!(
            "overlap {} not in [mu^2, mu] = [{}, {}]",
            fmt_rational(t),
            fmt_rational(&(&mu * &mu)),
            fmt_rational(&mu)
        )));
    }
    if *t == mu {
        return Ok(CirclePoint::zero());
    }
    // x ↦ μ(B ∩ (B + x)) is 1_B * 1_{−B}
    let f = convolve_indicator(b, &b.negate());
    let (xs, vs) = f.table();
    for i in 0..xs.len() - 1 {
        if vs[i + 1] <= *t {
            let x = if vs[i] == vs[i + 1] {
                xs[i].clone()
            } else {
                &xs[i] + (&xs[i + 1] - &xs[i]) * (&vs[i] - t) / (&vs[i] - &vs[i + 1])
            };
            return Ok(CirclePoint::new(x));
        }
    }
    unreachable!("the mean of the overlap function is mu^2")
}

/// The constraint that fixed a step size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepCap {
    /// `b_j = d + Σ_{i<j} b_i`: the submodularity budget (the doubling regime).
    Doubling,
    /// `b_j = μ(B_{j−1}) − μ(B_{j−1})²`: the largest overlap loss available.
    Overlap,
    /// `b_j = μ(B_{j−1}) − μ(A)`: the final step.
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub j: usize,
    pub b: Rational,
    pub x: CirclePoint,
    pub cap: StepCap,
    pub measure_after: Rational,
    pub dprime_before: Rational,
    pub dprime_after: Rational,
    /// `𝒟′(A, B_j, τ) <= 2 𝒟′(A, B_{j−1}, τ)`.
    pub doubling_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub b_prime: IntervalSet,
    pub tau: Rational,
    pub d: Rational,
    pub steps: Vec<ReductionStep>,
}

impl Reduction {
    /// `2^J <= 2/η²`.
    pub fn step_bound_holds(&self, eta: &Rational) -> bool {
        let pow = Rational::from_integer(num_bigint::BigInt::from(1u8) << self.steps.len());
        pow * eta * eta <= int(2)
    }
}

/// Checks the hypotheses of [`reduce_to_equal`], naming the first failure.
pub fn reduction_hypotheses(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet, eta: &Rational) -> Result<()> {
    let (ma, mb, mc) = (a.measure(), b.measure(), c.measure());
    let fail = |s: &str| Err(Error::HypothesisViolated(s.into()));
    if !(mc <= ma && ma <= mb) {
        return fail("need mu(C) <= mu(A) <= mu(B)");
    }
    if ma > half() {
        return fail("need mu(A) <= 1/2");
    }
    let rep = admissibility(&ma, &mb, &mc);
    if !rep.eta_strictly_admissible(eta) {
        return fail("triple is not eta-strictly admissible");
    }
    if !rep.eta_bounded(eta) {
        return fail("triple is not eta-bounded");
    }
    let bound = eta * eta * &mb / int(400);
    if defect_d(a, b, c) > &bound * &bound {
        return fail("defect exceeds (eta^2 mu(B) / 400)^2");
    }
    Ok(())
}

/// Shrinks `B` to `B′ ⊆ B` with `μ(B′) = μ(A)` via `B_j = B_{j−1} ∩ (x_j + B_{j−1})`.
///
/// Each step removes `b_j = min(d + Σ_{i<j} b_i, μ_{j−1} − μ_{j−1}², μ_{j−1} − μ(A))`
/// where `d = (2 − μA − μB − μC)/2`. While neither cap binds this is
/// `2^{j−1} d`.
pub fn reduce_to_equal(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet, eta: &Rational) -> Result<Reduction> {
    reduction_hypotheses(a, b, c, eta)?;
    let (ma, mb, mc) = (a.measure(), b.measure(), c.measure());
    let tau = tau_c(&ma, &mb, &mc)?;
    let d = (int(2) - &ma - &mb - &mc) / int(2);
    let mut cur = b.clone();
    let mut spent = zero();
    let mut steps = Vec::new();
    let mut dprime = defect_dprime(a, &cur, &tau)?;
    while cur.measure() != ma {
        let j = steps.len() + 1;
        let mu = cur.measure();
        let budget = &d + &spent;
        let overlap_cap = &mu - &mu * &mu;
        let target_cap = &mu - &ma;
        let mut b_j = budget.clone();
        let mut cap = StepCap::Doubling;
        if overlap_cap < b_j {
            b_j = overlap_cap;
            cap = StepCap::Overlap;
        }
        if target_cap <= b_j {
            b_j = target_cap;
            cap = StepCap::Target;
        }
        if !b_j.is_positive() {
            return Err(Error::ScheduleStall(j));
        }
        let x = overlap_translate(&cur, &(&mu - &b_j))?;
        let next = cur.intersect(&cur.translate(x.value()));
        debug_assert_eq!(next.measure(), &mu - &b_j);
        let after = defect_dprime(a, &next, &tau)?;
        steps.push(ReductionStep {
            j,
            b: b_j.clone(),
            x,
            cap,
            measure_after: next.measure(),
            dprime_before: dprime.clone(),
            doubling_holds: after <= int(2) * &dprime,
            dprime_after: after.clone(),
        });
        spent += b_j;
        dprime = after;
        cur = next;
    }
    Ok(Reduction { b_prime: cur, tau, d, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::BohrSet;
    use crate::circle::{from_arcs, star_arc};
    use crate::rational::rat;

    #[test]
    fn complement_preserves_defect() {
        let s = star_arc(&half());
        let (ac, bc, cc) = complement_transform(&s, &s, &s).unwrap();
        assert_eq!(ac.measure(), half());
        assert_eq!(defect_d(&ac, &bc, &cc), defect_d(&s, &s, &s));

        let bohr = |c: Rational, r: Rational| BohrSet::new(2, c, r).unwrap().to_set();
        let (a, b, c) = (bohr(rat(1, 5), rat(1, 6)), bohr(rat(1, 3), rat(1, 5)), bohr(rat(8, 15), rat(1, 4)));
        assert_eq!(defect_d(&a, &b, &c), zero());
        let (ac, bc, cc) = complement_transform(&a, &b, &c).unwrap();
        assert_eq!(defect_d(&ac, &bc, &cc), zero());

        let a = from_arcs(&[(rat(1, 10), rat(1, 9)), (rat(3, 5), rat(1, 8))]);
        let b = from_arcs(&[(rat(9, 10), rat(1, 6))]);
        let c = from_arcs(&[(rat(1, 3), rat(1, 20)), (rat(2, 3), rat(1, 7))]);
        let (ac, bc, cc) = complement_transform(&a, &b, &c).unwrap();
        assert_eq!(defect_d(&ac, &bc, &cc), defect_d(&a, &b, &c));

        let tiny = star_arc(&rat(1, 10));
        assert!(complement_transform(&tiny, &tiny, &s).is_err());
    }

    #[test]
    fn overlap_translate_examples() {
        let arc = star_arc(&rat(1, 3));
        assert_eq!(overlap_translate(&arc, &rat(1, 4)).unwrap(), CirclePoint::new(rat(1, 12)));
        assert_eq!(overlap_translate(&arc, &rat(1, 3)).unwrap(), CirclePoint::zero());
        let bohr = BohrSet::new(2, zero(), rat(1, 8)).unwrap().to_set();
        let x = overlap_translate(&bohr, &rat(1, 8)).unwrap();
        assert_eq!(x, CirclePoint::new(rat(1, 16)));
        assert!(overlap_translate(&arc, &rat(1, 20)).is_err());
    }

    #[test]
    fn equal_measures_need_no_steps() {
        let a = star_arc(&rat(1, 4));
        let r = reduce_to_equal(&a, &a, &a, &rat(1, 4)).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.b_prime, a);
    }

    #[test]
    fn arcs_reduce_exactly() {
        let a = star_arc(&rat(1, 4));
        let b = star_arc(&rat(3, 8));
        let c = star_arc(&rat(1, 4));
        let eta = rat(1, 4);
        let r = reduce_to_equal(&a, &b, &c, &eta).unwrap();
        assert_eq!(r.b_prime.measure(), rat(1, 4));
        assert!(r.b_prime.is_subset(&b));
        assert!(r.steps.iter().all(|s| s.doubling_holds));
        assert!(r.step_bound_holds(&eta));
        // d = 9/16 here, so the target cap binds at once
        assert_eq!(r.steps.len(), 1);
        assert_eq!((r.steps[0].b.clone(), r.steps[0].cap), (rat(1, 8), StepCap::Target));
    }

    #[test]
    fn hypotheses_are_named() {
        let a = star_arc(&rat(1, 4));
        let b = star_arc(&rat(1, 5));
        assert!(matches!(reduce_to_equal(&a, &b, &a, &rat(1, 4)), Err(Error::HypothesisViolated(_))));
    }
}

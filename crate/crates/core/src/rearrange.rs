//! Two-point rearrangement (polarization), iterated polarization towards the
//! symmetrized arc, and comparisons in the relaxed step-function setting.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::circle::{is_centered_arc, star_arc, CirclePoint, IntervalSet};
use crate::functionals::{pairing, rs_star_value};
use crate::piecewise::{convolve_indicator, convolve_step, StepFn};
use crate::rational::{fmt_rational, half, int, pow2_inv, zero, Rational};
use crate::{Error, Result};

/// Reflection `x ↦ 2a − x` together with the preferred half-circle
/// `H⁺ = (a, a + 1/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizationAxis {
    pub a: CirclePoint,
}

impl PolarizationAxis {
    pub fn new(a: Rational) -> Self {
        PolarizationAxis { a: CirclePoint::new(a) }
    }

    pub fn reflect_point(&self, x: &Rational) -> CirclePoint {
        CirclePoint::new(self.a.value() * int(2) - x)
    }

    pub fn reflect(&self, e: &IntervalSet) -> IntervalSet {
        e.negate().translate(&(self.a.value() * int(2)))
    }

    pub fn upper_half(&self) -> IntervalSet {
        IntervalSet::interval(self.a.value().clone(), self.a.value() + half())
    }
}

/// `E♯ = (E ∩ σE) ∪ ((E ∪ σE) ∩ H⁺)`.
pub fn polarize(e: &IntervalSet, axis: &PolarizationAxis) -> IntervalSet {
    let s = axis.reflect(e);
    let both = e.intersect(&s);
    let either = e.union(&s);
    both.union(&either.intersect(&axis.upper_half()))
}

/// One polarization of `A` and `B` with the same axis. Returns
/// `(A♯, B♯, gain)` where `gain` is the increase of `⟨1_A * 1_C, 1_B⟩`.
///
/// `C` must be a single arc centered at `0`; the pairing kernel `1_C(v − u)`
/// then depends only on the circular distance of `u` and `v`, so every axis
/// is allowed.
pub fn polarization_step(
    a: &IntervalSet,
    b: &IntervalSet,
    c: &IntervalSet,
    axis: &PolarizationAxis,
) -> Result<(IntervalSet, IntervalSet, Rational)> {
    if !is_centered_arc(c) {
        return Err(Error::AxisMismatch(alloc::format!("got {c}")));
    }
    let before = pairing(a, c, b);
    let a2 = polarize(a, axis);
    let b2 = polarize(b, axis);
    let after = pairing(&a2, c, &b2);
    Ok((a2, b2, after - before))
}

/// `min_y m(E Δ (E⋆ + y))` and the smallest minimizing `y`.
pub fn distance_to_star(e: &IntervalSet) -> (Rational, Rational) {
    let mu = e.measure();
    if mu.is_zero() {
        return (zero(), zero());
    }
    let (y, overlap) = convolve_indicator(e, &star_arc(&mu)).argmax();
    (int(2) * (mu - overlap), y)
}

/// Outcome of [`symmetrize_by_polarization`].
#[derive(Clone, Debug)]
pub struct SymmetrizeRun {
    pub final_set: IntervalSet,
    pub axes: Vec<PolarizationAxis>,
    /// `distance_to_star` before the first step and after each step.
    pub distances: Vec<Rational>,
    /// Center of the arc `E⋆ + y` closest to the final set.
    pub translate: Rational,
}

/// Components of `x` as `(left, right)` real endpoints, `right` possibly past 1.
fn components(x: &IntervalSet) -> Vec<(Rational, Rational)> {
    x.arcs().iter().map(|a| (a.left(), a.left() + a.length())).collect()
}

fn candidate_axes(e: &IntervalSet, y: &Rational, grid_bits: u32) -> Vec<Rational> {
    let target = star_arc(&e.measure()).translate(y);
    let p = components(&e.difference(&target));
    let q = components(&target.difference(e));
    let mut cands = Vec::new();
    for (p1, p2) in &p {
        for (q1, q2) in &q {
            cands.push((p2 + q1) / int(2));
            cands.push((p1 + q2) / int(2));
        }
    }
    for arc in e.arcs() {
        cands.push((arc.center().value() + y) / int(2));
    }
    let step = pow2_inv(grid_bits);
    let mut t = zero();
    while t < half() {
        cands.push(t.clone());
        t += &step;
    }
    // orient each axis so that the target arc is already polarized
    let mut out: Vec<Rational> = cands
        .into_iter()
        .map(|a| {
            let a = crate::rational::frac(&a);
            let off = crate::rational::frac(&(y - &a));
            if off <= half() { a } else { crate::rational::frac(&(a + half())) }
        })
        .collect();
    crate::rational::sort_dedup(&mut out);
    out
}

/// Greedy iterated polarization until `m(E Δ (E⋆ + y)) <= tol` for some `y`.
pub fn symmetrize_by_polarization(e: &IntervalSet, tol: &Rational, max_steps: usize) -> Result<SymmetrizeRun> {
    let mut cur = e.clone();
    let (mut dist, mut y) = distance_to_star(&cur);
    let mut axes = Vec::new();
    let mut distances = alloc::vec![dist.clone()];
    while dist > *tol {
        if axes.len() >= max_steps {
            return Err(Error::MaxStepsExceeded(max_steps));
        }
        let mut best: Option<(Rational, Rational, IntervalSet, Rational)> = None;
        for a in candidate_axes(&cur, &y, 4) {
            let axis = PolarizationAxis::new(a.clone());
            let next = polarize(&cur, &axis);
            let (d, ny) = distance_to_star(&next);
            if best.as_ref().is_none_or(|b| d < b.0) {
                best = Some((d, a, next, ny));
            }
        }
        let (d, a, next, ny) = best.expect("candidate list is never empty");
        if d >= dist {
            return Err(Error::MaxStepsExceeded(axes.len()));
        }
        axes.push(PolarizationAxis::new(a));
        cur = next;
        dist = d;
        y = ny;
        distances.push(dist.clone());
    }
    Ok(SymmetrizeRun { final_set: cur, axes, distances, translate: y })
}

/// `𝒯(f1, f2, f3) = ⟨f1 * f2, f3(−·)⟩` for step functions.
pub fn triple_functional_step(f1: &StepFn, f2: &StepFn, f3: &StepFn) -> Result<Rational> {
    Ok(convolve_step(f1, f2)?.integrate_against(&f3.reflect()))
}

/// `⟨1_{A⋆} * 1_{B⋆}, 1_{C⋆}⟩ − ⟨f * g, h⟩` with star lengths `∫f, ∫g, ∫h`.
pub fn relaxed_defect(f: &StepFn, g: &StepFn, h: &StepFn) -> Result<Rational> {
    h.check_relaxed("h")?;
    let actual = convolve_step(f, g)?.integrate_against(h);
    Ok(rs_star_value(&f.integral(), &g.integral(), &h.integral())? - actual)
}

/// `𝒯(1_I, f2, f3) − 𝒯(f1, f2, f3)` with `I` the centered arc of length
/// `∫f1`. All inputs must be symmetric nonincreasing with values in `[0, 1]`.
pub fn hl_compare(f1: &StepFn, f2: &StepFn, f3: &StepFn) -> Result<Rational> {
    for (name, f) in [("f1", f1), ("f2", f2), ("f3", f3)] {
        f.check_relaxed(name)?;
        if !f.is_symmetric_nonincreasing() {
            return Err(Error::Shape(alloc::format!("{name} = {:?}", f.values().iter().map(fmt_rational).collect::<Vec<_>>())));
        }
    }
    let i = StepFn::indicator(&star_arc(&f1.integral()));
    Ok(triple_functional_step(&i, f2, f3)? - triple_functional_step(f1, f2, f3)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::from_arcs;
    use crate::rational::{one, rat};

    fn iv(l: (i64, i64), r: (i64, i64)) -> IntervalSet {
        IntervalSet::interval(rat(l.0, l.1), rat(r.0, r.1))
    }

    #[test]
    fn polarize_examples() {
        let axis = PolarizationAxis::new(zero());
        let up = iv((1, 8), (3, 8));
        assert_eq!(polarize(&up, &axis), up);
        assert_eq!(polarize(&iv((-3, 8), (-1, 8)), &axis), up);
        let sym = star_arc(&rat(1, 3));
        assert_eq!(polarize(&sym, &axis), sym);
    }

    #[test]
    fn polarization_step_examples() {
        let q = iv((0, 1), (1, 4));
        let c = star_arc(&rat(1, 4));
        let (a2, b2, gain) = polarization_step(&q, &q, &c, &PolarizationAxis::new(rat(1, 8))).unwrap();
        assert_eq!((a2, b2, gain), (q.clone(), q.clone(), zero()));

        let a = iv((-3, 8), (-1, 8));
        let b = iv((1, 8), (3, 8));
        let (a2, _, gain) = polarization_step(&a, &b, &c, &PolarizationAxis::new(zero())).unwrap();
        assert_eq!(a2, b);
        assert!(gain > zero());

        let off = IntervalSet::arc(rat(1, 5), rat(1, 8));
        assert!(matches!(polarization_step(&a, &b, &off, &PolarizationAxis::new(zero())), Err(Error::AxisMismatch(_))));
    }

    #[test]
    fn symmetrize_examples() {
        let arc = IntervalSet::arc(rat(2, 7), rat(1, 9));
        let run = symmetrize_by_polarization(&arc, &zero(), 10).unwrap();
        assert!(run.axes.is_empty());
        assert_eq!(run.final_set, arc);

        let two = from_arcs(&[(zero(), rat(1, 16)), (half(), rat(1, 16))]);
        let run = symmetrize_by_polarization(&two, &rat(1, 1_000_000), 100).unwrap();
        assert!(run.distances.windows(2).all(|w| w[1] <= w[0]));
        let target = star_arc(&rat(1, 4)).translate(&run.translate);
        assert!(run.final_set.symdiff(&target).measure() <= rat(1, 1_000_000));
    }

    #[test]
    fn relaxed_examples() {
        let s = star_arc(&rat(1, 3));
        let i = StepFn::indicator(&s);
        assert_eq!(relaxed_defect(&i, &i, &i).unwrap(), zero());
        let q = StepFn::constant(rat(1, 4));
        assert_eq!(relaxed_defect(&q, &q, &q).unwrap(), rat(1, 32));
        let a = from_arcs(&[(rat(1, 10), rat(1, 9)), (rat(3, 5), rat(1, 4))]);
        let b = from_arcs(&[(rat(9, 10), rat(1, 6))]);
        let c = from_arcs(&[(rat(1, 3), rat(1, 20))]);
        assert_eq!(
            relaxed_defect(&StepFn::indicator(&a), &StepFn::indicator(&b), &StepFn::indicator(&c)).unwrap(),
            crate::functionals::defect_d(&a, &b, &c)
        );
    }

    #[test]
    fn hl_examples() {
        let i = StepFn::indicator(&star_arc(&rat(1, 3)));
        let g = StepFn::indicator(&star_arc(&half()));
        assert_eq!(hl_compare(&i, &g, &g).unwrap(), zero());
        let d = hl_compare(&StepFn::constant(half()), &g, &g).unwrap();
        assert!(d > zero());
        assert_eq!(hl_compare(&StepFn::constant(half()), &StepFn::constant(one()), &g).unwrap(), zero());
        let bad = StepFn::indicator(&iv((1, 8), (3, 8)));
        assert!(matches!(hl_compare(&bad, &g, &g), Err(Error::Shape(_))));
    }
}

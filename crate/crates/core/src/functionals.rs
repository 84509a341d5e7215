//! Scalar functionals: the trilinear form, Riesz-Sobolev and truncated
//! defects, Kneser defect, admissibility and the sharpened level-set bound.

use alloc::string::String;

use num_traits::Signed;

use crate::circle::{star_arc, sumset0, IntervalSet};
use crate::piecewise::{convolve_indicator, integrate_over};
use crate::rational::{fmt_rational, int, max_r, min_r, one, zero, Rational};
use crate::{Error, Result};

/// `𝒯(E1, E2, E3) = ⟨1_E1 * 1_E2, 1_{-E3}⟩`.
pub fn triple_functional(e1: &IntervalSet, e2: &IntervalSet, e3: &IntervalSet) -> Rational {
    integrate_over(&convolve_indicator(e1, e2), &e3.negate())
}

/// `∫_C 1_A * 1_B`.
pub fn pairing(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet) -> Rational {
    integrate_over(&convolve_indicator(a, b), c)
}

fn check_unit(name: &str, x: &Rational) -> Result<()> {
    if x.is_negative() || *x > one() {
        return Err(Error::Range(alloc::format!("{name} = {} not in [0, 1]", fmt_rational(x))));
    }
    Ok(())
}

/// `⟨1_{A⋆} * 1_{B⋆}, 1_{C⋆}⟩` for centered arcs of lengths `a, b, c`,
/// evaluated by exact convolution.
pub fn rs_star_value(a: &Rational, b: &Rational, c: &Rational) -> Result<Rational> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    check_unit("c", c)?;
    Ok(pairing(&star_arc(a), &star_arc(b), &star_arc(c)))
}

/// The same quantity from its closed forms, regime by regime.
pub fn rs_star_closed_form(a: &Rational, b: &Rational, c: &Rational) -> Rational {
    let ab = a * b;
    if *c <= (a - b).abs() {
        c * min_r(a, b)
    } else if a + b + c >= int(2) {
        ab - (a + b - one()) * (one() - c)
    } else if *c >= a + b {
        ab
    } else {
        let t = a + b - c;
        ab - &t * &t / int(4)
    }
}

/// `𝒟(A, B, C) = ∫_{C⋆} 1_{A⋆} * 1_{B⋆} − ∫_C 1_A * 1_B`.
pub fn defect_d(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet) -> Rational {
    let star = pairing(&star_arc(&a.measure()), &star_arc(&b.measure()), &star_arc(&c.measure()));
    star - pairing(a, b, c)
}

/// `𝒟′(A, B, τ) = ∫ max(1_{A⋆} * 1_{B⋆} − τ, 0) − ∫ max(1_A * 1_B − τ, 0)`.
pub fn defect_dprime(a: &IntervalSet, b: &IntervalSet, tau: &Rational) -> Result<Rational> {
    if tau.is_negative() {
        return Err(Error::Range(alloc::format!("tau = {} is negative", fmt_rational(tau))));
    }
    let star = convolve_indicator(&star_arc(&a.measure()), &star_arc(&b.measure()));
    let actual = convolve_indicator(a, b);
    Ok(star.truncated_integrals(tau).1 - actual.truncated_integrals(tau).1)
}

/// `τ_C = (a + b − c) / 2`.
pub fn tau_c(a: &Rational, b: &Rational, c: &Rational) -> Result<Rational> {
    if *c > a + b {
        return Err(Error::Range(alloc::format!(
            "c = {} exceeds a + b = {}",
            fmt_rational(c),
            fmt_rational(&(a + b))
        )));
    }
    Ok((a + b - c) / int(2))
}

/// `μ(A +₀ B) − min(μA + μB, 1)`.
pub fn kneser_defect(a: &IntervalSet, b: &IntervalSet) -> Result<Rational> {
    let s = sumset0(a, b)?;
    Ok(s.measure() - min_r(&(a.measure() + b.measure()), &one()))
}

/// Admissibility predicates for a measure triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub measures: [Rational; 3],
    pub admissible: bool,
    pub strictly_admissible: bool,
    /// Largest `η` with `μ_k <= μ_i + μ_j − η·max` for all permutations, or 0
    /// when the triple is not admissible.
    pub eta_strict: Rational,
    pub sum: Rational,
}

impl AdmissibilityReport {
    pub fn eta_strictly_admissible(&self, eta: &Rational) -> bool {
        self.admissible && eta.is_positive() && *eta <= self.eta_strict
    }

    /// `Σμ <= 2 − η` and `min μ >= η`.
    pub fn eta_bounded(&self, eta: &Rational) -> bool {
        let min = self.measures.iter().min().unwrap();
        self.sum <= int(2) - eta && min >= eta
    }

    /// First violated predicate, for error messages.
    pub fn violation(&self) -> Option<String> {
        let [a, b, c] = &self.measures;
        for (name, m) in [("mu(A)", a), ("mu(B)", b), ("mu(C)", c)] {
            if !m.is_positive() || *m >= one() {
                return Some(alloc::format!("{name} = {} not in (0, 1)", fmt_rational(m)));
            }
        }
        if self.sum >= int(2) {
            return Some(alloc::format!("measure sum {} is not below 2", fmt_rational(&self.sum)));
        }
        for (k, i, j) in [(a, b, c), (b, a, c), (c, a, b)] {
            if *k > i + j {
                return Some(alloc::format!(
                    "{} exceeds {} + {}",
                    fmt_rational(k),
                    fmt_rational(i),
                    fmt_rational(j)
                ));
            }
        }
        None
    }
}

pub fn admissibility(a: &Rational, b: &Rational, c: &Rational) -> AdmissibilityReport {
    let sum = a + b + c;
    let in_range = [a, b, c].iter().all(|m| m.is_positive() && **m < one());
    let slacks = [b + c - a, a + c - b, a + b - c];
    let min_slack = slacks.iter().min().unwrap().clone();
    let admissible = in_range && sum < int(2) && !min_slack.is_negative();
    let strictly_admissible = admissible && min_slack.is_positive();
    let mx = max_r(&max_r(a, b), c);
    let eta_strict = if admissible { &min_slack / mx } else { zero() };
    AdmissibilityReport {
        measures: [a.clone(), b.clone(), c.clone()],
        admissible,
        strictly_admissible,
        eta_strict,
        sum,
    }
}

/// Bound `∫ max(1_A*1_B − τ, 0) <= (a − τ)(b − τ) − h` given `s = μ(S(τ))`.
/// Returns `(rhs, h)`.
pub fn sharpened_bound(a: &Rational, b: &Rational, tau: &Rational, s: &Rational) -> Result<(Rational, Rational)> {
    let mn = min_r(a, b);
    if tau.is_negative() || *tau > mn {
        return Err(Error::HypothesisViolated(alloc::format!(
            "tau = {} not in [0, min(a, b)]",
            fmt_rational(tau)
        )));
    }
    if a + b + s > int(2) {
        return Err(Error::HypothesisViolated("a + b + s exceeds 2".into()));
    }
    // The bound is false for σ < 0: at τ = 0 it would claim ab ≤ ab − σ².
    if *s > a + b {
        return Err(Error::HypothesisViolated("s exceeds a + b (sigma < 0)".into()));
    }
    let sigma = (a + b - s) / int(2);
    let h = if sigma <= mn {
        let d = &sigma - tau;
        &d * &d
    } else {
        let d = &mn - tau;
        &d * &d
    };
    let rhs = (a - tau) * (b - tau) - &h;
    Ok((rhs, h))
}

/// The level-set bound `μAμB − ¼(μA + μB − μC)²`.
pub fn level_set_bound(a: &Rational, b: &Rational, c: &Rational) -> Rational {
    let t = a + b - c;
    a * b - &t * &t / int(4)
}

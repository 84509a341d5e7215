//! Interval-growth flow: every arc grows about its fixed center by the factor
//! `s` (the exponential of the flow time), and arcs that touch merge into one
//! arc which keeps growing about its own center.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::circle::{from_arcs, sumset0, IntervalSet};
use crate::functionals::{defect_d, triple_functional};
use crate::rational::{fmt_rational, frac, from_f64_dyadic, half, min_r, one, to_f64, Rational};
use crate::{Error, Result};

/// A set at the start of a flow stage: arcs keep their centers until the
/// next collision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowState {
    pub arcs: IntervalSet,
    pub stage_start_scale: Rational,
    pub original_measure: Rational,
}

impl FlowState {
    pub fn new(e: &IntervalSet) -> Self {
        FlowState { arcs: e.clone(), stage_start_scale: one(), original_measure: e.measure() }
    }
}

/// `1 / m(E)`: the scale at which the flow fills the circle.
pub fn terminal_scale(e: &IntervalSet) -> Result<Rational> {
    let m = e.measure();
    if m.is_zero() {
        return Err(Error::EmptyInput("flow of an empty set"));
    }
    Ok(m.recip())
}

/// Smallest stage ratio `σ > 1` at which two neighbouring arcs touch, or
/// `None` when there is at most one arc.
fn collision_ratio(e: &IntervalSet) -> Option<Rational> {
    let arcs = e.arcs();
    let k = arcs.len();
    if k < 2 {
        return None;
    }
    let mut best: Option<Rational> = None;
    for i in 0..k {
        let a = &arcs[i];
        let b = &arcs[(i + 1) % k];
        let right = a.left() + a.length();
        let gap = frac(&(b.left() - right));
        let r = one() + gap / (a.halfwidth() + b.halfwidth());
        if best.as_ref().is_none_or(|x| r < *x) {
            best = Some(r);
        }
    }
    best
}

/// Every arc scaled about its center by `r`.
fn grow(e: &IntervalSet, r: &Rational) -> IntervalSet {
    let pairs: Vec<(Rational, Rational)> =
        e.arcs().iter().map(|a| (a.center().value().clone(), a.halfwidth() * r)).collect();
    from_arcs(&pairs)
}

/// Scale of the next collision and the merged state right after it.
pub fn next_collision(state: &FlowState) -> (Option<Rational>, FlowState) {
    match collision_ratio(&state.arcs) {
        None => (None, state.clone()),
        Some(r) => {
            let scale = &state.stage_start_scale * &r;
            let merged = FlowState {
                arcs: grow(&state.arcs, &r),
                stage_start_scale: scale.clone(),
                original_measure: state.original_measure.clone(),
            };
            (Some(scale), merged)
        }
    }
}

/// `E(s)` for `1 <= s <= 1/m(E)`.
pub fn flow_to_scale(e: &IntervalSet, s: &Rational) -> Result<IntervalSet> {
    let terminal = terminal_scale(e)?;
    if *s < one() || *s > terminal {
        return Err(Error::ScaleOutOfRange(alloc::format!(
            "{} not in [1, {}]",
            fmt_rational(s),
            fmt_rational(&terminal)
        )));
    }
    Ok(advance(&FlowState::new(e), s))
}

fn advance(start: &FlowState, s: &Rational) -> IntervalSet {
    let mut state = start.clone();
    loop {
        if state.arcs.is_full() {
            return state.arcs;
        }
        let ratio = s / &state.stage_start_scale;
        match collision_ratio(&state.arcs) {
            Some(r) if r <= ratio => {
                let (_, next) = next_collision(&state);
                state = next;
            }
            _ => {
                // a lone arc may reach the whole circle
                let arcs = &state.arcs;
                if arcs.len() == 1 && arcs.arcs()[0].halfwidth() * &ratio >= half() {
                    return IntervalSet::full();
                }
                return grow(arcs, &ratio);
            }
        }
    }
}

/// One row of a flow trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowTraceRow {
    pub s: Rational,
    pub m: [Rational; 3],
    /// `𝒯(E1(s), E2(s), E3(s)) / s²`.
    pub t_norm: Rational,
    /// `m(E1(s) +₀ E2(s)) / s`.
    pub sum_norm: Rational,
    /// `𝒟(E1(s), E2(s), E3(s)) / s²`.
    pub d_norm: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowTrace {
    pub rows: Vec<FlowTraceRow>,
    /// Number of leading rows with `m1 + m2 + m3 <= 2`.
    pub window: usize,
}

/// Exact trace of the three flows over an increasing grid of scales.
pub fn flow_trace(e1: &IntervalSet, e2: &IntervalSet, e3: &IntervalSet, grid: &[Rational]) -> Result<FlowTrace> {
    let sets = [e1, e2, e3];
    let mut terminal = terminal_scale(e1)?;
    for e in &sets[1..] {
        terminal = min_r(&terminal, &terminal_scale(e)?);
    }
    for (i, s) in grid.iter().enumerate() {
        if *s < one() || *s > terminal || (i > 0 && *s <= grid[i - 1]) {
            return Err(Error::ScaleOutOfRange(alloc::format!(
                "grid point {} must increase within [1, {}]",
                fmt_rational(s),
                fmt_rational(&terminal)
            )));
        }
    }
    let rows: Vec<FlowTraceRow> = grid.iter().map(|s| trace_row(&sets, s)).collect::<Result<_>>()?;
    let two = Rational::from_integer(2.into());
    let window = rows.iter().take_while(|r| &r.m[0] + &r.m[1] + &r.m[2] <= two).count();
    Ok(FlowTrace { rows, window })
}

/// A single trace row; `s` must be within every set's range.
pub fn trace_row(sets: &[&IntervalSet; 3], s: &Rational) -> Result<FlowTraceRow> {
    let f = [flow_to_scale(sets[0], s)?, flow_to_scale(sets[1], s)?, flow_to_scale(sets[2], s)?];
    let s2 = s * s;
    Ok(FlowTraceRow {
        s: s.clone(),
        m: [f[0].measure(), f[1].measure(), f[2].measure()],
        t_norm: triple_functional(&f[0], &f[1], &f[2]) / &s2,
        sum_norm: sumset0(&f[0], &f[1])?.measure() / s,
        d_norm: defect_d(&f[0], &f[1], &f[2]) / &s2,
    })
}

/// Translation and reflection equivariance of the flow at scale `s`.
pub fn flow_equivariance_check(e: &IntervalSet, y: &Rational, s: &Rational) -> Result<bool> {
    let base = flow_to_scale(e, s)?;
    let shifted = flow_to_scale(&e.translate(y), s)?;
    let reflected = flow_to_scale(&e.negate(), s)?;
    Ok(shifted == base.translate(y) && reflected == base.negate())
}

/// `n` increasing scales from `1` to `end` spaced roughly geometrically.
/// Interior points are dyadic rationals; both ends are exact.
pub fn geometric_grid(end: &Rational, n: usize) -> Vec<Rational> {
    if n <= 1 || *end <= one() {
        return alloc::vec![one()];
    }
    let top = to_f64(end);
    let mut grid = alloc::vec![Rational::one()];
    for i in 1..n - 1 {
        let x = libm::pow(top, i as f64 / (n - 1) as f64);
        let q = from_f64_dyadic(x, 24);
        if q > *grid.last().unwrap() && q < *end && q.is_positive() {
            grid.push(q);
        }
    }
    grid.push(end.clone());
    grid
}

//! Exact piecewise-constant ([`StepFn`]) and continuous piecewise-linear
//! ([`PLFn`]) functions on the circle.
//!
//! Convolving two step functions gives a sum of periodized trapezoids, one per
//! pair of pieces. We collect the second-derivative events of every trapezoid,
//! compute the value and right slope at `0` directly, and sweep.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::circle::{CirclePoint, IntervalSet};
use crate::rational::{frac, int, max_r, min_r, one, zero, Rational};
use crate::{Error, Result};

/// Piecewise-constant function. `values[i]` holds on
/// `[breakpoints[i], breakpoints[i+1])`, the last piece wrapping around to the
/// first breakpoint. A constant has no breakpoints and a single value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepFn {
    breakpoints: Vec<CirclePoint>,
    values: Vec<Rational>,
}

/// Continuous piecewise-linear function, linear between consecutive
/// breakpoints (cyclically). A constant has no breakpoints and one node value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PLFn {
    breakpoints: Vec<CirclePoint>,
    node_values: Vec<Rational>,
}

fn two() -> Rational {
    int(2)
}

/// Splits the real interval `[l, r]` (with `r - l <= 1`) into segments of
/// `[0, 1]`.
fn real_to_segments(l: &Rational, r: &Rational, out: &mut Vec<(Rational, Rational)>) {
    if r <= l {
        return;
    }
    if r - l >= one() {
        out.push((zero(), one()));
        return;
    }
    let a = frac(l);
    let b = &a + (r - l);
    if b > one() {
        out.push((a, one()));
        out.push((zero(), b - one()));
    } else {
        out.push((a, b));
    }
}

impl StepFn {
    pub fn constant(v: Rational) -> Self {
        StepFn { breakpoints: Vec::new(), values: alloc::vec![v] }
    }

    pub fn indicator(s: &IntervalSet) -> Self {
        Self::scaled_indicator(s, one())
    }

    pub fn scaled_indicator(s: &IntervalSet, v: Rational) -> Self {
        let pieces = s.segments().into_iter().map(|(l, r)| (l, r, v.clone())).collect();
        Self::from_segments(pieces)
    }

    /// Function equal to `v` on each segment `[l, r] ⊂ [0, 1]` and `0`
    /// elsewhere. Segments must be pairwise disjoint up to endpoints.
    pub fn from_segments(mut segs: Vec<(Rational, Rational, Rational)>) -> Self {
        segs.retain(|(l, r, _)| l < r);
        segs.sort();
        let mut xs = Vec::with_capacity(2 * segs.len() + 1);
        let mut vs = Vec::with_capacity(2 * segs.len() + 1);
        let mut cursor = zero();
        for (l, r, v) in segs {
            if l > cursor {
                xs.push(cursor.clone());
                vs.push(zero());
            }
            xs.push(l);
            vs.push(v);
            cursor = r;
        }
        if cursor < one() {
            xs.push(cursor);
            vs.push(zero());
        }
        Self::from_table(xs, vs)
    }

    /// Canonical form from a partition `0 = xs[0] < xs[1] < ... < 1` with
    /// `vs[i]` on `[xs[i], xs[i+1])`.
    pub(crate) fn from_table(xs: Vec<Rational>, vs: Vec<Rational>) -> Self {
        debug_assert_eq!(xs.len(), vs.len());
        let n = vs.len();
        if n == 0 {
            return StepFn::constant(zero());
        }
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        for i in 0..n {
            let prev = &vs[(i + n - 1) % n];
            if vs[i] != *prev {
                breakpoints.push(CirclePoint::new(xs[i].clone()));
                values.push(vs[i].clone());
            }
        }
        if breakpoints.is_empty() {
            return StepFn::constant(vs[0].clone());
        }
        StepFn { breakpoints, values }
    }

    pub fn breakpoints(&self) -> &[CirclePoint] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Partition of `[0, 1)` as `(left, right, value)` pieces starting at 0.
    pub fn pieces(&self) -> Vec<(Rational, Rational, Rational)> {
        if self.breakpoints.is_empty() {
            return alloc::vec![(zero(), one(), self.values[0].clone())];
        }
        let n = self.breakpoints.len();
        let mut out = Vec::with_capacity(n + 1);
        let first = self.breakpoints[0].value().clone();
        let last_v = self.values[n - 1].clone();
        if !first.is_zero() {
            out.push((zero(), first, last_v.clone()));
        }
        for i in 0..n {
            let l = self.breakpoints[i].value().clone();
            let r = if i + 1 < n { self.breakpoints[i + 1].value().clone() } else { one() };
            out.push((l, r, self.values[i].clone()));
        }
        out
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let x = frac(x);
        if self.breakpoints.is_empty() {
            return self.values[0].clone();
        }
        let idx = self.breakpoints.partition_point(|b| *b.value() <= x);
        if idx == 0 {
            self.values[self.values.len() - 1].clone()
        } else {
            self.values[idx - 1].clone()
        }
    }

    pub fn integral(&self) -> Rational {
        self.pieces().into_iter().fold(zero(), |acc, (l, r, v)| acc + (r - l) * v)
    }

    pub fn min_value(&self) -> Rational {
        self.values.iter().min().cloned().unwrap_or_else(zero)
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(zero)
    }

    /// `0 <= f <= 1` everywhere.
    pub fn is_relaxed(&self) -> bool {
        !self.min_value().is_negative() && self.max_value() <= one()
    }

    pub(crate) fn check_relaxed(&self, what: &str) -> Result<()> {
        if self.is_relaxed() {
            Ok(())
        } else {
            Err(Error::Range(alloc::format!("{what} takes values outside [0, 1]")))
        }
    }

    /// Measure of `{f > t}`.
    pub fn superlevel_measure(&self, t: &Rational) -> Rational {
        self.pieces()
            .into_iter()
            .filter(|(_, _, v)| v > t)
            .fold(zero(), |acc, (l, r, _)| acc + r - l)
    }

    /// `{f > t}` as an arc union.
    pub fn superlevel(&self, t: &Rational) -> IntervalSet {
        IntervalSet::from_segments(
            self.pieces().into_iter().filter(|(_, _, v)| v > t).map(|(l, r, _)| (l, r)).collect(),
        )
    }

    /// `x ↦ f(-x)`.
    pub fn reflect(&self) -> StepFn {
        let pieces = self.pieces();
        let mut segs = Vec::with_capacity(pieces.len() + 1);
        for (l, r, v) in pieces {
            segs.push((one() - r, one() - l, v));
        }
        let mut xs: Vec<(Rational, Rational, Rational)> = segs;
        xs.sort();
        let (a, b): (Vec<_>, Vec<_>) = xs.into_iter().map(|(l, _, v)| (l, v)).unzip();
        StepFn::from_table(a, b)
    }

    pub fn scale(&self, k: &Rational) -> StepFn {
        let pieces = self.pieces();
        let (xs, vs) = pieces.into_iter().map(|(l, _, v)| (l, v * k)).unzip();
        StepFn::from_table(xs, vs)
    }

    /// Symmetric nonincreasing step function: even, with values nonincreasing
    /// in `‖x‖`.
    pub fn is_symmetric_nonincreasing(&self) -> bool {
        if *self != self.reflect() {
            return false;
        }
        // walking from 0 to 1/2 the values must never increase
        let mut last: Option<Rational> = None;
        for (l, _, v) in self.pieces() {
            if l >= crate::rational::half() {
                break;
            }
            if let Some(p) = &last {
                if v > *p {
                    return false;
                }
            }
            last = Some(v);
        }
        true
    }
}

/// Convolution of two step functions.
pub fn convolve_step(f: &StepFn, g: &StepFn) -> Result<PLFn> {
    f.check_relaxed("first factor")?;
    g.check_relaxed("second factor")?;
    Ok(convolve_pieces(&step_pieces(f), &step_pieces(g)))
}

/// `1_A * 1_B`.
pub fn convolve_indicator(a: &IntervalSet, b: &IntervalSet) -> PLFn {
    convolve_pieces(&set_pieces(a), &set_pieces(b))
}

/// `(left, length, weight)` for every arc.
fn set_pieces(s: &IntervalSet) -> Vec<(Rational, Rational, Rational)> {
    s.arcs().iter().map(|a| (a.left(), a.length(), one())).collect()
}

fn step_pieces(f: &StepFn) -> Vec<(Rational, Rational, Rational)> {
    f.pieces().into_iter().filter(|(_, _, v)| !v.is_zero()).map(|(l, r, v)| (l.clone(), r - l, v)).collect()
}

fn ramp(u: Rational) -> Rational {
    if u.is_positive() { u } else { zero() }
}

fn convolve_pieces(p: &[(Rational, Rational, Rational)], q: &[(Rational, Rational, Rational)]) -> PLFn {
    let mut v0 = zero();
    let mut slope0 = zero();
    let mut events: BTreeMap<Rational, Rational> = BTreeMap::new();
    for (l1, len1, w1) in p {
        for (l2, len2, w2) in q {
            let w = w1 * w2;
            let s0 = l1 + l2;
            let (mn, mx) = if len1 <= len2 { (len1, len2) } else { (len2, len1) };
            let knots = [
                (s0.clone(), w.clone()),
                (&s0 + mn, -w.clone()),
                (&s0 + mx, -w.clone()),
                (&s0 + len1 + len2, w.clone()),
            ];
            for k in 0..4i64 {
                let t = int(k);
                for (pos, wt) in &knots {
                    v0 += wt * ramp(&t - pos);
                    if t >= *pos {
                        slope0 += wt;
                    }
                }
            }
            for (pos, wt) in knots {
                let x = frac(&pos);
                if !x.is_zero() {
                    *events.entry(x).or_insert_with(zero) += wt;
                }
            }
        }
    }
    let mut xs = alloc::vec![zero()];
    let mut vs = alloc::vec![v0.clone()];
    let mut x = zero();
    let mut v = v0;
    let mut slope = slope0;
    for (pos, dw) in events {
        if dw.is_zero() {
            continue;
        }
        v += &slope * (&pos - &x);
        x = pos;
        slope += dw;
        xs.push(x.clone());
        vs.push(v.clone());
    }
    let v_end = &v + &slope * (one() - &x);
    debug_assert_eq!(v_end, vs[0]);
    xs.push(one());
    vs.push(v_end);
    PLFn::from_table(xs, vs)
}

impl PLFn {
    pub fn constant(v: Rational) -> Self {
        PLFn { breakpoints: Vec::new(), node_values: alloc::vec![v] }
    }

    /// Canonical form from nodes `0 = xs[0] < ... < xs[n-1] = 1` with
    /// `vs[n-1] == vs[0]`; collinear nodes are dropped.
    pub(crate) fn from_table(xs: Vec<Rational>, vs: Vec<Rational>) -> Self {
        let n = xs.len() - 1;
        debug_assert!(n >= 1 && xs[0].is_zero() && xs[n] == one());
        let slope = |i: usize| (&vs[i + 1] - &vs[i]) / (&xs[i + 1] - &xs[i]);
        let slopes: Vec<Rational> = (0..n).map(slope).collect();
        let mut breakpoints = Vec::new();
        let mut node_values = Vec::new();
        for i in 0..n {
            let left = &slopes[(i + n - 1) % n];
            if *left != slopes[i] {
                breakpoints.push(CirclePoint::new(xs[i].clone()));
                node_values.push(vs[i].clone());
            }
        }
        if breakpoints.is_empty() {
            return PLFn::constant(vs[0].clone());
        }
        PLFn { breakpoints, node_values }
    }

    pub fn breakpoints(&self) -> &[CirclePoint] {
        &self.breakpoints
    }

    pub fn node_values(&self) -> &[Rational] {
        &self.node_values
    }

    /// Nodes covering `[0, 1]`: `0`, every breakpoint and `1`.
    pub fn table(&self) -> (Vec<Rational>, Vec<Rational>) {
        if self.breakpoints.is_empty() {
            let v = self.node_values[0].clone();
            return (alloc::vec![zero(), one()], alloc::vec![v.clone(), v]);
        }
        let mut xs = Vec::with_capacity(self.breakpoints.len() + 2);
        let mut vs = Vec::with_capacity(self.breakpoints.len() + 2);
        let v0 = self.eval(&zero());
        if !self.breakpoints[0].value().is_zero() {
            xs.push(zero());
            vs.push(v0.clone());
        }
        for (b, v) in self.breakpoints.iter().zip(&self.node_values) {
            xs.push(b.value().clone());
            vs.push(v.clone());
        }
        xs.push(one());
        vs.push(v0);
        (xs, vs)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        if self.breakpoints.is_empty() {
            return self.node_values[0].clone();
        }
        let x = frac(x);
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|b| *b.value() <= x);
        // segment from node i to node j (cyclic)
        let (i, j) = if idx == 0 { (n - 1, 0) } else { (idx - 1, idx % n) };
        let xi = self.breakpoints[i].value().clone();
        let mut xj = self.breakpoints[j].value().clone();
        let mut xx = x;
        if xj <= xi {
            xj += one();
        }
        if xx < xi {
            xx += one();
        }
        let vi = &self.node_values[i];
        let vj = &self.node_values[j];
        vi + (vj - vi) * (xx - &xi) / (xj - &xi)
    }

    pub fn max_value(&self) -> Rational {
        self.node_values.iter().max().cloned().unwrap()
    }

    pub fn min_value(&self) -> Rational {
        self.node_values.iter().min().cloned().unwrap()
    }

    /// Smallest node `x` in `[0, 1)` where the maximum is attained, with the
    /// maximum.
    pub fn argmax(&self) -> (Rational, Rational) {
        let (xs, vs) = self.table();
        let mut best = (xs[0].clone(), vs[0].clone());
        for (x, v) in xs.into_iter().zip(vs).take_while(|(x, _)| *x < one()) {
            if v > best.1 {
                best = (x, v);
            }
        }
        best
    }

    pub fn integral(&self) -> Rational {
        let (xs, vs) = self.table();
        let mut acc = zero();
        for i in 0..xs.len() - 1 {
            acc += (&xs[i + 1] - &xs[i]) * (&vs[i] + &vs[i + 1]) / two();
        }
        acc
    }

    /// `∫_l^r φ` for `0 <= l <= r <= 1`.
    pub fn integral_between(&self, l: &Rational, r: &Rational) -> Rational {
        if r <= l {
            return zero();
        }
        let (xs, vs) = self.table();
        let mut acc = zero();
        for i in 0..xs.len() - 1 {
            let a = max_r(&xs[i], l);
            let b = min_r(&xs[i + 1], r);
            if a < b {
                acc += (&b - &a) * (self.eval(&a) + self.eval_in_piece(&xs, &vs, i, &b)) / two();
            }
        }
        acc
    }

    fn eval_in_piece(&self, xs: &[Rational], vs: &[Rational], i: usize, x: &Rational) -> Rational {
        &vs[i] + (&vs[i + 1] - &vs[i]) * (x - &xs[i]) / (&xs[i + 1] - &xs[i])
    }

    /// `∫ φ · h`.
    pub fn integrate_against(&self, h: &StepFn) -> Rational {
        let mut acc = zero();
        for (l, r, v) in h.pieces() {
            if !v.is_zero() {
                acc += v * self.integral_between(&l, &r);
            }
        }
        acc
    }

    /// `{φ > t}`, open region; flat pieces at level `t` are excluded.
    pub fn superlevel(&self, t: &Rational) -> IntervalSet {
        let (xs, vs) = self.table();
        let mut segs = Vec::new();
        for i in 0..xs.len() - 1 {
            let (x0, x1, v0, v1) = (&xs[i], &xs[i + 1], &vs[i], &vs[i + 1]);
            let above0 = v0 > t;
            let above1 = v1 > t;
            if above0 && above1 {
                segs.push((x0.clone(), x1.clone()));
            } else if above0 || above1 {
                let cross = x0 + (x1 - x0) * (t - v0) / (v1 - v0);
                if above0 {
                    segs.push((x0.clone(), cross));
                } else {
                    segs.push((cross, x1.clone()));
                }
            }
        }
        IntervalSet::from_segments(segs)
    }

    /// `(∫ min(φ, τ), ∫ max(φ − τ, 0))`.
    pub fn truncated_integrals(&self, tau: &Rational) -> (Rational, Rational) {
        let (xs, vs) = self.table();
        let mut upper = zero();
        for i in 0..xs.len() - 1 {
            let h = &xs[i + 1] - &xs[i];
            let (v0, v1) = (&vs[i], &vs[i + 1]);
            if v0 >= tau && v1 >= tau {
                upper += &h * ((v0 + v1) / two() - tau);
            } else if v0 > tau || v1 > tau {
                let top = max_r(v0, v1) - tau;
                upper += &top * &top * h / (two() * (v1 - v0).abs());
            }
        }
        (self.integral() - &upper, upper)
    }

    /// `(φ_* g)(y) = (1/n) Σ_k g((y + k)/n)`.
    pub fn pushforward(&self, n: u64) -> PLFn {
        if n <= 1 || self.breakpoints.is_empty() {
            return self.clone();
        }
        let nr = Rational::from_integer(n.into());
        let mut cands: Vec<Rational> = self.breakpoints.iter().map(|b| frac(&(b.value() * &nr))).collect();
        cands.push(zero());
        crate::rational::sort_dedup(&mut cands);
        let mut vs: Vec<Rational> = cands.iter().map(|y| pushforward_value(|x| self.eval(x), y, n)).collect();
        cands.push(one());
        vs.push(vs[0].clone());
        PLFn::from_table(cands, vs)
    }
}

fn pushforward_value(f: impl Fn(&Rational) -> Rational, y: &Rational, n: u64) -> Rational {
    let nr = Rational::from_integer(n.into());
    let mut acc = zero();
    for k in 0..n {
        acc += f(&((y + Rational::from_integer(k.into())) / &nr));
    }
    acc / nr
}

/// `∫_C φ`.
pub fn integrate_over(phi: &PLFn, c: &IntervalSet) -> Rational {
    c.segments().iter().fold(zero(), |acc, (l, r)| acc + phi.integral_between(l, r))
}

/// `{φ > t}`.
pub fn superlevel(phi: &PLFn, t: &Rational) -> IntervalSet {
    phi.superlevel(t)
}

/// `(∫ min(1_A*1_B, τ), ∫ max(1_A*1_B − τ, 0))`.
pub fn truncated_integrals(a: &IntervalSet, b: &IntervalSet, tau: &Rational) -> (Rational, Rational) {
    convolve_indicator(a, b).truncated_integrals(tau)
}

/// Pushforward of a step function along `x ↦ n x`.
pub fn pushforward(f: &StepFn, n: u64) -> StepFn {
    if n <= 1 || f.breakpoints.is_empty() {
        return f.clone();
    }
    let nr = Rational::from_integer(n.into());
    let mut cands: Vec<Rational> = f.breakpoints.iter().map(|b| frac(&(b.value() * &nr))).collect();
    cands.push(zero());
    crate::rational::sort_dedup(&mut cands);
    let mut vs = Vec::with_capacity(cands.len());
    for i in 0..cands.len() {
        let r = if i + 1 < cands.len() { cands[i + 1].clone() } else { one() };
        let mid = (&cands[i] + r) / two();
        vs.push(pushforward_value(|x| f.eval(x), &mid, n));
    }
    StepFn::from_table(cands, vs)
}

/// Symmetric nonincreasing rearrangement. Requires `f >= 0`.
pub fn decreasing_rearrangement(f: &StepFn) -> Result<StepFn> {
    if f.min_value().is_negative() {
        return Err(Error::Range("rearrangement of a function with negative values".into()));
    }
    let mut by_value: BTreeMap<Rational, Rational> = BTreeMap::new();
    for (l, r, v) in f.pieces() {
        *by_value.entry(v).or_insert_with(zero) += r - l;
    }
    let mut segs = Vec::new();
    let mut h = zero();
    for (v, len) in by_value.into_iter().rev() {
        let h2 = &h + &len / two();
        let mut parts = Vec::new();
        if h.is_zero() {
            real_to_segments(&-&h2, &h2, &mut parts);
        } else {
            real_to_segments(&h, &h2, &mut parts);
            real_to_segments(&-&h2, &-&h, &mut parts);
        }
        segs.extend(parts.into_iter().map(|(l, r)| (l, r, v.clone())));
        h = h2;
    }
    Ok(StepFn::from_segments(segs))
}

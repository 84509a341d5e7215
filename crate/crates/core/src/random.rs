//! Seeded random instances for property tests and experiment drivers. All
//! coordinates are multiples of `1/den`, so every instance is exact.

use alloc::vec::Vec;

use rand::Rng;

use crate::circle::{from_arcs, IntervalSet};
use crate::piecewise::StepFn;
use crate::rational::{rat, Rational};

/// `k/den` with `k` uniform in `0..den`.
pub fn point<R: Rng + ?Sized>(rng: &mut R, den: i64) -> Rational {
    rat(rng.gen_range(0..den), den)
}

/// Union of `1..=max_arcs` arcs with random centers and halfwidths up to
/// `max_halfwidth` (both multiples of `1/den`). Overlapping arcs merge, so the
/// result can have fewer components; it is never empty.
pub fn set_with<R: Rng + ?Sized>(rng: &mut R, max_arcs: usize, den: i64, max_halfwidth: &Rational) -> IntervalSet {
    let n = rng.gen_range(1..=max_arcs);
    let top = (max_halfwidth * Rational::from_integer(den.into())).floor();
    let top: i64 = top.to_integer().try_into().unwrap_or(1).max(1);
    let pairs: Vec<(Rational, Rational)> =
        (0..n).map(|_| (point(rng, den), rat(rng.gen_range(1..=top), den))).collect();
    from_arcs(&pairs)
}

/// Random arc union with arbitrary measure (halfwidths up to `1/4`).
pub fn set<R: Rng + ?Sized>(rng: &mut R, max_arcs: usize) -> IntervalSet {
    let den = 240;
    let max_h = rat(1, 4 * max_arcs.max(1) as i64).max(rat(1, 24));
    set_with(rng, max_arcs, den, &max_h)
}

/// Random arc union whose measure is exactly `m`, built from `1..=max_arcs`
/// disjoint arcs at random positions. `m` must lie in `(0, 1)`.
pub fn set_of_measure<R: Rng + ?Sized>(rng: &mut R, max_arcs: usize, m: &Rational) -> IntervalSet {
    let k = rng.gen_range(1..=max_arcs);
    // split m into k positive parts and the gap budget 1 - m into k parts
    let cuts = |rng: &mut R, total: &Rational| -> Vec<Rational> {
        let den = 64i64;
        let w: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=den)).collect();
        let s: i64 = w.iter().sum();
        w.into_iter().map(|x| total * rat(x, s)).collect()
    };
    let lens = cuts(rng, m);
    let gaps = cuts(rng, &(Rational::from_integer(1.into()) - m));
    let mut x = point(rng, 97);
    let mut segs = Vec::with_capacity(k);
    for (len, gap) in lens.into_iter().zip(gaps) {
        segs.push((x.clone() + &len / Rational::from_integer(2.into()), len.clone() / Rational::from_integer(2.into())));
        x += len + gap;
    }
    from_arcs(&segs)
}

/// Step function with `1..=max_pieces` arcs carrying values `j/q`, `1 <= j <= q`.
pub fn step<R: Rng + ?Sized>(rng: &mut R, max_pieces: usize, q: i64) -> StepFn {
    let n = rng.gen_range(1..=max_pieces);
    let den = 120i64;
    let mut cuts: Vec<i64> = (0..2 * n).map(|_| rng.gen_range(0..den)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut segs = Vec::new();
    for w in cuts.chunks(2) {
        if let [l, r] = w {
            segs.push((rat(*l, den), rat(*r, den), rat(rng.gen_range(1..=q), q)));
        }
    }
    StepFn::from_segments(segs)
}

/// Symmetric nonincreasing step function with values in `(0, 1]`: nested
/// centered arcs with decreasing values.
pub fn symmetric_step<R: Rng + ?Sized>(rng: &mut R, levels: usize, q: i64) -> StepFn {
    let n = rng.gen_range(1..=levels);
    let den = 240i64;
    let mut hw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=den / 2)).collect();
    hw.sort_unstable();
    hw.dedup();
    let mut vals: Vec<i64> = (0..hw.len()).map(|_| rng.gen_range(1..=q)).collect();
    vals.sort_unstable_by(|a, b| b.cmp(a));
    let mut acc: Vec<(Rational, Rational, Rational)> = Vec::new();
    let mut inner = rat(0, 1);
    for (h, v) in hw.iter().zip(&vals) {
        let h = rat(*h, den);
        if h > inner {
            let mut parts = Vec::new();
            push_real(&inner, &h, &mut parts);
            push_real(&(-h.clone()), &(-inner.clone()), &mut parts);
            acc.extend(parts.into_iter().map(|(l, r)| (l, r, rat(*v, q))));
            inner = h;
        }
    }
    StepFn::from_segments(acc)
}

fn push_real(l: &Rational, r: &Rational, out: &mut Vec<(Rational, Rational)>) {
    if r <= l {
        return;
    }
    let a = crate::rational::frac(l);
    let b = &a + (r - l);
    let one = Rational::from_integer(1.into());
    if b > one {
        out.push((a, one.clone()));
        out.push((Rational::from_integer(0.into()), b - one));
    } else {
        out.push((a, b));
    }
}

/// Random admissible measure triple, each coordinate a multiple of `1/den`.
pub fn admissible_measures<R: Rng + ?Sized>(rng: &mut R, den: i64) -> (Rational, Rational, Rational) {
    loop {
        let a = rat(rng.gen_range(1..den), den);
        let b = rat(rng.gen_range(1..den), den);
        let c = rat(rng.gen_range(1..den), den);
        if crate::functionals::admissibility(&a, &b, &c).admissible {
            return (a, b, c);
        }
    }
}

//! Rank-one Bohr sets `{x : ‖n x − c‖ <= ρ}` on the circle, exact fitting of
//! Bohr sets to arc unions, and stability certificates.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::circle::{from_arcs, star_arc, CirclePoint, IntervalSet};
use crate::functionals::{admissibility, defect_d, kneser_defect};
use crate::piecewise::{convolve_step, pushforward, PLFn, StepFn};
use crate::rational::{fmt_rational, frac, half, int, one, zero, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BohrSet {
    pub degree: u64,
    pub center: CirclePoint,
    pub radius: Rational,
}

impl BohrSet {
    pub fn new(degree: u64, center: Rational, radius: Rational) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Range("Bohr degree must be positive".into()));
        }
        if radius.is_negative() || radius > half() {
            return Err(Error::Range(alloc::format!("radius {} not in [0, 1/2]", fmt_rational(&radius))));
        }
        Ok(BohrSet { degree, center: CirclePoint::new(center), radius })
    }

    pub fn to_set(&self) -> IntervalSet {
        bohr_to_set(self)
    }

    pub fn measure(&self) -> Rational {
        int(2) * &self.radius
    }
}

/// `n` arcs of halfwidth `ρ/n` centered at `(c + k)/n`.
pub fn bohr_to_set(b: &BohrSet) -> IntervalSet {
    let n = Rational::from_integer(b.degree.into());
    let h = &b.radius / &n;
    let pairs: Vec<(Rational, Rational)> = (0..b.degree)
        .map(|k| ((b.center.value() + Rational::from_integer(k.into())) / &n, h.clone()))
        .collect();
    from_arcs(&pairs)
}

/// Which center relation a triple must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Centering {
    /// `c3 = c1 + c2`, matching `⟨1_A * 1_B, 1_C⟩`.
    #[default]
    Pairing,
    /// `c1 + c2 + c3 = 0`, matching `𝒯(E1, E2, E3)`.
    Trilinear,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BohrTriple {
    pub sets: [BohrSet; 3],
}

impl BohrTriple {
    pub fn is_parallel(&self) -> bool {
        self.sets[0].degree == self.sets[1].degree && self.sets[1].degree == self.sets[2].degree
    }

    pub fn is_compatibly_centered(&self, mode: Centering) -> bool {
        let [a, b, c] = &self.sets;
        match mode {
            Centering::Pairing => c.center == a.center.add(&b.center),
            Centering::Trilinear => a.center.add(&b.center).add(&c.center).value().is_zero(),
        }
    }

    pub fn to_sets(&self) -> [IntervalSet; 3] {
        [self.sets[0].to_set(), self.sets[1].to_set(), self.sets[2].to_set()]
    }
}

/// `c ↦ m(E ∩ Bohr(n, c, ρ))`, which is `(φ_* 1_E) * 1_{[−ρ, ρ]}`.
fn overlap_profile(e: &IntervalSet, n: u64, rho: &Rational) -> PLFn {
    let pushed = pushforward(&StepFn::indicator(e), n);
    convolve_step(&pushed, &StepFn::indicator(&star_arc(&(int(2) * rho)))).expect("indicator values lie in [0, 1]")
}

/// Center minimizing `m(E Δ Bohr(n, c, m(E)/2))` and the minimal distance.
/// The smallest minimizing center in `[0, 1)` is returned.
pub fn best_bohr_fit(e: &IntervalSet, n: u64) -> (CirclePoint, Rational) {
    let mu = e.measure();
    let prof = overlap_profile(e, n, &(&mu / int(2)));
    let (c, o) = prof.argmax();
    (CirclePoint::new(c), int(2) * (mu - o))
}

/// Per-set distance `c ↦ m(E Δ Bohr(n, c, ρ))` with `2ρ = m(E)`.
struct FitProfile {
    mu: Rational,
    prof: PLFn,
    breaks: Vec<Rational>,
}

impl FitProfile {
    fn new(e: &IntervalSet, n: u64) -> Self {
        let mu = e.measure();
        let prof = overlap_profile(e, n, &(&mu / int(2)));
        let breaks = prof.breakpoints().iter().map(|b| b.value().clone()).collect();
        FitProfile { mu, prof, breaks }
    }

    fn dist(&self, c: &Rational) -> Rational {
        int(2) * (&self.mu - self.prof.eval(c))
    }
}

/// Result of [`recover_triple`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovery {
    pub triple: BohrTriple,
    pub distances: [Rational; 3],
}

impl Recovery {
    pub fn max_distance(&self) -> Rational {
        self.distances.iter().max().unwrap().clone()
    }
}

/// Coefficients of `c_C` as a linear form in `(c_A, c_B)`.
fn c_form(mode: Centering) -> (i64, i64) {
    match mode {
        Centering::Pairing => (1, 1),
        Centering::Trilinear => (-1, -1),
    }
}

struct Joint<'a> {
    fits: [&'a FitProfile; 3],
    forms: [(i64, i64); 3],
}

impl Joint<'_> {
    fn arg(&self, j: usize, p: &(Rational, Rational)) -> Rational {
        let (u, v) = self.forms[j];
        int(u) * &p.0 + int(v) * &p.1
    }

    fn parts(&self, p: &(Rational, Rational)) -> [Rational; 3] {
        [0, 1, 2].map(|j| self.fits[j].dist(&self.arg(j, p)))
    }

    fn value(&self, p: &(Rational, Rational)) -> Rational {
        self.parts(p).into_iter().max().unwrap()
    }

    /// Exact minimum of the objective along `p + t·d`, `t ∈ [0, 1)`.
    fn line_search(&self, p: &(Rational, Rational), d: (i64, i64)) -> (Rational, Rational) {
        let at = |t: &Rational| (&p.0 + int(d.0) * t, &p.1 + int(d.1) * t);
        let mut ts = alloc::vec![zero()];
        for j in 0..3 {
            let (u, v) = self.forms[j];
            let k = u * d.0 + v * d.1;
            if k == 0 {
                continue;
            }
            let base = self.arg(j, p);
            let kr = int(k);
            let period = int(k.abs()).recip();
            for b in &self.fits[j].breaks {
                let t0 = frac(&((b - &base) / &kr));
                let mut t = t0 % &period;
                while t < one() {
                    ts.push(t.clone());
                    t += &period;
                }
            }
        }
        crate::rational::sort_dedup(&mut ts);
        ts.push(one());
        // every component is linear between consecutive candidates; add the
        // crossings of each pair of components
        let mut cands = ts.clone();
        for w in ts.windows(2) {
            let (t0, t1) = (&w[0], &w[1]);
            let v0 = self.parts(&at(t0));
            let v1 = self.parts(&at(t1));
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let g0 = &v0[i] - &v0[j];
                let g1 = &v1[i] - &v1[j];
                if (g0.is_positive() && g1.is_negative()) || (g0.is_negative() && g1.is_positive()) {
                    cands.push(t0 + (t1 - t0) * &g0 / (&g0 - &g1));
                }
            }
        }
        cands.retain(|t| *t < one());
        let mut best = (self.value(p), p.clone());
        for t in cands {
            let q = at(&t);
            let q = (frac(&q.0), frac(&q.1));
            let val = self.value(&q);
            if val < best.0 || (val == best.0 && q < best.1) {
                best = (val, q);
            }
        }
        best.1
    }

    fn refine(&self, mut p: (Rational, Rational)) -> (Rational, Rational) {
        let dirs = [(1, 0), (0, 1), (1, 1), (1, -1)];
        loop {
            let before = self.value(&p);
            for d in dirs {
                p = self.line_search(&p, d);
            }
            if self.value(&p) >= before {
                return p;
            }
        }
    }
}

/// Best compatibly centered parallel Bohr triple over degrees `1..=n_max`.
/// Radii are `m(E_j)/2`; centers minimize the largest symmetric difference.
pub fn recover_triple(
    a: &IntervalSet,
    b: &IntervalSet,
    c: &IntervalSet,
    n_max: u64,
    mode: Centering,
) -> Result<Recovery> {
    let rep = admissibility(&a.measure(), &b.measure(), &c.measure());
    if let Some(v) = rep.violation() {
        return Err(Error::NotAdmissible(v));
    }
    let mut best: Option<(Rational, u64, (Rational, Rational))> = None;
    for n in 1..=n_max.max(1) {
        let fits = [FitProfile::new(a, n), FitProfile::new(b, n), FitProfile::new(c, n)];
        let joint = Joint { fits: [&fits[0], &fits[1], &fits[2]], forms: [(1, 0), (0, 1), c_form(mode)] };
        let (ca, _) = fits[0].prof.argmax();
        let (cb, _) = fits[1].prof.argmax();
        let (cc, _) = fits[2].prof.argmax();
        // c_C = s·(c_A + c_B) with s = ±1
        let s = int(c_form(mode).0);
        let starts = [
            (ca.clone(), cb.clone()),
            (ca.clone(), frac(&(&cc * &s - &ca))),
            (frac(&(&cc * &s - &cb)), cb.clone()),
        ];
        for st in starts {
            let p = joint.refine(st);
            let val = joint.value(&p);
            let better = match &best {
                None => true,
                Some((bv, _, bp)) => val < *bv || (val == *bv && n == best.as_ref().unwrap().1 && p < *bp),
            };
            if better {
                best = Some((val, n, p));
            }
        }
    }
    let (_, n, (ca, cb)) = best.expect("at least one degree is searched");
    let (u, v) = c_form(mode);
    let cc = int(u) * &ca + int(v) * &cb;
    let triple = BohrTriple {
        sets: [
            BohrSet::new(n, ca, a.measure() / int(2))?,
            BohrSet::new(n, cb, b.measure() / int(2))?,
            BohrSet::new(n, cc, c.measure() / int(2))?,
        ],
    };
    let sets = triple.to_sets();
    let distances = [
        a.symdiff(&sets[0]).measure(),
        b.symdiff(&sets[1]).measure(),
        c.symdiff(&sets[2]).measure(),
    ];
    Ok(Recovery { triple, distances })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityCertificate {
    pub recovery: Recovery,
    pub defect: Rational,
    /// `max_j symdiff_j² / 𝒟`, or `None` when `𝒟 = 0`.
    pub ratio_sq: Option<Rational>,
    pub eta_used: Rational,
    pub eta_bounded: bool,
    pub n_max: u64,
}

impl StabilityCertificate {
    /// `𝒟 = 0` and every distance is `0`.
    pub fn is_exact_extremizer(&self) -> bool {
        self.defect.is_zero() && self.recovery.distances.iter().all(Zero::is_zero)
    }
}

pub fn stability_certificate(
    a: &IntervalSet,
    b: &IntervalSet,
    c: &IntervalSet,
    eta: &Rational,
    n_max: u64,
) -> Result<StabilityCertificate> {
    let rep = admissibility(&a.measure(), &b.measure(), &c.measure());
    if let Some(v) = rep.violation() {
        return Err(Error::NotAdmissible(v));
    }
    if !rep.eta_strictly_admissible(eta) {
        return Err(Error::EtaTooLarge { eta: fmt_rational(eta), max: fmt_rational(&rep.eta_strict) });
    }
    let recovery = recover_triple(a, b, c, n_max, Centering::Pairing)?;
    let defect = defect_d(a, b, c);
    let m = recovery.max_distance();
    let ratio_sq = if defect.is_zero() { None } else { Some(&m * &m / &defect) };
    Ok(StabilityCertificate { recovery, defect, ratio_sq, eta_used: eta.clone(), eta_bounded: rep.eta_bounded(eta), n_max })
}

/// Smallest Bohr set of degree `n` containing `e`: the image `n·E` is covered
/// by the complement of its widest gap.
pub fn minimal_cover(e: &IntervalSet, n: u64) -> BohrSet {
    let nr = Rational::from_integer(n.into());
    let image = from_arcs(
        &e.arcs().iter().map(|a| (a.center().value() * &nr, a.halfwidth() * &nr)).collect::<Vec<_>>(),
    );
    if image.is_full() {
        return BohrSet { degree: n, center: CirclePoint::zero(), radius: half() };
    }
    // widest gap of the image; the cover is its complement
    let gaps = image.complement();
    let widest = gaps.arcs().iter().max_by(|x, y| x.length().cmp(&y.length()).then(y.left().cmp(&x.left()))).unwrap();
    let radius = (one() - widest.length()) / int(2);
    BohrSet { degree: n, center: CirclePoint::new(widest.center().value() + half()), radius }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneserDegreeRow {
    pub degree: u64,
    pub cover_a: BohrSet,
    pub cover_b: BohrSet,
    /// `μ(ℬ_A ∖ A) + μ(ℬ_B ∖ B)`.
    pub excess: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneserReport {
    pub rows: Vec<KneserDegreeRow>,
    pub best: usize,
    pub defect: Rational,
    /// `excess / defect` at the best degree, `None` when the defect is zero.
    pub ratio: Option<Rational>,
}

/// Smallest parallel Bohr pair containing `(A, B)` for each degree up to
/// `n_max`, compared with the Kneser defect.
pub fn kneser_containment_check(a: &IntervalSet, b: &IntervalSet, n_max: u64) -> Result<KneserReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::HypothesisViolated("both sets must be nonempty".into()));
    }
    if a.measure() + b.measure() >= one() {
        return Err(Error::HypothesisViolated("mu(A) + mu(B) must be below 1".into()));
    }
    let mut rows = Vec::new();
    for n in 1..=n_max.max(1) {
        let cover_a = minimal_cover(a, n);
        let cover_b = minimal_cover(b, n);
        let excess = cover_a.measure() - a.measure() + cover_b.measure() - b.measure();
        rows.push(KneserDegreeRow { degree: n, cover_a, cover_b, excess });
    }
    let best = (0..rows.len()).min_by(|&i, &j| rows[i].excess.cmp(&rows[j].excess).then(i.cmp(&j))).unwrap();
    let defect = kneser_defect(a, b)?;
    let ratio = if defect.is_zero() { None } else { Some(&rows[best].excess / &defect) };
    Ok(KneserReport { rows, best, defect, ratio })
}

/// `E` with the chunk `[l, l + δ]` at the left end of its `k`-th arc moved to
/// `[l + λ, l + λ + δ]`. The moved chunk must land outside the rest of `E`.
pub fn displace_chunk(e: &IntervalSet, k: usize, delta: &Rational, lambda: &Rational) -> Result<IntervalSet> {
    let arc = e.arcs().get(k).ok_or_else(|| Error::Range(alloc::format!("no arc {k}")))?;
    if !delta.is_positive() || *delta > arc.length() {
        return Err(Error::Range(alloc::format!("chunk {} longer than arc", fmt_rational(delta))));
    }
    let l = arc.left();
    let chunk = IntervalSet::interval(l.clone(), &l + delta);
    let rest = e.difference(&chunk);
    let moved = chunk.translate(lambda);
    if !rest.intersect(&moved).is_empty() {
        return Err(Error::Range(alloc::format!("displacement {} overlaps the set", fmt_rational(lambda))));
    }
    Ok(rest.union(&moved))
}

/// The perturbation family used for stability sweeps: the degree-2 extremal
/// triple `(Bohr(2, 0, 1/16), Bohr(2, 1/5, 3/32), Bohr(2, 1/5, 1/8))` with a
/// chunk of measure `δ <= 1/16` of the arc of `A` centered at `0` moved by
/// `λ = 1/16`, the length of that arc, to the arc's other end.
pub fn chunk_family(delta: &Rational) -> Result<[IntervalSet; 3]> {
    let a = BohrSet::new(2, zero(), Rational::new(1.into(), 16.into()))?.to_set();
    let b = BohrSet::new(2, Rational::new(1.into(), 5.into()), Rational::new(3.into(), 32.into()))?.to_set();
    let c = BohrSet::new(2, Rational::new(1.into(), 5.into()), Rational::new(1.into(), 8.into()))?.to_set();
    let k = a.arcs().iter().position(|arc| arc.center().value().is_zero()).expect("arc at 0");
    let a = displace_chunk(&a, k, delta, &Rational::new(1.into(), 16.into()))?;
    Ok([a, b, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn bohr(n: u64, c: Rational, rho: Rational) -> IntervalSet {
        BohrSet::new(n, c, rho).unwrap().to_set()
    }

    #[test]
    fn bohr_to_set_examples() {
        assert_eq!(bohr(1, zero(), rat(1, 8)), IntervalSet::interval(rat(-1, 8), rat(1, 8)));
        assert_eq!(bohr(2, zero(), rat(1, 8)), from_arcs(&[(zero(), rat(1, 16)), (half(), rat(1, 16))]));
        assert_eq!(
            bohr(3, half(), rat(1, 4)),
            from_arcs(&[(rat(1, 6), rat(1, 12)), (half(), rat(1, 12)), (rat(5, 6), rat(1, 12))])
        );
        assert_eq!(bohr(5, rat(1, 7), rat(1, 9)).measure(), rat(2, 9));
    }

    #[test]
    fn fit_examples() {
        let e = bohr(2, rat(1, 3), rat(1, 8));
        assert_eq!(best_bohr_fit(&e, 2), (CirclePoint::new(rat(1, 3)), zero()));
        let q = IntervalSet::interval(zero(), rat(1, 4));
        assert_eq!(best_bohr_fit(&q, 1), (CirclePoint::new(rat(1, 8)), zero()));
        let two = from_arcs(&[(zero(), rat(1, 16)), (rat(1, 3), rat(1, 16))]);
        let (c, d) = best_bohr_fit(&two, 2);
        assert!(d.is_positive());
        assert_eq!(two.symdiff(&bohr(2, c.into_value(), rat(1, 8))).measure(), d);
    }

    #[test]
    fn recover_examples() {
        let (a, b) = (bohr(2, rat(1, 5), rat(1, 8)), bohr(2, rat(1, 3), rat(3, 16)));
        let c = bohr(2, rat(1, 5) + rat(1, 3), rat(1, 5));
        let r = recover_triple(&a, &b, &c, 4, Centering::Pairing).unwrap();
        assert_eq!(r.distances, [zero(), zero(), zero()]);
        assert_eq!(r.triple.sets[0].degree, 2);
        assert!(r.triple.is_compatibly_centered(Centering::Pairing));

        let (x, y) = (rat(1, 7), rat(2, 5));
        let a = star_arc(&rat(1, 4)).translate(&x);
        let b = star_arc(&rat(1, 3)).translate(&y);
        let c = star_arc(&rat(1, 5)).translate(&(&x + &y));
        let r = recover_triple(&a, &b, &c, 3, Centering::Pairing).unwrap();
        assert_eq!(r.distances, [zero(), zero(), zero()]);
        assert_eq!(r.triple.sets[0].degree, 1);
        assert_eq!(r.triple.sets[0].center, CirclePoint::new(x));

        // the three arcs cannot be matched at once; the balanced optimum
        // moves every center by 1/24
        let q = IntervalSet::interval(zero(), rat(1, 4));
        let r = recover_triple(&q, &q, &q, 2, Centering::Pairing).unwrap();
        assert_eq!(r.distances, [rat(1, 12), rat(1, 12), rat(1, 12)]);
    }

    #[test]
    fn certificate_examples() {
        let s = star_arc(&rat(1, 4));
        let cert = stability_certificate(&s, &s, &s, &one(), 3).unwrap();
        assert!(cert.is_exact_extremizer());
        assert_eq!(cert.ratio_sq, None);

        let q = IntervalSet::interval(zero(), rat(1, 4));
        let cert = stability_certificate(&q, &q, &q, &one(), 2).unwrap();
        assert_eq!(cert.defect, rat(1, 64));
        assert_eq!(cert.ratio_sq, Some(rat(4, 9)));

        assert!(matches!(stability_certificate(&s, &s, &s, &rat(3, 2), 2), Err(Error::EtaTooLarge { .. })));
        let big = star_arc(&rat(1, 10));
        assert!(matches!(stability_certificate(&big, &big, &s, &rat(1, 10), 2), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn kneser_examples() {
        let a = IntervalSet::interval(zero(), rat(1, 5));
        let b = IntervalSet::interval(rat(1, 2), rat(3, 5));
        let r = kneser_containment_check(&a, &b, 3).unwrap();
        assert_eq!(r.rows[r.best].degree, 1);
        assert_eq!(r.rows[r.best].excess, zero());
        assert_eq!(r.defect, zero());

        let e = from_arcs(&[(zero(), rat(1, 16)), (rat(1, 3), rat(1, 16))]);
        let r = kneser_containment_check(&e, &e, 2).unwrap();
        assert!(r.rows.iter().all(|row| row.excess >= rat(1, 4)));
        assert_eq!(r.defect, rat(1, 4));

        assert!(kneser_containment_check(&star_arc(&half()), &star_arc(&half()), 2).is_err());
    }

    #[test]
    fn minimal_cover_contains_set() {
        let e = from_arcs(&[(rat(1, 10), rat(1, 40)), (rat(3, 5), rat(1, 30))]);
        for n in 1..5 {
            let cov = minimal_cover(&e, n);
            assert!(e.is_subset(&cov.to_set()), "degree {n}");
        }
    }

    #[test]
    fn chunk_family_examples() {
        let [a, b, c] = chunk_family(&rat(1, 64)).unwrap();
        assert_eq!(a.measure(), rat(1, 8));
        assert!(defect_d(&a, &b, &c).is_positive());
        // moving the whole arc is allowed; an overlapping move is not
        assert!(chunk_family(&rat(1, 16)).is_ok());
        let e = bohr(2, zero(), rat(1, 16));
        assert!(displace_chunk(&e, 1, &rat(1, 64), &rat(1, 32)).is_err());
        let [a0, b0, c0] = chunk_family(&rat(1, 16)).unwrap();
        assert_eq!(a0, from_arcs(&[(rat(1, 16), rat(1, 32)), (half(), rat(1, 32))]));
        assert!(defect_d(&a0, &b0, &c0).is_positive());
    }
}

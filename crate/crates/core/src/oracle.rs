//! Brute-force model on `Z/N`: exact counting versions of the trilinear form
//! and the defect, an extremizer search, and the bridge that compares the
//! continuum defect with its discretization.
//!
//! `Z/N` is not connected, so the continuum inequalities only hold here up to
//! `O(1/N)`; a discrete defect can be negative (subgroups beat arcs).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use bitvec::vec::BitVec;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::circle::IntervalSet;
use crate::functionals::{defect_d, rs_star_closed_form};
use crate::rational::{int, rat, Rational};
use crate::{Error, Result};

/// A subset of `Z/N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZnSet {
    n: usize,
    members: BitVec,
}

impl ZnSet {
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "modulus must be positive");
        ZnSet { n, members: BitVec::repeat(false, n) }
    }

    pub fn full(n: usize) -> Self {
        assert!(n >= 1, "modulus must be positive");
        ZnSet { n, members: BitVec::repeat(true, n) }
    }

    /// Residues are reduced mod `n`; repeats are ignored.
    pub fn from_residues<I: IntoIterator<Item = usize>>(n: usize, it: I) -> Self {
        let mut s = ZnSet::empty(n);
        for k in it {
            s.members.set(k % n, true);
        }
        s
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members[k % self.n]
    }

    /// Members in increasing order.
    pub fn residues(&self) -> Vec<usize> {
        self.members.iter_ones().collect()
    }

    pub fn translate(&self, t: usize) -> Self {
        ZnSet::from_residues(self.n, self.members.iter_ones().map(|k| k + t % self.n))
    }

    pub fn negate(&self) -> Self {
        ZnSet::from_residues(self.n, self.members.iter_ones().map(|k| self.n - k))
    }

    /// `u · S`; a bijection when `u` is a unit.
    pub fn dilate(&self, u: usize) -> Self {
        ZnSet::from_residues(self.n, self.members.iter_ones().map(|k| k * (u % self.n)))
    }
}

/// Residues `k` with `k/N ∈ E`, arcs taken closed.
pub fn discretize(e: &IntervalSet, n: usize) -> ZnSet {
    let mut s = ZnSet::empty(n);
    let nn = int(n as i64);
    for (l, r) in e.segments() {
        let lo = (&l * &nn).ceil().to_integer().to_usize().unwrap_or(0);
        let hi = (&r * &nn).floor().to_integer().to_usize().unwrap_or(0);
        for k in lo..=hi {
            s.members.set(k % n, true);
        }
    }
    s
}

fn same_modulus(sets: &[&ZnSet]) -> Result<usize> {
    let n = sets[0].n;
    for s in &sets[1..] {
        if s.n != n {
            return Err(Error::MixedModulus(n, s.n));
        }
    }
    Ok(n)
}

/// `#{(x, y) : x ∈ S1, y ∈ S2, −x−y ∈ S3}`.
pub fn zn_triple_functional(s1: &ZnSet, s2: &ZnSet, s3: &ZnSet) -> Result<u64> {
    let n = same_modulus(&[s1, s2, s3])?;
    let ys = s2.residues();
    let mut count = 0u64;
    for x in s1.members.iter_ones() {
        for &y in &ys {
            if s3.members[(2 * n - x - y) % n] {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Star value at the densities minus `𝒯/N²`. May be negative.
pub fn zn_defect(s1: &ZnSet, s2: &ZnSet, s3: &ZnSet) -> Result<Rational> {
    let n = same_modulus(&[s1, s2, s3])? as i64;
    let t = zn_triple_functional(s1, s2, s3)?;
    let d = |s: &ZnSet| rat(s.len() as i64, n);
    Ok(rs_star_closed_form(&d(s1), &d(s2), &d(s3)) - rat(t as i64, n * n))
}

pub fn zn_sumset(s1: &ZnSet, s2: &ZnSet) -> Result<ZnSet> {
    let n = same_modulus(&[s1, s2])?;
    let ys = s2.residues();
    let mut out = ZnSet::empty(n);
    for x in s1.members.iter_ones() {
        for &y in &ys {
            out.members.set((x + y) % n, true);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Minimize [`zn_defect`].
    MinDefect,
    /// Minimize `|S1 + S2| − min(k1 + k2 − 1, N)`.
    MinKneser,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub n: usize,
    pub sizes: (usize, usize, usize),
    pub objective: Objective,
    pub value: Rational,
    /// Canonical representatives, sorted, at most [`MAX_REPORTED`].
    pub minimizers: Vec<[ZnSet; 3]>,
    pub exhaustive: bool,
    /// Number of `(S1, S2)` pairs scored.
    pub evaluated: u64,
}

pub const MAX_REPORTED: usize = 64;

/// Estimated pair count above which [`exhaustive_search`] refuses to run.
pub const EXHAUSTIVE_BUDGET: u64 = 20_000_000;

fn units(n: usize) -> Vec<usize> {
    (1..=n).filter(|u| u.gcd(&n) == 1).map(|u| u % n).collect()
}

fn affine(members: &[usize], u: usize, t: usize, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = members.iter().map(|&x| (u * x + t) % n).collect();
    v.sort_unstable();
    v
}

/// Lexicographically least image of a triple (as sorted residue lists) under
/// `(S1, S2, S3) ↦ (uS1 + t1, uS2 + t2, uS3 − t1 − t2)` with `u` a unit.
pub fn canonicalize(triple: &[ZnSet; 3]) -> [ZnSet; 3] {
    let n = triple[0].n;
    let m: Vec<Vec<usize>> = triple.iter().map(ZnSet::residues).collect();
    let mut best: Option<[Vec<usize>; 3]> = None;
    for u in units(n) {
        // a least image starts at 0, so only translations that send a member to 0 matter
        let shifts = |s: &[usize]| -> Vec<usize> {
            if s.is_empty() { alloc::vec![0] } else { s.iter().map(|&x| (n - u * x % n) % n).collect() }
        };
        for t1 in shifts(&m[0]) {
            let a = affine(&m[0], u, t1, n);
            if best.as_ref().is_some_and(|b| a > b[0]) {
                continue;
            }
            for t2 in shifts(&m[1]) {
                let b = affine(&m[1], u, t2, n);
                let c = affine(&m[2], u, (2 * n - t1 - t2) % n, n);
                let cand = [a.clone(), b, c];
                if best.as_ref().is_none_or(|x| cand < *x) {
                    best = Some(cand);
                }
            }
        }
    }
    let [a, b, c] = best.expect("at least one unit");
    [ZnSet::from_residues(n, a), ZnSet::from_residues(n, b), ZnSet::from_residues(n, c)]
}

/// Scores `(S1, S2)`: the lexicographically least best `S3` and a key to
/// minimize.
struct Scorer {
    n: usize,
    k3: usize,
    objective: Objective,
    r: Vec<u32>,
    order: Vec<usize>,
}

impl Scorer {
    fn new(n: usize, k3: usize, objective: Objective) -> Self {
        Scorer { n, k3, objective, r: alloc::vec![0; n], order: (0..n).collect() }
    }

    /// `(key, T, S3)`. For the defect the key is `−T`; for Kneser it is
    /// `(|S1 + S2|, −T)` folded into one integer.
    fn score(&mut self, s1: &[usize], s2: &[usize]) -> (i64, u64, Vec<usize>) {
        let n = self.n;
        self.r.iter_mut().for_each(|x| *x = 0);
        for &x in s1 {
            for &y in s2 {
                self.r[(2 * n - x - y) % n] += 1;
            }
        }
        let r = &self.r;
        self.order.sort_unstable_by(|&i, &j| r[j].cmp(&r[i]).then(i.cmp(&j)));
        let mut s3: Vec<usize> = self.order[..self.k3].to_vec();
        s3.sort_unstable();
        let t: u64 = s3.iter().map(|&z| r[z] as u64).sum();
        let key = match self.objective {
            Objective::MinDefect => -(t as i64),
            Objective::MinKneser => {
                let size = r.iter().filter(|&&c| c > 0).count() as i64;
                size * (n * n + 1) as i64 - t as i64
            }
        };
        (key, t, s3)
    }
}

fn check_sizes(n: usize, sizes: (usize, usize, usize)) -> Result<()> {
    if n == 0 {
        return Err(Error::Infeasible("modulus must be positive".into()));
    }
    for (i, k) in [sizes.0, sizes.1, sizes.2].into_iter().enumerate() {
        if k == 0 || k > n {
            return Err(Error::Infeasible(alloc::format!("size k{} = {k} not in 1..={n}", i + 1)));
        }
    }
    Ok(())
}

fn objective_value(n: usize, sizes: (usize, usize, usize), objective: Objective, best: &[ZnSet; 3]) -> Rational {
    match objective {
        Objective::MinDefect => zn_defect(&best[0], &best[1], &best[2]).expect("one modulus"),
        Objective::MinKneser => {
            let size = zn_sumset(&best[0], &best[1]).expect("one modulus").len();
            int(size as i64 - (sizes.0 + sizes.1 - 1).min(n) as i64)
        }
    }
}

/// Keeps the best key seen and the canonical forms attaining it.
struct Collector {
    n: usize,
    best: Option<i64>,
    found: BTreeSet<[Vec<usize>; 3]>,
}

impl Collector {
    fn offer(&mut self, key: i64, s1: &[usize], s2: &[usize], s3: Vec<usize>) {
        match self.best {
            Some(b) if key > b => return,
            Some(b) if key < b => self.found.clear(),
            _ => {}
        }
        self.best = Some(key);
        if self.found.len() >= MAX_REPORTED {
            return;
        }
        let n = self.n;
        let t = [
            ZnSet::from_residues(n, s1.iter().copied()),
            ZnSet::from_residues(n, s2.iter().copied()),
            ZnSet::from_residues(n, s3),
        ];
        let c = canonicalize(&t);
        self.found.insert([c[0].residues(), c[1].residues(), c[2].residues()]);
    }

    fn finish(self, sizes: (usize, usize, usize), objective: Objective, exhaustive: bool, evaluated: u64) -> SearchResult {
        let n = self.n;
        let minimizers: Vec<[ZnSet; 3]> = self
            .found
            .into_iter()
            .map(|[a, b, c]| [ZnSet::from_residues(n, a), ZnSet::from_residues(n, b), ZnSet::from_residues(n, c)])
            .collect();
        let value = objective_value(n, sizes, objective, &minimizers[0]);
        SearchResult { n, sizes, objective, value, minimizers, exhaustive, evaluated }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// All `k`-subsets of `0..n` as sorted residue lists (Gosper's hack).
fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let limit = 1u32 << n;
    let mut mask: u32 = (1u32 << k) - 1;
    core::iter::from_fn(move || {
        if mask >= limit {
            return None;
        }
        let out = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
        Some(out)
    })
}

fn is_affine_rep(s: &[usize], n: usize, us: &[usize]) -> bool {
    us.iter().all(|&u| s.iter().all(|&x| affine(s, u, (n - u * x % n) % n, n).as_slice() >= s))
}

fn is_translation_rep(s: &[usize], n: usize) -> bool {
    s.iter().all(|&x| affine(s, 1, n - x, n).as_slice() >= s)
}

/// Exact search over every configuration with `N <= 24`, one orbit
/// representative at a time: `S1` up to the full symmetry group, `S2` up to
/// translation, and the best `S3` read off the convolution counts.
///
/// Cost grows like `C(N, k1) C(N, k2) / (N² φ(N))`; instances whose estimate
/// exceeds [`EXHAUSTIVE_BUDGET`] are rejected with `Infeasible`.
pub fn exhaustive_search(n: usize, sizes: (usize, usize, usize), objective: Objective) -> Result<SearchResult> {
    check_sizes(n, sizes)?;
    if n > 24 {
        return Err(Error::Infeasible(alloc::format!("N = {n} > 24: use local_search")));
    }
    let us = units(n);
    let estimate = (binomial(n, sizes.0) / (n * us.len()) as u64 + 1) * (binomial(n, sizes.1) / n as u64 + 1);
    if estimate > EXHAUSTIVE_BUDGET {
        return Err(Error::Infeasible(alloc::format!("about {estimate} pairs exceeds the exhaustive budget")));
    }
    let reps1: Vec<Vec<usize>> = subsets(n, sizes.0).filter(|s| is_affine_rep(s, n, &us)).collect();
    let reps2: Vec<Vec<usize>> = subsets(n, sizes.1).filter(|s| is_translation_rep(s, n)).collect();
    let mut scorer = Scorer::new(n, sizes.2, objective);
    let mut col = Collector { n, best: None, found: BTreeSet::new() };
    let mut evaluated = 0u64;
    for s1 in &reps1 {
        for s2 in &reps2 {
            let (key, _, s3) = scorer.score(s1, s2);
            col.offer(key, s1, s2, s3);
            evaluated += 1;
        }
    }
    Ok(col.finish(sizes, objective, true, evaluated))
}

/// Random restarts followed by first-improvement single-element swaps in
/// `S1` and `S2`. Any `N`; no optimality guarantee.
pub fn local_search<R: Rng + ?Sized>(
    n: usize,
    sizes: (usize, usize, usize),
    objective: Objective,
    restarts: usize,
    rng: &mut R,
) -> Result<SearchResult> {
    check_sizes(n, sizes)?;
    let mut scorer = Scorer::new(n, sizes.2, objective);
    let mut col = Collector { n, best: None, found: BTreeSet::new() };
    let mut evaluated = 0u64;
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..restarts.max(1) {
        let mut s = [
            all.choose_multiple(rng, sizes.0).copied().collect::<Vec<_>>(),
            all.choose_multiple(rng, sizes.1).copied().collect::<Vec<_>>(),
        ];
        let (mut key, _, _) = scorer.score(&s[0], &s[1]);
        evaluated += 1;
        'climb: loop {
            for which in 0..2 {
                for i in 0..s[which].len() {
                    for y in 0..n {
                        if s[which].contains(&y) {
                            continue;
                        }
                        let old = core::mem::replace(&mut s[which][i], y);
                        let (k, _, _) = scorer.score(&s[0], &s[1]);
                        evaluated += 1;
                        if k < key {
                            key = k;
                            continue 'climb;
                        }
                        s[which][i] = old;
                    }
                }
            }
            break;
        }
        let (key, _, s3) = scorer.score(&s[0], &s[1]);
        col.offer(key, &s[0], &s[1], s3);
    }
    Ok(col.finish(sizes, objective, false, evaluated))
}

/// Exhaustive when possible, otherwise `restarts` rounds of [`local_search`].
pub fn search<R: Rng + ?Sized>(
    n: usize,
    sizes: (usize, usize, usize),
    objective: Objective,
    restarts: usize,
    rng: &mut R,
) -> Result<SearchResult> {
    match exhaustive_search(n, sizes, objective) {
        Err(Error::Infeasible(_)) if check_sizes(n, sizes).is_ok() => local_search(n, sizes, objective, restarts, rng),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub continuum: Rational,
    pub discrete: Rational,
    pub gap: Rational,
    /// `3 · (endpoints of A, B, C) / N`.
    pub bound: Rational,
}

impl Agreement {
    pub fn within_bound(&self) -> bool {
        self.gap <= self.bound
    }
}

/// Compares `𝒟(A, B, C)` with the discrete defect of `(A, B, −C)` sampled on
/// `Z/N` (the pairing `∫_C 1_A * 1_B` is `𝒯(A, B, −C)`).
pub fn agreement_check(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet, n: usize) -> Agreement {
    let continuum = defect_d(a, b, c);
    let discrete = zn_defect(&discretize(a, n), &discretize(b, n), &discretize(&c.negate(), n)).expect("one modulus");
    let gap = (&continuum - &discrete).abs();
    let ends = a.endpoint_count() + b.endpoint_count() + c.endpoint_count();
    let bound = rat(3 * ends as i64, n as i64);
    Agreement { continuum, discrete, gap, bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::BohrSet;
    use crate::circle::star_arc;
    use crate::rational::{half, zero};

    #[test]
    fn discretize_examples() {
        assert_eq!(discretize(&IntervalSet::full(), 7), ZnSet::full(7));
        assert_eq!(discretize(&IntervalSet::interval(zero(), rat(1, 4)), 8).residues(), [0, 1, 2]);
        assert!(discretize(&IntervalSet::empty(), 5).is_empty());
        // a wrapping arc
        assert_eq!(discretize(&IntervalSet::interval(rat(-1, 8), rat(1, 8)), 8).residues(), [0, 1, 7]);
    }

    #[test]
    fn triple_functional_examples() {
        let n = 10;
        let s = ZnSet::from_residues(n, [1, 4, 5]);
        let t = ZnSet::from_residues(n, [0, 2]);
        assert_eq!(zn_triple_functional(&s, &t, &ZnSet::full(n)).unwrap(), 6);
        let z = ZnSet::from_residues(n, [0]);
        assert_eq!(zn_triple_functional(&z, &z, &z).unwrap(), 1);
        assert_eq!(zn_triple_functional(&z, &z, &ZnSet::full(3)), Err(Error::MixedModulus(10, 3)));

        let n = 1024;
        let h = discretize(&star_arc(&half()), n);
        let t = zn_triple_functional(&h, &h, &h).unwrap() as i64;
        assert!((t - 3 * (n * n) as i64 / 16).abs() <= 3 * n as i64);
    }

    #[test]
    fn defect_examples() {
        let n = 64;
        let q = ZnSet::from_residues(n, 0..16);
        let d = zn_defect(&q, &q, &q).unwrap();
        assert!((d - rat(1, 64)).abs() <= rat(9, 64));

        let b = BohrSet::new(3, zero(), rat(1, 12)).unwrap().to_set();
        let s = discretize(&b, 96);
        let d = zn_defect(&s, &s, &s.negate()).unwrap();
        assert!(d.abs() <= rat(3 * 9, 96));

        let a = discretize(&star_arc(&rat(1, 3)), 60);
        assert!(zn_defect(&a, &a, &ZnSet::full(60)).unwrap().abs() <= rat(4, 60));
    }

    #[test]
    fn canonical_forms_are_fixed_points() {
        let t = [
            ZnSet::from_residues(12, [3, 5, 7]),
            ZnSet::from_residues(12, [1, 2, 3]),
            ZnSet::from_residues(12, [0, 6, 11]),
        ];
        let c = canonicalize(&t);
        assert_eq!(canonicalize(&c), c);
        assert_eq!(c[0].residues()[0], 0);
        assert_eq!(
            zn_triple_functional(&c[0], &c[1], &c[2]).unwrap(),
            zn_triple_functional(&t[0], &t[1], &t[2]).unwrap()
        );
    }

    #[test]
    fn search_examples() {
        let r = exhaustive_search(12, (3, 3, 3), Objective::MinDefect).unwrap();
        assert!(r.exhaustive);
        // the subgroup of order 3 beats every progression of step 1
        let ap = ZnSet::from_residues(12, [0, 1, 2]);
        let best = &r.minimizers[0];
        assert!(r.value <= zn_defect(&ap, &ap, &ap.negate()).unwrap());
        assert_eq!(r.value, zn_defect(&best[0], &best[1], &best[2]).unwrap());
        assert_eq!(best[0].residues(), [0, 4, 8]);

        let r = exhaustive_search(8, (2, 2, 4), Objective::MinKneser).unwrap();
        assert_eq!(r.value, int(-1));
        assert_eq!(r.minimizers[0][0].residues(), [0, 4]);
        let r = exhaustive_search(7, (2, 3, 1), Objective::MinKneser).unwrap();
        assert_eq!(r.value, zero());

        let r = exhaustive_search(6, (6, 6, 6), Objective::MinDefect).unwrap();
        assert_eq!(r.minimizers, [[ZnSet::full(6), ZnSet::full(6), ZnSet::full(6)]]);
        assert!(matches!(exhaustive_search(6, (7, 1, 1), Objective::MinDefect), Err(Error::Infeasible(_))));
    }

    #[test]
    fn local_search_is_exact_but_not_optimal() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let r = local_search(12, (3, 3, 3), Objective::MinDefect, 20, &mut rng).unwrap();
        assert!(!r.exhaustive);
        assert!(r.value >= exhaustive_search(12, (3, 3, 3), Objective::MinDefect).unwrap().value);
        let m = &r.minimizers[0];
        assert_eq!(r.value, zn_defect(&m[0], &m[1], &m[2]).unwrap());
        // falls back to local moves past N = 24
        let r = search(30, (5, 5, 5), Objective::MinKneser, 4, &mut rng).unwrap();
        assert!(!r.exhaustive && r.value <= int(4));
    }

    #[test]
    fn agreement_examples() {
        let q = IntervalSet::interval(zero(), rat(1, 4));
        let g = agreement_check(&q, &q, &q, 1024);
        assert!(g.gap <= rat(12, 1024));
        let b = BohrSet::new(2, rat(1, 10), rat(1, 7)).unwrap().to_set();
        let g = agreement_check(&b, &b, &b.translate(&rat(1, 5)), 1024);
        assert!(g.within_bound());
    }
}

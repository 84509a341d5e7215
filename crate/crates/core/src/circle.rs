//! Exact set algebra for finite unions of closed arcs on the circle `R/Z`.
//!
//! Sets are identified up to Lebesgue-null differences: touching arcs merge,
//! isolated points vanish and closed/open boundaries are not distinguished.
//! Every [`IntervalSet`] is stored in a canonical form, so `==` is set
//! equality.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{frac, fmt_rational, half, max_r, min_r, one, zero, Rational};
use crate::{Error, Result};

/// A point of the circle, stored as its representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CirclePoint(Rational);

impl CirclePoint {
    pub fn new(x: Rational) -> Self {
        CirclePoint(frac(&x))
    }

    pub fn zero() -> Self {
        CirclePoint(zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    pub fn add(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint::new(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint::new(&self.0 - &other.0)
    }

    pub fn neg(&self) -> CirclePoint {
        CirclePoint::new(-&self.0)
    }

    /// `‖x‖`: distance to the nearest integer.
    pub fn norm(&self) -> Rational {
        min_r(&self.0, &(one() - &self.0))
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

/// `‖x‖` for an arbitrary real representative.
pub fn circle_norm(x: &Rational) -> Rational {
    CirclePoint::new(x.clone()).norm()
}

/// Closed arc `[center - halfwidth, center + halfwidth]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arc {
    center: CirclePoint,
    halfwidth: Rational,
}

impl Arc {
    /// Requires `0 < halfwidth <= 1/2`.
    pub fn new(center: Rational, halfwidth: Rational) -> Result<Self> {
        if !halfwidth.is_positive() || halfwidth > half() {
            return Err(Error::Range(alloc::format!(
                "arc halfwidth {} not in (0, 1/2]",
                fmt_rational(&halfwidth)
            )));
        }
        Ok(Arc { center: CirclePoint::new(center), halfwidth })
    }

    pub(crate) fn from_left(left: &Rational, length: &Rational) -> Self {
        let halfwidth = length / Rational::from_integer(2.into());
        Arc { center: CirclePoint::new(left + &halfwidth), halfwidth }
    }

    pub fn full() -> Self {
        Arc { center: CirclePoint::zero(), halfwidth: half() }
    }

    pub fn center(&self) -> &CirclePoint {
        &self.center
    }

    pub fn halfwidth(&self) -> &Rational {
        &self.halfwidth
    }

    pub fn length(&self) -> Rational {
        &self.halfwidth + &self.halfwidth
    }

    /// Left endpoint in `[0, 1)`.
    pub fn left(&self) -> Rational {
        frac(&(self.center.value() - &self.halfwidth))
    }

    pub fn is_full(&self) -> bool {
        self.halfwidth == half()
    }

    /// The arc as one or two segments of `[0, 1]`.
    pub(crate) fn segments(&self, out: &mut Vec<(Rational, Rational)>) {
        if self.is_full() {
            out.push((zero(), one()));
            return;
        }
        let l = self.left();
        let r = &l + self.length();
        if r > one() {
            out.push((l, one()));
            out.push((zero(), r - one()));
        } else {
            out.push((l, r));
        }
    }
}

/// Canonical finite union of pairwise disjoint closed arcs, sorted by left
/// endpoint in `[0, 1)`. The empty vector is the empty set.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntervalSet {
    arcs: Vec<Arc>,
}

/// Set operations accepted by [`boolean`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Difference,
    SymDiff,
}

/// Rigid motions and complementation accepted by [`transform`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetTransform {
    Translate(CirclePoint),
    Negate,
    Complement,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        IntervalSet { arcs: alloc::vec![Arc::full()] }
    }

    /// Single closed arc `[left, right]` given by real endpoints with
    /// `left <= right <= left + 1`.
    pub fn interval(left: Rational, right: Rational) -> Self {
        if right <= left {
            return IntervalSet::empty();
        }
        let len = &right - &left;
        if len >= one() {
            return IntervalSet::full();
        }
        IntervalSet { arcs: alloc::vec![Arc::from_left(&frac(&left), &len)] }
    }

    /// Arc with the given center and halfwidth; halfwidth `0` gives the empty
    /// set and halfwidth `>= 1/2` the whole circle.
    pub fn arc(center: Rational, halfwidth: Rational) -> Self {
        if !halfwidth.is_positive() {
            return IntervalSet::empty();
        }
        if halfwidth >= half() {
            return IntervalSet::full();
        }
        IntervalSet { arcs: alloc::vec![Arc { center: CirclePoint::new(center), halfwidth }] }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].is_full()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    /// Number of arc endpoints (the full circle has none).
    pub fn endpoint_count(&self) -> usize {
        if self.is_full() { 0 } else { 2 * self.arcs.len() }
    }

    pub fn measure(&self) -> Rational {
        self.arcs.iter().map(Arc::length).fold(zero(), |a, b| a + b)
    }

    /// Disjoint segments of `[0, 1]`, sorted, with the arc that wraps past `0`
    /// split in two.
    pub fn segments(&self) -> Vec<(Rational, Rational)> {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        for a in &self.arcs {
            a.segments(&mut out);
        }
        out.sort();
        out
    }

    /// Canonical set from segments `[l, r]` with `0 <= l`, `r <= 1`. Segments
    /// may overlap, touch or be degenerate.
    pub fn from_segments(mut segs: Vec<(Rational, Rational)>) -> Self {
        segs.retain(|(l, r)| l < r);
        if segs.is_empty() {
            return IntervalSet::empty();
        }
        segs.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(segs.len());
        for (l, r) in segs {
            match merged.last_mut() {
                Some(last) if l <= last.1 => {
                    if r > last.1 {
                        last.1 = r;
                    }
                }
                _ => merged.push((l, r)),
            }
        }
        if merged.len() == 1 && merged[0].0.is_zero() && merged[0].1 >= one() {
            return IntervalSet::full();
        }
        let wraps = merged.len() > 1 && merged[0].0.is_zero() && merged[merged.len() - 1].1 == one();
        let mut arcs = Vec::with_capacity(merged.len());
        let (head, body) = if wraps {
            let (_, first_r) = merged.remove(0);
            (Some(first_r), merged)
        } else {
            (None, merged)
        };
        let n = body.len();
        for (i, (l, r)) in body.into_iter().enumerate() {
            let mut len = &r - &l;
            if i + 1 == n {
                if let Some(first_r) = &head {
                    len += first_r;
                }
            }
            arcs.push(Arc::from_left(&l, &len));
        }
        IntervalSet { arcs }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let x = frac(x);
        self.segments().iter().any(|(l, r)| *l <= x && x <= *r)
    }

    pub fn translate(&self, y: &Rational) -> Self {
        transform(self, &SetTransform::Translate(CirclePoint::new(y.clone())))
    }

    pub fn negate(&self) -> Self {
        transform(self, &SetTransform::Negate)
    }

    pub fn complement(&self) -> Self {
        transform(self, &SetTransform::Complement)
    }

    pub fn union(&self, other: &Self) -> Self {
        boolean(BoolOp::Union, self, other)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        boolean(BoolOp::Intersect, self, other)
    }

    pub fn difference(&self, other: &Self) -> Self {
        boolean(BoolOp::Difference, self, other)
    }

    pub fn symdiff(&self, other: &Self) -> Self {
        boolean(BoolOp::SymDiff, self, other)
    }

    /// `self ⊆ other` up to null sets.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Endpoints (left, right) of every arc, right endpoints possibly past 1.
    pub fn endpoints(&self) -> Vec<Rational> {
        let mut v = Vec::with_capacity(2 * self.arcs.len());
        if self.is_full() {
            return v;
        }
        for a in &self.arcs {
            let l = a.left();
            let r = &l + a.length();
            v.push(l);
            v.push(frac(&r));
        }
        v
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.arcs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "c={} h={}", a.center, fmt_rational(&a.halfwidth))?;
        }
        f.write_str("}")
    }
}

/// Canonical form of the union of `raw`.
pub fn normalize(raw: &[Arc]) -> IntervalSet {
    let mut segs = Vec::with_capacity(raw.len() + 1);
    for a in raw {
        a.segments(&mut segs);
    }
    IntervalSet::from_segments(segs)
}

/// Lebesgue measure, exact.
pub fn measure(s: &IntervalSet) -> Rational {
    s.measure()
}

fn intersect_segments(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let l = max_r(&a[i].0, &b[j].0);
        let r = min_r(&a[i].1, &b[j].1);
        if l < r {
            out.push((l, r));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn complement_segments(a: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut out = Vec::with_capacity(a.len() + 1);
    let mut cursor = zero();
    for (l, r) in a {
        if *l > cursor {
            out.push((cursor.clone(), l.clone()));
        }
        if *r > cursor {
            cursor = r.clone();
        }
    }
    if cursor < one() {
        out.push((cursor, one()));
    }
    out
}

pub fn boolean(op: BoolOp, s1: &IntervalSet, s2: &IntervalSet) -> IntervalSet {
    let a = s1.segments();
    let b = s2.segments();
    match op {
        BoolOp::Union => {
            let mut v = a;
            v.extend(b);
            IntervalSet::from_segments(v)
        }
        BoolOp::Intersect => IntervalSet::from_segments(intersect_segments(&a, &b)),
        BoolOp::Difference => {
            let nb = complement_segments(&b);
            IntervalSet::from_segments(intersect_segments(&a, &nb))
        }
        BoolOp::SymDiff => {
            let na = complement_segments(&a);
            let nb = complement_segments(&b);
            let mut v = intersect_segments(&a, &nb);
            v.extend(intersect_segments(&b, &na));
            IntervalSet::from_segments(v)
        }
    }
}

pub fn transform(s: &IntervalSet, kind: &SetTransform) -> IntervalSet {
    match kind {
        SetTransform::Translate(y) => {
            if s.is_full() || y.value().is_zero() {
                return s.clone();
            }
            let arcs: Vec<Arc> = s
                .arcs
                .iter()
                .map(|a| Arc { center: a.center.add(y), halfwidth: a.halfwidth.clone() })
                .collect();
            normalize(&arcs)
        }
        SetTransform::Negate => {
            if s.is_full() {
                return s.clone();
            }
            let arcs: Vec<Arc> = s
                .arcs
                .iter()
                .map(|a| Arc { center: a.center.neg(), halfwidth: a.halfwidth.clone() })
                .collect();
            normalize(&arcs)
        }
        SetTransform::Complement => IntervalSet::from_segments(complement_segments(&s.segments())),
    }
}

/// The closed arc centered at `0` with the same measure as `s`.
pub fn symmetrize(s: &IntervalSet) -> IntervalSet {
    star_arc(&s.measure())
}

/// Arc centered at `0` of the given length (clamped to `[0, 1]`).
pub fn star_arc(length: &Rational) -> IntervalSet {
    IntervalSet::arc(zero(), length / Rational::from_integer(2.into()))
}

/// Open sumset `{x : 1_A * 1_B (x) > 0}` up to its null boundary: the union of
/// all pairwise arc sums.
pub fn sumset0(s1: &IntervalSet, s2: &IntervalSet) -> Result<IntervalSet> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptyInput("sumset of an empty set"));
    }
    let mut arcs = Vec::with_capacity(s1.len() * s2.len());
    for a in s1.arcs() {
        for b in s2.arcs() {
            let h = &a.halfwidth + &b.halfwidth;
            if h >= half() {
                return Ok(IntervalSet::full());
            }
            arcs.push(Arc { center: a.center.add(&b.center), halfwidth: h });
        }
    }
    Ok(normalize(&arcs))
}

/// Is the set a single arc centered at `0` (or empty / full)?
pub fn is_centered_arc(s: &IntervalSet) -> bool {
    s.is_empty() || s.is_full() || (s.len() == 1 && s.arcs[0].center.value().is_zero())
}

/// Convenience: union of arcs given as `(center, halfwidth)` pairs, ignoring
/// nonpositive halfwidths.
pub fn from_arcs(pairs: &[(Rational, Rational)]) -> IntervalSet {
    let mut segs = Vec::new();
    for (c, h) in pairs {
        if !h.is_positive() {
            continue;
        }
        if *h >= half() {
            return IntervalSet::full();
        }
        Arc { center: CirclePoint::new(c.clone()), halfwidth: h.clone() }.segments(&mut segs);
    }
    IntervalSet::from_segments(segs)
}

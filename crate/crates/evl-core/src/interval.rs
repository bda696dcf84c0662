//! Exact set algebra on finite unions of subintervals of `[0,1)`.
//!
//! An [`IntervalUnion`] is a sorted, pairwise-disjoint list of parts with
//! explicit open/closed endpoint flags. Degenerate single points (atoms)
//! are kept: they have Lebesgue measure zero but still matter for
//! membership. Preimages are taken under iterates of the tripling map,
//! which acts branch-by-branch as `x -> (x + k) / 3^i`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{EvlError, Result};
use crate::precision::{BoundedOrdering, BoundedValue};

/// The map `x -> 3x mod 1`. The algebra below is generic over the branch
/// count, but this is the only map instantiated.
#[derive(Debug, Clone, Copy, Default)]
pub struct TriplingMap;

impl TriplingMap {
    pub const BRANCHES: u32 = 3;

    /// One exact step of the map on a rational point.
    pub fn step(&self, x: &BigRational) -> BigRational {
        let y = x * BigRational::from_integer(BigInt::from(3));
        let f = y.floor();
        y - f
    }

    /// `3^i` as a big integer.
    pub fn branch_count(&self, i: u32) -> BigInt {
        BigInt::from(3u32).pow(i)
    }
}

/// Default cap on the number of parts a preimage computation may produce.
pub const DEFAULT_PART_CAP: u64 = 2_000_000;

/// One interval part with endpoint enclosures and closedness flags.
#[derive(Debug, Clone)]
pub struct Part {
    pub lo: BoundedValue,
    pub hi: BoundedValue,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Part {
    pub fn new(lo: BoundedValue, hi: BoundedValue, lo_closed: bool, hi_closed: bool) -> Self {
        Part { lo, hi, lo_closed, hi_closed }
    }

    /// Closed-closed part from exact rationals.
    pub fn closed(lo: BigRational, hi: BigRational) -> Self {
        Part::new(BoundedValue::exact(lo), BoundedValue::exact(hi), true, true)
    }

    /// Open-open part from exact rationals.
    pub fn open(lo: BigRational, hi: BigRational) -> Self {
        Part::new(BoundedValue::exact(lo), BoundedValue::exact(hi), false, false)
    }

    /// A single point (atom).
    pub fn atom(x: BigRational) -> Self {
        let v = BoundedValue::exact(x);
        Part::new(v.clone(), v, true, true)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.lo.compare(&self.hi), BoundedOrdering::EqualExpr)
    }

    fn length(&self) -> BoundedValue {
        self.hi.sub(&self.lo)
    }

    /// Whether the part is empty, conclusive or error.
    fn try_is_empty(&self) -> Result<bool> {
        match self.lo.compare(&self.hi) {
            BoundedOrdering::Less => Ok(false),
            BoundedOrdering::EqualExpr => Ok(!(self.lo_closed && self.hi_closed)),
            BoundedOrdering::Greater => Ok(true),
            BoundedOrdering::Inconclusive => Err(EvlError::PrecisionExhausted(
                "cannot decide interval emptiness".into(),
            )),
        }
    }
}

#[derive(Serialize)]
struct PartJson {
    lo: String,
    hi: String,
    lo_closed: bool,
    hi_closed: bool,
}

/// Sorted disjoint union of interval parts inside `[0,1)`.
#[derive(Debug, Clone, Default)]
pub struct IntervalUnion {
    parts: Vec<Part>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: vec![] }
    }

    /// The whole phase space `[0,1)`.
    pub fn full() -> Self {
        IntervalUnion {
            parts: vec![Part::new(
                BoundedValue::exact(BigRational::zero()),
                BoundedValue::exact(BigRational::one()),
                true,
                false,
            )],
        }
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of connected components (touching closed endpoints were
    /// already merged during normalization).
    pub fn component_count(&self) -> usize {
        self.parts.len()
    }

    /// Sort, drop empties, and merge overlapping or touching parts.
    /// Idempotent; fails only if a needed comparison is inconclusive.
    pub fn normalize(raw: Vec<Part>) -> Result<Self> {
        let mut parts: Vec<Part> = Vec::with_capacity(raw.len());
        for p in raw {
            if !p.try_is_empty()? {
                parts.push(p);
            }
        }
        // total order on central values; overlapping enclosures surface as
        // Inconclusive in the merge pass below
        parts.sort_by(|a, b| {
            a.lo.value()
                .cmp(b.lo.value())
                .then_with(|| a.hi.value().cmp(b.hi.value()))
        });
        let mut out: Vec<Part> = Vec::with_capacity(parts.len());
        for p in parts {
            match out.last_mut() {
                None => out.push(p),
                Some(last) => match last.hi.compare(&p.lo) {
                    BoundedOrdering::Less => out.push(p),
                    BoundedOrdering::EqualExpr => {
                        // touching: merge when at least one side includes the point
                        if last.hi_closed || p.lo_closed {
                            merge_hi(last, p)?;
                        } else {
                            out.push(p);
                        }
                    }
                    BoundedOrdering::Greater => {
                        // overlap: extend the last part if p reaches further
                        merge_hi(last, p)?;
                    }
                    BoundedOrdering::Inconclusive => {
                        return Err(EvlError::PrecisionExhausted(
                            "cannot decide part adjacency".into(),
                        ))
                    }
                },
            }
        }
        Ok(IntervalUnion { parts: out })
    }

    /// Complement within `[0,1)`.
    pub fn complement(&self) -> Result<Self> {
        let zero = BoundedValue::exact(BigRational::zero());
        let one = BoundedValue::exact(BigRational::one());
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut cursor = zero.clone();
        let mut cursor_closed = true; // [0, ...
        for p in &self.parts {
            out.push(Part::new(cursor, p.lo.clone(), cursor_closed, !p.lo_closed));
            cursor = p.hi.clone();
            cursor_closed = !p.hi_closed;
        }
        out.push(Part::new(cursor, one, cursor_closed, false));
        Self::normalize(out)
    }

    /// Exact intersection.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        let mut out = Vec::new();
        // two-pointer sweep over sorted parts
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.parts.len() && j < other.parts.len() {
            let a = &self.parts[i];
            let b = &other.parts[j];
            if let Some(p) = intersect_parts(a, b)? {
                out.push(p);
            }
            // advance the part that ends first
            match a.hi.compare(&b.hi) {
                BoundedOrdering::Less => i += 1,
                BoundedOrdering::Greater => j += 1,
                BoundedOrdering::EqualExpr => {
                    i += 1;
                    j += 1;
                }
                BoundedOrdering::Inconclusive => {
                    return Err(EvlError::PrecisionExhausted(
                        "cannot order part ends in intersection".into(),
                    ))
                }
            }
        }
        Self::normalize(out)
    }

    /// Lebesgue measure: sum of part lengths with propagated radii. Atoms
    /// contribute zero.
    pub fn measure(&self) -> BoundedValue {
        let mut acc = BoundedValue::exact(BigRational::zero());
        for p in &self.parts {
            acc = acc.add(&p.length());
        }
        acc
    }

    /// Membership of an exact rational point; conclusive or error.
    pub fn contains(&self, x: &BigRational) -> Result<bool> {
        let xv = BoundedValue::exact(x.clone());
        // binary search on lower endpoints
        let mut lo = 0usize;
        let mut hi = self.parts.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.parts[mid].lo.compare(&xv) {
                BoundedOrdering::Less | BoundedOrdering::EqualExpr => lo = mid + 1,
                BoundedOrdering::Greater => hi = mid,
                BoundedOrdering::Inconclusive => {
                    return Err(EvlError::PrecisionExhausted("membership undecidable".into()))
                }
            }
        }
        // candidate parts: lo-1 (x >= its lo) and lo (x might equal its lo)
        for idx in [lo.wrapping_sub(1), lo] {
            if idx >= self.parts.len() {
                continue;
            }
            let p = &self.parts[idx];
            let ge_lo = match p.lo.compare(&xv) {
                BoundedOrdering::Less => true,
                BoundedOrdering::EqualExpr => p.lo_closed,
                BoundedOrdering::Greater => false,
                BoundedOrdering::Inconclusive => {
                    return Err(EvlError::PrecisionExhausted("membership undecidable".into()))
                }
            };
            let le_hi = match xv.compare(&p.hi) {
                BoundedOrdering::Less => true,
                BoundedOrdering::EqualExpr => p.hi_closed,
                BoundedOrdering::Greater => false,
                BoundedOrdering::Inconclusive => {
                    return Err(EvlError::PrecisionExhausted("membership undecidable".into()))
                }
            };
            if ge_lo && le_hi {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Exact preimage under `f^i` for the tripling map:
    /// `f^-i(U) = ∪_{k=0..3^i-1} (U + k) / 3^i`.
    ///
    /// Materializes all branches; fails with `CapExceeded` when the result
    /// would have more than `cap` parts.
    pub fn preimage(&self, map: TriplingMap, i: u32, cap: u64) -> Result<Self> {
        if i == 0 {
            return Ok(self.clone());
        }
        let branches = map.branch_count(i);
        let needed = (branches.to_u64().unwrap_or(u64::MAX))
            .saturating_mul(self.parts.len() as u64);
        if needed > cap {
            return Err(EvlError::CapExceeded { needed, cap });
        }
        let scale = BigRational::new(BigInt::one(), branches.clone());
        let mut out = Vec::with_capacity(needed as usize);
        let mut k = BigInt::zero();
        while k < branches {
            let shift = BoundedValue::exact(BigRational::from_integer(k.clone()));
            for p in &self.parts {
                out.push(Part::new(
                    p.lo.add(&shift).scale(&scale),
                    p.hi.add(&shift).scale(&scale),
                    p.lo_closed,
                    p.hi_closed,
                ));
            }
            k += BigInt::one();
        }
        Self::normalize(out)
    }

    /// `f^-i(target) ∩ within`, without materializing all `3^i` branches:
    /// only branches that meet `within` are visited.
    pub fn preimage_intersect(
        &self,
        map: TriplingMap,
        i: u32,
        within: &Self,
        cap: u64,
    ) -> Result<Self> {
        if i == 0 {
            return self.intersect(within);
        }
        let t = map.branch_count(i);
        let t_rat = BigRational::from_integer(t.clone());
        let scale = BigRational::new(BigInt::one(), t.clone());
        let mut out: Vec<Part> = Vec::new();
        for w in within.parts() {
            // conservative branch range (slack of one branch on each side
            // costs nothing: empty intersections drop out)
            let klo = (w.lo.lower() * &t_rat).floor().to_integer();
            let khi = (w.hi.upper() * &t_rat).floor().to_integer();
            let mut k = klo;
            while k <= khi {
                let shift = BoundedValue::exact(BigRational::from_integer(k.clone()));
                for p in &self.parts {
                    let cand = Part::new(
                        p.lo.add(&shift).scale(&scale),
                        p.hi.add(&shift).scale(&scale),
                        p.lo_closed,
                        p.hi_closed,
                    );
                    if let Some(piece) = intersect_parts(&cand, w)? {
                        out.push(piece);
                        if out.len() as u64 > cap {
                            return Err(EvlError::CapExceeded {
                                needed: out.len() as u64,
                                cap,
                            });
                        }
                    }
                }
                k += BigInt::one();
            }
        }
        Self::normalize(out)
    }

    /// Serialize to the canonical JSON array with `"p/q"` endpoints.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<PartJson> = self
            .parts
            .iter()
            .map(|p| PartJson {
                lo: p.lo.to_rational_string(),
                hi: p.hi.to_rational_string(),
                lo_closed: p.lo_closed,
                hi_closed: p.hi_closed,
            })
            .collect();
        serde_json::to_value(rows).expect("interval union serializes")
    }
}

fn merge_hi(last: &mut Part, p: Part) -> Result<()> {
    match last.hi.compare(&p.hi) {
        BoundedOrdering::Less => {
            last.hi = p.hi;
            last.hi_closed = p.hi_closed;
        }
        BoundedOrdering::EqualExpr => {
            last.hi_closed = last.hi_closed || p.hi_closed;
        }
        BoundedOrdering::Greater => {}
        BoundedOrdering::Inconclusive => {
            return Err(EvlError::PrecisionExhausted("cannot merge parts".into()))
        }
    }
    Ok(())
}

fn intersect_parts(a: &Part, b: &Part) -> Result<Option<Part>> {
    let (lo, lo_closed) = match a.lo.compare(&b.lo) {
        BoundedOrdering::Less => (b.lo.clone(), b.lo_closed),
        BoundedOrdering::Greater => (a.lo.clone(), a.lo_closed),
        BoundedOrdering::EqualExpr => (a.lo.clone(), a.lo_closed && b.lo_closed),
        BoundedOrdering::Inconclusive => {
            return Err(EvlError::PrecisionExhausted("cannot intersect parts".into()))
        }
    };
    let (hi, hi_closed) = match a.hi.compare(&b.hi) {
        BoundedOrdering::Less => (a.hi.clone(), a.hi_closed),
        BoundedOrdering::Greater => (b.hi.clone(), b.hi_closed),
        BoundedOrdering::EqualExpr => (a.hi.clone(), a.hi_closed && b.hi_closed),
        BoundedOrdering::Inconclusive => {
            return Err(EvlError::PrecisionExhausted("cannot intersect parts".into()))
        }
    };
    let piece = Part::new(lo, hi, lo_closed, hi_closed);
    if piece.try_is_empty()? {
        Ok(None)
    } else {
        Ok(Some(piece))
    }
}

/// `A_q(U) = U ∩ ∩_{i=1..q} f^-i(U^c)`: the points of `U` whose next `q`
/// iterates all avoid `U`.
pub fn survivor_set(u: &IntervalUnion, q: u32, cap: u64) -> Result<IntervalUnion> {
    let map = TriplingMap;
    let uc = u.complement()?;
    let mut a = u.clone();
    for i in 1..=q {
        if a.is_empty() {
            break;
        }
        a = uc.preimage_intersect(map, i, &a, cap)?;
    }
    Ok(a)
}

/// `W_{s,l}(B) = ∩_{i=floor(s)..floor(s)+max(floor(l)-1,0)} f^-i(B^c)`:
/// the event of avoiding `B` at every time in the window.
pub fn window_avoidance(b: &IntervalUnion, s: u32, l: u32, cap: u64) -> Result<IntervalUnion> {
    let map = TriplingMap;
    let bc = b.complement()?;
    let hi = s + l.saturating_sub(1).max(0);
    let mut w = IntervalUnion::full();
    for i in s..=hi {
        w = bc.preimage_intersect(map, i, &w, cap)?;
        if w.is_empty() {
            break;
        }
    }
    Ok(w)
}

/// Exact `Leb(A ∩ f^-j(B))` via per-branch arithmetic, in closed form over
/// the `3^j` branch grid. Never materializes the preimage, so arbitrarily
/// large lags stay cheap: full branches contribute `|A-part|·|B-part|`-type
/// products and only the two boundary branches need explicit intersection.
pub fn overlap_measure_at_lag(
    a: &IntervalUnion,
    b: &IntervalUnion,
    j: u32,
) -> Result<BoundedValue> {
    if j == 0 {
        return Ok(a.intersect(b)?.measure());
    }
    let t = TriplingMap.branch_count(j);
    let t_rat = BigRational::from_integer(t.clone());
    let mut total = BoundedValue::exact(BigRational::zero());
    for pa in a.parts() {
        for pb in b.parts() {
            // branches k with (pb + k)/3^j meeting pa
            let klo = (pa.lo.lower() * &t_rat).floor().to_integer();
            let khi = (pa.hi.upper() * &t_rat).floor().to_integer();
            if &khi - &klo >= BigInt::from(2) {
                // interior branches are fully inside the hull of pa's
                // endpoint enclosures; the hull-versus-part slack is covered
                // by widening the radius below
                let full = &khi - &klo - BigInt::one();
                let seg = pb.length().scale(&BigRational::new(full, t.clone()));
                total = total.add(&seg);
                let slack = pa.lo.radius() + pa.hi.radius();
                total = total.add(&BoundedValue::new(BigRational::zero(), &slack + &slack));
            }
            // boundary branches exactly
            let boundary = if khi == klo { vec![klo] } else { vec![klo, khi] };
            for k in boundary {
                let shift = BoundedValue::exact(BigRational::from_integer(k));
                let scale = BigRational::new(BigInt::one(), t.clone());
                let cand = Part::new(
                    pb.lo.add(&shift).scale(&scale),
                    pb.hi.add(&shift).scale(&scale),
                    pb.lo_closed,
                    pb.hi_closed,
                );
                if let Some(piece) = intersect_parts(&cand, pa)? {
                    total = total.add(&piece.length());
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::ratio;

    fn iu(parts: Vec<Part>) -> IntervalUnion {
        IntervalUnion::normalize(parts).unwrap()
    }

    fn closed(a: (i64, i64), b: (i64, i64)) -> Part {
        Part::closed(ratio(a.0, a.1), ratio(b.0, b.1))
    }

    #[test]
    fn normalize_merges_overlap() {
        let u = iu(vec![closed((2, 10), (4, 10)), closed((3, 10), (5, 10))]);
        assert_eq!(u.len(), 1);
        assert_eq!(*u.measure().value(), ratio(3, 10));
    }

    #[test]
    fn normalize_empty_and_adjacent() {
        let u = iu(vec![]);
        assert!(u.is_empty());
        assert!(u.measure().value().is_zero());
        let u = iu(vec![closed((0, 1), (1, 3)), closed((1, 3), (2, 3))]);
        assert_eq!(u.len(), 1, "touching closed endpoints merge");
        assert_eq!(*u.measure().value(), ratio(2, 3));
    }

    #[test]
    fn normalize_is_idempotent() {
        let u = iu(vec![closed((1, 9), (2, 9)), closed((4, 9), (5, 9))]);
        let again = IntervalUnion::normalize(u.parts().to_vec()).unwrap();
        assert_eq!(again.len(), u.len());
        assert_eq!(again.measure().value(), u.measure().value());
    }

    #[test]
    fn complement_basics() {
        let u = iu(vec![closed((1, 4), (1, 2))]);
        let c = u.complement().unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(*c.measure().value(), ratio(3, 4));
        // involution
        let cc = c.complement().unwrap();
        assert_eq!(cc.len(), 1);
        assert_eq!(*cc.measure().value(), ratio(1, 4));
        // empty and full
        assert_eq!(IntervalUnion::empty().complement().unwrap().len(), 1);
        assert!(IntervalUnion::full().complement().unwrap().is_empty());
    }

    #[test]
    fn complement_respects_flags() {
        let u = iu(vec![Part::open(ratio(1, 4), ratio(1, 2))]);
        let c = u.complement().unwrap();
        // [0,1/4] and [1/2,1)
        assert!(c.contains(&ratio(1, 4)).unwrap());
        assert!(c.contains(&ratio(1, 2)).unwrap());
        assert!(!c.contains(&ratio(1, 3)).unwrap());
        assert!(!u.contains(&ratio(1, 4)).unwrap());
        assert!(u.contains(&ratio(1, 3)).unwrap());
    }

    #[test]
    fn intersect_basics() {
        let a = iu(vec![closed((0, 1), (1, 2))]);
        let b = iu(vec![closed((1, 4), (3, 4))]);
        let i1 = a.intersect(&b).unwrap();
        assert_eq!(*i1.measure().value(), ratio(1, 4));
        let i2 = b.intersect(&a).unwrap();
        assert_eq!(*i2.measure().value(), ratio(1, 4));
        // disjoint
        let c = iu(vec![closed((8, 10), (9, 10))]);
        assert!(a.intersect(&c).unwrap().is_empty());
        // idempotence
        let aa = a.intersect(&a).unwrap();
        assert_eq!(*aa.measure().value(), ratio(1, 2));
    }

    #[test]
    fn measure_additivity() {
        let a = iu(vec![closed((0, 1), (1, 3))]);
        assert_eq!(*a.measure().value(), ratio(1, 3));
        let c = a.complement().unwrap();
        assert_eq!(
            a.measure().value() + c.measure().value(),
            BigRational::one()
        );
    }

    #[test]
    fn atoms_have_measure_zero_but_membership() {
        let u = iu(vec![Part::atom(BigRational::zero()), closed((1, 3), (2, 3))]);
        assert_eq!(u.len(), 2);
        assert!(u.measure().value() == &ratio(1, 3));
        assert!(u.contains(&BigRational::zero()).unwrap());
        assert!(!u.contains(&ratio(1, 10)).unwrap());
    }

    #[test]
    fn preimage_three_branches() {
        let u = iu(vec![closed((0, 1), (1, 3))]);
        let p = u.preimage(TriplingMap, 1, DEFAULT_PART_CAP).unwrap();
        assert_eq!(p.len(), 3);
        // [0,1/9] ∪ [1/3,4/9] ∪ [2/3,7/9]
        assert!(p.contains(&ratio(1, 18)).unwrap());
        assert!(p.contains(&ratio(7, 18)).unwrap());
        assert!(p.contains(&ratio(13, 18)).unwrap());
        assert!(!p.contains(&ratio(1, 5)).unwrap());
        assert_eq!(*p.measure().value(), ratio(1, 3));
    }

    #[test]
    fn preimage_identity_at_zero() {
        let u = iu(vec![closed((1, 10), (2, 10))]);
        let p = u.preimage(TriplingMap, 0, DEFAULT_PART_CAP).unwrap();
        assert_eq!(p.len(), u.len());
        assert_eq!(p.measure().value(), u.measure().value());
    }

    #[test]
    fn preimage_preserves_measure() {
        let u = iu(vec![closed((1, 10), (2, 10))]);
        let p = u.preimage(TriplingMap, 3, DEFAULT_PART_CAP).unwrap();
        // oracle: sum the 27 branch lengths directly
        let mut oracle = BigRational::zero();
        for _ in 0..27 {
            oracle += ratio(1, 10) / BigRational::from_integer(BigInt::from(27));
        }
        assert_eq!(*p.measure().value(), oracle);
        assert_eq!(*p.measure().value(), ratio(1, 10));
        assert_eq!(p.len(), 27);
    }

    #[test]
    fn preimage_cap() {
        let u = iu(vec![closed((1, 10), (2, 10))]);
        match u.preimage(TriplingMap, 13, 1000) {
            Err(EvlError::CapExceeded { .. }) => {}
            other => panic!("expected CapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn survivor_identity_at_q0() {
        let u = iu(vec![closed((1, 10), (2, 10))]);
        let a = survivor_set(&u, 0, DEFAULT_PART_CAP).unwrap();
        assert_eq!(a.measure().value(), u.measure().value());
    }

    #[test]
    fn survivor_ball_at_fixed_point() {
        // U = [0, eps): one step of the map keeps exactly the first third
        let eps = ratio(1, 27);
        let u = iu(vec![Part::new(
            BoundedValue::exact(BigRational::zero()),
            BoundedValue::exact(eps.clone()),
            true,
            false,
        )]);
        let a = survivor_set(&u, 1, DEFAULT_PART_CAP).unwrap();
        let ratio_meas = a.measure().value() / u.measure().value();
        assert_eq!(ratio_meas, ratio(2, 3));
    }

    #[test]
    fn survivor_monotone_in_q() {
        let u = iu(vec![closed((0, 1), (1, 27)), closed((1, 3), (10, 27))]);
        let mut prev = u.measure().value().clone();
        for q in 1..=5 {
            let a = survivor_set(&u, q, DEFAULT_PART_CAP).unwrap();
            let m = a.measure().value().clone();
            assert!(m <= prev, "survivor measure must be nonincreasing in q");
            prev = m;
        }
    }

    #[test]
    fn preimage_intersect_agrees_with_materialized() {
        let u = iu(vec![closed((1, 27), (4, 27)), closed((20, 27), (22, 27))]);
        let within = iu(vec![closed((1, 9), (5, 9))]);
        for i in 0..=5 {
            let full = u
                .preimage(TriplingMap, i, DEFAULT_PART_CAP)
                .unwrap()
                .intersect(&within)
                .unwrap();
            let fast = u
                .preimage_intersect(TriplingMap, i, &within, DEFAULT_PART_CAP)
                .unwrap();
            assert_eq!(full.len(), fast.len(), "i={i}");
            assert_eq!(full.measure().value(), fast.measure().value(), "i={i}");
        }
    }

    #[test]
    fn overlap_lag_matches_direct() {
        let a = iu(vec![closed((1, 27), (4, 27)), closed((2, 3), (7, 9))]);
        let b = iu(vec![closed((0, 1), (1, 9)), closed((1, 3), (4, 9))]);
        for j in 0..=7 {
            let direct = a
                .intersect(&b.preimage(TriplingMap, j, DEFAULT_PART_CAP).unwrap())
                .unwrap()
                .measure();
            let fast = overlap_measure_at_lag(&a, &b, j).unwrap();
            assert_eq!(direct.value(), fast.value(), "lag {j}");
        }
    }

    #[test]
    fn window_avoidance_identity() {
        // W_{0,n}(U) on a digit grid equals "no orbit point enters U"
        let u = iu(vec![closed((1, 9), (2, 9))]);
        let w = window_avoidance(&u, 0, 4, DEFAULT_PART_CAP).unwrap();
        let map = TriplingMap;
        let d = 6u32;
        let den = BigInt::from(3u32).pow(d);
        for m in 0..3u32.pow(d) {
            let x = BigRational::new(
                BigInt::from(2 * m + 1),
                BigInt::from(2) * den.clone(),
            );
            let mut orbit_avoids = true;
            let mut y = x.clone();
            for _ in 0..4 {
                if u.contains(&y).unwrap() {
                    orbit_avoids = false;
                    break;
                }
                y = map.step(&y);
            }
            assert_eq!(w.contains(&x).unwrap(), orbit_avoids, "x = {x}");
        }
    }

    #[test]
    fn serialization_shape() {
        let u = iu(vec![closed((1, 4), (1, 2))]);
        let v = u.to_json();
        assert_eq!(v[0]["lo"], "1/4");
        assert_eq!(v[0]["hi"], "1/2");
        assert_eq!(v[0]["lo_closed"], true);
    }
}

//! Exact rational enclosures with rigorous error radii.
//!
//! Every special point of the construction (the base point of the maximal
//! set, its forward images, interval endpoints, `exp`/`log` values) is
//! carried as a [`BoundedValue`]: an exact rational together with an exact
//! non-negative rational radius. Arithmetic propagates radii without
//! underestimation, and comparisons are either conclusive or explicitly
//! [`BoundedOrdering::Inconclusive`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{EvlError, Result};

/// `3^e` as an exact rational, for any integer exponent.
pub fn pow3(e: i64) -> BigRational {
    let p = BigInt::from(3u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Rational from an integer pair.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Depth control for the truncated series backing the special points.
///
/// `depth` is the number of retained series terms; comparisons that stay
/// inconclusive are retried with doubled depth up to `max_depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PrecisionConfig {
    pub depth: u32,
    pub max_depth: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        // 3^(-3^6) is far below every tolerance used downstream.
        PrecisionConfig { depth: 5, max_depth: 12 }
    }
}

impl PrecisionConfig {
    pub fn new(depth: u32, max_depth: u32) -> Result<Self> {
        if depth == 0 || depth > max_depth {
            return Err(EvlError::InvalidConfig(format!(
                "require 1 <= depth <= max_depth, got depth={depth}, max_depth={max_depth}"
            )));
        }
        Ok(PrecisionConfig { depth, max_depth })
    }

    /// Depths to try in order: the configured depth, doubling up to the cap.
    pub fn ladder(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut k = self.depth;
        loop {
            out.push(k.min(self.max_depth));
            if k >= self.max_depth {
                break;
            }
            k *= 2;
        }
        out
    }
}

/// Outcome of comparing two enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundedOrdering {
    Less,
    Greater,
    /// Both operands are the same exact expression (identical rational and
    /// radius). For radius zero this is plain equality of rationals; for a
    /// positive radius it means the operands were produced by the same
    /// computation and denote the same real number.
    EqualExpr,
    /// Enclosures overlap; the caller must deepen and retry.
    Inconclusive,
}

/// An exact rational `value` standing for some real `x` with
/// `|x - value| <= radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedValue {
    value: BigRational,
    radius: BigRational,
}

impl BoundedValue {
    pub fn new(value: BigRational, radius: BigRational) -> Self {
        assert!(!radius.is_negative(), "radius must be non-negative");
        BoundedValue { value, radius }
    }

    /// An exact rational point (radius zero).
    pub fn exact(value: BigRational) -> Self {
        BoundedValue { value, radius: BigRational::zero() }
    }

    pub fn exact_int(v: i64) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn exact_ratio(num: i64, den: i64) -> Self {
        Self::exact(ratio(num, den))
    }

    /// Enclosure from explicit lower/upper rational bounds.
    pub fn from_bounds(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi);
        let two = BigRational::from_integer(BigInt::from(2));
        let value = (&lo + &hi) / &two;
        let radius = (&hi - &lo) / two;
        BoundedValue { value, radius }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn lower(&self) -> BigRational {
        &self.value - &self.radius
    }

    pub fn upper(&self) -> BigRational {
        &self.value + &self.radius
    }

    pub fn add(&self, other: &Self) -> Self {
        BoundedValue {
            value: &self.value + &other.value,
            radius: &self.radius + &other.radius,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        BoundedValue {
            value: &self.value - &other.value,
            radius: &self.radius + &other.radius,
        }
    }

    pub fn neg(&self) -> Self {
        BoundedValue { value: -self.value.clone(), radius: self.radius.clone() }
    }

    /// Scale by an exact rational.
    pub fn scale(&self, c: &BigRational) -> Self {
        BoundedValue {
            value: &self.value * c,
            radius: &self.radius * c.abs(),
        }
    }

    /// Midpoint `(a + b) / 2` with propagated radii.
    pub fn midpoint(&self, other: &Self) -> Self {
        self.add(other).scale(&ratio(1, 2))
    }

    /// Product of two enclosures (worst-case radius).
    pub fn mul(&self, other: &Self) -> Self {
        let value = &self.value * &other.value;
        let radius = self.value.abs() * &other.radius
            + other.value.abs() * &self.radius
            + &self.radius * &other.radius;
        BoundedValue { value, radius }
    }

    /// Reciprocal; requires the enclosure to exclude zero.
    pub fn recip(&self) -> Result<Self> {
        let lo = self.lower();
        let hi = self.upper();
        if !lo.is_positive() && !hi.is_negative() {
            return Err(EvlError::PrecisionExhausted(
                "reciprocal of an enclosure containing zero".into(),
            ));
        }
        // x -> 1/x is monotone decreasing on either side of zero
        Ok(Self::from_bounds(hi.recip(), lo.recip()))
    }

    /// Quotient `self / other`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Compare two enclosures.
    pub fn compare(&self, other: &Self) -> BoundedOrdering {
        if self.value == other.value && self.radius == other.radius {
            return BoundedOrdering::EqualExpr;
        }
        if self.upper() < other.lower() {
            BoundedOrdering::Less
        } else if self.lower() > other.upper() {
            BoundedOrdering::Greater
        } else {
            BoundedOrdering::Inconclusive
        }
    }

    /// Conclusive strict comparison, or a precision error.
    pub fn try_lt(&self, other: &Self) -> Result<bool> {
        match self.compare(other) {
            BoundedOrdering::Less => Ok(true),
            BoundedOrdering::Greater | BoundedOrdering::EqualExpr => Ok(false),
            BoundedOrdering::Inconclusive => Err(EvlError::PrecisionExhausted(format!(
                "inconclusive comparison near {}",
                self.to_decimal(12)
            ))),
        }
    }

    /// Whether the enclosure lies strictly inside `[lo, hi]`.
    pub fn strictly_inside(&self, lo: &BigRational, hi: &BigRational) -> bool {
        &self.lower() > lo && &self.upper() < hi
    }

    /// Decimal rendering of the central value, truncated toward zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        rational_to_decimal(&self.value, digits)
    }

    /// `"p/q"` rendering of the central value.
    pub fn to_rational_string(&self) -> String {
        format!("{}/{}", self.value.numer(), self.value.denom())
    }

    /// Central value as `f64` (for reporting only).
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value)
    }
}

impl fmt::Display for BoundedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (±{})", self.to_decimal(20), rational_to_decimal(&self.radius, 6))
    }
}

/// Decimal expansion of a rational, truncated toward zero at `digits`
/// fractional places.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    let int = a.to_integer();
    let frac = &a - BigRational::from_integer(int.clone());
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (frac * BigRational::from_integer(scale)).to_integer();
    let mut s = scaled.to_string();
    while s.len() < digits {
        s.insert(0, '0');
    }
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{s}")
    }
}

/// Best-effort `f64` conversion that survives huge numerators/denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back through a decimal rendering
    rational_to_decimal(r, 30).parse().unwrap_or(f64::NAN)
}

/// Parse `"p/q"` or a plain integer into a rational.
pub fn rational_from_string(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| EvlError::InvalidConfig(format!("bad rational '{s}': {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(EvlError::InvalidConfig(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(parse_int(p)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

//! The special points of the construction and rigorous `exp`/`log`
//! enclosures.
//!
//! The maximal set lives on the orbit of `z = Σ_{i>=1} 3^(-3^i)` under the
//! tripling map `f(x) = 3x mod 1`. Because `f` shifts ternary digits left,
//! the forward images `xi_j = f^(3^j)(z) = Σ_{i>j} 3^(3^j - 3^i)` are again
//! explicit series. Everything here is a truncated series plus a rigorous
//! geometric tail bound, so all downstream comparisons are decidable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{EvlError, Result};
use crate::precision::{pow3, ratio, BoundedOrdering, BoundedValue, PrecisionConfig};

/// `z = Σ_{i=1..K} 3^(-3^i)` with tail radius `(3/2)·3^(-3^(K+1))`.
///
/// The tail is `Σ_{i>K} 3^(-3^i) <= 3^(-3^(K+1)) Σ_{m>=0} 3^(-m)`, so the
/// factor 3/2 never undershoots.
pub fn z_point(cfg: PrecisionConfig) -> BoundedValue {
    let k = cfg.depth;
    let mut value = BigRational::zero();
    for i in 1..=k {
        value += pow3(-(3i64.pow(i)));
    }
    let radius = ratio(3, 2) * pow3(-(3i64.pow(k + 1)));
    BoundedValue::new(value, radius)
}

/// `xi_j = f^(3^j)(z) = Σ_{i=j+1..K} 3^(3^j - 3^i)`, same tail bound scaled
/// by `3^(3^j)`.
///
/// Fails with `PrecisionExhausted` when no terms would be retained
/// (`K <= j`).
pub fn xi_point(j: u32, cfg: PrecisionConfig) -> Result<BoundedValue> {
    if cfg.depth <= j {
        return Err(EvlError::PrecisionExhausted(format!(
            "xi_{j} needs depth > {j}, have {}",
            cfg.depth
        )));
    }
    let k = cfg.depth;
    let base = 3i64.pow(j);
    let mut value = BigRational::zero();
    for i in (j + 1)..=k {
        value += pow3(base - 3i64.pow(i));
    }
    let radius = ratio(3, 2) * pow3(base - 3i64.pow(k + 1));
    Ok(BoundedValue::new(value, radius))
}

/// `xi_j` with the convention `xi_0 := z` used by the piecewise-linear
/// observable.
pub fn xi_or_z(j: u32, cfg: PrecisionConfig) -> Result<BoundedValue> {
    if j == 0 {
        Ok(z_point(cfg))
    } else {
        xi_point(j, cfg)
    }
}

/// Lower/upper bracket for `xi_j`:
/// `3^(-2·3^j) <= xi_j <= 3^(-2·3^j) + (9/8)·3^(-8·3^j)`.
pub fn xi_bracket(j: u32) -> (BigRational, BigRational) {
    let lo = pow3(-2 * 3i64.pow(j));
    let hi = &lo + ratio(9, 8) * pow3(-8 * 3i64.pow(j));
    (lo, hi)
}

/// Compare two depth-dependent enclosures, deepening along the ladder until
/// the comparison is conclusive.
pub fn compare_refining<F>(cfg: PrecisionConfig, mut build: F) -> Result<BoundedOrdering>
where
    F: FnMut(u32) -> Result<(BoundedValue, BoundedValue)>,
{
    for depth in cfg.ladder() {
        let (a, b) = build(depth)?;
        match a.compare(&b) {
            BoundedOrdering::Inconclusive => continue,
            other => return Ok(other),
        }
    }
    Err(EvlError::PrecisionExhausted(
        "comparison still inconclusive at max depth".into(),
    ))
}

/// Enclosure of `e^(-u)` for rational `u >= 0`, with radius at most
/// `3^(-precision_log3)`.
///
/// Uses the alternating series `Σ (-u)^k / k!`; once terms decrease, the
/// first omitted term bounds the truncation error.
pub fn exp_neg(u: &BigRational, precision_log3: i64) -> Result<BoundedValue> {
    assert!(!u.is_negative(), "exp_neg expects u >= 0");
    let target = pow3(-precision_log3);
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut k = BigInt::one();
    let max_terms = 100_000;
    for _ in 0..max_terms {
        term = term * u / BigRational::from_integer(k.clone());
        if k > u.to_integer() && term.abs() < target {
            // alternating with decreasing terms: error <= |next term|
            let r = term.abs();
            return Ok(BoundedValue::new(sum, r));
        }
        if k.clone() % BigInt::from(2) == BigInt::one() {
            sum -= &term;
        } else {
            sum += &term;
        }
        k += BigInt::one();
    }
    Err(EvlError::PrecisionExhausted("exp series did not converge".into()))
}

/// Enclosure of `ln x` for rational `x > 0`, with radius at most
/// `3^(-precision_log3)`.
///
/// Scales `x` into `[2/3, 3/2]` by powers of 3, then uses
/// `ln y = 2 atanh((y-1)/(y+1))` with a geometric tail bound.
pub fn ln_enclosure(x: &BigRational, precision_log3: i64) -> Result<BoundedValue> {
    if !x.is_positive() {
        return Err(EvlError::Undefined(format!("ln of non-positive {x}")));
    }
    let mut e: i64 = 0;
    let mut y = x.clone();
    let lo = ratio(2, 3);
    let hi = ratio(3, 2);
    while y > hi {
        y /= BigRational::from_integer(BigInt::from(3));
        e += 1;
    }
    while y < lo {
        y *= BigRational::from_integer(BigInt::from(3));
        e -= 1;
    }
    let ln_y = atanh_log(&y, precision_log3 + 2)?;
    if e == 0 {
        return Ok(ln_y);
    }
    // |e| < 3^16 in any realistic call; absorb it into the ln3 precision
    let ln3 = ln_three(precision_log3 + 18)?;
    Ok(ln_y.add(&ln3.scale(&BigRational::from_integer(BigInt::from(e)))))
}

/// `ln 3` as an enclosure.
pub fn ln_three(precision_log3: i64) -> Result<BoundedValue> {
    // ln 3 = 2 atanh(1/2)
    atanh_series(&ratio(1, 2), precision_log3)
}

fn atanh_log(y: &BigRational, precision_log3: i64) -> Result<BoundedValue> {
    let t = (y - BigRational::one()) / (y + BigRational::one());
    atanh_series(&t, precision_log3)
}

/// `2 atanh(t) = 2 Σ_{m>=0} t^(2m+1)/(2m+1)` with rigorous geometric tail,
/// for `|t| < 1/2`.
fn atanh_series(t: &BigRational, precision_log3: i64) -> Result<BoundedValue> {
    assert!(t.abs() < ratio(1, 2), "atanh series needs |t| < 1/2");
    let target = pow3(-precision_log3);
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = BigRational::zero();
    let mut m: i64 = 0;
    loop {
        sum += &power / BigRational::from_integer(BigInt::from(2 * m + 1));
        power *= &t2;
        m += 1;
        // remaining mass <= |power| / (2m+1) * 1/(1 - t^2) <= |power| * 4/3
        let tail = power.abs() * ratio(4, 3);
        if tail < target {
            let two = BigRational::from_integer(BigInt::from(2));
            return Ok(BoundedValue::new(sum * &two, tail * two));
        }
        if m > 1_000_000 {
            return Err(EvlError::PrecisionExhausted("atanh series stalled".into()));
        }
    }
}

//! Exact rational scalars and square-root-free integer bounds.
//!
//! Everything downstream (enumeration ranges, separation tests, slice radii)
//! reduces to comparing a rational against the square root of another
//! rational.  Those comparisons are done here, exactly, by squaring; no
//! floating point is involved.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};

pub type Rat = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "rational with zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p"` or `"p/q"` with optional sign on the numerator.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| invalid(format!("malformed rational '{s}'")))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| invalid(format!("malformed rational '{s}'")))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(invalid(format!("zero denominator in rational '{s}'")));
    }
    Ok(Rat::new(n, d))
}

/// Renders in the same `"p"` / `"p/q"` shape that `parse_rat` accepts.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

/// Nearest integer, halves rounding up.
pub fn round_int(r: &Rat) -> BigInt {
    floor_int(&(r + rat(1, 2)))
}

/// `floor(sqrt(r))` for `r >= 0`.
///
/// Uses `floor(sqrt(p/q)) = floor(sqrt(p*q)) div q` together with an exact
/// correction loop, so the result is the true integer part.
pub fn floor_sqrt(r: &Rat) -> BigInt {
    assert!(!r.is_negative(), "floor_sqrt of a negative rational");
    let p = r.numer();
    let q = r.denom();
    let mut k = (p * q).sqrt().div_floor(q);
    // correct the initial estimate in both directions with exact tests
    while rat_from(&k) * rat_from(&k) > *r {
        k -= 1;
    }
    loop {
        let next = &k + 1;
        if rat_from(&next) * rat_from(&next) <= *r {
            k = next;
        } else {
            break;
        }
    }
    k
}

fn rat_from(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Exact test for `x <= sqrt(r)` with `r >= 0`.
pub fn le_sqrt(x: &Rat, r: &Rat) -> bool {
    if !x.is_positive() {
        return true;
    }
    x * x <= *r
}

/// Largest integer `z` with `z <= t + sqrt(r)`, `r >= 0`.
pub fn floor_plus_sqrt(t: &Rat, r: &Rat) -> BigInt {
    assert!(!r.is_negative(), "floor_plus_sqrt with negative radicand");
    let mut z = floor_int(t) + floor_sqrt(r);
    loop {
        let cand = &z + 1;
        if le_sqrt(&(rat_from(&cand) - t), r) {
            z = cand;
        } else {
            return z;
        }
    }
}

/// Smallest integer `z` with `z >= t - sqrt(r)`, `r >= 0`.
pub fn ceil_minus_sqrt(t: &Rat, r: &Rat) -> BigInt {
    -floor_plus_sqrt(&(-t), r)
}

//! Arbitrary-precision rationals and their textual form.
//!
//! Every exact quantity in the crate (probabilities, prices, holdings,
//! deflator values) is a [`Rational`]. On the wire rationals are strings:
//! `"p/q"`, an integer `"-3"`, or a finite decimal `"0.125"`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"n"` or `"d.ddd"` (optionally signed).
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        literal: s.to_string(),
        reason,
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty"));
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err("bad numerator"))?;
        let den: BigInt = den.trim().parse().map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err("no digits"));
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err("not a decimal number"));
    }
    let digits = format!("{whole}{frac}");
    let mantissa: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err("not a decimal number"))?
    };
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(mantissa, scale);
    Ok(if negative { -value } else { value })
}

/// Canonical string: `"n"` for integers, `"p/q"` otherwise.
pub fn to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a nonzero vector by a positive factor so its entries are coprime
/// integers. Direction (sign) is preserved.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    use num_integer::Integer;
    if v.iter().all(Zero::is_zero) {
        return v.to_vec();
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x))
        .abs();
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

/// Display adapter for a slice of rationals: `(1, 2/3, -1/3)`.
pub struct Vector<'a>(pub &'a [Rational]);

impl fmt::Display for Vector<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&to_string(x))?;
        }
        f.write_str(")")
    }
}

//! Exact rational scalar used throughout the model, mechanism, and metrics
//! layers, plus parsing/formatting helpers for the `a/b` wire format.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

/// Exact rational scalar. All probability and value arithmetic outside the
/// worst-case optimizer is carried out in this type with zero tolerance.
pub type Rat = Ratio<BigInt>;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Ratio::from_integer(BigInt::from(n))
}

/// Shorthand for the rational n/d. Panics if `d == 0`.
pub fn ratq(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Lossy conversion for reporting and for the float-only worst-case module.
pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Errors produced when parsing the textual rational format.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"a/b"`, decimal (`"1.25"`), or integer (`"-3"`) literals exactly.
/// Decimals are converted by scale, never through binary floating point.
pub fn parse_rational(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim())
            .map_err(|_| ParseRatError::Invalid(s.to_string()))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|_| ParseRatError::Invalid(s.to_string()))?;
        if d.is_zero() {
            return Err(ParseRatError::ZeroDenominator(s.to_string()));
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int_part).map_err(|_| ParseRatError::Invalid(s.to_string()))?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRatError::Invalid(s.to_string()));
        }
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigInt::from_str(frac_part).map_err(|_| ParseRatError::Invalid(s.to_string()))?;
        let magnitude = int_digits.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Ratio::new(signed, scale));
    }
    let n = BigInt::from_str(s).map_err(|_| ParseRatError::Invalid(s.to_string()))?;
    Ok(Ratio::from_integer(n))
}

/// Formats a rational as `a/b`, or just `a` when the denominator is one.
pub fn format_rational(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// found by walking the continued-fraction convergents and the final
/// semiconvergent. Used when rationalizing optimizer certificates.
pub fn rationalize(x: f64, max_den: u64) -> Rat {
    assert!(x.is_finite(), "cannot rationalize a non-finite value");
    assert!(max_den >= 1);
    let negative = x < 0.0;
    let mut frac = x.abs();
    let whole = frac.floor();
    frac -= whole;

    // Convergents p/q of the fractional part.
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let cap = BigInt::from(max_den);
    let mut value = frac;
    let mut best: Option<(BigInt, BigInt)> = None;
    for _ in 0..64 {
        let a = value.floor();
        if !a.is_finite() || a > 1e18 {
            break;
        }
        let a_int = BigInt::from(a as i64);
        let p2 = &a_int * &p1 + &p0;
        let q2 = &a_int * &q1 + &q0;
        if q2 > cap {
            // Largest semiconvergent still under the cap.
            if !q1.is_zero() {
                let t = (&cap - &q0) / &q1;
                if t > BigInt::zero() {
                    let ps = &t * &p1 + &p0;
                    let qs = &t * &q1 + &q0;
                    let semi = Ratio::new(ps, qs);
                    let conv = Ratio::new(p1.clone(), q1.clone());
                    let err_semi = (to_f64(&semi) - frac).abs();
                    let err_conv = (to_f64(&conv) - frac).abs();
                    let pick = if err_semi < err_conv { semi } else { conv };
                    best = Some((pick.numer().clone(), pick.denom().clone()));
                }
            }
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        best = Some((p1.clone(), q1.clone()));
        let rem = value - a;
        if rem <= 1e-18 {
            break;
        }
        value = 1.0 / rem;
    }
    let (pn, qn) = best.unwrap_or((BigInt::zero(), BigInt::one()));
    let approx = Ratio::new(pn, qn) + Ratio::from_integer(BigInt::from(whole as i64));
    if negative {
        -approx
    } else {
        approx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_integer() {
        assert_eq!(parse_rational("1/3").unwrap(), ratq(1, 3));
        assert_eq!(parse_rational("8/5").unwrap(), ratq(8, 5));
        assert_eq!(parse_rational("1.25").unwrap(), ratq(5, 4));
        assert_eq!(parse_rational("0.1").unwrap(), ratq(1, 10));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2));
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7));
        assert_eq!(parse_rational("-0.5").unwrap(), ratq(-1, 2));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("1.-2").is_err());
    }

    #[test]
    fn formats_like_the_wire_format() {
        assert_eq!(format_rational(&ratq(16, 9)), "16/9");
        assert_eq!(format_rational(&rat(2)), "2");
        assert_eq!(format_rational(&ratq(-1, 3)), "-1/3");
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.5, 1_000_000), ratq(1, 2));
        assert_eq!(rationalize(1.0 / 3.0, 1_000_000), ratq(1, 3));
        let x = 0.7257416f64;
        let r = rationalize(x, 1_000_000);
        assert!((to_f64(&r) - x).abs() < 1e-11);
        assert!(*r.denom() <= BigInt::from(1_000_000u64));
    }

    #[test]
    fn rationalize_handles_irrational_targets() {
        let lambda = 2f64.powf(-0.5);
        let r = rationalize(lambda, 1_000_000);
        assert!((to_f64(&r) - lambda).abs() < 1e-10);
    }
}

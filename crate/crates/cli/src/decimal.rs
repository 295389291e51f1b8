//! Decimal rendering of exact rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// `r` rounded half away from zero to `sig` significant digits. Positional
/// notation for exponents in `-5..sig`, scientific otherwise.
pub fn format_decimal(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let sig = sig.max(1);
    let neg = r.is_negative();
    let a = r.numer().abs();
    let b = r.denom().clone();
    let ten = BigInt::from(10);
    // 10^e <= a/b < 10^(e+1)
    let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
    let lhs = if e < 0 { &a * ten.pow((-e) as u32) } else { a.clone() };
    let rhs = if e > 0 { &b * ten.pow(e as u32) } else { b.clone() };
    if lhs < rhs {
        e -= 1;
    }
    let shift = sig as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (&a * ten.pow(shift as u32), b.clone())
    } else {
        (a.clone(), &b * ten.pow((-shift) as u32))
    };
    let (q, rem) = num.div_rem(&den);
    let mut digits = if rem * 2 >= den { q + 1 } else { q };
    if digits == ten.pow(sig as u32) {
        digits /= 10;
        e += 1;
    }
    let s = digits.to_string();
    let body = if (-5..sig as i64).contains(&e) {
        if e >= 0 {
            let (int, frac) = s.split_at(e as usize + 1);
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), s)
        }
    } else if sig == 1 {
        format!("{s}e{e}")
    } else {
        format!("{}.{}e{e}", &s[..1], &s[1..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Exact value followed by its decimal rendering; integers print bare.
pub fn render(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{} ({})", r.numer(), r.denom(), format_decimal(r, 12))
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

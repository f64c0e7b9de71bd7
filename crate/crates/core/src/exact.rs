//! Exact rational scalars for horizons, slot widths and interval endpoints.
//!
//! Every finite `f64` is a rational with a power-of-two denominator, and every
//! decimal literal is a rational with a ten-smooth denominator, so both input
//! paths convert without rounding. Keeping endpoints rational makes interval
//! measures and slot arithmetic exact; floats only appear at the reporting
//! boundary.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact scalar used for horizons, slot widths and interval endpoints.
pub type Exact = BigRational;

/// Converts a finite `f64` to the rational it denotes, without rounding.
pub fn exact_from_f64(x: f64) -> Result<Exact> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::Domain(format!("expected a finite number, got {x}")))
}

/// Parses a decimal literal (optionally in scientific notation, e.g. `1e-3`)
/// into the exact rational it denotes.
pub fn parse_decimal(s: &str) -> Result<Exact> {
    let s = s.trim();
    let err = |msg: &str| Error::Parse {
        line: 0,
        message: format!("{msg}: {s:?}"),
    };
    if s.is_empty() {
        return Err(err("empty decimal"));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i64 = s[i + 1..]
                .parse()
                .map_err(|_| err("bad exponent in decimal"))?;
            (&s[..i], exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("decimal has no digits"));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("invalid digit in decimal"));
    }
    let mut numer: BigInt = BigInt::zero();
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer * 10 + (b - b'0');
    }
    numer *= sign;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Exact::from_integer(numer * ten.pow(scale as u32))
    } else {
        Exact::new(numer, ten.pow((-scale) as u32))
    };
    Ok(value)
}

/// Formats an exact value as a finite decimal string when its reduced
/// denominator is of the form `2^a * 5^b`; falls back to `numer/denom`.
pub fn format_exact(x: &Exact) -> String {
    let numer = x.numer().clone();
    let mut denom = x.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    // Scale so the denominator becomes a power of ten.
    let shift = twos.max(fives);
    let scaled = numer * two.pow(shift - twos) * five.pow(shift - fives);
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if shift == 0 {
        out.push_str(&digits);
        return out;
    }
    let shift = shift as usize;
    if digits.len() > shift {
        out.push_str(&digits[..digits.len() - shift]);
        let frac = digits[digits.len() - shift..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        for _ in 0..shift - digits.len() {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
    }
    if out.ends_with('.') {
        out.pop();
    }
    if out == "-" || out.is_empty() {
        out = "0".to_string();
    }
    out
}

/// Rounds an exact value to the nearest `f64` for reporting.
pub fn exact_to_f64(x: &Exact) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `ceil(x)` as `u64`; the argument must be nonnegative and fit.
pub fn ceil_to_u64(x: &Exact) -> Result<u64> {
    x.ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("value {x} does not round up to a u64")))
}

/// `floor(x)` as `u64`; the argument must be nonnegative and fit.
pub fn floor_to_u64(x: &Exact) -> Result<u64> {
    x.floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("value {x} does not round down to a u64")))
}

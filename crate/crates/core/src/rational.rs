//! Exact rational helpers: parsing, canonical formatting, and integer scaling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"p/q"`, an integer, or a decimal such as `"0.1"` or `"2.5e-3"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let err = || Error::ParseRational(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Renders `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Positive rationals rewritten over a common denominator, so that sums of
/// integer multiples can be compared as plain `u128`s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledWeights {
    numerators: Vec<u128>,
    denominator: BigInt,
}

impl ScaledWeights {
    pub fn new<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> Result<Self> {
        let values: Vec<&BigRational> = values.into_iter().collect();
        let mut denominator = BigInt::one();
        for v in &values {
            if !v.is_positive() {
                return Err(Error::InvalidWeights(format!(
                    "weight {} is not positive",
                    format_rational(v)
                )));
            }
            denominator = denominator.lcm(v.denom());
        }
        let numerators = values
            .iter()
            .map(|v| {
                let scaled = v.numer() * (&denominator / v.denom());
                scaled.to_u128().ok_or(Error::Overflow)
            })
            .collect::<Result<Vec<_>>>()?;
        // Leave headroom for sums of large multiples.
        if numerators.iter().any(|&n| n > u128::MAX >> 40) {
            return Err(Error::Overflow);
        }
        Ok(Self {
            numerators,
            denominator,
        })
    }

    pub fn numerators(&self) -> &[u128] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// Exact value of a scaled integer.
    pub fn unscale(&self, scaled: u128) -> BigRational {
        BigRational::new(BigInt::from(scaled), self.denominator.clone())
    }

    /// Dot product of integer counts with the scaled weights.
    pub fn dot(&self, counts: &[u32]) -> u128 {
        counts
            .iter()
            .zip(&self.numerators)
            .map(|(&c, &n)| c as u128 * n)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("17/18").unwrap(), q(17, 18));
        assert_eq!(parse_rational(" 4 ").unwrap(), q(4, 1));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("-2.50").unwrap(), q(-5, 2));
        assert_eq!(parse_rational("2.5e-3").unwrap(), q(1, 400));
        assert_eq!(parse_rational("5e2").unwrap(), q(500, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "a/b", "1.2.3", "--1", "e5", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_rational(&q(34, 36)), "17/18");
        assert_eq!(format_rational(&q(67, 67)), "1");
        assert_eq!(format_rational(&q(-3, 6)), "-1/2");
    }

    #[test]
    fn scaling_is_exact() {
        let ws = [q(1, 9), q(1, 2), q(1, 9)];
        let scaled = ScaledWeights::new(ws.iter()).unwrap();
        assert_eq!(scaled.denominator(), &BigInt::from(18));
        assert_eq!(scaled.numerators(), &[2, 9, 2]);
        assert_eq!(scaled.unscale(scaled.dot(&[2, 1, 2])), q(17, 18));
    }

    #[test]
    fn scaling_rejects_nonpositive() {
        let ws = [q(1, 9), q(0, 1)];
        assert!(ScaledWeights::new(ws.iter()).is_err());
    }
}

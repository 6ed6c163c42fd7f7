//! Exact rationals and their `"p/q"` text form.

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Always `p/q`, integers included (`2/1`, `0/1`).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("`{s}` is not a rational number"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, d)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn is_in_unit_interval(r: &Rational) -> bool {
    *r >= Rational::zero() && *r <= Rational::one()
}

/// serde adapter for `"p/q"` strings.
pub mod as_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        assert_eq!(format(&q(6, 4)), "3/2");
        assert_eq!(format(&int(2)), "2/1");
        assert_eq!(format(&int(0)), "0/1");
        assert_eq!(parse("3/2").unwrap(), q(3, 2));
        assert_eq!(parse("2").unwrap(), int(2));
        assert_eq!(parse(" 4 / 6 ").unwrap(), q(2, 3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }
}

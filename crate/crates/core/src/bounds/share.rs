//! Memory sharing between two schemes with the same `(K, Ku, N)`.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::compose::{repeated, scaled_to, Composite, Kind};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::system::Scheme;

fn split_lengths(la: usize, lb: usize, lambda: Rational) -> (usize, usize, usize) {
    let p = *lambda.numer() as usize;
    let q = *lambda.denom() as usize;
    let ma = la / la.gcd(&p);
    let mb = lb / lb.gcd(&(q - p));
    (p, q, ma.lcm(&mb))
}

fn check_lambda(lambda: Rational) -> Result<()> {
    if !rational::is_in_unit_interval(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "sharing weight {} outside [0, 1]",
            rational::format(&lambda)
        )));
    }
    Ok(())
}

/// A `λ` fraction of every message runs `a`, the rest runs `b`, each with
/// independent randomness. Uses the smallest message length that makes both
/// parts whole multiples of their schemes' subpacketizations. `λ = 1` and
/// `λ = 0` return `a` and `b` unchanged.
pub fn memory_share(a: Arc<dyn Scheme>, b: Arc<dyn Scheme>, lambda: Rational) -> Result<Arc<dyn Scheme>> {
    check_lambda(lambda)?;
    if lambda.is_one() {
        return Ok(a);
    }
    if lambda.is_zero() {
        return Ok(b);
    }
    let (p, q, m) = split_lengths(a.params().l, b.params().l, lambda);
    build(a, b, p * m, (q - p) * m)
}

/// As [`memory_share`] with total message length `l`, which must be a
/// multiple of the minimal composite length.
pub fn memory_share_for_length(
    a: Arc<dyn Scheme>,
    b: Arc<dyn Scheme>,
    lambda: Rational,
    l: usize,
) -> Result<Arc<dyn Scheme>> {
    check_lambda(lambda)?;
    if lambda.is_one() {
        return scaled_to(a, l);
    }
    if lambda.is_zero() {
        return scaled_to(b, l);
    }
    let (p, q, m) = split_lengths(a.params().l, b.params().l, lambda);
    if l == 0 || !l.is_multiple_of(q * m) {
        return Err(Error::IndivisibleLength(format!(
            "L={l} is not a multiple of the composite length {}",
            q * m
        )));
    }
    let m = l / q;
    build(a, b, p * m, (q - p) * m)
}

fn build(a: Arc<dyn Scheme>, b: Arc<dyn Scheme>, la: usize, lb: usize) -> Result<Arc<dyn Scheme>> {
    let name = format!("share({},{})", a.name(), b.name());
    let ra = la / a.params().l;
    let rb = lb / b.params().l;
    let parts = vec![repeated(a, ra)?, repeated(b, rb)?];
    Ok(Arc::new(Composite::new(Kind::Share, name, parts)?))
}

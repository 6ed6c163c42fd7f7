//! Piecewise-linear memory-load curves and lower convex envelopes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Corner points `(M, R)` joined by straight segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateCurve {
    corners: Vec<(Rational, Rational)>,
}

fn cross(o: (Rational, Rational), a: (Rational, Rational), b: (Rational, Rational)) -> Rational {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl RateCurve {
    /// Checks that `M` is strictly increasing and `R` non-increasing.
    pub fn new(corners: Vec<(Rational, Rational)>) -> Result<Self> {
        if corners.is_empty() {
            return Err(Error::InvalidParameter("a rate curve needs at least one corner".into()));
        }
        if corners.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 < w[1].1) {
            return Err(Error::InvalidParameter(format!(
                "corners must have increasing M and non-increasing R: {}",
                Self::describe(&corners)
            )));
        }
        Ok(Self { corners })
    }

    /// Lower convex envelope of an arbitrary point set. At equal `M` the
    /// smallest `R` wins; points right of the global minimum are dropped so
    /// the result is non-increasing.
    pub fn lower_envelope(points: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut pts: Vec<(Rational, Rational)> = points.into_iter().collect();
        pts.sort();
        pts.dedup_by(|b, a| a.0 == b.0);
        let mut hull: Vec<(Rational, Rational)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= Rational::from_integer(0) {
                hull.pop();
            }
            hull.push(p);
        }
        if let Some(best) = hull.iter().map(|p| p.1).min() {
            let end = hull.iter().position(|p| p.1 == best).expect("minimum is attained") + 1;
            hull.truncate(end);
        }
        Self::new(hull)
    }

    fn describe(corners: &[(Rational, Rational)]) -> String {
        corners
            .iter()
            .map(|(m, r)| format!("({}, {})", rational::format(m), rational::format(r)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn corners(&self) -> &[(Rational, Rational)] {
        &self.corners
    }

    pub fn domain(&self) -> (Rational, Rational) {
        (self.corners[0].0, self.corners[self.corners.len() - 1].0)
    }

    /// Linear interpolation between the enclosing corners.
    pub fn eval(&self, m: Rational) -> Result<Rational> {
        let (lo, hi) = self.domain();
        if m < lo || m > hi {
            return Err(Error::OutOfRange(format!(
                "M={} outside [{}, {}]",
                rational::format(&m),
                rational::format(&lo),
                rational::format(&hi)
            )));
        }
        let i = self.corners.partition_point(|c| c.0 < m);
        let (m1, r1) = self.corners[i];
        if m1 == m {
            return Ok(r1);
        }
        let (m0, r0) = self.corners[i - 1];
        Ok(r0 + (r1 - r0) * (m - m0) / (m1 - m0))
    }

    /// Exact form `{"points":[["p/q","r/s"],...]}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Points {
            points: Vec<[String; 2]>,
        }
        let points = self
            .corners
            .iter()
            .map(|(m, r)| [rational::format(m), rational::format(r)])
            .collect();
        serde_json::to_string(&Points { points }).expect("plain strings serialize")
    }
}

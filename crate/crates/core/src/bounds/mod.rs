//! Closed-form achievable loads, converse bounds and their envelopes.
//!
//! Every evaluator is exact and rejects `M` outside its domain with
//! [`Error::OutOfRange`].

mod envelope;
mod share;

pub use envelope::RateCurve;
pub use share::{memory_share, memory_share_for_length};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, int, q, Rational};
use crate::sjpir::pir_rate_factor;

fn check_range(m: Rational, hi: Rational) -> Result<()> {
    if m < Rational::zero() || m > hi {
        return Err(Error::OutOfRange(format!(
            "M={} outside [0, {}]",
            rational::format(&m),
            rational::format(&hi)
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<i64> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("N={n}, need N >= 2")));
    }
    Ok(n as i64)
}

fn check_k(name: &str, k: usize) -> Result<i64> {
    if k == 0 {
        return Err(Error::OutOfRange(format!("{name} must be positive")));
    }
    Ok(k as i64)
}

/// Interior breakpoints of [`cia_load`]: `(N-1)/(2N)` and `2(N-1)/(2N-1)`.
pub fn cia_breakpoints(n: usize) -> [Rational; 2] {
    let n = n as i64;
    [q(n - 1, 2 * n), q(2 * (n - 1), 2 * n - 1)]
}

/// One affine piece of [`cia_load`], evaluated anywhere.
pub fn cia_branch(n: usize, branch: usize, m: Rational) -> Rational {
    let n = n as i64;
    match branch {
        0 => int(2) * (int(1) - m),
        1 => int(n + 1) * (int(3) - int(2) * m) / int(2 * n + 1),
        _ => int(n + 1) * (int(2) - m) / int(2 * n),
    }
}

fn branch_of(m: Rational, breakpoints: &[Rational]) -> usize {
    breakpoints.iter().filter(|&&b| m > b).count()
}

/// Achievable load of cache-aided interference alignment for `K = Ku = 2`.
pub fn cia_load(m: Rational, n: usize) -> Result<Rational> {
    check_n(n)?;
    check_range(m, int(2))?;
    Ok(cia_branch(n, branch_of(m, &cia_breakpoints(n)), m))
}

pub fn uncoded_breakpoint(n: usize) -> Rational {
    cia_breakpoints(n)[1]
}

pub fn uncoded_branch(n: usize, branch: usize, m: Rational) -> Rational {
    match branch {
        0 => int(2) - q(3, 2) * m,
        _ => cia_branch(n, 2, m),
    }
}

/// Optimal load for `K = Ku = 2` under uncoded placement.
pub fn uncoded_optimal_load(m: Rational, n: usize) -> Result<Rational> {
    check_n(n)?;
    check_range(m, int(2))?;
    Ok(uncoded_branch(n, branch_of(m, &[uncoded_breakpoint(n)]), m))
}

pub fn distinct_breakpoints() -> [Rational; 2] {
    [q(1, 3), q(2, 3)]
}

pub fn distinct_branch(branch: usize, m: Rational) -> Rational {
    match branch {
        0 => int(2) * (int(1) - m),
        1 => q(5, 3) - m,
        _ => int(3) * (int(2) - m) / int(4),
    }
}

/// Optimal load for `K = Ku = N = 2` when the two users want different messages.
pub fn distinct_optimal_load(m: Rational) -> Result<Rational> {
    check_range(m, int(2))?;
    Ok(distinct_branch(branch_of(m, &distinct_breakpoints()), m))
}

/// `(1 - M/K)(1 + 1/N + … + 1/N^(K-1))`.
pub fn single_user_pir_bound(k: usize, n: usize, m: Rational) -> Result<Rational> {
    let kk = check_k("K", k)?;
    check_n(n)?;
    check_range(m, int(kk))?;
    Ok((int(1) - m / int(kk)) * pir_rate_factor(k, n))
}

/// Lower convex envelope of the product-design corners, including the
/// no-cache point `(0, min{K, Ku·F})`.
pub fn pd_curve(k: usize, ku: usize, n: usize) -> Result<RateCurve> {
    let kk = check_k("K", k)?;
    let kku = check_k("Ku", ku)?;
    check_n(n)?;
    let f = pir_rate_factor(k, n);
    let mut pts = vec![(int(0), int(kk)), (int(0), int(kku) * f)];
    pts.extend((1..=kku).map(|t| (q(t * kk, kku), q(kku - t, t + 1) * f)));
    RateCurve::lower_envelope(pts)
}

pub fn pd_load(k: usize, ku: usize, n: usize, m: Rational) -> Result<Rational> {
    let curve = pd_curve(k, ku, n)?;
    check_range(m, int(k as i64))?;
    Ok(curve.eval(m)?.min(int(k as i64) - m))
}

/// Envelope over `t ∈ {0, …, Ku}` of `(tK/Ku, min{(Ku-t)/(t+1), K(1-t/Ku)}/4)`.
pub fn converse_quarter_curve(k: usize, ku: usize) -> Result<RateCurve> {
    let kk = check_k("K", k)?;
    let kku = check_k("Ku", ku)?;
    RateCurve::lower_envelope((0..=kku).map(|t| {
        let coded = q(kku - t, t + 1);
        let naive = int(kk) * (int(1) - q(t, kku));
        (q(t * kk, kku), coded.min(naive) / int(4))
    }))
}

/// Caching converse divided by four. `N` is accepted for symmetry with
/// [`pd_load`]; the bound does not depend on it.
pub fn caching_converse_quarter(k: usize, ku: usize, n: usize, m: Rational) -> Result<Rational> {
    check_n(n)?;
    let curve = converse_quarter_curve(k, ku)?;
    check_range(m, int(k as i64))?;
    curve.eval(m)
}

/// `pd_load / caching_converse_quarter`, or 1 where both vanish.
pub fn gap_ratio(k: usize, ku: usize, n: usize, m: Rational) -> Result<Rational> {
    let conv = caching_converse_quarter(k, ku, n, m)?;
    let pd = pd_load(k, ku, n, m)?;
    if conv.is_zero() {
        if pd.is_zero() {
            return Ok(Rational::one());
        }
        return Err(Error::OutOfRange(format!(
            "converse is 0 but the load is {} at M={}",
            rational::format(&pd),
            rational::format(&m)
        )));
    }
    Ok(pd / conv)
}

/// Caching converse for `K = Ku = 6`.
pub fn yu_curve_6x6() -> RateCurve {
    let mut pts = vec![(int(0), int(6))];
    for s in 1..=6i64 {
        for l in 1..=s {
            pts.push((q(7 - l, s), q(s - 1, 2) + q(l * (l - 1), 2 * s)));
        }
    }
    RateCurve::lower_envelope(pts).expect("fixed point set")
}

pub fn yu_bound_6x6(m: Rational) -> Result<Rational> {
    check_range(m, int(6))?;
    yu_curve_6x6().eval(m)
}

/// One CSV row of a curve set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePoint {
    pub m: Rational,
    pub r: Rational,
    pub label: &'static str,
}

/// Named collections of curves for plotting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveSet {
    /// `K = Ku = N = 2`.
    Fig2a,
    /// `K = Ku = 2`, `N = 3`.
    Fig2b,
    /// `K = Ku = 6`, `N = 2`.
    Fig3,
    /// Product design against the quartered caching converse.
    Gap { k: usize, ku: usize, n: usize },
}

impl CurveSet {
    pub fn parse(name: &str, k: usize, ku: usize, n: usize) -> Result<Self> {
        match name {
            "fig2a" => Ok(CurveSet::Fig2a),
            "fig2b" => Ok(CurveSet::Fig2b),
            "fig3" => Ok(CurveSet::Fig3),
            "gap" => Ok(CurveSet::Gap { k, ku, n }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown curve set `{name}` (fig2a, fig2b, fig3, gap)"
            ))),
        }
    }

    fn max_m(&self) -> Rational {
        match *self {
            CurveSet::Fig2a | CurveSet::Fig2b => int(2),
            CurveSet::Fig3 => int(6),
            CurveSet::Gap { k, .. } => int(k as i64),
        }
    }

    fn breakpoints(&self) -> Result<Vec<Rational>> {
        let corners = |c: RateCurve| c.corners().iter().map(|p| p.0).collect::<Vec<_>>();
        Ok(match *self {
            CurveSet::Fig2a => [
                cia_breakpoints(2).to_vec(),
                distinct_breakpoints().to_vec(),
                corners(pd_curve(2, 2, 2)?),
            ]
            .concat(),
            CurveSet::Fig2b => [cia_breakpoints(3).to_vec(), corners(pd_curve(2, 2, 3)?)].concat(),
            CurveSet::Fig3 => [corners(pd_curve(6, 6, 2)?), corners(yu_curve_6x6())].concat(),
            CurveSet::Gap { k, ku, n } => {
                [corners(pd_curve(k, ku, n)?), corners(converse_quarter_curve(k, ku)?)].concat()
            }
        })
    }

    fn labels(&self) -> &'static [&'static str] {
        match self {
            CurveSet::Fig2a => &["cia", "uncoded_optimal", "pd", "distinct_optimal", "single_user_bound"],
            CurveSet::Fig2b => &["cia", "uncoded_optimal", "pd", "single_user_bound"],
            CurveSet::Fig3 => &["pd", "yu_bound"],
            CurveSet::Gap { .. } => &["pd", "converse_quarter_t0"],
        }
    }

    fn eval(&self, label: &str, m: Rational) -> Result<Rational> {
        let (k, ku, n) = match *self {
            CurveSet::Fig2a => (2, 2, 2),
            CurveSet::Fig2b => (2, 2, 3),
            CurveSet::Fig3 => (6, 6, 2),
            CurveSet::Gap { k, ku, n } => (k, ku, n),
        };
        match label {
            "cia" => cia_load(m, n),
            "uncoded_optimal" => uncoded_optimal_load(m, n),
            "pd" => pd_load(k, ku, n, m),
            "distinct_optimal" => distinct_optimal_load(m),
            "single_user_bound" => single_user_pir_bound(k, n, m),
            "yu_bound" => yu_bound_6x6(m),
            "converse_quarter_t0" => caching_converse_quarter(k, ku, n, m),
            _ => unreachable!("labels come from CurveSet::labels"),
        }
    }

    /// Evaluates every curve on `points` evenly spaced memories plus every
    /// breakpoint of the set. Rows are grouped by curve, then sorted by `M`.
    pub fn evaluate(&self, points: usize) -> Result<Vec<CurvePoint>> {
        if points < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 points, got {points}"
            )));
        }
        let max = self.max_m();
        let mut grid: Vec<Rational> = (0..points as i64).map(|i| max * q(i, points as i64 - 1)).collect();
        grid.extend(self.breakpoints()?);
        grid.sort();
        grid.dedup();
        let mut rows = Vec::new();
        for &label in self.labels() {
            for &m in &grid {
                rows.push(CurvePoint {
                    m,
                    r: self.eval(label, m)?,
                    label,
                });
            }
        }
        Ok(rows)
    }
}

/// Decimal with at most 12 significant digits, trailing zeros removed.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn curve_csv(rows: &[CurvePoint]) -> String {
    let mut out = String::from("M,R,label\n");
    for p in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            format_sig12(rational::to_f64(&p.m)),
            format_sig12(rational::to_f64(&p.r)),
            p.label
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cia_examples() {
        assert_eq!(cia_load(q(1, 4), 2).unwrap(), q(3, 2));
        assert_eq!(cia_load(q(2, 3), 2).unwrap(), int(1));
        assert_eq!(cia_load(int(0), 3).unwrap(), int(2));
        assert_eq!(cia_load(int(2), 3).unwrap(), int(0));
        assert_eq!(cia_load(q(1, 3), 3).unwrap(), q(4, 3));
        assert!(matches!(cia_load(q(5, 2), 2), Err(Error::OutOfRange(_))));
        assert!(matches!(cia_load(q(1, 2), 1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn branches_meet_at_breakpoints() {
        for n in 2..=8 {
            let [b1, b2] = cia_breakpoints(n);
            assert_eq!(cia_branch(n, 0, b1), cia_branch(n, 1, b1));
            assert_eq!(cia_branch(n, 1, b2), cia_branch(n, 2, b2));
            let b = uncoded_breakpoint(n);
            assert_eq!(uncoded_branch(n, 0, b), uncoded_branch(n, 1, b));
        }
        for (i, b) in distinct_breakpoints().into_iter().enumerate() {
            assert_eq!(distinct_branch(i, b), distinct_branch(i + 1, b));
        }
    }

    #[test]
    fn uncoded_and_distinct_examples() {
        assert_eq!(uncoded_optimal_load(int(0), 2).unwrap(), int(2));
        assert_eq!(uncoded_optimal_load(q(2, 3), 2).unwrap(), int(1));
        assert_eq!(distinct_optimal_load(q(1, 3)).unwrap(), q(4, 3));
        assert_eq!(distinct_optimal_load(q(2, 3)).unwrap(), int(1));
        assert_eq!(distinct_optimal_load(q(1, 2)).unwrap(), q(7, 6));
        assert_eq!(distinct_optimal_load(int(2)).unwrap(), int(0));
    }

    #[test]
    fn cia_beats_uncoded_below_breakpoint() {
        for n in [2, 3] {
            for i in 0..=200 {
                let m = q(2 * i, 200);
                assert!(cia_load(m, n).unwrap() <= uncoded_optimal_load(m, n).unwrap());
            }
        }
    }

    #[test]
    fn single_user_examples() {
        assert_eq!(single_user_pir_bound(2, 2, int(0)).unwrap(), q(3, 2));
        assert_eq!(single_user_pir_bound(2, 2, int(2)).unwrap(), int(0));
        assert_eq!(single_user_pir_bound(2, 2, q(2, 3)).unwrap(), int(1));
    }

    #[test]
    fn pd_examples() {
        assert_eq!(pd_load(2, 2, 2, int(1)).unwrap(), q(3, 4));
        assert_eq!(pd_load(2, 2, 2, int(0)).unwrap(), int(2));
        assert_eq!(pd_load(3, 2, 3, int(3)).unwrap(), int(0));
        let t1 = q(5, 2) * pir_rate_factor(6, 2);
        let at1 = pd_load(6, 6, 2, int(1)).unwrap();
        assert_eq!(at1, (int(6) + pd_load(6, 6, 2, int(2)).unwrap()) / int(2));
        assert!(at1 < t1);
        assert_eq!(pd_curve(2, 2, 2).unwrap().corners().len(), 3);
    }

    #[test]
    fn pd_matches_single_user_bound_at_large_memory() {
        for (k, ku) in [(2, 2), (3, 2), (4, 3), (5, 5)] {
            for n in [2, 3] {
                let lo = q(((ku - 1) * k) as i64, ku as i64);
                for i in 0..=20 {
                    let m = lo + (int(k as i64) - lo) * q(i, 20);
                    assert_eq!(pd_load(k, ku, n, m).unwrap(), single_user_pir_bound(k, n, m).unwrap());
                }
            }
        }
    }

    #[test]
    fn converse_and_gap() {
        assert_eq!(caching_converse_quarter(2, 2, 2, int(0)).unwrap(), q(1, 2));
        assert_eq!(gap_ratio(2, 2, 2, int(0)).unwrap(), int(4));
        assert_eq!(gap_ratio(3, 2, 2, int(3)).unwrap(), int(1));
    }

    #[test]
    fn yu_examples() {
        assert_eq!(yu_bound_6x6(int(0)).unwrap(), int(6));
        // (1, 5/2) is a listed point but (1, 11/5) from s=5, l=2 lies below it.
        assert_eq!(yu_bound_6x6(int(1)).unwrap(), q(11, 5));
        assert_eq!(yu_bound_6x6(int(6)).unwrap(), int(0));
        let mut prev = int(7);
        for i in 0..=120 {
            let v = yu_bound_6x6(q(i, 20)).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn fig2a_contains_corners() {
        let rows = CurveSet::Fig2a.evaluate(121).unwrap();
        let has = |m, r| rows.iter().any(|p| p.label == "cia" && p.m == m && p.r == r);
        assert!(has(q(1, 4), q(3, 2)));
        assert!(has(q(2, 3), int(1)));
        assert!(CurveSet::Fig2a.evaluate(0).is_err());
    }

    #[test]
    fn sig12() {
        assert_eq!(format_sig12(1.5), "1.5");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(4.0 / 3.0), "1.33333333333");
        assert_eq!(format_sig12(6.0), "6");
    }
}

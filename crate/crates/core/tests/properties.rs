use std::sync::Arc;

use mupir::bounds::{self, memory_share, RateCurve};
use mupir::catalog::{SchemeArgs, SchemeSpec};
use mupir::cia::{Cia1, Cia2};
use mupir::gf2::{self, BitMatrix, BitVector};
use mupir::rational::{self, int, q, Rational};
use mupir::system::{run_transcript, DemandVector, MessageLibrary, Randomness, Scheme};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = BitMatrix> {
    proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
        let rows = (0..n).map(|r| BitVector::from_fn(n, |c| bits[r * n + c])).collect();
        BitMatrix::from_rows(n, rows).unwrap()
    })
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=12).prop_flat_map(|d| (0..=d).prop_map(move |n| q(n, d)))
}

proptest! {
    #[test]
    fn invert_is_two_sided(m in (1usize..=7).prop_flat_map(matrix)) {
        let n = m.rows();
        match gf2::invert(&m) {
            Ok(inv) => {
                prop_assert_eq!(gf2::rank(&m), n);
                prop_assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(n));
                prop_assert_eq!(inv.mul(&m).unwrap(), BitMatrix::identity(n));
            }
            Err(_) => prop_assert!(gf2::rank(&m) < n),
        }
    }

    #[test]
    fn solve_inverts_mat_vec(m in (1usize..=7).prop_flat_map(matrix), seed in any::<u64>()) {
        let n = m.rows();
        let x = BitVector::from_fn(n, |i| (seed >> (i % 64)) & 1 == 1);
        let b = gf2::mat_vec(&m, &x).unwrap();
        if gf2::rank(&m) == n {
            prop_assert_eq!(gf2::solve(&m, &b).unwrap(), x);
        }
    }

    #[test]
    fn rank_is_transpose_invariant(m in (1usize..=7).prop_flat_map(matrix)) {
        prop_assert_eq!(gf2::rank(&m), gf2::rank(&m.transpose()));
    }

    #[test]
    fn rational_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r = q(n, d);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }

    #[test]
    fn bounds_are_monotone(a in unit_rational(), b in unit_rational(), n in 2usize..=6) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let lo2 = lo * 2;
        let hi2 = hi * 2;
        prop_assert!(bounds::cia_load(lo2, n).unwrap() >= bounds::cia_load(hi2, n).unwrap());
        prop_assert!(bounds::uncoded_optimal_load(lo2, n).unwrap() >= bounds::uncoded_optimal_load(hi2, n).unwrap());
        prop_assert!(bounds::distinct_optimal_load(lo2).unwrap() >= bounds::distinct_optimal_load(hi2).unwrap());
        prop_assert!(bounds::pd_load(2, 2, n, lo2).unwrap() >= bounds::pd_load(2, 2, n, hi2).unwrap());
        // The cache-aided scheme never does worse than placing raw bits.
        prop_assert!(bounds::cia_load(lo2, n).unwrap() <= bounds::uncoded_optimal_load(lo2, n).unwrap());
        prop_assert!(bounds::uncoded_optimal_load(lo2, n).unwrap() >= bounds::single_user_pir_bound(2, n, lo2).unwrap());
    }

    #[test]
    fn gap_ratio_at_least_one(k in 2usize..=5, ku in 1usize..=4, n in 2usize..=4, m in unit_rational()) {
        let m = m * k as i64;
        let r = bounds::gap_ratio(k, ku, n, m).unwrap();
        prop_assert!(r >= int(1));
        prop_assert!(r <= int(8));
    }

    #[test]
    fn envelope_is_convex_and_exact_at_corners(pts in proptest::collection::vec((0i64..=20, 0i64..=20), 1..8)) {
        let pts: Vec<_> = pts.into_iter().map(|(m, r)| (q(m, 4), q(r, 2))).collect();
        let env = RateCurve::lower_envelope(pts.clone()).unwrap();
        let (lo, hi) = env.domain();
        for (m, r) in env.corners() {
            prop_assert_eq!(env.eval(*m).unwrap(), *r);
        }
        for (m, r) in &pts {
            if *m >= lo && *m <= hi {
                prop_assert!(env.eval(*m).unwrap() <= *r);
            }
        }
        let c = env.corners();
        for w in c.windows(3) {
            let mid = w[0].1 + (w[2].1 - w[0].1) * (w[1].0 - w[0].0) / (w[2].0 - w[0].0);
            prop_assert!(w[1].1 <= mid);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transcripts_are_correct(
        name in prop::sample::select(vec!["cia1", "cia2", "pd", "naive", "dd1", "dd2"]),
        n in 2usize..=4,
        lib_seed in any::<u64>(),
        run_seed in any::<u64>(),
        thetas in (1usize..=2, 1usize..=2),
    ) {
        let args = SchemeArgs {
            n: if name.starts_with("dd") { None } else { Some(n) },
            m: Some(q(1, 2)),
            ..Default::default()
        };
        let s = SchemeSpec::parse(name, &args).unwrap().build().unwrap();
        let d = DemandVector::new(vec![thetas.0, thetas.1], 2).unwrap();
        prop_assume!(s.demand_set().contains(&d));
        let lib = MessageLibrary::random(2, s.params().l, lib_seed);
        let t = run_transcript(s.as_ref(), &lib, &d, Randomness::Seed(run_seed)).unwrap();
        prop_assert!(t.is_correct(&lib));
    }

    #[test]
    fn sj_transcripts_are_correct(k in 1usize..=3, n in 2usize..=3, lib_seed in any::<u64>(), run_seed in any::<u64>(), theta in 1usize..=3) {
        let theta = theta.min(k);
        let s = SchemeSpec::Sj { k, n }.build().unwrap();
        let lib = MessageLibrary::random(k, s.params().l, lib_seed);
        let d = DemandVector::new(vec![theta], k).unwrap();
        let t = run_transcript(s.as_ref(), &lib, &d, Randomness::Seed(run_seed)).unwrap();
        prop_assert!(t.is_correct(&lib));
    }

    #[test]
    fn sharing_is_linear(num in 0i64..=6, den in 1i64..=6, seed in any::<u64>()) {
        prop_assume!(num <= den);
        let lambda = q(num, den);
        let a: Arc<dyn Scheme> = Arc::new(Cia1::new(2).unwrap());
        let b: Arc<dyn Scheme> = Arc::new(Cia2::new(2).unwrap());
        let s = memory_share(a.clone(), b.clone(), lambda).unwrap();
        let one = int(1);
        prop_assert_eq!(s.params().m, lambda * a.params().m + (one - lambda) * b.params().m);
        let lib = MessageLibrary::random(2, s.params().l, seed);
        let d = DemandVector::new(vec![1, 2], 2).unwrap();
        let t = run_transcript(s.as_ref(), &lib, &d, Randomness::Seed(seed)).unwrap();
        prop_assert!(t.is_correct(&lib));
        prop_assert_eq!(t.load, lambda * q(3, 2) + (one - lambda) * int(1));
    }
}

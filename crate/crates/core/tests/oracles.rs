//! Worked examples checked against hand-computed values.

use mupir::cia::{Cia1, Cia2};
use mupir::gf2::{self, BitMatrix, BitVector};
use mupir::product::{Naive, ProductDesign};
use mupir::rational::{int, q};
use mupir::sjpir::{self, SjPir};
use mupir::system::{
    canonical_query_bytes, parse_query, run_transcript, CacheDescription, DemandVector, MessageLibrary, Query,
    Randomness, Scheme,
};

fn demand(d: &[usize]) -> DemandVector {
    DemandVector::new(d.to_vec(), 2).unwrap()
}

fn bits(b: &[u8]) -> BitVector {
    BitVector::from_bits(b)
}

#[test]
fn y2_algebra() {
    let y2 = gf2::y_matrix(2).unwrap();
    assert_eq!(y2, BitMatrix::from_nested(&[&[1u8, 1], &[0, 1]]).unwrap());
    assert_eq!(gf2::rank(&y2), 2);
    assert_eq!(gf2::invert(&y2).unwrap(), y2);
    assert_eq!(gf2::solve(&y2, &bits(&[1, 0])).unwrap(), bits(&[1, 0]));
    assert_eq!(gf2::mat_vec(&y2, &bits(&[1, 1])).unwrap(), bits(&[0, 1]));
    let ones = BitMatrix::from_nested(&[&[1u8, 1], &[1, 1]]).unwrap();
    assert_eq!(gf2::rank(&ones), 1);
    assert!(gf2::invert(&ones).is_err());
    assert_eq!(
        gf2::y_matrix(3).unwrap(),
        BitMatrix::from_nested(&[&[1u8, 0, 1], &[0, 1, 1], &[0, 0, 1]]).unwrap()
    );
    assert_eq!(
        gf2::y_prime_matrix(2).unwrap(),
        BitMatrix::from_nested(&[&[1u8], &[0]]).unwrap()
    );
    for n in 2..=6 {
        assert_eq!(gf2::rank(&gf2::y_matrix(n).unwrap()), n);
    }
}

#[test]
fn corner1_example_caches_and_load() {
    let s = Cia1::new(2).unwrap();
    let lib = MessageLibrary::random(2, 4, 17);
    let caches = s.place(&lib).unwrap();
    let a = lib.message(0);
    let b = lib.message(1);
    assert_eq!(caches[0].stored_bits, bits(&[(a.get(0) ^ b.get(0)) as u8]));
    assert_eq!(caches[1].stored_bits, bits(&[(a.get(2) ^ b.get(2)) as u8]));
    for seed in 0..20 {
        let t = run_transcript(&s, &lib, &demand(&[1, 2]), Randomness::Seed(seed)).unwrap();
        assert_eq!(t.download_bits, 6);
        assert_eq!(t.load, q(3, 2));
        assert!(t.is_correct(&lib));
    }
}

#[test]
fn corner1_n3_caches() {
    let s = Cia1::new(3).unwrap();
    let lib = MessageLibrary::random(2, 6, 2);
    let caches = s.place(&lib).unwrap();
    let x = |i: usize| (lib.message(0).get(i) ^ lib.message(1).get(i)) as u8;
    assert_eq!(caches[0].stored_bits, bits(&[x(0), x(1)]));
    assert_eq!(caches[1].stored_bits, bits(&[x(3), x(4)]));
}

#[test]
fn corner_answer_counts() {
    for n in 2..=6 {
        let lib = MessageLibrary::random(2, 2 * n, n as u64);
        let t = run_transcript(&Cia1::new(n).unwrap(), &lib, &demand(&[2, 1]), Randomness::Seed(1)).unwrap();
        assert_eq!(t.download_bits, 2 * n + 2);
        let lib = MessageLibrary::random(2, 2 * n - 1, n as u64);
        let t = run_transcript(&Cia2::new(n).unwrap(), &lib, &demand(&[1, 1]), Randomness::Seed(1)).unwrap();
        assert_eq!(t.download_bits, n + 1);
        assert!(t.is_correct(&lib));
    }
}

#[test]
fn corner2_example_caches() {
    let s = Cia2::new(2).unwrap();
    let lib = MessageLibrary::random(2, 3, 4);
    let caches = s.place(&lib).unwrap();
    assert_eq!(caches[0].description, CacheDescription::Uncoded(vec![(1, 1), (2, 1)]));
    assert_eq!(caches[1].description, CacheDescription::Uncoded(vec![(1, 2), (2, 2)]));
    let s3 = Cia2::new(3).unwrap();
    let lib = MessageLibrary::random(2, 5, 4);
    let c = s3.place(&lib).unwrap();
    assert_eq!(
        c[0].description,
        CacheDescription::Uncoded(vec![(1, 1), (1, 2), (2, 1), (2, 2)])
    );
    assert_eq!(
        c[1].description,
        CacheDescription::Uncoded(vec![(1, 3), (1, 4), (2, 3), (2, 4)])
    );
    assert_eq!(s.randomness().size(), Some(16));
}

#[test]
fn sj_counts() {
    assert_eq!(sjpir::sj_download_per_db(2, 2), 3);
    assert_eq!(sjpir::sj_download_per_db(3, 2), 7);
    for k in 1..=5usize {
        for n in 2..=5usize {
            let total = q((n * sjpir::sj_download_per_db(k, n)) as i64, n.pow(k as u32) as i64);
            let rate = (0..k as u32)
                .map(|i| q(1, (n as i64).pow(i)))
                .fold(int(0), |a, b| a + b);
            assert_eq!(total, rate, "K={k} N={n}");
        }
    }
    let s = SjPir::new(3, 2).unwrap();
    let lib = MessageLibrary::random(3, 8, 0);
    let t = run_transcript(&s, &lib, &DemandVector::new(vec![2], 3).unwrap(), Randomness::Seed(0)).unwrap();
    assert_eq!(t.download_bits, 14);
    assert_eq!(t.load, q(7, 4));
}

#[test]
fn product_design_loads() {
    let s = ProductDesign::new(2, 2, 2, 1).unwrap();
    assert_eq!(s.params().l, 8);
    let lib = MessageLibrary::random(2, 8, 3);
    let caches = s.place(&lib).unwrap();
    // User 1 caches packet {1} of both messages: bits 1..4 of A and of B.
    assert_eq!(
        caches[0].description,
        CacheDescription::Uncoded((1..=2).flat_map(|m| (1..=4).map(move |i| (m, i))).collect())
    );
    let t = run_transcript(&s, &lib, &demand(&[2, 2]), Randomness::Seed(5)).unwrap();
    assert_eq!(t.download_bits, 6);
    assert_eq!(t.load, q(3, 4));

    let s = ProductDesign::new(3, 3, 2, 1).unwrap();
    let lib = MessageLibrary::random(3, s.params().l, 3);
    let t = run_transcript(
        &s,
        &lib,
        &DemandVector::new(vec![1, 2, 3], 3).unwrap(),
        Randomness::Seed(5),
    )
    .unwrap();
    assert_eq!(t.load, q(7, 4));
    assert!(t.is_correct(&lib));

    let full = ProductDesign::new(2, 2, 2, 2).unwrap();
    assert_eq!(full.params().m, int(2));
}

#[test]
fn naive_loads() {
    for (m, want) in [(int(0), int(2)), (int(2), int(0)), (int(1), int(1))] {
        let s = Naive::new(2, 2, 2, m).unwrap();
        let lib = MessageLibrary::random(2, s.params().l, 0);
        let t = run_transcript(&s, &lib, &demand(&[1, 2]), Randomness::Seed(0)).unwrap();
        assert_eq!(t.load, want);
        assert!(t.is_correct(&lib));
    }
}

#[test]
fn canonical_bytes() {
    let s = Cia1::new(3).unwrap();
    let qs = mupir::system::build_queries(&s, &demand(&[1, 2]), Randomness::Seed(9)).unwrap();
    for q in &qs {
        assert_eq!(canonical_query_bytes(q), canonical_query_bytes(q));
        assert_eq!(&parse_query(&canonical_query_bytes(q)).unwrap(), q);
    }
    let Query::Cia1 { db, vectors } = qs[0].clone() else {
        panic!("cia1 query expected")
    };
    let mut flipped = vectors.clone();
    flipped[0].flip(0);
    assert_ne!(
        canonical_query_bytes(&Query::Cia1 { db, vectors }),
        canonical_query_bytes(&Query::Cia1 { db, vectors: flipped })
    );
}

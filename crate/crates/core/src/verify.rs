//! The reproducibility suite behind `mupir verify-all`.
//!
//! Each check compares the implementation with a closed-form expectation
//! written out here independently of the scheme code. Reports contain no
//! timings, so equal seeds give byte-identical output.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_integer::binomial;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::audit::{self, all_demands, AuditMode, RunPlan};
use crate::bounds;
use crate::cia::{Cia1, Cia2};
use crate::distinct::{Corner, DistinctDemands};
use crate::error::Result;
use crate::product::ProductDesign;
use crate::randomness::derive_seed;
use crate::rational::{self, int, q, Rational};
use crate::sjpir::{self, SjPir};
use crate::system::{build_queries, run_transcript, DemandSet, MessageLibrary, Query, Randomness, Scheme};

pub const CRITERIA: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail") + "\n"
    }

    /// One `[PASS]`/`[FAIL]` line per criterion.
    pub fn matrix(&self) -> String {
        self.criteria
            .iter()
            .map(|c| {
                format!(
                    "[{}] {:>2} {}: {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    c.title,
                    c.detail
                )
            })
            .collect()
    }
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "CIA corner 1 load",
        2 => "CIA corner 2 load",
        3 => "CIA decodability",
        4 => "CIA privacy",
        5 => "SJ engine",
        6 => "Product design",
        7 => "Distinct demands",
        8 => "Formula coincidences",
        9 => "Gap bound",
        10 => "Memory sharing",
        _ => "unknown",
    }
}

/// Realizations visited by the corner-point load sweep. Domains up to this
/// size are walked completely; larger ones with an evenly spaced stride.
pub const LOAD_SWEEP_LIMIT: u64 = 20_000;

fn sweep(size: u64) -> (Vec<u64>, bool) {
    if size <= LOAD_SWEEP_LIMIT {
        ((0..size).collect(), true)
    } else {
        let stride = size.div_ceil(LOAD_SWEEP_LIMIT);
        ((0..size).step_by(stride as usize).collect(), false)
    }
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

struct Check {
    ok: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, cond: bool, note: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            if self.notes.len() < 4 {
                self.notes.push(note());
            }
        }
    }

    fn finish(self, id: usize, summary: String) -> CriterionResult {
        let detail = if self.ok { summary } else { self.notes.join("; ") };
        CriterionResult {
            id,
            title: title(id).to_string(),
            passed: self.ok,
            detail,
        }
    }

    fn run(&mut self, r: Result<()>) {
        if let Err(e) = r {
            self.ok = false;
            self.notes.push(e.to_string());
        }
    }
}

fn corner_load(
    id: usize,
    build: fn(usize) -> Result<Arc<dyn Scheme>>,
    expected: fn(i64) -> Rational,
) -> CriterionResult {
    let mut c = Check::new();
    let mut visited = Vec::new();
    for n in 2..=5usize {
        let r = (|| -> Result<()> {
            let s = build(n)?;
            let s = s.as_ref();
            let size = s.randomness().size().expect("CIA domains are enumerable");
            let (rs, complete) = sweep(size);
            let loads = audit::structural_loads(s, &all_demands(s), rs.iter().copied())?;
            let want = expected(n as i64);
            c.expect(loads.len() == 1 && loads.contains(&want), || {
                format!(
                    "N={n}: loads {:?}, expected {}",
                    loads.iter().map(fmt).collect::<Vec<_>>(),
                    fmt(&want)
                )
            });
            // Measured D/L of full runs agrees with the answer lengths.
            let lib = MessageLibrary::random(2, s.params().l, n as u64);
            for d in all_demands(s) {
                for &r in rs.iter().take(8) {
                    let t = run_transcript(s, &lib, &d, Randomness::Realization(r))?;
                    c.expect(t.load == want && t.is_correct(&lib), || {
                        format!("N={n}: run {r} of {d:?}")
                    });
                }
            }
            visited.push(format!(
                "N={n}: {} {} of {size}",
                rs.len() * 4,
                if complete { "runs, all" } else { "runs, strided" }
            ));
            Ok(())
        })();
        c.run(r);
    }
    c.finish(
        id,
        format!("load exact for every visited realization ({})", visited.join(", ")),
    )
}

pub fn criterion_1() -> CriterionResult {
    corner_load(1, |n| Ok(Arc::new(Cia1::new(n)?)), |n| q(n + 1, n))
}

pub fn criterion_2() -> CriterionResult {
    corner_load(2, |n| Ok(Arc::new(Cia2::new(n)?)), |n| q(n + 1, 2 * n - 1))
}

pub fn criterion_3(seed: u64) -> CriterionResult {
    let mut c = Check::new();
    let mut runs = 0;
    for n in [2usize, 3] {
        for s in [&Cia1::new(n).unwrap() as &dyn Scheme, &Cia2::new(n).unwrap()] {
            let libs: Vec<MessageLibrary> = (0..100)
                .map(|i| MessageLibrary::random(2, s.params().l, derive_seed(seed, (n * 1000 + i) as u64)))
                .collect();
            match audit::verify_correctness(s, &libs, &all_demands(s), RunPlan::Exhaustive) {
                Ok(r) => {
                    runs += r.runs;
                    c.expect(r.passed(), || {
                        format!(
                            "{} N={n}: {} failures, first {:?}",
                            s.name(),
                            r.failures,
                            r.counterexample.map(|f| f.reason)
                        )
                    });
                }
                Err(e) => c.run(Err(e)),
            }
        }
    }
    c.finish(3, format!("{runs} runs, zero decode failures"))
}

fn exact_privacy(c: &mut Check, s: &dyn Scheme, label: &str) -> usize {
    let mut audits = 0;
    for db in 1..=s.params().n {
        match audit::audit_privacy(s, db, &all_demands(s), AuditMode::Exhaustive, 0) {
            Ok(r) => {
                audits += 1;
                c.expect(r.passed, || format!("{label} db {db}: distance {:?}", r.distance));
            }
            Err(e) => c.run(Err(e)),
        }
    }
    audits
}

pub fn criterion_4() -> CriterionResult {
    let mut c = Check::new();
    let mut audits = 0;
    for n in [2usize, 3] {
        audits += exact_privacy(&mut c, &Cia1::new(n).unwrap(), &format!("cia1 N={n}"));
        audits += exact_privacy(&mut c, &Cia2::new(n).unwrap(), &format!("cia2 N={n}"));
    }
    c.finish(4, format!("{audits} exhaustive audits, every distance 0/1"))
}

pub fn criterion_5(seed: u64) -> CriterionResult {
    let mut c = Check::new();
    for k in 1..=4usize {
        for n in [2usize, 3] {
            let r = (|| -> Result<()> {
                let s = SjPir::new(k, n)?;
                let per_db: usize = (1..=k).map(|j| binomial(k, j) * (n - 1).pow(j as u32 - 1)).sum();
                let rate = (0..k as u32).fold(Rational::zero(), |acc, i| acc + q(1, (n as i64).pow(i)));
                for i in 0..100u64 {
                    let lib =
                        MessageLibrary::random(k, s.params().l, derive_seed(seed, (k * 10 + n) as u64 * 1000 + i));
                    let d = all_demands(&s);
                    let d = &d[(i as usize) % d.len()];
                    let t = run_transcript(&s, &lib, d, Randomness::Seed(derive_seed(seed, i)))?;
                    c.expect(t.is_correct(&lib), || {
                        format!("K={k} N={n}: decode failed on library {i}")
                    });
                    c.expect(t.answers.iter().all(|a| a.bits.len() == per_db), || {
                        format!("K={k} N={n}: per-database download differs from {per_db}")
                    });
                    c.expect(t.load == rate, || {
                        format!("K={k} N={n}: rate {} != {}", fmt(&t.load), fmt(&rate))
                    });
                }
                Ok(())
            })();
            c.run(r);
        }
    }
    let s = SjPir::new(2, 2).unwrap();
    c.expect(s.randomness().size() == Some(576), || {
        "K=2 N=2 domain is not 576".into()
    });
    let audits = exact_privacy(&mut c, &s, "sj K=2 N=2");
    c.finish(
        5,
        format!("8 configurations x 100 libraries; {audits} exhaustive audits over 576 permutation pairs"),
    )
}

fn pd_projection(q: &Query) -> Vec<Vec<Vec<Vec<usize>>>> {
    match q {
        Query::Pd { subsets, .. } => subsets
            .iter()
            .map(|s| {
                s.per_user
                    .iter()
                    .map(|p| sjpir::structural_projection(&p.atoms))
                    .collect()
            })
            .collect(),
        _ => Vec::new(),
    }
}

pub fn criterion_6(seed: u64) -> CriterionResult {
    let mut c = Check::new();
    let mut configs = 0;
    for k in [2usize, 3] {
        for ku in [2usize, 3] {
            for n in [2usize, 3] {
                for t in 1..ku {
                    configs += 1;
                    let r = (|| -> Result<()> {
                        let s = ProductDesign::new(k, ku, n, t)?;
                        let rate = (0..k as u32).fold(Rational::zero(), |acc, i| acc + q(1, (n as i64).pow(i)));
                        let want = q((ku - t) as i64, (t + 1) as i64) * rate;
                        let demands = all_demands(&s);
                        let label = format!("K={k} Ku={ku} N={n} t={t}");
                        for li in 0..20u64 {
                            let lib = MessageLibrary::random(k, s.params().l, derive_seed(seed, configs * 100 + li));
                            for (di, d) in demands.iter().enumerate() {
                                let r = Randomness::Seed(derive_seed(derive_seed(seed, li), di as u64));
                                let tr = run_transcript(&s, &lib, d, r)?;
                                c.expect(tr.is_correct(&lib), || format!("{label}: decode failed for {d:?}"));
                                c.expect(tr.load == want, || {
                                    format!("{label}: load {} != {}", fmt(&tr.load), fmt(&want))
                                });
                            }
                        }
                        for db in 0..n {
                            let views: BTreeSet<Vec<u8>> = demands
                                .iter()
                                .map(|d| {
                                    let qs = build_queries(&s, d, Randomness::Seed(seed))?;
                                    Ok(serde_json::to_vec(&pd_projection(&qs[db]))?)
                                })
                                .collect::<Result<_>>()?;
                            c.expect(views.len() == 1, || {
                                format!("{label}: structure at db {} depends on demand", db + 1)
                            });
                        }
                        Ok(())
                    })();
                    c.run(r);
                }
            }
        }
    }
    let s = ProductDesign::new(2, 2, 2, 1).unwrap();
    let audits = exact_privacy(&mut c, &s, "pd K=Ku=N=2 t=1");
    c.finish(
        6,
        format!("{configs} configurations x 20 libraries x all demands; {audits} exhaustive audits over 331776 realizations"),
    )
}

pub fn criterion_7() -> CriterionResult {
    let mut c = Check::new();
    let libs: Vec<MessageLibrary> = MessageLibrary::enumerate_all(2, 3).collect();
    for (corner, want) in [(Corner::First, q(4, 3)), (Corner::Second, int(1))] {
        let s = DistinctDemands::new(corner);
        let demands = DemandSet::Distinct.enumerate(2, 2);
        match audit::verify_correctness(&s, &libs, &demands, RunPlan::Exhaustive) {
            Ok(r) => c.expect(r.passed() && r.runs == 256, || {
                format!("{}: {} failures", s.name(), r.failures)
            }),
            Err(e) => c.run(Err(e)),
        }
        for lib in &libs {
            for d in &demands {
                for coin in 0..2 {
                    match run_transcript(&s, lib, d, Randomness::Realization(coin)) {
                        Ok(t) => c.expect(t.load == want, || format!("{}: load {}", s.name(), fmt(&t.load))),
                        Err(e) => c.run(Err(e)),
                    }
                }
            }
        }
        for db in 1..=2 {
            match audit::audit_privacy(&s, db, &demands, AuditMode::Exhaustive, 0) {
                Ok(r) => {
                    let uniform = r
                        .per_theta
                        .iter()
                        .all(|(_, dist)| dist.len() == 2 && dist.values().all(|p| *p == q(1, 2)));
                    c.expect(r.passed && uniform, || {
                        format!("{} db {db}: variants not uniform", s.name())
                    });
                }
                Err(e) => c.run(Err(e)),
            }
        }
    }
    c.finish(
        7,
        "256 runs per corner decode; loads 4/3 and 1/1; variants uniform at both databases".into(),
    )
}

fn grid(hi: Rational, points: i64) -> impl Iterator<Item = Rational> {
    (0..=points).map(move |i| hi * q(i, points))
}

pub fn criterion_8() -> CriterionResult {
    let mut c = Check::new();
    let mut r = || -> Result<()> {
        for n in 2..=6usize {
            let [b1, b2] = bounds::cia_breakpoints(n);
            for i in 0..=120 {
                let m = b2 + (int(2) - b2) * q(i, 120);
                let (a, b) = (bounds::cia_load(m, n)?, bounds::single_user_pir_bound(2, n, m)?);
                c.expect(a == b, || {
                    format!("N={n} M={}: cia {} vs single-user {}", fmt(&m), fmt(&a), fmt(&b))
                });
            }
            for (bp, lo, hi) in [(b1, 0, 1), (b2, 1, 2)] {
                let (x, y) = (bounds::cia_branch(n, lo, bp), bounds::cia_branch(n, hi, bp));
                c.expect(x == y, || format!("cia N={n} breaks at {}", fmt(&bp)));
            }
            let u = bounds::uncoded_breakpoint(n);
            c.expect(
                bounds::uncoded_branch(n, 0, u) == bounds::uncoded_branch(n, 1, u),
                || format!("uncoded N={n} breaks at {}", fmt(&u)),
            );
        }
        for (i, bp) in bounds::distinct_breakpoints().into_iter().enumerate() {
            c.expect(
                bounds::distinct_branch(i, bp) == bounds::distinct_branch(i + 1, bp),
                || format!("distinct breaks at {}", fmt(&bp)),
            );
        }
        // Corner values of the distinct-demand trade-off.
        c.expect(bounds::distinct_optimal_load(q(1, 3))? == q(4, 3), || {
            "distinct(1/3) != 4/3".into()
        });
        c.expect(bounds::distinct_optimal_load(q(2, 3))? == int(1), || {
            "distinct(2/3) != 1".into()
        });
        Ok(())
    };
    let res = r();
    c.run(res);
    c.finish(
        8,
        "coincidence on [2(N-1)/(2N-1), 2] for N=2..6; all branches meet exactly at breakpoints".into(),
    )
}

pub fn criterion_9() -> CriterionResult {
    let mut c = Check::new();
    let mut worst = (Rational::zero(), String::new());
    for k in 2..=6usize {
        for ku in 2..=6usize {
            for n in [2usize, 3] {
                for m in grid(int(k as i64), 199) {
                    match bounds::gap_ratio(k, ku, n, m) {
                        Ok(g) => {
                            if g > worst.0 {
                                worst = (g, format!("K={k} Ku={ku} N={n} M={}", fmt(&m)));
                            }
                            c.expect(g <= int(8), || {
                                format!("ratio {} at K={k} Ku={ku} N={n} M={}", fmt(&g), fmt(&m))
                            });
                        }
                        Err(e) => c.run(Err(e)),
                    }
                }
            }
        }
    }
    c.finish(9, format!("largest ratio {} at {}", fmt(&worst.0), worst.1))
}

pub fn criterion_10(seed: u64) -> CriterionResult {
    let mut c = Check::new();
    let mut r = || -> Result<()> {
        let a: Arc<dyn Scheme> = Arc::new(Cia1::new(2)?);
        let b: Arc<dyn Scheme> = Arc::new(Cia2::new(2)?);
        let s = bounds::memory_share(a.clone(), b.clone(), q(1, 2))?;
        c.expect(s.params().m == q(11, 24), || format!("memory {}", fmt(&s.params().m)));
        for i in 0..10u64 {
            let lib = MessageLibrary::random(2, s.params().l, derive_seed(seed, 500 + i));
            for d in all_demands(s.as_ref()) {
                let t = run_transcript(s.as_ref(), &lib, &d, Randomness::Seed(derive_seed(seed, i)))?;
                c.expect(t.is_correct(&lib), || format!("share decode failed for {d:?}"));
                c.expect(t.load == q(5, 4), || format!("share load {}", fmt(&t.load)));
            }
        }
        for (lambda, base) in [(Rational::one(), &a), (Rational::zero(), &b)] {
            let s = bounds::memory_share(a.clone(), b.clone(), lambda)?;
            let lib = MessageLibrary::random(2, base.params().l, seed);
            for d in all_demands(base.as_ref()) {
                let x = run_transcript(s.as_ref(), &lib, &d, Randomness::Seed(seed))?.to_json();
                let y = run_transcript(base.as_ref(), &lib, &d, Randomness::Seed(seed))?.to_json();
                c.expect(x == y, || {
                    format!("lambda={} differs from {}", fmt(&lambda), base.name())
                });
            }
        }
        Ok(())
    };
    let res = r();
    c.run(res);
    c.finish(
        10,
        "lambda=1/2: L=24, memory 11/24, load 5/4, all decode; endpoints byte-identical".into(),
    )
}

pub fn criterion(id: usize, seed: u64) -> CriterionResult {
    match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(seed),
        4 => criterion_4(),
        5 => criterion_5(seed),
        6 => criterion_6(seed),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(seed),
        _ => CriterionResult {
            id,
            title: title(id).to_string(),
            passed: false,
            detail: format!("no criterion {id}"),
        },
    }
}

/// Runs the selected criteria (all when `only` is empty) in order.
pub fn verify_all(seed: u64, only: &[usize]) -> VerifyReport {
    let ids: Vec<usize> = if only.is_empty() {
        (1..=CRITERIA).collect()
    } else {
        only.to_vec()
    };
    VerifyReport {
        seed,
        criteria: ids.into_iter().map(|id| criterion(id, seed)).collect(),
    }
}

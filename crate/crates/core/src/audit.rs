//! Decodability checks, per-database privacy audits and load measurement.
//!
//! The privacy audit looks at the query each database receives. Answers are
//! a deterministic function of the query and the library, and no shipped
//! scheme lets its queries depend on message values, so equal per-demand
//! query distributions at a database mean that database learns nothing
//! about the demand vector.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::randomness::{derive_seed, Choices};
use crate::rational::{self, Rational};
use crate::system::{
    answer_for, build_queries, canonical_query_bytes, mismatch, run_transcript, Answer, CacheContent, CacheDescription,
    DemandSet, DemandVector, MessageLibrary, Query, Randomness, RandomnessDomain, Scheme, SystemParams, Transcript,
};

/// Largest domain the exhaustive modes will walk.
pub const ENUMERATION_LIMIT: u64 = 50_000_000;

/// Default total-variation threshold of the sampled audit.
pub const SAMPLED_THRESHOLD: f64 = 0.02;

/// Fewest samples per demand for which a sampled audit can pass.
pub const MIN_SAMPLES: usize = 100_000;

fn enumerable_size(scheme: &dyn Scheme) -> Result<u64> {
    match scheme.randomness() {
        RandomnessDomain::Enumerable { size } if size <= ENUMERATION_LIMIT => Ok(size),
        _ => Err(Error::NotEnumerable(scheme.name().to_string())),
    }
}

/// Which runs a check covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunPlan {
    /// Every realization of the scheme's randomness.
    Exhaustive,
    /// `count` seeded runs derived from `seed`.
    Sampled { count: usize, seed: u64 },
}

impl RunPlan {
    fn randomness(&self, scheme: &dyn Scheme, demand_index: usize) -> Result<Vec<Randomness>> {
        Ok(match *self {
            RunPlan::Exhaustive => (0..enumerable_size(scheme)?).map(Randomness::Realization).collect(),
            RunPlan::Sampled { count, seed } => {
                let base = derive_seed(seed, demand_index as u64);
                (0..count as u64)
                    .map(|i| Randomness::Seed(derive_seed(base, i)))
                    .collect()
            }
        })
    }
}

/// A failed run, identified precisely enough to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub library: usize,
    pub demand: DemandVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realization: Option<u64>,
    pub reason: String,
    /// Present when the run completed but decoded the wrong message.
    pub transcript: Option<Transcript>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrectnessReport {
    pub scheme: String,
    pub runs: usize,
    pub failures: usize,
    pub counterexample: Option<Failure>,
}

impl CorrectnessReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn check_run(
    scheme: &dyn Scheme,
    li: usize,
    lib: &MessageLibrary,
    demand: &DemandVector,
    r: Randomness,
) -> Option<Failure> {
    let (seed, realization) = match r {
        Randomness::Seed(s) => (Some(s), None),
        Randomness::Realization(x) => (None, Some(x)),
    };
    let fail = |reason: String, transcript| Failure {
        library: li,
        demand: demand.clone(),
        seed,
        realization,
        reason,
        transcript,
    };
    match run_transcript(scheme, lib, demand, r) {
        Ok(t) if t.is_correct(lib) => None,
        Ok(t) => Some(fail("decoded message differs from the demanded one".into(), Some(t))),
        Err(e) => Some(fail(e.to_string(), None)),
    }
}

/// Runs every (library, demand, randomness) combination and checks that each
/// user decodes its demanded message. The counterexample is the first
/// failure in that order.
pub fn verify_correctness(
    scheme: &dyn Scheme,
    libraries: &[MessageLibrary],
    demands: &[DemandVector],
    plan: RunPlan,
) -> Result<CorrectnessReport> {
    let mut jobs = Vec::new();
    for di in 0..demands.len() {
        for r in plan.randomness(scheme, di)? {
            jobs.push((di, r));
        }
    }
    let mut runs = 0;
    let mut failures = 0;
    let mut counterexample = None;
    for (li, lib) in libraries.iter().enumerate() {
        let found: Vec<Failure> = jobs
            .par_iter()
            .filter_map(|&(di, r)| check_run(scheme, li, lib, &demands[di], r))
            .collect();
        runs += jobs.len();
        failures += found.len();
        if counterexample.is_none() {
            counterexample = found.into_iter().next();
        }
    }
    Ok(CorrectnessReport {
        scheme: scheme.name().to_string(),
        runs,
        failures,
        counterexample,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AuditMode {
    Exhaustive,
    Sampled { samples: usize, threshold: f64 },
}

impl AuditMode {
    pub fn sampled(samples: usize) -> Self {
        AuditMode::Sampled {
            samples,
            threshold: SAMPLED_THRESHOLD,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            AuditMode::Exhaustive => "exhaustive",
            AuditMode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distance {
    Exact(Rational),
    Estimate(f64),
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Exact(r) => s.serialize_str(&rational::format(r)),
            Distance::Estimate(x) => s.serialize_f64(*x),
        }
    }
}

/// Exact distribution of the canonical query bytes, or of the flattened
/// query leaves in sampled mode.
pub type QueryDistribution = BTreeMap<String, Rational>;

#[derive(Clone, Debug, PartialEq)]
pub struct PrivacyReport {
    pub scheme: String,
    pub db: usize,
    pub mode: AuditMode,
    pub distance: Distance,
    pub passed: bool,
    /// Exhaustive mode only: per demand, query text → probability.
    pub per_theta: Vec<(DemandVector, QueryDistribution)>,
    pub counterexample: Option<Transcript>,
}

impl Serialize for PrivacyReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(6))?;
        m.serialize_entry("scheme", &self.scheme)?;
        m.serialize_entry("db", &self.db)?;
        m.serialize_entry("mode", self.mode.label())?;
        m.serialize_entry("distance", &self.distance)?;
        m.serialize_entry("verdict", if self.passed { "pass" } else { "fail" })?;
        m.serialize_entry("counterexample", &self.counterexample)?;
        m.end()
    }
}

impl PrivacyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn query_at(scheme: &dyn Scheme, demand: &DemandVector, r: Randomness, db: usize) -> Result<Query> {
    let mut qs = build_queries(scheme, demand, r)?;
    Ok(qs.swap_remove(db - 1))
}

fn exact_tv(a: &QueryDistribution, b: &QueryDistribution) -> Rational {
    let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    let zero = Rational::zero();
    let sum = keys.into_iter().fold(Rational::zero(), |acc, k| {
        let d = *a.get(k).unwrap_or(&zero) - *b.get(k).unwrap_or(&zero);
        acc + if d < zero { -d } else { d }
    });
    sum / Rational::from_integer(2)
}

/// `(first, second)` demand indices and distance of the most distinguishable pair.
fn worst_pair<T: Copy + PartialOrd>(n: usize, dist: impl Fn(usize, usize) -> T) -> Option<(usize, usize, T)> {
    let mut worst: Option<(usize, usize, T)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(i, j);
            if worst.is_none_or(|w| d > w.2) {
                worst = Some((i, j, d));
            }
        }
    }
    worst
}

/// Flattens a JSON value into `(path, scalar)` leaves.
fn leaves(v: &Value, path: &mut String, out: &mut Vec<(String, String)>) {
    match v {
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                leaves(x, path, out);
                path.truncate(len);
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                let len = path.len();
                path.push('.');
                path.push_str(k);
                leaves(x, path, out);
                path.truncate(len);
            }
        }
        scalar => out.push((path.clone(), scalar.to_string())),
    }
}

type LeafCounts = BTreeMap<String, BTreeMap<String, u64>>;

fn leaf_counts(queries: &[Query]) -> LeafCounts {
    let mut counts: LeafCounts = BTreeMap::new();
    let mut buf = Vec::new();
    for q in queries {
        buf.clear();
        leaves(
            &serde_json::to_value(q).expect("queries serialize"),
            &mut String::new(),
            &mut buf,
        );
        for (path, value) in buf.drain(..) {
            *counts.entry(path).or_default().entry(value).or_default() += 1;
        }
    }
    counts
}

/// Largest total-variation distance between the two demands' empirical
/// marginals over all query leaves. A leaf missing on one side counts as
/// fully distinguishing.
fn leaf_tv(a: &LeafCounts, an: usize, b: &LeafCounts, bn: usize) -> f64 {
    let empty = BTreeMap::new();
    let paths: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    paths
        .into_iter()
        .map(|p| {
            let (x, y) = (a.get(p).unwrap_or(&empty), b.get(p).unwrap_or(&empty));
            let values: BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            let sum: f64 = values
                .into_iter()
                .map(|v| {
                    let px = *x.get(v).unwrap_or(&0) as f64 / an as f64;
                    let py = *y.get(v).unwrap_or(&0) as f64 / bn as f64;
                    (px - py).abs()
                })
                .sum();
            sum / 2.0
        })
        .fold(0.0, f64::max)
}

fn counterexample(scheme: &dyn Scheme, demand: &DemandVector, r: Randomness) -> Option<Transcript> {
    let lib = MessageLibrary::zeros(scheme.params().k, scheme.params().l);
    run_transcript(scheme, &lib, demand, r).ok()
}

/// Compares the query distribution at database `db` (1-based) across every
/// demand in `demands`.
///
/// Exhaustive mode computes each demand's exact distribution over the
/// canonical query bytes and passes iff the largest pairwise total-variation
/// distance is exactly 0. Sampled mode draws `samples` seeded runs per demand,
/// estimates the largest total-variation distance between per-leaf marginals
/// of the query, and passes iff it is below `threshold` and `samples` is at
/// least [`MIN_SAMPLES`].
pub fn audit_privacy(
    scheme: &dyn Scheme,
    db: usize,
    demands: &[DemandVector],
    mode: AuditMode,
    seed: u64,
) -> Result<PrivacyReport> {
    if db == 0 || db > scheme.params().n {
        return Err(Error::InvalidParameter(format!(
            "database {db} outside [1, {}]",
            scheme.params().n
        )));
    }
    if demands.len() < 2 {
        return Err(Error::InvalidParameter(
            "a privacy audit needs at least two demands".into(),
        ));
    }
    let name = scheme.name().to_string();
    match mode {
        AuditMode::Exhaustive => {
            let size = enumerable_size(scheme)?;
            let p = Rational::new(1, size as i64);
            let mut per_theta = Vec::with_capacity(demands.len());
            for d in demands {
                let keys: Vec<Vec<u8>> = (0..size)
                    .into_par_iter()
                    .map(|r| {
                        Ok(canonical_query_bytes(&query_at(
                            scheme,
                            d,
                            Randomness::Realization(r),
                            db,
                        )?))
                    })
                    .collect::<Result<_>>()?;
                let mut dist = QueryDistribution::new();
                for k in keys {
                    let text = String::from_utf8(k).expect("JSON is UTF-8");
                    *dist.entry(text).or_insert_with(Rational::zero) += p;
                }
                per_theta.push((d.clone(), dist));
            }
            let (i, j, tv) = worst_pair(per_theta.len(), |i, j| exact_tv(&per_theta[i].1, &per_theta[j].1))
                .expect("at least two demands");
            let passed = tv.is_zero();
            let witness = if passed {
                None
            } else {
                // A realization of demand i whose query has a different probability under demand j.
                let (a, b) = (&per_theta[i].1, &per_theta[j].1);
                let differs = |k: &String| a.get(k) != b.get(k);
                let found = (0..size).find(|&r| {
                    query_at(scheme, &demands[i], Randomness::Realization(r), db)
                        .map(|q| differs(&String::from_utf8(canonical_query_bytes(&q)).expect("UTF-8")))
                        .unwrap_or(false)
                });
                found.and_then(|r| counterexample(scheme, &demands[i], Randomness::Realization(r)))
            };
            Ok(PrivacyReport {
                scheme: name,
                db,
                mode,
                distance: Distance::Exact(tv),
                passed,
                per_theta,
                counterexample: witness,
            })
        }
        AuditMode::Sampled { samples, threshold } => {
            if samples == 0 {
                return Err(Error::InvalidParameter(
                    "sampled audit needs at least one sample".into(),
                ));
            }
            let counts = demands
                .iter()
                .enumerate()
                .map(|(di, d)| {
                    let runs = RunPlan::Sampled { count: samples, seed }.randomness(scheme, di)?;
                    let qs: Vec<Query> = runs
                        .into_par_iter()
                        .map(|r| query_at(scheme, d, r, db))
                        .collect::<Result<_>>()?;
                    Ok(leaf_counts(&qs))
                })
                .collect::<Result<Vec<_>>>()?;
            let (i, _, tv) = worst_pair(counts.len(), |i, j| leaf_tv(&counts[i], samples, &counts[j], samples))
                .expect("at least two demands");
            let passed = tv < threshold && samples >= MIN_SAMPLES;
            let witness = if passed {
                None
            } else {
                let r = RunPlan::Sampled { count: 1, seed }.randomness(scheme, i)?[0];
                counterexample(scheme, &demands[i], r)
            };
            Ok(PrivacyReport {
                scheme: name,
                db,
                mode,
                distance: Distance::Estimate(tv),
                passed,
                per_theta: Vec::new(),
                counterexample: witness,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub scheme: String,
    #[serde(serialize_with = "loads_as_strings")]
    pub per_theta: Vec<(DemandVector, Rational)>,
    pub uniform: bool,
}

fn loads_as_strings<S: Serializer>(v: &[(DemandVector, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(v.len()))?;
    for (d, r) in v {
        let key = d.as_slice().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        m.serialize_entry(&key, &rational::format(r))?;
    }
    m.end()
}

/// One seeded run per demand; the load is `D/L` of that run.
pub fn measure_load(
    scheme: &dyn Scheme,
    lib: &MessageLibrary,
    demands: &[DemandVector],
    seed: u64,
) -> Result<LoadReport> {
    let per_theta = demands
        .iter()
        .enumerate()
        .map(|(di, d)| {
            let t = run_transcript(scheme, lib, d, Randomness::Seed(derive_seed(seed, di as u64)))?;
            Ok((d.clone(), t.load))
        })
        .collect::<Result<Vec<_>>>()?;
    let uniform = per_theta.windows(2).all(|w| w[0].1 == w[1].1);
    Ok(LoadReport {
        scheme: scheme.name().to_string(),
        per_theta,
        uniform,
    })
}

/// Load of one run computed from the answer lengths its queries imply,
/// without touching a library.
pub fn structural_load(scheme: &dyn Scheme, demand: &DemandVector, r: Randomness) -> Result<Rational> {
    let qs = build_queries(scheme, demand, r)?;
    let d: usize = qs.iter().map(|q| scheme.answer_len(q)).sum::<Result<usize>>()?;
    Ok(Rational::new(d as i64, scheme.params().l as i64))
}

/// Every distinct structural load over the given realizations of every demand.
pub fn structural_loads(
    scheme: &dyn Scheme,
    demands: &[DemandVector],
    realizations: impl Iterator<Item = u64> + Clone + Send + Sync,
) -> Result<BTreeSet<Rational>> {
    let rs: Vec<u64> = realizations.collect();
    let mut out = BTreeSet::new();
    for d in demands {
        let loads: BTreeSet<Rational> = rs
            .par_iter()
            .map(|&r| structural_load(scheme, d, Randomness::Realization(r)))
            .collect::<Result<_>>()?;
        out.extend(loads);
    }
    Ok(out)
}

/// Fault-injection scheme: database 1 is told the demand vector and returns
/// every distinct demanded message. It decodes correctly but is neither
/// private nor demand-independent in load.
#[derive(Clone, Debug)]
pub struct Strawman {
    params: SystemParams,
}

impl Strawman {
    pub fn new(k: usize, ku: usize, n: usize) -> Result<Self> {
        Ok(Self {
            params: SystemParams::new(k, ku, n, 1, Rational::zero())?,
        })
    }

    fn distinct(demand: &[usize]) -> Vec<usize> {
        let mut seen = Vec::new();
        for &t in demand {
            if !seen.contains(&t) {
                seen.push(t);
            }
        }
        seen
    }

    fn parse<'a>(&self, query: &'a Query) -> Result<(usize, &'a [usize])> {
        match query {
            Query::Strawman { db, demand } if (1..=self.params.n).contains(db) => Ok((*db, demand)),
            q => Err(mismatch("strawman", q)),
        }
    }
}

impl Scheme for Strawman {
    fn name(&self) -> &str {
        "strawman"
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn demand_set(&self) -> DemandSet {
        DemandSet::All
    }

    fn randomness(&self) -> RandomnessDomain {
        RandomnessDomain::Enumerable { size: 1 }
    }

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>> {
        lib.check(&self.params)?;
        Ok((0..self.params.ku)
            .map(|u| CacheContent::from_description(u + 1, CacheDescription::Uncoded(Vec::new()), lib))
            .collect())
    }

    fn queries(&self, demand: &DemandVector, _rng: &mut dyn Choices) -> Result<Vec<Query>> {
        Ok((1..=self.params.n)
            .map(|db| Query::Strawman {
                db,
                demand: if db == 1 {
                    demand.as_slice().to_vec()
                } else {
                    Vec::new()
                },
            })
            .collect())
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        let (db, demand) = self.parse(query)?;
        if demand.iter().any(|&t| t == 0 || t > self.params.k) {
            return Err(Error::MalformedQuery(format!("demand {demand:?} out of range")));
        }
        let parts: Vec<&BitVector> = Self::distinct(demand).into_iter().map(|t| lib.message(t - 1)).collect();
        Ok(Answer {
            db,
            bits: BitVector::concat(parts),
        })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        let (_, demand) = self.parse(query)?;
        Ok(Self::distinct(demand).len() * self.params.l)
    }

    fn decode(
        &self,
        user: usize,
        demand: &DemandVector,
        _queries: &[Query],
        answers: &[Answer],
        _cache: &BitVector,
    ) -> Result<BitVector> {
        let l = self.params.l;
        let pos = Self::distinct(demand.as_slice())
            .iter()
            .position(|&t| t == demand.theta(user))
            .expect("own demand is listed");
        let bits = &answer_for(answers, 1)?.bits;
        if bits.len() < (pos + 1) * l {
            return Err(Error::DecodeFailure("strawman answer is too short".into()));
        }
        Ok(bits.slice(pos * l, (pos + 1) * l))
    }
}

/// Every demand the scheme serves.
pub fn all_demands(scheme: &dyn Scheme) -> Vec<DemandVector> {
    let p = scheme.params();
    scheme.demand_set().enumerate(p.k, p.ku)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cia::{Cia1, Cia2};
    use crate::distinct::{Corner, DistinctDemands};
    use crate::rational::q;

    #[test]
    fn cia_exhaustive_privacy_n2() {
        for s in [&Cia1::new(2).unwrap() as &dyn Scheme, &Cia2::new(2).unwrap()] {
            for db in 1..=2 {
                let r = audit_privacy(s, db, &all_demands(s), AuditMode::Exhaustive, 0).unwrap();
                assert!(r.passed, "{} db {db}", s.name());
                assert_eq!(r.distance, Distance::Exact(Rational::zero()));
            }
        }
    }

    #[test]
    fn strawman_fails_privacy_and_load() {
        let s = Strawman::new(2, 2, 2).unwrap();
        let r = audit_privacy(&s, 1, &all_demands(&s), AuditMode::Exhaustive, 0).unwrap();
        assert!(!r.passed);
        assert_eq!(r.distance, Distance::Exact(Rational::from_integer(1)));
        assert!(r.counterexample.is_some());
        let json: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["distance"], "1/1");
        assert_eq!(json["verdict"], "fail");
        let lib = MessageLibrary::random(2, 1, 3);
        let load = measure_load(&s, &lib, &all_demands(&s), 0).unwrap();
        assert!(!load.uniform);
        let c = verify_correctness(&s, &[lib], &all_demands(&s), RunPlan::Exhaustive).unwrap();
        assert!(c.passed());
        let sampled = audit_privacy(&s, 1, &all_demands(&s), AuditMode::sampled(10), 0).unwrap();
        assert_eq!(sampled.distance, Distance::Estimate(1.0));
    }

    #[test]
    fn distinct_variants_are_uniform() {
        let s = DistinctDemands::new(Corner::First);
        for db in 1..=2 {
            let r = audit_privacy(&s, db, &all_demands(&s), AuditMode::Exhaustive, 0).unwrap();
            assert!(r.passed);
            for (_, dist) in &r.per_theta {
                assert_eq!(dist.len(), 2);
                assert!(dist.values().all(|p| *p == q(1, 2)));
            }
        }
    }

    #[test]
    fn cia2_loads_n3() {
        let s = Cia2::new(3).unwrap();
        let lib = MessageLibrary::random(2, 5, 0);
        let r = measure_load(&s, &lib, &all_demands(&s), 1).unwrap();
        assert!(r.uniform);
        assert!(r.per_theta.iter().all(|(_, l)| *l == q(4, 5)));
    }

    #[test]
    fn leaves_flatten_paths() {
        let mut out = Vec::new();
        leaves(&serde_json::json!({"a": [1, {"b": 2}]}), &mut String::new(), &mut out);
        assert_eq!(
            out,
            vec![
                (".a[0]".to_string(), "1".to_string()),
                (".a[1].b".to_string(), "2".to_string())
            ]
        );
    }

    #[test]
    fn seeded_only_is_not_enumerable() {
        let s = crate::sjpir::SjPir::new(4, 3).unwrap();
        let d = all_demands(&s);
        assert!(matches!(
            audit_privacy(&s, 1, &d, AuditMode::Exhaustive, 0),
            Err(Error::NotEnumerable(_))
        ));
    }
}

//! The problem model shared by every scheme: library, caches, demands,
//! queries, answers and full protocol transcripts.
//!
//! Indices that appear on the wire (users, databases, messages, symbol
//! positions) are 1-based. Internal vectors are 0-based.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::product::PdSubsetQuery;
use crate::randomness::{Choices, IndexedChoices, SeededChoices};
use crate::rational::{self, Rational};
use crate::sjpir::QueryAtom;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "Ku")]
    pub ku: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M", with = "rational::as_string")]
    pub m: Rational,
}

impl SystemParams {
    pub fn new(k: usize, ku: usize, n: usize, l: usize, m: Rational) -> Result<Self> {
        if k == 0 || ku == 0 || n == 0 || l == 0 {
            return Err(Error::InvalidParameter(format!(
                "K, Ku, N and L must be positive (K={k}, Ku={ku}, N={n}, L={l})"
            )));
        }
        if m < Rational::zero() || m > Rational::from_integer(k as i64) {
            return Err(Error::InvalidParameter(format!(
                "cache size M={} outside [0, K]",
                rational::format(&m)
            )));
        }
        let p = Self { k, ku, n, l, m };
        p.cache_bits()?;
        Ok(p)
    }

    /// `M·L`, which must be a whole number of bits.
    pub fn cache_bits(&self) -> Result<usize> {
        let bits = self.m * Rational::from_integer(self.l as i64);
        if !bits.is_integer() {
            return Err(Error::InvalidParameter(format!(
                "M·L = {} is not an integer number of bits",
                rational::format(&bits)
            )));
        }
        Ok(bits.to_integer() as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageLibrary {
    messages: Vec<BitVector>,
}

impl MessageLibrary {
    pub fn new(messages: Vec<BitVector>) -> Result<Self> {
        let Some(first) = messages.first() else {
            return Err(Error::InvalidParameter("library needs at least one message".into()));
        };
        let l = first.len();
        if let Some(bad) = messages.iter().find(|m| m.len() != l) {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: bad.len(),
            });
        }
        Ok(Self { messages })
    }

    pub fn zeros(k: usize, l: usize) -> Self {
        Self {
            messages: vec![BitVector::zeros(l); k],
        }
    }

    /// Uniformly random contents from a seeded generator.
    pub fn random(k: usize, l: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let messages = (0..k).map(|_| BitVector::from_fn(l, |_| rng.gen::<bool>())).collect();
        Self { messages }
    }

    /// All `2^(k·l)` libraries, in order of their packed integer value.
    pub fn enumerate_all(k: usize, l: usize) -> impl Iterator<Item = MessageLibrary> {
        let total = k * l;
        assert!(total < 32, "exhaustive library enumeration over {total} bits");
        (0u64..1 << total).map(move |x| Self {
            messages: (0..k)
                .map(|m| BitVector::from_fn(l, |i| (x >> (m * l + i)) & 1 == 1))
                .collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.messages.len()
    }

    pub fn l(&self) -> usize {
        self.messages[0].len()
    }

    /// Message `index` (0-based).
    pub fn message(&self, index: usize) -> &BitVector {
        &self.messages[index]
    }

    pub fn messages(&self) -> &[BitVector] {
        &self.messages
    }

    /// Bits `start..end` of every message.
    pub fn slice(&self, start: usize, end: usize) -> MessageLibrary {
        Self {
            messages: self.messages.iter().map(|m| m.slice(start, end)).collect(),
        }
    }

    /// All messages concatenated: coordinate `k·L + i` is bit `i` of message `k`.
    pub fn flat(&self) -> BitVector {
        BitVector::concat(&self.messages)
    }

    pub fn check(&self, params: &SystemParams) -> Result<()> {
        if self.k() != params.k || self.l() != params.l {
            return Err(Error::ParamMismatch(format!(
                "library has K={}, L={} but the scheme expects K={}, L={}",
                self.k(),
                self.l(),
                params.k,
                params.l
            )));
        }
        Ok(())
    }
}

/// Demands `θ_u ∈ [1, K]`, one per user.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(thetas: Vec<usize>, k: usize) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidDemand("empty demand vector".into()));
        }
        if let Some(bad) = thetas.iter().find(|&&t| t == 0 || t > k) {
            return Err(Error::InvalidDemand(format!("demand {bad} outside [1, {k}]")));
        }
        Ok(Self(thetas))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based message demanded by 0-based user `u`.
    pub fn theta(&self, u: usize) -> usize {
        self.0[u]
    }

    /// 0-based message index demanded by user `u`.
    pub fn message_index(&self, u: usize) -> usize {
        self.0[u] - 1
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_distinct(&self) -> bool {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }

    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let thetas = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidDemand(format!("`{t}` is not a message index")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(thetas, k)
    }
}

/// Which demand vectors a scheme serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemandSet {
    /// Every vector in `[K]^Ku`.
    All,
    /// Only vectors with pairwise distinct entries.
    Distinct,
}

impl DemandSet {
    /// Members in lexicographic order.
    pub fn enumerate(&self, k: usize, ku: usize) -> Vec<DemandVector> {
        let mut out = Vec::new();
        let mut cur = vec![1; ku];
        loop {
            let d = DemandVector(cur.clone());
            if *self == DemandSet::All || d.is_distinct() {
                out.push(d);
            }
            let mut i = ku;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < k {
                    cur[i] += 1;
                    cur[i + 1..].iter_mut().for_each(|c| *c = 1);
                    break;
                }
            }
        }
    }

    pub fn contains(&self, d: &DemandVector) -> bool {
        match self {
            DemandSet::All => true,
            DemandSet::Distinct => d.is_distinct(),
        }
    }
}

/// How a user's cache relates to the library.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CacheDescription {
    /// Raw bits, as 1-based `(message, bit)` pairs.
    #[serde(rename = "uncoded")]
    Uncoded(Vec<(usize, usize)>),
    /// One row per cached bit, over the flattened library (`K·L` columns).
    #[serde(rename = "linear")]
    Linear(BitMatrix),
}

impl CacheDescription {
    pub fn evaluate(&self, lib: &MessageLibrary) -> BitVector {
        match self {
            CacheDescription::Uncoded(idx) => idx.iter().map(|&(m, i)| lib.message(m - 1).get(i - 1)).collect(),
            CacheDescription::Linear(rows) => {
                let flat = lib.flat();
                rows.row_vectors().iter().map(|r| r.dot(&flat)).collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CacheDescription::Uncoded(idx) => idx.len(),
            CacheDescription::Linear(rows) => rows.rows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn to_linear(&self, k: usize, l: usize) -> BitMatrix {
        match self {
            CacheDescription::Linear(m) => m.clone(),
            CacheDescription::Uncoded(idx) => BitMatrix::from_rows(
                k * l,
                idx.iter()
                    .map(|&(m, i)| BitVector::unit(k * l, (m - 1) * l + i - 1))
                    .collect(),
            )
            .expect("unit rows have the declared width"),
        }
    }

    /// Joins caches of schemes that each own a contiguous bit range of every
    /// message. `parts` holds `(description, offset, sub_length)`.
    pub fn join(parts: &[(CacheDescription, usize, usize)], k: usize, l: usize) -> CacheDescription {
        if parts.iter().all(|(d, _, _)| matches!(d, CacheDescription::Uncoded(_))) {
            let mut idx = Vec::new();
            for (d, offset, _) in parts {
                if let CacheDescription::Uncoded(sub) = d {
                    idx.extend(sub.iter().map(|&(m, i)| (m, i + offset)));
                }
            }
            return CacheDescription::Uncoded(idx);
        }
        let mut rows = Vec::new();
        for (d, offset, sub_l) in parts {
            let sub = d.to_linear(k, *sub_l);
            for r in sub.row_vectors() {
                let mut full = BitVector::zeros(k * l);
                for m in 0..k {
                    for i in 0..*sub_l {
                        if r.get(m * sub_l + i) {
                            full.set(m * l + offset + i, true);
                        }
                    }
                }
                rows.push(full);
            }
        }
        CacheDescription::Linear(BitMatrix::from_rows(k * l, rows).expect("rows built at full width"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheContent {
    /// 1-based user index.
    pub user: usize,
    pub stored_bits: BitVector,
    pub description: CacheDescription,
}

impl CacheContent {
    pub fn from_description(user: usize, description: CacheDescription, lib: &MessageLibrary) -> Self {
        Self {
            user,
            stored_bits: description.evaluate(lib),
            description,
        }
    }
}

/// A query sent to one database. The serialized form is canonical: equal
/// queries serialize to equal bytes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "scheme")]
pub enum Query {
    #[serde(rename = "cia1")]
    Cia1 { db: usize, vectors: Vec<BitVector> },
    #[serde(rename = "cia2")]
    Cia2 { db: usize, vectors: Vec<BitVector> },
    #[serde(rename = "sj")]
    Sj { db: usize, atoms: Vec<QueryAtom> },
    #[serde(rename = "pd")]
    Pd { db: usize, subsets: Vec<PdSubsetQuery> },
    #[serde(rename = "dd1")]
    Dd1 { db: usize, variant: usize },
    #[serde(rename = "dd2")]
    Dd2 { db: usize, variant: usize },
    /// Broadcast of bits `from..L` of every message (1-based, inclusive start).
    #[serde(rename = "naive")]
    Naive { db: usize, from: usize },
    #[serde(rename = "blocks")]
    Blocks { db: usize, blocks: Vec<Query> },
    #[serde(rename = "share")]
    Share { db: usize, parts: Vec<Query> },
    /// Fault-injection scheme that ships the demand vector in the clear.
    #[serde(rename = "strawman")]
    Strawman { db: usize, demand: Vec<usize> },
}

impl Query {
    pub fn db(&self) -> usize {
        match self {
            Query::Cia1 { db, .. }
            | Query::Cia2 { db, .. }
            | Query::Sj { db, .. }
            | Query::Pd { db, .. }
            | Query::Dd1 { db, .. }
            | Query::Dd2 { db, .. }
            | Query::Naive { db, .. }
            | Query::Blocks { db, .. }
            | Query::Share { db, .. }
            | Query::Strawman { db, .. } => *db,
        }
    }
}

/// Deterministic, injective serialization used as the privacy audit key.
pub fn canonical_query_bytes(q: &Query) -> Vec<u8> {
    serde_json::to_vec(q).expect("query serialization cannot fail")
}

pub fn parse_query(bytes: &[u8]) -> Result<Query> {
    Ok(serde_json::from_slice(bytes)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub db: usize,
    pub bits: BitVector,
}

/// Enumerable randomness has `size` equiprobable realizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomnessDomain {
    Enumerable { size: u64 },
    SeededOnly,
}

impl RandomnessDomain {
    /// Domain for a fixed sequence of uniform draws with the given radices.
    pub fn from_radices(radices: impl IntoIterator<Item = u128>) -> Self {
        let mut size: u128 = 1;
        for r in radices {
            size = match size.checked_mul(r) {
                Some(s) if s <= i64::MAX as u128 => s,
                _ => return RandomnessDomain::SeededOnly,
            };
        }
        RandomnessDomain::Enumerable { size: size as u64 }
    }

    /// `(realization, probability)` pairs.
    pub fn realizations(&self) -> Option<impl Iterator<Item = (u64, Rational)>> {
        match *self {
            RandomnessDomain::Enumerable { size } => {
                let p = Rational::new(1, size as i64);
                Some((0..size).map(move |r| (r, p)))
            }
            RandomnessDomain::SeededOnly => None,
        }
    }

    pub fn size(&self) -> Option<u64> {
        match self {
            RandomnessDomain::Enumerable { size } => Some(*size),
            RandomnessDomain::SeededOnly => None,
        }
    }

    pub fn repeated(&self, times: usize) -> Self {
        match self.size() {
            Some(size) => Self::from_radices(std::iter::repeat_n(size as u128, times)),
            None => RandomnessDomain::SeededOnly,
        }
    }
}

/// Where the randomness of one run comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Randomness {
    Seed(u64),
    Realization(u64),
}

impl Randomness {
    pub fn choices(&self) -> Box<dyn Choices> {
        match *self {
            Randomness::Seed(s) => Box::new(SeededChoices::new(s)),
            Randomness::Realization(r) => Box::new(IndexedChoices::new(r)),
        }
    }
}

/// A complete cache-aided private retrieval scheme.
///
/// Placement is deterministic. Queries are generated centrally from the
/// demand vector and the run's randomness; each database answers from its
/// own query and the library alone.
pub trait Scheme: Send + Sync {
    fn name(&self) -> &str;
    fn params(&self) -> &SystemParams;
    fn demand_set(&self) -> DemandSet;
    fn randomness(&self) -> RandomnessDomain;

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>>;
    fn queries(&self, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Vec<Query>>;
    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer>;
    /// Number of answer bits `query` produces, without touching the library.
    fn answer_len(&self, query: &Query) -> Result<usize>;
    /// Recovers the message demanded by 0-based `user`.
    fn decode(
        &self,
        user: usize,
        demand: &DemandVector,
        queries: &[Query],
        answers: &[Answer],
        cache: &BitVector,
    ) -> Result<BitVector>;

    fn check_demand(&self, demand: &DemandVector) -> Result<()> {
        let p = self.params();
        if demand.len() != p.ku {
            return Err(Error::InvalidDemand(format!(
                "demand has {} entries, scheme serves {} users",
                demand.len(),
                p.ku
            )));
        }
        if let Some(bad) = demand.as_slice().iter().find(|&&t| t == 0 || t > p.k) {
            return Err(Error::InvalidDemand(format!("demand {bad} outside [1, {}]", p.k)));
        }
        if !self.demand_set().contains(demand) {
            return Err(Error::InvalidDemand(format!(
                "scheme `{}` only serves distinct demands, got {:?}",
                self.name(),
                demand.as_slice()
            )));
        }
        Ok(())
    }
}

pub(crate) fn mismatch(scheme: &str, q: &Query) -> Error {
    Error::MalformedQuery(format!("scheme `{scheme}` cannot handle query {q:?}"))
}

/// Finds the answer belonging to database `db` (1-based).
pub(crate) fn answer_for(answers: &[Answer], db: usize) -> Result<&Answer> {
    answers
        .iter()
        .find(|a| a.db == db)
        .ok_or_else(|| Error::DecodeFailure(format!("missing answer from database {db}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub params: SystemParams,
    pub demand: DemandVector,
    pub seed: u64,
    /// Set when the run is one element of an exhaustive enumeration; `seed`
    /// is then unused and zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<u64>,
    pub caches: Vec<CacheContent>,
    pub queries: Vec<Query>,
    pub answers: Vec<Answer>,
    pub decoded: Vec<BitVector>,
    pub download_bits: usize,
    #[serde(with = "rational::as_string")]
    pub load: Rational,
}

impl Transcript {
    /// True when every user decoded exactly the message it demanded.
    pub fn is_correct(&self, lib: &MessageLibrary) -> bool {
        self.decoded
            .iter()
            .enumerate()
            .all(|(u, d)| d == lib.message(self.demand.message_index(u)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialization cannot fail")
    }
}

/// Queries only, checked for shape. Used where answers are not needed.
pub fn build_queries(scheme: &dyn Scheme, demand: &DemandVector, randomness: Randomness) -> Result<Vec<Query>> {
    scheme.check_demand(demand)?;
    let queries = scheme.queries(demand, randomness.choices().as_mut())?;
    let n = scheme.params().n;
    if queries.len() != n || queries.iter().enumerate().any(|(i, q)| q.db() != i + 1) {
        return Err(Error::MalformedQuery(format!(
            "scheme `{}` must emit one query per database in order",
            scheme.name()
        )));
    }
    Ok(queries)
}

/// Runs placement, query generation, answering and decoding.
pub fn run_transcript(
    scheme: &dyn Scheme,
    lib: &MessageLibrary,
    demand: &DemandVector,
    randomness: Randomness,
) -> Result<Transcript> {
    let params = scheme.params().clone();
    lib.check(&params)?;
    let cache_bits = params.cache_bits()?;
    let caches = scheme.place(lib)?;
    if caches.len() != params.ku {
        return Err(Error::ParamMismatch(format!(
            "placement produced {} caches for {} users",
            caches.len(),
            params.ku
        )));
    }
    if let Some(c) = caches.iter().find(|c| c.stored_bits.len() != cache_bits) {
        return Err(Error::ParamMismatch(format!(
            "user {} caches {} bits, budget is M·L = {cache_bits}",
            c.user,
            c.stored_bits.len()
        )));
    }
    let queries = build_queries(scheme, demand, randomness)?;
    let answers = queries
        .iter()
        .map(|q| scheme.answer(q, lib))
        .collect::<Result<Vec<_>>>()?;
    let decoded = (0..params.ku)
        .map(|u| scheme.decode(u, demand, &queries, &answers, &caches[u].stored_bits))
        .collect::<Result<Vec<_>>>()?;
    let download_bits: usize = answers.iter().map(|a| a.bits.len()).sum();
    let load = Rational::new(download_bits as i64, params.l as i64);
    let (seed, realization) = match randomness {
        Randomness::Seed(s) => (s, None),
        Randomness::Realization(r) => (0, Some(r)),
    };
    Ok(Transcript {
        params,
        demand: demand.clone(),
        seed,
        realization,
        caches,
        queries,
        answers,
        decoded,
        download_bits,
        load,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(2, 2, 2, 4, q(1, 4)).is_ok());
        assert!(SystemParams::new(2, 2, 2, 4, q(1, 3)).is_err());
        assert!(SystemParams::new(2, 2, 2, 4, q(3, 1)).is_err());
        assert!(SystemParams::new(0, 2, 2, 4, q(0, 1)).is_err());
        assert_eq!(SystemParams::new(2, 2, 2, 8, q(1, 1)).unwrap().cache_bits().unwrap(), 8);
    }

    #[test]
    fn params_json_field_names() {
        let p = SystemParams::new(2, 2, 3, 6, q(1, 3)).unwrap();
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"K":2,"Ku":2,"N":3,"L":6,"M":"1/3"}"#
        );
    }

    #[test]
    fn demand_sets() {
        let all = DemandSet::All.enumerate(2, 2);
        let got: Vec<&[usize]> = all.iter().map(|d| d.as_slice()).collect();
        assert_eq!(got, vec![&[1, 1][..], &[1, 2], &[2, 1], &[2, 2]]);
        assert_eq!(DemandSet::All.enumerate(3, 3).len(), 27);
        let distinct = DemandSet::Distinct.enumerate(2, 2);
        assert_eq!(distinct.len(), 2);
        assert!(DemandVector::new(vec![1, 3], 2).is_err());
        assert_eq!(DemandVector::parse("1, 2", 2).unwrap().as_slice(), &[1, 2]);
        assert!(DemandVector::parse("1,x", 2).is_err());
    }

    #[test]
    fn library_enumeration_is_complete() {
        let libs: Vec<_> = MessageLibrary::enumerate_all(2, 3).collect();
        assert_eq!(libs.len(), 64);
        let distinct: std::collections::BTreeSet<String> = libs.iter().map(|l| format!("{:?}", l.flat())).collect();
        assert_eq!(distinct.len(), 64);
    }

    #[test]
    fn cache_description_join() {
        let lib = MessageLibrary::random(2, 5, 1);
        let a = CacheDescription::Uncoded(vec![(1, 1), (2, 2)]);
        let b = CacheDescription::Linear(
            BitMatrix::from_rows(6, vec![BitVector::from_bits(&[1u8, 0, 0, 1, 0, 0])]).unwrap(),
        );
        // `a` covers bits 1..2 of a length-2 sub-library, `b` bits 3..5.
        let joined = CacheDescription::join(&[(a.clone(), 0, 2), (b.clone(), 2, 3)], 2, 5);
        let expect = BitVector::concat(&[a.evaluate(&lib.slice(0, 2)), b.evaluate(&lib.slice(2, 5))]);
        assert_eq!(joined.evaluate(&lib), expect);
        let uncoded = CacheDescription::join(&[(a.clone(), 0, 2), (a, 2, 3)], 2, 5);
        assert_eq!(uncoded, CacheDescription::Uncoded(vec![(1, 1), (2, 2), (1, 3), (2, 4)]));
    }

    #[test]
    fn query_bytes_roundtrip_and_distinguish() {
        let q1 = Query::Cia1 {
            db: 1,
            vectors: vec![BitVector::from_bits(&[1u8, 1]), BitVector::from_bits(&[0u8, 1])],
        };
        let mut q2 = q1.clone();
        if let Query::Cia1 { vectors, .. } = &mut q2 {
            vectors[1].flip(0);
        }
        assert_eq!(canonical_query_bytes(&q1), canonical_query_bytes(&q1.clone()));
        assert_ne!(canonical_query_bytes(&q1), canonical_query_bytes(&q2));
        assert_eq!(parse_query(&canonical_query_bytes(&q1)).unwrap(), q1);
        assert_eq!(
            String::from_utf8(canonical_query_bytes(&q1)).unwrap(),
            r#"{"scheme":"cia1","db":1,"vectors":[[1,1],[0,1]]}"#
        );
    }

    #[test]
    fn domain_sizes() {
        assert_eq!(
            RandomnessDomain::from_radices([2, 2, 2, 2]),
            RandomnessDomain::Enumerable { size: 16 }
        );
        assert_eq!(
            RandomnessDomain::from_radices([u64::MAX as u128, 4]),
            RandomnessDomain::SeededOnly
        );
        let total: Rational = RandomnessDomain::Enumerable { size: 324 }
            .realizations()
            .unwrap()
            .map(|(_, p)| p)
            .sum();
        assert_eq!(total, q(1, 1));
    }
}

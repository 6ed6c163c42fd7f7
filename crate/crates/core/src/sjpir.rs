//! Capacity-achieving single-user PIR over `N` replicated databases with
//! `L = N^K` bits per message.
//!
//! Queries are sums of message bits ("atoms"). Block `k` holds the atoms that
//! touch `k` messages. At every database each `k`-subset of messages occurs
//! exactly `(N-1)^(k-1)` times, whatever the demand; the demanded message is
//! hidden by drawing an independent uniform permutation of the bit positions
//! of every message.

use std::collections::HashMap;

use num_integer::binomial;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitVector};
use crate::randomness::Choices;
use crate::rational::Rational;
use crate::system::{
    answer_for, mismatch, Answer, CacheContent, DemandSet, DemandVector, MessageLibrary, Query, RandomnessDomain,
    Scheme, SystemParams,
};

/// One requested sum: bit `idx[j]` of message `msgs[j]` for every `j`.
/// Both lists are 1-based and `msgs` is strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QueryAtom {
    pub msgs: Vec<usize>,
    pub idx: Vec<usize>,
}

impl QueryAtom {
    pub fn new(msgs: Vec<usize>, idx: Vec<usize>) -> Result<Self> {
        if msgs.is_empty() || msgs.len() != idx.len() || msgs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedQuery(format!("bad atom msgs={msgs:?} idx={idx:?}")));
        }
        Ok(Self { msgs, idx })
    }

    pub fn evaluate(&self, lib: &MessageLibrary) -> bool {
        self.msgs
            .iter()
            .zip(&self.idx)
            .fold(false, |acc, (&m, &i)| acc ^ lib.message(m - 1).get(i - 1))
    }

    fn check(&self, k: usize, l: usize) -> Result<()> {
        let ok = !self.msgs.is_empty()
            && self.msgs.len() == self.idx.len()
            && self.msgs.windows(2).all(|w| w[0] < w[1])
            && self.msgs.iter().all(|&m| (1..=k).contains(&m))
            && self.idx.iter().all(|&i| (1..=l).contains(&i));
        if ok {
            Ok(())
        } else {
            Err(Error::MalformedQuery(format!(
                "atom {self:?} out of range for K={k}, L={l}"
            )))
        }
    }

    /// The bit of message `m` this atom uses, if any.
    fn index_of(&self, m: usize) -> Option<usize> {
        self.msgs.iter().position(|&x| x == m).map(|p| self.idx[p])
    }

    fn without(&self, m: usize) -> Vec<(usize, usize)> {
        self.msgs
            .iter()
            .zip(&self.idx)
            .filter(|(&x, _)| x != m)
            .map(|(&x, &i)| (x, i))
            .collect()
    }
}

pub fn sj_download_per_db(k: usize, n: usize) -> usize {
    (1..=k).map(|j| binomial(k, j) * (n - 1).pow(j as u32 - 1)).sum()
}

/// `1 + 1/N + … + 1/N^(K-1)`.
pub fn pir_rate_factor(k: usize, n: usize) -> Rational {
    (0..k)
        .map(|i| Rational::new(1, (n as i64).pow(i as u32)))
        .fold(Rational::zero(), |a, b| a + b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SjPlan {
    pub k: usize,
    pub n: usize,
    /// Demanded message, 1-based.
    pub theta: usize,
    pub per_db: Vec<Vec<QueryAtom>>,
    pub perms: Vec<Vec<usize>>,
}

impl SjPlan {
    pub fn l(&self) -> usize {
        self.n.pow(self.k as u32)
    }
}

/// An atom before permutation: 0-based messages and per-message counters.
type RawAtom = (Vec<usize>, Vec<usize>);

fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for m in start..k {
            cur.push(m);
            rec(m + 1, k, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, size, &mut Vec::new(), &mut out);
    out
}

fn raw_plan(k: usize, n: usize, theta: usize) -> Vec<Vec<RawAtom>> {
    let mut counters = vec![0usize; k];
    let mut fresh = |m: usize| {
        counters[m] += 1;
        counters[m] - 1
    };
    let mut per_db: Vec<Vec<RawAtom>> = vec![Vec::new(); n];
    // Desired-free atoms of the previous block, per database.
    let mut prev_free: Vec<Vec<RawAtom>> = vec![Vec::new(); n];
    for size in 1..=k {
        let mut block: Vec<Vec<RawAtom>> = vec![Vec::new(); n];
        let mut free: Vec<Vec<RawAtom>> = vec![Vec::new(); n];
        for db in 0..n {
            if size == 1 {
                for m in 0..k {
                    let atom = (vec![m], vec![fresh(m)]);
                    if m != theta {
                        free[db].push(atom.clone());
                    }
                    block[db].push(atom);
                }
                continue;
            }
            for (other, atoms) in prev_free.iter().enumerate() {
                if other == db {
                    continue;
                }
                for (msgs, idx) in atoms {
                    let pos = msgs.partition_point(|&m| m < theta);
                    let (mut msgs, mut idx) = (msgs.clone(), idx.clone());
                    msgs.insert(pos, theta);
                    idx.insert(pos, fresh(theta));
                    block[db].push((msgs, idx));
                }
            }
            let reps = (n - 1).pow(size as u32 - 1);
            for subset in subsets_of_size(k, size).into_iter().filter(|s| !s.contains(&theta)) {
                for _ in 0..reps {
                    let idx = subset.iter().map(|&m| fresh(m)).collect();
                    let atom = (subset.clone(), idx);
                    free[db].push(atom.clone());
                    block[db].push(atom);
                }
            }
        }
        for db in 0..n {
            // Stable: ties keep construction order.
            block[db].sort_by(|a, b| a.0.cmp(&b.0));
            per_db[db].append(&mut block[db]);
        }
        prev_free = free;
    }
    per_db
}

/// Builds the query plan for demanded message `theta` (1-based), drawing one
/// uniform permutation of `[L]` per message from `rng`, in message order.
pub fn sj_plan(k: usize, n: usize, theta: usize, rng: &mut dyn Choices) -> Result<SjPlan> {
    if k == 0 || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "SJ PIR needs K >= 1 and N >= 2, got K={k}, N={n}"
        )));
    }
    if theta == 0 || theta > k {
        return Err(Error::InvalidDemand(format!("demand {theta} outside [1, {k}]")));
    }
    let l = n
        .checked_pow(k as u32)
        .ok_or_else(|| Error::InvalidParameter("N^K overflows".into()))?;
    let perms: Vec<Vec<usize>> = (0..k).map(|_| gf2::random_permutation(l, rng).0).collect();
    let per_db = raw_plan(k, n, theta - 1)
        .into_iter()
        .map(|atoms| {
            atoms
                .into_iter()
                .map(|(msgs, idx)| QueryAtom {
                    idx: msgs.iter().zip(&idx).map(|(&m, &c)| perms[m][c] + 1).collect(),
                    msgs: msgs.iter().map(|m| m + 1).collect(),
                })
                .collect()
        })
        .collect();
    Ok(SjPlan {
        k,
        n,
        theta,
        per_db,
        perms,
    })
}

pub fn sj_answer(atoms: &[QueryAtom], lib: &MessageLibrary) -> BitVector {
    atoms.iter().map(|a| a.evaluate(lib)).collect()
}

/// Recovers message `theta` (1-based) of length `l` from the per-database atom
/// lists and their answers.
pub fn sj_decode(theta: usize, l: usize, atoms: &[&[QueryAtom]], answers: &[&BitVector]) -> Result<BitVector> {
    if atoms.len() != answers.len() {
        return Err(Error::DecodeFailure("atom lists and answers differ in count".into()));
    }
    let mut known: HashMap<Vec<(usize, usize)>, bool> = HashMap::new();
    for (list, bits) in atoms.iter().zip(answers) {
        if list.len() != bits.len() {
            return Err(Error::DecodeFailure("answer length does not match its query".into()));
        }
        for (a, bit) in list.iter().zip(bits.iter()) {
            if a.index_of(theta).is_none() {
                known.insert(a.without(theta), bit);
            }
        }
    }
    let mut out = BitVector::zeros(l);
    let mut seen = vec![false; l];
    for (list, bits) in atoms.iter().zip(answers) {
        for (a, bit) in list.iter().zip(bits.iter()) {
            let Some(i) = a.index_of(theta) else { continue };
            let side = a.without(theta);
            let interference = if side.is_empty() {
                false
            } else {
                *known
                    .get(&side)
                    .ok_or_else(|| Error::DecodeFailure(format!("no side information for atom {a:?}")))?
            };
            if i == 0 || i > l || seen[i - 1] {
                return Err(Error::DecodeFailure(format!(
                    "demanded bit {i} requested twice or out of range"
                )));
            }
            seen[i - 1] = true;
            out.set(i - 1, bit ^ interference);
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::DecodeFailure(format!(
            "demanded bit {} never requested",
            missing + 1
        )));
    }
    Ok(out)
}

/// The demand-independent shape of an atom list: the message subsets in order.
pub fn structural_projection(atoms: &[QueryAtom]) -> Vec<Vec<usize>> {
    atoms.iter().map(|a| a.msgs.clone()).collect()
}

/// The engine as a stand-alone scheme: one user, no cache.
#[derive(Clone, Debug)]
pub struct SjPir {
    params: SystemParams,
}

impl SjPir {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("SJ PIR needs N >= 2, got {n}")));
        }
        let l = n
            .checked_pow(k as u32)
            .filter(|&l| l <= 1 << 20)
            .ok_or_else(|| Error::InvalidParameter(format!("N^K too large for K={k}, N={n}")))?;
        Ok(Self {
            params: SystemParams::new(k, 1, n, l, Rational::zero())?,
        })
    }
}

pub(crate) fn factorial_radices(l: usize, times: usize) -> impl Iterator<Item = u128> {
    let f = (1..=l as u128)
        .try_fold(1u128, |a, b| a.checked_mul(b))
        .unwrap_or(u128::MAX);
    std::iter::repeat_n(f, times)
}

impl Scheme for SjPir {
    fn name(&self) -> &str {
        "sj"
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn demand_set(&self) -> DemandSet {
        DemandSet::All
    }

    fn randomness(&self) -> RandomnessDomain {
        RandomnessDomain::from_radices(factorial_radices(self.params.l, self.params.k))
    }

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>> {
        lib.check(&self.params)?;
        Ok(vec![CacheContent {
            user: 1,
            stored_bits: BitVector::zeros(0),
            description: crate::system::CacheDescription::Uncoded(Vec::new()),
        }])
    }

    fn queries(&self, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Vec<Query>> {
        let plan = sj_plan(self.params.k, self.params.n, demand.theta(0), rng)?;
        Ok(plan
            .per_db
            .into_iter()
            .enumerate()
            .map(|(db, atoms)| Query::Sj { db: db + 1, atoms })
            .collect())
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        self.answer_len(query)?;
        let Query::Sj { db, atoms } = query else {
            return Err(mismatch("sj", query));
        };
        Ok(Answer {
            db: *db,
            bits: sj_answer(atoms, lib),
        })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        match query {
            Query::Sj { db, atoms } if (1..=self.params.n).contains(db) => {
                for a in atoms {
                    a.check(self.params.k, self.params.l)?;
                }
                Ok(atoms.len())
            }
            q => Err(mismatch("sj", q)),
        }
    }

    fn decode(
        &self,
        _user: usize,
        demand: &DemandVector,
        queries: &[Query],
        answers: &[Answer],
        _cache: &BitVector,
    ) -> Result<BitVector> {
        let mut lists = Vec::with_capacity(queries.len());
        let mut bits = Vec::with_capacity(queries.len());
        for q in queries {
            let Query::Sj { db, atoms } = q else {
                return Err(mismatch("sj", q));
            };
            lists.push(atoms.as_slice());
            bits.push(&answer_for(answers, *db)?.bits);
        }
        sj_decode(demand.theta(0), self.params.l, &lists, &bits)
    }
}

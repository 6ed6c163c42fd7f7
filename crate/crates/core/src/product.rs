//! Coded caching combined with single-user PIR, and the naive broadcast.
//!
//! Placement splits each message into `C(Ku, t)` packets of `N^K` bits, one
//! per `t`-subset of users, and user `u` caches every packet whose subset
//! contains `u`. For every `(t+1)`-subset `S` of users each database returns
//! the XOR over `u ∈ S` of its single-user PIR answer for the sub-library
//! `{W_{k, S∖{u}}}` with demand `θ_u`.

use num_integer::binomial;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::randomness::Choices;
use crate::rational::{self, Rational};
use crate::sjpir::{self, QueryAtom};
use crate::system::{
    answer_for, mismatch, Answer, CacheContent, CacheDescription, DemandSet, DemandVector, MessageLibrary, Query,
    RandomnessDomain, Scheme, SystemParams,
};

/// Atoms one database evaluates on behalf of user `u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PdUserAtoms {
    pub u: usize,
    pub atoms: Vec<QueryAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PdSubsetQuery {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub per_user: Vec<PdUserAtoms>,
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    if size > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..size).rev().find(|&i| cur[i] < n - size + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProductDesign {
    params: SystemParams,
    t: usize,
    packet: usize,
    /// Packet labels: `t`-subsets of users, 0-based.
    packets: Vec<Vec<usize>>,
    /// `(t+1)`-subsets served by the delivery.
    groups: Vec<Vec<usize>>,
}

impl ProductDesign {
    /// `t = 0` is the no-cache point where every user runs its own PIR.
    pub fn new(k: usize, ku: usize, n: usize, t: usize) -> Result<Self> {
        if k == 0 || ku == 0 || n < 2 || t > ku {
            return Err(Error::InvalidParameter(format!(
                "product design needs K, Ku >= 1, N >= 2 and t in [0, Ku] (K={k}, Ku={ku}, N={n}, t={t})"
            )));
        }
        let packet = n
            .checked_pow(k as u32)
            .filter(|&p| p <= 1 << 16)
            .ok_or_else(|| Error::InvalidParameter(format!("N^K too large for K={k}, N={n}")))?;
        let packets = subsets(ku, t);
        let l = packets.len() * packet;
        let m = Ratio::new((t * k) as i64, ku as i64);
        Ok(Self {
            params: SystemParams::new(k, ku, n, l, m)?,
            t,
            packet,
            packets,
            groups: subsets(ku, t + 1),
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `(Ku-t)/(t+1) · (1 + 1/N + … + 1/N^(K-1))`.
    pub fn expected_load(&self) -> Rational {
        let p = &self.params;
        Ratio::new((p.ku - self.t) as i64, self.t as i64 + 1) * sjpir::pir_rate_factor(p.k, p.n)
    }

    fn packet_index(&self, users: &[usize]) -> usize {
        self.packets
            .binary_search_by(|x| x.as_slice().cmp(users))
            .expect("every t-subset labels a packet")
    }

    fn packet_of(&self, lib: &MessageLibrary, users: &[usize]) -> MessageLibrary {
        let p = self.packet_index(users);
        lib.slice(p * self.packet, (p + 1) * self.packet)
    }

    fn cached_packets(&self, u: usize) -> Vec<usize> {
        (0..self.packets.len())
            .filter(|&p| self.packets[p].contains(&u))
            .collect()
    }

    fn without(group: &[usize], u: usize) -> Vec<usize> {
        group.iter().copied().filter(|&x| x != u).collect()
    }

    fn group_answer(
        &self,
        q: &PdSubsetQuery,
        lookup: &dyn Fn(&[usize]) -> Result<MessageLibrary>,
    ) -> Result<BitVector> {
        let mut acc: Option<BitVector> = None;
        for pu in &q.per_user {
            let rest: Vec<usize> = q.s.iter().map(|x| x - 1).filter(|&x| x != pu.u - 1).collect();
            let bits = sjpir::sj_answer(&pu.atoms, &lookup(&rest)?);
            match &mut acc {
                Some(a) => a.xor_assign(&bits),
                None => acc = Some(bits),
            }
        }
        acc.ok_or_else(|| Error::MalformedQuery("subset query without users".into()))
    }

    fn check_subset_query(&self, q: &PdSubsetQuery, g: usize) -> Result<usize> {
        let group: Vec<usize> = self.groups[g].iter().map(|x| x + 1).collect();
        let users: Vec<usize> = q.per_user.iter().map(|p| p.u).collect();
        if q.s != group || users != group {
            return Err(Error::MalformedQuery(format!(
                "expected subset {group:?}, got {:?}",
                q.s
            )));
        }
        let len = q.per_user[0].atoms.len();
        for pu in &q.per_user {
            if pu.atoms.len() != len {
                return Err(Error::MalformedQuery("per-user atom lists differ in length".into()));
            }
            for a in &pu.atoms {
                if a.msgs.iter().any(|&m| m == 0 || m > self.params.k)
                    || a.idx.iter().any(|&i| i == 0 || i > self.packet)
                {
                    return Err(Error::MalformedQuery(format!("atom {a:?} out of range")));
                }
            }
        }
        Ok(len)
    }

    fn subsets_of<'a>(&self, query: &'a Query) -> Result<(usize, &'a [PdSubsetQuery])> {
        match query {
            Query::Pd { db, subsets } if (1..=self.params.n).contains(db) && subsets.len() == self.groups.len() => {
                Ok((*db, subsets))
            }
            q => Err(mismatch("pd", q)),
        }
    }
}

impl Scheme for ProductDesign {
    fn name(&self) -> &str {
        "pd"
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn demand_set(&self) -> DemandSet {
        DemandSet::All
    }

    fn randomness(&self) -> RandomnessDomain {
        let draws = self.params.k * (self.t + 1) * self.groups.len();
        RandomnessDomain::from_radices(sjpir::factorial_radices(self.packet, draws))
    }

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>> {
        lib.check(&self.params)?;
        Ok((0..self.params.ku)
            .map(|u| {
                let mut idx = Vec::new();
                for m in 0..self.params.k {
                    for p in self.cached_packets(u) {
                        idx.extend((0..self.packet).map(|i| (m + 1, p * self.packet + i + 1)));
                    }
                }
                CacheContent::from_description(u + 1, CacheDescription::Uncoded(idx), lib)
            })
            .collect())
    }

    fn queries(&self, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Vec<Query>> {
        let p = &self.params;
        let mut per_db: Vec<Vec<PdSubsetQuery>> = vec![Vec::with_capacity(self.groups.len()); p.n];
        for (g, group) in self.groups.iter().enumerate() {
            for db in per_db.iter_mut() {
                db.push(PdSubsetQuery {
                    s: group.iter().map(|x| x + 1).collect(),
                    per_user: Vec::with_capacity(group.len()),
                });
            }
            for &u in group {
                let key = (g * p.ku + u) as u64;
                let mut sub = rng.split(key);
                let plan = sjpir::sj_plan(p.k, p.n, demand.theta(u), sub.as_mut())?;
                for (db, atoms) in plan.per_db.into_iter().enumerate() {
                    per_db[db][g].per_user.push(PdUserAtoms { u: u + 1, atoms });
                }
            }
        }
        Ok(per_db
            .into_iter()
            .enumerate()
            .map(|(db, subsets)| Query::Pd { db: db + 1, subsets })
            .collect())
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        self.answer_len(query)?;
        let (db, subsets) = self.subsets_of(query)?;
        let lookup = |users: &[usize]| Ok(self.packet_of(lib, users));
        let parts = subsets
            .iter()
            .map(|q| self.group_answer(q, &lookup))
            .collect::<Result<Vec<_>>>()?;
        Ok(Answer {
            db,
            bits: BitVector::concat(&parts),
        })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        let (_, subsets) = self.subsets_of(query)?;
        subsets
            .iter()
            .enumerate()
            .map(|(g, q)| self.check_subset_query(q, g))
            .sum()
    }

    fn decode(
        &self,
        user: usize,
        demand: &DemandVector,
        queries: &[Query],
        answers: &[Answer],
        cache: &BitVector,
    ) -> Result<BitVector> {
        let p = &self.params;
        let k = p.k;
        let mine = self.cached_packets(user);
        // Cached bits are laid out message-major, then packet, then bit.
        let cached = |m: usize, slot: usize| {
            let start = (m * mine.len() + slot) * self.packet;
            cache.slice(start, start + self.packet)
        };
        let lookup = |users: &[usize]| -> Result<MessageLibrary> {
            let target = self.packet_index(users);
            let slot = mine
                .iter()
                .position(|&x| x == target)
                .ok_or_else(|| Error::DecodeFailure(format!("packet {users:?} is not cached")))?;
            MessageLibrary::new((0..k).map(|m| cached(m, slot)).collect())
        };
        let want = demand.message_index(user);
        let mut packets: Vec<Option<BitVector>> = vec![None; self.packets.len()];
        for (slot, &pk) in mine.iter().enumerate() {
            packets[pk] = Some(cached(want, slot));
        }
        let per_db = queries
            .iter()
            .map(|q| {
                let (db, subsets) = self.subsets_of(q)?;
                Ok((subsets, &answer_for(answers, db)?.bits))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut offset = 0;
        for (g, group) in self.groups.iter().enumerate() {
            let len = per_db
                .first()
                .map(|(s, _)| s[g].per_user.first().map_or(0, |pu| pu.atoms.len()))
                .unwrap_or(0);
            if !group.contains(&user) {
                offset += len;
                continue;
            }
            let mut lists = Vec::with_capacity(p.n);
            let mut cleaned = Vec::with_capacity(p.n);
            for (subsets, bits) in &per_db {
                let q = &subsets[g];
                let mut y = bits.slice(offset, offset + len);
                let mut own = None;
                for pu in &q.per_user {
                    if pu.u == user + 1 {
                        own = Some(pu.atoms.as_slice());
                    } else {
                        let rest = Self::without(group, pu.u - 1);
                        y.xor_assign(&sjpir::sj_answer(&pu.atoms, &lookup(&rest)?));
                    }
                }
                lists.push(own.ok_or_else(|| Error::DecodeFailure("user missing from its subset".into()))?);
                cleaned.push(y);
            }
            let refs: Vec<&BitVector> = cleaned.iter().collect();
            let packet = sjpir::sj_decode(want + 1, self.packet, &lists, &refs)?;
            packets[self.packet_index(&Self::without(group, user))] = Some(packet);
            offset += len;
        }
        let parts = packets
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| Error::DecodeFailure(format!("packet {:?} not recovered", self.packets[i]))))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitVector::concat(&parts))
    }
}

/// Every user caches the first `M/K` fraction of every message and database 1
/// broadcasts the remainder.
#[derive(Clone, Debug)]
pub struct Naive {
    params: SystemParams,
    cached: usize,
}

impl Naive {
    /// Uses the shortest message length that makes `M/K · L` whole.
    pub fn new(k: usize, ku: usize, n: usize, m: Rational) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("naive scheme needs K >= 1".into()));
        }
        let l = *(m / Rational::from_integer(k as i64)).denom() as usize;
        Self::with_length(k, ku, n, m, l)
    }

    pub fn with_length(k: usize, ku: usize, n: usize, m: Rational, l: usize) -> Result<Self> {
        let params = SystemParams::new(k, ku, n, l, m)?;
        let per_message = m / Rational::from_integer(k as i64) * Rational::from_integer(l as i64);
        if !per_message.is_integer() {
            return Err(Error::IndivisibleLength(format!(
                "M/K·L = {} is not whole",
                rational::format(&per_message)
            )));
        }
        Ok(Self {
            params,
            cached: per_message.to_integer() as usize,
        })
    }

    pub fn expected_load(&self) -> Rational {
        let p = &self.params;
        Rational::from_integer(p.k as i64) - p.m
    }
}

impl Scheme for Naive {
    fn name(&self) -> &str {
        "naive"
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
        let idx: Vec<(usize, usize)> = (1..=self.params.k)
            .flat_map(|m| (1..=self.cached).map(move |i| (m, i)))
            .collect();
        Ok((1..=self.params.ku)
            .map(|u| CacheContent::from_description(u, CacheDescription::Uncoded(idx.clone()), lib))
            .collect())
    }

    fn queries(&self, _demand: &DemandVector, _rng: &mut dyn Choices) -> Result<Vec<Query>> {
        let l = self.params.l;
        Ok((1..=self.params.n)
            .map(|db| Query::Naive {
                db,
                from: if db == 1 { self.cached + 1 } else { l + 1 },
            })
            .collect())
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        self.answer_len(query)?;
        let Query::Naive { db, from } = query else {
            return Err(mismatch("naive", query));
        };
        let l = self.params.l;
        let parts: Vec<BitVector> = lib.messages().iter().map(|m| m.slice(from - 1, l)).collect();
        Ok(Answer {
            db: *db,
            bits: BitVector::concat(&parts),
        })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        let l = self.params.l;
        match query {
            Query::Naive { db, from } if (1..=self.params.n).contains(db) && (1..=l + 1).contains(from) => {
                Ok(self.params.k * (l + 1 - from))
            }
            q => Err(mismatch("naive", q)),
        }
    }

    fn decode(
        &self,
        user: usize,
        demand: &DemandVector,
        _queries: &[Query],
        answers: &[Answer],
        cache: &BitVector,
    ) -> Result<BitVector> {
        let m = demand.message_index(user);
        let rest = self.params.l - self.cached;
        let bits = &answer_for(answers, 1)?.bits;
        if bits.len() != self.params.k * rest {
            return Err(Error::DecodeFailure("broadcast has the wrong length".into()));
        }
        let head = cache.slice(m * self.cached, (m + 1) * self.cached);
        Ok(BitVector::concat(&[head, bits.slice(m * rest, (m + 1) * rest)]))
    }
}

/// Zero-memory point of the product design: every user runs its own PIR.
pub fn no_cache_load(k: usize, ku: usize, n: usize) -> Rational {
    Rational::from_integer(ku as i64) * sjpir::pir_rate_factor(k, n)
}

/// Number of `(t+1)`-subsets times the per-subset download, over `L`.
pub fn pd_formula_load(k: usize, ku: usize, n: usize, t: usize) -> Rational {
    if t == ku {
        return Rational::zero();
    }
    let d = binomial(ku, t + 1) as i64 * (n * sjpir::sj_download_per_db(k, n)) as i64;
    Rational::new(d, binomial(ku, t) as i64 * (n as i64).pow(k as u32))
}

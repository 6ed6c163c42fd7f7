//! Schemes built by running sub-schemes on disjoint bit ranges of every
//! message: block repetition and memory sharing.

use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::randomness::Choices;
use crate::system::{
    mismatch, Answer, CacheContent, CacheDescription, DemandSet, DemandVector, MessageLibrary, Query, RandomnessDomain,
    Scheme, SystemParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Blocks,
    Share,
}

/// Part `i` handles message bits `offsets[i]..offsets[i] + L_i` with its own
/// sub-stream `split(i)` of the randomness.
pub struct Composite {
    kind: Kind,
    name: String,
    parts: Vec<Arc<dyn Scheme>>,
    offsets: Vec<usize>,
    params: SystemParams,
}

impl std::fmt::Debug for Composite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Composite")
            .field("name", &self.name)
            .field(
                "parts",
                &self.parts.iter().map(|p| p.name().to_string()).collect::<Vec<_>>(),
            )
            .field("params", &self.params)
            .finish()
    }
}

impl Composite {
    pub(crate) fn new(kind: Kind, name: String, parts: Vec<Arc<dyn Scheme>>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("a composite scheme needs at least one part".into()))?
            .params()
            .clone();
        let mut offsets = Vec::with_capacity(parts.len());
        let (mut l, mut cache) = (0usize, 0usize);
        for p in &parts {
            let pp = p.params();
            if (pp.k, pp.ku, pp.n) != (first.k, first.ku, first.n) {
                return Err(Error::ParamMismatch(format!(
                    "cannot combine `{}` (K={}, Ku={}, N={}) with (K={}, Ku={}, N={})",
                    p.name(),
                    pp.k,
                    pp.ku,
                    pp.n,
                    first.k,
                    first.ku,
                    first.n
                )));
            }
            offsets.push(l);
            l += pp.l;
            cache += pp.cache_bits()?;
        }
        let params = SystemParams::new(first.k, first.ku, first.n, l, Ratio::new(cache as i64, l as i64))?;
        Ok(Self {
            kind,
            name,
            parts,
            offsets,
            params,
        })
    }

    fn sub_library(&self, lib: &MessageLibrary, i: usize) -> MessageLibrary {
        lib.slice(self.offsets[i], self.offsets[i] + self.parts[i].params().l)
    }

    fn sub_queries<'a>(&self, query: &'a Query) -> Result<(usize, &'a [Query])> {
        match (self.kind, query) {
            (Kind::Blocks, Query::Blocks { db, blocks: qs }) | (Kind::Share, Query::Share { db, parts: qs })
                if qs.len() == self.parts.len() && qs.iter().all(|q| q.db() == *db) =>
            {
                Ok((*db, qs))
            }
            (_, q) => Err(mismatch(&self.name, q)),
        }
    }

    pub fn parts(&self) -> &[Arc<dyn Scheme>] {
        &self.parts
    }
}

impl Scheme for Composite {
    fn name(&self) -> &str {
        &self.name
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn demand_set(&self) -> DemandSet {
        if self.parts.iter().any(|p| p.demand_set() == DemandSet::Distinct) {
            DemandSet::Distinct
        } else {
            DemandSet::All
        }
    }

    fn randomness(&self) -> RandomnessDomain {
        let mut radices = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            match p.randomness().size() {
                Some(s) => radices.push(s as u128),
                None => return RandomnessDomain::SeededOnly,
            }
        }
        RandomnessDomain::from_radices(radices)
    }

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>> {
        lib.check(&self.params)?;
        let per_part = (0..self.parts.len())
            .map(|i| self.parts[i].place(&self.sub_library(lib, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.params.ku)
            .map(|u| {
                let pieces: Vec<(CacheDescription, usize, usize)> = per_part
                    .iter()
                    .enumerate()
                    .map(|(i, caches)| (caches[u].description.clone(), self.offsets[i], self.parts[i].params().l))
                    .collect();
                let desc = CacheDescription::join(&pieces, self.params.k, self.params.l);
                CacheContent::from_description(u + 1, desc, lib)
            })
            .collect())
    }

    fn queries(&self, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Vec<Query>> {
        let mut per_db: Vec<Vec<Query>> = vec![Vec::with_capacity(self.parts.len()); self.params.n];
        for (i, p) in self.parts.iter().enumerate() {
            let qs = p.queries(demand, rng.split(i as u64).as_mut())?;
            if qs.len() != self.params.n {
                return Err(Error::MalformedQuery(format!(
                    "part `{}` emitted {} queries",
                    p.name(),
                    qs.len()
                )));
            }
            for (db, q) in qs.into_iter().enumerate() {
                per_db[db].push(q);
            }
        }
        Ok(per_db
            .into_iter()
            .enumerate()
            .map(|(db, qs)| match self.kind {
                Kind::Blocks => Query::Blocks { db: db + 1, blocks: qs },
                Kind::Share => Query::Share { db: db + 1, parts: qs },
            })
            .collect())
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        let (db, qs) = self.sub_queries(query)?;
        let pieces = qs
            .iter()
            .enumerate()
            .map(|(i, q)| Ok(self.parts[i].answer(q, &self.sub_library(lib, i))?.bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(Answer {
            db,
            bits: BitVector::concat(&pieces),
        })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        let (_, qs) = self.sub_queries(query)?;
        qs.iter().enumerate().map(|(i, q)| self.parts[i].answer_len(q)).sum()
    }

    fn decode(
        &self,
        user: usize,
        demand: &DemandVector,
        queries: &[Query],
        answers: &[Answer],
        cache: &BitVector,
    ) -> Result<BitVector> {
        self.check_demand(demand)?;
        let split: Vec<(usize, &[Query])> = queries.iter().map(|q| self.sub_queries(q)).collect::<Result<_>>()?;
        // Read offset into each database's answer.
        let mut cursor = vec![0usize; queries.len()];
        let mut cache_at = 0;
        let mut out = Vec::with_capacity(self.parts.len());
        for (i, part) in self.parts.iter().enumerate() {
            let sub_q: Vec<Query> = split.iter().map(|(_, qs)| qs[i].clone()).collect();
            let mut sub_a = Vec::with_capacity(queries.len());
            for (j, (db, _)) in split.iter().enumerate() {
                let a = answers
                    .iter()
                    .find(|a| a.db == *db)
                    .ok_or_else(|| Error::DecodeFailure(format!("missing answer from database {db}")))?;
                let len = part.answer_len(&sub_q[j])?;
                if cursor[j] + len > a.bits.len() {
                    return Err(Error::DecodeFailure(format!("answer from database {db} is too short")));
                }
                sub_a.push(Answer {
                    db: *db,
                    bits: a.bits.slice(cursor[j], cursor[j] + len),
                });
                cursor[j] += len;
            }
            let c = part.params().cache_bits()?;
            if cache_at + c > cache.len() {
                return Err(Error::DecodeFailure(format!("cache of user {} is too short", user + 1)));
            }
            let sub_cache = cache.slice(cache_at, cache_at + c);
            cache_at += c;
            out.push(part.decode(user, demand, &sub_q, &sub_a, &sub_cache)?);
        }
        Ok(BitVector::concat(&out))
    }
}

/// `blocks` independent copies of `base` on consecutive bit ranges. One block
/// returns `base` itself.
pub fn repeated(base: Arc<dyn Scheme>, blocks: usize) -> Result<Arc<dyn Scheme>> {
    match blocks {
        0 => Err(Error::InvalidParameter("block count must be positive".into())),
        1 => Ok(base),
        _ => {
            let name = base.name().to_string();
            Ok(Arc::new(Composite::new(Kind::Blocks, name, vec![base; blocks])?))
        }
    }
}

/// Repeats `base` so that its message length becomes `l`.
pub fn scaled_to(base: Arc<dyn Scheme>, l: usize) -> Result<Arc<dyn Scheme>> {
    let bl = base.params().l;
    if l == 0 || !l.is_multiple_of(bl) {
        return Err(Error::IndivisibleLength(format!(
            "L={l} is not a multiple of `{}` subpacketization {bl}",
            base.name()
        )));
    }
    repeated(base, l / bl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cia::Cia1;
    use crate::rational::q;
    use crate::system::{run_transcript, Randomness};

    #[test]
    fn repeated_keeps_memory_and_load() {
        let s = repeated(Arc::new(Cia1::new(2).unwrap()), 3).unwrap();
        assert_eq!(s.params().l, 12);
        assert_eq!(s.params().m, q(1, 4));
        assert_eq!(s.randomness().size(), Some(16 * 16 * 16));
        let lib = MessageLibrary::random(2, 12, 5);
        for d in DemandSet::All.enumerate(2, 2) {
            let t = run_transcript(s.as_ref(), &lib, &d, Randomness::Seed(11)).unwrap();
            assert!(t.is_correct(&lib));
            assert_eq!(t.load, q(3, 2));
        }
    }

    #[test]
    fn one_block_is_the_base() {
        let base: Arc<dyn Scheme> = Arc::new(Cia1::new(2).unwrap());
        let s = repeated(base.clone(), 1).unwrap();
        assert!(Arc::ptr_eq(&base, &s));
        assert!(matches!(scaled_to(base, 6), Err(Error::IndivisibleLength(_))));
    }

    #[test]
    fn malformed_sub_query_count() {
        let s = repeated(Arc::new(Cia1::new(2).unwrap()), 2).unwrap();
        let q = Query::Blocks { db: 1, blocks: vec![] };
        assert!(matches!(s.answer_len(&q), Err(Error::MalformedQuery(_))));
    }
}

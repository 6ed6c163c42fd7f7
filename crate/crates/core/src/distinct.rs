//! Two schemes for `K = Ku = N = 2` with distinct demands and `L = 3`:
//! memory 1/3 at load 4/3, and memory 2/3 at load 1.
//!
//! Each database has two public answer variants. A fair coin picks the
//! variant of database 1; the variant of database 2 is then fixed by the
//! coin and the demand, so each database alone sees a uniform variant.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, LinearKnowledge};
use crate::randomness::Choices;
use crate::system::{
    answer_for, mismatch, Answer, CacheContent, CacheDescription, DemandSet, DemandVector, MessageLibrary, Query,
    RandomnessDomain, Scheme, SystemParams,
};

const L: usize = 3;

/// Bit `i` (1-based) of `A` or `B` in the flattened library.
#[derive(Clone, Copy)]
enum Sym {
    A(usize),
    B(usize),
}

fn row(terms: &[Sym]) -> BitVector {
    let mut r = BitVector::zeros(2 * L);
    for t in terms {
        let i = match *t {
            Sym::A(i) => i - 1,
            Sym::B(i) => L + i - 1,
        };
        r.flip(i);
    }
    r
}

use Sym::{A, B};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corner {
    /// Memory 1/3, load 4/3.
    First,
    /// Memory 2/3, load 1.
    Second,
}

#[derive(Clone, Debug)]
pub struct DistinctDemands {
    corner: Corner,
    params: SystemParams,
}

impl DistinctDemands {
    pub fn new(corner: Corner) -> Self {
        let m = match corner {
            Corner::First => Ratio::new(1, 3),
            Corner::Second => Ratio::new(2, 3),
        };
        Self {
            corner,
            params: SystemParams::new(2, 2, 2, L, m).expect("fixed parameters are valid"),
        }
    }

    pub fn corner(&self) -> Corner {
        self.corner
    }

    fn cache_rows(&self, user: usize) -> Vec<BitVector> {
        let j = user + 1;
        match self.corner {
            Corner::First => vec![row(&[A(j), B(j)])],
            Corner::Second => vec![row(&[A(j)]), row(&[B(j)])],
        }
    }

    /// Coefficient rows of answer variant `variant` (1 or 2) at database `db`.
    pub fn answer_rows(&self, db: usize, variant: usize) -> Vec<BitVector> {
        match (self.corner, db, variant) {
            (Corner::First, 1, 1) => vec![row(&[A(3)]), row(&[B(1), B(2), B(3)])],
            (Corner::First, 1, 2) => vec![row(&[A(1), A(2), A(3)]), row(&[B(3)])],
            (Corner::Second, 1, 1) => vec![row(&[A(3), B(3), B(1), B(2)])],
            (Corner::Second, 1, 2) => vec![row(&[A(3), B(3), A(1), A(2)])],
            (_, 2, 1) => vec![row(&[A(2), A(3)]), row(&[B(2), B(3)])],
            (_, 2, 2) => vec![row(&[A(1), A(3)]), row(&[B(1), B(3)])],
            _ => Vec::new(),
        }
    }

    fn variant(&self, query: &Query) -> Result<(usize, usize)> {
        match (self.corner, query) {
            (Corner::First, Query::Dd1 { db, variant }) | (Corner::Second, Query::Dd2 { db, variant })
                if (1..=2).contains(db) && (1..=2).contains(variant) =>
            {
                Ok((*db, *variant))
            }
            (_, q) => Err(mismatch(self.name(), q)),
        }
    }

    fn query(&self, db: usize, variant: usize) -> Query {
        match self.corner {
            Corner::First => Query::Dd1 { db, variant },
            Corner::Second => Query::Dd2 { db, variant },
        }
    }
}

/// Variants `(database 1, database 2)` for a coin and a distinct demand.
pub fn pairing(coin: usize, demand: &DemandVector) -> Result<(usize, usize)> {
    match (demand.as_slice(), coin) {
        ([1, 2], 0) => Ok((1, 1)),
        ([1, 2], 1) => Ok((2, 2)),
        ([2, 1], 0) => Ok((1, 2)),
        ([2, 1], 1) => Ok((2, 1)),
        (d, _) => Err(Error::InvalidDemand(format!(
            "distinct-demand schemes serve (1,2) and (2,1), got {d:?}"
        ))),
    }
}

impl Scheme for DistinctDemands {
    fn name(&self) -> &str {
        match self.corner {
            Corner::First => "dd1",
            Corner::Second => "dd2",
        }
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn demand_set(&self) -> DemandSet {
        DemandSet::Distinct
    }

    fn randomness(&self) -> RandomnessDomain {
        RandomnessDomain::Enumerable { size: 2 }
    }

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>> {
        lib.check(&self.params)?;
        Ok((0..2)
            .map(|u| {
                let desc = match self.corner {
                    Corner::First => {
                        CacheDescription::Linear(BitMatrix::from_rows(2 * L, self.cache_rows(u)).expect("width 2L"))
                    }
                    Corner::Second => CacheDescription::Uncoded(vec![(1, u + 1), (2, u + 1)]),
                };
                CacheContent::from_description(u + 1, desc, lib)
            })
            .collect())
    }

    fn queries(&self, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Vec<Query>> {
        let (v1, v2) = pairing(rng.choose(2), demand)?;
        Ok(vec![self.query(1, v1), self.query(2, v2)])
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        let (db, variant) = self.variant(query)?;
        let flat = lib.flat();
        Ok(Answer {
            db,
            bits: self.answer_rows(db, variant).iter().map(|r| r.dot(&flat)).collect(),
        })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        let (db, variant) = self.variant(query)?;
        Ok(self.answer_rows(db, variant).len())
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
        let mut know = LinearKnowledge::new(2 * L);
        for (r, bit) in self.cache_rows(user).into_iter().zip(cache.iter()) {
            know.add(r, bit)?;
        }
        for q in queries {
            let (db, variant) = self.variant(q)?;
            let bits = &answer_for(answers, db)?.bits;
            for (r, bit) in self.answer_rows(db, variant).into_iter().zip(bits.iter()) {
                know.add(r, bit)?;
            }
        }
        let m = demand.message_index(user);
        (0..L)
            .map(|i| {
                know.unknown(m * L + i).ok_or_else(|| {
                    Error::DecodeFailure(format!(
                        "user {} cannot resolve bit {} of message {}",
                        user + 1,
                        i + 1,
                        m + 1
                    ))
                })
            })
            .collect()
    }
}

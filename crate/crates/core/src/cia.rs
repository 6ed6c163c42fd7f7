//! Cache-aided interference alignment for two messages and two users.
//!
//! Message `A` is index 0 and `B` index 1 throughout. Corner 1 splits each
//! message into two halves of `N` bits; corner 2 uses two cached segments of
//! `N-1` bits plus one shared bit that nobody caches.
//!
//! In both schemes the half (or segment) cached by user `h` carries the
//! message wanted by the *other* user in decodable form, while the remaining
//! message is aligned so that a single database-`N` equation cancels it.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector};
use crate::randomness::Choices;
use crate::system::{
    answer_for, mismatch, Answer, CacheContent, CacheDescription, DemandSet, DemandVector, MessageLibrary, Query,
    RandomnessDomain, Scheme, SystemParams,
};

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn check_two_by_two(demand: &DemandVector) -> Result<[usize; 2]> {
    if demand.len() != 2 || demand.as_slice().iter().any(|&t| t == 0 || t > 2) {
        return Err(Error::InvalidDemand(format!(
            "interference alignment serves demands in [2]^2, got {:?}",
            demand.as_slice()
        )));
    }
    Ok([demand.message_index(0), demand.message_index(1)])
}

/// Index into `[g1, g2, g3, g4]` of the database-`N` vector acting on `msg` in `half`.
fn g_index(msg: usize, half: usize) -> usize {
    2 * half + msg
}

/// Answer coefficients of the first corner point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cia1Coefficients {
    pub n: usize,
    /// `u[n][h]`: coefficient of `A` in half `h` at database `n+1`.
    pub u: Vec<[BitVector; 2]>,
    pub v: Vec<[BitVector; 2]>,
    pub g: [BitVector; 4],
}

impl Cia1Coefficients {
    fn coeff(&self, msg: usize, db: usize, half: usize) -> &BitVector {
        if msg == 0 {
            &self.u[db][half]
        } else {
            &self.v[db][half]
        }
    }

    fn coeff_mut(&mut self, msg: usize, db: usize, half: usize) -> &mut BitVector {
        if msg == 0 {
            &mut self.u[db][half]
        } else {
            &mut self.v[db][half]
        }
    }

    /// `[coeff(msg)_{1,h}; …; coeff(msg)_{N-1,h}; g_j]`.
    pub fn stacked(&self, msg: usize, half: usize, g: usize) -> BitMatrix {
        let mut rows: Vec<BitVector> = (0..self.n - 1).map(|db| self.coeff(msg, db, half).clone()).collect();
        rows.push(self.g[g].clone());
        BitMatrix::from_rows(self.n, rows).expect("coefficient vectors have length N")
    }

    pub fn queries(&self) -> Vec<Query> {
        let mut out: Vec<Query> = (0..self.n - 1)
            .map(|db| Query::Cia1 {
                db: db + 1,
                vectors: vec![
                    self.u[db][0].clone(),
                    self.v[db][0].clone(),
                    self.u[db][1].clone(),
                    self.v[db][1].clone(),
                ],
            })
            .collect();
        out.push(Query::Cia1 {
            db: self.n,
            vectors: self.g.to_vec(),
        });
        out
    }

    pub fn from_queries(n: usize, queries: &[Query]) -> Result<Self> {
        if queries.len() != n {
            return Err(Error::MalformedQuery(format!(
                "expected {n} queries, got {}",
                queries.len()
            )));
        }
        let vectors = |i: usize| -> Result<&Vec<BitVector>> {
            match &queries[i] {
                Query::Cia1 { db, vectors }
                    if *db == i + 1 && vectors.len() == 4 && vectors.iter().all(|v| v.len() == n) =>
                {
                    Ok(vectors)
                }
                q => Err(mismatch("cia1", q)),
            }
        };
        let mut u = Vec::with_capacity(n - 1);
        let mut v = Vec::with_capacity(n - 1);
        for db in 0..n - 1 {
            let x = vectors(db)?;
            u.push([x[0].clone(), x[2].clone()]);
            v.push([x[1].clone(), x[3].clone()]);
        }
        let g = vectors(n - 1)?;
        Ok(Self {
            n,
            u,
            v,
            g: [g[0].clone(), g[1].clone(), g[2].clone(), g[3].clone()],
        })
    }
}

/// `(s, a)` per half: `s[h]` is decoded from the answers alone, `a[h]` is aligned.
fn cia1_roles(theta: [usize; 2]) -> ([usize; 2], [usize; 2]) {
    let s = [theta[1], theta[0]];
    (s, [1 - s[0], 1 - s[1]])
}

/// Draws the delivery coefficients for demand `theta`.
///
/// Draw order: aligned `g` for half 1, aligned `g` for half 2, row
/// permutation of `Y_N` for half 1, then for half 2. Every demand consumes the
/// same radices, so one realization index means the same thing for all of them.
#[allow(clippy::needless_range_loop)]
pub fn cia1_coefficients(n: usize, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Cia1Coefficients> {
    let theta = check_two_by_two(demand)?;
    let y = gf2::y_matrix(n)?;
    let (s, a) = cia1_roles(theta);
    let zero = BitVector::zeros(n);
    let mut c = Cia1Coefficients {
        n,
        u: vec![[zero.clone(), zero.clone()]; n - 1],
        v: vec![[zero.clone(), zero.clone()]; n - 1],
        g: [zero.clone(), zero.clone(), zero.clone(), zero],
    };
    for h in 0..2 {
        c.g[g_index(a[h], h)] = y.row(rng.choose(n)).clone();
    }
    for h in 0..2 {
        let (perm, _) = gf2::random_row_permutation(&y, rng);
        for db in 0..n - 1 {
            *c.coeff_mut(s[h], db, h) = perm.row(db).clone();
        }
        c.g[g_index(s[h], h)] = perm.row(n - 1).clone();
    }
    for h in 0..2 {
        let aligned = c.g[g_index(a[h], h)].clone();
        for db in 0..n - 1 {
            *c.coeff_mut(a[h], db, h) = aligned.clone();
        }
    }
    Ok(c)
}

/// `[I_{N-1}, 0; g]`: the cached combinations of one half stacked on a `g` row.
fn cache_stack(n: usize, g: &BitVector) -> BitMatrix {
    let mut rows: Vec<BitVector> = (0..n - 1).map(|j| BitVector::unit(n, j)).collect();
    rows.push(g.clone());
    BitMatrix::from_rows(n, rows).expect("rows have length N")
}

pub fn check_fullrank_cia1(c: &Cia1Coefficients, demand: &DemandVector) -> bool {
    let Ok(theta) = check_two_by_two(demand) else {
        return false;
    };
    let (s, _) = cia1_roles(theta);
    let n = c.n;
    let cache_ok = c.g.iter().all(|g| gf2::rank(&cache_stack(n, g)) == n);
    let solve_ok = (0..2).all(|h| gf2::rank(&c.stacked(s[h], h, g_index(s[h], h))) == n);
    cache_ok && solve_ok
}

pub fn check_alignment_cia1(c: &Cia1Coefficients, demand: &DemandVector) -> bool {
    let Ok(theta) = check_two_by_two(demand) else {
        return false;
    };
    let (_, a) = cia1_roles(theta);
    (0..2).all(|h| (0..c.n - 1).all(|db| c.coeff(a[h], db, h) == &c.g[g_index(a[h], h)]))
}

/// First corner point: memory `(N-1)/(2N)`, load `(N+1)/N`, `L = 2N`.
#[derive(Clone, Debug)]
pub struct Cia1 {
    params: SystemParams,
}

impl Cia1 {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("cia1 needs N >= 2, got {n}")));
        }
        let params = SystemParams::new(2, 2, n, 2 * n, Ratio::new(n as i64 - 1, 2 * n as i64))?;
        Ok(Self { params })
    }

    fn n(&self) -> usize {
        self.params.n
    }

    fn half(&self, lib: &MessageLibrary, msg: usize, h: usize) -> BitVector {
        let n = self.n();
        lib.message(msg).slice(h * n, (h + 1) * n)
    }
}

impl Scheme for Cia1 {
    fn name(&self) -> &str {
        "cia1"
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn demand_set(&self) -> DemandSet {
        DemandSet::All
    }

    fn randomness(&self) -> RandomnessDomain {
        let n = self.n() as u128;
        RandomnessDomain::from_radices([n, n, factorial(self.n()), factorial(self.n())])
    }

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>> {
        lib.check(&self.params)?;
        let (n, l) = (self.n(), self.params.l);
        Ok((0..2)
            .map(|h| {
                let rows = (0..n - 1)
                    .map(|j| {
                        let mut r = BitVector::zeros(2 * l);
                        r.set(h * n + j, true);
                        r.set(l + h * n + j, true);
                        r
                    })
                    .collect();
                let desc = CacheDescription::Linear(BitMatrix::from_rows(2 * l, rows).expect("width 2L"));
                CacheContent::from_description(h + 1, desc, lib)
            })
            .collect())
    }

    fn queries(&self, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Vec<Query>> {
        Ok(cia1_coefficients(self.n(), demand, rng)?.queries())
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        let n = self.n();
        let Query::Cia1 { db, vectors } = query else {
            return Err(mismatch("cia1", query));
        };
        self.answer_len(query)?;
        let halves = [
            [self.half(lib, 0, 0), self.half(lib, 1, 0)],
            [self.half(lib, 0, 1), self.half(lib, 1, 1)],
        ];
        let bits = if *db < n {
            (0..2)
                .map(|h| vectors[2 * h].dot(&halves[h][0]) ^ vectors[2 * h + 1].dot(&halves[h][1]))
                .collect()
        } else {
            (0..4).map(|j| vectors[j].dot(&halves[j / 2][j % 2])).collect()
        };
        Ok(Answer { db: *db, bits })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        let n = self.n();
        match query {
            Query::Cia1 { db, vectors }
                if (1..=n).contains(db) && vectors.len() == 4 && vectors.iter().all(|v| v.len() == n) =>
            {
                Ok(if *db < n { 2 } else { 4 })
            }
            q => Err(mismatch("cia1", q)),
        }
    }

    fn decode(
        &self,
        user: usize,
        demand: &DemandVector,
        queries: &[Query],
        answers: &[Answer],
        cache: &BitVector,
    ) -> Result<BitVector> {
        let theta = check_two_by_two(demand)?;
        let n = self.n();
        let c = Cia1Coefficients::from_queries(n, queries)?;
        let last = &answer_for(answers, n)?.bits;
        let db_bits = (0..n - 1)
            .map(|db| answer_for(answers, db + 1).map(|a| a.bits.clone()))
            .collect::<Result<Vec<_>>>()?;
        let (s, a) = cia1_roles(theta);
        // s[h] on half h, recovered by every user without its cache.
        let mut solved = Vec::with_capacity(2);
        for h in 0..2 {
            let mut rhs: BitVector = db_bits.iter().map(|b| b.get(h) ^ last.get(g_index(a[h], h))).collect();
            rhs.push(last.get(g_index(s[h], h)));
            let m = c.stacked(s[h], h, g_index(s[h], h));
            solved.push(gf2::solve(&m, &rhs).map_err(|_| singular("answer", h))?);
        }
        let want = theta[user];
        let mut halves = Vec::with_capacity(2);
        for h in 0..2 {
            if s[h] == want {
                halves.push(solved[h].clone());
                continue;
            }
            // Only the user's own cached half can be missing here.
            if h != user {
                return Err(Error::DecodeFailure(format!(
                    "user {} cannot reach half {}",
                    user + 1,
                    h + 1
                )));
            }
            let mut rhs: BitVector = (0..n - 1).map(|j| cache.get(j) ^ solved[h].get(j)).collect();
            rhs.push(last.get(g_index(want, h)));
            let m = cache_stack(n, &c.g[g_index(want, h)]);
            halves.push(gf2::solve(&m, &rhs).map_err(|_| singular("cache", h))?);
        }
        Ok(BitVector::concat(&halves))
    }
}

fn singular(kind: &str, h: usize) -> Error {
    Error::DecodeFailure(format!("{kind} system for half {} is singular", h + 1))
}

/// Answer coefficients of the second corner point. Every vector has length
/// `2N-1` and its last coordinate fixed to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cia2Coefficients {
    pub n: usize,
    pub u: Vec<BitVector>,
    pub v: Vec<BitVector>,
    pub g: [BitVector; 2],
}

impl Cia2Coefficients {
    fn coeff(&self, msg: usize, db: usize) -> &BitVector {
        if msg == 0 {
            &self.u[db]
        } else {
            &self.v[db]
        }
    }

    fn coeff_mut(&mut self, msg: usize, db: usize) -> &mut BitVector {
        if msg == 0 {
            &mut self.u[db]
        } else {
            &mut self.v[db]
        }
    }

    /// Segment `seg` plus the shared last coordinate, stacked over the
    /// databases with `g_msg` below.
    pub fn stacked(&self, msg: usize, seg: usize) -> BitMatrix {
        let cols = segment_with_last(self.n, seg);
        let mut rows: Vec<BitVector> = (0..self.n - 1).map(|db| self.coeff(msg, db).select(&cols)).collect();
        rows.push(self.g[msg].select(&cols));
        BitMatrix::from_rows(self.n, rows).expect("N columns")
    }

    pub fn queries(&self) -> Vec<Query> {
        let mut out: Vec<Query> = (0..self.n - 1)
            .map(|db| Query::Cia2 {
                db: db + 1,
                vectors: vec![self.u[db].clone(), self.v[db].clone()],
            })
            .collect();
        out.push(Query::Cia2 {
            db: self.n,
            vectors: self.g.to_vec(),
        });
        out
    }

    pub fn from_queries(n: usize, queries: &[Query]) -> Result<Self> {
        if queries.len() != n {
            return Err(Error::MalformedQuery(format!(
                "expected {n} queries, got {}",
                queries.len()
            )));
        }
        let l = 2 * n - 1;
        let vectors = |i: usize| -> Result<&Vec<BitVector>> {
            match &queries[i] {
                Query::Cia2 { db, vectors }
                    if *db == i + 1 && vectors.len() == 2 && vectors.iter().all(|v| v.len() == l) =>
                {
                    Ok(vectors)
                }
                q => Err(mismatch("cia2", q)),
            }
        };
        let mut u = Vec::with_capacity(n - 1);
        let mut v = Vec::with_capacity(n - 1);
        for db in 0..n - 1 {
            let x = vectors(db)?;
            u.push(x[0].clone());
            v.push(x[1].clone());
        }
        let g = vectors(n - 1)?;
        Ok(Self {
            n,
            u,
            v,
            g: [g[0].clone(), g[1].clone()],
        })
    }
}

/// Coordinates of segment `seg` (0 or 1), each `N-1` long.
fn segment(n: usize, seg: usize) -> std::ops::Range<usize> {
    seg * (n - 1)..(seg + 1) * (n - 1)
}

fn segment_with_last(n: usize, seg: usize) -> Vec<usize> {
    segment(n, seg).chain([2 * n - 2]).collect()
}

/// Draws the delivery coefficients for demand `theta`.
///
/// Same layout as corner 1 with segments in place of halves: segment `h`,
/// cached by user `h`, carries the other user's message in decodable form.
/// Draw order: aligned `g` segments 1 and 2, then the permutations of `Y'_N`
/// for segments 1 and 2.
#[allow(clippy::needless_range_loop)]
pub fn cia2_coefficients(n: usize, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Cia2Coefficients> {
    let theta = check_two_by_two(demand)?;
    let y = gf2::y_prime_matrix(n)?;
    let (s, a) = cia1_roles(theta);
    let l = 2 * n - 1;
    let mut base = BitVector::zeros(l);
    base.set(l - 1, true);
    let mut c = Cia2Coefficients {
        n,
        u: vec![base.clone(); n - 1],
        v: vec![base.clone(); n - 1],
        g: [base.clone(), base],
    };
    let write = |target: &mut BitVector, seg: usize, row: &BitVector| {
        for (k, i) in segment(n, seg).enumerate() {
            target.set(i, row.get(k));
        }
    };
    for h in 0..2 {
        let row = y.row(rng.choose(n)).clone();
        write(&mut c.g[a[h]], h, &row);
    }
    for h in 0..2 {
        let (perm, _) = gf2::random_row_permutation(&y, rng);
        for db in 0..n - 1 {
            write(c.coeff_mut(s[h], db), h, perm.row(db));
        }
        write(&mut c.g[s[h]], h, perm.row(n - 1));
    }
    for h in 0..2 {
        let aligned = c.g[a[h]].slice(segment(n, h).start, segment(n, h).end);
        for db in 0..n - 1 {
            write(c.coeff_mut(a[h], db), h, &aligned);
        }
    }
    Ok(c)
}

pub fn check_fullrank_cia2(c: &Cia2Coefficients, demand: &DemandVector) -> bool {
    let Ok(theta) = check_two_by_two(demand) else {
        return false;
    };
    // User i decodes its message on the segment cached by the other user.
    (0..2).all(|i| gf2::rank(&c.stacked(theta[i], 1 - i)) == c.n)
}

pub fn check_alignment_cia2(c: &Cia2Coefficients, demand: &DemandVector) -> bool {
    let Ok(theta) = check_two_by_two(demand) else {
        return false;
    };
    let (_, a) = cia1_roles(theta);
    let n = c.n;
    let last = 2 * n - 2;
    let pinned = c.g.iter().chain(&c.u).chain(&c.v).all(|x| x.get(last));
    let aligned = (0..2).all(|h| {
        let r = segment(n, h);
        (0..n - 1).all(|db| c.coeff(a[h], db).slice(r.start, r.end) == c.g[a[h]].slice(r.start, r.end))
    });
    pinned && aligned
}

/// Second corner point: memory `2(N-1)/(2N-1)`, load `(N+1)/(2N-1)`, `L = 2N-1`.
#[derive(Clone, Debug)]
pub struct Cia2 {
    params: SystemParams,
}

impl Cia2 {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("cia2 needs N >= 2, got {n}")));
        }
        let params = SystemParams::new(2, 2, n, 2 * n - 1, Ratio::new(2 * (n as i64 - 1), 2 * n as i64 - 1))?;
        Ok(Self { params })
    }

    fn n(&self) -> usize {
        self.params.n
    }
}

impl Scheme for Cia2 {
    fn name(&self) -> &str {
        "cia2"
    }

    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn demand_set(&self) -> DemandSet {
        DemandSet::All
    }

    fn randomness(&self) -> RandomnessDomain {
        let n = self.n() as u128;
        RandomnessDomain::from_radices([n, n, factorial(self.n()), factorial(self.n())])
    }

    fn place(&self, lib: &MessageLibrary) -> Result<Vec<CacheContent>> {
        lib.check(&self.params)?;
        let n = self.n();
        Ok((0..2)
            .map(|h| {
                let idx = (0..2)
                    .flat_map(|m| segment(n, h).map(move |i| (m + 1, i + 1)))
                    .collect();
                CacheContent::from_description(h + 1, CacheDescription::Uncoded(idx), lib)
            })
            .collect())
    }

    fn queries(&self, demand: &DemandVector, rng: &mut dyn Choices) -> Result<Vec<Query>> {
        Ok(cia2_coefficients(self.n(), demand, rng)?.queries())
    }

    fn answer(&self, query: &Query, lib: &MessageLibrary) -> Result<Answer> {
        lib.check(&self.params)?;
        self.answer_len(query)?;
        let Query::Cia2 { db, vectors } = query else {
            return Err(mismatch("cia2", query));
        };
        let (a, b) = (lib.message(0), lib.message(1));
        let bits = if *db < self.n() {
            [vectors[0].dot(a) ^ vectors[1].dot(b)].into_iter().collect()
        } else {
            [vectors[0].dot(a), vectors[1].dot(b)].into_iter().collect()
        };
        Ok(Answer { db: *db, bits })
    }

    fn answer_len(&self, query: &Query) -> Result<usize> {
        let n = self.n();
        match query {
            Query::Cia2 { db, vectors }
                if (1..=n).contains(db) && vectors.len() == 2 && vectors.iter().all(|v| v.len() == 2 * n - 1) =>
            {
                Ok(if *db < n { 1 } else { 2 })
            }
            q => Err(mismatch("cia2", q)),
        }
    }

    fn decode(
        &self,
        user: usize,
        demand: &DemandVector,
        queries: &[Query],
        answers: &[Answer],
        cache: &BitVector,
    ) -> Result<BitVector> {
        let theta = check_two_by_two(demand)?;
        let n = self.n();
        let c = Cia2Coefficients::from_queries(n, queries)?;
        let last = &answer_for(answers, n)?.bits;
        let (w, x) = (theta[user], 1 - theta[user]);
        let (own, other) = (user, 1 - user);
        let own_cols = segment(n, own);
        // Cache layout: A on the own segment, then B on it.
        let cached = |msg: usize| cache.slice(msg * (n - 1), (msg + 1) * (n - 1));
        let (w_own, x_own) = (cached(w), cached(x));
        let part = |v: &BitVector, known: &BitVector| v.slice(own_cols.start, own_cols.end).dot(known);
        // Database N's equation on x with the cached part stripped, which the
        // alignment makes equal to x's contribution at every other database.
        let x_rest = last.get(x) ^ part(&c.g[x], &x_own);
        let mut rhs = BitVector::zeros(0);
        for db in 0..n - 1 {
            let ans = answer_for(answers, db + 1)?.bits.get(0);
            rhs.push(ans ^ x_rest ^ part(c.coeff(x, db), &x_own) ^ part(c.coeff(w, db), &w_own));
        }
        rhs.push(last.get(w) ^ part(&c.g[w], &w_own));
        let unknown = gf2::solve(&c.stacked(w, other), &rhs)
            .map_err(|_| Error::DecodeFailure(format!("system for user {} is singular", user + 1)))?;
        let mut out = BitVector::zeros(2 * n - 1);
        for (k, i) in own_cols.enumerate() {
            out.set(i, w_own.get(k));
        }
        for (k, i) in segment_with_last(n, other).into_iter().enumerate() {
            out.set(i, unknown.get(k));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::{IndexedChoices, SeededChoices};
    use crate::rational::q;
    use crate::system::{build_queries, run_transcript, Randomness};

    fn d(a: usize, b: usize) -> DemandVector {
        DemandVector::new(vec![a, b], 2).unwrap()
    }

    fn all_demands() -> Vec<DemandVector> {
        DemandSet::All.enumerate(2, 2)
    }

    #[test]
    fn cia1_placement_matches_example() {
        let lib = MessageLibrary::new(vec![
            BitVector::from_bits(&[1u8, 0, 1, 1]),
            BitVector::from_bits(&[1u8, 1, 0, 0]),
        ])
        .unwrap();
        let caches = Cia1::new(2).unwrap().place(&lib).unwrap();
        // Z_1 = A_1 + B_1, Z_2 = A_3 + B_3
        assert_eq!(caches[0].stored_bits, BitVector::from_bits(&[0u8]));
        assert_eq!(caches[1].stored_bits, BitVector::from_bits(&[1u8]));
        let three = Cia1::new(3).unwrap();
        let lib = MessageLibrary::random(2, 6, 3);
        let caches = three.place(&lib).unwrap();
        for (h, c) in caches.iter().enumerate() {
            for j in 0..2 {
                let i = 3 * h + j;
                assert_eq!(c.stored_bits.get(j), lib.message(0).get(i) ^ lib.message(1).get(i));
            }
        }
    }

    #[test]
    fn cia1_constructions_satisfy_conditions() {
        for n in 2..=4 {
            let scheme = Cia1::new(n).unwrap();
            let size = scheme.randomness().size().unwrap();
            let step = (size / 500).max(1);
            for theta in all_demands() {
                for r in (0..size).step_by(step as usize) {
                    let c = cia1_coefficients(n, &theta, &mut IndexedChoices::new(r)).unwrap();
                    assert!(check_fullrank_cia1(&c, &theta), "N={n} {theta:?} r={r}");
                    assert!(check_alignment_cia1(&c, &theta));
                    let y = gf2::y_matrix(n).unwrap();
                    let rows = y.row_vectors();
                    assert!(c
                        .g
                        .iter()
                        .chain(c.u.iter().flatten())
                        .chain(c.v.iter().flatten())
                        .all(|v| rows.contains(v)));
                }
            }
        }
    }

    #[test]
    fn cia1_alignment_one_two() {
        let theta = d(1, 2);
        let c = cia1_coefficients(4, &theta, &mut SeededChoices::new(11)).unwrap();
        assert!(c.u.iter().all(|u| u[0] == c.g[0]));
        assert!(c.v.iter().all(|v| v[1] == c.g[3]));
    }

    #[test]
    fn cia1_flipping_g2_breaks_full_rank() {
        let theta = d(1, 2);
        for r in 0..16 {
            let c = cia1_coefficients(2, &theta, &mut IndexedChoices::new(r)).unwrap();
            for bit in 0..2 {
                let mut bad = c.clone();
                bad.g[1].flip(bit);
                assert!(!check_fullrank_cia1(&bad, &theta), "r={r} bit={bit}");
            }
        }
    }

    #[test]
    fn cia1_db1_tuple_is_uniform() {
        // Each of the N^4 tuples seen by DB 1 has probability exactly 1/N^4.
        let scheme = Cia1::new(2).unwrap();
        for theta in all_demands() {
            let mut counts = std::collections::BTreeMap::new();
            for r in 0..16 {
                let qs = build_queries(&scheme, &theta, Randomness::Realization(r)).unwrap();
                *counts.entry(format!("{:?}", qs[0])).or_insert(0) += 1;
            }
            assert_eq!(counts.len(), 16);
            assert!(counts.values().all(|&c| c == 1));
        }
    }

    #[test]
    fn cia1_decodes_every_realization() {
        for n in 2..=3 {
            let scheme = Cia1::new(n).unwrap();
            let size = scheme.randomness().size().unwrap();
            for (i, theta) in all_demands().into_iter().enumerate() {
                let lib = MessageLibrary::random(2, 2 * n, i as u64);
                for r in 0..size {
                    let t = run_transcript(&scheme, &lib, &theta, Randomness::Realization(r)).unwrap();
                    assert!(t.is_correct(&lib), "N={n} {theta:?} r={r}");
                    assert_eq!(t.load, q(n as i64 + 1, n as i64));
                    assert_eq!(t.download_bits, 2 * n + 2);
                }
            }
        }
    }

    #[test]
    fn cia1_zero_library() {
        let scheme = Cia1::new(3).unwrap();
        let lib = MessageLibrary::zeros(2, 6);
        let t = run_transcript(&scheme, &lib, &d(2, 1), Randomness::Seed(5)).unwrap();
        assert!(t.answers.iter().all(|a| a.bits.is_zero()));
        assert!(t.decoded.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn cia2_placement_matches_example() {
        let lib = MessageLibrary::random(2, 5, 8);
        let caches = Cia2::new(3).unwrap().place(&lib).unwrap();
        assert_eq!(
            caches[0].description,
            CacheDescription::Uncoded(vec![(1, 1), (1, 2), (2, 1), (2, 2)])
        );
        assert_eq!(
            caches[1].description,
            CacheDescription::Uncoded(vec![(1, 3), (1, 4), (2, 3), (2, 4)])
        );
        let caches = Cia2::new(2).unwrap().place(&MessageLibrary::random(2, 3, 1)).unwrap();
        assert_eq!(caches[0].description, CacheDescription::Uncoded(vec![(1, 1), (2, 1)]));
    }

    #[test]
    fn cia2_constructions_satisfy_conditions() {
        for n in 2..=4 {
            let size = Cia2::new(n).unwrap().randomness().size().unwrap();
            let step = (size / 500).max(1);
            for theta in all_demands() {
                for r in (0..size).step_by(step as usize) {
                    let c = cia2_coefficients(n, &theta, &mut IndexedChoices::new(r)).unwrap();
                    assert!(check_fullrank_cia2(&c, &theta), "N={n} {theta:?} r={r}");
                    assert!(check_alignment_cia2(&c, &theta));
                }
            }
        }
    }

    #[test]
    fn cia2_first_coordinates_uniform_at_n2() {
        let theta = d(1, 2);
        let (mut g11, mut g22) = ([0; 2], [0; 2]);
        for r in 0..16 {
            let c = cia2_coefficients(2, &theta, &mut IndexedChoices::new(r)).unwrap();
            g11[c.g[0].get(0) as usize] += 1;
            g22[c.g[1].get(1) as usize] += 1;
        }
        assert_eq!(g11, [8, 8]);
        assert_eq!(g22, [8, 8]);
    }

    #[test]
    fn cia2_decodes_every_realization() {
        for n in 2..=3 {
            let scheme = Cia2::new(n).unwrap();
            let size = scheme.randomness().size().unwrap();
            for (i, theta) in all_demands().into_iter().enumerate() {
                let lib = MessageLibrary::random(2, 2 * n - 1, 40 + i as u64);
                for r in 0..size {
                    let t = run_transcript(&scheme, &lib, &theta, Randomness::Realization(r)).unwrap();
                    assert!(t.is_correct(&lib), "N={n} {theta:?} r={r}");
                    assert_eq!(t.load, q(n as i64 + 1, 2 * n as i64 - 1));
                }
            }
        }
    }

    #[test]
    fn cia2_load_for_n2_is_one() {
        let scheme = Cia2::new(2).unwrap();
        let lib = MessageLibrary::random(2, 3, 0);
        let t = run_transcript(&scheme, &lib, &d(2, 2), Randomness::Seed(1)).unwrap();
        assert_eq!(t.load, q(1, 1));
        assert!(t.is_correct(&lib));
    }

    #[test]
    fn rejects_bad_demands() {
        let scheme = Cia1::new(2).unwrap();
        let bad = DemandVector::new(vec![1, 3], 3).unwrap();
        assert!(matches!(
            build_queries(&scheme, &bad, Randomness::Seed(0)),
            Err(Error::InvalidDemand(_))
        ));
        assert!(Cia1::new(1).is_err());
    }
}

//! Dense linear algebra over GF(2).
//!
//! Vectors are packed 64 coordinates per word. Matrices are stored as a list of
//! row vectors; every matrix in this crate is at most a few dozen rows wide, so
//! elimination works row by row on the packed words.

use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomness::Choices;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    /// The `i`-th standard basis vector of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn ones(len: usize) -> Self {
        Self::from_fn(len, |_| true)
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from 0/1 integers. Any nonzero entry is read as 1.
    pub fn from_bits<T: Copy + Into<u64>>(bits: &[T]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i].into() != 0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set coordinate.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot product of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len);
        BitVector::from_fn(end - start, |i| self.get(start + i))
    }

    /// Picks the coordinates listed in `idx`, in order.
    pub fn select(&self, idx: &[usize]) -> BitVector {
        BitVector::from_fn(idx.len(), |i| self.get(idx[i]))
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitVector>) -> BitVector {
        let parts: Vec<&BitVector> = parts.into_iter().collect();
        let len = parts.iter().map(|p| p.len).sum();
        let mut out = BitVector::zeros(len);
        let mut at = 0;
        for p in parts {
            for i in 0..p.len {
                if p.get(i) {
                    out.set(at + i, true);
                }
            }
            at += p.len;
        }
        out
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        write!(f, "]")
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut v = BitVector::zeros(0);
        for b in iter {
            v.push(b);
        }
        v
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len))?;
        for b in self.iter() {
            seq.serialize_element(&u8::from(b))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct BitsVisitor;

        impl<'de> Visitor<'de> for BitsVisitor {
            type Value = BitVector;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of 0/1 integers")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<BitVector, A::Error> {
                let mut v = BitVector::zeros(0);
                while let Some(b) = seq.next_element::<u8>()? {
                    match b {
                        0 => v.push(false),
                        1 => v.push(true),
                        other => return Err(de::Error::custom(format!("bit value {other} is not 0 or 1"))),
                    }
                }
                Ok(v)
            }
        }

        deserializer.deserialize_seq(BitsVisitor)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Stacks row vectors. All rows must share one length.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Row-major 0/1 entries; convenient for tests and fixtures.
    pub fn from_nested<T: Copy + Into<u64>>(rows: &[&[T]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| BitVector::from_bits(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols
    }

    pub fn transpose(&self) -> BitMatrix {
        let rows = (0..self.cols)
            .map(|c| BitVector::from_fn(self.rows(), |r| self.get(r, c)))
            .collect();
        BitMatrix {
            cols: self.rows(),
            rows,
        }
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows(),
            });
        }
        let t = other.transpose();
        let rows = self
            .rows
            .iter()
            .map(|r| BitVector::from_fn(other.cols, |c| r.dot(t.row(c))))
            .collect();
        Ok(BitMatrix { cols: other.cols, rows })
    }

    /// Rows reordered so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: perm.iter().map(|&p| self.rows[p].clone()).collect(),
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter()).finish()
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<BitVector>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, BitVector::len);
        BitMatrix::from_rows(cols, rows).map_err(de::Error::custom)
    }
}

/// Row rank by Gaussian elimination.
pub fn rank(m: &BitMatrix) -> usize {
    let mut rows = m.rows.clone();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Gauss-Jordan inverse. Fails with `SingularMatrix` when rank < dimension.
pub fn invert(m: &BitMatrix) -> Result<BitMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let mut left = m.rows.clone();
    let mut right: Vec<BitVector> = (0..n).map(|i| BitVector::unit(n, i)).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| left[r].get(col)).ok_or(Error::SingularMatrix)?;
        left.swap(col, p);
        right.swap(col, p);
        let (pl, pr) = (left[col].clone(), right[col].clone());
        for r in 0..n {
            if r != col && left[r].get(col) {
                left[r].xor_assign(&pl);
                right[r].xor_assign(&pr);
            }
        }
    }
    Ok(BitMatrix { cols: n, rows: right })
}

pub fn mat_vec(m: &BitMatrix, v: &BitVector) -> Result<BitVector> {
    if v.len() != m.cols {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            found: v.len(),
        });
    }
    Ok(BitVector::from_fn(m.rows(), |r| m.rows[r].dot(v)))
}

/// Solves `m · x = rhs` for square full-rank `m`.
pub fn solve(m: &BitMatrix, rhs: &BitVector) -> Result<BitVector> {
    if rhs.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: rhs.len(),
        });
    }
    mat_vec(&invert(m)?, rhs)
}

/// `Y_N`: rows `e_i + e_N` for `i < N`, then `e_N`.
pub fn y_matrix(n: usize) -> Result<BitMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("Y_N needs N >= 2, got {n}")));
    }
    let rows = (0..n)
        .map(|i| {
            let mut r = BitVector::unit(n, n - 1);
            if i + 1 < n {
                r.set(i, true);
            }
            r
        })
        .collect();
    BitMatrix::from_rows(n, rows)
}

/// `Y'_N`: the `N x (N-1)` matrix `[I_{N-1}; 0]`.
pub fn y_prime_matrix(n: usize) -> Result<BitMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("Y'_N needs N >= 2, got {n}")));
    }
    let rows = (0..n)
        .map(|i| {
            if i + 1 < n {
                BitVector::unit(n - 1, i)
            } else {
                BitVector::zeros(n - 1)
            }
        })
        .collect();
    BitMatrix::from_rows(n - 1, rows)
}

/// Draws a uniform permutation of `0..n` from a Lehmer code. For `n <= 20`
/// the code is one draw from `0..n!` and is returned as the permutation's
/// rank in lexicographic order; larger `n` draw digit by digit and return
/// no rank.
pub fn random_permutation(n: usize, rng: &mut dyn Choices) -> (Vec<usize>, Option<u128>) {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut perm = Vec::with_capacity(n);
    if n <= 20 {
        let total: usize = (1..=n).product();
        let index = rng.choose(total);
        let mut rest = index;
        let mut place = total;
        for remaining in (1..=n).rev() {
            place /= remaining;
            perm.push(pool.remove(rest / place));
            rest %= place;
        }
        return (perm, Some(index as u128));
    }
    for remaining in (1..=n).rev() {
        perm.push(pool.remove(rng.choose(remaining)));
    }
    (perm, None)
}

/// Uniformly reorders the rows of `m`; see [`random_permutation`] for the index.
pub fn random_row_permutation(m: &BitMatrix, rng: &mut dyn Choices) -> (BitMatrix, Option<u128>) {
    let (perm, index) = random_permutation(m.rows(), rng);
    (m.permute_rows(&perm), index)
}

/// Incremental span membership: a list of known linear equations
/// `coeffs · x = value` over unknowns `x`, kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct LinearKnowledge {
    unknowns: usize,
    // (pivot column, coefficient row, value)
    basis: Vec<(usize, BitVector, bool)>,
}

impl LinearKnowledge {
    pub fn new(unknowns: usize) -> Self {
        Self {
            unknowns,
            basis: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn reduce(&self, mut coeffs: BitVector, mut value: bool) -> (BitVector, bool) {
        for (pivot, row, v) in &self.basis {
            if coeffs.get(*pivot) {
                coeffs.xor_assign(row);
                value ^= v;
            }
        }
        (coeffs, value)
    }

    /// Adds an equation; returns an error when it contradicts what is known.
    pub fn add(&mut self, coeffs: BitVector, value: bool) -> Result<()> {
        assert_eq!(coeffs.len(), self.unknowns);
        let (coeffs, value) = self.reduce(coeffs, value);
        let Some(pivot) = coeffs.first_one() else {
            return if value {
                Err(Error::DecodeFailure("inconsistent linear equations".into()))
            } else {
                Ok(())
            };
        };
        for (_, row, v) in self.basis.iter_mut() {
            if row.get(pivot) {
                row.xor_assign(&coeffs);
                *v ^= value;
            }
        }
        self.basis.push((pivot, coeffs, value));
        Ok(())
    }

    /// Value of `coeffs · x` if it is determined by the known equations.
    pub fn evaluate(&self, coeffs: &BitVector) -> Option<bool> {
        let (rest, value) = self.reduce(coeffs.clone(), false);
        rest.is_zero().then_some(value)
    }

    pub fn unknown(&self, i: usize) -> Option<bool> {
        self.evaluate(&BitVector::unit(self.unknowns, i))
    }
}

//! Dense linear algebra over the two-element field.
//!
//! Vectors are single machine words, so every vector has at most
//! [`MAX_BITS`] coordinates. Coordinate `0` is written first in the
//! bitstring form and is the most significant position for ordering;
//! internally it lives in the lowest bit of the word.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported vector length.
pub const MAX_BITS: usize = 64;

fn low_mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// An element of `Z_2^len` with `len <= 64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVector {
    bits: u64,
    len: u8,
}

impl BitVector {
    /// The zero vector of the given length.
    ///
    /// Panics if `len > 64`.
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "vector length {len} exceeds {MAX_BITS}");
        BitVector { bits: 0, len: len as u8 }
    }

    /// The all-ones vector.
    pub fn ones(len: usize) -> Self {
        Self::from_word(len, u64::MAX)
    }

    /// Builds a vector from a word; bits at positions `>= len` are dropped.
    pub fn from_word(len: usize, word: u64) -> Self {
        let mut v = Self::zeros(len);
        v.bits = word & low_mask(len);
        v
    }

    /// The indicator vector of a set of coordinates.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    /// The `i`-th standard basis vector.
    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_indices(len, [i])
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The raw word; coordinate `i` is bit `i`.
    pub fn word(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len(), "index {i} out of range for length {}", self.len);
        (self.bits >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len(), "index {i} out of range for length {}", self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len(), "index {i} out of range for length {}", self.len);
        self.bits ^= 1 << i;
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Index of the first nonzero coordinate.
    pub fn leading(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.bits.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }

    /// Entrywise sum, rejecting mismatched lengths.
    pub fn checked_add(&self, other: &BitVector) -> Result<BitVector> {
        check_len(self.len(), other.len())?;
        Ok(BitVector { bits: self.bits ^ other.bits, len: self.len })
    }

    /// Standard pairing: parity of the entrywise product.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "pairing of vectors with different lengths");
        (self.bits & other.bits).count_ones() & 1 == 1
    }

    pub fn checked_dot(&self, other: &BitVector) -> Result<bool> {
        check_len(self.len(), other.len())?;
        Ok(self.dot(other))
    }

    /// The sub-vector of coordinates `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len(), "slice out of range");
        BitVector::from_word(len, self.bits >> start)
    }

    /// Overwrites coordinates `start..start + block.len()` with `block`.
    pub fn splice(&mut self, start: usize, block: &BitVector) {
        assert!(start + block.len() <= self.len(), "splice out of range");
        let mask = low_mask(block.len()) << start;
        self.bits = (self.bits & !mask) | (block.bits << start);
    }

    /// Coordinates rearranged so that output `k` is input `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(perm.len());
        for (k, &src) in perm.iter().enumerate() {
            if self.get(src) {
                out.set(k, true);
            }
        }
        out
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

impl BitXor for BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: BitVector) -> BitVector {
        assert_eq!(self.len, rhs.len, "sum of vectors with different lengths");
        BitVector { bits: self.bits ^ rhs.bits, len: self.len }
    }
}

impl BitXorAssign for BitVector {
    fn bitxor_assign(&mut self, rhs: BitVector) {
        *self = *self ^ rhs;
    }
}

impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        // Coordinate 0 is the most significant position.
        self.len
            .cmp(&other.len)
            .then_with(|| self.bits.reverse_bits().cmp(&other.bits.reverse_bits()))
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_BITS {
            return Err(Error::TooLong { len: s.len() });
        }
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::BitString(s.to_string())),
            }
        }
        Ok(v)
    }
}

/// A matrix over GF(2) stored as a list of row vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    ncols: usize,
}

/// Output of [`BitMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Reduced row echelon form; zero rows are at the bottom.
    pub reduced: BitMatrix,
    pub rank: usize,
    /// Invertible transform with `transform * M = reduced`.
    pub transform: BitMatrix,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn new(rows: Vec<BitVector>, ncols: usize) -> Result<Self> {
        if ncols > MAX_BITS {
            return Err(Error::TooLong { len: ncols });
        }
        for r in &rows {
            check_len(ncols, r.len())?;
        }
        Ok(BitMatrix { rows, ncols })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        BitMatrix { rows: vec![BitVector::zeros(ncols); nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix { rows: (0..n).map(|i| BitVector::unit(n, i)).collect(), ncols: n }
    }

    /// Parses rows written as bitstrings of equal length.
    pub fn parse_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.as_ref().parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        let ncols = parsed.first().map_or(0, BitVector::len);
        BitMatrix::new(parsed, ncols)
    }

    /// Builds a matrix from its columns, each of length `nrows`.
    pub fn from_columns(nrows: usize, columns: &[BitVector]) -> Result<Self> {
        let mut m = BitMatrix::zeros(nrows, columns.len());
        if columns.len() > MAX_BITS {
            return Err(Error::TooLong { len: columns.len() });
        }
        for (j, c) in columns.iter().enumerate() {
            check_len(nrows, c.len())?;
            for i in c.iter_ones() {
                m.rows[i].set(j, true);
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    /// Column `j` as a vector of length `nrows`.
    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<BitVector> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    /// The matrix whose `k`-th column is column `cols[k]` of `self`.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix {
            rows: self.rows.iter().map(|r| r.permute(cols)).collect(),
            ncols: cols.len(),
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix { rows: self.columns(), ncols: self.nrows() }
    }

    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        check_len(self.ncols, rhs.nrows())?;
        let rows = self
            .rows
            .iter()
            .map(|r| combine(rhs.rows(), r, rhs.ncols()))
            .collect();
        Ok(BitMatrix { rows, ncols: rhs.ncols() })
    }

    /// `M * v` for a column vector `v` of length `ncols`.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        check_len(self.ncols, v.len())?;
        let mut out = BitVector::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// The linear combination of rows with coefficients `coeffs`.
    pub fn combine_rows(&self, coeffs: &BitVector) -> Result<BitVector> {
        check_len(self.nrows(), coeffs.len())?;
        Ok(combine(&self.rows, coeffs, self.ncols))
    }

    /// Reduced row echelon form together with the row transform producing it.
    pub fn rref(&self) -> Rref {
        let n = self.nrows();
        let mut reduced = self.rows.clone();
        let mut transform: Vec<BitVector> = (0..n).map(|i| BitVector::unit(n, i)).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.ncols {
            let Some(p) = (rank..n).find(|&r| reduced[r].get(col)) else {
                continue;
            };
            reduced.swap(rank, p);
            transform.swap(rank, p);
            let (pivot_row, pivot_u) = (reduced[rank], transform[rank]);
            for r in 0..n {
                if r != rank && reduced[r].get(col) {
                    reduced[r] ^= pivot_row;
                    transform[r] ^= pivot_u;
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == n {
                break;
            }
        }
        Rref {
            reduced: BitMatrix { rows: reduced, ncols: self.ncols },
            rank,
            transform: BitMatrix { rows: transform, ncols: n },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        SubspaceReducer::new(&self.rows).dim()
    }

    /// Determinant by forward elimination.
    pub fn det(&self) -> Result<bool> {
        if self.nrows() != self.ncols {
            return Err(Error::NotSquare { rows: self.nrows(), cols: self.ncols });
        }
        let mut rows = self.rows.clone();
        let n = rows.len();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| rows[r].get(col)) else {
                return Ok(false);
            };
            rows.swap(col, p);
            let pivot = rows[col];
            for r in rows.iter_mut().skip(col + 1) {
                if r.get(col) {
                    *r ^= pivot;
                }
            }
        }
        Ok(true)
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.nrows() != self.ncols {
            return None;
        }
        let r = self.rref();
        (r.rank == self.ncols).then_some(r.transform)
    }

    /// A basis of `{v : M v = 0}`, one vector per non-pivot column.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let r = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut at = vec![None; self.ncols];
            for (k, &p) in r.pivots.iter().enumerate() {
                at[p] = Some(k);
            }
            at
        };
        (0..self.ncols)
            .filter(|&f| pivot_set[f].is_none())
            .map(|f| {
                let mut v = BitVector::unit(self.ncols, f);
                for (k, &p) in r.pivots.iter().enumerate() {
                    if r.reduced.get(k, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Coefficients expressing `v` as a combination of the rows, if any.
    pub fn row_space_contains(&self, v: &BitVector) -> Result<Option<BitVector>> {
        check_len(self.ncols, v.len())?;
        let r = self.rref();
        let mut rest = *v;
        let mut coeffs = BitVector::zeros(self.nrows());
        for (k, &p) in r.pivots.iter().enumerate() {
            if rest.get(p) {
                rest ^= *r.reduced.row(k);
                coeffs ^= *r.transform.row(k);
            }
        }
        Ok(rest.is_zero().then_some(coeffs))
    }

    /// Every element of the row space, in Gray-code order starting at zero.
    pub fn row_space(&self) -> Vec<BitVector> {
        let basis = SubspaceReducer::new(&self.rows).basis().to_vec();
        span(&basis, self.ncols)
    }
}

fn combine(rows: &[BitVector], coeffs: &BitVector, ncols: usize) -> BitVector {
    coeffs
        .iter_ones()
        .fold(BitVector::zeros(ncols), |acc, i| acc ^ rows[i])
}

/// All `2^k` elements spanned by `basis` (assumed independent).
pub fn span(basis: &[BitVector], len: usize) -> Vec<BitVector> {
    let mut out = Vec::with_capacity(1 << basis.len());
    let mut cur = BitVector::zeros(len);
    out.push(cur);
    for step in 1u64..(1u64 << basis.len()) {
        cur ^= basis[step.trailing_zeros() as usize];
        out.push(cur);
    }
    out
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter().map(|r| r.to_string())).finish()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A subspace kept in reduced echelon form, used for membership tests and
/// canonical coset representatives.
#[derive(Clone, Debug)]
pub struct SubspaceReducer {
    len: usize,
    /// Reduced basis, sorted by pivot; `pivots[k]` is the leading index of `basis[k]`.
    basis: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl SubspaceReducer {
    pub fn new(vectors: &[BitVector]) -> Self {
        let len = vectors.first().map_or(0, BitVector::len);
        let mut r = SubspaceReducer { len, basis: Vec::new(), pivots: Vec::new() };
        for v in vectors {
            r.insert(*v);
        }
        r
    }

    pub fn empty(len: usize) -> Self {
        SubspaceReducer { len, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    /// Reduces `v` against the basis; the result is a canonical coset representative.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut rest = *v;
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if rest.get(p) {
                rest ^= *b;
            }
        }
        rest
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the spanning set; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: BitVector) -> bool {
        if self.basis.is_empty() && self.len != v.len() {
            self.len = v.len();
        }
        assert_eq!(self.len, v.len(), "subspace vectors must share a length");
        let r = self.reduce(&v);
        let Some(p) = r.leading() else {
            return false;
        };
        for b in &mut self.basis {
            if b.get(p) {
                *b ^= r;
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.basis.insert(at, r);
        self.pivots.insert(at, p);
        true
    }
}

/// Canonical representative of `v + span(basis)`.
pub fn coset_canonical(v: &BitVector, basis: &[BitVector]) -> Result<BitVector> {
    for b in basis {
        check_len(v.len(), b.len())?;
    }
    let mut r = SubspaceReducer::empty(v.len());
    for b in basis {
        r.insert(*b);
    }
    Ok(r.reduce(v))
}

//! Products of polygons: facet indexing, vertices, and the reduced
//! cohomology of facet unions.
//!
//! Facet `(i, j)` is edge `j` of polygon `i`, both zero-based, and sits at
//! flat index `offset(i) + j`. Edges are cyclically ordered, so edges `j`
//! and `j + 1 (mod m_i)` meet at a vertex of the polygon.
//!
//! The topology of a facet union is computed purely combinatorially: on a
//! single polygon a union of edges is a set of arcs (or the whole circle),
//! and on a product the union is homotopy equivalent to the join of the
//! per-factor unions.

use crate::error::{Error, Result};
use crate::gf2::{BitVector, MAX_BITS};

/// Largest polygon whose edge subsets are enumerated exhaustively.
pub const MAX_ENUMERATED_SIDES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolygonProduct {
    factors: Vec<usize>,
    offsets: Vec<usize>,
    m: usize,
}

impl PolygonProduct {
    pub fn new(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::NoFactors);
        }
        if let Some((i, &s)) = factors.iter().enumerate().find(|(_, &s)| s < 3) {
            return Err(Error::PolygonTooSmall { factor: i, sides: s });
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut m = 0;
        for &s in factors {
            offsets.push(m);
            m += s;
        }
        if m > MAX_BITS {
            return Err(Error::TooLong { len: m });
        }
        Ok(PolygonProduct { factors: factors.to_vec(), offsets, m })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    /// Number of polygon factors.
    pub fn n(&self) -> usize {
        self.factors.len()
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.factors.len()
    }

    /// Total facet count.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn sides(&self, i: usize) -> usize {
        self.factors[i]
    }

    /// Flat index of edge `j` (taken cyclically) of factor `i`.
    pub fn facet(&self, i: usize, j: usize) -> usize {
        self.offsets[i] + j % self.factors[i]
    }

    /// Inverse of [`facet`](Self::facet).
    pub fn locate(&self, flat: usize) -> (usize, usize) {
        let i = self.offsets.partition_point(|&o| o <= flat) - 1;
        (i, flat - self.offsets[i])
    }

    pub fn vertex_count(&self) -> usize {
        self.factors.iter().product()
    }

    fn check_factor(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::FactorIndex(i))
        }
    }

    /// The `2n` facets meeting at the vertex selected by `jtuple`: edges
    /// `j_i` and `j_i + 1` of every factor, in factor order.
    pub fn vertex_facets(&self, jtuple: &[usize]) -> Result<Vec<usize>> {
        if jtuple.len() != self.n() || jtuple.iter().zip(&self.factors).any(|(&j, &s)| j >= s) {
            return Err(Error::VertexOutOfRange(jtuple.to_vec()));
        }
        Ok(jtuple
            .iter()
            .enumerate()
            .flat_map(|(i, &j)| [self.facet(i, j), self.facet(i, j + 1)])
            .collect())
    }

    /// Every vertex tuple, first factor most significant.
    pub fn vertices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let total = self.vertex_count();
        (0..total).map(move |mut k| {
            let mut t = vec![0; self.n()];
            for i in (0..self.n()).rev() {
                t[i] = k % self.factors[i];
                k /= self.factors[i];
            }
            t
        })
    }

    /// Indicator of factor `i`'s facets.
    pub fn factor_weight(&self, i: usize) -> Result<BitVector> {
        self.check_factor(i)?;
        Ok(BitVector::from_indices(
            self.m,
            self.offsets[i]..self.offsets[i] + self.factors[i],
        ))
    }

    /// Embeds an edge mask of factor `i` into `Z_2^m`.
    pub fn embed(&self, i: usize, mask: u64) -> BitVector {
        BitVector::from_word(self.m, (mask & full_mask(self.factors[i])) << self.offsets[i])
    }

    /// Splits a vector into its per-factor edge masks.
    pub fn split(&self, omega: &BitVector) -> Vec<u64> {
        (0..self.n())
            .map(|i| omega.slice(self.offsets[i], self.factors[i]).word())
            .collect()
    }
}

fn full_mask(sides: usize) -> u64 {
    if sides == 64 {
        u64::MAX
    } else {
        (1u64 << sides) - 1
    }
}

/// A subset of one factor's edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FactorSubset {
    pub factor: usize,
    pub sides: usize,
    pub mask: u64,
}

/// A vector of `Z_2^m`, read as a union of facets of the product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OmegaVector(pub BitVector);

impl OmegaVector {
    pub fn parts(&self, p: &PolygonProduct) -> Vec<FactorSubset> {
        p.split(&self.0)
            .into_iter()
            .enumerate()
            .map(|(i, mask)| FactorSubset { factor: i, sides: p.sides(i), mask })
            .collect()
    }
}

/// Reduced rational Betti numbers of a union of polygon edges in degrees
/// -1, 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReducedBettiProfile {
    pub b_minus1: u64,
    pub b0: u64,
    pub b1: u64,
}

impl ReducedBettiProfile {
    fn as_array(&self) -> [u64; 3] {
        [self.b_minus1, self.b0, self.b1]
    }
}

/// Number of connected components of the union of the selected edges of
/// an `m`-gon, i.e. maximal cyclic runs of set bits.
pub fn component_count(m: usize, u: u64) -> usize {
    let full = full_mask(m);
    let u = u & full;
    if u == 0 {
        return 0;
    }
    if u == full {
        return 1;
    }
    // A run starts at every selected edge whose predecessor is not selected.
    let prev = ((u << 1) | (u >> (m - 1))) & full;
    (u & !prev).count_ones() as usize
}

pub fn factor_reduced_betti(m: usize, u: u64) -> ReducedBettiProfile {
    let full = full_mask(m);
    let u = u & full;
    if u == 0 {
        ReducedBettiProfile { b_minus1: 1, b0: 0, b1: 0 }
    } else if u == full {
        ReducedBettiProfile { b_minus1: 0, b0: 0, b1: 1 }
    } else {
        ReducedBettiProfile { b_minus1: 0, b0: component_count(m, u) as u64 - 1, b1: 0 }
    }
}

pub(crate) fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Reduced Betti numbers of the facet union selected by `omega`.
///
/// Entry `k` of the result is the dimension in degree `k - 1`, for degrees
/// `-1 ..= 2n - 1`. The union is the join of the per-factor edge unions,
/// whose reduced cohomology in degree `q` collects the products of
/// per-factor degrees `q_i` with `sum q_i = q - (n - 1)`. Shifting each
/// factor's degrees up by one turns this into a polynomial product.
pub fn omega_reduced_betti(p: &PolygonProduct, omega: &OmegaVector) -> Vec<u64> {
    omega
        .parts(p)
        .iter()
        .map(|s| factor_reduced_betti(s.sides, s.mask).as_array().to_vec())
        .fold(vec![1], |acc, f| poly_mul(&acc, &f))
}

/// Genus `1 + (m - 4) 2^(m - 3)` of the surface over an `m`-gon.
pub fn genus(m: usize) -> Result<u64> {
    if m < 3 {
        return Err(Error::PolygonTooSmall { factor: 0, sides: m });
    }
    if m == 3 {
        return Ok(0);
    }
    1u64.checked_shl(m as u32 - 3)
        .filter(|_| m - 3 < 64)
        .and_then(|pow| pow.checked_mul(m as u64 - 4))
        .and_then(|x| x.checked_add(1))
        .ok_or(Error::GenusOverflow(m))
}

/// Sum of the reduced Betti profiles over all edge subsets of an `m`-gon,
/// as a polynomial in the shifted degree.
pub fn factor_generating_polynomial(m: usize) -> Result<[u64; 3]> {
    if m > MAX_ENUMERATED_SIDES {
        return Err(Error::Guardrail(format!(
            "{m}-gon exceeds {MAX_ENUMERATED_SIDES} sides for subset enumeration"
        )));
    }
    let mut acc = [0u64; 3];
    for u in 0..(1u64 << m) {
        let prof = factor_reduced_betti(m, u).as_array();
        for k in 0..3 {
            acc[k] += prof[k];
        }
    }
    Ok(acc)
}

/// Betti numbers of the real moment-angle manifold, aggregated factorwise:
/// `b_q` is the coefficient of `t^q` in the product of the per-factor
/// generating polynomials.
pub fn rz_poincare(p: &PolygonProduct) -> Result<Vec<u64>> {
    let mut acc = vec![1];
    for &s in p.factors() {
        acc = poly_mul(&acc, &factor_generating_polynomial(s)?);
    }
    Ok(acc)
}

/// The same Betti numbers summed directly over all `2^m` vectors.
pub fn rz_poincare_exhaustive(p: &PolygonProduct) -> Result<Vec<u64>> {
    if p.m() > 2 * MAX_ENUMERATED_SIDES {
        return Err(Error::Guardrail(format!("2^{} facet unions", p.m())));
    }
    let mut b = vec![0u64; p.dim() + 1];
    for w in 0..(1u64 << p.m()) {
        let omega = OmegaVector(BitVector::from_word(p.m(), w));
        let reduced = omega_reduced_betti(p, &omega);
        // b_q receives the reduced degree q - 1, stored at index q.
        for (q, slot) in b.iter_mut().enumerate() {
            *slot += reduced[q];
        }
    }
    Ok(b)
}

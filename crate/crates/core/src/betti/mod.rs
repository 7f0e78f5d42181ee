//! Betti numbers of small covers: rationally from facet unions over the
//! row space, mod 2 from the face ring, and rationally again from the
//! `Sq^1` homology of the mod-2 ring.

mod face_ring;

use serde::Serialize;

pub use face_ring::{FaceRing, Monomial, MonomialBasis, Poly};

use crate::charmap::CharMatrix;
use crate::error::Result;
use crate::polytope::{omega_reduced_betti, poly_mul, OmegaVector, PolygonProduct};

/// Dimensions of a graded vector space in degrees `0..=2n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct GradedDims {
    pub dims: Vec<u64>,
}

impl GradedDims {
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(q, &b)| if q % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn is_palindromic(&self) -> bool {
        self.dims.iter().eq(self.dims.iter().rev())
    }

    pub fn total(&self) -> u64 {
        self.dims.iter().sum()
    }
}

impl From<Vec<u64>> for GradedDims {
    fn from(dims: Vec<u64>) -> Self {
        GradedDims { dims }
    }
}

impl PartialEq<[u64]> for GradedDims {
    fn eq(&self, other: &[u64]) -> bool {
        self.dims == other
    }
}

impl<const N: usize> PartialEq<[u64; N]> for GradedDims {
    fn eq(&self, other: &[u64; N]) -> bool {
        self.dims == other
    }
}

/// Rational Betti numbers: `b_q` sums the reduced degree `q - 1` cohomology
/// of `P_ω` over every `ω` in the row space.
pub fn small_cover_betti(lambda: &CharMatrix) -> Result<GradedDims> {
    lambda.require_valid()?;
    let p = lambda.polytope();
    let mut b = vec![0u64; p.dim() + 1];
    for omega in lambda.matrix().row_space() {
        let reduced = omega_reduced_betti(p, &OmegaVector(omega));
        for (slot, r) in b.iter_mut().zip(reduced) {
            *slot += r;
        }
    }
    Ok(b.into())
}

/// Graded dimensions of the mod-2 cohomology ring.
pub fn mod2_betti(lambda: &CharMatrix) -> Result<GradedDims> {
    Ok(FaceRing::new(lambda)?.dims().into())
}

/// Coefficients of `prod (1 + (m_i - 2) t + t^2)`.
pub fn h_vector_oracle(p: &PolygonProduct) -> GradedDims {
    p.factors()
        .iter()
        .map(|&s| vec![1, s as u64 - 2, 1])
        .fold(vec![1], |acc, f| poly_mul(&acc, &f))
        .into()
}

/// Rational Betti numbers recovered as the homology of `Sq^1` acting on the
/// mod-2 cohomology ring. All torsion in the integral cohomology of these
/// manifolds has order two, so the Bockstein spectral sequence collapses at
/// this page.
pub fn sq1_e2_betti(lambda: &CharMatrix) -> Result<GradedDims> {
    Ok(FaceRing::new(lambda)?.sq1_homology().into())
}

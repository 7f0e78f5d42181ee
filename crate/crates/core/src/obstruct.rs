//! Obstructions to symplectic and orientable structures that can be read
//! off the polytope or the characteristic matrix.

use std::fmt;

use serde::Serialize;

use crate::charmap::{factor_compatible, orientable, vertex_minor, CharMatrix, Compatibility};
use crate::error::{Error, Result};
use crate::polytope::PolygonProduct;

/// First triangle factor, if any. Such a product carries no c-symplectic
/// small cover.
pub fn triangle_obstruction(p: &PolygonProduct) -> Option<usize> {
    (0..p.n()).find(|&i| p.sides(i) == 3)
}

/// `sum_j det B_j` over all vertices, mod 2.
pub fn det_sum_identity(lambda: &CharMatrix) -> Result<bool> {
    lambda.require_valid()?;
    let mut acc = false;
    for j in lambda.polytope().vertices() {
        acc ^= vertex_minor(lambda, &j)?.det()?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AllOddReport {
    Inapplicable,
    Applies { orientable: bool, det_sum: bool },
}

/// When every factor is odd, confirms non-orientability together with the
/// determinant sum being one.
pub fn all_odd_obstruction(lambda: &CharMatrix) -> Result<AllOddReport> {
    lambda.require_valid()?;
    let p = lambda.polytope();
    if !p.factors().iter().all(|m| m % 2 == 1) {
        return Ok(AllOddReport::Inapplicable);
    }
    let is_orientable = orientable(lambda)?.is_some();
    let det_sum = det_sum_identity(lambda)?;
    if is_orientable || !det_sum {
        return Err(Error::ObstructionViolated(format!(
            "all factors odd but orientable = {is_orientable}, determinant sum = {}",
            u8::from(det_sum)
        )));
    }
    Ok(AllOddReport::Applies { orientable: false, det_sum })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorParity {
    pub factor: usize,
    pub sides: usize,
    pub weight_in_row_space: bool,
}

/// Per factor, whether `χ_i ∈ row(λ)`; fails hard if that happens for an
/// odd polygon.
pub fn even_sides_consistency(lambda: &CharMatrix) -> Result<Vec<FactorParity>> {
    lambda.require_valid()?;
    let p = lambda.polytope();
    let rows = lambda.row_space();
    (0..p.n())
        .map(|i| {
            let inside = rows.contains(&p.factor_weight(i)?);
            if inside && p.sides(i) % 2 == 1 {
                return Err(Error::ObstructionViolated(format!(
                    "factor {} has {} sides but its weight lies in the row space",
                    i + 1,
                    p.sides(i)
                )));
            }
            Ok(FactorParity { factor: i, sides: p.sides(i), weight_in_row_space: inside })
        })
        .collect()
}

/// What is known about symplectic structures on one small cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SymplecticStatus {
    /// A triangle factor rules out c-symplectic classes.
    TriangleFactor { factor: usize },
    /// All factors odd: not even orientable.
    AllOdd,
    /// Factor-compatible covers have a smooth projective model.
    Projective,
    /// Valid, unobstructed, not factor-compatible.
    Unknown,
}

impl fmt::Display for SymplecticStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymplecticStatus::TriangleFactor { factor } => {
                write!(f, "triangle factor {}: not c-symplectic, hence not symplectic", factor + 1)
            }
            SymplecticStatus::AllOdd => write!(f, "all factors odd: non-orientable"),
            SymplecticStatus::Projective => write!(f, "factor-compatible: projective"),
            SymplecticStatus::Unknown => write!(f, "unknown"),
        }
    }
}

pub fn symplectic_status(lambda: &CharMatrix) -> Result<SymplecticStatus> {
    lambda.require_valid()?;
    let p = lambda.polytope();
    if let Some(factor) = triangle_obstruction(p) {
        return Ok(SymplecticStatus::TriangleFactor { factor });
    }
    if let AllOddReport::Applies { .. } = all_odd_obstruction(lambda)? {
        return Ok(SymplecticStatus::AllOdd);
    }
    Ok(match factor_compatible(lambda)? {
        Compatibility::Compatible(_) => SymplecticStatus::Projective,
        Compatibility::Refused(_) => SymplecticStatus::Unknown,
    })
}

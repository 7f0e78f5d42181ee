//! Characteristic matrices over products of polygons: the vertex
//! condition, orientability, and factor-compatibility with its square
//! regrouping.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, SubspaceReducer};
use crate::polytope::PolygonProduct;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Validity {
    Unchecked,
    Valid,
    /// Zero-based vertex tuple whose minor is singular.
    Invalid { vertex: Vec<usize> },
}

/// A `2n x m` matrix over GF(2) with columns in factor-blocked order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharMatrix {
    polytope: PolygonProduct,
    matrix: BitMatrix,
    validity: Validity,
}

impl CharMatrix {
    /// Wraps a matrix after checking its shape; the vertex condition is not checked.
    pub fn new(polytope: PolygonProduct, matrix: BitMatrix) -> Result<Self> {
        if matrix.nrows() != polytope.dim() || matrix.ncols() != polytope.m() {
            return Err(Error::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected_rows: polytope.dim(),
                expected_cols: polytope.m(),
            });
        }
        Ok(CharMatrix { polytope, matrix, validity: Validity::Unchecked })
    }

    pub fn from_rows<S: AsRef<str>>(factors: &[usize], rows: &[S]) -> Result<Self> {
        let p = PolygonProduct::new(factors)?;
        let m = if rows.is_empty() {
            BitMatrix::zeros(0, p.m())
        } else {
            BitMatrix::parse_rows(rows)?
        };
        CharMatrix::new(p, m)
    }

    /// Checks the vertex condition, failing with the first singular vertex.
    pub fn validated(mut self) -> Result<Self> {
        self.validity = validate(&self);
        match &self.validity {
            Validity::Invalid { vertex } => Err(Error::NotCharacteristic { vertex: vertex.clone() }),
            _ => Ok(self),
        }
    }

    pub fn polytope(&self) -> &PolygonProduct {
        &self.polytope
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn validity(&self) -> &Validity {
        &self.validity
    }

    /// Ensures the vertex condition holds, computing it if still unchecked.
    pub fn require_valid(&self) -> Result<()> {
        let v = match &self.validity {
            Validity::Unchecked => validate(self),
            other => other.clone(),
        };
        match v {
            Validity::Invalid { vertex } => Err(Error::NotCharacteristic { vertex }),
            _ => Ok(()),
        }
    }

    /// Reducer for the row space `row(λ)`.
    pub fn row_space(&self) -> SubspaceReducer {
        let mut r = SubspaceReducer::empty(self.polytope.m());
        for row in self.matrix.rows() {
            r.insert(*row);
        }
        r
    }

    pub fn row_space_contains(&self, v: &BitVector) -> Result<Option<BitVector>> {
        self.matrix.row_space_contains(v)
    }

    /// Characteristic vector of the facet at flat index `j`.
    pub fn column(&self, j: usize) -> BitVector {
        self.matrix.column(j)
    }

    /// Same matrix with columns rearranged (`new[k] = old[perm[k]]`) over a
    /// possibly relabelled polytope. Validity is preserved only if the caller
    /// asserts the relabelling is a combinatorial isomorphism.
    pub(crate) fn with_columns(&self, polytope: PolygonProduct, perm: &[usize]) -> Result<Self> {
        CharMatrix::new(polytope, self.matrix.select_columns(perm))
    }

    /// Same polytope, different rows. Shape is checked; validity is reset.
    pub fn with_matrix(&self, matrix: BitMatrix) -> Result<Self> {
        CharMatrix::new(self.polytope.clone(), matrix)
    }
}

/// The vertex matrix `B_j`: characteristic vectors of the `2n` facets at
/// vertex `jtuple`, as columns.
pub fn vertex_minor(lambda: &CharMatrix, jtuple: &[usize]) -> Result<BitMatrix> {
    let facets = lambda.polytope.vertex_facets(jtuple)?;
    Ok(lambda.matrix.select_columns(&facets))
}

/// Checks every vertex minor; on failure returns the first singular vertex.
pub fn validate(lambda: &CharMatrix) -> Validity {
    let cols = lambda.matrix.columns();
    for j in lambda.polytope.vertices() {
        let facets = lambda.polytope.vertex_facets(&j).expect("generated vertex");
        let minor = BitMatrix::from_columns(lambda.polytope.dim(), &facets.iter().map(|&f| cols[f]).collect::<Vec<_>>())
            .expect("square vertex minor");
        if !minor.det().expect("square vertex minor") {
            return Validity::Invalid { vertex: j };
        }
    }
    Validity::Valid
}

/// Whether `1_m` lies in `row(λ)`; the witness holds the row coefficients.
pub fn orientable(lambda: &CharMatrix) -> Result<Option<BitVector>> {
    lambda.require_valid()?;
    lambda.row_space_contains(&BitVector::ones(lambda.polytope.m()))
}

pub fn factor_weight(p: &PolygonProduct, i: usize) -> Result<BitVector> {
    p.factor_weight(i)
}

/// The two sums of opposite edges of square factor `i`.
pub fn opposite_pair_weights(p: &PolygonProduct, i: usize) -> Result<(BitVector, BitVector)> {
    if i >= p.n() {
        return Err(Error::FactorIndex(i));
    }
    if p.sides(i) != 4 {
        return Err(Error::NotSquareFactor(i));
    }
    let plus = BitVector::from_indices(p.m(), [p.facet(i, 0), p.facet(i, 2)]);
    let minus = BitVector::from_indices(p.m(), [p.facet(i, 1), p.facet(i, 3)]);
    Ok((plus, minus))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

/// An opposite-pair weight of one square factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OppositeWeight {
    pub factor: usize,
    pub sign: Sign,
    pub vector: BitVector,
}

impl fmt::Display for OppositeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "delta{}{}", self.factor + 1, s)
    }
}

/// All opposite-pair weights in the order `δ⁺, δ⁻` per square factor.
pub fn square_weights(p: &PolygonProduct) -> Vec<OppositeWeight> {
    (0..p.n())
        .filter(|&i| p.sides(i) == 4)
        .flat_map(|i| {
            let (plus, minus) = opposite_pair_weights(p, i).expect("square factor");
            [
                OppositeWeight { factor: i, sign: Sign::Plus, vector: plus },
                OppositeWeight { factor: i, sign: Sign::Minus, vector: minus },
            ]
        })
        .collect()
}

/// A pairing of the opposite-pair weights. Pairs are `(a, b)` with `a < b`,
/// indices into `weights`, sorted by `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SquareMatching {
    pub weights: Vec<OppositeWeight>,
    pub pairs: Vec<(usize, usize)>,
}

impl SquareMatching {
    pub fn is_perfect(&self) -> bool {
        let mut seen = vec![false; self.weights.len()];
        for &(a, b) in &self.pairs {
            for x in [a, b] {
                if x >= seen.len() || seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen.iter().all(|&s| s)
    }

    /// True if every pair stays within one square factor.
    pub fn is_within_squares(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| self.weights[a].factor == self.weights[b].factor)
    }
}

/// Every perfect matching of the weight graph, in lexicographic order.
/// Two weights are adjacent when their sum lies in `row(λ)`.
pub fn all_square_matchings(lambda: &CharMatrix) -> Result<Vec<SquareMatching>> {
    lambda.require_valid()?;
    let weights = square_weights(&lambda.polytope);
    let rows = lambda.row_space();
    let k = weights.len();
    let adjacent: Vec<Vec<bool>> = (0..k)
        .map(|a| (0..k).map(|b| a != b && rows.contains(&(weights[a].vector ^ weights[b].vector))).collect())
        .collect();

    fn extend(
        adjacent: &[Vec<bool>],
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some(a) = used.iter().position(|&u| !u) else {
            out.push(pairs.clone());
            return;
        };
        used[a] = true;
        for b in a + 1..used.len() {
            if !used[b] && adjacent[a][b] {
                used[b] = true;
                pairs.push((a, b));
                extend(adjacent, used, pairs, out);
                pairs.pop();
                used[b] = false;
            }
        }
        used[a] = false;
    }

    let mut found = Vec::new();
    extend(&adjacent, &mut vec![false; k], &mut Vec::new(), &mut found);
    Ok(found
        .into_iter()
        .map(|pairs| SquareMatching { weights: weights.clone(), pairs })
        .collect())
}

/// The lexicographically first perfect matching, if any. With no square
/// factors this is the empty matching.
pub fn find_square_matching(lambda: &CharMatrix) -> Result<Option<SquareMatching>> {
    Ok(all_square_matchings(lambda)?.into_iter().next())
}

/// Result of regrouping the cube part along a matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regrouped {
    pub matrix: CharMatrix,
    /// `new column k = old column colperm[k]`, zero-based.
    pub colperm: Vec<usize>,
}

/// Rebuilds the square factors so that each matched pair becomes the two
/// opposite-pair weights of one new square. Pair `l` fills the `l`-th
/// square slot with facets `(a1, b1, a2, b2)`, where `a` and `b` are the
/// supports of the pair's first and second weight in ascending order.
pub fn regroup(lambda: &CharMatrix, matching: &SquareMatching) -> Result<Regrouped> {
    let p = &lambda.polytope;
    if !matching.is_perfect() || matching.weights != square_weights(p) {
        return Err(Error::MatchingNotPerfect);
    }
    let mut colperm: Vec<usize> = (0..p.m()).collect();
    let slots = (0..p.n()).filter(|&i| p.sides(i) == 4);
    for (&(a, b), slot) in matching.pairs.iter().zip(slots) {
        let sa: Vec<usize> = matching.weights[a].vector.iter_ones().collect();
        let sb: Vec<usize> = matching.weights[b].vector.iter_ones().collect();
        let o = p.offset(slot);
        colperm[o..o + 4].copy_from_slice(&[sa[0], sb[0], sa[1], sb[1]]);
    }
    let matrix = lambda.with_columns(p.clone(), &colperm)?;
    let matrix = match matrix.validated() {
        Ok(m) => m,
        Err(Error::NotCharacteristic { vertex }) => return Err(Error::RegroupInvalid { vertex }),
        Err(e) => return Err(e),
    };
    Ok(Regrouped { matrix, colperm })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refusal {
    /// An odd polygon can never have its factor weight in the row space.
    OddFactor { factor: usize, sides: usize },
    FactorWeightOutsideRowSpace { factor: usize },
    NoSquareMatching,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refusal::OddFactor { factor, sides: 3 } => {
                write!(f, "factor {} is a triangle (odd number of sides)", factor + 1)
            }
            Refusal::OddFactor { factor, sides } => {
                write!(f, "factor {} has an odd number of sides ({sides})", factor + 1)
            }
            Refusal::FactorWeightOutsideRowSpace { factor } => {
                write!(f, "factor weight of factor {} is not in the row space", factor + 1)
            }
            Refusal::NoSquareMatching => {
                write!(f, "opposite-pair weights admit no compatible pairing")
            }
        }
    }
}

/// Evidence that a matrix is factor-compatible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityCertificate {
    pub matching: SquareMatching,
    pub regrouped: Regrouped,
    /// Per factor of the regrouped product, row coefficients producing its
    /// factor weight.
    pub chi_witnesses: Vec<BitVector>,
}

impl CompatibilityCertificate {
    pub fn matrix(&self) -> &CharMatrix {
        &self.regrouped.matrix
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Compatible(Box<CompatibilityCertificate>),
    Refused(Refusal),
}

impl Compatibility {
    pub fn certificate(&self) -> Option<&CompatibilityCertificate> {
        match self {
            Compatibility::Compatible(c) => Some(c),
            Compatibility::Refused(_) => None,
        }
    }

    pub fn into_certificate(self) -> Result<CompatibilityCertificate> {
        match self {
            Compatibility::Compatible(c) => Ok(*c),
            Compatibility::Refused(r) => Err(Error::NotFactorCompatible(r.to_string())),
        }
    }
}

/// Decides factor-compatibility using the lexicographically first matching.
pub fn factor_compatible(lambda: &CharMatrix) -> Result<Compatibility> {
    lambda.require_valid()?;
    if let Some(r) = non_square_refusal(lambda)? {
        return Ok(Compatibility::Refused(r));
    }
    match find_square_matching(lambda)? {
        Some(matching) => certify(lambda, &matching),
        None => Ok(Compatibility::Refused(Refusal::NoSquareMatching)),
    }
}

/// Refusals that do not depend on the square part.
fn non_square_refusal(lambda: &CharMatrix) -> Result<Option<Refusal>> {
    let p = &lambda.polytope;
    if let Some(i) = (0..p.n()).find(|&i| p.sides(i) % 2 == 1) {
        return Ok(Some(Refusal::OddFactor { factor: i, sides: p.sides(i) }));
    }
    let rows = lambda.row_space();
    for i in (0..p.n()).filter(|&i| p.sides(i) != 4) {
        if !rows.contains(&p.factor_weight(i)?) {
            return Ok(Some(Refusal::FactorWeightOutsideRowSpace { factor: i }));
        }
    }
    Ok(None)
}

/// Builds a certificate for a specific perfect matching.
pub fn certify(lambda: &CharMatrix, matching: &SquareMatching) -> Result<Compatibility> {
    lambda.require_valid()?;
    if let Some(r) = non_square_refusal(lambda)? {
        return Ok(Compatibility::Refused(r));
    }
    let regrouped = regroup(lambda, matching)?;
    let rp = regrouped.matrix.polytope().clone();
    let mut chi_witnesses = Vec::with_capacity(rp.n());
    for i in 0..rp.n() {
        match regrouped.matrix.row_space_contains(&rp.factor_weight(i)?)? {
            Some(w) => chi_witnesses.push(w),
            None => return Ok(Compatibility::Refused(Refusal::FactorWeightOutsideRowSpace { factor: i })),
        }
    }
    Ok(Compatibility::Compatible(Box::new(CompatibilityCertificate {
        matching: matching.clone(),
        regrouped,
        chi_witnesses,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples as examples;

    fn v(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn vertex_minor_columns() {
        let lam = examples::hexagon_pair();
        let b = vertex_minor(&lam, &[0, 0]).unwrap();
        let cols = lam.matrix().columns();
        assert_eq!(b.columns(), vec![cols[0], cols[1], cols[6], cols[7]]);
        let t = examples::torus();
        let b = vertex_minor(&t, &[3]).unwrap();
        assert_eq!(b.columns(), vec![t.column(3), t.column(0)]);
        let tt = examples::torus_torus();
        for j in tt.polytope().vertices() {
            assert!(vertex_minor(&tt, &j).unwrap().det().unwrap());
        }
    }

    #[test]
    fn validation() {
        assert_eq!(validate(&examples::hexagon_pair()), Validity::Valid);
        assert_eq!(validate(&examples::torus()), Validity::Valid);
        let dup = CharMatrix::from_rows(&[4], &["1010", "1010"]).unwrap();
        assert_eq!(validate(&dup), Validity::Invalid { vertex: vec![0] });
        assert!(matches!(dup.validated(), Err(Error::NotCharacteristic { .. })));
        assert!(matches!(
            CharMatrix::from_rows(&[4], &["10101", "01010"]),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn orientability() {
        assert_eq!(orientable(&examples::torus()).unwrap(), Some(v("11")));
        assert_eq!(orientable(&examples::klein()).unwrap(), None);
        assert_eq!(orientable(&examples::hexagon_pair()).unwrap(), Some(v("0101")));
    }

    #[test]
    fn weights() {
        let p = PolygonProduct::new(&[6, 6]).unwrap();
        assert_eq!(factor_weight(&p, 0).unwrap(), v("111111000000"));
        assert_eq!(factor_weight(&p, 1).unwrap(), v("000000111111"));
        assert!(factor_weight(&p, 2).is_err());
        let p = PolygonProduct::new(&[4]).unwrap();
        assert_eq!(factor_weight(&p, 0).unwrap(), v("1111"));
        let p = PolygonProduct::new(&[4, 4]).unwrap();
        assert_eq!(opposite_pair_weights(&p, 0).unwrap(), (v("10100000"), v("01010000")));
        assert_eq!(opposite_pair_weights(&p, 1).unwrap(), (v("00001010"), v("00000101")));
        let p = PolygonProduct::new(&[6, 4]).unwrap();
        let (plus, minus) = opposite_pair_weights(&p, 1).unwrap();
        assert_eq!(plus ^ minus, factor_weight(&p, 1).unwrap());
        assert!(plus.iter_ones().all(|f| (6..10).contains(&f)));
        assert!(matches!(opposite_pair_weights(&p, 0), Err(Error::NotSquareFactor(0))));
    }

    #[test]
    fn matching_block_diagonal_and_no_squares() {
        let lam = CharMatrix::from_rows(&[4, 4], &["11110000", "10100000", "00001111", "00001010"])
            .unwrap()
            .validated()
            .unwrap();
        let m = find_square_matching(&lam).unwrap().unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert!(m.is_within_squares());
        let r = regroup(&lam, &m).unwrap();
        assert_eq!(r.colperm, (0..8).collect::<Vec<_>>());
        assert_eq!(r.matrix.matrix(), lam.matrix());

        let hex = examples::hexagon_pair();
        let m = find_square_matching(&hex).unwrap().unwrap();
        assert!(m.pairs.is_empty());
        assert_eq!(regroup(&hex, &m).unwrap().colperm, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn regroup_rejects_imperfect_matching() {
        let lam = examples::torus_torus();
        let mut m = find_square_matching(&lam).unwrap().unwrap();
        m.pairs.pop();
        assert!(matches!(regroup(&lam, &m), Err(Error::MatchingNotPerfect)));
    }

    #[test]
    fn compatibility_examples() {
        let cert = factor_compatible(&examples::hexagon_pair()).unwrap().into_certificate().unwrap();
        assert!(cert.matching.pairs.is_empty());
        assert_eq!(cert.chi_witnesses, vec![v("0100"), v("0001")]);

        let tri = CharMatrix::from_rows(&[3, 6], &["101000000", "011000000", "000111111", "000101010"])
            .unwrap()
            .validated()
            .unwrap();
        assert_eq!(
            factor_compatible(&tri).unwrap(),
            Compatibility::Refused(Refusal::OddFactor { factor: 0, sides: 3 })
        );
        assert!(factor_compatible(&examples::torus_torus()).unwrap().certificate().is_some());
        assert_eq!(
            factor_compatible(&examples::klein()).unwrap(),
            Compatibility::Refused(Refusal::NoSquareMatching)
        );
    }
}

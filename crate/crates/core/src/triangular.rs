//! Block lower-triangular normal form of a factor-compatible
//! characteristic matrix, and the tower of surface bundles it describes.
//!
//! Conventions: positions `0..n` index diagonal blocks of the output;
//! `factor_order[pos]` is the factor (of the regrouped input) placed there.

use std::collections::BTreeSet;
use std::fmt;

use crate::charmap::{CharMatrix, CompatibilityCertificate};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, SubspaceReducer};
use crate::polytope::PolygonProduct;

/// The adjacent-sum functionals `d_{i,k}` of one factor, written in
/// coordinates dual to a fixed basis of `E = row(λ) / <χ_1, ..., χ_n>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalSet {
    pub factor: usize,
    pub functionals: BTreeSet<BitVector>,
}

/// Lifted basis of `E`: rows of `λ` independent modulo the factor weights.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    pub reps: Vec<BitVector>,
    pub chi: Vec<BitVector>,
}

impl QuotientBasis {
    pub fn new(lambda: &CharMatrix) -> Result<Self> {
        let p = lambda.polytope();
        let chi = (0..p.n()).map(|i| p.factor_weight(i)).collect::<Result<Vec<_>>>()?;
        let mut reducer = SubspaceReducer::new(&chi);
        if reducer.dim() != p.n() {
            return Err(Error::Triangularization("factor weights are dependent".into()));
        }
        let mut reps = Vec::new();
        for row in lambda.matrix().rows() {
            if reducer.insert(*row) {
                reps.push(*row);
            }
        }
        if reps.len() != p.n() {
            return Err(Error::Triangularization(format!(
                "row space modulo factor weights has dimension {}, expected {}",
                reps.len(),
                p.n()
            )));
        }
        Ok(QuotientBasis { reps, chi })
    }

    /// `sum_t c_t w_t`.
    pub fn lift(&self, coords: &BitVector) -> BitVector {
        coords.iter_ones().fold(BitVector::zeros(self.chi[0].len()), |acc, t| acc ^ self.reps[t])
    }
}

/// Evaluates every `d_{i,k}` on the given representatives.
pub fn functionals_on(p: &PolygonProduct, reps: &[BitVector]) -> Vec<FunctionalSet> {
    let n = reps.len();
    (0..p.n())
        .map(|i| {
            let functionals = (0..p.sides(i))
                .map(|k| {
                    let (a, b) = (p.facet(i, k), p.facet(i, k + 1));
                    BitVector::from_indices(n, (0..n).filter(|&t| reps[t].get(a) != reps[t].get(b)))
                })
                .collect();
            FunctionalSet { factor: i, functionals }
        })
        .collect()
}

/// Functional sets of the regrouped matrix in the certificate.
pub fn functionals(cert: &CompatibilityCertificate) -> Result<Vec<FunctionalSet>> {
    let lambda = cert.matrix();
    let basis = QuotientBasis::new(lambda)?;
    Ok(functionals_on(lambda.polytope(), &basis.reps))
}

/// Output of the colored triangularization: position `pos` holds factor
/// `order[pos]` and basis vector `basis[pos]`, with
/// `D_{order[pos]} ⊂ basis[pos] + <basis[pos+1], ...>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredBasis {
    pub order: Vec<usize>,
    pub basis: Vec<BitVector>,
}

fn check_transversals(sets: &[FunctionalSet], n: usize) -> Result<()> {
    fn walk(sets: &[FunctionalSet], k: usize, acc: &mut SubspaceReducer, chosen: &mut Vec<BitVector>) -> Result<()> {
        if k == sets.len() {
            return Ok(());
        }
        for f in &sets[k].functionals {
            let mut next = acc.clone();
            if !next.insert(*f) {
                chosen.push(*f);
                let text: Vec<String> = chosen.iter().map(|v| v.to_string()).collect();
                return Err(Error::Triangularization(format!("dependent transversal [{}]", text.join(", "))));
            }
            chosen.push(*f);
            walk(sets, k + 1, &mut next, chosen)?;
            chosen.pop();
        }
        Ok(())
    }
    for s in sets {
        if s.functionals.iter().any(|f| f.is_zero() || f.len() != n) {
            return Err(Error::Triangularization(format!("factor {} has a zero functional", s.factor + 1)));
        }
    }
    walk(sets, 0, &mut SubspaceReducer::empty(n), &mut Vec::new())
}

/// Repeatedly picks a factor whose functionals collapse to one class
/// modulo the vectors chosen so far, filling positions from the back.
/// Factors are scanned from the highest index down, so an input that is
/// already triangular keeps its order.
pub fn colored_triangularize(sets: &[FunctionalSet]) -> Result<ColoredBasis> {
    let n = sets.len();
    check_transversals(sets, n)?;
    let mut chosen = SubspaceReducer::empty(n);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = vec![0; n];
    let mut basis = vec![BitVector::zeros(n); n];
    for pos in (0..n).rev() {
        let pick = remaining.iter().rev().copied().find_map(|k| {
            let classes: BTreeSet<BitVector> = sets[k].functionals.iter().map(|f| chosen.reduce(f)).collect();
            (classes.len() == 1).then(|| (k, *classes.iter().next().unwrap()))
        });
        let Some((k, eps)) = pick else {
            let state: Vec<String> = remaining
                .iter()
                .map(|&k| {
                    let classes: BTreeSet<String> =
                        sets[k].functionals.iter().map(|f| chosen.reduce(f).to_string()).collect();
                    format!("factor {}: {{{}}}", sets[k].factor + 1, classes.into_iter().collect::<Vec<_>>().join(", "))
                })
                .collect();
            return Err(Error::Triangularization(format!("no singleton class; {}", state.join("; "))));
        };
        remaining.retain(|&r| r != k);
        order[pos] = sets[k].factor;
        basis[pos] = eps;
        chosen.insert(eps);
    }
    Ok(ColoredBasis { order, basis })
}

/// One stage of the tower: an orientable surface over a polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub position: usize,
    /// Factor index in the (regrouped) input.
    pub factor: usize,
    pub sides: usize,
    pub genus: usize,
    pub block: BitMatrix,
}

#[derive(Clone, Debug)]
pub struct TriangularForm {
    pub factor_order: Vec<usize>,
    /// `result column k = original column colperm[k]`.
    pub colperm: Vec<usize>,
    /// `result = u · (original with columns permuted)`.
    pub u: BitMatrix,
    pub result: CharMatrix,
    pub tower: Vec<Fiber>,
}

/// Builds the block lower-triangular form from a compatibility certificate.
pub fn blockize(cert: &CompatibilityCertificate) -> Result<TriangularForm> {
    let lambda = cert.matrix();
    let p = lambda.polytope();
    let n = p.n();
    let basis = QuotientBasis::new(lambda)?;
    let colored = colored_triangularize(&functionals_on(p, &basis.reps))?;

    let eps = BitMatrix::new(colored.basis.clone(), n)?;
    let inv = eps.inverse().ok_or_else(|| Error::Triangularization("colored basis is singular".into()))?;

    let mut rows = Vec::with_capacity(2 * n);
    for pos in 0..n {
        let mut eta = basis.lift(&inv.column(pos));
        for &later in &colored.order[pos + 1..] {
            let o = p.offset(later);
            let block = eta.slice(o, p.sides(later));
            if block.weight() as usize == p.sides(later) {
                eta ^= basis.chi[later];
            } else if !block.is_zero() {
                return Err(Error::Triangularization(format!(
                    "lift for position {} is not constant on factor {}",
                    pos + 1,
                    later + 1
                )));
            }
        }
        rows.push(basis.chi[colored.order[pos]]);
        rows.push(eta);
    }

    let transform = BitMatrix::new(
        rows.iter()
            .map(|r| {
                lambda.matrix().row_space_contains(r)?.ok_or_else(|| {
                    Error::Triangularization("constructed row outside the row space".into())
                })
            })
            .collect::<Result<Vec<_>>>()?,
        2 * n,
    )?;

    let factor_cols: Vec<usize> =
        colored.order.iter().flat_map(|&f| p.offset(f)..p.offset(f) + p.sides(f)).collect();
    let colperm: Vec<usize> = factor_cols.iter().map(|&k| cert.regrouped.colperm[k]).collect();
    let sides: Vec<usize> = colored.order.iter().map(|&f| p.sides(f)).collect();
    let matrix = BitMatrix::new(rows.iter().map(|r| r.permute(&factor_cols)).collect(), p.m())?;
    let result = CharMatrix::new(PolygonProduct::new(&sides)?, matrix)?.validated()?;

    let mut form = TriangularForm { factor_order: colored.order, colperm, u: transform, result, tower: Vec::new() };
    form.tower = bundle_tower(&form)?;
    Ok(form)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    NotPermutation,
    SingularTransform,
    TransformMismatch,
    RowSpaceChanged,
    NonzeroBlock { row_block: usize, col_block: usize },
    FirstRowNotOnes { block: usize },
    SingularPair { block: usize, edge: usize },
    Tower { position: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "shape: {s}"),
            Violation::NotPermutation => write!(f, "column map is not a permutation"),
            Violation::SingularTransform => write!(f, "row transform is singular"),
            Violation::TransformMismatch => write!(f, "result differs from transform times permuted input"),
            Violation::RowSpaceChanged => write!(f, "row space differs from permuted input"),
            Violation::NonzeroBlock { row_block, col_block } => {
                write!(f, "block ({}, {}) above the diagonal is nonzero", row_block + 1, col_block + 1)
            }
            Violation::FirstRowNotOnes { block } => write!(f, "diagonal block {} has first row not all ones", block + 1),
            Violation::SingularPair { block, edge } => write!(
                f,
                "diagonal block {}: columns {} and {} are not a basis",
                block + 1,
                edge + 1,
                edge + 2
            ),
            Violation::Tower { position } => write!(f, "tower entry {} is inconsistent", position + 1),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockReport {
    pub violations: Vec<Violation>,
}

impl BlockReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn diagonal_block(m: &BitMatrix, p: &PolygonProduct, pos: usize) -> BitMatrix {
    let o = p.offset(pos);
    let rows = [m.row(2 * pos).slice(o, p.sides(pos)), m.row(2 * pos + 1).slice(o, p.sides(pos))];
    BitMatrix::new(rows.to_vec(), p.sides(pos)).expect("two rows of equal length")
}

fn block_shape_violations(m: &BitMatrix, p: &PolygonProduct) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = p.n();
    for i in 0..n {
        for j in i + 1..n {
            let (o, len) = (p.offset(j), p.sides(j));
            if !m.row(2 * i).slice(o, len).is_zero() || !m.row(2 * i + 1).slice(o, len).is_zero() {
                out.push(Violation::NonzeroBlock { row_block: i, col_block: j });
            }
        }
        let block = diagonal_block(m, p, i);
        if block.row(0).weight() as usize != p.sides(i) {
            out.push(Violation::FirstRowNotOnes { block: i });
        }
        for k in 0..p.sides(i) {
            let pair = block.select_columns(&[k, (k + 1) % p.sides(i)]);
            if pair.rank() != 2 {
                out.push(Violation::SingularPair { block: i, edge: k });
            }
        }
    }
    out
}

/// Checks every property of the normal form against the input matrix.
pub fn verify_blockform(form: &TriangularForm, original: &CharMatrix) -> BlockReport {
    let mut violations = Vec::new();
    let op = original.polytope();
    let rp = form.result.polytope();
    let m = op.m();
    let n = op.n();
    let expected: Vec<usize> = form.factor_order.iter().map(|&f| op.sides(f)).collect();
    let mut order_sorted = form.factor_order.clone();
    order_sorted.sort_unstable();
    if order_sorted != (0..n).collect::<Vec<_>>() || rp.factors() != expected.as_slice() {
        violations.push(Violation::Shape("factor order does not match the result polytope".into()));
        return BlockReport { violations };
    }
    let mut cols = form.colperm.clone();
    cols.sort_unstable();
    if cols != (0..m).collect::<Vec<_>>() {
        violations.push(Violation::NotPermutation);
        return BlockReport { violations };
    }
    if form.u.nrows() != 2 * n || form.u.ncols() != 2 * n || form.result.matrix().nrows() != 2 * n {
        violations.push(Violation::Shape("transform or result has the wrong size".into()));
        return BlockReport { violations };
    }
    let permuted = original.matrix().select_columns(&form.colperm);
    if form.u.inverse().is_none() {
        violations.push(Violation::SingularTransform);
    }
    match form.u.mul(&permuted) {
        Ok(prod) if &prod == form.result.matrix() => {}
        _ => violations.push(Violation::TransformMismatch),
    }
    if permuted.rref().reduced != form.result.matrix().rref().reduced {
        violations.push(Violation::RowSpaceChanged);
    }
    violations.extend(block_shape_violations(form.result.matrix(), rp));
    if form.tower.len() != n {
        violations.push(Violation::Tower { position: form.tower.len().min(n) });
    }
    for (pos, fiber) in form.tower.iter().enumerate() {
        let ok = fiber.position == pos
            && fiber.factor == form.factor_order[pos]
            && fiber.sides == rp.sides(pos)
            && 2 * fiber.genus + 2 == fiber.sides
            && fiber.block == diagonal_block(form.result.matrix(), rp, pos);
        if !ok {
            violations.push(Violation::Tower { position: pos });
        }
    }
    BlockReport { violations }
}

/// Reads the surface fibers off the diagonal blocks.
pub fn bundle_tower(form: &TriangularForm) -> Result<Vec<Fiber>> {
    let m = form.result.matrix();
    let p = form.result.polytope();
    if let Some(v) = block_shape_violations(m, p).first() {
        return Err(Error::UnverifiedForm(v.to_string()));
    }
    (0..p.n())
        .map(|pos| {
            let block = diagonal_block(m, p, pos);
            let sides = p.sides(pos);
            let ones = BitVector::ones(sides);
            if block.row_space_contains(&ones)?.is_none() || !sides.is_multiple_of(2) {
                return Err(Error::UnverifiedForm(format!("fiber {} is not orientable", pos + 1)));
            }
            Ok(Fiber { position: pos, factor: form.factor_order[pos], sides, genus: (sides - 2) / 2, block })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charmap::factor_compatible;
    use crate::samples;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn cert(lambda: &CharMatrix) -> CompatibilityCertificate {
        factor_compatible(lambda).unwrap().into_certificate().unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<BitVector> {
        items.iter().map(|s| bv(s)).collect()
    }

    #[test]
    fn functionals_of_hexagon_pair() {
        let d = functionals(&cert(&samples::hexagon_pair())).unwrap();
        assert_eq!(d[0].functionals, set(&["10"]));
        assert_eq!(d[1].functionals, set(&["11", "01"]));
    }

    #[test]
    fn functionals_ignore_representatives() {
        let lam = samples::hexagon_pair();
        let q = QuotientBasis::new(&lam).unwrap();
        let shifted = vec![q.reps[0] ^ q.chi[0] ^ q.chi[1], q.reps[1] ^ q.chi[1]];
        assert_eq!(functionals_on(lam.polytope(), &q.reps), functionals_on(lam.polytope(), &shifted));
    }

    #[test]
    fn functionals_of_torus_pair_and_single_factor() {
        let d = functionals(&cert(&samples::torus_torus())).unwrap();
        assert_eq!(d[0].functionals, set(&["10"]));
        assert_eq!(d[1].functionals, set(&["01"]));
        let d = functionals(&cert(&samples::torus())).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].functionals, set(&["1"]));
    }

    #[test]
    fn colored_basis_of_hexagon_pair() {
        let d = functionals(&cert(&samples::hexagon_pair())).unwrap();
        let c = colored_triangularize(&d).unwrap();
        assert_eq!(c.order, vec![1, 0]);
        assert_eq!(c.basis, vec![bv("01"), bv("10")]);
        // Containment property.
        for (pos, &f) in c.order.iter().enumerate() {
            let later = SubspaceReducer::new(&c.basis[pos + 1..]);
            for g in &d[f].functionals {
                assert_eq!(later.reduce(&(*g ^ c.basis[pos])), BitVector::zeros(2));
            }
        }
    }

    #[test]
    fn colored_failure_is_reported() {
        let sets = vec![
            FunctionalSet { factor: 0, functionals: set(&["10", "11"]) },
            FunctionalSet { factor: 1, functionals: set(&["01", "11"]) },
        ];
        // {11, 11} is a dependent transversal.
        assert!(matches!(colored_triangularize(&sets), Err(Error::Triangularization(_))));
        let sets = vec![
            FunctionalSet { factor: 0, functionals: set(&["10", "00"]) },
            FunctionalSet { factor: 1, functionals: set(&["01"]) },
        ];
        assert!(colored_triangularize(&sets).is_err());
    }

    #[test]
    fn blockize_hexagon_pair() {
        let lam = samples::hexagon_pair();
        let form = blockize(&cert(&lam)).unwrap();
        assert_eq!(form.factor_order, vec![1, 0]);
        let expected = BitMatrix::parse_rows(&["111111000000", "101010000000", "000000111111", "101000101010"]).unwrap();
        assert_eq!(form.result.matrix(), &expected);
        assert_eq!(form.colperm, (6..12).chain(0..6).collect::<Vec<_>>());
        assert!(verify_blockform(&form, &lam).is_ok());
        let genera: Vec<usize> = form.tower.iter().map(|f| f.genus).collect();
        assert_eq!(genera, vec![2, 2]);
    }

    #[test]
    fn blockize_keeps_triangular_input() {
        for lam in [samples::torus_torus(), samples::torus()] {
            let form = blockize(&cert(&lam)).unwrap();
            assert_eq!(form.colperm, (0..lam.polytope().m()).collect::<Vec<_>>());
            assert!(verify_blockform(&form, &lam).is_ok());
            assert!(form.tower.iter().all(|f| f.genus == 1));
            assert_eq!(form.result.matrix().row(0), &BitVector::from_word(lam.polytope().m(), 0b1111));
        }
        let form = blockize(&cert(&samples::torus_torus())).unwrap();
        assert_eq!(form.result.matrix().rref().reduced, samples::torus_torus().matrix().rref().reduced);
    }

    #[test]
    fn identity_form_verifies() {
        let lam = CharMatrix::from_rows(&[4, 6], &["1111000000", "1010000000", "0000111111", "1000101010"])
            .unwrap()
            .validated()
            .unwrap();
        let mut form = TriangularForm {
            factor_order: vec![0, 1],
            colperm: (0..10).collect(),
            u: BitMatrix::identity(4),
            result: lam.clone(),
            tower: Vec::new(),
        };
        form.tower = bundle_tower(&form).unwrap();
        assert!(verify_blockform(&form, &lam).is_ok());
        let built = blockize(&cert(&lam)).unwrap();
        assert_eq!(built.colperm, form.colperm);
        assert!(verify_blockform(&built, &lam).is_ok());
    }

    #[test]
    fn corrupted_form_is_caught() {
        let lam = samples::hexagon_pair();
        let mut form = blockize(&cert(&lam)).unwrap();
        let mut m = form.result.matrix().clone();
        // Second row of the first diagonal block, column 3.
        m.set(1, 2, !m.get(1, 2));
        form.result = form.result.with_matrix(m).unwrap();
        let report = verify_blockform(&form, &lam);
        assert!(report.violations.contains(&Violation::SingularPair { block: 0, edge: 1 }));
        assert!(report.violations.contains(&Violation::SingularPair { block: 0, edge: 2 }));
        assert!(report.violations.contains(&Violation::TransformMismatch));
        assert!(bundle_tower(&form).is_err());
    }

    #[test]
    fn tower_over_square_hexagon_octagon() {
        let rows = [
            "111100000000000000",
            "101000000000000000",
            "000011111100000000",
            "000010101000000000",
            "000000000011111111",
            "000000000010101010",
        ];
        let base = CharMatrix::from_rows(&[4, 6, 8], &rows).unwrap().validated().unwrap();
        // Scramble with an invertible row operation.
        let u = BitMatrix::parse_rows(&["110000", "010000", "001001", "000100", "101010", "000001"]).unwrap();
        let mixed = base.with_matrix(u.mul(base.matrix()).unwrap()).unwrap().validated().unwrap();
        let form = blockize(&cert(&mixed)).unwrap();
        assert!(verify_blockform(&form, &mixed).is_ok());
        let genera: Vec<usize> = form.tower.iter().map(|f| f.genus).collect();
        assert_eq!(genera, vec![1, 2, 3]);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn principal_minors_force_unitriangular_form() {
        for n in 1..=5usize {
            let offdiag: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
            let perms = permutations(n);
            let subsets: Vec<Vec<usize>> =
                (1u32..1 << n).map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect()).collect();
            let mut count = 0u64;
            for bits in 0u64..1 << offdiag.len() {
                let mut a = BitMatrix::identity(n);
                for (k, &(i, j)) in offdiag.iter().enumerate() {
                    a.set(i, j, bits >> k & 1 == 1);
                }
                let all_minors = subsets.iter().all(|s| {
                    let rows: Vec<BitVector> = s.iter().map(|&i| a.row(i).permute(s)).collect();
                    BitMatrix::new(rows, s.len()).unwrap().det().unwrap()
                });
                if !all_minors {
                    continue;
                }
                count += 1;
                let found = perms.iter().any(|p| (0..n).all(|i| (0..i).all(|j| !a.get(p[i], p[j]))));
                assert!(found, "no unitriangular ordering for {a:?}");
            }
            // Unitriangular matrices up to simultaneous permutation; at least
            // the upper unitriangular ones are present.
            assert!(count >= 1 << (n * (n - 1) / 2));
        }
    }
}

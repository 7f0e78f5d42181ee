use proptest::prelude::*;
use smallcover::betti::{h_vector_oracle, mod2_betti, small_cover_betti};
use smallcover::charmap::{all_square_matchings, certify, factor_compatible, orientable, validate, Refusal};
use smallcover::enumerate::enumerate_charmaps;
use smallcover::hodge::{hodge_from_certificate, poincare_from_hodge, recover_t_from_poincare};
use smallcover::obstruct::{all_odd_obstruction, det_sum_identity, even_sides_consistency, triangle_obstruction};
use smallcover::polytope::{rz_poincare, rz_poincare_exhaustive};
use smallcover::triangular::{blockize, verify_blockform};
use smallcover::{samples, BitMatrix, BitVector, CharMatrix, Compatibility, PolygonProduct, Validity};

fn classes(factors: &[usize]) -> Vec<CharMatrix> {
    enumerate_charmaps(&PolygonProduct::new(factors).unwrap(), 4).unwrap()
}

#[test]
fn odd_products_are_never_orientable() {
    for f in [[3, 3], [3, 5], [5, 5]] {
        let all = classes(&f);
        assert!(!all.is_empty());
        for l in &all {
            assert!(orientable(l).unwrap().is_none(), "{f:?}");
            assert!(det_sum_identity(l).unwrap());
            all_odd_obstruction(l).unwrap();
        }
    }
}

#[test]
fn det_sum_is_product_parity() {
    for f in [&[4, 4][..], &[3, 4], &[6], &[5], &[3, 3]] {
        let parity = f.iter().product::<usize>() % 2 == 1;
        for l in classes(f) {
            assert_eq!(det_sum_identity(&l).unwrap(), parity, "{f:?}");
        }
    }
}

#[test]
fn triangle_factors_always_refuse() {
    for f in [[3, 4], [3, 6], [4, 3]] {
        let p = PolygonProduct::new(&f).unwrap();
        let t = triangle_obstruction(&p).unwrap();
        for l in classes(&f) {
            match factor_compatible(&l).unwrap() {
                Compatibility::Refused(Refusal::OddFactor { factor, sides: 3 }) => assert_eq!(factor, t),
                other => panic!("{f:?}: {other:?}"),
            }
            let parity = even_sides_consistency(&l).unwrap();
            assert!(!parity[t].weight_in_row_space);
        }
    }
}

#[test]
fn mod2_betti_counts_vertices() {
    for f in [&[4, 4][..], &[3, 4], &[5]] {
        let p = PolygonProduct::new(f).unwrap();
        let h = h_vector_oracle(&p);
        assert_eq!(h.total() as usize, p.vertex_count());
        for l in classes(f) {
            assert_eq!(mod2_betti(&l).unwrap(), h);
        }
    }
}

#[test]
fn compatible_classes_over_two_squares() {
    let mut compatible = 0;
    for l in classes(&[4, 4]) {
        let Compatibility::Compatible(cert) = factor_compatible(&l).unwrap() else {
            continue;
        };
        compatible += 1;
        assert_eq!(validate(cert.matrix()), Validity::Valid);
        let h = hodge_from_certificate(&cert).unwrap();
        assert!(h.polynomial.satisfies_symmetries());
        let b = small_cover_betti(&l).unwrap();
        assert_eq!(poincare_from_hodge(&h.polynomial), b);
        assert_eq!(recover_t_from_poincare(&b, 2).unwrap(), h.big_t);
        let form = blockize(&cert).unwrap();
        let report = verify_blockform(&form, &l);
        assert!(report.is_ok(), "{:?}", report.violations);
    }
    assert!(compatible > 0);
}

#[test]
fn hodge_is_independent_of_the_pairing() {
    let mut multi = 0;
    for l in classes(&[4, 4]) {
        let mut seen = Vec::new();
        for m in all_square_matchings(&l).unwrap() {
            if let Compatibility::Compatible(cert) = certify(&l, &m).unwrap() {
                seen.push(hodge_from_certificate(&cert).unwrap().polynomial);
            }
        }
        if seen.len() >= 2 {
            multi += 1;
            assert!(seen.windows(2).all(|w| w[0] == w[1]));
        }
    }
    assert!(multi > 0);
}

#[test]
fn regrouped_matrices_stay_valid() {
    for l in classes(&[4, 4]) {
        for m in all_square_matchings(&l).unwrap() {
            // Regrouping along a perfect matching is a symmetry of the cube.
            certify(&l, &m).unwrap();
        }
    }
}

#[test]
fn hochster_product_small_lists() {
    for f in [&[3][..], &[4], &[7], &[3, 3], &[4, 5], &[3, 3, 3]] {
        let p = PolygonProduct::new(f).unwrap();
        assert_eq!(rz_poincare(&p).unwrap(), rz_poincare_exhaustive(&p).unwrap(), "{f:?}");
    }
}

fn elementary_ops(dim: usize, ops: &[(usize, usize)]) -> BitMatrix {
    let mut u = BitMatrix::identity(dim);
    for &(a, b) in ops {
        let (a, b) = (a % dim, b % dim);
        if a != b {
            let row = *u.row(a) ^ *u.row(b);
            let mut rows = u.rows().to_vec();
            rows[a] = row;
            u = BitMatrix::new(rows, dim).unwrap();
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_survive_row_operations(ops in prop::collection::vec((0usize..4, 0usize..4), 0..12), pick in 0usize..3) {
        let base = [samples::hexagon_pair(), samples::torus_torus(), samples::klein()][pick].clone();
        let dim = base.matrix().nrows();
        let u = elementary_ops(dim, &ops);
        let moved = base.with_matrix(u.mul(base.matrix()).unwrap()).unwrap().validated().unwrap();
        prop_assert_eq!(orientable(&moved).unwrap().is_some(), orientable(&base).unwrap().is_some());
        prop_assert_eq!(small_cover_betti(&moved).unwrap(), small_cover_betti(&base).unwrap());
        let a = factor_compatible(&moved).unwrap().certificate().is_some();
        prop_assert_eq!(a, factor_compatible(&base).unwrap().certificate().is_some());
        if a {
            let c = factor_compatible(&moved).unwrap().into_certificate().unwrap();
            let d = factor_compatible(&base).unwrap().into_certificate().unwrap();
            prop_assert_eq!(
                hodge_from_certificate(&c).unwrap().polynomial,
                hodge_from_certificate(&d).unwrap().polynomial
            );
            let form = blockize(&c).unwrap();
            prop_assert!(verify_blockform(&form, &moved).is_ok());
        }
    }

    #[test]
    fn flipping_a_bit_is_caught_by_some_vertex(row in 0usize..4, col in 0usize..12) {
        let l = samples::hexagon_pair();
        let mut m = l.matrix().clone();
        m.set(row, col, !m.get(row, col));
        let flipped = l.with_matrix(m).unwrap();
        // Either still valid with the same mod-2 Betti numbers, or a vertex fails.
        match validate(&flipped) {
            Validity::Valid => prop_assert_eq!(mod2_betti(&flipped.validated().unwrap()).unwrap(), [1, 8, 18, 8, 1]),
            Validity::Invalid { vertex } => {
                let facets = flipped.polytope().vertex_facets(&vertex).unwrap();
                prop_assert!(facets.contains(&col));
            }
            Validity::Unchecked => prop_assert!(false),
        }
    }
}

#[test]
fn orientability_witness_reproduces_all_ones() {
    for l in classes(&[4, 4]) {
        if let Some(w) = orientable(&l).unwrap() {
            assert_eq!(l.matrix().combine_rows(&w).unwrap(), BitVector::ones(8));
        }
    }
}

//! The mod-2 cohomology ring `Z_2[v_1..v_m] / (I_P + J_λ)` of a small cover
//! over a product of polygons, computed degree by degree.
//!
//! The linear relations are used to eliminate one variable per pivot column
//! of the reduced row echelon form of λ; the remaining variables are free.
//! Each Stanley–Reisner generator is rewritten in the free variables, and the
//! ideal in degree `d` is spanned by the generators times all monomials of
//! the complementary degree. Normal forms are taken against an echelon basis
//! of that span, so the non-pivot monomials form a basis of the quotient.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::charmap::CharMatrix;
use crate::error::Result;

/// Exponent vector over the free variables.
pub type Monomial = Vec<u8>;

/// A polynomial over GF(2): a set of monomials with symmetric-difference addition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeSet<Monomial>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(m);
        p
    }

    /// The linear form `sum of x_k` over the given variables.
    pub fn linear(nvars: usize, vars: &[usize]) -> Self {
        let mut p = Poly::zero();
        for &k in vars {
            let mut m = vec![0; nvars];
            m[k] = 1;
            p.toggle(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let terms = self.terms.symmetric_difference(&other.terms).cloned().collect();
        Poly { terms }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        out
    }

    /// `Sq^1` extended from `Sq^1(x) = x^2` on degree-one classes by the
    /// Cartan formula: on a monomial it multiplies by the sum of the
    /// variables that carry an odd exponent.
    pub fn sq1(&self) -> Poly {
        let mut out = Poly::zero();
        for m in &self.terms {
            for (k, &e) in m.iter().enumerate() {
                if e % 2 == 1 {
                    let mut t = m.clone();
                    t[k] += 1;
                    out.toggle(t);
                }
            }
        }
        out
    }
}

/// Dense GF(2) vector of arbitrary length.
#[derive(Clone, Debug, PartialEq, Eq)]
struct WideBits {
    words: Vec<u64>,
}

impl WideBits {
    fn zeros(len: usize) -> Self {
        WideBits { words: vec![0; len.div_ceil(64)] }
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    fn xor(&mut self, other: &WideBits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| 64 * k + w.trailing_zeros() as usize)
    }
}

/// Echelon basis keyed by pivot.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: BTreeMap<usize, WideBits>,
}

impl Echelon {
    fn reduce(&self, v: &mut WideBits) {
        for (&p, row) in &self.rows {
            if v.get(p) {
                v.xor(row);
            }
        }
    }

    fn insert(&mut self, mut v: WideBits) -> bool {
        self.reduce(&mut v);
        match v.leading() {
            Some(p) => {
                self.rows.insert(p, v);
                true
            }
            None => false,
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// All monomials of degree `d` in `nvars` variables, in lexicographic order.
fn monomials(nvars: usize, d: usize) -> Vec<Monomial> {
    fn rec(k: usize, left: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if k + 1 == cur.len() {
            cur[k] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[k] = e as u8;
            rec(k + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut vec![0; nvars], &mut out);
    out
}

#[derive(Clone, Debug)]
struct Degree {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    relations: Echelon,
    /// Monomial indices that are not pivots of the relation span.
    standard: Vec<usize>,
    standard_pos: HashMap<usize, usize>,
}

/// Standard monomials spanning one graded piece of the quotient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    pub degree: usize,
    pub monomials: Vec<Monomial>,
}

/// Truncated presentation of the mod-2 cohomology ring up to the top degree.
#[derive(Clone, Debug)]
pub struct FaceRing {
    nvars: usize,
    /// Facet index of each free variable.
    free_facets: Vec<usize>,
    /// Each facet's variable as a linear form in the free variables.
    substitution: Vec<Poly>,
    generators: Vec<Poly>,
    degrees: Vec<Degree>,
}

impl FaceRing {
    /// Builds the ring for a characteristic matrix, in degrees `0..=2n`.
    pub fn new(lambda: &CharMatrix) -> Result<Self> {
        lambda.require_valid()?;
        let p = lambda.polytope();
        let m = p.m();
        let rref = lambda.matrix().rref();
        let mut is_pivot = vec![None; m];
        for (r, &c) in rref.pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let free_facets: Vec<usize> = (0..m).filter(|&c| is_pivot[c].is_none()).collect();
        let nvars = free_facets.len();
        let var_of: HashMap<usize, usize> = free_facets.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let substitution: Vec<Poly> = (0..m)
            .map(|c| match is_pivot[c] {
                None => Poly::linear(nvars, &[var_of[&c]]),
                Some(r) => {
                    let row = rref.reduced.row(r);
                    let vars: Vec<usize> = free_facets
                        .iter()
                        .enumerate()
                        .filter(|(_, &f)| row.get(f))
                        .map(|(k, _)| k)
                        .collect();
                    Poly::linear(nvars, &vars)
                }
            })
            .collect();

        let mut generators = Vec::new();
        for i in 0..p.n() {
            let s = p.sides(i);
            if s == 3 {
                // The three edges of a triangle pairwise meet but have no common point.
                let g = (0..3).fold(Poly::monomial(vec![0; nvars]), |acc, j| {
                    acc.mul(&substitution[p.facet(i, j)])
                });
                generators.push(g);
                continue;
            }
            for a in 0..s {
                for b in a + 2..s {
                    if a == 0 && b == s - 1 {
                        continue;
                    }
                    generators.push(substitution[p.facet(i, a)].mul(&substitution[p.facet(i, b)]));
                }
            }
        }
        let generators: Vec<Poly> = generators.into_iter().filter(|g| !g.is_zero()).collect();

        let mut ring = FaceRing { nvars, free_facets, substitution, generators, degrees: Vec::new() };
        for d in 0..=p.dim() + 1 {
            let deg = ring.build_degree(d);
            ring.degrees.push(deg);
        }
        Ok(ring)
    }

    fn build_degree(&self, d: usize) -> Degree {
        let monos = monomials(self.nvars, d);
        let index: HashMap<Monomial, usize> = monos.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        let mut relations = Echelon::default();
        for g in &self.generators {
            let gd = g.terms().next().map_or(0, |t| t.iter().map(|&e| e as usize).sum());
            if gd > d {
                continue;
            }
            for mult in monomials(self.nvars, d - gd) {
                let prod = g.mul(&Poly::monomial(mult));
                let mut v = WideBits::zeros(monos.len());
                for t in prod.terms() {
                    v.flip(index[t]);
                }
                relations.insert(v);
            }
        }
        let standard: Vec<usize> = (0..monos.len()).filter(|k| !relations.rows.contains_key(k)).collect();
        let standard_pos = standard.iter().enumerate().map(|(pos, &k)| (k, pos)).collect();
        Degree { monomials: monos, index, relations, standard, standard_pos }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Facet index of each free variable.
    pub fn free_facets(&self) -> &[usize] {
        &self.free_facets
    }

    /// The class of facet `f` as a polynomial in the free variables.
    pub fn facet_class(&self, f: usize) -> &Poly {
        &self.substitution[f]
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn top_degree(&self) -> usize {
        self.degrees.len() - 2
    }

    /// Dimension of the quotient in degree `d` (zero above the computed range).
    pub fn dim(&self, d: usize) -> usize {
        self.degrees.get(d).map_or(0, |g| g.standard.len())
    }

    pub fn standard_basis(&self, d: usize) -> MonomialBasis {
        let g = &self.degrees[d];
        MonomialBasis {
            degree: d,
            monomials: g.standard.iter().map(|&k| g.monomials[k].clone()).collect(),
        }
    }

    fn to_wide(&self, d: usize, p: &Poly) -> WideBits {
        let g = &self.degrees[d];
        let mut v = WideBits::zeros(g.monomials.len());
        for t in p.terms() {
            let deg: usize = t.iter().map(|&e| e as usize).sum();
            assert_eq!(deg, d, "polynomial is not homogeneous of degree {d}");
            v.flip(g.index[t]);
        }
        v
    }

    /// Canonical representative of a homogeneous polynomial of degree `d`:
    /// a combination of standard monomials.
    pub fn normal_form(&self, d: usize, p: &Poly) -> Poly {
        let g = &self.degrees[d];
        let mut v = self.to_wide(d, p);
        g.relations.reduce(&mut v);
        let mut out = Poly::zero();
        for &k in &g.standard {
            if v.get(k) {
                out.toggle(g.monomials[k].clone());
            }
        }
        out
    }

    /// True if the homogeneous polynomial lies in the ideal.
    pub fn in_ideal(&self, d: usize, p: &Poly) -> bool {
        self.normal_form(d, p).is_zero()
    }

    /// Graded dimensions in degrees `0..=2n`.
    pub fn dims(&self) -> Vec<u64> {
        (0..=self.top_degree()).map(|d| self.dim(d) as u64).collect()
    }

    /// Rank of `Sq^1` from degree `d` to degree `d + 1`.
    pub fn sq1_rank(&self, d: usize) -> usize {
        if d + 1 >= self.degrees.len() {
            return 0;
        }
        let (src, dst) = (&self.degrees[d], &self.degrees[d + 1]);
        let mut image = Echelon::default();
        for &k in &src.standard {
            let img = Poly::monomial(src.monomials[k].clone()).sq1();
            let mut v = self.to_wide(d + 1, &img);
            dst.relations.reduce(&mut v);
            let mut coords = WideBits::zeros(dst.standard.len());
            for &j in &dst.standard {
                if v.get(j) {
                    coords.flip(dst.standard_pos[&j]);
                }
            }
            image.insert(coords);
        }
        image.rank()
    }

    /// `dim ker Sq^1 - dim im Sq^1` in each degree `0..=2n`.
    pub fn sq1_homology(&self) -> Vec<u64> {
        let top = self.top_degree();
        let ranks: Vec<usize> = (0..=top).map(|d| self.sq1_rank(d)).collect();
        (0..=top)
            .map(|d| {
                let incoming = if d == 0 { 0 } else { ranks[d - 1] };
                (self.dim(d) - ranks[d] - incoming) as u64
            })
            .collect()
    }
}

//! Characters of `G = ker λ`, their multiplicities in the holomorphic
//! one-forms of each curve factor, and the Hodge polynomial of the
//! projective model of a factor-compatible small cover.
//!
//! A character is keyed by the canonical representative of its coset
//! `u + row(λ)`; no isomorphism `Ĝ ≅ Z_2^{m-2n}` is ever chosen.

use std::collections::BTreeMap;
use std::fmt;

use crate::betti::GradedDims;
use crate::charmap::{factor_compatible, CharMatrix, CompatibilityCertificate};
use crate::error::{Error, Result};
use crate::gf2::{span, BitVector, SubspaceReducer};
use crate::polytope::{factor_reduced_betti, genus, MAX_ENUMERATED_SIDES};

/// Above this group order the averaging cross-check of `t_S` is skipped.
pub const MAX_AVERAGED_GROUP_BITS: usize = 20;

/// A character of `G`, i.e. a coset of `row(λ)` in `Z_2^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterClass {
    rep: BitVector,
}

impl CharacterClass {
    pub fn rep(&self) -> &BitVector {
        &self.rep
    }

    pub fn is_trivial(&self) -> bool {
        self.rep.is_zero()
    }
}

impl fmt::Display for CharacterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// The character group `Z_2^m / row(λ)` of one characteristic matrix.
#[derive(Clone, Debug)]
pub struct Characters {
    rows: SubspaceReducer,
}

impl Characters {
    pub fn new(lambda: &CharMatrix) -> Self {
        Characters { rows: lambda.row_space() }
    }

    pub fn class_of(&self, u: &BitVector) -> CharacterClass {
        CharacterClass { rep: self.rows.reduce(u) }
    }

    pub fn trivial(&self) -> CharacterClass {
        CharacterClass { rep: BitVector::zeros(self.rows.basis().first().map_or(0, BitVector::len)) }
    }

    pub fn sum(&self, a: &CharacterClass, b: &CharacterClass) -> CharacterClass {
        self.class_of(&(a.rep ^ b.rep))
    }
}

/// The character `ε_u` restricted to `G`.
pub fn character_of(lambda: &CharMatrix, u: &BitVector) -> Result<CharacterClass> {
    lambda.require_valid()?;
    if u.len() != lambda.polytope().m() {
        return Err(Error::LengthMismatch { expected: lambda.polytope().m(), found: u.len() });
    }
    Ok(Characters::new(lambda).class_of(u))
}

/// Multiplicities `a_{i,ρ}` of the characters in `H^{1,0}` of curve `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityTable {
    pub factor: usize,
    /// Every character represented by some edge subset of the factor,
    /// including those with multiplicity zero.
    pub entries: BTreeMap<CharacterClass, u64>,
    pub genus: u64,
}

impl MultiplicityTable {
    pub fn get(&self, rho: &CharacterClass) -> u64 {
        self.entries.get(rho).copied().unwrap_or(0)
    }

    fn nonzero(&self) -> impl Iterator<Item = (&CharacterClass, u64)> {
        self.entries.iter().filter(|(_, &a)| a > 0).map(|(c, &a)| (c, a))
    }
}

/// Groups the edge subsets of factor `i` by character and halves the sum
/// of `d_i(u)` (components minus one) over each group. The matrix must be
/// the regrouped one when square factors were re-paired.
pub fn multiplicities(lambda: &CharMatrix, i: usize) -> Result<MultiplicityTable> {
    lambda.require_valid()?;
    let p = lambda.polytope();
    if i >= p.n() {
        return Err(Error::FactorIndex(i));
    }
    let sides = p.sides(i);
    if sides > MAX_ENUMERATED_SIDES {
        return Err(Error::Guardrail(format!("{sides}-gon too large for subset enumeration")));
    }
    let chars = Characters::new(lambda);
    let mut sums: BTreeMap<CharacterClass, u64> = BTreeMap::new();
    for u in 0..(1u64 << sides) {
        let class = chars.class_of(&p.embed(i, u));
        *sums.entry(class).or_default() += factor_reduced_betti(sides, u).b0;
    }
    let mut entries = BTreeMap::new();
    for (class, s) in sums {
        if s % 2 != 0 {
            return Err(Error::NonIntegralMultiplicity { factor: i });
        }
        entries.insert(class, s / 2);
    }
    let total = entries.values().sum();
    debug_assert_eq!(Ok(total), genus(sides));
    Ok(MultiplicityTable { factor: i, entries, genus: total })
}

/// Evaluates `t_S` by two independent routes: convolution of character
/// distributions, and averaging the character of the tensor product over
/// every element of `G`.
pub struct TInvariants<'a> {
    chars: Characters,
    tables: &'a [MultiplicityTable],
    /// Per factor, the character value `sum_ρ a_ρ (-1)^{ρ(g)}` at each `g ∈ G`.
    traces: Option<Vec<Vec<i128>>>,
    order: usize,
}

impl<'a> TInvariants<'a> {
    pub fn new(lambda: &CharMatrix, tables: &'a [MultiplicityTable]) -> Self {
        let chars = Characters::new(lambda);
        let kernel = lambda.matrix().kernel_basis();
        let order = if kernel.len() >= usize::BITS as usize { usize::MAX } else { 1 << kernel.len() };
        let traces = if kernel.len() > MAX_AVERAGED_GROUP_BITS {
            log::warn!(
                "|G| = 2^{} exceeds 2^{}; t_S is computed by convolution only",
                kernel.len(),
                MAX_AVERAGED_GROUP_BITS
            );
            None
        } else {
            let group = span(&kernel, lambda.polytope().m());
            Some(
                tables
                    .iter()
                    .map(|t| {
                        group
                            .iter()
                            .map(|g| {
                                t.nonzero()
                                    .map(|(rho, a)| if rho.rep.dot(g) { -(a as i128) } else { a as i128 })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect(),
            )
        };
        TInvariants { chars, tables, traces, order }
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn averaging_checked(&self) -> bool {
        self.traces.is_some()
    }

    fn table(&self, i: usize) -> Result<&MultiplicityTable> {
        self.tables.iter().find(|t| t.factor == i).ok_or(Error::FactorIndex(i))
    }

    pub fn by_convolution(&self, subset: &[usize]) -> Result<u64> {
        let mut dist: BTreeMap<CharacterClass, u64> = BTreeMap::new();
        dist.insert(self.chars.trivial(), 1);
        for &i in subset {
            let table = self.table(i)?;
            let mut next = BTreeMap::new();
            for (rho, &c) in &dist {
                for (sigma, a) in table.nonzero() {
                    *next.entry(self.chars.sum(rho, sigma)).or_default() += c * a;
                }
            }
            dist = next;
        }
        Ok(dist.get(&self.chars.trivial()).copied().unwrap_or(0))
    }

    /// `None` when the group is too large to average over.
    pub fn by_averaging(&self, subset: &[usize]) -> Result<Option<u64>> {
        let Some(traces) = &self.traces else {
            return Ok(None);
        };
        let positions = subset
            .iter()
            .map(|&i| self.tables.iter().position(|t| t.factor == i).ok_or(Error::FactorIndex(i)))
            .collect::<Result<Vec<_>>>()?;
        let order = self.order as i128;
        let total: i128 = (0..self.order)
            .map(|g| positions.iter().map(|&k| traces[k][g]).product::<i128>())
            .sum();
        if total % order != 0 || total < 0 {
            return Err(Error::FormulaDisagreement {
                what: format!("group average for {subset:?}"),
                left: total,
                right: order,
            });
        }
        Ok(Some((total / order) as u64))
    }

    /// `t_S`, failing if the two routes disagree.
    pub fn get(&self, subset: &[usize]) -> Result<u64> {
        let conv = self.by_convolution(subset)?;
        if let Some(avg) = self.by_averaging(subset)? {
            if avg != conv {
                return Err(Error::FormulaDisagreement {
                    what: format!("t_S for S = {subset:?}"),
                    left: conv as i128,
                    right: avg as i128,
                });
            }
        }
        Ok(conv)
    }
}

/// `t_S = dim (⊗_{i∈S} V_i)^G`.
pub fn t_invariant(tables: &[MultiplicityTable], subset: &[usize], lambda: &CharMatrix) -> Result<u64> {
    TInvariants::new(lambda, tables).get(subset)
}

/// Hodge numbers `h^{p,q}` for `0 <= p, q <= n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HodgePolynomial {
    n: usize,
    h: Vec<Vec<u64>>,
}

impl HodgePolynomial {
    pub fn from_numbers(h: Vec<Vec<u64>>) -> Self {
        HodgePolynomial { n: h.len().saturating_sub(1), h }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> u64 {
        self.h[p][q]
    }

    pub fn numbers(&self) -> &[Vec<u64>] {
        &self.h
    }

    /// Hodge symmetry, Serre duality and the unit corners.
    pub fn satisfies_symmetries(&self) -> bool {
        let n = self.n;
        let sym = (0..=n).all(|p| (0..=n).all(|q| self.h[p][q] == self.h[q][p] && self.h[p][q] == self.h[n - p][n - q]));
        sym && self.h[0][0] == 1 && self.h[n][n] == 1
    }

    /// Row `r` of the diamond: `h^{r-q,q}` for increasing `q`.
    pub fn diamond_row(&self, r: usize) -> Vec<u64> {
        let n = self.n;
        let lo = r.saturating_sub(n);
        let hi = r.min(n);
        (lo..=hi).map(|q| self.h[r - q][q]).collect()
    }

    pub fn diamond_rows(&self) -> Vec<Vec<u64>> {
        (0..=2 * self.n).map(|r| self.diamond_row(r)).collect()
    }

    /// Centered diamond layout, one line per total degree.
    pub fn render(&self) -> String {
        let n = self.n;
        let width = self.h.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
        let mut lines = Vec::new();
        for r in 0..=2 * n {
            let mut cells = vec![" ".repeat(width); 2 * n + 1];
            for q in r.saturating_sub(n)..=r.min(n) {
                let p = r - q;
                cells[n - p + q] = format!("{:^width$}", self.h[p][q]);
            }
            lines.push(cells.join(" ").trim_end().to_string());
        }
        lines.join("\n")
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Coefficients of `(u+v)^s (1+uv)^{n-s}`.
fn basis_term(n: usize, s: usize) -> Vec<Vec<u64>> {
    let mut h = vec![vec![0u64; n + 1]; n + 1];
    for a in 0..=s {
        for b in 0..=n - s {
            h[a + b][s - a + b] += binomial(s, a) * binomial(n - s, b);
        }
    }
    h
}

/// Everything computed for the Hodge polynomial of one cover.
#[derive(Clone, Debug)]
pub struct HodgeAnalysis {
    pub certificate: CompatibilityCertificate,
    pub tables: Vec<MultiplicityTable>,
    /// `t_S` for every subset `S`, keyed by the sorted factor list.
    pub t: BTreeMap<Vec<usize>, u64>,
    /// `T_s` for `s = 0..=n`.
    pub big_t: Vec<u64>,
    pub polynomial: HodgePolynomial,
    pub averaging_checked: bool,
}

/// Hodge data for a given compatibility certificate (and hence a given
/// square pairing).
pub fn hodge_from_certificate(cert: &CompatibilityCertificate) -> Result<HodgeAnalysis> {
    let lambda = cert.matrix();
    let n = lambda.polytope().n();
    let tables = (0..n).map(|i| multiplicities(lambda, i)).collect::<Result<Vec<_>>>()?;
    let inv = TInvariants::new(lambda, &tables);
    let mut t = BTreeMap::new();
    let mut big_t = vec![0u64; n + 1];
    let mut h = vec![vec![0u64; n + 1]; n + 1];
    for mask in 0u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let value = inv.get(&subset)?;
        let term = basis_term(n, subset.len());
        for p in 0..=n {
            for q in 0..=n {
                h[p][q] += value * term[p][q];
            }
        }
        big_t[subset.len()] += value;
        t.insert(subset, value);
    }
    let mut grouped = vec![vec![0u64; n + 1]; n + 1];
    for (s, &ts) in big_t.iter().enumerate() {
        let term = basis_term(n, s);
        for p in 0..=n {
            for q in 0..=n {
                grouped[p][q] += ts * term[p][q];
            }
        }
    }
    let averaging_checked = inv.averaging_checked();
    drop(inv);
    if grouped != h {
        return Err(Error::FormulaDisagreement {
            what: "Hodge polynomial grouped by |S|".into(),
            left: h.iter().flatten().sum::<u64>() as i128,
            right: grouped.iter().flatten().sum::<u64>() as i128,
        });
    }
    Ok(HodgeAnalysis {
        certificate: cert.clone(),
        tables,
        t,
        big_t,
        polynomial: HodgePolynomial { n, h },
        averaging_checked,
    })
}

/// Hodge data using the certificate of the first compatible pairing.
pub fn hodge_analysis(lambda: &CharMatrix) -> Result<HodgeAnalysis> {
    let cert = factor_compatible(lambda)?.into_certificate()?;
    hodge_from_certificate(&cert)
}

pub fn hodge_polynomial(lambda: &CharMatrix) -> Result<HodgePolynomial> {
    Ok(hodge_analysis(lambda)?.polynomial)
}

/// `b_r = sum_{p+q=r} h^{p,q}`.
pub fn poincare_from_hodge(h: &HodgePolynomial) -> GradedDims {
    h.diamond_rows().iter().map(|row| row.iter().sum()).collect::<Vec<u64>>().into()
}

/// Peels `T_s (2t)^s (1+t^2)^{n-s}` off the Poincaré polynomial from the
/// lowest degree upward.
pub fn recover_t_from_poincare(b: &GradedDims, n: usize) -> Result<Vec<u64>> {
    if b.dims.len() != 2 * n + 1 {
        return Err(Error::InconsistentBetti(format!(
            "expected {} Betti numbers, got {}",
            2 * n + 1,
            b.dims.len()
        )));
    }
    let mut residual: Vec<i128> = b.dims.iter().map(|&x| x as i128).collect();
    let mut out = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let lead = residual[s];
        let scale = 1i128 << s;
        if lead < 0 || lead % scale != 0 {
            return Err(Error::InconsistentBetti(format!(
                "coefficient {lead} of t^{s} is not a nonnegative multiple of {scale}"
            )));
        }
        let ts = lead / scale;
        for k in 0..=n - s {
            residual[s + 2 * k] -= ts * scale * binomial(n - s, k) as i128;
        }
        if let Some(d) = residual.iter().position(|&x| x < 0) {
            return Err(Error::InconsistentBetti(format!("negative residual in degree {d} after T_{s}")));
        }
        out.push(ts as u64);
    }
    if residual.iter().any(|&x| x != 0) {
        return Err(Error::InconsistentBetti(format!("nonzero residual {residual:?}")));
    }
    Ok(out)
}

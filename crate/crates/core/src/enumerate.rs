//! Exhaustive enumeration of characteristic matrices in reduced row echelon
//! form, one per Davis–Januszkiewicz class, and the census built on it.

use rayon::prelude::*;
use serde::Serialize;

use crate::betti::{small_cover_betti, FaceRing, GradedDims};
use crate::charmap::{factor_compatible, orientable, CharMatrix, Compatibility};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::hodge::hodge_from_certificate;
use crate::obstruct::symplectic_status;
use crate::polytope::PolygonProduct;

pub const MAX_RANK: usize = 6;
pub const MAX_FACETS: usize = 14;

/// Column values are bitmasks over the `2n` rows.
type Column = u8;

struct Search {
    rank: usize,
    /// For each facet, maximal sets of earlier facets sharing a vertex with it.
    cliques: Vec<Vec<u16>>,
}

impl Search {
    fn new(p: &PolygonProduct) -> Result<Self> {
        if p.dim() > MAX_RANK || p.m() > MAX_FACETS {
            return Err(Error::Guardrail(format!(
                "enumeration needs 2n <= {MAX_RANK} and m <= {MAX_FACETS}; got 2n = {}, m = {}",
                p.dim(),
                p.m()
            )));
        }
        let mut cliques: Vec<Vec<u16>> = vec![Vec::new(); p.m()];
        for v in p.vertices() {
            let facets = p.vertex_facets(&v)?;
            for &f in &facets {
                let earlier = facets.iter().filter(|&&g| g < f).fold(0u16, |acc, &g| acc | 1 << g);
                cliques[f].push(earlier);
            }
        }
        for list in &mut cliques {
            list.sort_unstable();
            list.dedup();
            let all = list.clone();
            list.retain(|&a| !all.iter().any(|&b| b != a && b & a == a));
        }
        Ok(Search { rank: p.dim(), cliques })
    }

    fn fits(&self, cols: &[Column], f: usize, c: Column) -> bool {
        self.cliques[f].iter().all(|&mask| {
            let mut span: u64 = 1;
            for (g, &v) in cols.iter().enumerate().take(f) {
                if mask >> g & 1 == 1 {
                    let mut add = 0u64;
                    let mut s = span;
                    while s != 0 {
                        let x = s.trailing_zeros() as u8;
                        add |= 1 << (x ^ v);
                        s &= s - 1;
                    }
                    span |= add;
                }
            }
            span >> c & 1 == 0
        })
    }

    /// Candidate values for column `f` given the current rank, in ascending
    /// order: anything in the span of existing pivots, then the next pivot.
    fn candidates(&self, r: usize) -> std::ops::RangeInclusive<u16> {
        if r < self.rank {
            0..=(1u16 << r)
        } else {
            0..=((1u16 << self.rank) - 1)
        }
    }

    fn extend(&self, cols: &mut Vec<Column>, r: usize, depth: usize, out: &mut Vec<Vec<Column>>) {
        let f = cols.len();
        if f == depth {
            out.push(cols.clone());
            return;
        }
        for c in self.candidates(r) {
            let c = c as Column;
            if !self.fits(cols, f, c) {
                continue;
            }
            let next_rank = if r < self.rank && c == 1 << r { r + 1 } else { r };
            cols.push(c);
            self.extend(cols, next_rank, depth, out);
            cols.pop();
        }
    }
}

fn rank_of(cols: &[Column]) -> usize {
    cols.iter().map(|&c| if c == 0 { 0 } else { 8 - c.leading_zeros() as usize }).max().unwrap_or(0)
}

fn to_matrix(p: &PolygonProduct, cols: &[Column]) -> Result<CharMatrix> {
    let rows = (0..p.dim())
        .map(|r| BitVector::from_indices(p.m(), (0..p.m()).filter(|&f| cols[f] >> r & 1 == 1)))
        .collect();
    CharMatrix::new(p.clone(), BitMatrix::new(rows, p.m())?)?.validated()
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Guardrail(format!("thread pool: {e}")))
}

/// Every characteristic matrix over `p` in reduced row echelon form,
/// ordered lexicographically by column values (row `r` is bit `r`).
pub fn enumerate_charmaps(p: &PolygonProduct, jobs: usize) -> Result<Vec<CharMatrix>> {
    let search = Search::new(p)?;
    let split = p.m().min(3);
    let mut prefixes = Vec::new();
    search.extend(&mut Vec::new(), 0, split, &mut prefixes);
    let found: Vec<Vec<Vec<Column>>> = pool(jobs)?.install(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut out = Vec::new();
                search.extend(&mut prefix.clone(), rank_of(prefix), p.m(), &mut out);
                out
            })
            .collect()
    });
    found.into_iter().flatten().map(|cols| to_matrix(p, &cols)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeSummary {
    pub big_t: Vec<u64>,
    pub diamond: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub index: usize,
    pub rows: Vec<String>,
    pub valid: bool,
    pub orientable: bool,
    pub factor_compatible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
    pub symplectic: String,
    pub betti_q: GradedDims,
    pub betti_f2: GradedDims,
    pub sq1_agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hodge: Option<HodgeSummary>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub classes: usize,
    pub orientable: usize,
    pub factor_compatible: usize,
    pub triangle_obstructed: usize,
    pub all_odd: usize,
    pub unknown: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub factors: Vec<usize>,
    pub summary: CensusSummary,
    pub classes: Vec<CensusRow>,
}

impl Census {
    pub fn compatible_only(&self) -> Census {
        Census {
            factors: self.factors.clone(),
            summary: self.summary.clone(),
            classes: self.classes.iter().filter(|r| r.factor_compatible).cloned().collect(),
        }
    }
}

fn classify_one(index: usize, lambda: &CharMatrix) -> Result<CensusRow> {
    let ring = FaceRing::new(lambda)?;
    let betti_q = small_cover_betti(lambda)?;
    let sq1 = GradedDims::from(ring.sq1_homology());
    let compat = factor_compatible(lambda)?;
    let (refusal, hodge) = match &compat {
        Compatibility::Compatible(cert) => {
            let h = hodge_from_certificate(cert)?;
            (None, Some(HodgeSummary { big_t: h.big_t, diamond: h.polynomial.diamond_rows() }))
        }
        Compatibility::Refused(r) => (Some(r.to_string()), None),
    };
    Ok(CensusRow {
        index,
        rows: lambda.matrix().rows().iter().map(ToString::to_string).collect(),
        valid: true,
        orientable: orientable(lambda)?.is_some(),
        factor_compatible: hodge.is_some(),
        refusal,
        symplectic: symplectic_status(lambda)?.to_string(),
        sq1_agrees: sq1 == betti_q,
        betti_q,
        betti_f2: ring.dims().into(),
        hodge,
    })
}

/// Classifies every D–J class over `p`.
pub fn classify(p: &PolygonProduct, jobs: usize) -> Result<Census> {
    let classes = enumerate_charmaps(p, jobs)?;
    let rows: Vec<CensusRow> = pool(jobs)?.install(|| {
        classes
            .par_iter()
            .enumerate()
            .map(|(i, l)| classify_one(i, l))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut summary = CensusSummary { classes: rows.len(), ..Default::default() };
    for r in &rows {
        summary.orientable += usize::from(r.orientable);
        summary.factor_compatible += usize::from(r.factor_compatible);
        if r.symplectic.starts_with("triangle") {
            summary.triangle_obstructed += 1;
        } else if r.symplectic.starts_with("all factors odd") {
            summary.all_odd += 1;
        } else if r.symplectic == "unknown" {
            summary.unknown += 1;
        }
    }
    Ok(Census { factors: p.factors().to_vec(), summary, classes: rows })
}

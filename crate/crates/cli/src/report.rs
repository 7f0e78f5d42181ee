use std::collections::BTreeMap;

use serde::Serialize;
use smallcover::betti::{h_vector_oracle, small_cover_betti, FaceRing};
use smallcover::charmap::{orientable, CompatibilityCertificate, Validity};
use smallcover::hodge::{poincare_from_hodge, recover_t_from_poincare, HodgeAnalysis};
use smallcover::obstruct::{
    all_odd_obstruction, even_sides_consistency, symplectic_status, triangle_obstruction, AllOddReport,
    FactorParity,
};
use smallcover::triangular::{verify_blockform, TriangularForm};
use smallcover::{CharMatrix, Compatibility, GradedDims, InstanceFile, Result};

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

#[derive(Serialize)]
pub struct ValidateReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<String>>,
}

pub fn validate_report(lambda: &CharMatrix, validity: &Validity) -> ValidateReport {
    match validity {
        Validity::Invalid { vertex } => {
            let p = lambda.polytope();
            let facets = p
                .vertex_facets(vertex)
                .unwrap_or_default()
                .into_iter()
                .map(|f| {
                    let (i, j) = p.locate(f);
                    format!("F{},{}", i + 1, j + 1)
                })
                .collect();
            ValidateReport { valid: false, vertex: Some(one_based(vertex)), facets: Some(facets) }
        }
        _ => ValidateReport { valid: true, vertex: None, facets: None },
    }
}

#[derive(Serialize)]
pub struct CertificateReport {
    pub matching: Vec<[String; 2]>,
    pub colperm: Vec<usize>,
    pub regrouped_rows: Vec<String>,
}

fn certificate_report(cert: &CompatibilityCertificate) -> CertificateReport {
    let w = &cert.matching.weights;
    CertificateReport {
        matching: cert.matching.pairs.iter().map(|&(a, b)| [w[a].to_string(), w[b].to_string()]).collect(),
        colperm: one_based(&cert.regrouped.colperm),
        regrouped_rows: rows_of(cert.matrix()),
    }
}

fn rows_of(lambda: &CharMatrix) -> Vec<String> {
    lambda.matrix().rows().iter().map(ToString::to_string).collect()
}

#[derive(Serialize)]
pub struct Obstructions {
    pub triangle_factor: Option<usize>,
    pub all_odd: AllOddReport,
    pub even_sides: Vec<FactorParity>,
    pub findings: Vec<String>,
    pub symplectic: String,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub factors: Vec<usize>,
    pub valid: bool,
    pub orientable: bool,
    pub orientable_witness: Option<String>,
    pub factor_compatible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
    pub obstructions: Obstructions,
    pub betti_q: GradedDims,
    pub betti_f2: GradedDims,
    pub betti_sq1: GradedDims,
    pub sq1_agrees: bool,
    pub h_vector: GradedDims,
    pub f2_matches_h_vector: bool,
}

pub fn analyze_report(lambda: &CharMatrix, compat: &Compatibility) -> Result<AnalyzeReport> {
    let p = lambda.polytope();
    let witness = orientable(lambda)?;
    let ring = FaceRing::new(lambda)?;
    let betti_q = small_cover_betti(lambda)?;
    let betti_f2 = GradedDims::from(ring.dims());
    let betti_sq1 = GradedDims::from(ring.sq1_homology());
    let h_vector = h_vector_oracle(p);
    let triangle = triangle_obstruction(p);
    let all_odd = all_odd_obstruction(lambda)?;
    let mut findings = Vec::new();
    if let Some(i) = triangle {
        findings.push(format!("triangle factor {}: not c-symplectic, hence not symplectic", i + 1));
    }
    if let AllOddReport::Applies { .. } = all_odd {
        findings.push("all factors odd: non-orientable".to_string());
    }
    let (certificate, refusal) = match compat {
        Compatibility::Compatible(c) => (Some(certificate_report(c)), None),
        Compatibility::Refused(r) => (None, Some(r.to_string())),
    };
    Ok(AnalyzeReport {
        factors: p.factors().to_vec(),
        valid: true,
        orientable: witness.is_some(),
        orientable_witness: witness.map(|w| w.to_string()),
        factor_compatible: certificate.is_some(),
        certificate,
        refusal,
        obstructions: Obstructions {
            triangle_factor: triangle.map(|i| i + 1),
            all_odd,
            even_sides: even_sides_consistency(lambda)?
                .into_iter()
                .map(|f| FactorParity { factor: f.factor + 1, ..f })
                .collect(),
            findings,
            symplectic: symplectic_status(lambda)?.to_string(),
        },
        sq1_agrees: betti_sq1 == betti_q,
        f2_matches_h_vector: betti_f2 == h_vector,
        betti_q,
        betti_f2,
        betti_sq1,
        h_vector,
    })
}

#[derive(Serialize)]
pub struct MultiplicityReport {
    pub factor: usize,
    pub genus: u64,
    /// Character representative (a coset of the row space) to multiplicity.
    pub characters: BTreeMap<String, u64>,
}

#[derive(Serialize)]
pub struct SubsetValue {
    pub subset: Vec<usize>,
    pub value: u64,
}

#[derive(Serialize)]
pub struct RoundTrip {
    pub betti_from_hodge: GradedDims,
    pub betti_q: GradedDims,
    pub betti_agree: bool,
    pub recovered_t: Option<Vec<u64>>,
    pub t_agree: bool,
}

impl RoundTrip {
    pub fn ok(&self) -> bool {
        self.betti_agree && self.t_agree
    }
}

#[derive(Serialize)]
pub struct HodgeReport {
    pub factors: Vec<usize>,
    pub certificate: CertificateReport,
    pub multiplicities: Vec<MultiplicityReport>,
    pub t: Vec<SubsetValue>,
    pub big_t: Vec<u64>,
    pub hodge_numbers: Vec<Vec<u64>>,
    pub diamond: Vec<Vec<u64>>,
    pub diamond_text: String,
    pub symmetric: bool,
    pub averaging_checked: bool,
    pub round_trip: RoundTrip,
}

pub fn hodge_report(lambda: &CharMatrix, analysis: &HodgeAnalysis) -> Result<HodgeReport> {
    let n = lambda.polytope().n();
    let h = &analysis.polynomial;
    let betti_q = small_cover_betti(lambda)?;
    let betti_from_hodge = poincare_from_hodge(h);
    let recovered = recover_t_from_poincare(&betti_q, n).ok();
    Ok(HodgeReport {
        factors: lambda.polytope().factors().to_vec(),
        certificate: certificate_report(&analysis.certificate),
        multiplicities: analysis
            .tables
            .iter()
            .map(|t| MultiplicityReport {
                factor: t.factor + 1,
                genus: t.genus,
                characters: t.entries.iter().map(|(c, &a)| (c.to_string(), a)).collect(),
            })
            .collect(),
        t: analysis.t.iter().map(|(s, &v)| SubsetValue { subset: one_based(s), value: v }).collect(),
        big_t: analysis.big_t.clone(),
        hodge_numbers: h.numbers().to_vec(),
        diamond: h.diamond_rows(),
        diamond_text: h.render(),
        symmetric: h.satisfies_symmetries(),
        averaging_checked: analysis.averaging_checked,
        round_trip: RoundTrip {
            betti_agree: betti_from_hodge == betti_q,
            t_agree: recovered.as_ref() == Some(&analysis.big_t),
            betti_from_hodge,
            betti_q,
            recovered_t: recovered,
        },
    })
}

#[derive(Serialize)]
pub struct FiberReport {
    pub position: usize,
    pub factor: usize,
    pub sides: usize,
    pub genus: usize,
}

#[derive(Serialize)]
pub struct BlockizeReport {
    pub factor_order: Vec<usize>,
    pub colperm: Vec<usize>,
    pub u: Vec<String>,
    pub result: InstanceFile,
    pub tower: Vec<FiberReport>,
    pub verified: bool,
    pub violations: Vec<String>,
}

pub fn blockize_report(original: &CharMatrix, form: &TriangularForm) -> BlockizeReport {
    let check = verify_blockform(form, original);
    BlockizeReport {
        factor_order: one_based(&form.factor_order),
        colperm: one_based(&form.colperm),
        u: form.u.rows().iter().map(ToString::to_string).collect(),
        result: InstanceFile::from(&form.result),
        tower: form
            .tower
            .iter()
            .map(|f| FiberReport { position: f.position + 1, factor: f.factor + 1, sides: f.sides, genus: f.genus })
            .collect(),
        verified: check.is_ok(),
        violations: check.violations.iter().map(ToString::to_string).collect(),
    }
}

pub fn dims_text(d: &GradedDims) -> String {
    let parts: Vec<String> = d.dims.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

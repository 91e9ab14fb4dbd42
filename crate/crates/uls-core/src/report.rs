//! Machine-readable report shapes.
//!
//! Every CLI subcommand emits JSON built from the structures here, so the
//! field names and their order are part of the public contract:
//!
//! * set verdicts: `{category, scales, pairs: [{i, j, category, lambda_bar:
//!   {re, im}, p, margin}]}`,
//! * decode results: `{classification, candidates: [{index, residual,
//!   x: [{re, im}]}], truth_recovered}` with `truth_recovered` null when the
//!   instance records no ground truth,
//! * spectra: `{size, clusters: [{value: {re, im}, multiplicity}]}`,
//! * witnesses: `{s, x, z, residuals, separation}`.
//!
//! Category strings are snake_case: `unique`, `up_to_scale`,
//! `not_identifiable`, `mixed_or_not_identifiable`, `ambiguous`,
//! `infeasible`. Complex values appear as `{re, im}` objects. Serialization
//! follows declared field order, so identical inputs yield byte-identical
//! documents.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decode::{Classification, DecodeResult};
use crate::identifiability::{ConverseWitness, PairCategory, SetCategory, SetVerdict};
use crate::spectrum::EigenStructure;

/// A complex number as the `{re, im}` report object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

fn complex_list(values: &[Complex64]) -> Vec<ComplexJson> {
    values.iter().map(|&z| z.into()).collect()
}

/// One classified pair inside a set verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdictJson {
    pub i: usize,
    pub j: usize,
    pub category: String,
    /// Dominant eigenvalue of the relative transform.
    pub lambda_bar: ComplexJson,
    /// Multiplicity of the dominant eigenvalue.
    pub p: usize,
    /// The comparison margin `m - n`.
    pub margin: usize,
}

/// JSON shape of a whole-set certification verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetVerdictJson {
    pub category: String,
    /// Possible global scale factors (empty unless `category` is
    /// `up_to_scale`).
    pub scales: Vec<ComplexJson>,
    pub pairs: Vec<PairVerdictJson>,
}

impl SetVerdictJson {
    pub fn from_verdict(v: &SetVerdict) -> Self {
        let (category, scales) = match &v.category {
            SetCategory::Unique => ("unique".to_string(), Vec::new()),
            SetCategory::UpToScale(scales) => {
                ("up_to_scale".to_string(), complex_list(scales))
            }
            SetCategory::MixedOrNotIdentifiable => {
                ("mixed_or_not_identifiable".to_string(), Vec::new())
            }
        };
        let pairs = v
            .per_pair
            .iter()
            .map(|(&(i, j), pv)| PairVerdictJson {
                i,
                j,
                category: match pv.category {
                    PairCategory::Unique => "unique".to_string(),
                    PairCategory::UpToScale(_) => "up_to_scale".to_string(),
                    PairCategory::NotIdentifiable => "not_identifiable".to_string(),
                },
                lambda_bar: pv.dominant.0.into(),
                p: pv.dominant.1,
                margin: pv.margin,
            })
            .collect();
        SetVerdictJson {
            category,
            scales,
            pairs,
        }
    }
}

/// One accepted decode candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub index: usize,
    pub residual: f64,
    pub x: Vec<ComplexJson>,
}

/// JSON shape of a decode result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResultJson {
    pub classification: String,
    pub candidates: Vec<CandidateJson>,
    /// Present only for `up_to_scale`: the transform index of the
    /// largest-norm candidate, which the ratios are measured against.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub representative: Option<usize>,
    /// Present only for `up_to_scale`: for each non-representative candidate
    /// in listed order, the factor `r` with `representative ≈ r · candidate`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratios: Option<Vec<ComplexJson>>,
    /// `null` when the instance records no ground truth.
    pub truth_recovered: Option<bool>,
}

impl DecodeResultJson {
    pub fn from_result(r: &DecodeResult) -> Self {
        let classification = match &r.classification {
            Classification::Unique(_) => "unique",
            Classification::UpToScale { .. } => "up_to_scale",
            Classification::Ambiguous => "ambiguous",
            Classification::Infeasible => "infeasible",
        }
        .to_string();
        let candidates: Vec<CandidateJson> = r
            .candidates
            .iter()
            .map(|c| CandidateJson {
                index: c.index,
                residual: c.residual,
                x: complex_list(&c.x_hat),
            })
            .collect();
        let (representative, ratios) = match &r.classification {
            Classification::UpToScale {
                representative,
                ratios,
            } => {
                let rep_index = r
                    .candidates
                    .iter()
                    .find(|c| c.x_hat == *representative)
                    .map(|c| c.index);
                (rep_index, Some(complex_list(ratios)))
            }
            _ => (None, None),
        };
        DecodeResultJson {
            classification,
            candidates,
            representative,
            ratios,
            truth_recovered: r.truth_recovered,
        }
    }
}

/// One eigenvalue cluster in a spectrum report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub value: ComplexJson,
    pub multiplicity: usize,
}

/// JSON shape of a transform spectrum (clusters in dominant-first order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub size: usize,
    pub clusters: Vec<ClusterJson>,
}

impl SpectrumJson {
    pub fn from_structure(e: &EigenStructure) -> Self {
        SpectrumJson {
            size: e.size(),
            clusters: e
                .clusters()
                .iter()
                .map(|c| ClusterJson {
                    value: c.value.into(),
                    multiplicity: c.multiplicity,
                })
                .collect(),
        }
    }
}

/// JSON shape of a non-identifiability witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub s: Vec<ComplexJson>,
    pub x: Vec<ComplexJson>,
    pub z: Vec<ComplexJson>,
    /// Residuals of `T1 A x - s` and `T2 A z - s`.
    pub residuals: (f64, f64),
    pub separation: f64,
}

impl WitnessJson {
    pub fn from_witness(w: &ConverseWitness) -> Self {
        WitnessJson {
            s: complex_list(&w.s),
            x: complex_list(&w.x),
            z: complex_list(&w.z),
            residuals: w.residuals,
            separation: w.separation,
        }
    }
}

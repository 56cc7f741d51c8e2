//! Outcome records. Every decision returns a certificate carrying the
//! verdict, a machine-checkable witness for FAIL-like verdicts, and the
//! arithmetic provenance of the decision.

use crate::scalar::{q_display, Q};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// How a decision was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    /// Exact rational elimination; no tolerances involved.
    Exact,
    /// Floating point guarded by the tolerance config.
    Float,
    /// Exact input converted to floats for an operation that needs unit
    /// norms (Naimark completion, orthonormal bases).
    FloatConvertedFromExact,
}

/// Decision levels shared by the retrieval certifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// Backed by an exact combinatorial criterion.
    PassExact,
    /// Backed by a bounded search that found no violation.
    PassBudgeted,
    /// A verified witness exists.
    Fail,
    /// Neither a pass criterion nor a verified witness; never overclaim.
    Inconclusive,
}

impl Decision {
    pub fn is_pass(self) -> bool {
        matches!(self, Decision::PassExact | Decision::PassBudgeted)
    }
}

/// Verdict for a single 2-partition of an indexed family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionVerdict {
    BothDeficient,
    SubsetSpans,
    ComplementSpans,
    BothSpan,
}

/// One 2-partition with its span dimensions. Indices are 1-based to match
/// the input file convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionCertificate {
    pub subset: Vec<usize>,
    pub dim_subset: usize,
    pub dim_complement: usize,
    pub verdict: PartitionVerdict,
}

impl PartitionCertificate {
    /// Build from a 0-based bitmask over m indices.
    pub fn from_mask(
        mask: u64,
        m: usize,
        dim_subset: usize,
        dim_complement: usize,
        ambient: usize,
    ) -> Self {
        let subset = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let verdict = match (dim_subset == ambient, dim_complement == ambient) {
            (false, false) => PartitionVerdict::BothDeficient,
            (true, false) => PartitionVerdict::SubsetSpans,
            (false, true) => PartitionVerdict::ComplementSpans,
            (true, true) => PartitionVerdict::BothSpan,
        };
        PartitionCertificate {
            subset,
            dim_subset,
            dim_complement,
            verdict,
        }
    }

    pub fn mask(&self) -> u64 {
        self.subset.iter().fold(0u64, |m, &i| m | 1 << (i - 1))
    }

    pub fn min_dim(&self) -> usize {
        self.dim_subset.min(self.dim_complement)
    }
}

/// Work accounting for a subset scan.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationDigest {
    /// Representative partitions examined.
    pub checked: usize,
    /// Complement-side rank computations skipped because the subset spanned.
    pub pruned: usize,
}

/// Outcome of the complement-property scan.
#[derive(Debug, Clone, Serialize)]
pub struct CpOutcome {
    pub holds: bool,
    pub arithmetic: Arithmetic,
    pub digest: EnumerationDigest,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PartitionCertificate>,
}

/// A vector in a witness: exact rationals serialize as "p/q" strings,
/// floats as numbers.
#[derive(Debug, Clone, PartialEq)]
pub enum WVec {
    Exact(Vec<Q>),
    Float(Vec<f64>),
}

impl WVec {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            WVec::Exact(v) => v.iter().map(crate::scalar::q_to_f64).collect(),
            WVec::Float(v) => v.clone(),
        }
    }
}

impl Serialize for WVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            WVec::Exact(v) => {
                let mut seq = s.serialize_seq(Some(v.len()))?;
                for q in v {
                    seq.serialize_element(&q_display(q))?;
                }
                seq.end()
            }
            WVec::Float(v) => {
                let mut seq = s.serialize_seq(Some(v.len()))?;
                for x in v {
                    seq.serialize_element(x)?;
                }
                seq.end()
            }
        }
    }
}

/// Failing pair for phase/norm retrieval: measurements of x and y agree but
/// the endpoints violate the retrieval goal. u = x + y and v = x - y are the
/// polarized pair the constructions work with.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessPair {
    pub x: WVec,
    pub y: WVec,
    pub u: WVec,
    pub v: WVec,
    /// Largest deviation among the supposedly equal measurements; exactly
    /// zero for witnesses verified in rational arithmetic.
    pub measurement_residual: f64,
    /// Distance of the pair from the trivial solutions (x = y or x = -y for
    /// phase retrieval, equal norms for norm retrieval).
    pub separation: f64,
}

/// Certificate for phase- and norm-retrieval decisions.
#[derive(Debug, Clone, Serialize)]
pub struct PrCertificate {
    pub decision: Decision,
    pub arithmetic: Arithmetic,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PrCertificate {
    pub fn pass_exact(arithmetic: Arithmetic) -> Self {
        PrCertificate {
            decision: Decision::PassExact,
            arithmetic,
            partition: None,
            witness: None,
            search_budget: None,
            min_residual: None,
            note: None,
        }
    }
}

/// Generic pass/fail certificate with a residual, used by the operator-level
/// verifiers (Naimark pairs, constructions).
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub pass: bool,
    pub arithmetic: Arithmetic,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Certificate {
    pub fn pass(arithmetic: Arithmetic, max_residual: Option<f64>) -> Self {
        Certificate {
            pass: true,
            arithmetic,
            max_residual,
            note: None,
        }
    }

    pub fn fail(arithmetic: Arithmetic, max_residual: Option<f64>, note: impl Into<String>) -> Self {
        Certificate {
            pass: false,
            arithmetic,
            max_residual,
            note: Some(note.into()),
        }
    }
}

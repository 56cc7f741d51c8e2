use serde::Serialize;

/// Scalar field of a vector family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Arithmetic provenance of a value or family: born from exact rational data
/// or from floating-point data. Every finite double is a rational, so both
/// kinds are stored exactly; the mode records which guarantees apply and is
/// echoed in certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Tolerances for floating-point comparisons. Ignored by exact-rational
/// decisions; float comparisons must never use raw equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceConfig {
    /// Relative threshold on singular values when counting numerical rank.
    pub rank_tol: f64,
    /// Entrywise threshold for orthogonality / idempotency residuals.
    pub ortho_tol: f64,
    /// Threshold for witness verification and spectrum enclosures.
    pub witness_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_tol: 1e-9,
            ortho_tol: 1e-10,
            witness_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// Derive the full config from a single rank tolerance, keeping the
    /// default ratios (ortho = 0.1x, witness = 10x).
    pub fn from_rank_tol(rank_tol: f64) -> Self {
        assert!(rank_tol > 0.0, "tolerances must be strictly positive");
        ToleranceConfig {
            rank_tol,
            ortho_tol: 0.1 * rank_tol,
            witness_tol: 10.0 * rank_tol,
        }
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        if self.rank_tol > 0.0 && self.ortho_tol > 0.0 && self.witness_tol > 0.0 {
            Ok(())
        } else {
            Err(crate::error::Error::Parse(
                "tolerances must be strictly positive in float mode".into(),
            ))
        }
    }
}

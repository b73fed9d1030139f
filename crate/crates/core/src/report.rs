//! Residual bookkeeping shared by the identity checkers.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// One matrix identity `lhs = rhs`, measured entrywise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub identity: String,
    /// max |lhs - rhs|
    pub max_abs: f64,
    /// max |lhs - rhs| / (1 + max |rhs|)
    pub relative: f64,
    /// Exact max |lhs - rhs| as `p/q`, present on the rational backend.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
    pub passed: bool,
}

impl Residual {
    pub fn compare<T: Scalar>(identity: impl Into<String>, lhs: &Matrix<T>, rhs: &Matrix<T>, tol: f64) -> Self {
        let diff = lhs - rhs;
        let max_abs = diff.max_abs();
        let relative = max_abs / (1.0 + rhs.max_abs());
        let (exact, passed) = if T::EXACT {
            (Some(diff.max_abs_exact().to_canonical_string()), diff.is_zero())
        } else {
            (None, relative <= tol)
        };
        Self { identity: identity.into(), max_abs, relative, exact, passed }
    }

    /// Scalar identity, e.g. a closed form against a value read off a matrix.
    pub fn compare_scalar<T: Scalar>(identity: impl Into<String>, lhs: &T, rhs: &T, tol: f64) -> Self {
        Self::compare(
            identity,
            &Matrix::from_diagonal(std::slice::from_ref(lhs)),
            &Matrix::from_diagonal(std::slice::from_ref(rhs)),
            tol,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub residuals: Vec<Residual>,
    pub passed: bool,
}

impl IdentityReport {
    pub fn new(residuals: Vec<Residual>) -> Self {
        let passed = residuals.iter().all(|r| r.passed);
        Self { residuals, passed }
    }

    pub fn get(&self, identity: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.identity == identity)
    }

    pub fn max_relative(&self) -> f64 {
        self.residuals.iter().map(|r| r.relative).fold(0.0, f64::max)
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.residuals.extend(other.residuals);
        self.passed = self.residuals.iter().all(|r| r.passed);
    }
}

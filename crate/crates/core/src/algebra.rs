//! The Racah-Wilson algebra: structure constants, the affine reduction to
//! three parameters, and relation/Casimir checks on matrix realizations.
//!
//! General relations, with `K3 = [K1, K2]`:
//!
//! ```text
//! [K2, K3] = a2 K2^2 + a1 {K1, K2} + c1 K1 + d K2 + e1
//! [K3, K1] = a1 K1^2 + a2 {K1, K2} + c2 K2 + d K1 + e2
//! ```
//!
//! The reduced form has `a1 = a2 = 1`, `c1 = c2 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::{IdentityReport, Residual};
use crate::scalar::Scalar;

/// Default relative tolerance for float relation checks.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-10;

pub const REL_COMMUTATOR: &str = "[K1,K2]=K3";
pub const REL_K2K3: &str = "[K2,K3]";
pub const REL_K3K1: &str = "[K3,K1]";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureConstants<T> {
    pub a1: T,
    pub a2: T,
    pub c1: T,
    pub c2: T,
    pub d: T,
    pub e1: T,
    pub e2: T,
}

/// The three parameters surviving the canonical reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedConstants<T> {
    pub d: T,
    pub e1: T,
    pub e2: T,
}

impl<T: Scalar> ReducedConstants<T> {
    pub fn new(d: T, e1: T, e2: T) -> Self {
        Self { d, e1, e2 }
    }

    pub fn to_general(&self) -> StructureConstants<T> {
        StructureConstants {
            a1: T::one(),
            a2: T::one(),
            c1: T::zero(),
            c2: T::zero(),
            d: self.d.clone(),
            e1: self.e1.clone(),
            e2: self.e2.clone(),
        }
    }

    /// Constants of the dual algebra (`K1 <-> K2`, `K3 -> -K3`): `e1 <-> e2`.
    pub fn dual(&self) -> Self {
        Self { d: self.d.clone(), e1: self.e2.clone(), e2: self.e1.clone() }
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> ReducedConstants<S> {
        ReducedConstants { d: f(&self.d), e1: f(&self.e1), e2: f(&self.e2) }
    }
}

impl<T: Scalar> StructureConstants<T> {
    pub fn reduced(d: T, e1: T, e2: T) -> Self {
        ReducedConstants::new(d, e1, e2).to_general()
    }

    pub fn is_reduced(&self) -> bool {
        self.a1.is_one() && self.a2.is_one() && self.c1.is_zero() && self.c2.is_zero()
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> StructureConstants<S> {
        StructureConstants {
            a1: f(&self.a1),
            a2: f(&self.a2),
            c1: f(&self.c1),
            c2: f(&self.c2),
            d: f(&self.d),
            e1: f(&self.e1),
            e2: f(&self.e2),
        }
    }
}

/// `K1 -> u1 K1 + v1`, `K2 -> u2 K2 + v2`, `K3 -> u1 u2 K3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap<T> {
    pub u1: T,
    pub u2: T,
    pub v1: T,
    pub v2: T,
}

impl<T: Scalar> AffineMap<T> {
    pub fn identity() -> Self {
        Self { u1: T::one(), u2: T::one(), v1: T::zero(), v2: T::zero() }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply(&self, ops: &OperatorTriple<T>) -> OperatorTriple<T> {
        let k1 = ops.k1.scale(&self.u1).shift(&self.v1);
        let k2 = ops.k2.scale(&self.u2).shift(&self.v2);
        let k3 = ops.k3.scale(&(self.u1.clone() * self.u2.clone()));
        OperatorTriple { k1, k2, k3, basis_label: ops.basis_label.clone() }
    }
}

/// Concrete matrices for `K1`, `K2` and `K3 = [K1, K2]`.
#[derive(Clone, PartialEq)]
pub struct OperatorTriple<T> {
    pub k1: Matrix<T>,
    pub k2: Matrix<T>,
    pub k3: Matrix<T>,
    pub basis_label: String,
}

impl<T: Scalar> std::fmt::Debug for OperatorTriple<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorTriple")
            .field("k1", &self.k1)
            .field("k2", &self.k2)
            .field("k3", &self.k3)
            .field("basis_label", &self.basis_label)
            .finish()
    }
}

impl<T: Scalar> OperatorTriple<T> {
    /// Builds the triple with `K3` computed as the commutator.
    pub fn new(k1: Matrix<T>, k2: Matrix<T>, basis_label: impl Into<String>) -> Result<Self> {
        if !k1.is_square() {
            return Err(Error::DimensionMismatch("K1 is not square".into()));
        }
        k1.check_same_shape(&k2, "K1 vs K2")?;
        let k3 = k1.commutator(&k2);
        Ok(Self { k1, k2, k3, basis_label: basis_label.into() })
    }

    /// Takes all three matrices as given; `K3` is not recomputed.
    pub fn from_parts(k1: Matrix<T>, k2: Matrix<T>, k3: Matrix<T>, basis_label: impl Into<String>) -> Result<Self> {
        let t = Self { k1, k2, k3, basis_label: basis_label.into() };
        t.check_dims()?;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.k1.rows()
    }

    fn check_dims(&self) -> Result<()> {
        if !self.k1.is_square() {
            return Err(Error::DimensionMismatch("K1 is not square".into()));
        }
        self.k1.check_same_shape(&self.k2, "K1 vs K2")?;
        self.k1.check_same_shape(&self.k3, "K1 vs K3")
    }

    /// Duality image `(K2, K1, -K3)`.
    pub fn dual(&self) -> Self {
        Self {
            k1: self.k2.clone(),
            k2: self.k1.clone(),
            k3: -&self.k3,
            basis_label: format!("dual({})", self.basis_label),
        }
    }

    /// Simultaneous similarity `P^{-1} K P`.
    pub fn conjugate(&self, p: &Matrix<T>) -> Result<Self> {
        let inv = p.inverse()?;
        let tr = |m: &Matrix<T>| &(&inv * m) * p;
        Ok(Self { k1: tr(&self.k1), k2: tr(&self.k2), k3: tr(&self.k3), basis_label: self.basis_label.clone() })
    }

    pub fn to_f64(&self) -> OperatorTriple<f64> {
        OperatorTriple {
            k1: self.k1.to_f64(),
            k2: self.k2.to_f64(),
            k3: self.k3.to_f64(),
            basis_label: self.basis_label.clone(),
        }
    }
}

/// Reduces general constants to the three-parameter form.
///
/// The map uses `u1 = 1/a2`, `u2 = 1/a1`, `v1 = c2 / 2a2^2`, `v2 = c1 / 2a1^2`.
/// Substituting into the general relations gives
///
/// ```text
/// d'  = u1 u2 d - 2 v1 - 2 v2
/// e1' = u1 u2^2 e1 - v2^2 - 2 v1 v2 - d' v2
/// e2' = u1^2 u2 e2 - v1^2 - 2 v1 v2 - d' v1
/// ```
pub fn canonical_reduce<T: Scalar>(sc: &StructureConstants<T>) -> Result<(ReducedConstants<T>, AffineMap<T>)> {
    if sc.a1.is_zero() || sc.a2.is_zero() {
        return Err(Error::DegenerateAlgebra { a1: sc.a1.to_string(), a2: sc.a2.to_string() });
    }
    let two = T::from_i64(2);
    let u1 = T::one() / sc.a2.clone();
    let u2 = T::one() / sc.a1.clone();
    let v1 = sc.c2.clone() / (two.clone() * sc.a2.clone() * sc.a2.clone());
    let v2 = sc.c1.clone() / (two.clone() * sc.a1.clone() * sc.a1.clone());

    let d = u1.clone() * u2.clone() * sc.d.clone() - two.clone() * v1.clone() - two.clone() * v2.clone();
    let cross = two * v1.clone() * v2.clone();
    let e1 = u1.clone() * u2.clone() * u2.clone() * sc.e1.clone()
        - v2.clone() * v2.clone()
        - cross.clone()
        - d.clone() * v2.clone();
    let e2 = u1.clone() * u1.clone() * u2.clone() * sc.e2.clone() - v1.clone() * v1.clone() - cross - d.clone() * v1.clone();
    Ok((ReducedConstants { d, e1, e2 }, AffineMap { u1, u2, v1, v2 }))
}

/// Right-hand sides of the two quadratic relations.
fn relation_rhs<T: Scalar>(ops: &OperatorTriple<T>, sc: &StructureConstants<T>) -> (Matrix<T>, Matrix<T>) {
    let n = ops.dim();
    let k1sq = &ops.k1 * &ops.k1;
    let k2sq = &ops.k2 * &ops.k2;
    let anti = ops.k1.anticommutator(&ops.k2);
    let rhs_b = &(&(&k2sq.scale(&sc.a2) + &anti.scale(&sc.a1)) + &ops.k1.scale(&sc.c1))
        + &ops.k2.scale(&sc.d).shift(&sc.e1);
    let rhs_c = &(&(&k1sq.scale(&sc.a1) + &anti.scale(&sc.a2)) + &ops.k2.scale(&sc.c2))
        + &ops.k1.scale(&sc.d).shift(&sc.e2);
    debug_assert_eq!(rhs_b.rows(), n);
    (rhs_b, rhs_c)
}

/// Checks the three defining relations on `ops`.
///
/// Exact backend: passes iff every residual is exactly zero. Float backend:
/// passes iff `max|LHS - RHS| <= tol * (1 + max|RHS|)` for each relation.
pub fn verify_relations<T: Scalar>(
    ops: &OperatorTriple<T>,
    sc: &StructureConstants<T>,
    tol: f64,
) -> Result<IdentityReport> {
    ops.check_dims()?;
    let (rhs_b, rhs_c) = relation_rhs(ops, sc);
    let lhs_b = ops.k2.commutator(&ops.k3);
    let lhs_c = ops.k3.commutator(&ops.k1);
    Ok(IdentityReport::new(vec![
        Residual::compare(REL_COMMUTATOR, &ops.k3, &ops.k1.commutator(&ops.k2), tol),
        Residual::compare(REL_K2K3, &lhs_b, &rhs_b, tol),
        Residual::compare(REL_K3K1, &lhs_c, &rhs_c, tol),
    ]))
}

/// Matrix of the Casimir element
///
/// ```text
/// Q = a1{K1^2,K2} + a2{K1,K2^2} + K3^2 + (a1^2+c1)K1^2 + (a2^2+c2)K2^2
///     + (d + a1 a2){K1,K2} + (d a1 + 2 e1) K1 + (d a2 + 2 e2) K2
/// ```
pub fn casimir_matrix<T: Scalar>(ops: &OperatorTriple<T>, sc: &StructureConstants<T>) -> Result<Matrix<T>> {
    ops.check_dims()?;
    let two = T::from_i64(2);
    let k1sq = &ops.k1 * &ops.k1;
    let k2sq = &ops.k2 * &ops.k2;
    let k3sq = &ops.k3 * &ops.k3;
    let terms = [
        k1sq.anticommutator(&ops.k2).scale(&sc.a1),
        ops.k1.anticommutator(&k2sq).scale(&sc.a2),
        k3sq,
        k1sq.scale(&(sc.a1.clone() * sc.a1.clone() + sc.c1.clone())),
        k2sq.scale(&(sc.a2.clone() * sc.a2.clone() + sc.c2.clone())),
        ops.k1.anticommutator(&ops.k2).scale(&(sc.d.clone() + sc.a1.clone() * sc.a2.clone())),
        ops.k1.scale(&(sc.d.clone() * sc.a1.clone() + two.clone() * sc.e1.clone())),
        ops.k2.scale(&(sc.d.clone() * sc.a2.clone() + two * sc.e2.clone())),
    ];
    let n = ops.dim();
    Ok(terms.iter().fold(Matrix::zeros(n, n), |acc, t| &acc + t))
}

/// Returns `q` when `Q = q I` (exactly, or within `tol` on floats).
pub fn casimir_value<T: Scalar>(q: &Matrix<T>, tol: f64) -> Option<T> {
    if q.rows() == 0 {
        return None;
    }
    let v = q[(0, 0)].clone();
    let scaled = Matrix::scalar(q.rows(), v.clone());
    let diff = q - &scaled;
    diff.is_negligible(1.0 + q.max_abs(), tol).then_some(v)
}

//! Finite-dimensional irreducible representations of the reduced
//! Racah-Wilson algebra.
//!
//! In the eigenbasis `psi_0..psi_N` of `K1`:
//!
//! ```text
//! K1 psi_n = lambda_n psi_n,               lambda_n = -(n - sigma)(n - sigma + 1)/2
//! K2 psi_n = A_{n+1} psi_{n+1} + B_n psi_n + A_n psi_{n-1}
//! B_n      = -(lambda_n^2 + d lambda_n + e2) / (2 lambda_n)
//! A_n^2    = (1/4) prod_j (n - sigma - xi_j)(n - sigma + xi_j)
//!            / ((2n - 2sigma)^2 (2n - 2sigma + 1)(2n - 2sigma - 1))
//! ```
//!
//! The four signed roots `xi_j` fix `(d, e1, e2, q)`; see [`params_from_roots`].

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{OperatorTriple, ReducedConstants, StructureConstants};
use crate::error::{Error, Result};
use crate::matrix::{symmetric_eigen, Matrix};
use crate::quartic::{self, Poly};
use crate::scalar::{rational_sqrt, Rational, Scalar};

/// Relative tolerance used when float root data is matched against `g_n`.
const FLOAT_MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrepSpec<T> {
    pub roots: [T; 4],
    pub sigma: T,
    /// Dimension is `n + 1`.
    pub n: usize,
}

/// `(d, e1, e2)` plus the Casimir value `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootParams<T> {
    pub d: T,
    pub e1: T,
    pub e2: T,
    pub q: T,
}

impl<T: Scalar> RootParams<T> {
    pub fn reduced(&self) -> ReducedConstants<T> {
        ReducedConstants::new(self.d.clone(), self.e1.clone(), self.e2.clone())
    }

    pub fn structure_constants(&self) -> StructureConstants<T> {
        self.reduced().to_general()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixElementTable<T> {
    pub lambdas: Vec<T>,
    pub bs: Vec<T>,
    /// `A_1^2 .. A_N^2`
    pub a2s: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Off-diagonals `A_n = +sqrt(A_n^2)` on both sides.
    Symmetric,
    /// Superdiagonal 1, subdiagonal `A_n^2`.
    Monic,
}

impl<T: Scalar> IrrepSpec<T> {
    pub fn new(roots: [T; 4], sigma: T, n: usize) -> Self {
        Self { roots, sigma, n }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn params(&self) -> RootParams<T> {
        params_from_roots(&self.roots)
    }

    pub fn lambdas(&self) -> Vec<T> {
        (0..=self.n as i64).map(|k| lambda_n(&self.sigma, k)).collect()
    }

    pub fn to_f64(&self) -> IrrepSpec<f64> {
        IrrepSpec {
            roots: [0, 1, 2, 3].map(|i| self.roots[i].to_f64()),
            sigma: self.sigma.to_f64(),
            n: self.n,
        }
    }
}

/// `lambda_n = -(n - sigma)(n - sigma + 1) / 2`
pub fn lambda_n<T: Scalar>(sigma: &T, n: i64) -> T {
    lambda_at(sigma, &T::from_i64(n))
}

/// `lambda` at a general (e.g. half-integer) argument.
pub fn lambda_at<T: Scalar>(sigma: &T, t: &T) -> T {
    let u = t.clone() - sigma.clone();
    -(u.clone() * (u + T::one())) * T::half()
}

/// `g(t) = sigma - t`; equals `lambda_t - lambda_{t-1}` at integers.
pub fn g_at<T: Scalar>(sigma: &T, t: &T) -> T {
    sigma.clone() - t.clone()
}

pub fn diagonal_b<T: Scalar>(sigma: &T, d: &T, e2: &T, n: i64) -> Result<T> {
    let lam = lambda_n(sigma, n);
    if lam.is_negligible(1.0, 1e-14) {
        return Err(Error::SingularLambda { n, sigma: sigma.to_string() });
    }
    let num = lam.clone() * lam.clone() + d.clone() * lam.clone() + e2.clone();
    Ok(-num / (T::from_i64(2) * lam))
}

/// Product form of `A_n^2`; no truncation shortcut is applied.
pub fn offdiag_a_squared<T: Scalar>(spec: &IrrepSpec<T>, n: i64) -> Result<T> {
    let u = T::from_i64(n) - spec.sigma.clone();
    let two_u = T::from_i64(2) * u.clone();
    let den = two_u.clone() * two_u.clone() * (two_u.clone() + T::one()) * (two_u - T::one());
    if den.is_negligible(1.0, 1e-14) {
        return Err(Error::SingularDenominator { n, sigma: spec.sigma.to_string() });
    }
    let num = spec
        .roots
        .iter()
        .fold(T::one(), |acc, xi| acc * (u.clone() - xi.clone()) * (u.clone() + xi.clone()));
    Ok(num / den * T::from_ratio(1, 4))
}

fn elementary_symmetric<T: Scalar>(z: &[T; 4]) -> [T; 4] {
    let mut s = [T::zero(), T::zero(), T::zero(), T::zero()];
    for i in 0..4 {
        s[0] = s[0].clone() + z[i].clone();
        for j in i + 1..4 {
            s[1] = s[1].clone() + z[i].clone() * z[j].clone();
            for k in j + 1..4 {
                s[2] = s[2].clone() + z[i].clone() * z[j].clone() * z[k].clone();
            }
        }
    }
    s[3] = z.iter().fold(T::one(), |acc, x| acc * x.clone());
    s
}

/// Structure parameters from signed roots, with `P = xi_1 xi_2 xi_3 xi_4`
/// and `S_k` the elementary symmetric polynomials in `xi_j^2`:
///
/// ```text
/// d  = (S1 - 2)/4
/// e1 = (S1^2 - 4 S2 + 8 P)/64
/// e2 = P/4
/// q  = (4 S1 (1 - P) + 4 S3 - S1^2 - 4)/64
/// ```
///
/// The sign in front of `P` inside `q` follows from matching the linear
/// coefficient of the characteristic quartic with `e2 = P/4`.
pub fn params_from_roots<T: Scalar>(roots: &[T; 4]) -> RootParams<T> {
    let sq = [0, 1, 2, 3].map(|i| roots[i].clone() * roots[i].clone());
    let [s1, s2, s3, _] = elementary_symmetric(&sq);
    let p = roots.iter().fold(T::one(), |acc, x| acc * x.clone());
    let c = |v: i64| T::from_i64(v);
    let d = (s1.clone() - c(2)) / c(4);
    let e1 = (s1.clone() * s1.clone() - c(4) * s2 + c(8) * p.clone()) / c(64);
    let e2 = p.clone() / c(4);
    let q = (c(4) * s1.clone() * (T::one() - p) + c(4) * s3 - s1.clone() * s1 - c(4)) / c(64);
    RootParams { d, e1, e2, q }
}

/// Coefficients (ascending) of the characteristic quartic in `z = g^2`:
///
/// ```text
/// z^4 - (4d+2) z^3 + (4d^2+4d+1+8e2-16e1) z^2 - 4(d^2+2e2+4d e2+4q) z + 16 e2^2
/// ```
pub fn characteristic_polynomial<T: Scalar>(p: &RootParams<T>) -> [T; 5] {
    let c = |v: i64| T::from_i64(v);
    let (d, e1, e2, q) = (p.d.clone(), p.e1.clone(), p.e2.clone(), p.q.clone());
    [
        c(16) * e2.clone() * e2.clone(),
        -(c(4) * (d.clone() * d.clone() + c(2) * e2.clone() + c(4) * d.clone() * e2.clone() + c(4) * q)),
        c(4) * d.clone() * d.clone() + c(4) * d.clone() + T::one() + c(8) * e2 - c(16) * e1,
        -(c(4) * d + c(2)),
        T::one(),
    ]
}

/// Roots of the characteristic quartic and their signed square roots.
#[derive(Clone, Debug)]
pub struct QuarticRoots {
    /// `xi_j^2`, exact ones first.
    pub squares: Vec<Complex64>,
    /// Signed `xi_j` with `prod xi_j = 4 e2`.
    pub roots: Vec<Complex64>,
    /// The subset of `xi_j^2` recovered exactly.
    pub exact_squares: Vec<Rational>,
    /// All four signed roots, when every `xi_j` is rational.
    pub exact_roots: Option<[Rational; 4]>,
}

pub fn roots_from_params<T: Scalar>(params: &RootParams<T>) -> QuarticRoots {
    let coeffs = characteristic_polynomial(params);
    let as_rational = |x: &T| x.to_rational().unwrap_or_else(|| Rational::from_float(x.to_f64()).unwrap_or_default());
    let poly = Poly::new(coeffs.iter().map(as_rational).collect());
    let found = quartic::solve(&poly);
    let squares = found.all_complex();
    let four_e2 = Complex64::new(4.0 * params.e2.to_f64(), 0.0);

    let exact_roots = if found.exact.len() == 4 {
        found
            .exact
            .iter()
            .map(rational_sqrt)
            .collect::<Option<Vec<_>>>()
            .map(|mut xs| {
                let target = as_rational(&params.e2) * Rational::from_i64(4);
                let prod = xs.iter().fold(Rational::from_i64(1), |a, x| a * x);
                if prod == -target.clone() && !target.is_zero() {
                    if let Some(x) = xs.iter_mut().find(|x| !x.is_zero()) {
                        *x = -x.clone();
                    }
                }
                [xs[0].clone(), xs[1].clone(), xs[2].clone(), xs[3].clone()]
            })
    } else {
        None
    };

    let mut roots: Vec<Complex64> = match &exact_roots {
        Some(xs) => xs.iter().map(|x| Complex64::new(x.to_f64(), 0.0)).collect(),
        None => squares.iter().map(|z| z.sqrt()).collect(),
    };
    if exact_roots.is_none() {
        let prod: Complex64 = roots.iter().product();
        if (prod + four_e2).norm() < (prod - four_e2).norm() {
            if let Some(x) = roots.iter_mut().find(|x| x.norm() > 0.0) {
                *x = -*x;
            }
        }
    }
    QuarticRoots { squares, roots, exact_squares: found.exact, exact_roots }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// Root indices `(i, j)` with `g_0 = +-xi_i` and `g_{N+1} = +-xi_j`.
    pub truncation: Option<(usize, usize)>,
    pub positivity: bool,
    pub nondegenerate: bool,
    /// `A_1^2 .. A_N^2` as floats, for display.
    pub a_squared: Vec<f64>,
    /// The sufficient condition for the pattern `xi_1 = sigma`,
    /// `xi_4 = sigma - N - 1`; `None` when the pattern does not apply.
    pub sample_condition: Option<bool>,
    pub problems: Vec<String>,
}

fn same_up_to_sign<T: Scalar>(a: &T, b: &T) -> bool {
    let diff = a.clone() * a.clone() - b.clone() * b.clone();
    let scale = 1.0 + a.to_f64().abs().powi(2) + b.to_f64().abs().powi(2);
    diff.is_negligible(scale, FLOAT_MATCH_TOL)
}

fn equal<T: Scalar>(a: &T, b: &T) -> bool {
    (a.clone() - b.clone()).is_negligible(1.0 + a.to_f64().abs() + b.to_f64().abs(), FLOAT_MATCH_TOL)
}

/// Checks truncation, strict positivity of `A_n^2` for `n = 1..N`, and a
/// non-degenerate `K1` spectrum.
pub fn validate<T: Scalar>(spec: &IrrepSpec<T>) -> ValidityReport {
    let mut problems = Vec::new();
    let n_top = T::from_i64(spec.n as i64 + 1);
    let g0 = spec.sigma.clone();
    let g_top = g_at(&spec.sigma, &n_top);
    let truncation = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && same_up_to_sign(&g0, &spec.roots[i]) && same_up_to_sign(&g_top, &spec.roots[j]));
    if truncation.is_none() {
        problems.push(format!(
            "truncation fails: g_0 = {} and g_{} = {} are not matched by two distinct roots",
            g0, spec.n + 1, g_top
        ));
    }

    let mut positivity = true;
    let mut a_squared = Vec::new();
    for k in 1..=spec.n as i64 {
        match offdiag_a_squared(spec, k) {
            Ok(a2) => {
                a_squared.push(a2.to_f64());
                let strictly_positive = a2.is_positive() && !a2.is_negligible(1.0, 1e-14);
                if !strictly_positive {
                    positivity = false;
                    problems.push(format!("A_{k}^2 = {a2} is not positive"));
                }
            }
            Err(e) => {
                positivity = false;
                problems.push(e.to_string());
            }
        }
    }

    let lambdas = spec.lambdas();
    let mut nondegenerate = true;
    for (i, li) in lambdas.iter().enumerate() {
        if li.is_negligible(1.0, 1e-14) {
            nondegenerate = false;
            problems.push(format!("lambda_{i} = 0 makes B_{i} singular"));
        }
        for (j, lj) in lambdas.iter().enumerate().skip(i + 1) {
            if equal(li, lj) {
                nondegenerate = false;
                problems.push(format!("lambda_{i} = lambda_{j}"));
            }
        }
    }

    let sample_condition = {
        let applies = equal(&spec.roots[0], &spec.sigma) && equal(&spec.roots[3], &g_top);
        applies.then(|| {
            let s = &spec.sigma;
            let half = T::half();
            let sigma_ok = *s < half || *s > T::from_i64(spec.n as i64) + half;
            let sq = |x: &T| x.clone() * x.clone();
            let lower = s.clone() - T::one();
            let upper = s.clone() - T::from_i64(spec.n as i64);
            sigma_ok && sq(&spec.roots[1]) < sq(&lower) && sq(&spec.roots[2]) > sq(&upper)
        })
    };

    let valid = truncation.is_some() && positivity && nondegenerate;
    ValidityReport { valid, truncation, positivity, nondegenerate, a_squared, sample_condition, problems }
}

pub fn matrix_elements<T: Scalar>(spec: &IrrepSpec<T>) -> Result<MatrixElementTable<T>> {
    let p = spec.params();
    let lambdas = spec.lambdas();
    let bs = (0..=spec.n as i64)
        .map(|k| diagonal_b(&spec.sigma, &p.d, &p.e2, k))
        .collect::<Result<Vec<_>>>()?;
    let a2s = (1..=spec.n as i64)
        .map(|k| offdiag_a_squared(spec, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixElementTable { lambdas, bs, a2s })
}

/// `A_0^2 .. A_{N+1}^2` with the truncated ends set to zero.
pub fn a_squared_with_ends<T: Scalar>(spec: &IrrepSpec<T>) -> Result<Vec<T>> {
    let mut v = vec![T::zero()];
    for k in 1..=spec.n as i64 {
        v.push(offdiag_a_squared(spec, k)?);
    }
    v.push(T::zero());
    Ok(v)
}

/// `K1 = diag(lambda)`, `K2` tridiagonal, `K3 = [K1, K2]`.
pub fn build_realization<T: Scalar>(spec: &IrrepSpec<T>, form: Form) -> Result<OperatorTriple<T>> {
    let report = validate(spec);
    if !report.valid {
        return Err(Error::InvalidSpec(report.problems.join("; ")));
    }
    let table = matrix_elements(spec)?;
    let dim = spec.dim();
    let k1 = Matrix::from_diagonal(&table.lambdas);
    let mut k2 = Matrix::from_diagonal(&table.bs);
    for (k, a2) in table.a2s.iter().enumerate() {
        let (up, down) = match form {
            Form::Monic => (T::one(), a2.clone()),
            Form::Symmetric => {
                let a = sqrt_scalar(a2).ok_or_else(|| {
                    Error::InvalidSpec(format!("A_{}^2 = {a2} has no exact square root; use the float backend", k + 1))
                })?;
                (a.clone(), a)
            }
        };
        k2[(k, k + 1)] = up;
        k2[(k + 1, k)] = down;
    }
    debug_assert_eq!(k2.rows(), dim);
    let label = match form {
        Form::Monic => "psi (monic)",
        Form::Symmetric => "psi (orthonormal)",
    };
    OperatorTriple::new(k1, k2, label)
}

fn sqrt_scalar<T: Scalar>(x: &T) -> Option<T> {
    if T::EXACT {
        x.to_rational().and_then(|r| rational_sqrt(&r)).map(|r| T::from_rational(&r))
    } else {
        let v = x.to_f64();
        (v >= 0.0).then(|| T::from_f64(v.sqrt()))
    }
}

/// Symmetric float realization regardless of the input backend.
pub fn build_symmetric_f64<T: Scalar>(spec: &IrrepSpec<T>) -> Result<OperatorTriple<f64>> {
    let report = validate(spec);
    if !report.valid {
        return Err(Error::InvalidSpec(report.problems.join("; ")));
    }
    let table = matrix_elements(spec)?;
    let k1 = Matrix::from_diagonal(&table.lambdas.iter().map(Scalar::to_f64).collect::<Vec<_>>());
    let mut k2 = Matrix::from_diagonal(&table.bs.iter().map(Scalar::to_f64).collect::<Vec<_>>());
    for (k, a2) in table.a2s.iter().enumerate() {
        let a = a2.to_f64().sqrt();
        k2[(k, k + 1)] = a;
        k2[(k + 1, k)] = a;
    }
    OperatorTriple::new(k1, k2, "psi (orthonormal)")
}

/// `D = diag(1, A_1, A_1 A_2, ...)`, so that `D^{-1} K2_monic D` is symmetric.
pub fn monic_to_symmetric_similarity(a2s: &[f64]) -> Matrix<f64> {
    let mut diag = vec![1.0];
    for a2 in a2s {
        let last = *diag.last().unwrap_or(&1.0);
        diag.push(last * a2.sqrt());
    }
    Matrix::from_diagonal(&diag)
}

/// Residuals of the two-step recurrence for `A_n^2`, `n = 0..N`:
///
/// ```text
/// 2 { g_{n+3/2} A_{n+1}^2 - g_{n-1/2} A_n^2 } - (B_n^2 + (2 lambda_n + d) B_n + e1)
/// ```
pub fn recurrence_residuals<T: Scalar>(spec: &IrrepSpec<T>) -> Result<Vec<T>> {
    let p = spec.params();
    let a2 = a_squared_with_ends(spec)?;
    let two = T::from_i64(2);
    (0..=spec.n)
        .map(|k| {
            let n = T::from_i64(k as i64);
            let b = diagonal_b(&spec.sigma, &p.d, &p.e2, k as i64)?;
            let lam = lambda_n(&spec.sigma, k as i64);
            let up = g_at(&spec.sigma, &(n.clone() + T::from_ratio(3, 2))) * a2[k + 1].clone();
            let down = g_at(&spec.sigma, &(n - T::half())) * a2[k].clone();
            let lhs = two.clone() * (up - down);
            let rhs = b.clone() * b.clone() + (two.clone() * lam + p.d.clone()) * b + p.e1.clone();
            Ok(lhs - rhs)
        })
        .collect()
}

/// `mu_s = -(s - nu)(s - nu + 1)/2`, the `K2` spectrum.
pub fn dual_spectrum<T: Scalar>(nu_offset: &T, s: i64) -> T {
    lambda_n(nu_offset, s)
}

/// The spec of the dual representation (`K1 <-> K2`, `e1 <-> e2`): roots of the
/// swapped parameters and the offset `nu` that truncates them at `N`.
pub fn dual_spec<T: Scalar>(spec: &IrrepSpec<T>) -> Result<IrrepSpec<T>> {
    let p = spec.params();
    let swapped = RootParams { d: p.d.clone(), e1: p.e2.clone(), e2: p.e1.clone(), q: p.q.clone() };
    let found = roots_from_params(&swapped);
    let roots: [T; 4] = match (&found.exact_roots, T::EXACT) {
        (Some(xs), _) => [0, 1, 2, 3].map(|i| T::from_rational(&xs[i])),
        (None, true) => {
            return Err(Error::InvalidSpec("dual roots are not rational; use the float backend".into()));
        }
        (None, false) => {
            if found.roots.iter().any(|z| z.im.abs() > 1e-8 * (1.0 + z.re.abs())) {
                return Err(Error::InvalidSpec("dual roots are complex".into()));
            }
            [0, 1, 2, 3].map(|i| T::from_f64(found.roots[i].re))
        }
    };
    let n1 = T::from_i64(spec.n as i64 + 1);
    let mut candidates = Vec::new();
    for i in 0..4 {
        for sign in [T::one(), -T::one()] {
            let nu = sign * roots[i].clone();
            let top = nu.clone() - n1.clone();
            if (0..4).any(|j| j != i && same_up_to_sign(&top, &roots[j])) {
                candidates.push(nu);
            }
        }
    }
    candidates
        .into_iter()
        .map(|nu| IrrepSpec::new(roots.clone(), nu, spec.n))
        .find(|cand| validate(cand).valid)
        .ok_or_else(|| Error::InvalidSpec("no admissible dual truncation".into()))
}

/// Unit Euclidean norm with the first nonzero entry positive.
pub fn normalize_eigenvector(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let first = v.iter().copied().find(|x| x.abs() > 1e-12 * norm).unwrap_or(1.0);
    let s = first.signum() / norm;
    for x in v.iter_mut() {
        *x *= s;
    }
}

/// Diagonalizes `K2` of the symmetric realization and conjugates `K1` into
/// that eigenbasis. Returns `max |entry outside the tridiagonal band| / (1 + max|K1|)`.
pub fn leonard_pair_residual<T: Scalar>(spec: &IrrepSpec<T>) -> Result<f64> {
    let ops = build_symmetric_f64(spec)?;
    let (_, mut vecs) = symmetric_eigen(&ops.k2);
    for j in 0..vecs.cols() {
        let mut col = vecs.column(j);
        normalize_eigenvector(&mut col);
        for (i, x) in col.into_iter().enumerate() {
            vecs[(i, j)] = x;
        }
    }
    let t = &(&vecs.transpose() * &ops.k1) * &vecs;
    let mut worst: f64 = 0.0;
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            if i.abs_diff(j) > 1 {
                worst = worst.max(t[(i, j)].abs());
            }
        }
    }
    Ok(worst / (1.0 + ops.k1.max_abs()))
}

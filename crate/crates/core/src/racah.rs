//! Racah polynomials `R_n(lambda(x); alpha, beta, gamma, delta)` on the
//! quadratic lattice `lambda(x) = x (x + gamma + delta + 1)`.
//!
//! Three independent evaluation routes are provided: the terminating 4F3
//! sum, the three-term recurrence in `n`, and eigenvectors of the
//! second-order difference operator in `x`.

use serde::{Deserialize, Serialize};

use crate::algebra::{OperatorTriple, ReducedConstants, StructureConstants};
use crate::error::{Error, Result};
use crate::irreps::IrrepSpec;
use crate::matrix::Matrix;
use crate::scalar::{pochhammer, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RacahParams<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
    pub n: usize,
}

/// Which of the three termination conditions holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// `alpha + 1 = -N`
    Alpha,
    /// `beta + delta + 1 = -N`
    BetaDelta,
    /// `gamma + 1 = -N`
    Gamma,
}

impl<T: Scalar> RacahParams<T> {
    /// At least one termination condition must hold. Several may hold at
    /// once; that is what makes both orders in the duality relation finite.
    pub fn new(alpha: T, beta: T, gamma: T, delta: T, n: usize) -> Result<Self> {
        let p = Self { alpha, beta, gamma, delta, n };
        if p.truncations().is_empty() {
            return Err(Error::InvalidRacahParams(format!(
                "none of alpha+1, beta+delta+1, gamma+1 equals -N = -{n}"
            )));
        }
        Ok(p)
    }

    pub fn truncations(&self) -> Vec<Truncation> {
        let target = -T::from_i64(self.n as i64);
        let hits = |v: T| (v - target.clone()).is_negligible(1.0 + self.n as f64, 1e-12);
        let mut out = Vec::new();
        if hits(self.alpha.clone() + T::one()) {
            out.push(Truncation::Alpha);
        }
        if hits(self.beta.clone() + self.delta.clone() + T::one()) {
            out.push(Truncation::BetaDelta);
        }
        if hits(self.gamma.clone() + T::one()) {
            out.push(Truncation::Gamma);
        }
        out
    }

    /// `lambda(x) = x (x + gamma + delta + 1)`
    pub fn lambda(&self, x: usize) -> T {
        let x = T::from_i64(x as i64);
        x.clone() * (x + self.gamma.clone() + self.delta.clone() + T::one())
    }

    /// `mu_n = n (n + alpha + beta + 1)`
    pub fn mu(&self, n: usize) -> T {
        let n = T::from_i64(n as i64);
        n.clone() * (n + self.alpha.clone() + self.beta.clone() + T::one())
    }

    /// `(gamma, delta, alpha, beta)`, the parameters of the dual family.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.gamma.clone(),
            beta: self.delta.clone(),
            gamma: self.alpha.clone(),
            delta: self.beta.clone(),
            n: self.n,
        }
    }

    pub fn to_f64(&self) -> RacahParams<f64> {
        RacahParams {
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            gamma: self.gamma.to_f64(),
            delta: self.delta.to_f64(),
            n: self.n,
        }
    }

    fn check_range(&self, n: usize, x: usize) -> Result<()> {
        if n > self.n || x > self.n {
            return Err(Error::InvalidRacahParams(format!("(n, x) = ({n}, {x}) outside 0..={}", self.n)));
        }
        Ok(())
    }
}

fn vanishes<T: Scalar>(v: &T) -> bool {
    v.is_negligible(1.0, 1e-13)
}

/// `(alpha+1)_n (beta+delta+1)_n (gamma+1)_n / (n+alpha+beta+1)_n`
pub fn monic_prefactor<T: Scalar>(p: &RacahParams<T>, n: usize) -> Result<T> {
    let den = pochhammer(&(T::from_i64(n as i64) + p.alpha.clone() + p.beta.clone() + T::one()), n);
    if vanishes(&den) {
        return Err(Error::PochhammerPole(format!("(n+alpha+beta+1)_n vanishes at n = {n}")));
    }
    let num = pochhammer(&(p.alpha.clone() + T::one()), n)
        * pochhammer(&(p.beta.clone() + p.delta.clone() + T::one()), n)
        * pochhammer(&(p.gamma.clone() + T::one()), n);
    Ok(num / den)
}

/// Terminating sum
/// `4F3(-n, n+alpha+beta+1, -x, x+gamma+delta+1; alpha+1, beta+delta+1, gamma+1; 1)`,
/// times [`monic_prefactor`] when `monic` is set.
pub fn racah_hypergeometric<T: Scalar>(n: usize, x: usize, p: &RacahParams<T>, monic: bool) -> Result<T> {
    p.check_range(n, x)?;
    let top = n.min(x);
    let lower = [
        p.alpha.clone() + T::one(),
        p.beta.clone() + p.delta.clone() + T::one(),
        p.gamma.clone() + T::one(),
    ];
    for k in 0..top {
        let kk = T::from_i64(k as i64);
        if let Some(b) = lower.iter().find(|b| vanishes(&((*b).clone() + kk.clone()))) {
            return Err(Error::PochhammerPole(format!(
                "lower parameter {b} hits a pole at k = {} for (n, x) = ({n}, {x})",
                k + 1
            )));
        }
    }
    let upper = [
        -T::from_i64(n as i64),
        T::from_i64(n as i64) + p.alpha.clone() + p.beta.clone() + T::one(),
        -T::from_i64(x as i64),
        T::from_i64(x as i64) + p.gamma.clone() + p.delta.clone() + T::one(),
    ];
    let mut term = T::one();
    let mut sum = T::one();
    for k in 0..top {
        let kk = T::from_i64(k as i64);
        let num = upper.iter().fold(T::one(), |acc, a| acc * (a.clone() + kk.clone()));
        let den = lower.iter().fold(T::from_i64(k as i64 + 1), |acc, b| acc * (b.clone() + kk.clone()));
        term = term * num / den;
        sum = sum + term.clone();
    }
    if monic {
        Ok(monic_prefactor(p, n)? * sum)
    } else {
        Ok(sum)
    }
}

/// `(C_n, D_n)` of the recurrence
/// `lambda(x) R_n = C_n R_{n+1} - (C_n + D_n) R_n + D_n R_{n-1}`.
pub fn recurrence_coefficients<T: Scalar>(p: &RacahParams<T>, n: usize) -> Result<(T, T)> {
    let nn = T::from_i64(n as i64);
    let ab = p.alpha.clone() + p.beta.clone();
    let c_den = (T::from_i64(2) * nn.clone() + ab.clone() + T::one()) * (T::from_i64(2) * nn.clone() + ab.clone() + T::from_i64(2));
    if vanishes(&c_den) {
        return Err(Error::RecurrenceBreakdown { n, detail: "C_n denominator vanishes".into() });
    }
    let c = (nn.clone() + p.alpha.clone() + T::one())
        * (nn.clone() + ab.clone() + T::one())
        * (nn.clone() + p.gamma.clone() + T::one())
        * (nn.clone() + p.beta.clone() + p.delta.clone() + T::one())
        / c_den;
    if n == 0 {
        return Ok((c, T::zero()));
    }
    let d_den = (T::from_i64(2) * nn.clone() + ab.clone()) * (T::from_i64(2) * nn.clone() + ab.clone() + T::one());
    if vanishes(&d_den) {
        return Err(Error::RecurrenceBreakdown { n, detail: "D_n denominator vanishes".into() });
    }
    let d = nn.clone()
        * (nn.clone() + p.beta.clone())
        * (nn.clone() + p.alpha.clone() - p.delta.clone())
        * (nn + ab - p.gamma.clone())
        / d_den;
    Ok((c, d))
}

/// Non-monic `R_n(lambda(x))` by forward recurrence from `R_0 = 1`.
pub fn racah_recurrence_eval<T: Scalar>(n: usize, x: usize, p: &RacahParams<T>) -> Result<T> {
    p.check_range(n, x)?;
    let lam = p.lambda(x);
    let (mut prev, mut cur) = (T::zero(), T::one());
    for k in 0..n {
        let (c, d) = recurrence_coefficients(p, k)?;
        if vanishes(&c) {
            return Err(Error::RecurrenceBreakdown { n: k, detail: "C_n = 0".into() });
        }
        let next = ((lam.clone() + c.clone() + d.clone()) * cur.clone() - d * prev) / c;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Monic `R^_n(lambda(x))` from
/// `R^_{n+1} = (lambda + C_n + D_n) R^_n - C_{n-1} D_n R^_{n-1}`.
pub fn racah_recurrence_eval_monic<T: Scalar>(n: usize, x: usize, p: &RacahParams<T>) -> Result<T> {
    p.check_range(n, x)?;
    monic_values(n, &p.lambda(x), p)
}

fn monic_values<T: Scalar>(n: usize, y: &T, p: &RacahParams<T>) -> Result<T> {
    let (mut prev, mut cur) = (T::zero(), T::one());
    let mut c_prev = T::zero();
    for k in 0..n {
        let (c, d) = recurrence_coefficients(p, k)?;
        let next = (y.clone() + c.clone() + d.clone()) * cur.clone() - c_prev * d * prev;
        prev = cur;
        cur = next;
        c_prev = c;
    }
    Ok(cur)
}

/// `(B~_n, A~_n^2) = (-(C_n + D_n), C_{n-1} D_n)` for `n = 0..N`; `A~_0^2 = 0`.
pub fn monic_recurrence_coefficients<T: Scalar>(p: &RacahParams<T>) -> Result<Vec<(T, T)>> {
    let mut out = Vec::with_capacity(p.n + 1);
    let mut c_prev = T::zero();
    for k in 0..=p.n {
        let (c, d) = recurrence_coefficients(p, k)?;
        out.push((-(c.clone() + d.clone()), c_prev * d));
        c_prev = c;
    }
    Ok(out)
}

/// Monic Jacobi matrix: diagonal `B~_n`, superdiagonal 1, subdiagonal `A~_n^2`.
/// Its spectrum is `{lambda(x) : x = 0..N}`.
pub fn monic_jacobi_matrix<T: Scalar>(p: &RacahParams<T>) -> Result<Matrix<T>> {
    let coeffs = monic_recurrence_coefficients(p)?;
    let dim = p.n + 1;
    let mut m = Matrix::zeros(dim, dim);
    for (k, (b, a2)) in coeffs.into_iter().enumerate() {
        m[(k, k)] = b;
        if k > 0 {
            m[(k - 1, k)] = T::one();
            m[(k, k - 1)] = a2;
        }
    }
    Ok(m)
}

/// `B(x)`, coefficient of `T+`.
pub fn b_coeff<T: Scalar>(p: &RacahParams<T>, x: usize) -> Result<T> {
    let xx = T::from_i64(x as i64);
    let gd = p.gamma.clone() + p.delta.clone();
    let den = (T::from_i64(2) * xx.clone() + gd.clone() + T::one()) * (T::from_i64(2) * xx.clone() + gd.clone() + T::from_i64(2));
    if vanishes(&den) {
        return Err(Error::CoefficientPole { x });
    }
    Ok((xx.clone() + p.alpha.clone() + T::one())
        * (xx.clone() + p.beta.clone() + p.delta.clone() + T::one())
        * (xx.clone() + p.gamma.clone() + T::one())
        * (xx + gd + T::one())
        / den)
}

/// `E(x)`, coefficient of `T-`. `E(0) = 0` through the factor `x`.
pub fn e_coeff<T: Scalar>(p: &RacahParams<T>, x: usize) -> Result<T> {
    if x == 0 {
        return Ok(T::zero());
    }
    let xx = T::from_i64(x as i64);
    let gd = p.gamma.clone() + p.delta.clone();
    let den = (T::from_i64(2) * xx.clone() + gd.clone()) * (T::from_i64(2) * xx.clone() + gd.clone() + T::one());
    if vanishes(&den) {
        return Err(Error::CoefficientPole { x });
    }
    Ok(xx.clone()
        * (xx.clone() - p.alpha.clone() + gd)
        * (xx.clone() - p.beta.clone() + p.gamma.clone())
        * (xx + p.delta.clone())
        / den)
}

/// Matrix of `B(x) T+ - (B(x) + E(x)) + E(x) T-` on grid functions `x = 0..N`.
pub fn difference_matrix<T: Scalar>(p: &RacahParams<T>) -> Result<Matrix<T>> {
    let dim = p.n + 1;
    let mut m = Matrix::zeros(dim, dim);
    for x in 0..dim {
        let b = b_coeff(p, x)?;
        let e = e_coeff(p, x)?;
        m[(x, x)] = -(b.clone() + e.clone());
        if x + 1 < dim {
            m[(x, x + 1)] = b;
        }
        if x > 0 {
            m[(x, x - 1)] = e;
        }
    }
    Ok(m)
}

/// Applies the difference operator to grid values `f(0..N)`.
pub fn difference_apply<T: Scalar>(f: &[T], p: &RacahParams<T>) -> Result<Vec<T>> {
    if f.len() != p.n + 1 {
        return Err(Error::DimensionMismatch(format!("grid has {} points, expected {}", f.len(), p.n + 1)));
    }
    Ok(difference_matrix(p)?.mul_vec(f))
}

/// `R_n` sampled on the grid as the eigenvector of the difference operator
/// for `mu_n`, scaled so that `R_n(lambda(0)) = 1`.
pub fn difference_eigenfunction<T: Scalar>(n: usize, p: &RacahParams<T>) -> Result<Vec<T>> {
    p.check_range(n, 0)?;
    let shifted = difference_matrix(p)?.shift(&-p.mu(n));
    let (basis, _) = shifted.nullspace();
    if basis.cols() != 1 {
        return Err(Error::Numerical(format!(
            "eigenspace of mu_{n} has dimension {} (expected 1)",
            basis.cols()
        )));
    }
    let v = basis.column(0);
    if vanishes(&v[0]) {
        return Err(Error::Numerical(format!("eigenvector for mu_{n} vanishes at x = 0")));
    }
    let scale = v[0].clone();
    Ok(v.into_iter().map(|c| c / scale.clone()).collect())
}

/// `a1 = a2 = -2` and the accompanying constants realized by
/// `K1 = lambda(x)`, `K2` = difference operator.
pub fn difference_constants<T: Scalar>(p: &RacahParams<T>) -> StructureConstants<T> {
    let (a, b, g, dl) = (p.alpha.clone(), p.beta.clone(), p.gamma.clone(), p.delta.clone());
    let one = T::one();
    let two = T::from_i64(2);
    let ab = a.clone() + b.clone();
    let gd = g.clone() + dl.clone();
    StructureConstants {
        a1: -two.clone(),
        a2: -two.clone(),
        c1: -(ab.clone() * (two.clone() + ab.clone())),
        c2: -(gd.clone() * (two.clone() + gd.clone())),
        d: b.clone() * (dl.clone() - g.clone() - two.clone())
            - a.clone() * (two.clone() * b.clone() + g.clone() + dl.clone() + two.clone())
            - two * (g.clone() + one.clone()) * (dl.clone() + one.clone()),
        e1: -((a.clone() + one.clone()) * ab * (b.clone() + dl.clone() + one.clone()) * (g.clone() + one.clone())),
        e2: -((a + one.clone()) * (b + dl + one.clone()) * (g + one) * gd),
    }
}

/// Reduced constants in closed form. `d` is the `(alpha, beta)`-centred
/// expression; [`reduced_d_dual_form`] gives the `(gamma, delta)` one.
pub fn reduced_closed_form<T: Scalar>(p: &RacahParams<T>) -> ReducedConstants<T> {
    let quarter = T::from_ratio(1, 4);
    let h = T::half();
    let (a, b, g, dl) = (p.alpha.clone(), p.beta.clone(), p.gamma.clone(), p.delta.clone());
    let amb = (a.clone() - b.clone()) * h.clone();
    let apb = (a.clone() + b.clone()) * h.clone();
    let gmd = (g.clone() - dl.clone()) * h.clone();
    let gpd = (g.clone() + dl.clone()) * h;
    let e1 = quarter.clone() * amb.clone() * apb.clone() * (apb.clone() - g.clone()) * (amb.clone() - dl.clone());
    let e2 = quarter.clone() * gmd.clone() * gpd.clone() * (gpd.clone() - a) * (gmd - b);
    let sq = |x: T| x.clone() * x;
    let d = quarter
        * (sq(amb.clone()) + sq(apb.clone()) + sq(apb - g) + sq(amb - dl) - T::from_i64(2));
    ReducedConstants::new(d, e1, e2)
}

pub fn reduced_d_dual_form<T: Scalar>(p: &RacahParams<T>) -> T {
    reduced_closed_form(&p.swapped()).d
}

/// `K1 = diag(lambda(x))`, `K2` = difference operator, `K3 = [K1, K2]`,
/// with the general constants of [`difference_constants`].
pub fn realize_difference_algebra<T: Scalar>(p: &RacahParams<T>) -> Result<(OperatorTriple<T>, StructureConstants<T>)> {
    let k1 = Matrix::from_diagonal(&(0..=p.n).map(|x| p.lambda(x)).collect::<Vec<_>>());
    let k2 = difference_matrix(p)?;
    Ok((OperatorTriple::new(k1, k2, "grid x = 0..N")?, difference_constants(p)))
}

/// Closed form of `K3`: `(2x+gamma+delta) E(x) T- - (2x+gamma+delta+2) B(x) T+`.
pub fn k3_closed_form<T: Scalar>(p: &RacahParams<T>) -> Result<Matrix<T>> {
    let dim = p.n + 1;
    let gd = p.gamma.clone() + p.delta.clone();
    let mut m = Matrix::zeros(dim, dim);
    for x in 0..dim {
        let two_x = T::from_i64(2 * x as i64);
        if x + 1 < dim {
            m[(x, x + 1)] = -((two_x.clone() + gd.clone() + T::from_i64(2)) * b_coeff(p, x)?);
        }
        if x > 0 {
            m[(x, x - 1)] = (two_x + gd.clone()) * e_coeff(p, x)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub n: usize,
    pub x: usize,
    pub lhs: String,
    pub rhs: String,
    pub relative: f64,
    pub passed: bool,
}

/// `R_n(lambda(x); alpha, beta, gamma, delta) = R_x(lambda(n); gamma, delta, alpha, beta)`.
///
/// The swap exchanges the `alpha` and `gamma` truncations and keeps the
/// `beta + delta` one, so both orders are defined whenever `p` is.
pub fn duality_check<T: Scalar>(p: &RacahParams<T>, n: usize, x: usize, tol: f64) -> Result<DualityReport> {
    let dual = RacahParams::new(p.gamma.clone(), p.delta.clone(), p.alpha.clone(), p.beta.clone(), p.n)?;
    let lhs = racah_hypergeometric(n, x, p, false)?;
    let rhs = racah_hypergeometric(x, n, &dual, false)?;
    let diff = lhs.clone() - rhs.clone();
    let relative = diff.to_f64().abs() / (1.0 + rhs.to_f64().abs());
    let passed = if T::EXACT { diff.is_zero() } else { relative <= tol };
    Ok(DualityReport { n, x, lhs: lhs.to_canonical_string(), rhs: rhs.to_canonical_string(), relative, passed })
}

/// Maps an irrep truncated through `g_0 = sigma = xi_1`, `g_{N+1} = xi_4`
/// to Racah parameters and the shift `tau = (2+gamma+delta)(gamma+delta)/8`.
///
/// Solves `xi_1 = -(alpha+beta)/2`, `xi_2 = (beta-alpha)/2 + delta`,
/// `xi_3 = (beta-alpha)/2`, `xi_4 = gamma - (alpha+beta)/2`.
pub fn irrep_to_racah<T: Scalar>(spec: &IrrepSpec<T>) -> Result<(RacahParams<T>, T)> {
    let [x1, x2, x3, x4] = spec.roots.clone();
    let top = spec.sigma.clone() - T::from_i64(spec.n as i64 + 1);
    let tol = 1.0 + spec.sigma.to_f64().abs() + spec.n as f64;
    if !(x1.clone() - spec.sigma.clone()).is_negligible(tol, 1e-12) || !(x4.clone() - top).is_negligible(tol, 1e-12) {
        return Err(Error::PatternMismatch(format!(
            "expected xi_1 = sigma and xi_4 = sigma - N - 1, got xi = ({x1}, {x2}, {x3}, {x4}), sigma = {}",
            spec.sigma
        )));
    }
    let alpha = -(x1.clone() + x3.clone());
    let beta = x3.clone() - x1.clone();
    let gamma = x4 - x1;
    let delta = x2 - x3;
    let tau = (T::from_i64(2) + gamma.clone() + delta.clone()) * (gamma.clone() + delta.clone()) / T::from_i64(8);
    Ok((RacahParams::new(alpha, beta, gamma, delta, spec.n)?, tau))
}

/// Inverse of [`irrep_to_racah`]: roots from the parametrization and
/// `sigma = xi_1`.
pub fn racah_to_irrep<T: Scalar>(p: &RacahParams<T>) -> IrrepSpec<T> {
    let h = T::half();
    let apb = (p.alpha.clone() + p.beta.clone()) * h.clone();
    let bma = (p.beta.clone() - p.alpha.clone()) * h;
    let roots = [-apb.clone(), bma.clone() + p.delta.clone(), bma, p.gamma.clone() - apb.clone()];
    IrrepSpec::new(roots, -apb, p.n)
}

/// Orthonormal eigenvector components of the symmetric `K2` for eigenvalue
/// `mu = -lambda(x)/2 - tau`, built from monic Racah values:
/// `v_n = p_n(mu) / (A_1 ... A_n)`, `p_n(mu) = (-2)^{-n} R^_n(lambda(x))`,
/// normalized to unit length with `v_0 > 0`.
pub fn normalized_polynomial_row(p: &RacahParams<f64>, x: usize, a2s: &[f64]) -> Result<Vec<f64>> {
    let mut row = Vec::with_capacity(p.n + 1);
    let mut a_prod = 1.0;
    let mut scale = 1.0;
    for n in 0..=p.n {
        if n > 0 {
            a_prod *= a2s[n - 1].sqrt();
            scale *= -2.0;
        }
        let r = racah_hypergeometric(n, x, p, true)?;
        row.push(r / scale / a_prod);
    }
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = if row[0] < 0.0 { -1.0 } else { 1.0 } / norm;
    Ok(row.into_iter().map(|v| v * s).collect())
}

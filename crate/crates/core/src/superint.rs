//! The generic 3-parameter superintegrable model on the 2-sphere, through
//! its su(1,1) description: `nu_i = (k_i + 1)/2`, `a_i = k_i^2 - 1/4`,
//!
//! ```text
//! L3 = 4 C^(12) - a1 - a2 + 1,  L1 = 4 C^(23) - a2 - a3 + 1,  L2 = 4 C^(31) - a3 - a1 + 1
//! H  = 4 C^(4) + 3/4,           R  = [L1, L2]
//! ```

use serde::{Deserialize, Serialize};

use crate::coupling::{
    coupled_basis, overlap_table, racah_coefficients, CoupledSpace, CouplingSpec, CrossTerm, FockBlock, Num, Pair,
    RacahTable,
};
use crate::error::{Error, Result};
use crate::matrix::{count_distinct, symmetric_eigen, Matrix};
use crate::report::{IdentityReport, Residual};
use crate::scalar::Scalar;

pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub k: [T; 3],
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(k: [T; 3]) -> Result<Self> {
        if let Some(bad) = k.iter().find(|v| **v <= -T::one()) {
            return Err(Error::InvalidParams(format!("k_i must exceed -1, got {bad}")));
        }
        Ok(Self { k })
    }

    /// `a_i = k_i^2 - 1/4`
    pub fn a(&self) -> [T; 3] {
        [0, 1, 2].map(|i| self.k[i].clone() * self.k[i].clone() - T::from_ratio(1, 4))
    }

    /// `nu_i = (k_i + 1)/2`
    pub fn nu(&self) -> [T; 3] {
        [0, 1, 2].map(|i| (self.k[i].clone() + T::one()) * T::half())
    }

    pub fn coupling_spec(&self, n: usize) -> Result<CouplingSpec<T>> {
        CouplingSpec::new(self.nu(), n)
    }
}

/// Where the operators act.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subspace {
    /// All of `n1 + n2 + n3 = N`; `H` takes the values `E_0..E_N` there.
    Grade,
    /// Lowest-weight vectors of the grade; `H = E_N` there.
    LowestWeight,
}

#[derive(Clone)]
pub struct SymmetryQuadruple<T> {
    pub l1: Matrix<T>,
    pub l2: Matrix<T>,
    pub l3: Matrix<T>,
    pub r: Matrix<T>,
    pub h: Matrix<T>,
    pub params: ModelParams<T>,
    pub n: usize,
    pub subspace: Subspace,
}

impl<T: Scalar> SymmetryQuadruple<T> {
    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// `L_i`, one-based.
    pub fn l(&self, i: usize) -> &Matrix<T> {
        match i {
            1 => &self.l1,
            2 => &self.l2,
            _ => &self.l3,
        }
    }
}

/// Symmetries on the whole grade `N`.
pub fn build_symmetries<T: Scalar>(params: &ModelParams<T>, n: usize) -> Result<SymmetryQuadruple<T>> {
    build_symmetries_on(params, n, Subspace::Grade)
}

pub fn build_symmetries_on<T: Scalar>(params: &ModelParams<T>, n: usize, subspace: Subspace) -> Result<SymmetryQuadruple<T>> {
    let spec = params.coupling_spec(n)?;
    let (c12, c23, c31, c4) = match subspace {
        Subspace::Grade => {
            let block = FockBlock::grade(spec.nu.clone(), n);
            (
                block.intermediate_casimir(Pair::P12, CrossTerm::Symmetric),
                block.intermediate_casimir(Pair::P23, CrossTerm::Symmetric),
                block.intermediate_casimir(Pair::P31, CrossTerm::Symmetric),
                block.total_casimir_sum(),
            )
        }
        Subspace::LowestWeight => {
            let space = CoupledSpace::new(&spec)?;
            (
                space.intermediate_casimir(Pair::P12),
                space.intermediate_casimir(Pair::P23),
                space.intermediate_casimir(Pair::P31),
                space.restrict(&space.block.total_casimir_sum()),
            )
        }
    };
    let [a1, a2, a3] = params.a();
    let four = T::from_i64(4);
    let sym = |c: &Matrix<T>, x: &T, y: &T| c.scale(&four).shift(&(T::one() - x.clone() - y.clone()));
    let l3 = sym(&c12, &a1, &a2);
    let l1 = sym(&c23, &a2, &a3);
    let l2 = sym(&c31, &a3, &a1);
    let r = l1.commutator(&l2);
    let h = c4.scale(&four).shift(&T::from_ratio(3, 4));
    Ok(SymmetryQuadruple { l1, l2, l3, r, h, params: params.clone(), n, subspace })
}

/// Additive offsets for the constant terms, used to test that the checker
/// notices a wrong coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation<T> {
    /// Added to `8 (a_j - a_k)` in the `[L_i, R]` relations.
    pub commutator_constant: T,
    /// Added to the constant part of the `R^2` relation.
    pub square_constant: T,
}

impl<T: Scalar> Default for Perturbation<T> {
    fn default() -> Self {
        Self { commutator_constant: T::zero(), square_constant: T::zero() }
    }
}

pub const REL_H_SUM: &str = "H=L1+L2+L3+a1+a2+a3";
pub const REL_R_SQUARED: &str = "R^2";

/// `[H, L_i] = 0`, the sum rule for `H`, the three `[L_i, R]` relations
/// and the cubic relation for `R^2`.
pub fn verify_symmetry_algebra<T: Scalar>(sq: &SymmetryQuadruple<T>, tol: f64) -> IdentityReport {
    verify_symmetry_algebra_with(sq, tol, &Perturbation::default())
}

pub fn verify_symmetry_algebra_with<T: Scalar>(sq: &SymmetryQuadruple<T>, tol: f64, pert: &Perturbation<T>) -> IdentityReport {
    let a = sq.params.a();
    let dim = sq.dim();
    let zero = Matrix::<T>::zeros(dim, dim);
    let c = |v: i64| T::from_i64(v);
    let mut out = Vec::new();

    for i in 1..=3 {
        out.push(Residual::compare(format!("[H,L{i}]=0"), &sq.h.commutator(sq.l(i)), &zero, tol));
    }
    let sum_a = a.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let sum_l = &(&sq.l1 + &sq.l2) + &sq.l3;
    out.push(Residual::compare(REL_H_SUM, &sq.h, &sum_l.shift(&sum_a), tol));

    for (i, j, k) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
        let (li, lj, lk) = (sq.l(i), sq.l(j), sq.l(k));
        let (aj, ak) = (a[j - 1].clone(), a[k - 1].clone());
        let lhs = li.commutator(&sq.r);
        let rhs = &(&(&li.anticommutator(lj).scale(&c(4)) - &li.anticommutator(lk).scale(&c(4)))
            - &lj.scale(&(c(8) - c(16) * aj.clone())))
            + &lk.scale(&(c(8) - c(16) * ak.clone()));
        let rhs = rhs.shift(&(c(8) * (aj - ak) + pert.commutator_constant.clone()));
        out.push(Residual::compare(format!("[L{i},R]"), &lhs, &rhs, tol));
    }

    let (l1, l2, l3) = (&sq.l1, &sq.l2, &sq.l3);
    let triple = [
        &(l1 * l2) * l3,
        &(l1 * l3) * l2,
        &(l2 * l1) * l3,
        &(l2 * l3) * l1,
        &(l3 * l1) * l2,
        &(l3 * l2) * l1,
    ]
    .iter()
    .fold(zero.clone(), |acc, m| &acc + m);
    let mut rhs = triple.scale(&-T::from_ratio(8, 3));
    for i in 1..=3 {
        let ai = a[i - 1].clone();
        let li = sq.l(i);
        let term = &(li * li).scale(&(c(12) - c(16) * ai.clone())) + &li.scale(&((c(16) - c(176) * ai.clone()) / c(3)));
        rhs = &rhs - &term.shift(&(c(32) * ai / c(3)));
    }
    let pairs = &(&l1.anticommutator(l2) + &l2.anticommutator(l3)) + &l1.anticommutator(l3);
    rhs = &rhs + &pairs.scale(&T::from_ratio(52, 3));
    let [a1, a2, a3] = a;
    let constant = c(48) * (a1.clone() * a2.clone() + a2.clone() * a3.clone() + a3.clone() * a1.clone())
        - c(64) * a1 * a2 * a3
        + pert.square_constant.clone();
    rhs = rhs.shift(&constant);
    out.push(Residual::compare(REL_R_SQUARED, &(&sq.r * &sq.r), &rhs, tol));

    IdentityReport::new(out)
}

/// `E_N = [2(N+1) + k1 + k2 + k3]^2 - 1/4`
pub fn energy_closed_form<T: Scalar>(params: &ModelParams<T>, n: usize) -> T {
    let s = params.k.iter().fold(T::from_i64(2 * (n as i64 + 1)), |acc, k| acc + k.clone());
    s.clone() * s - T::from_ratio(1, 4)
}

/// `4 nu4 (nu4 - 1) + 3/4`
pub fn energy_from_casimir<T: Scalar>(params: &ModelParams<T>, n: usize) -> T {
    let nu4 = params.nu().iter().fold(T::from_i64(n as i64), |acc, v| acc + v.clone());
    T::from_i64(4) * nu4.clone() * (nu4 - T::one()) + T::from_ratio(3, 4)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub energy: Num,
    /// Multiplicity of `E_N` as an eigenvalue of `H` on grade `N`.
    pub degeneracy: usize,
    /// Distinct `C^(12)` eigenvalues on the lowest-weight subspace.
    pub distinct_c12: usize,
    /// Closed form equals the Casimir form and `H = E_N` on the
    /// lowest-weight subspace.
    pub consistent: bool,
}

pub fn energy_spectrum<T: Scalar>(params: &ModelParams<T>, n_max: usize) -> Result<Vec<SpectrumRow>> {
    (0..=n_max).map(|n| spectrum_row(params, n)).collect()
}

fn spectrum_row<T: Scalar>(params: &ModelParams<T>, n: usize) -> Result<SpectrumRow> {
    let e = energy_closed_form(params, n);
    let scale = 1.0 + e.to_f64().abs();
    let forms_agree = (e.clone() - energy_from_casimir(params, n)).is_negligible(scale, 1e-12);

    let grade = build_symmetries_on(params, n, Subspace::Grade)?;
    let degeneracy = if T::EXACT {
        grade.h.shift(&-e.clone()).nullspace().0.cols()
    } else {
        let (vals, _) = symmetric_eigen(&grade.h.to_f64());
        vals.iter().filter(|v| (*v - e.to_f64()).abs() <= 1e-9 * scale).count()
    };

    let lowest = build_symmetries_on(params, n, Subspace::LowestWeight)?;
    let h_scalar = (&lowest.h - &Matrix::scalar(lowest.dim(), e.clone())).is_negligible(scale, 1e-10);

    let fspec = params.coupling_spec(n)?.to_f64();
    let space = CoupledSpace::new(&fspec)?;
    let (vals, _) = symmetric_eigen(&space.intermediate_casimir(Pair::P12));
    let c_scale = 1.0 + vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let distinct_c12 = count_distinct(&vals, 1e-9 * c_scale);

    Ok(SpectrumRow { n, energy: Num::from_scalar(&e), degeneracy, distinct_c12, consistent: forms_agree && h_scalar })
}

/// Overlaps between the `L3` (`C^(12)`) and `L1` (`C^(23)`) eigenbases in
/// the energy eigenspace `E_N`.
pub fn interbasis_expansion<T: Scalar>(params: &ModelParams<T>, n: usize) -> Result<RacahTable> {
    racah_coefficients(&params.coupling_spec(n)?)
}

/// Same for another choice of symmetry pair.
pub fn interbasis_expansion_pair<T: Scalar>(params: &ModelParams<T>, n: usize, cols: Pair, rows: Pair) -> Result<RacahTable> {
    overlap_table(&params.coupling_spec(n)?, cols, rows)
}

/// `S = 2 J0^(4) + J+^(4) + J-^(4)` against every `C^(ij)` on grades
/// `N-1, N, N+1`.
pub fn s_commutation<T: Scalar>(params: &ModelParams<T>, n: usize, tol: f64) -> Result<IdentityReport> {
    let nu = params.nu();
    let lo = n.saturating_sub(1);
    let block = FockBlock::window(nu, lo, n + 1);
    debug_assert_eq!(block.dim(), (lo..=n + 1).map(|g| coupled_basis(g).len()).sum::<usize>());
    let s = &(&block.j0_total().scale(&T::from_i64(2)) + &block.total_ladder(true)) + &block.total_ladder(false);
    let zero = Matrix::zeros(block.dim(), block.dim());
    let residuals = [Pair::P12, Pair::P23, Pair::P31]
        .into_iter()
        .map(|pair| {
            let c = block.intermediate_casimir(pair, CrossTerm::Symmetric);
            Residual::compare(format!("[S,C{}]=0", pair.label()), &s.commutator(&c), &zero, tol)
        })
        .collect();
    Ok(IdentityReport::new(residuals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn ones() -> ModelParams<Rational> {
        ModelParams::new([q(1, 1), q(1, 1), q(1, 1)]).unwrap()
    }

    #[test]
    fn parameter_maps() {
        let p = ones();
        assert_eq!(p.a(), [q(3, 4), q(3, 4), q(3, 4)]);
        assert_eq!(p.nu(), [q(1, 1), q(1, 1), q(1, 1)]);
        assert!(ModelParams::new([q(-1, 1), q(1, 1), q(1, 1)]).is_err());
    }

    #[test]
    fn hamiltonian_on_lowest_weight() {
        let sq = build_symmetries_on(&ones(), 1, Subspace::LowestWeight).unwrap();
        assert_eq!(sq.h, Matrix::scalar(2, q(195, 4)));
    }

    #[test]
    fn algebra_holds_exactly() {
        for n in 0..=2 {
            let sq = build_symmetries(&ones(), n).unwrap();
            let report = verify_symmetry_algebra(&sq, 0.0);
            assert!(report.passed, "N = {n}: {report:?}");
        }
        let p = ModelParams::new([q(1, 2), q(2, 1), q(1, 3)]).unwrap();
        for subspace in [Subspace::Grade, Subspace::LowestWeight] {
            let sq = build_symmetries_on(&p, 3, subspace).unwrap();
            assert!(verify_symmetry_algebra(&sq, 0.0).passed);
        }
    }

    #[test]
    fn scalar_case() {
        let sq = build_symmetries(&ones(), 0).unwrap();
        assert!(sq.r.is_zero());
        assert!(verify_symmetry_algebra(&sq, 0.0).passed);
    }

    #[test]
    fn float_algebra() {
        let p = ModelParams::new([0.3, 1.7, 2.2]).unwrap();
        let sq = build_symmetries(&p, 3).unwrap();
        let report = verify_symmetry_algebra(&sq, DEFAULT_SYMMETRY_TOL);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn perturbation_is_detected() {
        let sq = build_symmetries(&ones(), 2).unwrap();
        let pert = Perturbation { commutator_constant: q(1, 1), square_constant: q(0, 1) };
        let report = verify_symmetry_algebra_with(&sq, 0.0, &pert);
        assert!(!report.get("[L1,R]").unwrap().passed);
        assert!(report.get(REL_R_SQUARED).unwrap().passed);
        let pert = Perturbation { commutator_constant: q(0, 1), square_constant: q(1, 1) };
        assert!(!verify_symmetry_algebra_with(&sq, 0.0, &pert).get(REL_R_SQUARED).unwrap().passed);
    }

    #[test]
    fn spectrum_rows() {
        let rows = energy_spectrum(&ones(), 2).unwrap();
        assert_eq!(rows[0].energy.to_string(), "99/4");
        assert_eq!(rows[1].energy.to_string(), "195/4");
        for (n, row) in rows.iter().enumerate() {
            assert_eq!(row.degeneracy, n + 1);
            assert_eq!(row.distinct_c12, n + 1);
            assert!(row.consistent);
        }
        let f = energy_spectrum(&ModelParams::new([1.0, 1.0, 1.0]).unwrap(), 1).unwrap();
        assert_eq!(f[0].energy, Num::Float(24.75));
        assert_eq!(f[1].energy, Num::Float(48.75));
    }

    #[test]
    fn s_commutes_with_intermediate_casimirs() {
        for n in [0, 1, 3] {
            assert!(s_commutation(&ones(), n, 0.0).unwrap().passed);
        }
        let p = ModelParams::new([0.3, 1.7, 2.2]).unwrap();
        assert!(s_commutation(&p, 2, 1e-11).unwrap().passed);
    }

    #[test]
    fn interbasis_delegates() {
        let t = interbasis_expansion(&ones(), 1).unwrap();
        let c = racah_coefficients(&ones().coupling_spec(1).unwrap()).unwrap();
        assert_eq!(t, c);
        let other = interbasis_expansion_pair(&ones(), 2, Pair::P23, Pair::P31).unwrap();
        assert!(other.orthogonality_residual() < 1e-12);
        assert_eq!(other.pairs, Some([Pair::P31, Pair::P23]));
    }
}

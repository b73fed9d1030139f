//! Three-fold tensor products of positive discrete series su(1,1)
//! representations and the Racah problem on them.
//!
//! Exact scalars work in the unnormalized basis
//! `J+ e_n = e_{n+1}`, `J- e_n = n (n + 2nu - 1) e_{n-1}`, `J0 e_n = (n + nu) e_n`,
//! where every matrix element is rational and `|e_n|^2 = n! (2nu)_n`.
//! Floats use the orthonormal basis with the usual square-root elements.
//!
//! The Racah problem lives on the lowest-weight vectors of total degree `N`,
//! i.e. `ker J-^(4)` inside the grade `n1 + n2 + n3 = N`. That subspace has
//! dimension `N + 1` and carries `C^(4) = nu4 (nu4 - 1)` with
//! `nu4 = nu1 + nu2 + nu3 + N`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{OperatorTriple, ReducedConstants, StructureConstants};
use crate::error::{Error, Result};
use crate::irreps::IrrepSpec;
use crate::matrix::{symmetric_eigen, Matrix};
use crate::scalar::{parse_rational, pochhammer, rational_sqrt, Backend, Rational, Scalar};

/// Tolerance for matching float eigenvalues to their closed forms.
const FLOAT_EIG_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec<T> {
    pub nu: [T; 3],
    pub n: usize,
}

impl<T: Scalar> CouplingSpec<T> {
    pub fn new(nu: [T; 3], n: usize) -> Result<Self> {
        if let Some(bad) = nu.iter().find(|v| !v.is_positive()) {
            return Err(Error::InvalidParams(format!("nu must be positive, got {bad}")));
        }
        Ok(Self { nu, n })
    }

    /// `nu4 = nu1 + nu2 + nu3 + N`
    pub fn nu4(&self) -> T {
        self.nu.iter().fold(T::from_i64(self.n as i64), |acc, v| acc + v.clone())
    }

    /// Casimir values `lambda_i = nu_i (nu_i - 1)`, `i = 1..4`.
    pub fn casimirs(&self) -> [T; 4] {
        let c = |v: &T| v.clone() * (v.clone() - T::one());
        [c(&self.nu[0]), c(&self.nu[1]), c(&self.nu[2]), c(&self.nu4())]
    }

    pub fn to_f64(&self) -> CouplingSpec<f64> {
        CouplingSpec { nu: [0, 1, 2].map(|i| self.nu[i].to_f64()), n: self.n }
    }
}

/// Pair of tensor factors, zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    #[serde(rename = "12")]
    P12,
    #[serde(rename = "23")]
    P23,
    #[serde(rename = "31")]
    P31,
}

impl Pair {
    pub fn indices(self) -> (usize, usize) {
        match self {
            Pair::P12 => (0, 1),
            Pair::P23 => (1, 2),
            Pair::P31 => (2, 0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::P12 => "12",
            Pair::P23 => "23",
            Pair::P31 => "31",
        }
    }
}

impl FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "12" | "21" => Ok(Pair::P12),
            "23" | "32" => Ok(Pair::P23),
            "31" | "13" => Ok(Pair::P31),
            other => Err(Error::Parse(format!("unknown pair `{other}`"))),
        }
    }
}

/// How the cross term of an intermediate Casimir is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossTerm {
    /// `J+^(i) J-^(j) + J+^(j) J-^(i)`
    Symmetric,
    /// `J+^(i) J-^(j) + J+^(j) J-^(j)`, kept to show that it breaks closure.
    Literal,
}

/// All triples with `n1 + n2 + n3 = N` in lexicographic order.
pub fn coupled_basis(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for n1 in 0..=n {
        for n2 in 0..=n - n1 {
            out.push([n1, n2, n - n1 - n2]);
        }
    }
    out
}

/// A finite set of product states closed under nothing in particular;
/// ladder operators that leave it are dropped.
#[derive(Clone, Debug)]
pub struct FockBlock<T> {
    pub nu: [T; 3],
    pub states: Vec<[usize; 3]>,
    index: HashMap<[usize; 3], usize>,
}

impl<T: Scalar> FockBlock<T> {
    pub fn new(nu: [T; 3], states: Vec<[usize; 3]>) -> Self {
        let index = states.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        Self { nu, states, index }
    }

    /// One grade `n1 + n2 + n3 = N`.
    pub fn grade(nu: [T; 3], n: usize) -> Self {
        Self::new(nu, coupled_basis(n))
    }

    /// Grades `lo..=hi` stacked in increasing order.
    pub fn window(nu: [T; 3], lo: usize, hi: usize) -> Self {
        Self::new(nu, (lo..=hi).flat_map(coupled_basis).collect())
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    fn lower_amp(&self, i: usize, n: usize) -> T {
        let nn = T::from_i64(n as i64);
        let v = nn.clone() * (nn + T::from_i64(2) * self.nu[i].clone() - T::one());
        if T::EXACT {
            v
        } else {
            T::from_f64(v.to_f64().max(0.0).sqrt())
        }
    }

    fn raise_amp(&self, i: usize, n: usize) -> T {
        if T::EXACT {
            T::one()
        } else {
            let nn = T::from_i64(n as i64);
            let v = (nn.clone() + T::one()) * (nn + T::from_i64(2) * self.nu[i].clone());
            T::from_f64(v.to_f64().max(0.0).sqrt())
        }
    }

    pub fn j0(&self, i: usize) -> Matrix<T> {
        let diag: Vec<T> = self.states.iter().map(|s| T::from_i64(s[i] as i64) + self.nu[i].clone()).collect();
        Matrix::from_diagonal(&diag)
    }

    /// `J0^(4)`
    pub fn j0_total(&self) -> Matrix<T> {
        &(&self.j0(0) + &self.j0(1)) + &self.j0(2)
    }

    /// `J+^(raise) J-^(lower)`; either factor may be absent.
    pub fn ladder(&self, raise: Option<usize>, lower: Option<usize>) -> Matrix<T> {
        let dim = self.dim();
        let mut m = Matrix::zeros(dim, dim);
        for (col, s) in self.states.iter().enumerate() {
            let mut t = *s;
            let mut amp = T::one();
            if let Some(j) = lower {
                if t[j] == 0 {
                    continue;
                }
                amp = amp * self.lower_amp(j, t[j]);
                t[j] -= 1;
            }
            if let Some(i) = raise {
                amp = amp * self.raise_amp(i, t[i]);
                t[i] += 1;
            }
            if let Some(&row) = self.index.get(&t) {
                m[(row, col)] = amp;
            }
        }
        m
    }

    pub fn casimir_value(&self, i: usize) -> T {
        self.nu[i].clone() * (self.nu[i].clone() - T::one())
    }

    pub fn intermediate_casimir(&self, pair: Pair, reading: CrossTerm) -> Matrix<T> {
        let (i, j) = pair.indices();
        let two = T::from_i64(2);
        let diag = (&self.j0(i) * &self.j0(j)).scale(&two);
        let cross = match reading {
            CrossTerm::Symmetric => &self.ladder(Some(i), Some(j)) + &self.ladder(Some(j), Some(i)),
            CrossTerm::Literal => &self.ladder(Some(i), Some(j)) + &self.ladder(Some(j), Some(j)),
        };
        (&diag - &cross).shift(&(self.casimir_value(i) + self.casimir_value(j)))
    }

    /// `C^(12) + C^(23) + C^(31) - C^(1) - C^(2) - C^(3)`
    pub fn total_casimir_sum(&self) -> Matrix<T> {
        let sum = &(&self.intermediate_casimir(Pair::P12, CrossTerm::Symmetric)
            + &self.intermediate_casimir(Pair::P23, CrossTerm::Symmetric))
            + &self.intermediate_casimir(Pair::P31, CrossTerm::Symmetric);
        let singles = (0..3).fold(T::zero(), |acc, i| acc + self.casimir_value(i));
        sum.shift(&-singles)
    }

    /// `(J0^(4))^2 - J+^(4) J-^(4) - J0^(4)`
    pub fn total_casimir_direct(&self) -> Matrix<T> {
        let j0 = self.j0_total();
        let mut pm = Matrix::zeros(self.dim(), self.dim());
        for i in 0..3 {
            for j in 0..3 {
                pm = &pm + &self.ladder(Some(i), Some(j));
            }
        }
        &(&(&j0 * &j0) - &pm) - &j0
    }

    /// `J+^(4)` when `raise`, else `J-^(4)`.
    pub fn total_ladder(&self, raise: bool) -> Matrix<T> {
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for i in 0..3 {
            let l = if raise { self.ladder(Some(i), None) } else { self.ladder(None, Some(i)) };
            m = &m + &l;
        }
        m
    }

    /// Squared norm of each basis state: `prod n_i! (2 nu_i)_{n_i}` for exact
    /// scalars, 1 for floats.
    pub fn metric(&self) -> Vec<T> {
        self.states
            .iter()
            .map(|s| {
                if !T::EXACT {
                    return T::one();
                }
                (0..3).fold(T::one(), |acc, i| {
                    acc * pochhammer(&T::one(), s[i]) * pochhammer(&(T::from_i64(2) * self.nu[i].clone()), s[i])
                })
            })
            .collect()
    }
}

/// `J-^(4)` from grade `N` to grade `N - 1`.
fn lowering_between_grades<T: Scalar>(nu: &[T; 3], n: usize) -> Matrix<T> {
    let window = FockBlock::window(nu.clone(), n - 1, n);
    let lower = window.total_ladder(false);
    let below = coupled_basis(n - 1).len();
    let here = coupled_basis(n).len();
    Matrix::from_fn(below, here, |r, c| lower[(r, below + c)].clone())
}

/// Grade `N` together with a basis of its lowest-weight subspace.
#[derive(Clone)]
pub struct CoupledSpace<T> {
    pub spec: CouplingSpec<T>,
    pub block: FockBlock<T>,
    /// Columns span `ker J-^(4)` in grade coordinates.
    pub lowest: Matrix<T>,
    /// Exact: rows of `lowest` at these indices form the identity.
    free: Vec<usize>,
}

impl<T: Scalar> CoupledSpace<T> {
    pub fn new(spec: &CouplingSpec<T>) -> Result<Self> {
        let block = FockBlock::grade(spec.nu.clone(), spec.n);
        let dim = block.dim();
        let (lowest, free) = if spec.n == 0 {
            (Matrix::identity(1), vec![0])
        } else {
            let jm = lowering_between_grades(&spec.nu, spec.n);
            if T::EXACT {
                jm.nullspace()
            } else {
                let gram = &jm.transpose() * &jm;
                let (vals, vecs) = symmetric_eigen(&gram.to_f64());
                let k = spec.n + 1;
                let scale = 1.0 + vals.last().copied().unwrap_or(0.0).abs();
                if vals.iter().take(k).any(|v| v.abs() > 1e-9 * scale) {
                    return Err(Error::Numerical("lowest-weight subspace has the wrong dimension".into()));
                }
                let q = Matrix::from_fn(dim, k, |r, c| T::from_f64(vecs[(r, c)]));
                (q, Vec::new())
            }
        };
        if lowest.cols() != spec.n + 1 {
            return Err(Error::Numerical(format!(
                "lowest-weight subspace has dimension {}, expected {}",
                lowest.cols(),
                spec.n + 1
            )));
        }
        Ok(Self { spec: spec.clone(), block, lowest, free })
    }

    pub fn dim(&self) -> usize {
        self.lowest.cols()
    }

    /// Matrix of a grade-preserving operator that leaves the subspace
    /// invariant, in the subspace basis.
    pub fn restrict(&self, op: &Matrix<T>) -> Matrix<T> {
        let image = op * &self.lowest;
        if T::EXACT {
            Matrix::from_fn(self.dim(), self.dim(), |r, c| image[(self.free[r], c)].clone())
        } else {
            &self.lowest.transpose() * &image
        }
    }

    /// Subspace coordinates to grade coordinates.
    pub fn embed(&self, v: &[T]) -> Vec<T> {
        self.lowest.mul_vec(v)
    }

    pub fn intermediate_casimir(&self, pair: Pair) -> Matrix<T> {
        self.restrict(&self.block.intermediate_casimir(pair, CrossTerm::Symmetric))
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        self.block
            .metric()
            .into_iter()
            .zip(u.iter().zip(v))
            .fold(T::zero(), |acc, (w, (a, b))| acc + w * a.clone() * b.clone())
    }
}

/// `C^(ij)` on grade `N` (not restricted).
pub fn intermediate_casimir<T: Scalar>(spec: &CouplingSpec<T>, pair: Pair) -> Matrix<T> {
    FockBlock::grade(spec.nu.clone(), spec.n).intermediate_casimir(pair, CrossTerm::Symmetric)
}

/// `C^(4)` from the sum of intermediate Casimirs, restricted to the
/// lowest-weight subspace, where it equals `nu4 (nu4 - 1) I`.
pub fn total_casimir<T: Scalar>(spec: &CouplingSpec<T>) -> Result<Matrix<T>> {
    let space = CoupledSpace::new(spec)?;
    Ok(space.restrict(&space.block.total_casimir_sum()))
}

/// `d = (l1+l2+l3+l4)/2`, `e1 = (l1-l4)(l2-l3)/4`, `e2 = (l1-l2)(l4-l3)/4`.
pub fn kappa_constants<T: Scalar>(spec: &CouplingSpec<T>) -> ReducedConstants<T> {
    let [l1, l2, l3, l4] = spec.casimirs();
    let quarter = T::from_ratio(1, 4);
    ReducedConstants::new(
        (l1.clone() + l2.clone() + l3.clone() + l4.clone()) * T::half(),
        (l1.clone() - l4.clone()) * (l2.clone() - l3.clone()) * quarter.clone(),
        (l1 - l2) * (l4 - l3) * quarter,
    )
}

/// `kappa1 = -C^(12)/2`, `kappa2 = -C^(23)/2` on the lowest-weight subspace.
pub fn kappa_triple<T: Scalar>(spec: &CouplingSpec<T>) -> Result<(OperatorTriple<T>, StructureConstants<T>)> {
    let space = CoupledSpace::new(spec)?;
    let m = -T::half();
    let k1 = space.intermediate_casimir(Pair::P12).scale(&m);
    let k2 = space.intermediate_casimir(Pair::P23).scale(&m);
    let label = if T::EXACT { "lowest weight, unnormalized" } else { "lowest weight, orthonormal" };
    Ok((OperatorTriple::new(k1, k2, label)?, kappa_constants(spec).to_general()))
}

/// Roots `xi = (1-nu1-nu2, nu1-nu2, nu4+nu3-1, nu3-nu4)`, `sigma = 1-nu1-nu2`.
pub fn roots_for_coupling<T: Scalar>(spec: &CouplingSpec<T>) -> IrrepSpec<T> {
    let [n1, n2, n3] = spec.nu.clone();
    let n4 = spec.nu4();
    let sigma = T::one() - n1.clone() - n2.clone();
    let roots = [sigma.clone(), n1 - n2, n4.clone() + n3.clone() - T::one(), n3 - n4];
    IrrepSpec::new(roots, sigma, spec.n)
}

/// `sign * sqrt(square)`; plain rationals have `square = r^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSqrt {
    pub negative: bool,
    pub square: Rational,
}

impl SignedSqrt {
    pub fn from_rational(r: &Rational) -> Self {
        Self { negative: r.is_negative(), square: r * r }
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.square.to_f64().sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// The value itself when it is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        rational_sqrt(&self.square).map(|r| if self.negative { -r } else { r })
    }
}

impl fmt::Display for SignedSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{}", r.to_canonical_string()),
            None => {
                let sign = if self.negative { "-" } else { "" };
                write!(f, "{sign}sqrt({})", self.square.to_canonical_string())
            }
        }
    }
}

impl FromStr for SignedSqrt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (negative, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, t),
        };
        if let Some(inner) = body.strip_prefix("sqrt(").and_then(|b| b.strip_suffix(')')) {
            let square = parse_rational(inner)?;
            if square.is_negative() {
                return Err(Error::Parse(format!("negative radicand in `{s}`")));
            }
            let negative = negative && !square.is_zero();
            return Ok(Self { negative, square });
        }
        Ok(Self::from_rational(&parse_rational(t)?))
    }
}

/// A table entry or label: exact (`"p/q"` or `"-sqrt(p/q)"`) or a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Exact(SignedSqrt),
    Float(f64),
}

impl Num {
    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(s) => s.to_f64(),
            Num::Float(x) => *x,
        }
    }

    pub fn from_scalar<T: Scalar>(x: &T) -> Self {
        match x.to_rational() {
            Some(r) if T::EXACT => Num::Exact(SignedSqrt::from_rational(&r)),
            _ => Num::Float(x.to_f64()),
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(s) => write!(f, "{s}"),
            Num::Float(x) => write!(f, "{}", crate::scalar::format_f64(*x)),
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Num::Exact(v) => s.serialize_str(&v.to_string()),
            Num::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::F(x) => Ok(Num::Float(x)),
            Raw::S(s) => s.parse().map(Num::Exact).map_err(serde::de::Error::custom),
        }
    }
}

pub const SIGN_CONVENTION: &str = "first-nonzero-positive";

/// Overlaps between two intermediate-Casimir eigenbases of the
/// lowest-weight subspace. `coeffs[s][n]` pairs row eigenvector `s` of the
/// second pair with column eigenvector `n` of the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RacahTable {
    pub nu: Vec<Num>,
    #[serde(rename = "N")]
    pub n: usize,
    pub rows_nu23: Vec<Num>,
    pub cols_nu12: Vec<Num>,
    pub coeffs: Vec<Vec<Num>>,
    pub sign_convention: String,
    pub backend: Backend,
    /// Pairs behind rows and columns when they are not `(23, 12)`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairs: Option<[Pair; 2]>,
}

impl RacahTable {
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.coeffs.iter().map(|r| r.iter().map(Num::to_f64).collect()).collect()
    }

    /// `max |T T^t - I|` and `max |T^t T - I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let t = Matrix::from_rows(self.values()).unwrap_or_else(|_| Matrix::zeros(0, 0));
        let id = Matrix::<f64>::identity(t.rows());
        let a = (&(&t * &t.transpose()) - &id).max_abs();
        let b = (&(&t.transpose() * &t) - &id).max_abs();
        a.max(b)
    }
}

fn first_nonzero_positive<T: Scalar>(v: &mut [T]) {
    let scale = v.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|x| !x.is_negligible(scale, 1e-10)) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Intermediate label `nu_i + nu_j + k`.
fn pair_label<T: Scalar>(spec: &CouplingSpec<T>, pair: Pair, k: usize) -> T {
    let (i, j) = pair.indices();
    spec.nu[i].clone() + spec.nu[j].clone() + T::from_i64(k as i64)
}

/// Eigenvectors (grade coordinates) of `C^(pair)` on the lowest-weight
/// subspace, ordered by `k = 0..N`, eigenvalue `(nu_i+nu_j+k)(nu_i+nu_j+k-1)`.
pub fn intermediate_eigenvectors<T: Scalar>(space: &CoupledSpace<T>, pair: Pair) -> Result<Vec<Vec<T>>> {
    let spec = &space.spec;
    let m = space.intermediate_casimir(pair);
    let targets: Vec<T> = (0..=spec.n)
        .map(|k| {
            let l = pair_label(spec, pair, k);
            l.clone() * (l - T::one())
        })
        .collect();
    let mut out = Vec::with_capacity(targets.len());
    if T::EXACT {
        for (k, t) in targets.iter().enumerate() {
            let (basis, _) = m.shift(&-t.clone()).nullspace();
            if basis.cols() != 1 {
                return Err(Error::DegenerateIntermediateSpectrum(format!(
                    "C^({}) eigenvalue {t} (k = {k}) has multiplicity {}",
                    pair.label(),
                    basis.cols()
                )));
            }
            let mut u = space.embed(&basis.column(0));
            first_nonzero_positive(&mut u);
            out.push(u);
        }
    } else {
        let (vals, vecs) = symmetric_eigen(&m.to_f64());
        let scale = 1.0 + vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for w in vals.windows(2) {
            if (w[1] - w[0]).abs() <= FLOAT_EIG_TOL * scale {
                return Err(Error::DegenerateIntermediateSpectrum(format!(
                    "C^({}) has a repeated eigenvalue near {}",
                    pair.label(),
                    w[0]
                )));
            }
        }
        for (k, t) in targets.iter().enumerate() {
            let t = t.to_f64();
            let (idx, gap) = vals
                .iter()
                .enumerate()
                .map(|(i, v)| (i, (v - t).abs()))
                .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
            if gap > FLOAT_EIG_TOL * scale {
                return Err(Error::Numerical(format!(
                    "C^({}) has no eigenvalue near {t} (k = {k})",
                    pair.label()
                )));
            }
            let col: Vec<T> = vecs.column(idx).into_iter().map(T::from_f64).collect();
            let mut u = space.embed(&col);
            first_nonzero_positive(&mut u);
            out.push(u);
        }
    }
    Ok(out)
}

/// Overlap table between the eigenbases of `cols` (columns) and `rows`
/// (rows) intermediate Casimirs.
pub fn overlap_table<T: Scalar>(spec: &CouplingSpec<T>, cols: Pair, rows: Pair) -> Result<RacahTable> {
    let space = CoupledSpace::new(spec)?;
    let us = intermediate_eigenvectors(&space, cols)?;
    let vs = intermediate_eigenvectors(&space, rows)?;
    let coeffs = if T::EXACT {
        let norms_u: Vec<Rational> = us.iter().map(|u| exact(&space.inner(u, u))).collect();
        let norms_v: Vec<Rational> = vs.iter().map(|v| exact(&space.inner(v, v))).collect();
        vs.iter()
            .zip(&norms_v)
            .map(|(v, nv)| {
                us.iter()
                    .zip(&norms_u)
                    .map(|(u, nu)| {
                        let ip = exact(&space.inner(v, u));
                        Num::Exact(SignedSqrt { negative: ip.is_negative(), square: &ip * &ip / (nu * nv) })
                    })
                    .collect()
            })
            .collect()
    } else {
        let norm = |x: &[T]| space.inner(x, x).to_f64().sqrt();
        vs.iter()
            .map(|v| us.iter().map(|u| Num::Float(space.inner(v, u).to_f64() / (norm(u) * norm(v)))).collect())
            .collect()
    };
    let labels = |pair: Pair| (0..=spec.n).map(|k| Num::from_scalar(&pair_label(spec, pair, k))).collect();
    let standard = cols == Pair::P12 && rows == Pair::P23;
    Ok(RacahTable {
        nu: spec.nu.iter().map(Num::from_scalar).collect(),
        n: spec.n,
        rows_nu23: labels(rows),
        cols_nu12: labels(cols),
        coeffs,
        sign_convention: SIGN_CONVENTION.to_string(),
        backend: if T::EXACT { Backend::Exact } else { Backend::Float },
        pairs: (!standard).then_some([rows, cols]),
    })
}

fn exact<T: Scalar>(x: &T) -> Rational {
    x.to_rational().unwrap_or_else(|| Rational::from_f64(x.to_f64()))
}

/// Overlaps between the `C^(12)` (columns, `nu12` ascending) and `C^(23)`
/// (rows, `nu23` ascending) eigenbases.
pub fn racah_coefficients<T: Scalar>(spec: &CouplingSpec<T>) -> Result<RacahTable> {
    overlap_table(spec, Pair::P12, Pair::P23)
}

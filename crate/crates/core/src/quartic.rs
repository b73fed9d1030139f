//! Root finding for low-degree polynomials with rational coefficients.
//!
//! Exact rational roots are split off first (square-free decomposition, then
//! continued-fraction candidates checked by exact evaluation); whatever is
//! left is solved in floating point and polished with Newton steps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::scalar::{rational_to_f64, Rational};

/// Coefficients in ascending order: `c[0] + c[1] z + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.len() > 1 && c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * z + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rational_to_f64(c))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    fn monic(&self) -> Poly {
        let lead = self.0.last().cloned().unwrap_or_else(Rational::one);
        Poly(self.0.iter().map(|c| c / &lead).collect())
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree();
        let lead = divisor.0[dd].clone();
        let mut rem = self.0.clone();
        if self.degree() < dd {
            return (Poly::new(vec![Rational::zero()]), self.clone());
        }
        let mut quot = vec![Rational::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let coef = &rem[k + dd] / &lead;
            for (j, dc) in divisor.0.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &coef * dc;
            }
            quot[k] = coef;
        }
        rem.truncate(dd.max(1));
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

/// Square-free decomposition (Yun): `monic(p) = prod_i f_i^i`, returned as `(f_i, i)`.
pub fn square_free_factors(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let c = dp.div_rem(&a0).0;
    let mut d = sub(&c, &b.derivative());
    let mut mult = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((a.clone(), mult));
        }
        b = b.div_rem(&a).0;
        let c = d.div_rem(&a).0;
        d = sub(&c, &b.derivative());
        mult += 1;
    }
    out
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let len = a.0.len().max(b.0.len());
    let get = |v: &Vec<Rational>, k: usize| v.get(k).cloned().unwrap_or_else(Rational::zero);
    Poly::new((0..len).map(|k| get(&a.0, k) - get(&b.0, k)).collect())
}

/// Continued-fraction convergents of `x` with denominators below `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 || k2 == 0 {
            break;
        }
        out.push(Rational::new(h2.into(), k2.into()));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

fn float_roots(p: &Poly) -> Vec<Complex64> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let m = p.monic();
    let coeffs: Vec<f64> = m.0.iter().map(rational_to_f64).collect();
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i];
    }
    let dp = p.derivative();
    comp.complex_eigenvalues()
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..50 {
                let f = p.eval_complex(z);
                let df = dp.eval_complex(z);
                if df.norm() == 0.0 {
                    break;
                }
                let step = f / df;
                z -= step;
                if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                    break;
                }
            }
            z
        })
        .collect()
}

/// All roots of `p` with multiplicity. Exactly rational roots come back in
/// `exact`; the remainder in `approx`.
#[derive(Clone, Debug, Default)]
pub struct Roots {
    pub exact: Vec<Rational>,
    pub approx: Vec<Complex64>,
}

impl Roots {
    pub fn all_complex(&self) -> Vec<Complex64> {
        self.exact
            .iter()
            .map(|r| Complex64::new(rational_to_f64(r), 0.0))
            .chain(self.approx.iter().copied())
            .collect()
    }
}

pub fn solve(p: &Poly) -> Roots {
    let mut roots = Roots::default();
    for (factor, mult) in square_free_factors(p) {
        let mut f = factor;
        let mut found = true;
        while found && f.degree() > 0 {
            found = false;
            if f.0[0].is_zero() {
                push_n(&mut roots.exact, Rational::zero(), mult);
                f = f.div_rem(&Poly::new(vec![Rational::zero(), Rational::one()])).0;
                found = true;
                continue;
            }
            for z in float_roots(&f) {
                if z.im.abs() > 1e-7 * (1.0 + z.re.abs()) {
                    continue;
                }
                let hit = convergents(z.re, 1_000_000_000_000).into_iter().rev().find(|c| f.eval(c).is_zero());
                if let Some(r) = hit {
                    f = f.div_rem(&Poly::new(vec![-r.clone(), Rational::one()])).0;
                    push_n(&mut roots.exact, r, mult);
                    found = true;
                    break;
                }
            }
        }
        for z in float_roots(&f) {
            for _ in 0..mult {
                roots.approx.push(z);
            }
        }
    }
    roots.exact.sort();
    roots
}

fn push_n(v: &mut Vec<Rational>, r: Rational, n: usize) {
    for _ in 0..n {
        v.push(r.clone());
    }
}

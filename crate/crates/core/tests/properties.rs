use proptest::prelude::*;

use racah_kit::algebra::{canonical_reduce, verify_relations};
use racah_kit::coupling::{kappa_triple, racah_coefficients, CouplingSpec};
use racah_kit::irreps::{
    build_realization, build_symmetric_f64, matrix_elements, monic_to_symmetric_similarity, params_from_roots, roots_from_params, validate,
    Form, IrrepSpec,
};
use racah_kit::matrix::general_eigenvalues;
use racah_kit::racah::{irrep_to_racah, racah_to_irrep, realize_difference_algebra, RacahParams};
use racah_kit::{Rational, Scalar};

fn rational(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (1i64..=4).prop_flat_map(move |den| (lo * den..=hi * den).prop_map(move |num| Rational::from_ratio(num, den)))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_survive_the_quartic(roots in prop::array::uniform4(rational(-6, 6))) {
        let p = params_from_roots(&roots);
        let found = roots_from_params(&p);
        let want = sorted(roots.iter().map(|r| r.to_f64().powi(2)).collect());
        let got = sorted(found.squares.iter().map(|z| z.re).collect());
        for (w, g) in want.iter().zip(&got) {
            prop_assert!((w - g).abs() <= 1e-6 * (1.0 + w.abs()), "{want:?} vs {got:?}");
        }
        if let Some(exact) = found.exact_roots {
            prop_assert_eq!(params_from_roots(&exact), p);
        }
    }

    #[test]
    fn monic_and_symmetric_forms_agree(
        sigma in rational(-5, 1),
        x2 in rational(-6, 6),
        x3 in rational(-6, 6),
        n in 1usize..6,
    ) {
        let top = sigma.clone() - Rational::from_integer((n as i64 + 1).into());
        let spec = IrrepSpec::new([sigma.clone(), x2, x3, top], sigma, n);
        prop_assume!(validate(&spec).valid);
        let monic = build_realization(&spec, Form::Monic).unwrap().to_f64();
        let sym = build_symmetric_f64(&spec).unwrap();
        let a2s: Vec<f64> = matrix_elements(&spec).unwrap().a2s.iter().map(Scalar::to_f64).collect();
        let conj = monic.conjugate(&monic_to_symmetric_similarity(&a2s)).unwrap();
        let scale = 1.0 + sym.k2.max_abs();
        prop_assert!((&conj.k2 - &sym.k2).max_abs() <= 1e-10 * scale);
        let sc = spec.params().structure_constants().map(Scalar::to_f64);
        prop_assert!(verify_relations(&sym, &sc, 1e-9).unwrap().passed);
        let ev = |m| sorted(general_eigenvalues(m).iter().map(|z| z.re).collect());
        for (a, b) in ev(&monic.k2).iter().zip(&ev(&sym.k2)) {
            prop_assert!((a - b).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn dictionary_round_trip(
        alpha in rational(-5, 5),
        beta in rational(-5, 5),
        delta in rational(-5, 5),
        n in 0usize..6,
    ) {
        let gamma = Rational::from_integer((-(n as i64) - 1).into());
        let Ok(p) = RacahParams::new(alpha, beta, gamma, delta, n) else { return Ok(()) };
        let spec = racah_to_irrep(&p);
        let (back, _) = irrep_to_racah(&spec).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn difference_algebra_reduces_consistently(
        alpha in rational(-5, 5),
        beta in rational(-5, 5),
        delta in rational(-5, 5),
        n in 1usize..6,
    ) {
        let gamma = Rational::from_integer((-(n as i64) - 1).into());
        let Ok(p) = RacahParams::new(alpha, beta, gamma, delta, n) else { return Ok(()) };
        let Ok((ops, sc)) = realize_difference_algebra(&p) else { return Ok(()) };
        let rep = verify_relations(&ops, &sc, 0.0).unwrap();
        prop_assert!(rep.passed);
        let (reduced, map) = canonical_reduce(&sc).unwrap();
        prop_assert!(verify_relations(&map.apply(&ops), &reduced.to_general(), 0.0).unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closure_for_real_nu(nu in prop::array::uniform3(0.05f64..4.0), n in 0usize..5) {
        let spec = CouplingSpec::new(nu, n).unwrap();
        let (ops, sc) = kappa_triple(&spec).unwrap();
        let rep = verify_relations(&ops, &sc, 1e-10).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn tables_are_orthogonal(nu in prop::array::uniform3(0.2f64..3.0), n in 0usize..5) {
        let table = racah_coefficients(&CouplingSpec::new(nu, n).unwrap()).unwrap();
        prop_assert!(table.orthogonality_residual() <= 1e-10);
    }
}

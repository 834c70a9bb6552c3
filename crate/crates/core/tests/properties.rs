use cmv_scattering::circle::{harmonic_conjugate, winding_index, GridFunction, Part};
use cmv_scattering::classes::hs_generator;
use cmv_scattering::scattering::scattering_function;
use cmv_scattering::schur::{schur_forward, schur_inverse, SchurChain, VerblunskyData};
use cmv_scattering::transfer::{
    determinant_residual, e_recursive, vanishing_residual, TransferChain,
};
use num_complex::Complex64;
use proptest::prelude::*;

const GRID: usize = 4096;
/// Resolves the poles of random rational Schur functions with |α| ≤ 0.9.
const FINE_GRID: usize = 65536;

fn disk_point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn anchor() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(|a| Complex64::from_polar(1.0, a))
}

fn verblunsky(max_len: usize, max_mod: f64) -> impl Strategy<Value = VerblunskyData> {
    (
        anchor(),
        prop::collection::vec(disk_point(max_mod), 0..=max_len),
    )
        .prop_map(|(a, al)| VerblunskyData::new(a, al).unwrap())
}

fn trig_poly(m: usize, degree: usize) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), degree).prop_map(move |c| {
        GridFunction::from_real_fn(m, |th| {
            c.iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    a * ((k + 1) as f64 * th).cos() + b * ((k + 1) as f64 * th).sin()
                })
                .sum::<f64>()
                + 0.3
        })
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fourier_roundtrip(samples in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)) {
        let f = GridFunction::new(samples.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap();
        prop_assert!(f.analyze().synthesize().max_abs_diff(&f).unwrap() < 1e-13);
    }

    #[test]
    fn conjugation_is_involutive_up_to_sign(u in trig_poly(256, 12)) {
        let twice = harmonic_conjugate(&harmonic_conjugate(&u).unwrap()).unwrap();
        let mean = u.mean();
        let expected = u.map(|x| -(x - mean));
        prop_assert!(twice.max_abs_diff(&expected).unwrap() < 1e-10);
        let a = u.analyze().besov_seminorm();
        let b = harmonic_conjugate(&u).unwrap().analyze().besov_seminorm();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn schur_roundtrip(v in verblunsky(16, 0.9)) {
        let phi = schur_inverse(&v, FINE_GRID).unwrap();
        let back = schur_forward(&phi, v.n_supp(), v.alpha_minus_one()).unwrap();
        prop_assert!(back.degeneracy.is_none());
        for (a, b) in back.data.alphas().iter().zip(v.alphas()) {
            prop_assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn szego_value_at_origin(v in verblunsky(12, 0.8)) {
        let chain = SchurChain::from_verblunsky(&v, GRID, v.n_supp()).unwrap().with_psi().unwrap();
        let product: f64 = (0..v.n_supp()).map(|k| v.rho(k)).product();
        prop_assert!((chain.psi_at_origin(0).unwrap() - product).abs() < 1e-8);
    }

    #[test]
    fn scattering_function_is_unimodular_index_zero(v in verblunsky(8, 0.5)) {
        let sd = scattering_function(&v, GRID).unwrap();
        prop_assert_eq!(sd.index, 0);
        prop_assert!(sd.s.samples().iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinant_and_vanishing_order(v in verblunsky(12, 0.9)) {
        let n_max = v.n_supp();
        for n in 0..=n_max {
            for j in 0..=n {
                prop_assert!(determinant_residual(&v, j, n).unwrap() < 1e-10);
                if j < n {
                    prop_assert!(vanishing_residual(&v, j, n).unwrap() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn polynomial_identity_and_analytic_tails(v in verblunsky(6, 0.7)) {
        let n_supp = v.n_supp();
        let chain = SchurChain::from_verblunsky(&v, 1024, n_supp).unwrap().with_psi().unwrap();
        let s_k = |k: usize| {
            let psi = chain.psi(k).unwrap();
            psi.zip_with(chain.phi(k), |p, f| -(p / p.conj()) * f.conj()).unwrap()
        };
        for n in 0..=n_supp {
            for j in 0..=n {
                let e = e_recursive(&v, j, n, 1024).unwrap();
                prop_assert!(e.sup_norm() < 1.0);
                let lhs = chain
                    .psi(n)
                    .unwrap()
                    .zip_with(chain.psi(j).unwrap(), |a, b| a / b)
                    .unwrap()
                    .zip_with(&e.zip_with(chain.phi(n), |x, f| 1.0 + x * f).unwrap(), |a, b| a / b)
                    .unwrap();
                let q = TransferChain::new(&v, j, n).unwrap().q.on_grid(1024).unwrap();
                prop_assert!(lhs.max_abs_diff(&q).unwrap() < 1e-8);
                let coeffs = lhs.analyze();
                for (idx, c) in coeffs.iter_indexed() {
                    if idx < 0 || idx > (n - j) as i64 {
                        prop_assert!(c.norm() < 1e-8, "index {idx}");
                    }
                }
                let shift = (n - j) as i32;
                let sj = s_k(j).map_with_point(|t, x| x * t.powi(shift));
                let gap = sj.zip_with(&s_k(n), |a, b| a - b).unwrap().analyze().project(Part::Minus).l2_norm();
                prop_assert!(gap < 1e-7);
            }
        }
    }

    #[test]
    fn hs_generator_outputs_are_normalized(
        u in trig_poly(512, 6),
        v in trig_poly(512, 3).prop_map(|f| f.map(|x| x * 0.4)),
        c in anchor(),
    ) {
        let vs = v.real_parts();
        let spread = vs.iter().cloned().fold(f64::MIN, f64::max) - vs.iter().cloned().fold(f64::MAX, f64::min);
        prop_assume!(spread < std::f64::consts::PI - 1e-3);
        let out = hs_generator(&u, &v, c).unwrap();
        prop_assert!(out.s.samples().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        prop_assert!((out.w.mean().re - 1.0).abs() < 1e-12);
        prop_assert_eq!(winding_index(&out.s).unwrap().index, 0);
    }
}

use lambda_cavity::analytic::chi_vacuum;
use lambda_cavity::liouvillian::{build_liouvillian, HilbertSpec};
use lambda_cavity::solver::{
    check_truncation_convergence, coherent_cavity, find_peaks, ground_product, linspace,
    min_eigenvalue, populations, probe_free_state, probe_spectrum, steady_state, thermal_cavity,
    trace_distance, Method, SpectrumOptions,
};
use lambda_cavity::{Level, Pump, SystemParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn steady_state_is_physical(
        ge in 0.5f64..10.0, gf in 0.1f64..3.0, kappa in 0.2f64..3.0, eta in 0.0f64..10.0,
        delta in -3.0f64..3.0, n_th in 0.0f64..0.3, eps in 0.01f64..1.0, probe in -10.0f64..10.0,
    ) {
        let p = SystemParams::from_effective(ge, gf, kappa, eta, delta)
            .with_epsilon(eps)
            .with_pump(Pump::Thermal { n_th });
        let spec = HilbertSpec::new(6).unwrap();
        let ss = steady_state(&build_liouvillian(&p, probe, spec, true).unwrap()).unwrap();
        let d = spec.dim();
        let tr: Complex64 = (0..d).map(|k| ss.rho[(k, k)]).sum();
        prop_assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-10);
        for r in 0..d {
            for c in 0..d {
                prop_assert!((ss.rho[(r, c)] - ss.rho[(c, r)].conj()).norm() < 1e-10);
            }
        }
        prop_assert!(min_eigenvalue(&ss.rho) >= -1e-8);
        prop_assert!((populations(&ss).total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn probe_free_state_factorizes(
        kappa in 0.3f64..3.0, n_th in 0.0f64..0.2, omega in 0.0f64..0.6, eta in 0.0f64..20.0,
    ) {
        let base = SystemParams::from_effective(5.0, 1.0, kappa, eta, 0.0).with_epsilon(0.0);
        let n_max = 14;
        let thermal = base.with_pump(Pump::Thermal { n_th });
        if check_truncation_convergence(&thermal, n_max).unwrap().converged {
            let ss = probe_free_state(&thermal, n_max).unwrap();
            prop_assert!(trace_distance(&ss.rho, &ground_product(&thermal_cavity(n_th, n_max))) < 1e-8);
        }
        let coherent = base.with_pump(Pump::Coherent { omega, detuning: 0.0 });
        if check_truncation_convergence(&coherent, n_max).unwrap().converged {
            let ss = probe_free_state(&coherent, n_max).unwrap();
            let alpha = Complex64::new(0.0, -omega / kappa);
            prop_assert!(trace_distance(&ss.rho, &ground_product(&coherent_cavity(alpha, n_max))) < 1e-6);
            prop_assert!(populations(&ss).level(Level::G) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn zero_temperature_numerics_equal_closed_form(
        ge in 0.5f64..20.0, gf in 0.0f64..3.0, kappa in 0.1f64..3.0, eta in 0.0f64..15.0,
        delta in -5.0f64..5.0,
    ) {
        let p = SystemParams::from_effective(ge, gf, kappa, eta, delta);
        let grid = linspace(-30.0, 30.0, 61);
        let opts = SpectrumOptions::with_n_max(2);
        let a = probe_spectrum(&p, &grid, Method::Analytic, &opts).unwrap();
        let l = probe_spectrum(&p, &grid, Method::LinearResponse, &opts).unwrap();
        let scale = a.im_chi.iter().chain(&a.re_chi).fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..grid.len() {
            prop_assert!((a.im_chi[k] - l.im_chi[k]).abs() <= 1e-9 * scale);
            prop_assert!((a.re_chi[k] - l.re_chi[k]).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn spectrum_is_rate_scale_covariant(
        ge in 0.5f64..10.0, eta in 0.0f64..8.0, n_th in 0.0f64..0.1, s in 0.1f64..10.0,
    ) {
        let p = SystemParams::from_effective(ge, 1.0, 1.0, eta, 0.0).with_pump(Pump::Thermal { n_th });
        let grid = linspace(-12.0, 12.0, 9);
        let scaled: Vec<f64> = grid.iter().map(|d| d * s).collect();
        let opts = SpectrumOptions::with_n_max(10);
        let a = probe_spectrum(&p, &grid, Method::LinearResponse, &opts).unwrap();
        let b = probe_spectrum(&p.scaled(s), &scaled, Method::LinearResponse, &opts).unwrap();
        for k in 0..grid.len() {
            prop_assert!((a.im_chi[k] - s * b.im_chi[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn thermal_photons_add_single_photon_doublet() {
    let base = SystemParams::from_effective(5.0, 1.0, 1.0, 80.0, 0.0);
    let grid = linspace(-300.0, 300.0, 2001);
    let opts = SpectrumOptions::with_n_max(20);
    let has_peak_near = |n_th: f64, x: f64| {
        let s = probe_spectrum(&base.with_pump(Pump::Thermal { n_th }), &grid, Method::LinearResponse, &opts).unwrap();
        let set = find_peaks(&s, None);
        set.peaks.iter().any(|p| (p.delta - x).abs() <= 5.0)
    };
    let root2 = 80.0 * 2f64.sqrt();
    assert!(!has_peak_near(0.0, root2) && !has_peak_near(0.0, -root2));
    assert!(has_peak_near(0.2, root2) && has_peak_near(0.2, -root2));
    assert!(has_peak_near(0.2, 80.0));
}

#[test]
fn vacuum_doublet_sits_at_vacuum_rabi_splitting() {
    let p = SystemParams::from_effective(5.0, 1.0, 1.0, 80.0, 0.0);
    let s = probe_spectrum(&p, &linspace(-200.0, 200.0, 4001), Method::Analytic, &SpectrumOptions::default()).unwrap();
    let set = find_peaks(&s, None);
    assert_eq!(set.peaks.len(), 2);
    for (pk, want) in set.peaks.iter().zip([-80.0, 80.0]) {
        assert!((pk.delta - want).abs() < 0.1);
    }
    let top = chi_vacuum(set.peaks[1].delta, &p).unwrap().im / p.beta;
    assert!((top - set.peaks[1].height).abs() < 1e-4 * top);
}

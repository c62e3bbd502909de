//! Closed-form vacuum susceptibility, its two-resonance decomposition and
//! the VIT / vacuum-ATS classifier.
//!
//! With the cavity in vacuum only `|0,g>`, `|0,e>` and `|1,f>` take part in
//! the probe response, and the first-order coherence is
//!
//! ```text
//! rho_ge / eps = (D + i(gf + k) + delta/2) / (-D^2 - i(ge + gf + k) D + C)
//! C = eta^2 + ge gf + ge k + delta^2/4 + i delta/2 (gf + k - ge)
//! ```
//!
//! where `D` is the probe detuning from the mean of the zero-photon dressed
//! doublet. At `delta = 0` the denominator factors as `-(D - D1)(D - D2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::{half_splitting, mixing_angle, subspace_rates};
use crate::error::{Error, Result};
use crate::model::{effective_rates, SystemParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance used for regime boundaries on the dimensionless ratios.
pub const BOUNDARY_TOL: f64 = 1e-12;

fn check_damping(p: &SystemParams) -> Result<()> {
    if p.total_damping() == 0.0 {
        Err(Error::DegenerateDamping)
    } else {
        Ok(())
    }
}

fn check_resonant(p: &SystemParams) -> Result<()> {
    if p.delta != 0.0 {
        Err(Error::NonzeroDetuning(p.delta))
    } else {
        Ok(())
    }
}

/// Vacuum susceptibility `chi = beta rho_ge / eps` at probe detuning `delta_probe`.
pub fn chi_vacuum(delta_probe: f64, p: &SystemParams) -> Result<Complex64> {
    check_damping(p)?;
    let ge = p.gamma_e();
    let cavity_side = p.gamma_f() + p.kappa;
    let d = p.delta;
    let c = Complex64::new(
        p.eta * p.eta + ge * p.gamma_f() + ge * p.kappa + d * d / 4.0,
        0.5 * d * (cavity_side - ge),
    );
    let num = Complex64::new(delta_probe + d / 2.0, cavity_side);
    let den = c - delta_probe * delta_probe - I * (p.total_damping() * delta_probe);
    Ok(p.beta * num / den)
}

/// First-order dressed coherences `(rho_Gu, rho_Gv)` per unit probe strength.
///
/// Recombine as `cos(theta_0) rho_Gu + sin(theta_0) rho_Gv = rho_ge / eps`.
pub fn first_order_coherences(delta_probe: f64, p: &SystemParams) -> Result<(Complex64, Complex64)> {
    check_damping(p)?;
    // eta = delta = 0: any angle diagonalizes the degenerate block; take the
    // decoupled limit reached from delta > 0.
    let theta = mixing_angle(0, p.eta, p.delta).unwrap_or(0.0);
    let rates = subspace_rates(theta, p.gamma_e(), p.gamma_f(), p.kappa);
    let r = half_splitting(0, p.eta, p.delta);
    let (s, c) = theta.sin_cos();
    // w_{-,0} - w_p = D - r,  w_{+,0} - w_p = D + r
    let lower = I * (delta_probe - r) + rates.gamma_gu;
    let upper = I * (delta_probe + r) + rates.gamma_gv;
    let den = rates.gamma_c * rates.gamma_c - lower * upper;
    let rho_gv = I * (s * lower - c * rates.gamma_c) / den;
    let rho_gu = I * (c * upper - s * rates.gamma_c) / den;
    Ok((rho_gu, rho_gv))
}

/// The two complex roots of `D^2 + i(ge + gf + k) D - C = 0` at `delta = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolePair {
    pub delta_1: Complex64,
    pub delta_2: Complex64,
    pub eta_t: f64,
    /// `4 eta^2 - eta_T^2`; negative means both poles lie on the imaginary axis.
    pub discriminant: f64,
}

pub fn poles(p: &SystemParams) -> Result<PolePair> {
    check_resonant(p)?;
    let eta_t = (p.gamma_f() + p.kappa - p.gamma_e()).abs();
    let discriminant = 4.0 * p.eta * p.eta - eta_t * eta_t;
    let root = if discriminant >= 0.0 {
        Complex64::new(discriminant.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-discriminant).sqrt())
    };
    let centre = Complex64::new(0.0, -p.total_damping());
    Ok(PolePair {
        delta_1: 0.5 * (centre + root),
        delta_2: 0.5 * (centre - root),
        eta_t,
        discriminant,
    })
}

/// One resonance `R(D) = weight / (D - pole)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceComponent {
    pub pole: Complex64,
    pub weight: Complex64,
}

impl ResonanceComponent {
    pub fn eval(&self, delta_probe: f64) -> Complex64 {
        self.weight / (delta_probe - self.pole)
    }
}

/// Partial-fraction split of the resonant (`delta = 0`) vacuum susceptibility
/// into two simple-pole resonances with `R1 + R2 = chi`.
pub fn decompose_resonances(p: &SystemParams) -> Result<(ResonanceComponent, ResonanceComponent)> {
    check_damping(p)?;
    let pp = poles(p)?;
    let gap = pp.delta_1 - pp.delta_2;
    if gap.norm() <= BOUNDARY_TOL * p.total_damping().max(p.eta) {
        return Err(Error::DegeneratePoles);
    }
    let cavity_side = I * (p.gamma_f() + p.kappa);
    // chi = -beta (D + i(gf+k)) / ((D - D1)(D - D2))
    let w1 = -p.beta * (pp.delta_1 + cavity_side) / gap;
    let w2 = p.beta * (pp.delta_2 + cavity_side) / gap;
    Ok((
        ResonanceComponent {
            pole: pp.delta_1,
            weight: w1,
        },
        ResonanceComponent {
            pole: pp.delta_2,
            weight: w2,
        },
    ))
}

/// Smallest coupling producing a central absorption dip at `delta = 0`,
/// `(gf + k) sqrt((gf + k) / (2 (gf + k) + ge))`.
pub fn dip_threshold(p: &SystemParams) -> Result<f64> {
    let ge = p.gamma_e();
    let cavity_side = p.gamma_f() + p.kappa;
    if cavity_side == 0.0 {
        return Err(Error::DivisionDegenerate {
            gamma_e: ge,
            gamma_f: p.gamma_f(),
        });
    }
    Ok(cavity_side * (cavity_side / (2.0 * cavity_side + ge)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    NoDip,
    #[serde(rename = "VIT")]
    Vit,
    VacuumATS,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::NoDip => "NoDip",
            Regime::Vit => "VIT",
            Regime::VacuumATS => "VacuumATS",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    #[serde(rename = "gamma_R")]
    pub gamma_r: f64,
    #[serde(rename = "eta_R")]
    pub eta_r: f64,
    pub eta_d: f64,
    pub eta_c: f64,
    pub dip_present: bool,
    pub regime: Regime,
    /// Set when `gamma_R = 2` or `eta_R` sits on `eta_d` / `eta_c` within
    /// [`BOUNDARY_TOL`]; the verdict then takes the stronger-coupling side.
    pub boundary_degenerate: bool,
}

/// Classifies the resonant vacuum spectrum.
///
/// VIT needs `eta_d < eta_R < eta_c` with `gamma_R > 2`; vacuum ATS needs
/// `eta_R > eta_c` when `gamma_R > 2`, or `eta_R > eta_d` when `gamma_R < 2`.
pub fn classify_regime(p: &SystemParams) -> Result<RegimeReport> {
    check_resonant(p)?;
    let r = effective_rates(p)?;
    let eta_d = 1.0 / (2.0 + r.gamma_r).sqrt();
    let eta_c = 0.5 * (1.0 - r.gamma_r).abs();
    let near = |a: f64, b: f64| (a - b).abs() <= BOUNDARY_TOL;
    let boundary_degenerate =
        near(r.gamma_r, 2.0) || near(r.eta_r, eta_d) || near(r.eta_r, eta_c);

    let above_d = r.eta_r > eta_d || near(r.eta_r, eta_d);
    let above_c = r.eta_r > eta_c || near(r.eta_r, eta_c);
    let regime = if r.gamma_r > 2.0 && !near(r.gamma_r, 2.0) {
        if above_c {
            Regime::VacuumATS
        } else if above_d {
            Regime::Vit
        } else {
            Regime::NoDip
        }
    } else if above_d {
        Regime::VacuumATS
    } else {
        Regime::NoDip
    };

    Ok(RegimeReport {
        gamma_r: r.gamma_r,
        eta_r: r.eta_r,
        eta_d,
        eta_c,
        dip_present: regime != Regime::NoDip,
        regime,
        boundary_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Absorption written out as a real rational function, independent of
    /// the complex expression used by `chi_vacuum`.
    fn im_chi_closed_form(d: f64, p: &SystemParams) -> f64 {
        let (ge, gf, k, eta, dl) = (p.gamma_e(), p.gamma_f(), p.kappa, p.eta, p.delta);
        let g = gf + k;
        let a = -d * d + eta * eta + ge * gf + dl * dl / 4.0 + ge * k;
        let b = -d * (ge + gf + k) + 0.5 * dl * (-ge + gf + k);
        let z = p.beta / (a * a + b * b);
        z * (ge * (d + dl / 2.0).powi(2) + eta * eta * g + ge * g * g)
    }

    fn random_params(rng: &mut ChaCha8Rng, resonant: bool) -> SystemParams {
        let delta = if resonant { 0.0 } else { rng.gen_range(-20.0..20.0) };
        let mut p = SystemParams::from_effective(
            rng.gen_range(0.1..20.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..30.0),
            delta,
        );
        p.beta = rng.gen_range(0.5..2.0);
        p
    }

    #[test]
    fn bare_atom_peak() {
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 0.0, 0.0);
        let chi = chi_vacuum(0.0, &p).unwrap();
        assert!((chi.im - 0.2).abs() < 1e-15);
    }

    #[test]
    fn resonant_value() {
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 10.0, 0.0);
        let chi = chi_vacuum(0.0, &p).unwrap();
        assert!((chi.im - 127.2 / 11236.0).abs() < 1e-15);
        assert!((chi.im - 0.011321).abs() < 1e-6);
    }

    #[test]
    fn degenerate_damping() {
        let p = SystemParams::from_effective(0.0, 0.0, 0.0, 1.0, 0.0);
        assert_eq!(chi_vacuum(0.0, &p), Err(Error::DegenerateDamping));
    }

    #[test]
    fn closed_form_absorption_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = random_params(&mut rng, false);
            let d = rng.gen_range(-60.0..60.0);
            let lhs = chi_vacuum(d, &p).unwrap().im;
            let rhs = im_chi_closed_form(d, &p);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300), "{lhs} {rhs}");
        }
    }

    #[test]
    fn even_in_probe_detuning_at_resonance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let p = random_params(&mut rng, true);
            let d = rng.gen_range(-50.0..50.0);
            let a = chi_vacuum(d, &p).unwrap().im;
            let b = chi_vacuum(-d, &p).unwrap().im;
            assert!((a - b).abs() <= 1e-13 * a.abs());
        }
    }

    #[test]
    fn joint_reflection_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = random_params(&mut rng, false);
            let mut q = p;
            q.delta = -p.delta;
            let d = rng.gen_range(-50.0..50.0);
            let a = chi_vacuum(d, &p).unwrap().im;
            let b = chi_vacuum(-d, &q).unwrap().im;
            assert!((a - b).abs() <= 1e-13 * a.abs());
        }
    }

    #[test]
    fn detuned_cavity_breaks_symmetry() {
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 10.0, 4.0);
        let a = chi_vacuum(9.0, &p).unwrap().im;
        let b = chi_vacuum(-9.0, &p).unwrap().im;
        assert!((a - b).abs() > 1e-3 * a.max(b));
    }

    #[test]
    fn dressed_recombination_matches_chi() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let p = random_params(&mut rng, false);
            let d = rng.gen_range(-40.0..40.0);
            let theta = mixing_angle(0, p.eta, p.delta).unwrap_or(0.0);
            let (gu, gv) = first_order_coherences(d, &p).unwrap();
            let rho = theta.cos() * gu + theta.sin() * gv;
            let chi = chi_vacuum(d, &p).unwrap() / p.beta;
            assert!((rho - chi).norm() <= 1e-12 * chi.norm().max(1e-12));
        }
    }

    #[test]
    fn dressed_amplitudes_balanced_without_cross_rate() {
        // ge = gf + k gives Gamma_c = 0; at resonance theta_0 = pi/4.
        let p = SystemParams::from_effective(3.0, 1.0, 2.0, 4.0, 0.0);
        let (gu, gv) = first_order_coherences(0.0, &p).unwrap();
        assert!((gu.norm() - gv.norm()).abs() < 1e-15);
    }

    #[test]
    fn poles_weak_coupling() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 3.9, 0.0);
        let pp = poles(&p).unwrap();
        assert_eq!(pp.eta_t, 8.0);
        assert!((pp.discriminant + 3.16).abs() < 1e-12);
        let b = 3.16f64.sqrt();
        assert!(pp.delta_1.re == 0.0 && pp.delta_2.re == 0.0);
        assert!((pp.delta_1.im - (-12.0 + b) / 2.0).abs() < 1e-14);
        assert!((pp.delta_2.im - (-12.0 - b) / 2.0).abs() < 1e-14);
        assert!((pp.delta_1.im + 5.111).abs() < 1e-3);
        assert!((pp.delta_2.im + 6.889).abs() < 1e-3);
    }

    #[test]
    fn poles_strong_coupling() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 4.1, 0.0);
        let pp = poles(&p).unwrap();
        assert!((pp.discriminant - 3.24).abs() < 1e-12);
        assert!((pp.delta_1 - Complex64::new(0.9, -6.0)).norm() < 1e-12);
        assert!((pp.delta_2 - Complex64::new(-0.9, -6.0)).norm() < 1e-12);
    }

    #[test]
    fn double_pole_at_threshold() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 4.0, 0.0);
        let pp = poles(&p).unwrap();
        assert_eq!(pp.delta_1, pp.delta_2);
        assert_eq!(decompose_resonances(&p), Err(Error::DegeneratePoles));
    }

    #[test]
    fn poles_need_resonance() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 4.0, 0.5);
        assert_eq!(poles(&p), Err(Error::NonzeroDetuning(0.5)));
    }

    #[test]
    fn partial_fractions_sum_to_chi() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let p = random_params(&mut rng, true);
            let Ok((r1, r2)) = decompose_resonances(&p) else { continue };
            for _ in 0..1000 {
                let d = rng.gen_range(-100.0..100.0);
                let chi = chi_vacuum(d, &p).unwrap();
                assert!((r1.eval(d) + r2.eval(d) - chi).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn strong_coupling_resonances_positive() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 10.0, 0.0);
        let (r1, r2) = decompose_resonances(&p).unwrap();
        let centre = 0.5 * (400.0f64 - 64.0).sqrt();
        assert!((r1.pole.re - centre).abs() < 1e-12);
        assert!((r2.pole.re + centre).abs() < 1e-12);
        assert!(r1.eval(0.0).im > 0.0 && r2.eval(0.0).im > 0.0);
        let mut best = (f64::MIN, 0.0);
        let mut lowest = f64::MAX;
        for k in 0..=4000 {
            let d = -40.0 + 0.02 * k as f64;
            let (a, b) = (r1.eval(d).im, r2.eval(d).im);
            lowest = lowest.min(a).min(b);
            if a > best.0 {
                best = (a, d);
            }
        }
        // (a x + b) / (x^2 + G^2) peaks at x = (sqrt(b^2 + a^2 G^2) - b) / a
        let (a, g) = (r1.weight.im, -r1.pole.im);
        let b = -r1.weight.re * g;
        let peak = r1.pole.re + ((b * b + a * a * g * g).sqrt() - b) / a;
        assert!((best.1 - peak).abs() < 0.02);
        // only a weak dispersive undershoot on the far side of each line
        assert!(best.0 > 0.0 && lowest > -0.05 * best.0);
    }

    #[test]
    fn weak_coupling_resonances_opposite() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 3.9, 0.0);
        let (r1, r2) = decompose_resonances(&p).unwrap();
        let (a, b) = (r1.eval(0.0).im, r2.eval(0.0).im);
        assert!(a * b < 0.0, "{a} {b}");
    }

    #[test]
    fn dip_threshold_value() {
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 0.0, 0.0);
        let t = dip_threshold(&p).unwrap();
        assert!((t - 1.2 * (1.2f64 / 7.4).sqrt()).abs() < 1e-15);
        assert!((t - 0.4832).abs() < 1e-4);
    }

    #[test]
    fn dip_threshold_grows_with_cavity_loss() {
        let mut last = 0.0;
        for k in [1.0, 10.0, 100.0, 1e4] {
            let t = dip_threshold(&SystemParams::from_effective(5.0, 1.0, k, 0.0, 0.0)).unwrap();
            assert!(t > last);
            last = t;
        }
        assert!(last > 50.0);
    }

    #[test]
    fn dip_threshold_matches_curvature_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let curvature = |p: &SystemParams| {
            let h = 1e-3 * p.total_damping();
            chi_vacuum(h, p).unwrap().im - 2.0 * chi_vacuum(0.0, p).unwrap().im
                + chi_vacuum(-h, p).unwrap().im
        };
        for _ in 0..50 {
            let mut p = random_params(&mut rng, true);
            let t = dip_threshold(&p).unwrap();
            p.eta = 0.95 * t;
            assert!(curvature(&p) < 0.0);
            p.eta = 1.05 * t;
            assert!(curvature(&p) > 0.0);
        }
    }

    #[test]
    fn circuit_parameters_classify_as_ats() {
        let tau = std::f64::consts::TAU;
        let p = SystemParams::from_effective(tau * 7.5, tau * 3.25, tau * 0.63, tau * 36.0, 0.0);
        let r = classify_regime(&p).unwrap();
        assert!((r.gamma_r - 1.93).abs() < 0.01);
        assert!((r.eta_r - 9.28).abs() < 0.01);
        assert!((r.eta_d - 0.50).abs() < 0.01);
        assert!((r.eta_c - 0.47).abs() < 0.01);
        assert_eq!(r.regime, Regime::VacuumATS);
        assert!(!r.boundary_degenerate);
    }

    #[test]
    fn vit_to_ats_transition() {
        let vit = classify_regime(&SystemParams::from_effective(10.0, 1.0, 1.0, 3.9, 0.0)).unwrap();
        assert_eq!(vit.regime, Regime::Vit);
        assert!(vit.dip_present);
        let ats = classify_regime(&SystemParams::from_effective(10.0, 1.0, 1.0, 4.1, 0.0)).unwrap();
        assert_eq!(ats.regime, Regime::VacuumATS);
    }

    #[test]
    fn weak_coupling_has_no_dip() {
        let r = classify_regime(&SystemParams::from_effective(10.0, 1.0, 1.0, 0.5, 0.0)).unwrap();
        assert!((r.eta_r - 0.25).abs() < 1e-15);
        assert!((r.eta_d - 1.0 / 7f64.sqrt()).abs() < 1e-14);
        assert_eq!(r.regime, Regime::NoDip);
        assert!(!r.dip_present);
    }

    #[test]
    fn boundary_takes_stronger_side() {
        // gamma_R = 4, eta_c = 1.5 -> eta = 3 sits on the VIT/ATS boundary
        let r = classify_regime(&SystemParams::from_effective(8.0, 1.0, 1.0, 3.0, 0.0)).unwrap();
        assert!(r.boundary_degenerate);
        assert_eq!(r.regime, Regime::VacuumATS);
        // gamma_R = 2 exactly
        let r = classify_regime(&SystemParams::from_effective(4.0, 1.0, 1.0, 3.0, 0.0)).unwrap();
        assert!(r.boundary_degenerate);
        assert_eq!(r.regime, Regime::VacuumATS);
    }

    #[test]
    fn classifier_errors() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 0.5, 0.1);
        assert_eq!(classify_regime(&p), Err(Error::NonzeroDetuning(0.1)));
        let p = SystemParams::from_effective(10.0, 0.0, 0.0, 0.5, 0.0);
        assert!(matches!(classify_regime(&p), Err(Error::DivisionDegenerate { .. })));
    }

    #[test]
    fn classifier_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let p = random_params(&mut rng, true);
            if p.gamma_f() + p.kappa == 0.0 {
                continue;
            }
            let s = rng.gen_range(0.01..100.0);
            let a = classify_regime(&p).unwrap();
            let b = classify_regime(&p.scaled(s)).unwrap();
            if !a.boundary_degenerate {
                assert_eq!(a.regime, b.regime);
            }
            assert!((a.gamma_r - b.gamma_r).abs() < 1e-12 * a.gamma_r.max(1.0));
        }
    }

    #[test]
    fn pole_structure_versus_cavity_loss() {
        // eta = gamma_f, gamma_e = 5: complex pair only for 2 < kappa < 6
        for k in 0..=800 {
            let kappa = 0.01 * k as f64;
            let p = SystemParams::from_effective(5.0, 1.0, kappa, 1.0, 0.0);
            let pp = poles(&p).unwrap();
            let s = p.total_damping();
            assert!((pp.delta_1 + pp.delta_2 - Complex64::new(0.0, -s)).norm() < 1e-12);
            if pp.discriminant < 0.0 {
                assert!(pp.delta_1.re == 0.0 && pp.delta_2.re == 0.0);
                assert!(kappa <= 2.0 + 1e-9 || kappa >= 6.0 - 1e-9);
            } else if pp.discriminant > 0.0 {
                assert!(pp.delta_1.re > 0.0 && pp.delta_1.re == -pp.delta_2.re);
                assert_eq!(pp.delta_1.im, pp.delta_2.im);
                assert!(kappa > 2.0 - 1e-9 && kappa < 6.0 + 1e-9);
            }
        }
    }
}

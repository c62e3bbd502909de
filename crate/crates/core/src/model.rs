//! System parameters, validation and the effective damping rates.
//!
//! All rates and detunings are dimensionless multiples of a reference rate
//! chosen by the user (the usual choice is `gamma_f`). Absolute units only
//! enter through [`thermal_occupation`], which converts a physical
//! temperature and cavity frequency into a mean thermal photon number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Atomic level of the Lambda system. The discriminant is the atomic index
/// used in the joint basis (`g = 0`, `f = 1`, `e = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    G = 0,
    F = 1,
    E = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::F, Level::E];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::G => "g",
            Level::F => "f",
            Level::E => "e",
        }
    }
}

/// Atomic decay rates `gamma_ij` for `i >= j` in the order g < f < e.
///
/// `gamma_ij` with `i > j` is population decay from `i` to `j`; the diagonal
/// entries are pure dephasing of that level.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecayRates {
    pub eg: f64,
    pub ef: f64,
    pub ee: f64,
    pub fg: f64,
    pub ff: f64,
    /// Always zero after validation.
    pub gg: f64,
}

impl DecayRates {
    /// Expands the half-width pair into the full map as
    /// `gamma_eg = 2 gamma_e`, `gamma_fg = 2 gamma_f`, everything else zero.
    ///
    /// The probe coherences depend on the map only through `gamma_e` and
    /// `gamma_f`, so linear-response spectra do not depend on the split.
    pub fn from_effective(gamma_e: f64, gamma_f: f64) -> Self {
        DecayRates {
            eg: 2.0 * gamma_e,
            fg: 2.0 * gamma_f,
            ..Default::default()
        }
    }

    /// Coherence decay rate of `|e>`: `(gamma_eg + gamma_ef + gamma_ee) / 2`.
    pub fn gamma_e(&self) -> f64 {
        0.5 * (self.eg + self.ef + self.ee)
    }

    /// Coherence decay rate of `|f>`: `(gamma_fg + gamma_ff) / 2`.
    pub fn gamma_f(&self) -> f64 {
        0.5 * (self.fg + self.ff)
    }

    /// `(upper, lower, rate)` for every channel, in a fixed order.
    pub fn channels(&self) -> [(Level, Level, f64); 6] {
        [
            (Level::E, Level::G, self.eg),
            (Level::E, Level::F, self.ef),
            (Level::E, Level::E, self.ee),
            (Level::F, Level::G, self.fg),
            (Level::F, Level::F, self.ff),
            (Level::G, Level::G, self.gg),
        ]
    }

    fn scaled(&self, s: f64) -> Self {
        DecayRates {
            eg: self.eg * s,
            ef: self.ef * s,
            ee: self.ee * s,
            fg: self.fg * s,
            ff: self.ff * s,
            gg: self.gg * s,
        }
    }
}

/// How the cavity mode is populated in the absence of the probe.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pump {
    /// Zero temperature, no drive: the cavity relaxes to vacuum.
    #[default]
    None,
    /// Thermal bath with mean occupation `n_th`.
    Thermal { n_th: f64 },
    /// Thermal bath given physically; converted to [`Pump::Thermal`] by
    /// [`validate_params`]. `temperature` in kelvin, `omega_c` in rad/s.
    ThermalTemperature { temperature: f64, omega_c: f64 },
    /// Coherent drive `Omega (a^dag e^{-i w_d t} + h.c.)`, with
    /// `detuning = w_c - w_d`.
    Coherent { omega: f64, detuning: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub gamma: DecayRates,
    /// Cavity coupling on the `f <-> e` transition.
    pub eta: f64,
    /// Cavity amplitude decay rate.
    pub kappa: f64,
    /// Cavity detuning `w_c - (w_e - w_f)`.
    pub delta: f64,
    pub pump: Pump,
    /// Susceptibility prefactor `mu_ge / eps_0`.
    pub beta: f64,
    /// Probe strength, used only by the finite-epsilon method.
    pub epsilon: f64,
}

pub const DEFAULT_EPSILON: f64 = 1e-3;

impl SystemParams {
    /// Parameters from the half-width pair, at zero temperature with
    /// `beta = 1` and the default probe strength.
    pub fn from_effective(gamma_e: f64, gamma_f: f64, kappa: f64, eta: f64, delta: f64) -> Self {
        SystemParams {
            gamma: DecayRates::from_effective(gamma_e, gamma_f),
            eta,
            kappa,
            delta,
            pump: Pump::None,
            beta: 1.0,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn with_pump(mut self, pump: Pump) -> Self {
        self.pump = pump;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn gamma_e(&self) -> f64 {
        self.gamma.gamma_e()
    }

    pub fn gamma_f(&self) -> f64 {
        self.gamma.gamma_f()
    }

    /// `gamma_e + gamma_f + kappa`.
    pub fn total_damping(&self) -> f64 {
        self.gamma_e() + self.gamma_f() + self.kappa
    }

    /// Mean thermal photon number of the bath; zero unless the pump is thermal.
    pub fn n_th(&self) -> f64 {
        match self.pump {
            Pump::Thermal { n_th } => n_th,
            Pump::ThermalTemperature {
                temperature,
                omega_c,
            } => thermal_occupation(omega_c, temperature).unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// Coherent drive amplitude, zero unless coherently pumped.
    pub fn drive_amplitude(&self) -> f64 {
        match self.pump {
            Pump::Coherent { omega, .. } => omega,
            _ => 0.0,
        }
    }

    /// `w_c - w_d`; zero when there is no coherent drive.
    pub fn pump_detuning(&self) -> f64 {
        match self.pump {
            Pump::Coherent { detuning, .. } => detuning,
            _ => 0.0,
        }
    }

    /// True when the probe-free cavity state is anything but vacuum.
    pub fn is_pumped(&self) -> bool {
        self.n_th() > 0.0 || self.drive_amplitude() > 0.0
    }

    /// Multiplies every rate-dimension input by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let pump = match self.pump {
            Pump::Coherent { omega, detuning } => Pump::Coherent {
                omega: omega * s,
                detuning: detuning * s,
            },
            other => other,
        };
        SystemParams {
            gamma: self.gamma.scaled(s),
            eta: self.eta * s,
            kappa: self.kappa * s,
            delta: self.delta * s,
            pump,
            beta: self.beta,
            epsilon: self.epsilon * s,
        }
    }
}

fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeRate { name, value })
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { name, value })
    }
}

/// Checks every invariant and returns the normalized parameters: a
/// physical temperature is converted to `n_th` and `gamma_gg` is forced to 0.
pub fn validate_params(p: &SystemParams) -> Result<SystemParams> {
    let g = &p.gamma;
    check_rate("gamma_eg", g.eg)?;
    check_rate("gamma_ef", g.ef)?;
    check_rate("gamma_ee", g.ee)?;
    check_rate("gamma_fg", g.fg)?;
    check_rate("gamma_ff", g.ff)?;
    check_rate("gamma_gg", g.gg)?;
    check_rate("eta", p.eta)?;
    check_rate("kappa", p.kappa)?;
    check_finite("delta", p.delta)?;
    if !(p.beta > 0.0 && p.beta.is_finite()) {
        return Err(Error::NonpositiveBeta(p.beta));
    }
    if !(p.epsilon > 0.0 && p.epsilon.is_finite()) {
        return Err(Error::NonpositiveEpsilon(p.epsilon));
    }

    let pump = match p.pump {
        Pump::None => Pump::None,
        Pump::Thermal { n_th } => {
            check_rate("n_th", n_th)?;
            Pump::Thermal { n_th }
        }
        Pump::ThermalTemperature {
            temperature,
            omega_c,
        } => {
            if !(omega_c > 0.0 && omega_c.is_finite()) {
                return Err(Error::MissingCavityFrequency);
            }
            Pump::Thermal {
                n_th: thermal_occupation(omega_c, temperature)?,
            }
        }
        Pump::Coherent { omega, detuning } => {
            check_rate("Omega", omega)?;
            check_finite("pump_detuning", detuning)?;
            Pump::Coherent { omega, detuning }
        }
    };

    let mut out = *p;
    out.gamma.gg = 0.0;
    out.pump = pump;
    Ok(out)
}

/// Bose-Einstein occupation `1 / (exp(hbar w / k_B T) - 1)` of a mode at
/// angular frequency `omega_c` (rad/s) and temperature `temperature` (K).
pub fn thermal_occupation(omega_c: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonpositiveTemperature(temperature));
    }
    if !(omega_c > 0.0 && omega_c.is_finite()) {
        return Err(Error::MissingCavityFrequency);
    }
    let x = HBAR * omega_c / (BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRates {
    pub gamma_e: f64,
    pub gamma_f: f64,
    /// `gamma_e / (gamma_f + kappa)`.
    pub gamma_r: f64,
    /// `eta / (gamma_f + kappa)`.
    pub eta_r: f64,
    /// `|gamma_f + kappa - gamma_e|`.
    pub eta_t: f64,
}

pub fn effective_rates(p: &SystemParams) -> Result<EffectiveRates> {
    let gamma_e = p.gamma_e();
    let gamma_f = p.gamma_f();
    let cavity_side = gamma_f + p.kappa;
    if cavity_side == 0.0 {
        return Err(Error::DivisionDegenerate { gamma_e, gamma_f });
    }
    Ok(EffectiveRates {
        gamma_e,
        gamma_f,
        gamma_r: gamma_e / cavity_side,
        eta_r: p.eta / cavity_side,
        eta_t: (cavity_side - gamma_e).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn valid_params_round_trip_unchanged() {
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0);
        assert_eq!(validate_params(&p).unwrap(), p);
    }

    #[test]
    fn negative_rate_rejected() {
        let mut p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0);
        p.gamma.eg = -1.0;
        assert!(matches!(
            validate_params(&p),
            Err(Error::NegativeRate { name: "gamma_eg", .. })
        ));
        let mut p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0);
        p.kappa = -0.1;
        assert!(matches!(validate_params(&p), Err(Error::NegativeRate { .. })));
    }

    #[test]
    fn gamma_gg_forced_to_zero() {
        let mut p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0);
        p.gamma.gg = 3.0;
        assert_eq!(validate_params(&p).unwrap().gamma.gg, 0.0);
    }

    #[test]
    fn beta_and_epsilon_must_be_positive() {
        let mut p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0);
        p.beta = 0.0;
        assert_eq!(validate_params(&p), Err(Error::NonpositiveBeta(0.0)));
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0).with_epsilon(-1e-3);
        assert!(matches!(validate_params(&p), Err(Error::NonpositiveEpsilon(_))));
    }

    #[test]
    fn temperature_without_frequency_rejected() {
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0).with_pump(
            Pump::ThermalTemperature {
                temperature: 0.08,
                omega_c: 0.0,
            },
        );
        assert_eq!(validate_params(&p), Err(Error::MissingCavityFrequency));
    }

    #[test]
    fn temperature_converted_to_occupation() {
        let p = SystemParams::from_effective(5.0, 1.0, 0.2, 2.0, 0.0).with_pump(
            Pump::ThermalTemperature {
                temperature: 0.080,
                omega_c: 2.0 * PI * 5e9,
            },
        );
        match validate_params(&p).unwrap().pump {
            Pump::Thermal { n_th } => assert!((n_th - 0.0524).abs() < 5e-4, "{n_th}"),
            other => panic!("unexpected pump {other:?}"),
        }
    }

    #[test]
    fn occupation_at_ln2_is_one() {
        // hbar w / k T = ln 2
        let temperature = 1.0;
        let omega = LN_2 * BOLTZMANN * temperature / HBAR;
        let n = thermal_occupation(omega, temperature).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn occupation_vanishes_at_low_temperature() {
        let n = thermal_occupation(2.0 * PI * 5e9, 1e-4).unwrap();
        assert!(n < 1e-100);
        assert_eq!(
            thermal_occupation(2.0 * PI * 5e9, 0.0),
            Err(Error::NonpositiveTemperature(0.0))
        );
    }

    #[test]
    fn occupation_at_five_ghz_eighty_mk() {
        // x = hbar w / k T evaluated independently from the constants
        let x = 1.054_571_817e-34 * 2.0 * PI * 5.0e9 / (1.380_649e-23 * 0.080);
        let expected = 1.0 / (x.exp() - 1.0);
        let n = thermal_occupation(2.0 * PI * 5e9, 0.080).unwrap();
        assert!((n - expected).abs() < 1e-14);
        assert!((n - 0.0524).abs() < 5e-4);
    }

    #[test]
    fn effective_rates_from_circuit_parameters() {
        // 2 pi MHz units; every rate carries the same 2 pi so it drops out.
        let mut p = SystemParams::from_effective(0.0, 0.0, 0.63, 36.0, 0.0);
        p.gamma = DecayRates {
            eg: 15.0,
            fg: 6.5,
            ..Default::default()
        };
        let r = effective_rates(&p).unwrap();
        assert_eq!(r.gamma_e, 7.5);
        assert_eq!(r.gamma_f, 3.25);
        assert!((r.gamma_r - 1.93).abs() < 5e-3);
        assert!((r.eta_r - 9.28).abs() < 5e-3);
    }

    #[test]
    fn effective_rates_degenerate() {
        let p = SystemParams::from_effective(0.0, 0.0, 0.0, 1.0, 0.0);
        assert_eq!(
            effective_rates(&p),
            Err(Error::DivisionDegenerate {
                gamma_e: 0.0,
                gamma_f: 0.0
            })
        );
    }

    #[test]
    fn eta_t_direct() {
        let p = SystemParams::from_effective(5.0, 1.0, 1.0, 4.0, 0.0);
        assert_eq!(effective_rates(&p).unwrap().eta_t, 3.0);
    }

    #[test]
    fn full_map_half_widths() {
        let g = DecayRates {
            eg: 1.0,
            ef: 2.0,
            ee: 3.0,
            fg: 4.0,
            ff: 5.0,
            gg: 0.0,
        };
        assert_eq!(g.gamma_e(), 3.0);
        assert_eq!(g.gamma_f(), 4.5);
    }

    proptest! {
        #[test]
        fn effective_rates_scale_covariant(
            ge in 0.1f64..20.0, gf in 0.0f64..5.0, k in 0.01f64..5.0,
            eta in 0.0f64..50.0, s in 0.01f64..100.0,
        ) {
            let p = SystemParams::from_effective(ge, gf, k, eta, 0.3);
            let a = effective_rates(&p).unwrap();
            let b = effective_rates(&p.scaled(s)).unwrap();
            let tol = 1e-12;
            prop_assert!((b.gamma_e - s * a.gamma_e).abs() <= tol * b.gamma_e.abs().max(1.0));
            prop_assert!((b.gamma_f - s * a.gamma_f).abs() <= tol * b.gamma_f.abs().max(1.0));
            prop_assert!((b.eta_t - s * a.eta_t).abs() <= 1e-10 * (s * (ge + gf + k)).max(1.0));
            prop_assert!((b.gamma_r - a.gamma_r).abs() <= tol * a.gamma_r.max(1.0));
            prop_assert!((b.eta_r - a.eta_r).abs() <= tol * a.eta_r.max(1.0));
        }

        #[test]
        fn occupation_monotone(t1 in 1e-2f64..1.0, dt in 1e-4f64..1.0, f in 1e9f64..2e10) {
            let w = 2.0 * PI * f;
            prop_assert!(thermal_occupation(w, t1 + dt).unwrap() > thermal_occupation(w, t1).unwrap());
            prop_assert!(thermal_occupation(w * 1.1, t1).unwrap() < thermal_occupation(w, t1).unwrap());
        }
    }
}

//! Flat TOML run configuration.

use std::f64::consts::PI;
use std::path::Path;

use lambda_cavity::model::{validate_params, DEFAULT_EPSILON};
use lambda_cavity::solver::Method;
use lambda_cavity::{DecayRates, Pump, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Keys accepted as `sweep_key`.
pub const SWEEP_KEYS: [&str; 17] = [
    "gamma_e",
    "gamma_f",
    "gamma_eg",
    "gamma_ef",
    "gamma_ee",
    "gamma_fg",
    "gamma_ff",
    "eta",
    "kappa",
    "delta",
    "n_th",
    "temperature_mK",
    "omega_c_GHz",
    "Omega",
    "pump_detuning",
    "beta",
    "epsilon",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gamma_e: Option<f64>,
    pub gamma_f: Option<f64>,
    pub gamma_eg: Option<f64>,
    pub gamma_ef: Option<f64>,
    pub gamma_ee: Option<f64>,
    pub gamma_fg: Option<f64>,
    pub gamma_ff: Option<f64>,
    pub eta: Option<f64>,
    pub kappa: Option<f64>,
    pub delta: Option<f64>,
    pub n_th: Option<f64>,
    #[serde(rename = "temperature_mK")]
    pub temperature_mk: Option<f64>,
    #[serde(rename = "omega_c_GHz")]
    pub omega_c_ghz: Option<f64>,
    #[serde(rename = "Omega")]
    pub omega: Option<f64>,
    pub pump_detuning: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,

    pub n_max: Option<usize>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_points: Option<usize>,
    pub method: Option<String>,
    pub output: Option<String>,
    pub format: Option<String>,
    pub sweep_key: Option<String>,
    pub sweep_values: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        if let Some(n) = self.delta_points {
            if n < 2 {
                return Err(CliError::Config(format!("delta_points must be at least 2, got {n}")));
            }
        }
        match (&self.sweep_key, &self.sweep_values) {
            (Some(k), Some(v)) => {
                if !SWEEP_KEYS.contains(&k.as_str()) {
                    return Err(CliError::Config(format!("unknown sweep_key '{k}'")));
                }
                if v.is_empty() {
                    return Err(CliError::Config("sweep_values is empty".into()));
                }
            }
            (None, None) => {}
            _ => {
                return Err(CliError::Config(
                    "sweep_key and sweep_values must be given together".into(),
                ))
            }
        }
        if let Some(m) = &self.method {
            m.parse::<Method>().map_err(CliError::Config)?;
        }
        Ok(())
    }

    pub fn method(&self) -> CliResult<Option<Method>> {
        self.method
            .as_deref()
            .map(|m| m.parse::<Method>().map_err(CliError::Config))
            .transpose()
    }

    /// Copy with one physics key overridden.
    pub fn with_value(&self, key: &str, value: f64) -> CliResult<Self> {
        let mut c = self.clone();
        let slot = match key {
            "gamma_e" => &mut c.gamma_e,
            "gamma_f" => &mut c.gamma_f,
            "gamma_eg" => &mut c.gamma_eg,
            "gamma_ef" => &mut c.gamma_ef,
            "gamma_ee" => &mut c.gamma_ee,
            "gamma_fg" => &mut c.gamma_fg,
            "gamma_ff" => &mut c.gamma_ff,
            "eta" => &mut c.eta,
            "kappa" => &mut c.kappa,
            "delta" => &mut c.delta,
            "n_th" => &mut c.n_th,
            "temperature_mK" => &mut c.temperature_mk,
            "omega_c_GHz" => &mut c.omega_c_ghz,
            "Omega" => &mut c.omega,
            "pump_detuning" => &mut c.pump_detuning,
            "beta" => &mut c.beta,
            "epsilon" => &mut c.epsilon,
            other => return Err(CliError::Config(format!("unknown sweep_key '{other}'"))),
        };
        *slot = Some(value);
        Ok(c)
    }

    fn decay_rates(&self) -> CliResult<DecayRates> {
        let effective = self.gamma_e.is_some() || self.gamma_f.is_some();
        let map = [self.gamma_eg, self.gamma_ef, self.gamma_ee, self.gamma_fg, self.gamma_ff];
        let full = map.iter().any(Option::is_some);
        match (effective, full) {
            (true, true) => Err(CliError::Config(
                "give either gamma_e/gamma_f or the gamma_ij map, not both".into(),
            )),
            (false, false) => Err(CliError::Config(
                "missing decay rates: give gamma_e (and gamma_f) or the gamma_ij map".into(),
            )),
            (true, false) => {
                let ge = self
                    .gamma_e
                    .ok_or_else(|| CliError::Config("gamma_e is required with gamma_f".into()))?;
                Ok(DecayRates::from_effective(ge, self.gamma_f.unwrap_or(1.0)))
            }
            (false, true) => Ok(DecayRates {
                eg: self.gamma_eg.unwrap_or(0.0),
                ef: self.gamma_ef.unwrap_or(0.0),
                ee: self.gamma_ee.unwrap_or(0.0),
                fg: self.gamma_fg.unwrap_or(0.0),
                ff: self.gamma_ff.unwrap_or(0.0),
                gg: 0.0,
            }),
        }
    }

    fn pump(&self) -> CliResult<Pump> {
        if self.n_th.is_some() && self.temperature_mk.is_some() {
            return Err(CliError::Config("give n_th or temperature_mK, not both".into()));
        }
        let thermal = match (self.n_th, self.temperature_mk) {
            (Some(n), _) => Some(Pump::Thermal { n_th: n }),
            (None, Some(0.0)) => None,
            (None, Some(t)) => {
                let ghz = self.omega_c_ghz.unwrap_or(f64::NAN);
                Some(Pump::ThermalTemperature {
                    temperature: t * 1e-3,
                    omega_c: 2.0 * PI * ghz * 1e9,
                })
            }
            (None, None) => None,
        };
        let thermal_on = match thermal {
            Some(Pump::Thermal { n_th }) => n_th != 0.0,
            Some(_) => true,
            None => false,
        };
        match (self.omega, thermal) {
            (Some(o), _) if o != 0.0 && thermal_on => Err(CliError::Config(
                "simultaneous thermal and coherent pumping is not supported".into(),
            )),
            (Some(o), _) if o != 0.0 || self.pump_detuning.is_some() && !thermal_on => Ok(Pump::Coherent {
                omega: o,
                detuning: self.pump_detuning.unwrap_or(0.0),
            }),
            (_, Some(p)) => Ok(p),
            _ => Ok(Pump::None),
        }
    }

    /// Validated physical parameters.
    pub fn params(&self) -> CliResult<SystemParams> {
        let eta = self.eta.ok_or_else(|| CliError::Config("missing key 'eta'".into()))?;
        let p = SystemParams {
            gamma: self.decay_rates()?,
            eta,
            kappa: self.kappa.unwrap_or(0.0),
            delta: self.delta.unwrap_or(0.0),
            pump: self.pump()?,
            beta: self.beta.unwrap_or(1.0),
            epsilon: self.epsilon.unwrap_or(DEFAULT_EPSILON),
        };
        Ok(validate_params(&p)?)
    }
}

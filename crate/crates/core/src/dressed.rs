//! Dressed states of each photon-number manifold `{|n,e>, |n+1,f>}` and the
//! relaxation rates of the vacuum probe coherences in the dressed basis.
//!
//! Eigenfrequencies are reported relative to the manifold mean
//! `(n + 1/2) w_c + (w_e + w_f) / 2`; only differences enter any spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Mixing angle of manifold `n`, `theta_n = atan2(2 eta sqrt(n+1), delta) / 2`.
///
/// Lies in `(0, pi/2)` whenever `eta > 0`, equals `pi/4` on resonance and is
/// continuous through `delta = 0`.
pub fn mixing_angle(n: usize, eta: f64, delta: f64) -> Result<f64> {
    if !(eta >= 0.0) {
        return Err(Error::NegativeRate { name: "eta", value: eta });
    }
    if eta == 0.0 && delta == 0.0 {
        return Err(Error::FullyDegenerate);
    }
    let g = 2.0 * eta * ((n + 1) as f64).sqrt();
    Ok(0.5 * g.atan2(delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedManifold {
    pub n: usize,
    pub theta: f64,
    /// Upper eigenfrequency (state `|v_n>`), relative to the manifold mean.
    pub omega_plus: f64,
    /// Lower eigenfrequency (state `|u_n>`), relative to the manifold mean.
    pub omega_minus: f64,
    /// `|u_n>` in the `(|n,e>, |n+1,f>)` basis: `(cos, -sin)`.
    pub u: [f64; 2],
    /// `|v_n>` in the `(|n,e>, |n+1,f>)` basis: `(sin, cos)`.
    pub v: [f64; 2],
}

impl DressedManifold {
    /// `omega_plus - omega_minus = sqrt(delta^2 + 4 eta^2 (n+1))`.
    pub fn splitting(&self) -> f64 {
        self.omega_plus - self.omega_minus
    }
}

/// Half the dressed splitting, `sqrt(delta^2 + 4 eta^2 (n+1)) / 2`.
pub fn half_splitting(n: usize, eta: f64, delta: f64) -> f64 {
    0.5 * (delta * delta + 4.0 * eta * eta * (n + 1) as f64).sqrt()
}

pub fn manifold(n: usize, params: &SystemParams) -> Result<DressedManifold> {
    let theta = mixing_angle(n, params.eta, params.delta)?;
    let r = half_splitting(n, params.eta, params.delta);
    let (s, c) = theta.sin_cos();
    Ok(DressedManifold {
        n,
        theta,
        omega_plus: r,
        omega_minus: -r,
        u: [c, -s],
        v: [s, c],
    })
}

/// Relaxation rates of `rho_Gu`, `rho_Gv` and their cross coupling.
///
/// Sign convention: the diagonal rates are non-positive,
/// `Gamma_Gu + Gamma_Gv = -(gamma_e + gamma_f + kappa)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceRates {
    pub gamma_gu: f64,
    pub gamma_gv: f64,
    pub gamma_c: f64,
}

pub fn subspace_rates(theta_0: f64, gamma_e: f64, gamma_f: f64, kappa: f64) -> SubspaceRates {
    let (s, c) = theta_0.sin_cos();
    let cavity_side = gamma_f + kappa;
    SubspaceRates {
        gamma_gv: -gamma_e * s * s - cavity_side * c * c,
        gamma_gu: -gamma_e * c * c - cavity_side * s * s,
        gamma_c: (cavity_side - gamma_e) * s * c,
    }
}

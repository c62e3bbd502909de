//! Direct time integration of the master equation with an explicitly
//! oscillating probe, as an independent check of the static frame.
//!
//! The frame is offset from the probe by `w` on both `|e>` and `|f>`, so
//! the probe term carries `e^{-i w t}` and the coherence `<g|rho|e>` oscillates
//! at `w` in the periodic steady state. Its Fourier component at `w` is
//! compared with the static-frame value.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liouvillian::{build_liouvillian, build_operators, lindblad, HilbertSpec};
use crate::model::{validate_params, Level, SystemParams};
use crate::sparse::CsrMatrix;

use super::steady::{kernel_state, validate_probe_free};

/// Largest truncation accepted by [`time_domain_crosscheck`].
pub const MAX_TIME_DOMAIN_N_MAX: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomainOptions {
    pub n_max: usize,
    /// Frame offset `w`; must be nonzero.
    pub offset: f64,
    /// Settling time in units of the slowest coherence decay time.
    pub settle: f64,
    /// Step as a fraction of the inverse Gershgorin bound of the generator.
    pub step_fraction: f64,
}

impl Default for TimeDomainOptions {
    fn default() -> Self {
        TimeDomainOptions {
            n_max: 2,
            offset: 1.0,
            settle: 30.0,
            step_fraction: 0.1,
        }
    }
}

fn gershgorin(l: &CsrMatrix) -> f64 {
    (0..l.nrows())
        .map(|r| l.row(r).map(|(_, v)| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `chi / beta` at `delta_probe` from the periodic steady state.
pub fn time_domain_crosscheck(params: &SystemParams, delta_probe: f64, opts: &TimeDomainOptions) -> Result<Complex64> {
    let p = validate_params(params)?;
    if opts.n_max > MAX_TIME_DOMAIN_N_MAX {
        return Err(Error::InvalidTruncation(opts.n_max));
    }
    if p.n_th() > 0.0 {
        return Err(Error::IntegrationFailure("time-domain check requires a zero-temperature cavity".into()));
    }
    if !(opts.offset != 0.0 && opts.offset.is_finite()) {
        return Err(Error::IntegrationFailure("frame offset must be nonzero".into()));
    }
    let spec = HilbertSpec::new(opts.n_max)?;
    let d = spec.dim();
    let w = opts.offset;
    let eps = p.epsilon;

    let static_part = build_liouvillian(&p, delta_probe + w, spec, false)?.matrix;
    let ops = build_operators(spec);
    let raise = lindblad(ops.sigma(Level::E, Level::G), &[]).scale(Complex64::new(eps, 0.0));
    let lower = lindblad(ops.sigma(Level::G, Level::E), &[]).scale(Complex64::new(eps, 0.0));

    let rates = [p.gamma_e(), p.gamma_f() + p.kappa, if p.is_pumped() { p.kappa } else { f64::INFINITY }];
    let slowest = rates.iter().cloned().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
    if !slowest.is_finite() {
        return Err(Error::IntegrationFailure("no damping: periodic steady state is not reached".into()));
    }
    let period = 2.0 * std::f64::consts::PI / w.abs();
    let bound = gershgorin(&static_part) + gershgorin(&raise) + gershgorin(&lower);
    let steps_per_period = ((period * bound / opts.step_fraction).ceil() as usize).max(64);
    let dt = period / steps_per_period as f64;
    let settle_periods = (opts.settle / slowest / period).ceil() as usize;

    let probe_free = validate_probe_free(&p)?;
    let (rho0, _) = kernel_state(&build_liouvillian(&probe_free, delta_probe + w, spec, false)?.matrix, d)?;
    let mut x = crate::liouvillian::vectorize(&rho0);

    let deriv = |t: f64, v: &[Complex64]| -> Vec<Complex64> {
        let ph = Complex64::from_polar(1.0, -w * t);
        let mut out = static_part.matvec(v);
        let a = raise.matvec(v);
        let b = lower.matvec(v);
        for k in 0..out.len() {
            out[k] += ph * a[k] + ph.conj() * b[k];
        }
        out
    };
    let axpy = |v: &[Complex64], k: &[Complex64], h: f64| -> Vec<Complex64> {
        v.iter().zip(k).map(|(a, b)| a + b * h).collect()
    };
    let readout: Vec<usize> = (0..spec.photon_states())
        .map(|n| spec.vec_index(spec.index(n, Level::G), spec.index(n, Level::E)))
        .collect();

    let mut t = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    let total = (settle_periods + 1) * steps_per_period;
    for step in 0..total {
        if step >= settle_periods * steps_per_period {
            let rho_ge: Complex64 = readout.iter().map(|&k| x[k]).sum();
            acc += rho_ge * Complex64::from_polar(1.0, -w * t);
        }
        let k1 = deriv(t, &x);
        let k2 = deriv(t + 0.5 * dt, &axpy(&x, &k1, 0.5 * dt));
        let k3 = deriv(t + 0.5 * dt, &axpy(&x, &k2, 0.5 * dt));
        let k4 = deriv(t + dt, &axpy(&x, &k3, dt));
        for i in 0..x.len() {
            x[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        t = (step + 1) as f64 * dt;
        if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::IntegrationFailure(format!("state diverged at t = {t}")));
        }
    }
    Ok(acc / steps_per_period as f64 / eps)
}

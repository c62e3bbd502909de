//! Steady states, populations and truncation diagnostics.

use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouvillian::{build_liouvillian, cavity_liouvillian, HilbertSpec, SuperOperator};
use crate::model::{validate_params, Level, SystemParams};
use crate::sparse::{norm2, CsrMatrix, SparseLu};

/// Population allowed beyond the convergence window.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Two independently completed solves must agree to this level.
pub const UNIQUENESS_TOLERANCE: f64 = 1e-8;
const UNIQUENESS_SEED: u64 = 0x5eed;

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: Mat<Complex64>,
    /// `||L vec(rho)||_2`
    pub residual: f64,
    pub n_max: usize,
    /// Photon-number tail below [`TAIL_TOLERANCE`].
    pub converged: bool,
    pub tail_mass: f64,
}

impl SteadyState {
    pub fn spec(&self) -> HilbertSpec {
        HilbertSpec::new(self.n_max).expect("valid truncation")
    }
}

/// Width of the photon-number window whose population counts as tail.
///
/// Five states for the default truncations, fewer for very small `n_max`
/// so the window never swallows the whole space.
pub fn tail_window(n_max: usize) -> usize {
    (n_max / 3).clamp(1, 5)
}

/// Population with photon number above `n_max - tail_window(n_max)`.
pub fn tail_mass(photon_distribution: &[f64]) -> f64 {
    let n_max = photon_distribution.len() - 1;
    let first = n_max + 1 - tail_window(n_max);
    photon_distribution[first..].iter().map(|p| p.max(0.0)).sum()
}

/// Solves `L x = 0`, `tr x = 1` by overwriting diagonal row `replace` with
/// the trace functional.
fn completed_solve(l: &CsrMatrix, d: usize, replace: usize) -> Result<Vec<Complex64>> {
    let row = replace * d + replace;
    let one = Complex64::new(1.0, 0.0);
    let entries = l
        .iter()
        .filter(|e| e.0 != row)
        .chain((0..d).map(|k| (row, k * d + k, one)));
    let lt = CsrMatrix::from_triplets(l.nrows(), l.ncols(), entries);
    let mut rhs = vec![Complex64::new(0.0, 0.0); l.nrows()];
    rhs[row] = one;
    match SparseLu::factor(&lt).and_then(|lu| lu.solve(&rhs)) {
        Ok(x) => Ok(x),
        Err(_) => Err(Error::NonUniqueSteadyState {
            discrepancy: f64::INFINITY,
        }),
    }
}

/// Unique trace-one kernel vector of a column-stacked generator on a
/// `d`-dimensional Hilbert space, returned as a Hermitian matrix.
pub fn kernel_state(l: &CsrMatrix, d: usize) -> Result<(Mat<Complex64>, f64)> {
    if l.nrows() != d * d || l.ncols() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: l.nrows(),
        });
    }
    let first = completed_solve(l, d, 0)?;
    if d > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(UNIQUENESS_SEED ^ d as u64);
        let other = rng.gen_range(1..d);
        let second = completed_solve(l, d, other)?;
        let diff: Vec<Complex64> = first.iter().zip(&second).map(|(a, b)| a - b).collect();
        let discrepancy = norm2(&diff);
        if !(discrepancy <= UNIQUENESS_TOLERANCE) {
            return Err(Error::NonUniqueSteadyState { discrepancy });
        }
    }
    let mut rho = Mat::from_fn(d, d, |r, c| first[c * d + r]);
    rho = Mat::from_fn(d, d, |r, c| 0.5 * (rho[(r, c)] + rho[(c, r)].conj()));
    let tr: Complex64 = (0..d).map(|k| rho[(k, k)]).sum();
    rho = Mat::from_fn(d, d, |r, c| rho[(r, c)] / tr.re);
    let v = crate::liouvillian::vectorize(&rho);
    let residual = norm2(&l.matvec(&v));
    Ok((rho, residual))
}

pub fn steady_state(l: &SuperOperator) -> Result<SteadyState> {
    let spec = l.spec;
    let (rho, residual) = kernel_state(&l.matrix, spec.dim())?;
    let dist = photon_distribution(&rho, spec);
    let tail = tail_mass(&dist);
    Ok(SteadyState {
        rho,
        residual,
        n_max: spec.n_max(),
        converged: tail < TAIL_TOLERANCE,
        tail_mass: tail,
    })
}

/// `P(n) = sum_i <n,i|rho|n,i>`.
pub fn photon_distribution(rho: &Mat<Complex64>, spec: HilbertSpec) -> Vec<f64> {
    (0..spec.photon_states())
        .map(|n| Level::ALL.iter().map(|&l| { let k = spec.index(n, l); rho[(k, k)].re }).sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    /// `<n,i|rho|n,i>` for every photon number and level.
    pub joint: BTreeMap<(usize, Level), f64>,
    /// `P_n = <n,g|rho|n,g>`.
    pub ground: Vec<f64>,
}

impl Populations {
    pub fn total(&self) -> f64 {
        self.joint.values().sum()
    }

    pub fn level(&self, level: Level) -> f64 {
        self.joint.iter().filter(|(k, _)| k.1 == level).map(|(_, v)| v).sum()
    }
}

pub fn populations(ss: &SteadyState) -> Populations {
    let spec = ss.spec();
    let mut joint = BTreeMap::new();
    for n in 0..spec.photon_states() {
        for &l in &Level::ALL {
            let k = spec.index(n, l);
            joint.insert((n, l), ss.rho[(k, k)].re.max(0.0));
        }
    }
    let ground = (0..spec.photon_states()).map(|n| joint[&(n, Level::G)]).collect();
    Populations { joint, ground }
}

/// True when every atomic level drains into `g`, so the probe-free steady
/// state is `|g><g|` times the bare cavity state.
pub fn ground_is_attractor(p: &SystemParams) -> bool {
    let g = &p.gamma;
    g.fg > 0.0 && (g.eg > 0.0 || g.ef > 0.0)
}

/// Validation that tolerates a switched-off probe.
pub(crate) fn validate_probe_free(params: &SystemParams) -> Result<SystemParams> {
    let mut p = *params;
    if p.epsilon == 0.0 {
        p.epsilon = crate::model::DEFAULT_EPSILON;
    }
    Ok(validate_params(&p)?.with_epsilon(0.0))
}

/// Probe-free steady state of the cavity alone, `(n_max+1)` square.
pub fn cavity_state(params: &SystemParams, n_max: usize) -> Result<Mat<Complex64>> {
    let p = validate_probe_free(params)?;
    let (rho, _) = kernel_state(&cavity_liouvillian(&p, n_max), n_max + 1)?;
    Ok(rho)
}

/// Probe-free steady state of the joint system.
pub fn probe_free_state(params: &SystemParams, n_max: usize) -> Result<SteadyState> {
    let p = validate_probe_free(params)?;
    let spec = HilbertSpec::new(n_max)?;
    steady_state(&build_liouvillian(&p, 0.0, spec, false)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub n_max: usize,
    pub converged: bool,
    pub tail_mass: f64,
}

pub fn check_truncation_convergence(params: &SystemParams, n_max: usize) -> Result<TruncationReport> {
    let p = validate_probe_free(params)?;
    HilbertSpec::new(n_max)?;
    let dist: Vec<f64> = if ground_is_attractor(&p) {
        let rho = cavity_state(&p, n_max)?;
        (0..=n_max).map(|n| rho[(n, n)].re).collect()
    } else {
        let ss = probe_free_state(&p, n_max)?;
        photon_distribution(&ss.rho, ss.spec())
    };
    let tail = tail_mass(&dist);
    Ok(TruncationReport {
        n_max,
        converged: tail < TAIL_TOLERANCE,
        tail_mass: tail,
    })
}

/// Smallest `n_max` in `[lo, hi]` whose truncation converges.
pub fn minimal_truncation(params: &SystemParams, lo: usize, hi: usize) -> Result<TruncationReport> {
    let mut last = None;
    for n in lo.max(1)..=hi {
        let r = check_truncation_convergence(params, n)?;
        if r.converged {
            return Ok(r);
        }
        last = Some(r);
    }
    let r = last.unwrap_or(check_truncation_convergence(params, hi.max(1))?);
    Err(Error::TruncationNotConverged {
        n_max: r.n_max,
        tail_mass: r.tail_mass,
    })
}

/// `sum |eig(a - b)| / 2` for Hermitian `a`, `b`.
pub fn trace_distance(a: &Mat<Complex64>, b: &Mat<Complex64>) -> f64 {
    let diff = a - b;
    let eig = diff
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("Hermitian eigenvalues");
    0.5 * eig.iter().map(|x| x.abs()).sum::<f64>()
}

pub fn min_eigenvalue(rho: &Mat<Complex64>) -> f64 {
    rho.self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("Hermitian eigenvalues")
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// `|g><g| (x) rho_c` in the joint basis.
pub fn ground_product(rho_c: &Mat<Complex64>) -> Mat<Complex64> {
    let np = rho_c.nrows();
    let spec = HilbertSpec::new(np - 1).expect("valid truncation");
    let d = spec.dim();
    let mut out = Mat::<Complex64>::zeros(d, d);
    for n in 0..np {
        for m in 0..np {
            out[(spec.index(n, Level::G), spec.index(m, Level::G))] = rho_c[(n, m)];
        }
    }
    out
}

/// Thermal cavity state with mean `n_th`, exact on the full Fock space and
/// cut at `n_max` without renormalization.
pub fn thermal_cavity(n_th: f64, n_max: usize) -> Mat<Complex64> {
    let mut m = Mat::<Complex64>::zeros(n_max + 1, n_max + 1);
    for n in 0..=n_max {
        let p = n_th.powi(n as i32) / (1.0 + n_th).powi(n as i32 + 1);
        m[(n, n)] = Complex64::new(p, 0.0);
    }
    m
}

/// Coherent state `|alpha><alpha|` cut at `n_max`.
pub fn coherent_cavity(alpha: Complex64, n_max: usize) -> Mat<Complex64> {
    let mut amp = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=n_max {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        amp.push(c);
    }
    Mat::from_fn(n_max + 1, n_max + 1, |r, k| amp[r] * amp[k].conj())
}

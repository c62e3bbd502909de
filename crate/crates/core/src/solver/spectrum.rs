//! Probe absorption spectra: closed form, exact linear response and
//! finite-probe steady states.

use std::fmt;
use std::str::FromStr;

use faer::sparse::linalg::solvers::SymbolicLu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Error, Result};
use crate::liouvillian::{
    build_liouvillian, lindblad, probe_operator, vectorize, HilbertSpec, DEFAULT_N_MAX,
};
use crate::model::{validate_params, Level, SystemParams};
use crate::sparse::{norm2, CsrMatrix, SparseLu};

use super::steady::{
    cavity_state, ground_is_attractor, ground_product, kernel_state, photon_distribution,
    probe_free_state, tail_mass, TAIL_TOLERANCE,
};

/// Relative change of the finite-probe spectrum under halving the probe
/// above which a linearity warning is attached.
pub const LINEARITY_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    LinearResponse,
    FiniteEpsilon,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::LinearResponse => "linear_response",
            Method::FiniteEpsilon => "finite_epsilon",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "analytic" => Ok(Method::Analytic),
            "linear_response" => Ok(Method::LinearResponse),
            "finite_epsilon" => Ok(Method::FiniteEpsilon),
            other => Err(format!(
                "unknown method '{other}' (expected analytic, linear_response or finite_epsilon)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub n_max: usize,
    /// Fail instead of warning when the photon tail is not converged.
    pub require_converged: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            n_max: DEFAULT_N_MAX,
            require_converged: true,
        }
    }
}

impl SpectrumOptions {
    pub fn with_n_max(n_max: usize) -> Self {
        SpectrumOptions {
            n_max,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumWarning {
    Linearity { relative_change: f64 },
    TruncationNotConverged { n_max: usize, tail_mass: f64 },
}

impl fmt::Display for SpectrumWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumWarning::Linearity { relative_change } => write!(
                f,
                "halving the probe changed chi by {relative_change:.3e} of its maximum"
            ),
            SpectrumWarning::TruncationNotConverged { n_max, tail_mass } => write!(
                f,
                "photon tail {tail_mass:.3e} at n_max = {n_max} exceeds {TAIL_TOLERANCE:e}"
            ),
        }
    }
}

/// `Im R_1`, `Im R_2` of the two-pole decomposition on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceColumns {
    pub im_r1: Vec<f64>,
    pub im_r2: Vec<f64>,
}

/// Spectrum in normalized units `chi / beta` (rates in the same unit as
/// the parameters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub grid: Vec<f64>,
    pub im_chi: Vec<f64>,
    pub re_chi: Vec<f64>,
    pub resonances: Option<ResonanceColumns>,
    pub method: Method,
    pub params: SystemParams,
    /// Truncation used by the numeric methods.
    pub n_max: Option<usize>,
    /// Per-point linear-system residual (zero for the closed form).
    pub residuals: Vec<f64>,
    pub warnings: Vec<SpectrumWarning>,
}

impl SpectrumSeries {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
                .collect()
        }
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty detuning grid".into()));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite detuning {x}")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("detuning grid must be strictly increasing".into()));
    }
    Ok(())
}

pub fn probe_spectrum(
    params: &SystemParams,
    grid: &[f64],
    method: Method,
    opts: &SpectrumOptions,
) -> Result<SpectrumSeries> {
    validate_grid(grid)?;
    let p = validate_params(params)?;
    match method {
        Method::Analytic => analytic_spectrum(&p, grid),
        Method::LinearResponse => linear_response_spectrum(&p, grid, opts),
        Method::FiniteEpsilon => finite_epsilon_spectrum(&p, grid, opts),
    }
}

fn analytic_spectrum(p: &SystemParams, grid: &[f64]) -> Result<SpectrumSeries> {
    if p.is_pumped() {
        return Err(Error::AnalyticInvalidHere);
    }
    let chi: Vec<Complex64> = grid
        .par_iter()
        .map(|&d| analytic::chi_vacuum(d, p).map(|c| c / p.beta))
        .collect::<Result<_>>()?;
    let resonances = if p.delta == 0.0 {
        analytic::decompose_resonances(p).ok().map(|(r1, r2)| ResonanceColumns {
            im_r1: grid.iter().map(|&d| r1.eval(d).im / p.beta).collect(),
            im_r2: grid.iter().map(|&d| r2.eval(d).im / p.beta).collect(),
        })
    } else {
        None
    };
    Ok(SpectrumSeries {
        grid: grid.to_vec(),
        im_chi: chi.iter().map(|c| c.im).collect(),
        re_chi: chi.iter().map(|c| c.re).collect(),
        resonances,
        method: Method::Analytic,
        params: *p,
        n_max: None,
        residuals: vec![0.0; grid.len()],
        warnings: Vec::new(),
    })
}

/// Probe-free steady state and the truncation verdict for it.
fn reference_state(
    p: &SystemParams,
    opts: &SpectrumOptions,
    warnings: &mut Vec<SpectrumWarning>,
) -> Result<Mat<Complex64>> {
    let spec = HilbertSpec::new(opts.n_max)?;
    let rho0 = if ground_is_attractor(p) {
        ground_product(&cavity_state(p, opts.n_max)?)
    } else {
        probe_free_state(p, opts.n_max)?.rho
    };
    let tail = tail_mass(&photon_distribution(&rho0, spec));
    if !(tail < TAIL_TOLERANCE) {
        if opts.require_converged {
            return Err(Error::TruncationNotConverged {
                n_max: opts.n_max,
                tail_mass: tail,
            });
        }
        warnings.push(SpectrumWarning::TruncationNotConverged {
            n_max: opts.n_max,
            tail_mass: tail,
        });
    }
    Ok(rho0)
}

/// Diagonal of the generator of the probe-detuning shift: `L(D) = L(0) + D K`.
fn detuning_generator(spec: HilbertSpec) -> Vec<Complex64> {
    let d = spec.dim();
    let shifted = |k: usize| matches!(spec.state(k).1, Level::E | Level::F);
    let ops_p = CsrMatrix::from_triplets(
        d,
        d,
        (0..d).filter(|&k| shifted(k)).map(|k| (k, k, Complex64::new(1.0, 0.0))),
    );
    let k = lindblad(&ops_p, &[]);
    (0..d * d).map(|i| k.get(i, i)).collect()
}

/// Indices in the union of the connected components of the pattern of `l`
/// that contain any of `seeds`.
fn invariant_closure(l: &CsrMatrix, seeds: &[usize]) -> Vec<usize> {
    let n = l.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (r, c, _) in l.iter() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut roots: Vec<usize> = seeds.iter().map(|&s| find(&mut parent, s)).collect();
    roots.sort_unstable();
    roots.dedup();
    (0..n)
        .filter(|&i| roots.binary_search(&find(&mut parent, i)).is_ok())
        .collect()
}

/// `A + D diag(k)` on a fixed pattern with one shared symbolic analysis.
struct ShiftedSystem {
    base: SparseColMat<usize, Complex64>,
    diag_pos: Vec<usize>,
    shift: Vec<Complex64>,
    symbolic: SymbolicLu<usize>,
}

impl ShiftedSystem {
    fn new(a: &CsrMatrix, shift: Vec<Complex64>) -> Result<Self> {
        let n = a.nrows();
        let zero = Complex64::new(0.0, 0.0);
        let triplets: Vec<_> = a
            .iter()
            .map(|(r, c, v)| Triplet::new(r, c, v))
            .chain((0..n).map(|i| Triplet::new(i, i, zero)))
            .collect();
        let base = SparseColMat::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::SolverFailure(format!("sparse assembly: {e:?}")))?;
        let col_ptr = base.symbolic().col_ptr().to_vec();
        let row_idx = base.symbolic().row_idx().to_vec();
        let diag_pos = (0..n)
            .map(|j| {
                (col_ptr[j]..col_ptr[j + 1])
                    .find(|&k| row_idx[k] == j)
                    .expect("diagonal present")
            })
            .collect();
        let symbolic = SparseLu::symbolic(&base)?;
        Ok(ShiftedSystem {
            base,
            diag_pos,
            shift,
            symbolic,
        })
    }

    fn at(&self, delta: f64) -> SparseColMat<usize, Complex64> {
        let mut m = self.base.clone();
        let val = m.val_mut();
        for (i, &k) in self.diag_pos.iter().enumerate() {
            val[k] += self.shift[i] * delta;
        }
        m
    }

    fn solve(&self, delta: f64, rhs: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        let m = self.at(delta);
        let x = SparseLu::factor_with(&self.symbolic, &m)?.solve(rhs)?;
        let ax = sparse_matvec(&m, &x);
        let r: Vec<Complex64> = ax.iter().zip(rhs).map(|(a, b)| a - b).collect();
        Ok((x, norm2(&r)))
    }
}

fn sparse_matvec(m: &SparseColMat<usize, Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    let col_ptr = m.symbolic().col_ptr();
    let row_idx = m.symbolic().row_idx();
    let val = m.val();
    let mut y = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for j in 0..m.ncols() {
        for k in col_ptr[j]..col_ptr[j + 1] {
            y[row_idx[k]] += val[k] * x[j];
        }
    }
    y
}

/// Vector indices of `<n,g|rho|n,e>`, whose sum is `rho_ge`.
fn readout_indices(spec: HilbertSpec) -> Vec<usize> {
    (0..spec.photon_states())
        .map(|n| spec.vec_index(spec.index(n, Level::G), spec.index(n, Level::E)))
        .collect()
}

fn linear_response_spectrum(
    p: &SystemParams,
    grid: &[f64],
    opts: &SpectrumOptions,
) -> Result<SpectrumSeries> {
    let spec = HilbertSpec::new(opts.n_max)?;
    let d = spec.dim();
    let mut warnings = Vec::new();
    let rho0 = reference_state(p, opts, &mut warnings)?;

    // L0 rho1 = i [V, rho0] for rho = rho0 + eps rho1
    let l0 = build_liouvillian(&(*p).with_epsilon(0.0), 0.0, spec, false)?.matrix;
    let v = probe_operator(spec).matrix.to_dense();
    let comm = &v * &rho0 - &rho0 * &v;
    let i = Complex64::new(0.0, 1.0);
    let source: Vec<Complex64> = vectorize(&comm).into_iter().map(|z| i * z).collect();

    let readout = readout_indices(spec);
    let block = invariant_closure(&l0, &readout);
    let mut local = vec![usize::MAX; d * d];
    for (k, &g) in block.iter().enumerate() {
        local[g] = k;
    }
    let sub = CsrMatrix::from_triplets(
        block.len(),
        block.len(),
        block.iter().flat_map(|&g| {
            let row = local[g];
            l0.row(g).map(move |(c, v)| (row, c, v))
        })
        .map(|(r, c, v)| (r, local[c], v)),
    );
    let k_diag = detuning_generator(spec);
    let system = ShiftedSystem::new(&sub, block.iter().map(|&g| k_diag[g]).collect())?;
    let rhs: Vec<Complex64> = block.iter().map(|&g| source[g]).collect();
    let read_local: Vec<usize> = readout.iter().map(|&g| local[g]).collect();

    let solved: Vec<(Complex64, f64)> = grid
        .par_iter()
        .map(|&delta| {
            let (x, res) = system.solve(delta, &rhs)?;
            Ok((read_local.iter().map(|&k| x[k]).sum(), res))
        })
        .collect::<Result<_>>()?;

    Ok(SpectrumSeries {
        grid: grid.to_vec(),
        im_chi: solved.iter().map(|s| s.0.im).collect(),
        re_chi: solved.iter().map(|s| s.0.re).collect(),
        resonances: None,
        method: Method::LinearResponse,
        params: *p,
        n_max: Some(opts.n_max),
        residuals: solved.iter().map(|s| s.1).collect(),
        warnings,
    })
}

/// `rho_ge / eps` from the full steady state at one detuning.
fn finite_epsilon_point(
    l_zero: &CsrMatrix,
    k_diag: &[Complex64],
    spec: HilbertSpec,
    delta: f64,
    epsilon: f64,
) -> Result<(Complex64, f64)> {
    let n = l_zero.nrows();
    let l = l_zero.add(&CsrMatrix::from_triplets(
        n,
        n,
        (0..n).map(|i| (i, i, k_diag[i] * delta)),
    ));
    let (rho, residual) = kernel_state(&l, spec.dim())?;
    let rho_ge: Complex64 = (0..spec.photon_states())
        .map(|m| rho[(spec.index(m, Level::G), spec.index(m, Level::E))])
        .sum();
    Ok((rho_ge / epsilon, residual))
}

fn finite_epsilon_spectrum(
    p: &SystemParams,
    grid: &[f64],
    opts: &SpectrumOptions,
) -> Result<SpectrumSeries> {
    let spec = HilbertSpec::new(opts.n_max)?;
    let mut warnings = Vec::new();
    reference_state(p, opts, &mut warnings)?;
    let k_diag = detuning_generator(spec);
    let full = |eps: f64| -> Result<CsrMatrix> {
        Ok(build_liouvillian(&(*p).with_epsilon(eps), 0.0, spec, true)?.matrix)
    };
    let l_zero = full(p.epsilon)?;
    let solved: Vec<(Complex64, f64)> = grid
        .par_iter()
        .map(|&delta| finite_epsilon_point(&l_zero, &k_diag, spec, delta, p.epsilon))
        .collect::<Result<_>>()?;

    let scale = solved.iter().fold(0.0f64, |m, s| m.max(s.0.norm()));
    let (k_peak, _) = solved
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (k, s)| if s.0.im > best.1 { (k, s.0.im) } else { best });
    let half = 0.5 * p.epsilon;
    let (chi_half, _) = finite_epsilon_point(&full(half)?, &k_diag, spec, grid[k_peak], half)?;
    let change = (chi_half - solved[k_peak].0).norm() / scale.max(f64::MIN_POSITIVE);
    if change > LINEARITY_TOLERANCE {
        warnings.push(SpectrumWarning::Linearity {
            relative_change: change,
        });
    }

    Ok(SpectrumSeries {
        grid: grid.to_vec(),
        im_chi: solved.iter().map(|s| s.0.im).collect(),
        re_chi: solved.iter().map(|s| s.0.re).collect(),
        resonances: None,
        method: Method::FiniteEpsilon,
        params: *p,
        n_max: Some(opts.n_max),
        residuals: solved.iter().map(|s| s.1).collect(),
        warnings,
    })
}

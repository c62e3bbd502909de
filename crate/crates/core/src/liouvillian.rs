//! Operators on the truncated joint space and the vectorized Liouvillian.
//!
//! Basis: photon-major, atom-minor. The joint index of `|n, i>` is
//! `3 n + i` with atomic order `(g, f, e)`. Density matrices are
//! column-stacked, so `rho[(r, c)]` lives at `c * D + r`.
//!
//! The Hamiltonian is written in the frame generated by
//! `w_d a^dag a + w_p |e><e| + (w_p - w_d) |f><f|`, which makes the probe
//! and the pump static at the same time:
//!
//! ```text
//! H = (w_c - w_d) a^dag a + D_e |e><e| + D_f |f><f|
//!     + eta (|e><f| a + h.c.) + eps (|e><g| + h.c.) + Omega (a^dag + a)
//! D_e = D - delta/2,   D_f = D + delta/2 - (w_c - w_d)
//! ```
//!
//! with `D` the probe detuning from the mean of the zero-photon doublet.
//! Collapse operators only pick up global phases in this frame, so the
//! dissipators are unchanged.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Level, SystemParams};
use crate::sparse::CsrMatrix;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Default Fock truncation.
pub const DEFAULT_N_MAX: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    n_max: usize,
}

impl HilbertSpec {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidTruncation(n_max));
        }
        Ok(HilbertSpec { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn photon_states(&self) -> usize {
        self.n_max + 1
    }

    /// Joint dimension `3 (n_max + 1)`.
    pub fn dim(&self) -> usize {
        3 * self.photon_states()
    }

    pub fn index(&self, n: usize, level: Level) -> usize {
        debug_assert!(n <= self.n_max);
        3 * n + level.index()
    }

    /// `(n, level)` of a joint index.
    pub fn state(&self, index: usize) -> (usize, Level) {
        (index / 3, Level::ALL[index % 3])
    }

    /// Position of `rho[(row, col)]` in the column-stacked vector.
    pub fn vec_index(&self, row: usize, col: usize) -> usize {
        col * self.dim() + row
    }
}

impl Default for HilbertSpec {
    fn default() -> Self {
        HilbertSpec {
            n_max: DEFAULT_N_MAX,
        }
    }
}

/// A sparse operator tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub matrix: CsrMatrix,
    pub spec: HilbertSpec,
}

/// Ladder and projector operators on the joint space.
#[derive(Debug, Clone)]
pub struct Operators {
    pub spec: HilbertSpec,
    pub a: CsrMatrix,
    pub a_dag: CsrMatrix,
    pub n_op: CsrMatrix,
    sigma: Vec<CsrMatrix>,
}

impl Operators {
    /// `sigma_ij = |i><j|` on the atom, identity on the cavity.
    pub fn sigma(&self, i: Level, j: Level) -> &CsrMatrix {
        &self.sigma[3 * i.index() + j.index()]
    }
}

pub fn build_operators(spec: HilbertSpec) -> Operators {
    let np = spec.photon_states();
    let a_cav = cavity_annihilation(spec.n_max());
    let id_atom = CsrMatrix::identity(3);
    let id_cav = CsrMatrix::identity(np);
    let a = a_cav.kron(&id_atom);
    let a_dag = a.adjoint();
    let n_op = a_dag.matmul(&a);
    let sigma = (0..9)
        .map(|k| {
            let proj = CsrMatrix::from_triplets(3, 3, [(k / 3, k % 3, c(1.0))]);
            id_cav.kron(&proj)
        })
        .collect();
    Operators {
        spec,
        a,
        a_dag,
        n_op,
        sigma,
    }
}

/// Static level shifts of the rotating frame at probe detuning `delta_probe`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameDetunings {
    /// `w_c - w_d`
    pub cavity: f64,
    /// `D_e = D - delta/2`
    pub excited: f64,
    /// `D_f = D_e + delta - (w_c - w_d)`
    pub first: f64,
}

pub fn frame_detunings(params: &SystemParams, delta_probe: f64) -> FrameDetunings {
    let cavity = params.pump_detuning();
    let excited = delta_probe - params.delta / 2.0;
    FrameDetunings {
        cavity,
        excited,
        first: excited + params.delta - cavity,
    }
}

fn rotating_hamiltonian(
    ops: &Operators,
    params: &SystemParams,
    delta_probe: f64,
    probe: f64,
) -> OperatorMatrix {
    let f = frame_detunings(params, delta_probe);
    let (e, fl, g) = (Level::E, Level::F, Level::G);
    let mut h = ops
        .n_op
        .scale(c(f.cavity))
        .add(&ops.sigma(e, e).scale(c(f.excited)))
        .add(&ops.sigma(fl, fl).scale(c(f.first)));
    if params.eta != 0.0 {
        let coupling = ops.sigma(e, fl).matmul(&ops.a);
        h = h.add(&coupling.add(&coupling.adjoint()).scale(c(params.eta)));
    }
    if probe != 0.0 {
        h = h.add(&ops.sigma(e, g).add(ops.sigma(g, e)).scale(c(probe)));
    }
    let drive = params.drive_amplitude();
    if drive != 0.0 {
        h = h.add(&ops.a.add(&ops.a_dag).scale(c(drive)));
    }
    debug_assert!(h.hermiticity_defect() <= 1e-12);
    OperatorMatrix {
        matrix: h,
        spec: ops.spec,
    }
}

/// Full rotating-frame Hamiltonian (per hbar), probe term `params.epsilon` included.
pub fn build_hamiltonian_rotating(
    params: &SystemParams,
    delta_probe: f64,
    spec: HilbertSpec,
) -> OperatorMatrix {
    let ops = build_operators(spec);
    rotating_hamiltonian(&ops, params, delta_probe, params.epsilon)
}

/// Rotating-frame Hamiltonian with the probe switched off.
pub fn build_probe_free_hamiltonian(
    params: &SystemParams,
    delta_probe: f64,
    spec: HilbertSpec,
) -> OperatorMatrix {
    let ops = build_operators(spec);
    rotating_hamiltonian(&ops, params, delta_probe, 0.0)
}

/// The probe coupling `|e><g| + |g><e|` per unit probe strength.
pub fn probe_operator(spec: HilbertSpec) -> OperatorMatrix {
    let ops = build_operators(spec);
    OperatorMatrix {
        matrix: ops.sigma(Level::E, Level::G).add(ops.sigma(Level::G, Level::E)),
        spec,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOperator {
    pub label: String,
    /// Jump operator with the square-root rate folded in.
    pub matrix: CsrMatrix,
}

/// Jump operators for the standard dissipator `c rho c^dag - {c^dag c, rho}/2`.
///
/// The cavity term `kappa (2 a rho a^dag - ...)` maps to `sqrt(2 kappa) a`,
/// so the field amplitude decays at `kappa`. Atomic channels map to
/// `sqrt(gamma_ij) |j><i|`. Zero-rate channels are omitted.
pub fn collapse_set(params: &SystemParams, spec: HilbertSpec) -> Vec<CollapseOperator> {
    let ops = build_operators(spec);
    let n_th = params.n_th();
    let mut out = Vec::new();
    let emission = 2.0 * params.kappa * (n_th + 1.0);
    if emission > 0.0 {
        out.push(CollapseOperator {
            label: "cavity_emission".into(),
            matrix: ops.a.scale(c(emission.sqrt())),
        });
    }
    let absorption = 2.0 * params.kappa * n_th;
    if absorption > 0.0 {
        out.push(CollapseOperator {
            label: "cavity_absorption".into(),
            matrix: ops.a_dag.scale(c(absorption.sqrt())),
        });
    }
    for (upper, lower, rate) in params.gamma.channels() {
        if rate > 0.0 {
            out.push(CollapseOperator {
                label: format!("gamma_{}{}", upper.label(), lower.label()),
                matrix: ops.sigma(lower, upper).scale(c(rate.sqrt())),
            });
        }
    }
    out
}

/// Generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct SuperOperator {
    pub matrix: CsrMatrix,
    pub spec: HilbertSpec,
    pub probe_detuning: f64,
    pub pump_detuning: f64,
}

impl SuperOperator {
    pub fn apply(&self, rho: &Mat<Complex64>) -> Mat<Complex64> {
        let d = self.spec.dim();
        devectorize(&self.matrix.matvec(&vectorize(rho)), d)
    }
}

/// Column-stacked generator of `-i[H, rho] + sum_c D[c] rho` for any square `H`.
pub fn lindblad(h: &CsrMatrix, collapses: &[CsrMatrix]) -> CsrMatrix {
    let d = h.nrows();
    let id = CsrMatrix::identity(d);
    let minus_i = Complex64::new(0.0, -1.0);
    // vec(A X B) = (B^T (x) A) vec(X)
    let mut l = id.kron(h).sub(&h.transpose().kron(&id)).scale(minus_i);
    for cm in collapses {
        let cdc = cm.adjoint().matmul(cm);
        let jump = cm.conj().kron(cm);
        let anti = id.kron(&cdc).add(&cdc.transpose().kron(&id));
        l = l.add(&jump).sub(&anti.scale(c(0.5)));
    }
    l
}

/// Annihilation operator on `n_max + 1` Fock states.
pub fn cavity_annihilation(n_max: usize) -> CsrMatrix {
    let np = n_max + 1;
    CsrMatrix::from_triplets(np, np, (1..np).map(|n| (n - 1, n, c((n as f64).sqrt()))))
}

/// Generator of the bare cavity (no atom) under the pump and its bath.
pub fn cavity_liouvillian(params: &SystemParams, n_max: usize) -> CsrMatrix {
    let a = cavity_annihilation(n_max);
    let a_dag = a.adjoint();
    let mut h = a_dag.matmul(&a).scale(c(params.pump_detuning()));
    let drive = params.drive_amplitude();
    if drive != 0.0 {
        h = h.add(&a.add(&a_dag).scale(c(drive)));
    }
    let n_th = params.n_th();
    let mut jumps = Vec::new();
    if params.kappa * (n_th + 1.0) > 0.0 {
        jumps.push(a.scale(c((2.0 * params.kappa * (n_th + 1.0)).sqrt())));
    }
    if params.kappa * n_th > 0.0 {
        jumps.push(a_dag.scale(c((2.0 * params.kappa * n_th).sqrt())));
    }
    lindblad(&h, &jumps)
}

/// `d vec(rho)/dt = L vec(rho)` for `-i[H, rho] + sum_c D[c] rho`.
pub fn assemble_liouvillian(
    h: &OperatorMatrix,
    collapses: &[CollapseOperator],
    probe_detuning: f64,
    pump_detuning: f64,
) -> Result<SuperOperator> {
    let d = h.spec.dim();
    for m in std::iter::once(&h.matrix).chain(collapses.iter().map(|c| &c.matrix)) {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows().max(m.ncols()),
            });
        }
    }
    let jumps: Vec<CsrMatrix> = collapses.iter().map(|c| c.matrix.clone()).collect();
    let l = lindblad(&h.matrix, &jumps);
    Ok(SuperOperator {
        matrix: l,
        spec: h.spec,
        probe_detuning,
        pump_detuning,
    })
}

/// Liouvillian of the full problem at probe detuning `delta_probe`.
pub fn build_liouvillian(
    params: &SystemParams,
    delta_probe: f64,
    spec: HilbertSpec,
    with_probe: bool,
) -> Result<SuperOperator> {
    let ops = build_operators(spec);
    let probe = if with_probe { params.epsilon } else { 0.0 };
    let h = rotating_hamiltonian(&ops, params, delta_probe, probe);
    assemble_liouvillian(
        &h,
        &collapse_set(params, spec),
        delta_probe,
        params.pump_detuning(),
    )
}

pub fn vectorize(rho: &Mat<Complex64>) -> Vec<Complex64> {
    let d = rho.nrows();
    let mut v = Vec::with_capacity(d * rho.ncols());
    for col in 0..rho.ncols() {
        for row in 0..d {
            v.push(rho[(row, col)]);
        }
    }
    v
}

pub fn devectorize(v: &[Complex64], d: usize) -> Mat<Complex64> {
    assert_eq!(v.len(), d * d);
    Mat::from_fn(d, d, |row, col| v[col * d + row])
}

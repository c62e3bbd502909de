//! Figure bundles for `reproduce`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lambda_cavity::analytic::{classify_regime, poles};
use lambda_cavity::solver::{find_peaks, linspace, minimal_truncation, Method, SpectrumSeries};
use lambda_cavity::{Pump, SystemParams};
use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, to_value, write_bytes, write_json, write_meta, Column, Format, Table};
use crate::run::{outer_peak, population_sweep, spectrum, spectrum_meta, spectrum_table, symmetric_grid, DEFAULT_POINTS};

pub const FIGURES: [&str; 13] = ["3a", "3b", "4ab", "4cd", "5a", "5b", "5c", "5d", "6", "7a", "7b", "8a", "8b"];

/// Cavity frequency assumed for the temperature figures, `omega_c / 2 pi` in GHz.
pub const CAVITY_GHZ: f64 = 5.0;
/// Peaks smaller than this fraction of the maximum prominence are dropped
/// from the peak listings.
pub const LISTING_PROMINENCE: f64 = 1e-5;
const MAX_TRUNCATION: usize = 60;

pub struct Bundle {
    dir: PathBuf,
    format: Format,
    n_max: Option<usize>,
    notes: String,
}

impl Bundle {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.{}", self.format.extension()))
    }

    fn table(&self, name: &str, t: &Table, meta: Map<String, Value>) -> CliResult<()> {
        let path = self.path(name);
        emit(t, self.format, Some(&path))?;
        write_meta(&path, meta)
    }

    fn spectrum(&self, name: &str, s: &SpectrumSeries) -> CliResult<()> {
        self.table(name, &spectrum_table(s), spectrum_meta(s))
    }

    fn peaks(&self, name: &str, s: &SpectrumSeries) -> CliResult<()> {
        let top = s.im_chi.iter().cloned().fold(0.0f64, f64::max);
        let set = find_peaks(s, Some(LISTING_PROMINENCE * top));
        let t = Table::new()
            .with("delta", Column::Float(set.peaks.iter().map(|p| p.delta).collect()))
            .with("height", Column::Float(set.peaks.iter().map(|p| p.height).collect()))
            .with("prominence", Column::Float(set.peaks.iter().map(|p| p.prominence).collect()));
        let mut m = Map::new();
        m.insert("min_prominence".into(), Value::from(set.min_prominence));
        m.insert("warnings".into(), to_value(&set.warnings));
        self.table(name, &t, m)
    }

    /// Shared truncation for a family of parameter sets.
    fn truncation(&mut self, family: &[SystemParams]) -> CliResult<usize> {
        if let Some(n) = self.n_max {
            let _ = writeln!(self.notes, "- Truncation n_max = {n} (given on the command line).");
            return Ok(n);
        }
        let mut n = 1;
        for p in family {
            n = n.max(minimal_truncation(p, 1, MAX_TRUNCATION)?.n_max);
        }
        let _ = writeln!(
            self.notes,
            "- Truncation n_max = {n}: the smallest value whose photon-number tail is below 1e-8 for every curve."
        );
        Ok(n)
    }

    fn note(&mut self, line: &str) {
        self.notes.push_str("- ");
        self.notes.push_str(line);
        self.notes.push('\n');
    }
}

fn base(gamma_e: f64, kappa: f64, eta: f64) -> SystemParams {
    SystemParams::from_effective(gamma_e, 1.0, kappa, eta, 0.0)
}

fn thermal(p: SystemParams, temperature_mk: f64) -> CliResult<SystemParams> {
    let cfg = RunConfig {
        gamma_e: Some(p.gamma_e()),
        gamma_f: Some(p.gamma_f()),
        eta: Some(p.eta),
        kappa: Some(p.kappa),
        temperature_mk: Some(temperature_mk),
        omega_c_ghz: Some(CAVITY_GHZ),
        ..RunConfig::default()
    };
    cfg.params()
}

fn coherent(p: SystemParams, omega: f64) -> SystemParams {
    p.with_pump(Pump::Coherent { omega, detuning: 0.0 })
}

fn tag(x: f64) -> String {
    format!("{x}")
}

fn family_grid(family: &[SystemParams], n_max: usize) -> CliResult<Vec<f64>> {
    let mut outer = 0.0f64;
    for p in family {
        outer = outer.max(outer_peak(p, n_max)?);
    }
    Ok(symmetric_grid(outer, DEFAULT_POINTS))
}

fn pole_table(label: &str, xs: &[f64], make: impl Fn(f64) -> SystemParams) -> CliResult<Table> {
    let mut cols: [Vec<f64>; 4] = Default::default();
    for &x in xs {
        let pp = poles(&make(x))?;
        cols[0].push(pp.delta_1.re);
        cols[1].push(pp.delta_1.im);
        cols[2].push(pp.delta_2.re);
        cols[3].push(pp.delta_2.im);
    }
    let [a, b, c, d] = cols;
    Ok(Table::new()
        .with(label, Column::Float(xs.to_vec()))
        .with("re_delta1", Column::Float(a))
        .with("im_delta1", Column::Float(b))
        .with("re_delta2", Column::Float(c))
        .with("im_delta2", Column::Float(d)))
}

fn pole_meta(fixed: SystemParams, swept: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("params".into(), to_value(&fixed));
    m.insert("swept".into(), Value::from(swept));
    m
}

fn fig3a(b: &mut Bundle) -> CliResult<()> {
    b.note("gamma_e = 5, kappa = 0.2, delta = 0; closed-form spectra for eta = 0, 2, 10 with the two-pole decomposition.");
    let family: Vec<_> = [0.0, 2.0, 10.0].iter().map(|&eta| base(5.0, 0.2, eta)).collect();
    let grid = family_grid(&family, 1)?;
    for p in &family {
        let s = spectrum(p, &grid, Method::Analytic, 1)?;
        b.spectrum(&format!("spectrum_eta_{}", tag(p.eta)), &s)?;
    }
    Ok(())
}

fn fig3b(b: &mut Bundle) -> CliResult<()> {
    b.note("gamma_e = 5, kappa = 0.2, eta = 10 (the coupling is not stated for this panel).");
    b.note("Cavity detuning delta in [-20, 20], 41 values; linear response, since the closed form holds only at delta = 0.");
    b.note("Long format: one row per (delta, delta_c).");
    let deltas = linspace(-20.0, 20.0, 41);
    let family: Vec<_> = deltas
        .iter()
        .map(|&d| SystemParams::from_effective(5.0, 1.0, 0.2, 10.0, d))
        .collect();
    let n_max = b.truncation(&family)?;
    let grid = family_grid(&family, n_max)?;
    let (mut x, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    let mut runs = Vec::new();
    for p in &family {
        let s = spectrum(p, &grid, Method::LinearResponse, n_max)?;
        x.extend_from_slice(&s.grid);
        y.extend(std::iter::repeat_n(p.delta, s.len()));
        z.extend_from_slice(&s.im_chi);
        runs.push(Value::Object(spectrum_meta(&s)));
    }
    let t = Table::new()
        .with("delta", Column::Float(x))
        .with("delta_c", Column::Float(y))
        .with("im_chi", Column::Float(z));
    let mut m = Map::new();
    m.insert("runs".into(), Value::Array(runs));
    b.table("map", &t, m)
}

fn fig4ab(b: &mut Bundle) -> CliResult<()> {
    b.note("gamma_e = 5, delta = 0; poles of the vacuum susceptibility versus kappa in [0, 8].");
    b.note("The caption quotes eta = 4 gamma_f, but the plotted transitions at kappa = 2 and kappa = 6 require eta = gamma_f (eta_T = |1 + kappa - 5| = 2 eta). poles_vs_kappa uses eta = 1; poles_vs_kappa_eta4 uses the caption value for comparison and shows no transition in this range.");
    let kappas = linspace(0.0, 8.0, 801);
    for (name, eta) in [("poles_vs_kappa", 1.0), ("poles_vs_kappa_eta4", 4.0)] {
        let t = pole_table("kappa", &kappas, |k| base(5.0, k, eta))?;
        b.table(name, &t, pole_meta(base(5.0, 0.0, eta), "kappa"))?;
    }
    Ok(())
}

fn fig4cd(b: &mut Bundle) -> CliResult<()> {
    b.note("gamma_e = 5, kappa = 1, delta = 0; poles versus eta in [0, 4]. The poles leave the imaginary axis at eta = eta_T / 2 = 1.5.");
    let etas = linspace(0.0, 4.0, 801);
    let t = pole_table("eta", &etas, |e| base(5.0, 1.0, e))?;
    b.table("poles_vs_eta", &t, pole_meta(base(5.0, 1.0, 0.0), "eta"))
}

fn fig5(b: &mut Bundle, kappa: f64, eta: f64) -> CliResult<()> {
    b.note(&format!(
        "gamma_e = 10, kappa = {kappa}, eta = {eta}, delta = 0; closed-form spectrum with resonance components, plus the regime report."
    ));
    let p = base(10.0, kappa, eta);
    let grid = family_grid(&[p], 1)?;
    let s = spectrum(&p, &grid, Method::Analytic, 1)?;
    b.spectrum("spectrum", &s)?;
    write_json(&b.dir.join("classify.json"), &to_value(&classify_regime(&p)?))
}

fn fig6(b: &mut Bundle) -> CliResult<()> {
    b.note(&format!(
        "gamma_e = 5, kappa = 0.2, eta = 2, no probe; populations P_0..P_3 (atom in g) versus temperature in [0, 100] mK, omega_c / 2 pi = {CAVITY_GHZ} GHz (assumed; the figure does not state it)."
    ));
    b.note("temperature_n_th lists the thermal occupation used at each temperature.");
    let temps = linspace(0.0, 100.0, 51);
    let family = temps
        .iter()
        .map(|&t| thermal(base(5.0, 0.2, 2.0), t))
        .collect::<CliResult<Vec<_>>>()?;
    let n_max = b.truncation(&family)?;
    let (t, _) = population_sweep("temperature_mK", &temps, &family, n_max)?;
    let mut m = Map::new();
    m.insert("params".into(), to_value(&family));
    m.insert("n_max".into(), Value::from(n_max));
    b.table("populations_vs_temperature", &t, m)?;
    let nth = Table::new()
        .with("temperature_mK", Column::Float(temps.clone()))
        .with("n_th", Column::Float(family.iter().map(|p| p.n_th()).collect()));
    let mut m = Map::new();
    m.insert("omega_c_GHz".into(), Value::from(CAVITY_GHZ));
    b.table("temperature_n_th", &nth, m)
}

fn fig7(b: &mut Bundle, eta: f64) -> CliResult<()> {
    b.note(&format!(
        "gamma_e = 5, kappa = 1, eta = {eta}, delta = 0; linear-response spectra at T = 0, 10, 80 mK with omega_c / 2 pi = {CAVITY_GHZ} GHz (assumed)."
    ));
    let temps = [0.0, 10.0, 80.0];
    let family = temps
        .iter()
        .map(|&t| thermal(base(5.0, 1.0, eta), t))
        .collect::<CliResult<Vec<_>>>()?;
    let n_max = b.truncation(&family)?;
    let grid = family_grid(&family, n_max)?;
    b.note("Grid: 2001 points over +-2.5 times the outermost expected peak.");
    for (t, p) in temps.iter().zip(&family) {
        let s = spectrum(p, &grid, Method::LinearResponse, n_max)?;
        b.spectrum(&format!("spectrum_T_{}mK", tag(*t)), &s)?;
        b.peaks(&format!("peaks_T_{}mK", tag(*t)), &s)?;
    }
    Ok(())
}

fn fig8a(b: &mut Bundle) -> CliResult<()> {
    b.note("gamma_e = 5, kappa = 1, eta = 80, resonant coherent drive; populations P_0..P_3 (atom in g) versus Omega in [0, 0.8].");
    b.note("The published panel shows P_0 below P_1, P_2, P_3 at Omega = 0.8. The exact probe-free state is a coherent state of mean (Omega / kappa)^2 = 0.64, for which P_0 > P_1 > P_2 > P_3; the data here follow the exact state and are not tuned to the published ordering. A finite probe, another pump convention or a detuned drive (pump_detuning) could account for the difference.");
    let omegas = linspace(0.0, 0.8, 41);
    let family: Vec<_> = omegas.iter().map(|&o| coherent(base(5.0, 1.0, 80.0), o)).collect();
    let n_max = b.truncation(&family)?;
    let (t, _) = population_sweep("Omega", &omegas, &family, n_max)?;
    let mut m = Map::new();
    m.insert("params".into(), to_value(&family));
    m.insert("n_max".into(), Value::from(n_max));
    b.table("populations_vs_omega", &t, m)
}

fn fig8b(b: &mut Bundle) -> CliResult<()> {
    b.note("gamma_e = 5, kappa = 1, eta = 80, resonant coherent drive; linear-response spectra for Omega = 0, 0.4, 0.8.");
    b.note("Peak listings keep every local maximum with prominence above 1e-5 of the maximum; the sqrt(3) eta peaks sit on dispersive tails and have prominence well below 2% of the maximum.");
    let omegas = [0.0, 0.4, 0.8];
    let family: Vec<_> = omegas.iter().map(|&o| coherent(base(5.0, 1.0, 80.0), o)).collect();
    let n_max = b.truncation(&family)?;
    let grid = family_grid(&family, n_max)?;
    for (o, p) in omegas.iter().zip(&family) {
        let s = spectrum(p, &grid, Method::LinearResponse, n_max)?;
        b.spectrum(&format!("spectrum_Omega_{}", tag(*o)), &s)?;
        b.peaks(&format!("peaks_Omega_{}", tag(*o)), &s)?;
    }
    Ok(())
}

pub fn default_dir(fig: &str) -> PathBuf {
    PathBuf::from(format!("fig{fig}"))
}

/// Writes the bundle for `fig` into `dir` and returns the files' directory.
pub fn reproduce(fig: &str, dir: Option<&Path>, format: Format, n_max: Option<usize>) -> CliResult<PathBuf> {
    let fig = fig.trim().trim_start_matches("fig").to_ascii_lowercase();
    if !FIGURES.contains(&fig.as_str()) {
        return Err(CliError::Config(format!(
            "unknown figure '{fig}'; expected one of {}",
            FIGURES.join(", ")
        )));
    }
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(|| default_dir(&fig));
    std::fs::create_dir_all(&dir)?;
    let mut b = Bundle {
        dir: dir.clone(),
        format,
        n_max,
        notes: format!("# Figure {fig}\n\nRates in units of gamma_f; spectra are chi / beta.\n\n"),
    };
    match fig.as_str() {
        "3a" => fig3a(&mut b)?,
        "3b" => fig3b(&mut b)?,
        "4ab" => fig4ab(&mut b)?,
        "4cd" => fig4cd(&mut b)?,
        "5a" => fig5(&mut b, 0.0, 3.9)?,
        "5b" => fig5(&mut b, 1.0, 3.9)?,
        "5c" => fig5(&mut b, 1.0, 4.1)?,
        "5d" => fig5(&mut b, 1.0, 10.0)?,
        "6" => fig6(&mut b)?,
        "7a" => fig7(&mut b, 4.0)?,
        "7b" => fig7(&mut b, 80.0)?,
        "8a" => fig8a(&mut b)?,
        "8b" => fig8b(&mut b)?,
        _ => unreachable!(),
    }
    write_bytes(&dir.join("NOTES.md"), b.notes.as_bytes())?;
    Ok(dir)
}

//! Subcommand implementations shared by the CLI and the figure presets.

use std::path::Path;

use lambda_cavity::analytic::{classify_regime, RegimeReport};
use lambda_cavity::dressed::half_splitting;
use lambda_cavity::solver::{
    cavity_state, linspace, populations, probe_free_state, probe_spectrum, Method, SpectrumOptions,
    SpectrumSeries,
};
use lambda_cavity::{Level, SystemParams};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, sibling, to_value, write_meta, Column, Format, Table};

pub const DEFAULT_N_MAX: usize = 60;
pub const DEFAULT_POINTS: usize = 2001;
/// Grid half-width in units of the outermost expected peak.
pub const SPAN_FACTOR: f64 = 2.5;
/// Photon numbers with at least this cavity population count as visible.
pub const VISIBLE_POPULATION: f64 = 1e-3;

/// Closed form for the resonant vacuum case, linear response otherwise.
pub fn default_method(p: &SystemParams) -> Method {
    if !p.is_pumped() && p.delta == 0.0 {
        Method::Analytic
    } else {
        Method::LinearResponse
    }
}

/// Largest photon number whose probe-free cavity population is visible.
pub fn top_photon_number(p: &SystemParams, n_max: usize) -> CliResult<usize> {
    if !p.is_pumped() {
        return Ok(0);
    }
    let rho = cavity_state(p, n_max)?;
    Ok((0..=n_max).filter(|&n| rho[(n, n)].re >= VISIBLE_POPULATION).max().unwrap_or(0))
}

/// Position of the outermost expected absorption peak, never below `gamma_e`.
pub fn outer_peak(p: &SystemParams, n_max: usize) -> CliResult<f64> {
    let n = top_photon_number(p, n_max)?;
    Ok(half_splitting(n, p.eta, p.delta).max(p.gamma_e()))
}

pub fn symmetric_grid(outer: f64, points: usize) -> Vec<f64> {
    let w = SPAN_FACTOR * outer;
    linspace(-w, w, points)
}

pub fn spectrum_table(s: &SpectrumSeries) -> Table {
    let mut t = Table::new()
        .with("delta", Column::Float(s.grid.clone()))
        .with("im_chi", Column::Float(s.im_chi.clone()))
        .with("re_chi", Column::Float(s.re_chi.clone()));
    if let Some(r) = &s.resonances {
        t = t
            .with("im_R1", Column::Float(r.im_r1.clone()))
            .with("im_R2", Column::Float(r.im_r2.clone()));
    }
    t
}

pub fn spectrum_meta(s: &SpectrumSeries) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("params".into(), to_value(&s.params));
    m.insert("method".into(), Value::from(s.method.name()));
    m.insert("n_max".into(), to_value(&s.n_max));
    m.insert("points".into(), Value::from(s.len()));
    m.insert("max_residual".into(), to_value(&s.max_residual()));
    m.insert("residuals".into(), to_value(&s.residuals));
    m.insert("warnings".into(), to_value(&s.warnings));
    m
}

pub fn report_warnings(s: &SpectrumSeries) {
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
}

pub fn spectrum(p: &SystemParams, grid: &[f64], method: Method, n_max: usize) -> CliResult<SpectrumSeries> {
    let opts = SpectrumOptions {
        n_max,
        require_converged: false,
    };
    let s = probe_spectrum(p, grid, method, &opts)?;
    report_warnings(&s);
    Ok(s)
}

pub fn classify(cfg: &RunConfig) -> CliResult<RegimeReport> {
    Ok(classify_regime(&cfg.params()?)?)
}

/// Run settings resolved from flags and the config file.
#[derive(Debug, Clone)]
pub struct Settings {
    pub n_max: usize,
    pub format: Format,
    pub method: Option<Method>,
}

fn grid_for(cfg: &RunConfig, p: &SystemParams, n_max: usize) -> CliResult<Vec<f64>> {
    let points = cfg.delta_points.unwrap_or(DEFAULT_POINTS);
    let (lo, hi) = match (cfg.delta_min, cfg.delta_max) {
        (Some(lo), Some(hi)) => (lo, hi),
        (lo, hi) => {
            let w = SPAN_FACTOR * outer_peak(p, n_max)?;
            (lo.unwrap_or(-w), hi.unwrap_or(w))
        }
    };
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return Err(CliError::Config(format!("empty grid: delta_min = {lo}, delta_max = {hi}")));
    }
    Ok(linspace(lo, hi, points))
}

pub fn run_spectrum(cfg: &RunConfig, set: &Settings, output: Option<&Path>) -> CliResult<()> {
    let (Some(key), Some(values)) = (&cfg.sweep_key, &cfg.sweep_values) else {
        let p = cfg.params()?;
        let method = set.method.unwrap_or_else(|| default_method(&p));
        let grid = grid_for(cfg, &p, set.n_max)?;
        let s = spectrum(&p, &grid, method, set.n_max)?;
        emit(&spectrum_table(&s), set.format, output)?;
        if let Some(path) = output {
            write_meta(path, spectrum_meta(&s))?;
        }
        return Ok(());
    };

    let mut runs = Vec::with_capacity(values.len());
    for &v in values {
        let c = cfg.with_value(key, v)?;
        let p = c.params()?;
        let method = set.method.unwrap_or_else(|| default_method(&p));
        let grid = grid_for(&c, &p, set.n_max)?;
        runs.push((v, spectrum(&p, &grid, method, set.n_max)?));
    }
    let column = if key == "delta" { "delta_c" } else { key.as_str() };
    let mut delta = Vec::new();
    let mut swept = Vec::new();
    let mut im = Vec::new();
    for (v, s) in &runs {
        delta.extend_from_slice(&s.grid);
        swept.extend(std::iter::repeat_n(*v, s.len()));
        im.extend_from_slice(&s.im_chi);
    }
    let t = Table::new()
        .with("delta", Column::Float(delta))
        .with(column, Column::Float(swept))
        .with("im_chi", Column::Float(im));
    emit(&t, set.format, output)?;
    if let Some(path) = output {
        let mut m = Map::new();
        m.insert("sweep_key".into(), Value::from(key.as_str()));
        m.insert("sweep_values".into(), to_value(values));
        m.insert(
            "runs".into(),
            Value::Array(runs.iter().map(|(_, s)| Value::Object(spectrum_meta(s))).collect()),
        );
        write_meta(path, m)?;
    }
    Ok(())
}

/// Photon-number populations `P_n` (atom in `g`) of the probe-free state.
pub struct PopulationResult {
    pub ground: Vec<f64>,
    pub joint: Vec<(usize, Level, f64)>,
    pub residual: f64,
    pub converged: bool,
    pub tail_mass: f64,
}

pub fn probe_free_populations(p: &SystemParams, n_max: usize) -> CliResult<PopulationResult> {
    let ss = probe_free_state(p, n_max)?;
    if !ss.converged {
        eprintln!("warning: photon tail {:.3e} not converged at n_max = {n_max}", ss.tail_mass);
    }
    let pops = populations(&ss);
    Ok(PopulationResult {
        ground: pops.ground.clone(),
        joint: pops.joint.iter().map(|(&(n, l), &v)| (n, l, v)).collect(),
        residual: ss.residual,
        converged: ss.converged,
        tail_mass: ss.tail_mass,
    })
}

/// `sweep_value, P_0 .. P_3` rows, computed in parallel.
pub fn population_sweep(label: &str, values: &[f64], params: &[SystemParams], n_max: usize) -> CliResult<(Table, Vec<PopulationResult>)> {
    let results: Vec<PopulationResult> = params
        .par_iter()
        .map(|p| probe_free_populations(p, n_max))
        .collect::<CliResult<_>>()?;
    let mut t = Table::new().with(label, Column::Float(values.to_vec()));
    for k in 0..4 {
        let col = results.iter().map(|r| r.ground.get(k).copied().unwrap_or(0.0)).collect();
        t = t.with(&format!("P_{k}"), Column::Float(col));
    }
    Ok((t, results))
}

fn population_meta(params: Value, n_max: usize, results: &[&PopulationResult]) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("params".into(), params);
    m.insert("n_max".into(), Value::from(n_max));
    m.insert("residuals".into(), to_value(&results.iter().map(|r| r.residual).collect::<Vec<_>>()));
    m.insert("converged".into(), to_value(&results.iter().map(|r| r.converged).collect::<Vec<_>>()));
    m.insert("tail_mass".into(), to_value(&results.iter().map(|r| r.tail_mass).collect::<Vec<_>>()));
    m
}

pub fn run_populations(cfg: &RunConfig, set: &Settings, output: Option<&Path>) -> CliResult<()> {
    if let (Some(key), Some(values)) = (&cfg.sweep_key, &cfg.sweep_values) {
        let params = values
            .iter()
            .map(|&v| cfg.with_value(key, v)?.params())
            .collect::<CliResult<Vec<_>>>()?;
        let (t, results) = population_sweep("sweep_value", values, &params, set.n_max)?;
        emit(&t, set.format, output)?;
        if let Some(path) = output {
            let mut m = population_meta(to_value(&params), set.n_max, &results.iter().collect::<Vec<_>>());
            m.insert("sweep_key".into(), Value::from(key.as_str()));
            write_meta(path, m)?;
        }
        return Ok(());
    }

    let p = cfg.params()?;
    let r = probe_free_populations(&p, set.n_max)?;
    let t = Table::new()
        .with("n", Column::Int((0..r.ground.len() as i64).collect()))
        .with("P_n", Column::Float(r.ground.clone()));
    emit(&t, set.format, output)?;
    if let Some(path) = output {
        let joint = Table::new()
            .with("n", Column::Int(r.joint.iter().map(|j| j.0 as i64).collect()))
            .with("level", Column::Text(r.joint.iter().map(|j| j.1.label().to_string()).collect()))
            .with("population", Column::Float(r.joint.iter().map(|j| j.2).collect()));
        let jpath = sibling(path, &format!("joint.{}", set.format.extension()));
        emit(&joint, set.format, Some(&jpath))?;
        write_meta(path, population_meta(to_value(&p), set.n_max, &[&r]))?;
    }
    Ok(())
}

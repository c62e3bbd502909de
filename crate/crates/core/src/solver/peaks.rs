//! Peak detection with prominence filtering, and line widths.

use serde::{Deserialize, Serialize};

use super::spectrum::SpectrumSeries;

/// Default minimum prominence as a fraction of the spectrum maximum.
pub const DEFAULT_PROMINENCE_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Refined position.
    pub delta: f64,
    pub height: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PeakWarning {
    /// Grid spacing coarser than a quarter of `gamma_e`.
    Resolution { spacing: f64, limit: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    /// Sorted by position.
    pub peaks: Vec<Peak>,
    pub min_prominence: f64,
    pub warnings: Vec<PeakWarning>,
}

impl PeakSet {
    pub fn positions(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.delta).collect()
    }

    /// Peak closest to `delta`.
    pub fn nearest(&self, delta: f64) -> Option<&Peak> {
        self.peaks
            .iter()
            .min_by(|a, b| (a.delta - delta).abs().total_cmp(&(b.delta - delta).abs()))
    }
}

/// Peaks of `Im chi`. `min_prominence = None` uses
/// [`DEFAULT_PROMINENCE_FRACTION`] of the maximum.
pub fn find_peaks(s: &SpectrumSeries, min_prominence: Option<f64>) -> PeakSet {
    let top = s.im_chi.iter().cloned().fold(0.0f64, f64::max);
    let min_prominence = min_prominence.unwrap_or(DEFAULT_PROMINENCE_FRACTION * top);
    let mut warnings = Vec::new();
    let limit = s.params.gamma_e() / 4.0;
    let spacing = s.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if spacing > limit {
        warnings.push(PeakWarning::Resolution { spacing, limit });
    }
    PeakSet {
        peaks: find_peaks_in(&s.grid, &s.im_chi, min_prominence),
        min_prominence,
        warnings,
    }
}

/// Local maxima of `y` whose prominence is at least `min_prominence`.
pub fn find_peaks_in(x: &[f64], y: &[f64], min_prominence: f64) -> Vec<Peak> {
    assert_eq!(x.len(), y.len());
    let n = y.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            // walk across a flat top
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                let k = (i + j) / 2;
                let prom = prominence(y, k);
                if y[k] > 0.0 && prom >= min_prominence {
                    let (delta, height) = refine(x, y, k);
                    out.push(Peak {
                        delta,
                        height,
                        prominence: prom,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence(y: &[f64], k: usize) -> f64 {
    let h = y[k];
    let mut left_min = h;
    for &v in y[..k].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &y[k + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Vertex of the parabola through the three samples around `k`.
fn refine(x: &[f64], y: &[f64], k: usize) -> (f64, f64) {
    let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
    let (y0, y1, y2) = (y[k - 1], y[k], y[k + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < 0.0) {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    (xv, yv.max(y1))
}

/// Full width at half maximum of the highest peak, by linear interpolation
/// of the half-height crossings. `None` if a crossing lies off the grid.
pub fn fwhm(x: &[f64], y: &[f64]) -> Option<f64> {
    let (k, &top) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(top > 0.0) {
        return None;
    }
    let half = 0.5 * top;
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let left = (1..=k).rev().find(|&i| y[i - 1] < half).map(|i| cross(i - 1, i))?;
    let right = (k..y.len() - 1).find(|&i| y[i + 1] < half).map(|i| cross(i, i + 1))?;
    Some(right - left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{linspace, probe_spectrum, Method, SpectrumOptions};
    use crate::SystemParams;

    fn lorentz(x: f64, x0: f64, w: f64) -> f64 {
        w * w / ((x - x0).powi(2) + w * w)
    }

    #[test]
    fn single_lorentzian() {
        let x = linspace(-10.0, 10.0, 401);
        let y: Vec<f64> = x.iter().map(|&v| lorentz(v, 0.3, 1.5)).collect();
        let p = find_peaks_in(&x, &y, 0.01);
        assert_eq!(p.len(), 1);
        assert!((p[0].delta - 0.3).abs() < 1e-3);
        assert!((p[0].height - 1.0).abs() < 1e-3);
        assert!((fwhm(&x, &y).unwrap() - 3.0).abs() < 1e-2);
    }

    #[test]
    fn prominence_filters_small_ripple() {
        let x = linspace(-10.0, 10.0, 2001);
        let y: Vec<f64> = x
            .iter()
            .map(|&v| lorentz(v, -3.0, 1.0) + 0.005 * lorentz(v, 6.0, 0.2))
            .collect();
        assert_eq!(find_peaks_in(&x, &y, 0.02).len(), 1);
        assert_eq!(find_peaks_in(&x, &y, 0.001).len(), 2);
    }

    #[test]
    fn plateau_counts_once() {
        let x = linspace(0.0, 6.0, 7);
        let y = [0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.0];
        let p = find_peaks_in(&x, &y, 0.1);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].delta, 3.0);
    }

    #[test]
    fn endpoints_are_not_peaks() {
        let x = linspace(0.0, 1.0, 5);
        assert!(find_peaks_in(&x, &[5.0, 4.0, 3.0, 2.0, 1.0], 0.0).is_empty());
    }

    #[test]
    fn vacuum_ats_gives_symmetric_pair() {
        let p = SystemParams::from_effective(10.0, 1.0, 1.0, 10.0, 0.0);
        let s = probe_spectrum(&p, &linspace(-40.0, 40.0, 2001), Method::Analytic, &SpectrumOptions::default()).unwrap();
        let set = find_peaks(&s, None);
        assert_eq!(set.peaks.len(), 2);
        assert!((set.peaks[0].delta + set.peaks[1].delta).abs() < 1e-6);
        assert!(set.warnings.is_empty());
    }

    #[test]
    fn bare_atom_single_peak() {
        let mut p = SystemParams::from_effective(5.0, 1.0, 1.0, 0.0, 0.0);
        p.eta = 0.0;
        let s = probe_spectrum(&p, &linspace(-30.0, 30.0, 601), Method::Analytic, &SpectrumOptions::default()).unwrap();
        let set = find_peaks(&s, None);
        assert_eq!(set.peaks.len(), 1);
        assert!(set.peaks[0].delta.abs() < 1e-9);
        assert!((fwhm(&s.grid, &s.im_chi).unwrap() - 10.0).abs() < 1e-3);
    }

    #[test]
    fn coarse_grid_warns() {
        let p = SystemParams::from_effective(5.0, 1.0, 1.0, 3.0, 0.0);
        let s = probe_spectrum(&p, &linspace(-30.0, 30.0, 21), Method::Analytic, &SpectrumOptions::default()).unwrap();
        assert!(!find_peaks(&s, None).warnings.is_empty());
    }
}

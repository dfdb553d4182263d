//! Delay traces to spectra.
//!
//! `g(δt)` is even in `δt` when `δr∥ = 0`, so a trace on `[0, T]` is
//! extended evenly and transformed with a type-I cosine transform. On `N`
//! uniform samples `t_k = kΔ` it gives
//!
//! ```text
//! S(Ω_j) = (2Δ/π) Σ''_k g_k cos(Ω_j t_k),   Ω_j = jπ/T,
//! ```
//!
//! where `Σ''` halves the end points. The trapezoidal `∫dΩ S` over the
//! returned grid equals `g(0)` for any trace.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constants::PI;
use crate::error::config_err;
use crate::signal::{eval_delay_trace, SignalRequest};
use crate::{Error, Result};

/// Fewest samples accepted by [`cosine_spectrum`].
pub const MIN_TRACE_POINTS: usize = 64;

/// Largest relative deviation of a step from the mean step.
const GRID_TOLERANCE: f64 = 1e-9;

/// A signal sampled on a uniform delay grid starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayTrace {
    pub dt: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl DelayTrace {
    pub fn new(dt: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if dt.len() != values.len() {
            return Err(config_err!("trace has {} delays but {} values", dt.len(), values.len()));
        }
        let t = Self { dt, values, label: label.into() };
        t.step()?;
        Ok(t)
    }

    /// The uniform step, or an error if the grid is not uniform from zero.
    pub fn step(&self) -> Result<f64> {
        if self.dt.len() < 2 {
            return Err(config_err!("trace needs at least two delays"));
        }
        let n = self.dt.len();
        let h = (self.dt[n - 1] - self.dt[0]) / (n - 1) as f64;
        if !(h > 0.0) {
            return Err(config_err!("delay grid must be increasing"));
        }
        if self.dt[0].abs() > GRID_TOLERANCE * h {
            return Err(config_err!("delay grid must start at zero, got {}", self.dt[0]));
        }
        for (k, &t) in self.dt.iter().enumerate() {
            if (t - h * k as f64).abs() > GRID_TOLERANCE * h * (k.max(1)) as f64 {
                return Err(config_err!("delay grid is not uniform at index {k}"));
            }
        }
        Ok(h)
    }

    pub fn t_max(&self) -> f64 {
        *self.dt.last().unwrap_or(&0.0)
    }

    /// The trace restricted to `δt ≤ t_max`.
    pub fn truncated(&self, t_max: f64) -> Self {
        let h = self.step().unwrap_or(1.0);
        let n = self.dt.iter().take_while(|&&t| t <= t_max + GRID_TOLERANCE * h).count();
        Self { dt: self.dt[..n].to_vec(), values: self.values[..n].to_vec(), label: self.label.clone() }
    }

    /// Whether `|g|` near the end of the trace is below 1% of its peak.
    pub fn has_decayed(&self) -> bool {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return true;
        }
        let tail = (self.values.len() / 20).max(1);
        let end = self.values[self.values.len() - tail..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        end < 0.01 * peak
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Window {
    None,
    /// Raised-cosine roll-off over the last `fraction` of the trace.
    CosineTaper(f64),
    #[default]
    DefaultTaper,
}

impl Window {
    fn fraction(self) -> Result<f64> {
        match self {
            Window::None => Ok(0.0),
            Window::DefaultTaper => Ok(0.1),
            Window::CosineTaper(a) if (0.0..=1.0).contains(&a) => Ok(a),
            Window::CosineTaper(a) => Err(config_err!("taper fraction must lie in [0, 1], got {a}")),
        }
    }

    /// Weight at `t ∈ [0, t_max]`.
    pub fn weight(self, t: f64, t_max: f64) -> f64 {
        let a = self.fraction().unwrap_or(0.0);
        let start = (1.0 - a) * t_max;
        if a == 0.0 || t <= start {
            1.0
        } else {
            0.5 * (1.0 + (PI * (t - start) / (a * t_max)).cos())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace {
    /// Angular frequencies in rad/s.
    pub omega: Vec<f64>,
    /// Spectral density in signal units per rad/s.
    pub density: Vec<f64>,
    /// Set when the unwindowed trace has not decayed by its end.
    pub decay_warning: bool,
    pub label: String,
}

impl SpectrumTrace {
    /// Trapezoidal `∫dΩ density`.
    pub fn integral(&self) -> f64 {
        let n = self.omega.len();
        (1..n).map(|j| 0.5 * (self.density[j] + self.density[j - 1]) * (self.omega[j] - self.omega[j - 1])).sum()
    }

    /// Frequency of the largest density.
    pub fn peak_omega(&self) -> f64 {
        let mut best = 0;
        for j in 1..self.density.len() {
            if self.density[j] > self.density[best] {
                best = j;
            }
        }
        self.omega[best]
    }

    /// Grid spacing in rad/s.
    pub fn bin(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }
}

/// Even-extension cosine transform of `trace`.
pub fn cosine_spectrum(trace: &DelayTrace, window: Window) -> Result<SpectrumTrace> {
    let h = trace.step()?;
    let n = trace.dt.len();
    if n < MIN_TRACE_POINTS {
        return Err(Error::Precondition(alloc::format!(
            "trace has {n} points, at least {MIN_TRACE_POINTS} are needed"
        )));
    }
    window.fraction()?;
    let m = n - 1;
    let t_max = h * m as f64;
    let weighted: Vec<f64> = trace
        .values
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let end = if k == 0 || k == m { 0.5 } else { 1.0 };
            end * g * window.weight(trace.dt[k], t_max)
        })
        .collect();
    let norm = 2.0 * h / PI;
    let mut omega = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    for j in 0..n {
        let mut s = 0.0;
        for (k, &g) in weighted.iter().enumerate() {
            // Exact index reduction keeps the phase accurate for long traces.
            let r = (j * k) % (2 * m);
            s += g * (PI * r as f64 / m as f64).cos();
        }
        omega.push(PI * j as f64 / t_max);
        density.push(norm * s);
    }
    Ok(SpectrumTrace {
        omega,
        density,
        decay_warning: window == Window::None && !trace.has_decayed(),
        label: trace.label.clone(),
    })
}

/// One row of the uncertainty table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastRow {
    pub t_max: f64,
    pub contrast: f64,
}

/// Contrast `(P − M)/(P + M)` of `S_full/S_bulk` over `[Ω₁/2, 3Ω₁/2]` for
/// traces truncated at each `t_max`.
pub fn contrast_table(
    full: &DelayTrace,
    bulk: &DelayTrace,
    omega1: f64,
    t_max_list: &[f64],
    window: Window,
) -> Result<Vec<ContrastRow>> {
    if full.dt != bulk.dt {
        return Err(config_err!("full and bulk traces must share a delay grid"));
    }
    t_max_list
        .iter()
        .map(|&t_max| {
            let sf = cosine_spectrum(&full.truncated(t_max), window)?;
            let sb = cosine_spectrum(&bulk.truncated(t_max), window)?;
            let (mut peak, mut trough) = (f64::NEG_INFINITY, f64::INFINITY);
            for j in 0..sf.omega.len() {
                let w = sf.omega[j];
                if w >= 0.5 * omega1 && w <= 1.5 * omega1 && sb.density[j] > 0.0 {
                    let r = sf.density[j] / sb.density[j];
                    peak = peak.max(r);
                    trough = trough.min(r);
                }
            }
            if !(peak.is_finite() && trough.is_finite()) {
                return Err(Error::Precondition(alloc::format!(
                    "no usable spectral bins around the first mode for T_max = {t_max}"
                )));
            }
            Ok(ContrastRow { t_max, contrast: (peak - trough) / (peak + trough) })
        })
        .collect()
}

/// Computes a cavity trace up to the largest `t_max` with step `dt` and
/// reports the first-mode contrast for every entry of `t_max_list`.
///
/// Each truncated trace is tapered over its full length. Shorter tapers
/// leave sidelobes that deepen the trough for traces a few round trips
/// long, so their contrast overshoots and then falls.
pub fn uncertainty_demo(req: &SignalRequest, t_max_list: &[f64], dt: f64) -> Result<Vec<ContrastRow>> {
    if !matches!(req.geometry, crate::geometry::Geometry::Cavity { .. }) {
        return Err(config_err!("uncertainty_demo needs a cavity geometry"));
    }
    if !(dt > 0.0) || t_max_list.is_empty() {
        return Err(config_err!("uncertainty_demo needs a positive step and at least one T_max"));
    }
    let t_end = t_max_list.iter().cloned().fold(0.0, f64::max);
    let n = (t_end / dt + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    let points = eval_delay_trace(req, &grid)?;
    let full = DelayTrace::new(grid.clone(), points.iter().map(|c| c.full()).collect(), "full")?;
    let bulk = DelayTrace::new(grid, points.iter().map(|c| c.g0).collect(), "bulk")?;
    let omega1 = 2.0 * PI / req.crystal.round_trip_time();
    contrast_table(&full, &bulk, omega1, t_max_list, Window::CosineTaper(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn grid(n: usize, h: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * h).collect()
    }

    #[test]
    fn gaussian_cosine_pair_peaks_at_carrier() {
        let h = 0.05;
        let t = grid(400, h);
        let w0 = 7.0;
        let v = t.iter().map(|&x| (w0 * x).cos() * (-(x / 4.0) * (x / 4.0)).exp()).collect();
        let s = cosine_spectrum(&DelayTrace::new(t, v, "").unwrap(), Window::None).unwrap();
        assert!((s.peak_omega() - w0).abs() <= s.bin());
        assert!(!s.decay_warning);
    }

    #[test]
    fn zero_trace_gives_zero_spectrum() {
        let t = grid(64, 1.0);
        let s = cosine_spectrum(&DelayTrace::new(t, vec![0.0; 64], "").unwrap(), Window::DefaultTaper).unwrap();
        assert!(s.density.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn integral_recovers_value_at_zero_delay() {
        let t = grid(101, 0.1);
        let v: Vec<f64> = t.iter().map(|&x| (-x * x).exp() * (1.0 + x).cos()).collect();
        let g0 = v[0];
        for window in [Window::None, Window::DefaultTaper, Window::CosineTaper(0.3)] {
            let s = cosine_spectrum(&DelayTrace::new(t.clone(), v.clone(), "").unwrap(), window).unwrap();
            assert_relative_eq!(s.integral(), g0, max_relative = 1e-12);
        }
    }

    #[test]
    fn undecayed_trace_is_flagged() {
        let t = grid(64, 0.1);
        let v = vec![1.0; 64];
        let tr = DelayTrace::new(t, v, "").unwrap();
        assert!(cosine_spectrum(&tr, Window::None).unwrap().decay_warning);
        assert!(!cosine_spectrum(&tr, Window::DefaultTaper).unwrap().decay_warning);
    }

    #[test]
    fn grid_errors() {
        let mut t = grid(64, 0.1);
        t[10] += 0.01;
        assert!(DelayTrace::new(t, vec![0.0; 64], "").is_err());
        let t = grid(10, 0.1);
        let tr = DelayTrace::new(t, vec![0.0; 10], "").unwrap();
        assert!(matches!(cosine_spectrum(&tr, Window::None), Err(Error::Precondition(_))));
        let t: Vec<f64> = grid(64, 0.1).iter().map(|x| x + 0.5).collect();
        assert!(DelayTrace::new(t, vec![0.0; 64], "").is_err());
        assert!(Window::CosineTaper(1.5).fraction().is_err());
    }

    #[test]
    fn taper_weights() {
        let w = Window::DefaultTaper;
        assert_eq!(w.weight(0.0, 1.0), 1.0);
        assert_eq!(w.weight(0.9, 1.0), 1.0);
        assert_relative_eq!(w.weight(0.95, 1.0), 0.5, epsilon = 1e-12);
        assert!(w.weight(1.0, 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_keeps_grid_prefix() {
        let t = grid(100, 0.1);
        let tr = DelayTrace::new(t.clone(), t.clone(), "").unwrap();
        let c = tr.truncated(3.0);
        assert_eq!(c.dt.len(), 31);
        assert_eq!(c.t_max(), t[30]);
    }

    #[test]
    fn contrast_of_identical_traces_is_zero() {
        let t = grid(128, 0.1);
        let v: Vec<f64> = t.iter().map(|&x| (-x * x).exp()).collect();
        let tr = DelayTrace::new(t, v, "").unwrap();
        let rows = contrast_table(&tr, &tr, 5.0, &[6.4, 6.4], Window::DefaultTaper).unwrap();
        assert_eq!(rows[0], rows[1]);
        assert!(rows[0].contrast.abs() < 1e-12);
    }
}

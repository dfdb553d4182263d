//! The signal integral
//!
//! ```text
//! g⁽ʲ⁾/C = ∫dΩ cos(Ωδt) E²_vac(Ω) ∫d²q∥/(4πq²) Re[R² p⁽ʲ⁾ O⁽ʲ⁾]
//! ```
//!
//! is evaluated as three nested adaptive Gauss–Kronrod integrations: `Ω`
//! outside, then a radial variable, then the polar angle `φ` of `q∥`.
//!
//! The radial variable depends on the sector. For propagating waves
//! `q∥ = Re q·sin θ` with `θ ∈ [0, π/2]`, which turns `d²q∥/q⊥` into
//! `q sin θ dθ dφ` for a real index and removes the square-root
//! singularity at grazing incidence. For evanescent waves
//! `q∥ = √(Re q² + s²)` with `s ∈ [0, s_max]`, so that `q∥dq∥ = s ds` and
//! `q⊥ = is` for a real index. `s_max` follows from the cutoff
//! `q∥ ≤ q_par_max_ratio·Re q`.
//!
//! The bulk term of a lossless crystal only has a propagating part, since
//! `Im G⁽⁰⁾` has no evanescent Weyl components.
//!
//! The `Ω` range is cut into a fixed number of panels that are integrated
//! independently and summed in panel order, so results do not depend on
//! whether the panels run serially or in parallel.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::constants::{PI, SPEED_OF_LIGHT};
use crate::dispersion::{CrystalModel, Direction, PulsePair};
use crate::error::config_err;
use crate::geometry::{integrand_terms, Absorption, Geometry, ObscuringConvention, Terms};
use crate::optical_response::{vacuum_strength_for_index, Frame, WaveVector};
use crate::quadrature::{integrate, integrate_pieces, Tolerance};
use crate::special::passive_sqrt;
use crate::{Error, Result};

/// Which part of the signal a request asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Which {
    Bulk,
    Scattering,
    #[default]
    Full,
}

/// Phase-matching terms kept in the response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseChoice {
    /// Phase-matched only, unless the crystal is thin.
    #[default]
    Auto,
    PhaseMatched,
    Full,
}

/// Crystals at most this thick always use the full response.
pub const THIN_CRYSTAL: f64 = 10e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Lower end of the `Ω` window in rad/s.
    pub omega_min: f64,
    /// Upper end of the `Ω` window in rad/s.
    pub omega_max: f64,
    pub rel_tol: f64,
    /// Absolute tolerance in units of `C`.
    pub abs_tol: f64,
    /// Evanescent cutoff `q∥ ≤ q_par_max_ratio·Re q`.
    pub q_par_max_ratio: f64,
    /// Interval limit for each adaptive integration.
    pub max_subdivisions: usize,
    /// Number of independent `Ω` panels.
    pub omega_panels: usize,
    pub obscuring: ObscuringConvention,
    pub response: ResponseChoice,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            omega_min: crate::constants::thz_to_rad_per_s(0.1),
            omega_max: crate::constants::thz_to_rad_per_s(4.0),
            rel_tol: 1e-4,
            abs_tol: 0.0,
            q_par_max_ratio: 5.0,
            max_subdivisions: 400,
            omega_panels: 8,
            obscuring: ObscuringConvention::Conjugate,
            response: ResponseChoice::Auto,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min >= 0.0 && self.omega_max > self.omega_min && self.omega_max.is_finite()) {
            return Err(config_err!(
                "frequency window must satisfy 0 <= omega_min < omega_max, got [{}, {}]",
                self.omega_min,
                self.omega_max
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(config_err!("rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(config_err!("abs_tol must be non-negative, got {}", self.abs_tol));
        }
        if !(self.q_par_max_ratio >= 1.0 && self.q_par_max_ratio.is_finite()) {
            return Err(config_err!("q_par_max_ratio must be at least 1, got {}", self.q_par_max_ratio));
        }
        if self.max_subdivisions < 1 || self.omega_panels < 1 {
            return Err(config_err!("max_subdivisions and omega_panels must be positive"));
        }
        Ok(())
    }

    /// Response terms used for a crystal of the given length.
    pub fn terms_for(&self, length: f64) -> Terms {
        if length <= THIN_CRYSTAL {
            return Terms::Full;
        }
        match self.response {
            ResponseChoice::Full => Terms::Full,
            ResponseChoice::Auto | ResponseChoice::PhaseMatched => Terms::PhaseMatched,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalRequest {
    pub pulse: PulsePair,
    pub crystal: CrystalModel,
    pub geometry: Geometry,
    pub which: Which,
    pub quadrature: QuadratureConfig,
}

impl SignalRequest {
    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        self.geometry.validate()?;
        self.quadrature.validate()?;
        if self.pulse.direction == Direction::Backward && !matches!(self.geometry, Geometry::Cavity { .. }) {
            return Err(config_err!("counter-propagating pulses are only supported for the cavity"));
        }
        if let Geometry::Cavity { second_pulse, .. } = self.geometry {
            if second_pulse != self.pulse.direction {
                return Err(config_err!("cavity direction and pulse direction disagree"));
            }
        }
        if self.which == Which::Scattering && !self.geometry.has_scattering() {
            return Err(config_err!("the bulk geometry has no scattering contribution"));
        }
        Ok(())
    }
}

/// Trend of the evanescent integrand towards the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum TailDiagnostic {
    #[default]
    Decaying,
    Flat,
    Growing,
}

impl TailDiagnostic {
    pub fn as_str(self) -> &'static str {
        match self {
            TailDiagnostic::Decaying => "decaying",
            TailDiagnostic::Flat => "flat",
            TailDiagnostic::Growing => "growing",
        }
    }
}

/// One signal value in units of `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalValue {
    pub value: f64,
    pub est_error: f64,
    pub n_evaluations: usize,
    pub converged: bool,
    pub tail_diagnostic: TailDiagnostic,
}

/// Bulk and scattering parts at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Components {
    pub g0: f64,
    pub g1: f64,
    pub err0: f64,
    pub err1: f64,
    /// Imaginary part of the bulk integral, zero for an exact real signal
    /// when `δr∥ = 0`.
    pub imag_residue: f64,
    pub n_evaluations: usize,
    pub converged: bool,
    pub tail: TailDiagnostic,
}

impl Components {
    pub fn full(&self) -> f64 {
        self.g0 + self.g1
    }

    pub fn select(&self, which: Which) -> SignalValue {
        let (value, est_error) = match which {
            Which::Bulk => (self.g0, self.err0),
            Which::Scattering => (self.g1, self.err1),
            Which::Full => (self.full(), self.err0 + self.err1),
        };
        SignalValue {
            value,
            est_error,
            n_evaluations: self.n_evaluations,
            converged: self.converged,
            tail_diagnostic: self.tail,
        }
    }
}

/// Partial result for one `Ω` panel of a delay trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelResult {
    /// `[g0, g1]` per delay, then `[err0, err1]` per delay, then the
    /// imaginary residue of the first delay.
    pub values: Vec<f64>,
    pub outer_errors: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

const PHI_INITIAL: usize = 4;
const RADIAL_INITIAL: usize = 2;

struct Engine<'a> {
    req: &'a SignalRequest,
    terms: Terms,
    absorptive: bool,
    want0: bool,
    want1: bool,
    evaluations: Cell<usize>,
    converged: Cell<bool>,
}

/// Values of the `(radial, φ)` integral at one frequency, already scaled
/// by `E²_vac` and the measure.
#[derive(Debug, Clone, Copy)]
struct Inner {
    re: [f64; 2],
    err: [f64; 2],
    im0: f64,
}

impl<'a> Engine<'a> {
    fn new(req: &'a SignalRequest) -> Self {
        let want1 = req.geometry.has_scattering() && req.which != Which::Bulk;
        let want0 = req.which != Which::Scattering;
        Self {
            req,
            terms: req.quadrature.terms_for(req.crystal.length),
            absorptive: req.geometry.absorption() == Absorption::Absorptive,
            want0,
            want1,
            evaluations: Cell::new(0),
            converged: Cell::new(true),
        }
    }

    fn tol(&self, factor: f64) -> Tolerance {
        Tolerance::new(self.req.quadrature.rel_tol * factor, 0.0).grouped(2)
    }

    fn index(&self, omega: f64) -> Complex64 {
        let n = self.req.crystal.index(omega);
        if self.absorptive {
            n
        } else {
            Complex64::new(n.re, 0.0)
        }
    }

    /// `J·c_j` at one point, split into `[Re c0, Re c1, Im c0]`.
    #[allow(clippy::too_many_arguments)]
    fn point(
        &self,
        omega: f64,
        q: Complex64,
        q_par: f64,
        q_perp: Complex64,
        jac: Complex64,
        bulk: bool,
        phi: f64,
        out: &mut [f64],
    ) {
        let (s, c) = phi.sin_cos();
        let wv = WaveVector::from_parts(omega, q, q_par, q_perp, c, s, self.req.geometry.frame());
        let terms = integrand_terms(
            &self.req.geometry,
            &wv,
            &self.req.pulse,
            &self.req.crystal,
            self.terms,
            self.req.quadrature.obscuring,
        );
        let t0 = if bulk && self.want0 { terms[0] * jac } else { Complex64::new(0.0, 0.0) };
        let t1 = if self.want1 { terms[1] * jac } else { Complex64::new(0.0, 0.0) };
        out[0] = finite_or_nan(t0.re);
        out[1] = finite_or_nan(t1.re);
        out[2] = finite_or_nan(t0.im);
    }

    /// `∫dφ` at fixed radial position: `[Re c0, Re c1, Im c0, err0, err1]`.
    #[allow(clippy::too_many_arguments)]
    fn phi_integral(
        &self,
        omega: f64,
        q: Complex64,
        q_par: f64,
        q_perp: Complex64,
        jac: Complex64,
        bulk: bool,
        abs: f64,
        out: &mut [f64],
    ) {
        let (lo, hi, fold) = self.phi_range();
        let est = integrate(
            |phi, o| self.point(omega, q, q_par, q_perp, jac, bulk, phi, o),
            lo,
            hi,
            3,
            2,
            Tolerance::new(0.125 * self.req.quadrature.rel_tol, abs).grouped(2),
            (PHI_INITIAL as f64 / fold) as usize,
            self.req.quadrature.max_subdivisions,
        );
        self.record(est.evaluations, est.converged);
        for k in 0..3 {
            out[k] = fold * est.values[k];
        }
        out[3] = fold * est.errors[0];
        out[4] = fold * est.errors[1];
    }

    /// Reduced `φ` range and its multiplicity. Flipping the in-plane
    /// component along `cos φ` (and, for the cavity, the one along `sin φ`)
    /// leaves the integrand unchanged when the offset along it is zero.
    fn phi_range(&self) -> (f64, f64, f64) {
        let [dx, dy] = self.req.pulse.delta_r;
        match self.req.geometry.frame() {
            Frame::NormalX if dy == 0.0 => (-0.5 * PI, 0.5 * PI, 2.0),
            Frame::NormalY if dx == 0.0 => (-0.5 * PI, 0.5 * PI, 2.0),
            Frame::NormalZ if dx == 0.0 && dy == 0.0 => (0.0, 0.5 * PI, 4.0),
            Frame::NormalZ if dx == 0.0 => (-0.5 * PI, 0.5 * PI, 2.0),
            _ => (0.0, 2.0 * PI, 1.0),
        }
    }

    fn record(&self, evaluations: usize, converged: bool) {
        self.evaluations.set(self.evaluations.get() + evaluations);
        if !converged {
            self.converged.set(false);
        }
    }

    /// `q⊥` and the Jacobian for the propagating sector at angle `θ`.
    fn propagating(&self, q: Complex64, theta: f64) -> (f64, Complex64, Complex64) {
        let qr = q.re;
        let (s, c) = theta.sin_cos();
        let q_par = qr * s;
        if self.absorptive {
            let q_perp = passive_sqrt(excess(q) + qr * qr * c * c);
            let jac =
                if q_perp == Complex64::new(0.0, 0.0) { Complex64::new(0.0, 0.0) } else { qr * qr * s * c / q_perp };
            (q_par, q_perp, jac)
        } else {
            (q_par, Complex64::new(qr * c, 0.0), Complex64::new(qr * s, 0.0))
        }
    }

    /// `q⊥` and the Jacobian for the evanescent sector at depth `s`.
    fn evanescent(&self, q: Complex64, s: f64) -> (f64, Complex64, Complex64) {
        let qr = q.re;
        let q_par = (qr * qr + s * s).sqrt();
        if self.absorptive {
            let q_perp = passive_sqrt(excess(q) - s * s);
            let jac = if q_perp == Complex64::new(0.0, 0.0) { Complex64::new(0.0, 0.0) } else { s / q_perp };
            (q_par, q_perp, jac)
        } else {
            (q_par, Complex64::new(0.0, s), Complex64::new(0.0, -1.0))
        }
    }

    fn s_max(&self, qr: f64) -> f64 {
        let r = self.req.quadrature.q_par_max_ratio;
        qr * (r * r - 1.0).max(0.0).sqrt()
    }

    fn wavenumber(&self, omega: f64) -> (Complex64, Complex64) {
        let n = self.index(omega);
        (n, n * (omega / SPEED_OF_LIGHT))
    }

    /// `(radial, φ)` integral over propagating waves, unscaled.
    fn propagating_sector(&self, omega: f64, q: Complex64) -> crate::quadrature::Estimate {
        let est = integrate(
            |theta, o| {
                let (q_par, q_perp, jac) = self.propagating(q, theta);
                self.phi_integral(omega, q, q_par, q_perp, jac, true, 0.0, o)
            },
            0.0,
            0.5 * PI,
            5,
            2,
            self.tol(0.25),
            RADIAL_INITIAL,
            self.req.quadrature.max_subdivisions,
        );
        self.record(0, est.converged);
        est
    }

    /// `(radial, φ)` integral over evanescent waves, unscaled. `scale` is
    /// the magnitude of the propagating part and sets an absolute floor, so
    /// that contributions that vanish identically do not drive refinement.
    fn evanescent_sector(&self, omega: f64, q: Complex64, scale: f64) -> Option<crate::quadrature::Estimate> {
        let s_max = self.s_max(q.re);
        if !(self.want1 || (self.absorptive && self.want0)) || !(s_max > 0.0) {
            return None;
        }
        let bulk_too = self.absorptive && self.want0;
        let rel = self.req.quadrature.rel_tol;
        let phi_abs = 0.125 * rel * scale / s_max;
        let est = integrate(
            |s, o| {
                let (q_par, q_perp, jac) = self.evanescent(q, s);
                self.phi_integral(omega, q, q_par, q_perp, jac, bulk_too, phi_abs, o);
            },
            0.0,
            s_max,
            5,
            2,
            Tolerance::new(0.25 * rel, 0.25 * rel * scale).grouped(2),
            RADIAL_INITIAL,
            self.req.quadrature.max_subdivisions,
        );
        self.record(0, est.converged);
        Some(est)
    }

    fn inner(&self, omega: f64) -> Inner {
        let (n, q) = self.wavenumber(omega);
        let qr = q.re;
        let prop = self.propagating_sector(omega, q);
        let mut acc = [prop.values[0], prop.values[1], prop.values[2]];
        let mut err = [prop.errors[0] + prop.values[3], prop.errors[1] + prop.values[4]];
        let scale = prop.values[0].abs().max(prop.values[1].abs());
        if let Some(ev) = self.evanescent_sector(omega, q, scale) {
            for k in 0..3 {
                acc[k] += ev.values[k];
            }
            err[0] += ev.errors[0] + ev.values[3];
            err[1] += ev.errors[1] + ev.values[4];
        }

        let measure = if self.absorptive { 1.0 / (4.0 * PI * qr) } else { 1.0 / (4.0 * PI * qr * qr) };
        let scale = vacuum_strength_for_index(n.re, omega) * measure;
        Inner {
            re: [acc[0] * scale, acc[1] * scale],
            err: [err[0].abs() * scale, err[1].abs() * scale],
            im0: acc[2] * scale,
        }
    }

    fn panel(&self, delays: &[f64], panel: usize) -> PanelResult {
        let qc = &self.req.quadrature;
        let h = (qc.omega_max - qc.omega_min) / qc.omega_panels as f64;
        let lo = qc.omega_min + h * panel as f64;
        let hi = if panel + 1 == qc.omega_panels { qc.omega_max } else { lo + h };
        let k = delays.len();
        let dim = 4 * k + 1;
        let mut points = vec![lo];
        points.extend(self.kinks().into_iter().filter(|&w| w > lo && w < hi));
        points.push(hi);
        let est = integrate_pieces(
            |omega, o| {
                let inner = self.inner(omega);
                for (j, &dt) in delays.iter().enumerate() {
                    let c = (omega * dt).cos();
                    o[2 * j] = c * inner.re[0];
                    o[2 * j + 1] = c * inner.re[1];
                    o[2 * k + 2 * j] = c.abs() * inner.err[0];
                    o[2 * k + 2 * j + 1] = c.abs() * inner.err[1];
                }
                o[4 * k] = (omega * delays[0]).cos() * inner.im0;
            },
            &points,
            dim,
            2 * k,
            Tolerance::new(qc.rel_tol * 0.5, qc.abs_tol / qc.omega_panels as f64).grouped(2),
            qc.max_subdivisions,
        );
        self.record(0, est.converged);
        PanelResult {
            values: est.values,
            outer_errors: est.errors,
            evaluations: self.evaluations.get(),
            converged: self.converged.get(),
        }
    }

    /// Tabulated frequencies, where the interpolated indices have kinks.
    fn kinks(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.req.crystal.thz_index.omegas().to_vec();
        if let Some(crate::optical_response::ReflectorModel::Fresnel { outer_index, .. }) =
            self.req.geometry.reflector()
        {
            w.extend_from_slice(outer_index.omegas());
        }
        w.sort_by(f64::total_cmp);
        w.dedup();
        w
    }

    /// Sum of `|∫dφ|` over the active components at evanescent depth `s`.
    fn evanescent_magnitude(&self, omega: f64, q: Complex64, s: f64) -> f64 {
        let (q_par, q_perp, jac) = self.evanescent(q, s);
        let mut o = [0.0; 5];
        self.phi_integral(omega, q, q_par, q_perp, jac, self.absorptive, 0.0, &mut o);
        let bulk = if self.absorptive && self.want0 { o[0].abs() } else { 0.0 };
        let scatter = if self.want1 { o[1].abs() } else { 0.0 };
        bulk + scatter
    }

    fn tail(&self) -> TailDiagnostic {
        let qc = &self.req.quadrature;
        if !(self.want1 || (self.absorptive && self.want0)) || qc.q_par_max_ratio <= 1.0 {
            return TailDiagnostic::Decaying;
        }
        let mut worst = TailDiagnostic::Decaying;
        for frac in [0.25, 0.5, 0.75] {
            let omega = qc.omega_min + frac * (qc.omega_max - qc.omega_min);
            let (_, q) = self.wavenumber(omega);
            let s_max = self.s_max(q.re);
            let prop = self.propagating_sector(omega, q);
            let scale = prop.values[0].abs().max(prop.values[1].abs());
            let mid = self.evanescent_magnitude(omega, q, 0.75 * s_max);
            let end = self.evanescent_magnitude(omega, q, s_max);
            // Negligible on the scale of the propagating part.
            let trend = if end * s_max <= 1e-6 * scale {
                TailDiagnostic::Decaying
            } else if !(mid > 0.0) {
                TailDiagnostic::Growing
            } else {
                let ratio = end / mid;
                if ratio < 0.9 {
                    TailDiagnostic::Decaying
                } else if ratio > 1.1 {
                    TailDiagnostic::Growing
                } else {
                    TailDiagnostic::Flat
                }
            };
            worst = worst.max(trend);
        }
        worst
    }
}

/// `q² − (Re q)²` without cancellation.
#[inline]
fn excess(q: Complex64) -> Complex64 {
    let im = Complex64::new(0.0, q.im);
    im * (2.0 * q.re + im)
}

#[inline]
fn finite_or_nan(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::NAN
    }
}

/// Number of `Ω` panels of a request.
pub fn panels(req: &SignalRequest) -> usize {
    req.quadrature.omega_panels
}

/// Integrates one `Ω` panel for all `delays` at once.
pub fn integrate_panel(req: &SignalRequest, delays: &[f64], panel: usize) -> Result<PanelResult> {
    if delays.is_empty() {
        return Err(Error::Precondition("no delays requested".into()));
    }
    if panel >= panels(req) {
        return Err(Error::Precondition(alloc::format!("panel {panel} out of range")));
    }
    Ok(Engine::new(req).panel(delays, panel))
}

/// Evanescent tail trend of a request.
pub fn tail_diagnostic(req: &SignalRequest) -> TailDiagnostic {
    Engine::new(req).tail()
}

/// Sums panel results in panel order.
pub fn combine(delays: &[f64], parts: &[PanelResult], tail: TailDiagnostic) -> Vec<Components> {
    let k = delays.len();
    let dim = 4 * k + 1;
    let mut values = vec![0.0; dim];
    let mut outer_err = vec![0.0; dim];
    let mut evaluations = 0;
    let mut converged = true;
    for p in parts {
        for i in 0..dim {
            values[i] += p.values[i];
            outer_err[i] += p.outer_errors[i];
        }
        evaluations += p.evaluations;
        converged &= p.converged;
    }
    let converged = converged && values.iter().all(|v| v.is_finite());
    (0..k)
        .map(|j| Components {
            g0: values[2 * j],
            g1: values[2 * j + 1],
            err0: outer_err[2 * j] + values[2 * k + 2 * j],
            err1: outer_err[2 * j + 1] + values[2 * k + 2 * j + 1],
            imag_residue: if j == 0 { values[4 * k] } else { 0.0 },
            n_evaluations: evaluations,
            converged,
            tail,
        })
        .collect()
}

/// `g⁽⁰⁾/C` and `g⁽¹⁾/C` at every delay in `delays`, sharing the inner
/// integrals between delays.
pub fn eval_delay_trace(req: &SignalRequest, delays: &[f64]) -> Result<Vec<Components>> {
    req.validate()?;
    let parts = (0..panels(req)).map(|p| integrate_panel(req, delays, p)).collect::<Result<Vec<_>>>()?;
    Ok(combine(delays, &parts, tail_diagnostic(req)))
}

/// Both signal parts at the request's own delay.
pub fn eval_components(req: &SignalRequest) -> Result<Components> {
    Ok(eval_delay_trace(req, &[req.pulse.delta_t])?[0])
}

/// The part of the signal selected by `req.which`.
pub fn eval_signal(req: &SignalRequest) -> Result<SignalValue> {
    Ok(eval_components(req)?.select(req.which))
}

/// The `Ω` integrand `[g⁽⁰⁾(Ω), g⁽¹⁾(Ω)]` in units of `C` per rad/s, so that
/// `g(δt = 0) = ∫dΩ g(Ω)`.
pub fn spectral_density(req: &SignalRequest, omega: f64) -> Result<[f64; 2]> {
    req.validate()?;
    let inner = Engine::new(req).inner(omega);
    Ok(inner.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    DelayT,
    DeltaX,
    DeltaY,
    PlateDistance,
}

impl ScanAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanAxis::DelayT => "delta_t",
            ScanAxis::DeltaX => "delta_x",
            ScanAxis::DeltaY => "delta_y",
            ScanAxis::PlateDistance => "plate_distance",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub axis: ScanAxis,
    pub grid: Vec<f64>,
    pub points: Vec<Components>,
}

/// Checks that a scan grid is usable.
pub fn validate_grid(req: &SignalRequest, axis: ScanAxis, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(config_err!("scan grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(config_err!("scan grid contains non-finite values"));
    }
    let inc = grid.windows(2).all(|w| w[1] > w[0]);
    let dec = grid.windows(2).all(|w| w[1] < w[0]);
    if !(inc || dec) {
        return Err(config_err!("scan grid must be strictly monotone"));
    }
    if axis == ScanAxis::PlateDistance && req.geometry.plate_distance().is_none() {
        return Err(config_err!("plate_distance scans need a plate geometry"));
    }
    Ok(())
}

/// The request moved to `value` along `axis`.
pub fn request_at(req: &SignalRequest, axis: ScanAxis, value: f64) -> SignalRequest {
    let mut r = req.clone();
    match axis {
        ScanAxis::DelayT => r.pulse.delta_t = value,
        ScanAxis::DeltaX => r.pulse.delta_r[0] = value,
        ScanAxis::DeltaY => r.pulse.delta_r[1] = value,
        ScanAxis::PlateDistance => r.geometry = r.geometry.with_plate_distance(value),
    }
    r
}

/// Evaluates the signal along `axis`. Delay scans share the inner
/// integrals; the other axes evaluate each point on its own.
pub fn scan(req: &SignalRequest, axis: ScanAxis, grid: &[f64]) -> Result<ScanResult> {
    req.validate()?;
    validate_grid(req, axis, grid)?;
    let points = match axis {
        ScanAxis::DelayT => eval_delay_trace(req, grid)?,
        _ => grid.iter().map(|&v| eval_components(&request_at(req, axis, v))).collect::<Result<Vec<_>>>()?,
    };
    Ok(ScanResult { axis, grid: grid.to_vec(), points })
}

/// Whether `g(δt)` and `g(−δt)` agree within tolerance. Requires `δr∥ = 0`.
pub fn delay_symmetry_check(req: &SignalRequest, dt: f64) -> Result<bool> {
    if req.pulse.delta_r != [0.0, 0.0] {
        return Err(Error::Precondition("delay symmetry needs zero transverse offset".into()));
    }
    let plus = eval_signal(&request_at(req, ScanAxis::DelayT, dt))?;
    let minus = eval_signal(&request_at(req, ScanAxis::DelayT, -dt))?;
    let tol = req.quadrature.abs_tol.max(req.quadrature.rel_tol * plus.value.abs());
    Ok((plus.value - minus.value).abs() <= tol)
}

//! Response ingredients shared by every geometry: vacuum field strength,
//! reflection coefficients, spectral filter, response function and photon
//! normalization.

use num_complex::Complex64;
// Needed for float math without std; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::constants::{HBAR, PI, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::dispersion::{CrystalModel, DrudeLorentzParams, IndexTable, PulsePair};
use crate::quadrature::{integrate_scalar, Tolerance};
use crate::special::{erf_real, passive_sqrt, sinc_complex};

/// Algebraic form of the Fresnel coefficients for finite-index plates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FresnelForm {
    /// `R_p = (n′k⊥ − n k⊥′)/(n′k⊥ + n k⊥′)`, `R_s = (k⊥ − n k⊥′)/(k⊥ + n k⊥′)`.
    #[default]
    Verbatim,
    /// `R_p = (ε′k⊥ − ε k⊥′)/(ε′k⊥ + ε k⊥′)`, `R_s = (k⊥ − k⊥′)/(k⊥ + k⊥′)`.
    Textbook,
}

/// Optical response of the medium behind an interface.
#[derive(Debug, Clone, PartialEq)]
pub enum ReflectorModel {
    /// `R_p = 1`, `R_s = −1`.
    Perfect,
    /// `R_p = ρ`, `R_s = −ρ`.
    Coated {
        rho: f64,
    },
    /// Half space with a tabulated index `n′(Ω)`.
    Fresnel {
        outer_index: IndexTable,
        form: FresnelForm,
    },
    DrudeLorentz {
        params: DrudeLorentzParams,
        form: FresnelForm,
    },
}

impl ReflectorModel {
    /// Uncoated crystal facing vacuum.
    pub fn vacuum_interface() -> Self {
        ReflectorModel::Fresnel {
            outer_index: IndexTable::constant(Complex64::new(1.0, 0.0)),
            form: FresnelForm::Verbatim,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if let ReflectorModel::Coated { rho } = self {
            if !(0.0..=1.0).contains(rho) {
                return Err(crate::error::config_err!("coating reflectivity must lie in [0, 1], got {rho}"));
            }
        }
        Ok(())
    }

    /// `n′(Ω)` for finite-index reflectors.
    pub fn outer_index(&self, omega: f64) -> Option<Complex64> {
        match self {
            ReflectorModel::Fresnel { outer_index, .. } => Some(outer_index.eval(omega)),
            ReflectorModel::DrudeLorentz { params, .. } => Some(params.index(omega)),
            _ => None,
        }
    }
}

/// Coordinate frame attaching `(q∥, φ, q⊥)` to the beam axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// `q_x = q⊥`, `q_y = q∥cos φ`, `q_z = q∥sin φ`.
    NormalX,
    /// `q_y = q⊥`, `q_x = q∥cos φ`, `q_z = q∥sin φ`.
    NormalY,
    /// `q_x = q∥cos φ`, `q_y = q∥sin φ`, `q_z = q⊥`.
    NormalZ,
}

/// THz wave vector decomposed relative to an interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    pub omega: f64,
    /// `n(Ω)Ω/c`.
    pub q: Complex64,
    pub q_par: f64,
    /// `√(q² − q∥²)`, `Im ≥ 0`.
    pub q_perp: Complex64,
    pub q_x: Complex64,
    pub q_y: Complex64,
    pub q_z: Complex64,
    pub cos_phi: f64,
    pub sin_phi: f64,
    pub frame: Frame,
}

impl WaveVector {
    pub fn new(omega: f64, index: Complex64, q_par: f64, phi: f64, frame: Frame) -> Self {
        let q = index * (omega / SPEED_OF_LIGHT);
        let q_perp = passive_sqrt(q * q - q_par * q_par);
        Self::from_parts(omega, q, q_par, q_perp, phi.cos(), phi.sin(), frame)
    }

    /// Builds a wave vector from a precomputed `q⊥`, which must satisfy
    /// `q⊥² + q∥² = q²` on the `Im q⊥ ≥ 0` branch.
    pub fn from_parts(
        omega: f64,
        q: Complex64,
        q_par: f64,
        q_perp: Complex64,
        cos_phi: f64,
        sin_phi: f64,
        frame: Frame,
    ) -> Self {
        let a = Complex64::new(q_par * cos_phi, 0.0);
        let b = Complex64::new(q_par * sin_phi, 0.0);
        let (q_x, q_y, q_z) = match frame {
            Frame::NormalX => (q_perp, a, b),
            Frame::NormalY => (a, q_perp, b),
            Frame::NormalZ => (a, b, q_perp),
        };
        Self { omega, q, q_par, q_perp, q_x, q_y, q_z, cos_phi, sin_phi, frame }
    }

    /// Refractive index `q c / Ω`.
    pub fn index(&self) -> Complex64 {
        self.q * (SPEED_OF_LIGHT / self.omega)
    }
}

/// `E²_vac(Ω) = ħ Re n Ω³ / (2ε₀π²c³)`.
pub fn vacuum_strength(model: &CrystalModel, omega: f64) -> f64 {
    vacuum_strength_for_index(model.index(omega).re, omega)
}

pub fn vacuum_strength_for_index(re_n: f64, omega: f64) -> f64 {
    let c = SPEED_OF_LIGHT;
    HBAR * re_n * omega * omega * omega / (2.0 * VACUUM_PERMITTIVITY * PI * PI * c * c * c)
}

/// `(R_p, R_s)` at an interface between the crystal (index `inner_index`)
/// and the reflector.
pub fn reflection_coefficients(
    model: &ReflectorModel,
    inner_index: Complex64,
    omega: f64,
    q_par: f64,
) -> (Complex64, Complex64) {
    let q0 = omega / SPEED_OF_LIGHT;
    let k = inner_index * q0;
    let k_perp = passive_sqrt(k * k - q_par * q_par);
    reflection_with_k_perp(model, inner_index, omega, q_par, k_perp)
}

/// As [`reflection_coefficients`] with the crystal-side `k⊥` supplied.
pub fn reflection_with_k_perp(
    model: &ReflectorModel,
    inner_index: Complex64,
    omega: f64,
    q_par: f64,
    k_perp: Complex64,
) -> (Complex64, Complex64) {
    let (outer, form) = match model {
        ReflectorModel::Perfect => return (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)),
        ReflectorModel::Coated { rho } => return (Complex64::new(*rho, 0.0), Complex64::new(-*rho, 0.0)),
        ReflectorModel::Fresnel { outer_index, form } => (outer_index.eval(omega), *form),
        ReflectorModel::DrudeLorentz { params, form } => (params.index(omega), *form),
    };
    let q0 = omega / SPEED_OF_LIGHT;
    let k_out = outer * q0;
    let k_perp_out = passive_sqrt(k_out * k_out - q_par * q_par);
    debug_assert!(k_perp.im >= 0.0 && k_perp_out.im >= 0.0);
    let n = inner_index;
    match form {
        FresnelForm::Verbatim => (
            ratio(outer * k_perp - n * k_perp_out, outer * k_perp + n * k_perp_out),
            ratio(k_perp - n * k_perp_out, k_perp + n * k_perp_out),
        ),
        FresnelForm::Textbook => {
            let (e_in, e_out) = (n * n, outer * outer);
            (
                ratio(e_out * k_perp - e_in * k_perp_out, e_out * k_perp + e_in * k_perp_out),
                ratio(k_perp - k_perp_out, k_perp + k_perp_out),
            )
        }
    }
}

#[inline]
fn ratio(num: Complex64, den: Complex64) -> Complex64 {
    if den == Complex64::new(0.0, 0.0) {
        // Both wave vectors vanish at grazing incidence between equal media.
        Complex64::new(0.0, 0.0)
    } else {
        num / den
    }
}

/// `f(Ω) = exp(−πΩ²Δt²/4)`.
#[inline]
pub fn spectral_autocorrelation(dt: f64, omega: f64) -> f64 {
    (-PI * omega * omega * dt * dt / 4.0).exp()
}

/// Which terms of the phase-matching response are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseVariant {
    /// `(sinc²₋ + sinc²₊) f²`.
    Full,
    /// `sinc²₋ f²`.
    PhaseMatched,
    /// `sinc₋ sinc₊ f`.
    CounterPropagating,
}

/// `sinc[L/2(n_gΩ/c ∓ q_z)]` as `(sinc₋, sinc₊)`.
#[inline]
pub fn phase_matching(crystal: &CrystalModel, omega: f64, q_z: Complex64) -> (Complex64, Complex64) {
    let kg = crystal.n_g * omega / SPEED_OF_LIGHT;
    let h = 0.5 * crystal.length;
    (sinc_complex((kg - q_z) * h), sinc_complex((q_z + kg) * h))
}

/// `e^{−(q_x² + q_y²)w²/4}` with complex components.
#[inline]
pub fn beam_gaussian(waist: f64, q_x: Complex64, q_y: Complex64) -> Complex64 {
    (-(q_x * q_x + q_y * q_y) * (waist * waist / 4.0)).exp()
}

/// `R²(q)` for the chosen variant.
pub fn response_squared(
    pulse: &PulsePair,
    crystal: &CrystalModel,
    wv: &WaveVector,
    variant: ResponseVariant,
) -> Complex64 {
    let gauss = beam_gaussian(pulse.waist, wv.q_x, wv.q_y);
    let f = spectral_autocorrelation(pulse.duration, wv.omega);
    let (sm, sp) = phase_matching(crystal, wv.omega, wv.q_z);
    match variant {
        ResponseVariant::Full => gauss * (sm * sm + sp * sp) * (f * f),
        ResponseVariant::PhaseMatched => gauss * sm * sm * (f * f),
        ResponseVariant::CounterPropagating => gauss * sm * sp * f,
    }
}

/// Orientation of the plate normal used by [`photon_normalization`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normal {
    X,
    Y,
    /// No plate: nothing is obscured.
    None,
}

/// `N(d, δr∥)/N = √[¼(1 + erf(√2d/w))(1 + erf(√2(d + δr∥·n̂)/w))]`.
pub fn photon_normalization(pulse: &PulsePair, d: f64, normal: Normal) -> f64 {
    let shift = match normal {
        Normal::X => pulse.delta_r[0],
        Normal::Y => pulse.delta_r[1],
        Normal::None => return 1.0,
    };
    let s = core::f64::consts::SQRT_2 / pulse.waist;
    (0.25 * (1.0 + erf_real(s * d)) * (1.0 + erf_real(s * (d + shift)))).sqrt()
}

/// `ω_p = ∫E_p² dω / ∫E_p²/ω dω` for the Gaussian probe spectrum.
pub fn averaged_frequency(pulse: &PulsePair) -> f64 {
    let wc = pulse.omega_center;
    let dt = pulse.duration;
    let lo = (wc - 8.0 / dt).max(wc * 1e-6);
    let hi = wc + 8.0 / dt;
    // Constant prefactors of E_p² cancel in the ratio.
    let e2 = |w: f64| (-PI * (w - wc) * (w - wc) * dt * dt).exp();
    let tol = Tolerance::new(1e-13, 0.0);
    let num = integrate_scalar(e2, lo, hi, tol, 200);
    let den = integrate_scalar(|w| e2(w) / w, lo, hi, tol, 200);
    num.values[0] / den.values[0]
}

/// `√C/N = 2χ⁽²⁾Lω_p (N(d,δr∥)/N) / (n ε₀ c)`, the sampling-efficiency
/// amplitude per detected photon.
pub fn sqrt_c_per_photon(crystal: &CrystalModel, pulse: &PulsePair, photon_ratio: f64) -> f64 {
    2.0 * crystal.chi2 * crystal.length * averaged_frequency(pulse) * photon_ratio
        / (crystal.n_ir * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT)
}

//! Propagation and obscuring factors for the bulk crystal, a crystal next
//! to a plate, and a crystal whose own facets form a cavity.
//!
//! Two layers live here. [`propagation_factor`] and [`obscuring_factor`]
//! evaluate the kernels literally and are what the `kernels` dump and the
//! tests look at. [`integrand_terms`] returns the same products rearranged
//! so that nothing overflows in the evanescent sector; the signal engine
//! only calls this one.

use num_complex::Complex64;
// Needed for float math without std; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::constants::SPEED_OF_LIGHT;
use crate::dispersion::{CrystalModel, Direction, PulsePair};
use crate::error::config_err;
use crate::optical_response::{
    beam_gaussian, phase_matching, reflection_with_k_perp, spectral_autocorrelation, Frame, Normal, ReflectorModel,
    WaveVector,
};
use crate::special::{faddeeva_upper, one_plus_erf};
use crate::Result;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Absorption {
    /// THz index taken as `Re n(Ω)`.
    #[default]
    Lossless,
    /// Complex THz index.
    Absorptive,
}

/// How the erf arguments of the obscuring factors are shifted by `q_a w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObscuringConvention {
    /// Shift `±i q_a w/(2√2)`, the Fourier transform of a half-space cut beam.
    #[default]
    Conjugate,
    /// Shift `±i·(i q_a w)/(2√2)`, taken literally.
    Verbatim,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Bulk,
    /// Plate filling `x < −d`.
    PlateX {
        d: f64,
        reflector: ReflectorModel,
    },
    /// Plate filling `y < −d`.
    PlateY {
        d: f64,
        reflector: ReflectorModel,
    },
    /// Reflecting crystal facets at `z = ±L/2`.
    Cavity {
        reflector: ReflectorModel,
        second_pulse: Direction,
        absorption: Absorption,
    },
}

impl Geometry {
    pub fn frame(&self) -> Frame {
        match self {
            Geometry::Bulk | Geometry::PlateX { .. } => Frame::NormalX,
            Geometry::PlateY { .. } => Frame::NormalY,
            Geometry::Cavity { .. } => Frame::NormalZ,
        }
    }

    pub fn normal(&self) -> Normal {
        match self {
            Geometry::PlateX { .. } => Normal::X,
            Geometry::PlateY { .. } => Normal::Y,
            _ => Normal::None,
        }
    }

    pub fn plate_distance(&self) -> Option<f64> {
        match self {
            Geometry::PlateX { d, .. } | Geometry::PlateY { d, .. } => Some(*d),
            _ => None,
        }
    }

    /// Copy with the plate moved to distance `d`; other geometries are
    /// returned unchanged.
    pub fn with_plate_distance(&self, d: f64) -> Self {
        match self {
            Geometry::PlateX { reflector, .. } => Geometry::PlateX { d, reflector: reflector.clone() },
            Geometry::PlateY { reflector, .. } => Geometry::PlateY { d, reflector: reflector.clone() },
            g => g.clone(),
        }
    }

    pub fn reflector(&self) -> Option<&ReflectorModel> {
        match self {
            Geometry::Bulk => None,
            Geometry::PlateX { reflector, .. }
            | Geometry::PlateY { reflector, .. }
            | Geometry::Cavity { reflector, .. } => Some(reflector),
        }
    }

    pub fn absorption(&self) -> Absorption {
        match self {
            Geometry::Cavity { absorption, .. } => *absorption,
            _ => Absorption::Lossless,
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            Geometry::Cavity { second_pulse, .. } => *second_pulse,
            _ => Direction::Forward,
        }
    }

    pub fn has_scattering(&self) -> bool {
        !matches!(self, Geometry::Bulk)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Bulk => "bulk",
            Geometry::PlateX { .. } => "plate_x",
            Geometry::PlateY { .. } => "plate_y",
            Geometry::Cavity { .. } => "cavity",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.plate_distance() {
            if !(d > 0.0 && d.is_finite()) {
                return Err(config_err!("plate distance must be positive, got {d}"));
            }
        }
        if let Some(r) = self.reflector() {
            r.validate()?;
        }
        Ok(())
    }
}

/// Kernels at one wave vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub p0: Complex64,
    pub p1: Complex64,
    pub o0: Complex64,
    pub o1: Complex64,
}

/// `D_σ = 1 − R_σ² e^{2iq⊥L}`.
#[inline]
pub fn cavity_denominator(r: Complex64, q_perp: Complex64, length: f64) -> Complex64 {
    ONE - r * r * (I * q_perp * (2.0 * length)).exp()
}

/// Polarization sums of the cavity kernels,
/// `A = R_s² sin²φ/D_s + R_p² cos²φ q⊥²/(q² D_p)` and
/// `B = R_s sin²φ/D_s − R_p cos²φ q⊥²/(q² D_p)`.
pub fn cavity_amplitudes(reflector: &ReflectorModel, wv: &WaveVector, length: f64) -> (Complex64, Complex64) {
    let (rp, rs) = reflection_with_k_perp(reflector, wv.index(), wv.omega, wv.q_par, wv.q_perp);
    let ds = cavity_denominator(rs, wv.q_perp, length);
    let dp = cavity_denominator(rp, wv.q_perp, length);
    let c2 = wv.cos_phi * wv.cos_phi;
    let s2 = wv.sin_phi * wv.sin_phi;
    let t = wv.q_perp * wv.q_perp / (wv.q * wv.q);
    let s_term = s2 / ds;
    let p_term = t * c2 / dp;
    (rs * rs * s_term + rp * rp * p_term, rs * s_term - rp * p_term)
}

/// `q⊥·p⁽⁰⁾` and `q⊥·p⁽¹⁾` without the phase factors `e^{iq·δr∥}` and,
/// for plates, `e^{2idq⊥}`.
fn reduced_propagation(geom: &Geometry, wv: &WaveVector, crystal: &CrystalModel) -> (Complex64, Complex64) {
    let q = wv.q;
    let qp2 = wv.q_par * wv.q_par;
    let c2 = wv.cos_phi * wv.cos_phi;
    let s2 = wv.sin_phi * wv.sin_phi;
    match geom {
        Geometry::Bulk => (qp2 / q, ZERO),
        Geometry::PlateX { reflector, .. } => {
            let (rp, _) = reflection_with_k_perp(reflector, wv.index(), wv.omega, wv.q_par, wv.q_perp);
            let k0 = qp2 / q;
            (k0, k0 * rp)
        }
        Geometry::PlateY { reflector, .. } => {
            let (rp, rs) = reflection_with_k_perp(reflector, wv.index(), wv.omega, wv.q_par, wv.q_perp);
            let k0 = q * (ONE - qp2 * c2 / (q * q));
            let t = wv.q_perp * wv.q_perp / (q * q);
            (k0, q * (rs * s2 - rp * c2 * t))
        }
        Geometry::Cavity { reflector, second_pulse, .. } => {
            let l = crystal.length;
            let (a, b) = cavity_amplitudes(reflector, wv, l);
            let k0 = q * (ONE - qp2 * c2 / (q * q));
            match second_pulse {
                Direction::Forward => (0.5 * k0, q * (I * wv.q_perp * (2.0 * l)).exp() * a),
                Direction::Backward => (k0, q * (I * wv.q_perp * l).exp() * b),
            }
        }
    }
}

/// `e^{iq·δr∥}` with `δr∥ = (δx, δy)`.
#[inline]
fn offset_phase(wv: &WaveVector, delta_r: [f64; 2]) -> Complex64 {
    (I * (wv.q_x * delta_r[0] + wv.q_y * delta_r[1])).exp()
}

/// `(p⁽⁰⁾, p⁽¹⁾)` evaluated literally, including `1/q⊥` and the offset phase.
///
/// For cavities this is the co-propagating phase-matched or the
/// counter-propagating form, depending on the direction of the second pulse.
pub fn propagation_factor(
    geom: &Geometry,
    wv: &WaveVector,
    delta_r: [f64; 2],
    crystal: &CrystalModel,
) -> (Complex64, Complex64) {
    let (k0, k1) = reduced_propagation(geom, wv, crystal);
    let phase = offset_phase(wv, delta_r);
    let plate = match geom.plate_distance() {
        Some(d) => (I * wv.q_perp * (2.0 * d)).exp(),
        None => ONE,
    };
    (k0 * phase / wv.q_perp, k1 * plate * phase / wv.q_perp)
}

/// `(a₁, a₂, β, shift)` for the erf arguments: `a₁ = √2d/w`,
/// `a₂ = √2(d + δ_a)/w`, `β = q_a w/(2√2)` and the signed axis offset.
fn obscuring_arguments(
    geom: &Geometry,
    wv: &WaveVector,
    delta_r: [f64; 2],
    waist: f64,
) -> Option<(f64, f64, Complex64, Complex64, f64)> {
    let d = geom.plate_distance()?;
    let (qa, qb, da) = match geom.normal() {
        Normal::X => (wv.q_x, wv.q_y, delta_r[0]),
        Normal::Y => (wv.q_y, wv.q_x, delta_r[1]),
        Normal::None => return None,
    };
    let s2 = core::f64::consts::SQRT_2;
    Some((s2 * d / waist, s2 * (d + da) / waist, qa * (waist / (2.0 * s2)), qb, da))
}

/// `(O⁽⁰⁾, O⁽¹⁾)`; `(1, 1)` without a plate.
pub fn obscuring_factor(
    geom: &Geometry,
    wv: &WaveVector,
    delta_r: [f64; 2],
    pulse: &PulsePair,
    convention: ObscuringConvention,
) -> (Complex64, Complex64) {
    let Some((a1, a2, beta, _, _)) = obscuring_arguments(geom, wv, delta_r, pulse.waist) else {
        return (ONE, ONE);
    };
    let shift = match convention {
        ObscuringConvention::Conjugate => I * beta,
        ObscuringConvention::Verbatim => I * (I * beta),
    };
    let f1 = one_plus_erf(a1 + shift);
    let o0 = 0.25 * f1 * one_plus_erf(a2 - shift);
    let o1 = 0.25 * f1 * one_plus_erf(a2 + shift);
    (o0, o1)
}

pub fn kernel_value(
    geom: &Geometry,
    wv: &WaveVector,
    pulse: &PulsePair,
    crystal: &CrystalModel,
    convention: ObscuringConvention,
) -> KernelValue {
    let (p0, p1) = propagation_factor(geom, wv, pulse.delta_r, crystal);
    let (o0, o1) = obscuring_factor(geom, wv, pulse.delta_r, pulse, convention);
    KernelValue { p0, p1, o0, o1 }
}

/// `T(a, β) = e^{2iaβ − β²}(1 + erf(a + iβ))/2`, evaluated without
/// forming the large and small factors separately.
pub fn beam_factor(a: f64, beta: Complex64) -> Complex64 {
    let z = Complex64::new(a, 0.0) + I * beta;
    let damp = 0.5 * (-a * a).exp();
    if z.re >= 0.0 {
        (I * beta * (2.0 * a) - beta * beta).exp() - damp * faddeeva_upper(I * z)
    } else {
        damp * faddeeva_upper(-I * z)
    }
}

/// Normal-axis beam products with everything that depends on `q_a`:
/// `e^{−q_a²w²/4} e^{iq_aδ_a} O⁽⁰⁾` and
/// `e^{−q_a²w²/4} e^{iq_aδ_a} e^{2idq_a} O⁽¹⁾`.
#[allow(clippy::too_many_arguments)]
fn plate_beam_products(
    a1: f64,
    a2: f64,
    beta: Complex64,
    qa: Complex64,
    da: f64,
    d: f64,
    waist: f64,
    convention: ObscuringConvention,
) -> (Complex64, Complex64) {
    match convention {
        ObscuringConvention::Conjugate => {
            let t1 = beam_factor(a1, beta);
            let b0 = (I * qa * (2.0 * da)).exp() * t1 * beam_factor(a2, -beta);
            let b1 = t1 * beam_factor(a2, beta);
            (b0, b1)
        }
        ObscuringConvention::Verbatim => {
            let g = (-(qa * qa) * (waist * waist / 4.0) + I * qa * da).exp();
            let f1 = one_plus_erf(Complex64::new(a1, 0.0) - beta);
            let b0 = g * 0.25 * f1 * one_plus_erf(Complex64::new(a2, 0.0) + beta);
            let b1 = g * (I * qa * (2.0 * d)).exp() * 0.25 * f1 * one_plus_erf(Complex64::new(a2, 0.0) - beta);
            (b0, b1)
        }
    }
}

/// `(1 + iu − e^{iu})/u²`.
pub fn absorptive_bulk_profile(u: Complex64) -> Complex64 {
    if u.norm() < 0.5 {
        // Σ (iu)^k/(k+2)!
        let iu = I * u;
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..16 {
            term = term * iu / f64::from(k + 2);
            sum += term;
        }
        sum
    } else {
        (ONE + I * u - (I * u).exp()) / (u * u)
    }
}

/// `(i(q_z/k_g) sin(Lk_g) + cos(Lk_g) − e^{iLq_z}) / (L²(q_z − k_g)(q_z + k_g))`.
pub fn counter_bulk_profile(q_z: Complex64, k_g: f64, length: f64) -> Complex64 {
    // With δ = q_z − k_g the numerator is iδ sin(Lk_g)/k_g − e^{iLk_g}(e^{iLδ} − 1),
    // and e^{iLδ} − 1 = iLδ sinc(Lδ/2) e^{iLδ/2}, so δ cancels exactly.
    let delta = q_z - k_g;
    let a = length * k_g;
    let half = delta * (0.5 * length);
    let num_over_delta =
        I * (a.sin() / k_g) - (I * a).exp() * I * length * crate::special::sinc_complex(half) * (I * half).exp();
    num_over_delta / ((q_z + k_g) * (length * length))
}

/// Which phase-matching terms the kernels keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    PhaseMatched,
    Full,
}

/// `q⊥` times everything inside `Re[…]` of the signal integrand, for the
/// bulk (`[0]`) and scattering (`[1]`) parts.
///
/// Lossless terms are to be integrated with the measure `d²q∥/(4πq²)`,
/// absorptive cavity terms with `d²q∥/(4π Re q)`; both still need the
/// factor `1/q⊥`, which the engine folds into its change of variables.
pub fn integrand_terms(
    geom: &Geometry,
    wv: &WaveVector,
    pulse: &PulsePair,
    crystal: &CrystalModel,
    terms: Terms,
    convention: ObscuringConvention,
) -> [Complex64; 2] {
    let w = pulse.waist;
    let f = spectral_autocorrelation(pulse.duration, wv.omega);
    let f2 = f * f;
    let (sm, sp) = phase_matching(crystal, wv.omega, wv.q_z);
    let sinc_sq = match terms {
        Terms::PhaseMatched => sm * sm,
        Terms::Full => sm * sm + sp * sp,
    };
    match geom {
        Geometry::Bulk => {
            let (k0, _) = reduced_propagation(geom, wv, crystal);
            let g = beam_gaussian(w, wv.q_x, wv.q_y) * offset_phase(wv, pulse.delta_r);
            [k0 * g * sinc_sq * f2, ZERO]
        }
        Geometry::PlateX { d, .. } | Geometry::PlateY { d, .. } => {
            let (k0, k1) = reduced_propagation(geom, wv, crystal);
            let (a1, a2, beta, qb, da) = obscuring_arguments(geom, wv, pulse.delta_r, w).expect("plate geometry");
            let qa = wv.q_perp;
            let (b0, b1) = plate_beam_products(a1, a2, beta, qa, da, *d, w, convention);
            let db = match geom.normal() {
                Normal::X => pulse.delta_r[1],
                _ => pulse.delta_r[0],
            };
            let tangential = (-(qb * qb) * (w * w / 4.0) + I * qb * db).exp();
            let common = tangential * sinc_sq * f2;
            [k0 * b0 * common, k1 * b1 * common]
        }
        Geometry::Cavity { reflector, second_pulse, absorption } => {
            let l = crystal.length;
            let g = beam_gaussian(w, wv.q_x, wv.q_y) * offset_phase(wv, pulse.delta_r);
            let (a, b) = cavity_amplitudes(reflector, wv, l);
            let round = (I * wv.q_perp * (2.0 * l)).exp();
            let single = (I * wv.q_perp * l).exp();
            let both = sm * sm + sp * sp;
            let cross = sm * sp;
            let angular = ONE - wv.q_par * wv.q_par * wv.cos_phi * wv.cos_phi / (wv.q * wv.q);
            let q = wv.q;
            match (absorption, second_pulse) {
                (Absorption::Lossless, Direction::Forward) => {
                    let c0 = 0.5 * q * angular * g * sinc_sq * f2;
                    let c1 = match terms {
                        Terms::PhaseMatched => q * round * a * sm * sm,
                        Terms::Full => q * (round * a * both + 2.0 * single * b * cross),
                    };
                    [c0, c1 * g * f2]
                }
                (Absorption::Lossless, Direction::Backward) => {
                    let c0 = q * angular * g * cross * f;
                    let c1 = match terms {
                        Terms::PhaseMatched => q * single * b * sm * sm,
                        Terms::Full => q * (2.0 * round * a * cross + single * b * both),
                    };
                    [c0, c1 * g * f2]
                }
                (Absorption::Absorptive, Direction::Forward) => {
                    let kg = crystal.n_g * wv.omega / SPEED_OF_LIGHT;
                    let c0 = angular * absorptive_bulk_profile((wv.q_z - kg) * l);
                    let c1 = round * a * both + 2.0 * single * b * cross;
                    [c0 * g * f2, c1 * g * f2]
                }
                (Absorption::Absorptive, Direction::Backward) => {
                    let kg = crystal.n_g * wv.omega / SPEED_OF_LIGHT;
                    let c0 = angular * counter_bulk_profile(wv.q_z, kg, l);
                    let c1 = 2.0 * round * a * cross + single * b * both;
                    [c0 * g * f2, c1 * g * f2]
                }
            }
        }
    }
}

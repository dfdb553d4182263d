//! Independent evaluations of the bulk signal `g⁽⁰⁾/C`.
//!
//! Neither touches the adaptive engine. [`tensor_grid_bulk`] is a plain
//! Riemann sum over transverse wave vectors. [`weyl_bulk`] is coded from
//! the angular spectrum of the free-space Green's tensor,
//! `Im G⁽⁰⁾(ρ) = q/(16π²) ∫dΩ_k (I − k̂k̂) cos(k·ρ)`, over the full sphere.

#![allow(dead_code)]

use std::f64::consts::PI;

use eosvac_core::constants::{HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use eosvac_core::dispersion::PulsePair;
use eosvac_core::optical_response::{response_squared, vacuum_strength, Frame, ResponseVariant, WaveVector};
use eosvac_core::signal::SignalRequest;
use eosvac_core::Complex64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let legendre = |z: f64| {
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
        (p1, dp)
    };
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(z);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Nodes and weights on `[a, b]` split into `panels` equal pieces.
pub fn composite(a: f64, b: f64, n: usize, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(n * panels);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// Midpoint sum on an `n³` grid over `(Ω, q∥, φ)`, `q∥` transverse to the
/// beam, both signs of `q_z = ±q⊥`:
/// `∫dΩ cos(Ωδt) E²_vac ∫d²q∥/(8πq²) Σ± Re[(q/q⊥)(1 − q_x²/q²) R²]`.
/// Uses the phase-matched response and `Re n`.
pub fn tensor_grid_bulk(req: &SignalRequest, n_grid: usize) -> f64 {
    let pulse = &req.pulse;
    let mid = |a: f64, b: f64| -> Vec<(f64, f64)> {
        let h = (b - a) / n_grid as f64;
        (0..n_grid).map(|i| (a + h * (i as f64 + 0.5), h)).collect()
    };
    let q = &req.quadrature;
    let mut total = 0.0;
    for (omega, wo) in mid(q.omega_min, q.omega_max) {
        let n = Complex64::new(req.crystal.index(omega).re, 0.0);
        let qn = n.re * omega / SPEED_OF_LIGHT;
        let mut inner = 0.0;
        for (q_par, wq) in mid(0.0, qn) {
            let q_perp = (qn * qn - q_par * q_par).sqrt();
            for (phi, wp) in mid(0.0, 2.0 * PI) {
                let (s, c) = phi.sin_cos();
                let q_x = q_par * c;
                let angular = qn / q_perp * (1.0 - q_x * q_x / (qn * qn));
                let phase = (q_x * pulse.delta_r[0] + q_par * s * pulse.delta_r[1]).cos();
                for sign in [1.0, -1.0] {
                    let wv = WaveVector::from_parts(
                        omega,
                        n * (omega / SPEED_OF_LIGHT),
                        q_par,
                        Complex64::new(sign * q_perp, 0.0),
                        c,
                        s,
                        Frame::NormalZ,
                    );
                    let r2 = response_squared(pulse, &req.crystal, &wv, ResponseVariant::PhaseMatched);
                    inner += wq * wp * q_par * angular * phase * r2.re;
                }
            }
        }
        total +=
            wo * (omega * pulse.delta_t).cos() * vacuum_strength(&req.crystal, omega) * inner / (8.0 * PI * qn * qn);
    }
    total
}

/// Bulk signal from the Weyl angular spectrum of `Im G⁽⁰⁾_xx`, with a
/// dispersionless index `n`, the phase-matched `sinc²` and polar axis
/// along the beam.
pub fn weyl_bulk(pulse: &PulsePair, length: f64, n: f64, n_g: f64, omega_range: (f64, f64)) -> f64 {
    let omegas = composite(omega_range.0, omega_range.1, 16, 8);
    let thetas = composite(0.0, PI, 16, 60);
    let phis = composite(0.0, 2.0 * PI, 16, 4);
    let (w, dt) = (pulse.waist, pulse.duration);
    let mut total = 0.0;
    for &(omega, wo) in &omegas {
        let q = n * omega / SPEED_OF_LIGHT;
        let k_g = n_g * omega / SPEED_OF_LIGHT;
        let e2 = HBAR * n * omega.powi(3) / (2.0 * VACUUM_PERMITTIVITY * PI * PI * SPEED_OF_LIGHT.powi(3));
        let f = (-PI * omega * omega * dt * dt / 4.0).exp();
        let mut sphere = 0.0;
        for &(th, wt) in &thetas {
            let (st, ct) = th.sin_cos();
            let x = 0.5 * length * (k_g - q * ct);
            let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
            for &(ph, wp) in &phis {
                let (sp, cp) = ph.sin_cos();
                let (kx, ky) = (st * cp, st * sp);
                let transverse = 1.0 - kx * kx;
                let beam = (-(q * q) * (kx * kx + ky * ky) * w * w / 4.0).exp();
                let phase = (q * (kx * pulse.delta_r[0] + ky * pulse.delta_r[1])).cos();
                sphere += wt * wp * st * transverse * beam * phase * sinc * sinc;
            }
        }
        total += wo * (omega * pulse.delta_t).cos() * e2 * f * f * sphere / (8.0 * PI);
    }
    total
}

/// Fixed pseudo-random draws of `(δt, δx, δy, L, w)` for the Weyl check.
pub fn weyl_points() -> Vec<(f64, f64, f64, f64, f64)> {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..3)
        .map(|_| {
            let dt = 150e-15 * next();
            let dx = 60e-6 * next();
            let dy = 60e-6 * next();
            let length = 0.05e-3 + 0.45e-3 * next();
            let waist = 40e-6 + 80e-6 * next();
            (dt, dx, dy, length, waist)
        })
        .collect()
}

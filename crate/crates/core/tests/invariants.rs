use eosvac_core::constants::{thz_to_rad_per_s, SPEED_OF_LIGHT};
use eosvac_core::dispersion::{CrystalModel, DrudeLorentzParams, IndexTable, PulsePair};
use eosvac_core::geometry::cavity_denominator;
use eosvac_core::optical_response::{
    photon_normalization, reflection_coefficients, response_squared, Frame, FresnelForm, Normal, ReflectorModel,
    ResponseVariant, WaveVector,
};
use eosvac_core::special::passive_sqrt;
use eosvac_core::spectrum::{cosine_spectrum, DelayTrace, Window};
use eosvac_core::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn rows() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.01f64..10.0, 1.0f64..5.0, -0.1f64..0.5), 2..40)
}

fn table_from(rows: &[(f64, f64, f64)]) -> Option<IndexTable> {
    IndexTable::from_rows(rows.iter().map(|&(f, re, im)| (thz_to_rad_per_s(f), Complex64::new(re, im))).collect()).ok()
}

proptest! {
    #[test]
    fn table_is_passive_and_sorted(rows in rows()) {
        if let Some(t) = table_from(&rows) {
            prop_assert!(t.values().iter().all(|n| n.im >= 0.0));
            prop_assert!(t.omegas().windows(2).all(|w| w[1] > w[0]));
            let s = t.stats();
            prop_assert_eq!(s.rows_in, rows.len());
            prop_assert_eq!(t.len() + s.duplicates_removed, rows.len());
        }
    }

    #[test]
    fn interpolation_reproduces_nodes_and_stays_between_neighbours(rows in rows(), u in 0.0f64..1.0) {
        if let Some(t) = table_from(&rows) {
            for (w, n) in t.omegas().iter().zip(t.values()) {
                prop_assert_eq!(t.eval(*w), *n);
            }
            let w = t.omegas();
            let i = ((w.len() - 1) as f64 * u) as usize;
            let i = i.min(w.len() - 2);
            let x = w[i] + u * (w[i + 1] - w[i]);
            let v = t.eval(x);
            let (a, b) = (t.values()[i], t.values()[i + 1]);
            prop_assert!(v.re >= a.re.min(b.re) - 1e-12 && v.re <= a.re.max(b.re) + 1e-12);
            prop_assert!(v.im >= a.im.min(b.im) - 1e-12 && v.im <= a.im.max(b.im) + 1e-12);
            prop_assert_eq!(t.eval(0.5 * w[0]), t.values()[0]);
            prop_assert_eq!(t.eval(2.0 * w[w.len() - 1]), t.values()[w.len() - 1]);
        }
    }

    #[test]
    fn passive_sqrt_has_non_negative_imaginary_part(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let z = Complex64::new(re, im);
        let r = passive_sqrt(z);
        prop_assert!(r.im >= 0.0);
        prop_assert!((r * r - z).norm() <= 1e-12 * z.norm().max(1.0));
    }

    #[test]
    fn passive_reflectors_do_not_amplify_propagating_waves(
        f_thz in 0.05f64..4.0,
        ratio in 0.0f64..0.999,
        n_in in 1.0f64..4.0,
        n_out_re in 0.05f64..6.0,
        n_out_im in 0.0f64..3.0,
    ) {
        let omega = thz_to_rad_per_s(f_thz);
        let inner = Complex64::new(n_in, 0.0);
        let q_par = ratio * n_in * omega / SPEED_OF_LIGHT;
        let outer = IndexTable::constant(Complex64::new(n_out_re, n_out_im));
        for form in [FresnelForm::Textbook, FresnelForm::Verbatim] {
            let m = ReflectorModel::Fresnel { outer_index: outer.clone(), form };
            let (rp, rs) = reflection_coefficients(&m, inner, omega, q_par);
            prop_assert!(rs.norm() <= 1.0 + 1e-12, "{:?} R_s = {}", form, rs);
            if form == FresnelForm::Textbook {
                prop_assert!(rp.norm() <= 1.0 + 1e-12, "R_p = {}", rp);
            }
        }
        let drude = ReflectorModel::DrudeLorentz {
            params: DrudeLorentzParams::reference_plate(),
            form: FresnelForm::Textbook,
        };
        let (rp, rs) = reflection_coefficients(&drude, inner, omega, q_par);
        prop_assert!(rp.norm() <= 1.0 + 1e-12 && rs.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn photon_normalization_rises_monotonically_to_one(d1 in 0.0f64..5.0, d2 in 0.0f64..5.0) {
        let p = PulsePair::reference();
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = photon_normalization(&p, lo * p.waist, Normal::X);
        let b = photon_normalization(&p, hi * p.waist, Normal::Y);
        prop_assert!(a <= b + 1e-15);
        prop_assert!((0.5..=1.0).contains(&a));
    }

    #[test]
    fn full_response_dominates_phase_matched(f_thz in 0.05f64..4.0, ratio in 0.0f64..0.999, phi in 0.0f64..TAU) {
        let pulse = PulsePair::reference();
        let crystal = CrystalModel::znte_constant_index(1e-3, 3.2);
        let omega = thz_to_rad_per_s(f_thz);
        let q_par = ratio * 3.2 * omega / SPEED_OF_LIGHT;
        let wv = WaveVector::new(omega, Complex64::new(3.2, 0.0), q_par, phi, Frame::NormalZ);
        let full = response_squared(&pulse, &crystal, &wv, ResponseVariant::Full);
        let pm = response_squared(&pulse, &crystal, &wv, ResponseVariant::PhaseMatched);
        prop_assert!(pm.re >= 0.0 && pm.im.abs() <= 1e-15 * pm.re.max(1e-300));
        prop_assert!(full.re >= pm.re);
    }

    #[test]
    fn cavity_denominator_is_bounded(
        r_abs in 0.0f64..1.0,
        r_arg in 0.0f64..TAU,
        q_re in 0.0f64..1e6,
        q_im in 0.0f64..1e5,
        length_um in 1.0f64..1000.0,
    ) {
        let r = Complex64::from_polar(r_abs, r_arg);
        let q = Complex64::new(q_re, q_im);
        let l = length_um * 1e-6;
        let e = (-2.0 * q_im * l).exp();
        let d = cavity_denominator(r, q, l).norm();
        let k = r_abs * r_abs * e;
        prop_assert!(d >= 1.0 - k - 1e-12 && d <= 1.0 + k + 1e-12);
        prop_assert!(d > 0.0);
    }

    #[test]
    fn cosine_spectrum_is_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in prop::collection::vec(-1.0f64..1.0, 64..100),
        seed in 0u64..1000,
    ) {
        let n = x.len();
        let y: Vec<f64> = (0..n).map(|k| ((k as u64 * 7919 + seed) % 101) as f64 / 50.0 - 1.0).collect();
        let dt: Vec<f64> = (0..n).map(|k| k as f64 * 1e-14).collect();
        let z: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let s = |v: Vec<f64>| cosine_spectrum(&DelayTrace::new(dt.clone(), v, "t").unwrap(), Window::DefaultTaper).unwrap();
        let (sx, sy, sz) = (s(x.clone()), s(y), s(z));
        let scale = sx.density.iter().chain(&sy.density).fold(0.0f64, |m, v| m.max(v.abs())) * (a.abs() + b.abs()) + 1e-300;
        for j in 0..n {
            prop_assert!((sz.density[j] - a * sx.density[j] - b * sy.density[j]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn spectrum_integrates_to_the_zero_delay_value(x in prop::collection::vec(-1.0f64..1.0, 64..120), frac in 0.0f64..1.0) {
        let dt: Vec<f64> = (0..x.len()).map(|k| k as f64 * 2e-14).collect();
        let trace = DelayTrace::new(dt, x.clone(), "t").unwrap();
        let s = cosine_spectrum(&trace, Window::CosineTaper(frac)).unwrap();
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!((s.integral() - x[0]).abs() <= 1e-12 * scale.max(1e-300) * x.len() as f64);
    }
}

#[test]
fn photon_normalization_endpoints() {
    let p = PulsePair::reference();
    assert_eq!(photon_normalization(&p, 0.0, Normal::X), 0.5);
    assert!((photon_normalization(&p, 20.0 * p.waist, Normal::Y) - 1.0).abs() < 1e-15);
    assert_eq!(photon_normalization(&p, 0.0, Normal::None), 1.0);
}

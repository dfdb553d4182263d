//! Special functions: the Faddeeva function, complex and real error
//! functions, and `sinc`.

use num_complex::Complex64;
// Needed for float math without std; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

// Weideman's rational expansion of w(z) with N = 40 terms. The coefficients
// are the FFT of exp(-t²)(L² + t²) on the mapped grid t = L tan(θ/2),
// highest degree first, L = sqrt(N / sqrt(2)).
const WEIDEMAN_L: f64 = 5.3182958969449885;
const WEIDEMAN_COEFFS: [f64; 40] = [
    -1.7356980998791865e-15,
    1.201674910759281e-15,
    1.1519170220749485e-14,
    -5.231716366324404e-15,
    -7.071088022159408e-14,
    1.3778224047664046e-14,
    4.5341448909434655e-13,
    1.203330952919568e-13,
    -2.90771851041427e-12,
    -2.7277735625830245e-12,
    1.771418567386718e-11,
    3.4727420938907015e-11,
    -9.055138860958323e-11,
    -3.5632350403602684e-10,
    2.1085990731251058e-10,
    3.017780425551564e-09,
    3.249746582945079e-09,
    -1.8315616834296834e-08,
    -6.351773483015411e-08,
    1.419864237295343e-08,
    5.912136953029057e-07,
    1.4835661133172014e-06,
    -1.066013898416273e-06,
    -1.8007447144723407e-05,
    -5.5913092642348794e-05,
    -3.939363145483805e-05,
    0.000439807015986967,
    0.002705405633073729,
    0.010048186242783535,
    0.02920291647124188,
    0.07182361779074328,
    0.15504263802479504,
    0.2998943799615006,
    0.5266528988277086,
    0.8472174576593815,
    1.2563815675765133,
    1.7253830848179779,
    2.201513794878312,
    2.6160541527618597,
    2.899624509389705,
];

/// Faddeeva function `w(z) = exp(-z²) erfc(-iz)` for `Im z ≥ 0`.
///
/// Relative accuracy is about 1e-14 in the closed upper half plane. Points
/// with `Im z < 0` are mapped with `w(z) = 2 exp(-z²) - w(-z)`, which may
/// overflow far from the real axis.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        let mz = -z;
        return 2.0 * (-(z * z)).exp() - faddeeva_upper(mz);
    }
    faddeeva_upper(z)
}

pub(crate) fn faddeeva_upper(z: Complex64) -> Complex64 {
    let l = Complex64::new(WEIDEMAN_L, 0.0);
    let iz = Complex64::new(-z.im, z.re);
    let denom = l - iz;
    let big_z = (l + iz) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for &a in WEIDEMAN_COEFFS.iter() {
        p = p * big_z + a;
    }
    2.0 * p / (denom * denom) + FRAC_1_SQRT_PI / denom
}

/// Complex error function.
pub fn erf(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -erf(-z);
    }
    if z.norm_sqr() < 0.25 {
        return erf_series(z);
    }
    // Re z >= 0 puts iz in the upper half plane.
    let iz = Complex64::new(-z.im, z.re);
    Complex64::new(1.0, 0.0) - (-(z * z)).exp() * faddeeva_upper(iz)
}

/// `1 + erf(z)`, accurate also where `erf(z)` is close to `-1`.
pub fn one_plus_erf(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        return Complex64::new(1.0, 0.0) + erf(z);
    }
    // 1 + erf(z) = erfc(-z) = exp(-z²) w(-iz), with Im(-iz) = -Re z > 0.
    let miz = Complex64::new(z.im, -z.re);
    (-(z * z)).exp() * faddeeva_upper(miz)
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0u32;
    loop {
        n += 1;
        term = term * (-z2) / f64::from(n);
        let c = term / f64::from(2 * n + 1);
        sum += c;
        if c.norm() <= 1e-17 * sum.norm() || n > 40 {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// Real error function.
#[inline]
pub fn erf_real(x: f64) -> f64 {
    libm::erf(x)
}

/// Unnormalized `sin(x)/x`.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Unnormalized `sin(z)/z` for complex arguments.
pub fn sinc_complex(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Square root on the passive branch, `Im ≥ 0`.
#[inline]
pub fn passive_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

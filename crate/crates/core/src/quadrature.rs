//! Adaptive Gauss–Kronrod (7, 15) quadrature for vector-valued integrands.
//!
//! Every component shares the same subdivision. Refinement is driven by the
//! first `controlled` components; the remaining ones ride along (they carry
//! propagated error estimates in the signal engine and must not force extra
//! subdivisions).

use alloc::vec;
use alloc::vec::Vec;
// Needed for float math without std; redundant when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Error targets for one integration. A component is converged once its
/// error estimate is below `abs + rel·max(|I|, l1_floor·∫|f|)`, where the
/// reference magnitude is shared within consecutive blocks of `group`
/// controlled components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Fraction of `∫|f|` used as a floor for the relative target, so that
    /// integrals that cancel to nearly zero still terminate.
    pub l1_floor: f64,
    pub group: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs, l1_floor: 1e-4, group: 1 }
    }

    pub fn grouped(self, group: usize) -> Self {
        Self { group: group.max(1), ..self }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { rel: self.rel * factor, abs: self.abs * factor, ..self }
    }

    fn targets(&self, totals: &Totals, controlled: usize, out: &mut [f64]) {
        for k in 0..controlled {
            out[k] = totals.values[k].abs().max(self.l1_floor * totals.l1[k]);
        }
        for block in out[..controlled].chunks_mut(self.group.max(1)) {
            let m = block.iter().cloned().fold(0.0, f64::max);
            block.iter_mut().for_each(|t| *t = self.abs + self.rel * m);
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// `∫|f|` per component.
    pub l1: Vec<f64>,
    pub evaluations: usize,
    pub intervals: usize,
    pub converged: bool,
}

struct Interval {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    l1: Vec<f64>,
}

/// Integrates `f` over `[a, b]`.
///
/// `f(x, out)` writes `dim` components into `out`; only the first
/// `controlled` of them steer refinement. The range starts out split into
/// `initial` equal panels and is bisected until every controlled component
/// meets `tol` or `max_intervals` is reached.
#[allow(clippy::too_many_arguments)]
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    dim: usize,
    controlled: usize,
    tol: Tolerance,
    initial: usize,
    max_intervals: usize,
) -> Estimate
where
    F: FnMut(f64, &mut [f64]),
{
    let initial = initial.max(1);
    let h = (b - a) / initial as f64;
    let mut points: Vec<f64> = (0..initial).map(|i| a + h * i as f64).collect();
    points.push(b);
    integrate_pieces(f, &points, dim, controlled, tol, max_intervals)
}

/// Like [`integrate`], with the initial intervals given by the increasing
/// `points`. Kinks of the integrand belong at these points.
pub fn integrate_pieces<F>(
    mut f: F,
    points: &[f64],
    dim: usize,
    controlled: usize,
    tol: Tolerance,
    max_intervals: usize,
) -> Estimate
where
    F: FnMut(f64, &mut [f64]),
{
    let controlled = controlled.min(dim);
    let initial = points.len().saturating_sub(1).max(1);
    let mut scratch = vec![0.0; dim * 15];
    let mut evaluations = 0usize;
    let mut intervals: Vec<Interval> = Vec::with_capacity(initial * 4);
    for w in points.windows(2) {
        intervals.push(gk15(&mut f, w[0], w[1], dim, &mut scratch));
        evaluations += 15;
    }

    let mut totals = Totals::new(dim);
    let mut targets = vec![0.0; controlled];
    loop {
        totals.recompute(&intervals);
        tol.targets(&totals, controlled, &mut targets);
        let done = (0..controlled).all(|k| totals.errors[k] <= targets[k]);
        if done || intervals.len() >= max_intervals.max(initial) {
            return Estimate {
                values: totals.values.clone(),
                errors: totals.errors.clone(),
                l1: totals.l1.clone(),
                evaluations,
                intervals: intervals.len(),
                converged: done,
            };
        }

        // Bisect the interval with the largest error relative to the target.
        let mut worst = 0;
        let mut worst_score = -1.0;
        for (i, iv) in intervals.iter().enumerate() {
            let mut score = 0.0;
            for k in 0..controlled {
                let t = targets[k].max(f64::MIN_POSITIVE);
                score += iv.errors[k] / t;
            }
            if score > worst_score {
                worst_score = score;
                worst = i;
            }
        }
        let iv = intervals.swap_remove(worst);
        let mid = 0.5 * (iv.a + iv.b);
        if !(mid > iv.a && mid < iv.b) {
            // Interval cannot be split further in floating point.
            intervals.push(iv);
            totals.recompute(&intervals);
            return Estimate {
                values: totals.values.clone(),
                errors: totals.errors.clone(),
                l1: totals.l1.clone(),
                evaluations,
                intervals: intervals.len(),
                converged: false,
            };
        }
        intervals.push(gk15(&mut f, iv.a, mid, dim, &mut scratch));
        intervals.push(gk15(&mut f, mid, iv.b, dim, &mut scratch));
        evaluations += 30;
    }
}

/// Sums are recomputed from scratch in a fixed order so that results do not
/// depend on the history of floating-point updates.
struct Totals {
    values: Vec<f64>,
    errors: Vec<f64>,
    l1: Vec<f64>,
}

impl Totals {
    fn new(dim: usize) -> Self {
        Self { values: vec![0.0; dim], errors: vec![0.0; dim], l1: vec![0.0; dim] }
    }

    fn recompute(&mut self, intervals: &[Interval]) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        self.errors.iter_mut().for_each(|v| *v = 0.0);
        self.l1.iter_mut().for_each(|v| *v = 0.0);
        let mut order: Vec<usize> = (0..intervals.len()).collect();
        order.sort_by(|&i, &j| intervals[i].a.total_cmp(&intervals[j].a));
        for i in order {
            let iv = &intervals[i];
            for k in 0..self.values.len() {
                self.values[k] += iv.values[k];
                self.errors[k] += iv.errors[k];
                self.l1[k] += iv.l1[k];
            }
        }
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, scratch: &mut [f64]) -> Interval
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // Node order in scratch: center, then (-x_j, +x_j) pairs for j = 0..7.
    f(center, &mut scratch[..dim]);
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = scratch.split_at_mut(dim * (1 + 2 * j + 1));
        f(center - dx, &mut lo[dim * (1 + 2 * j)..]);
        f(center + dx, &mut hi[..dim]);
    }

    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    let mut l1 = vec![0.0; dim];
    for k in 0..dim {
        let fc = scratch[k];
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut abs = WGK[7] * fc.abs();
        for j in 0..7 {
            let f1 = scratch[dim * (1 + 2 * j) + k];
            let f2 = scratch[dim * (2 + 2 * j) + k];
            kron += WGK[j] * (f1 + f2);
            abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kron;
        let mut asc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            let f1 = scratch[dim * (1 + 2 * j) + k];
            let f2 = scratch[dim * (2 + 2 * j) + k];
            asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let res_asc = asc * half.abs();
        let mut err = ((kron - gauss) * half).abs();
        if res_asc != 0.0 && err != 0.0 {
            err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
        }
        let res_abs = abs * half.abs();
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * res_abs);
        }
        if !kron.is_finite() {
            err = f64::INFINITY;
        }
        values[k] = kron * half;
        errors[k] = err;
        l1[k] = res_abs;
    }
    Interval { a, b, values, errors, l1 }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, tol: Tolerance, max_intervals: usize) -> Estimate
where
    F: FnMut(f64) -> f64,
{
    integrate(|x, out| out[0] = f(x), a, b, 1, 1, tol, 1, max_intervals)
}

//! Material response: the crystal's THz index, Drude–Lorentz plates and the
//! fixed near-infrared constants of the probe.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::error::config_err;
use crate::special::passive_sqrt;
use crate::{Error, Result};

/// Bookkeeping from building an [`IndexTable`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableStats {
    pub rows_in: usize,
    pub duplicates_removed: usize,
    /// Rows whose negative imaginary part was set to zero.
    pub passivity_projected: usize,
}

/// Complex refractive index sampled on a strictly increasing angular
/// frequency grid, interpolated linearly and clamped at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTable {
    omegas: Vec<f64>,
    values: Vec<Complex64>,
    stats: TableStats,
}

impl IndexTable {
    /// Builds a table from `(Ω [rad/s], n)` rows in any order.
    ///
    /// Rows are sorted by frequency, repeated frequencies keep their first
    /// occurrence, and negative `Im n` is projected to zero.
    pub fn from_rows(rows: Vec<(f64, Complex64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(config_err!("refractive index table is empty"));
        }
        for (i, (w, n)) in rows.iter().enumerate() {
            if !w.is_finite() || !n.re.is_finite() || !n.im.is_finite() {
                return Err(Error::Data(alloc::format!("row {i}: non-finite value")));
            }
            if *w < 0.0 {
                return Err(Error::Data(alloc::format!("row {i}: negative frequency {w}")));
            }
        }
        let mut stats = TableStats { rows_in: rows.len(), ..TableStats::default() };
        let mut rows = rows;
        // Stable sort keeps the first of any repeated frequencies in front.
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut omegas = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        for (w, mut n) in rows {
            if omegas.last() == Some(&w) {
                stats.duplicates_removed += 1;
                continue;
            }
            if n.im < 0.0 {
                n.im = 0.0;
                stats.passivity_projected += 1;
            }
            omegas.push(w);
            values.push(n);
        }
        if omegas.len() < 2 {
            return Err(Error::Data(alloc::format!(
                "refractive index table needs at least two distinct frequencies, got {}",
                omegas.len()
            )));
        }
        Ok(Self { omegas, values, stats })
    }

    /// A dispersionless index.
    pub fn constant(n: Complex64) -> Self {
        let n = Complex64::new(n.re, n.im.max(0.0));
        Self {
            omegas: alloc::vec![0.0],
            values: alloc::vec![n],
            stats: TableStats { rows_in: 1, ..TableStats::default() },
        }
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        let w = &self.omegas;
        if omega <= w[0] {
            return self.values[0];
        }
        let last = w.len() - 1;
        if omega >= w[last] {
            return self.values[last];
        }
        // First index with w[i] > omega; omega lies in [w[i-1], w[i]).
        let i = w.partition_point(|&x| x <= omega);
        let t = (omega - w[i - 1]) / (w[i] - w[i - 1]);
        let (a, b) = (self.values[i - 1], self.values[i]);
        if t == 0.0 {
            return a;
        }
        a + (b - a) * t
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn stats(&self) -> TableStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Largest `|Im n|` over the table.
    pub fn max_absorption(&self) -> f64 {
        self.values.iter().fold(0.0, |m, n| m.max(n.im.abs()))
    }
}

/// The nonlinear crystal.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalModel {
    /// Thickness `L` along the probe direction, in m.
    pub length: f64,
    /// Second-order susceptibility in C·V⁻².
    pub chi2: f64,
    /// Ordinary index at the probe's central frequency.
    pub n_ir: f64,
    /// Group index at the probe's central frequency.
    pub n_g: f64,
    pub thz_index: IndexTable,
}

impl CrystalModel {
    pub fn new(length: f64, chi2: f64, n_ir: f64, n_g: f64, thz_index: IndexTable) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(config_err!("crystal length must be positive, got {length}"));
        }
        if !(n_ir >= 1.0 && n_ir.is_finite()) {
            return Err(config_err!("NIR index must be at least 1, got {n_ir}"));
        }
        if !(n_g > 0.0 && n_g.is_finite()) {
            return Err(config_err!("group index must be positive, got {n_g}"));
        }
        if !chi2.is_finite() {
            return Err(config_err!("chi2 must be finite"));
        }
        Ok(Self { length, chi2, n_ir, n_g, thz_index })
    }

    /// ZnTe near-infrared constants with a dispersionless THz index.
    pub fn znte_constant_index(length: f64, n_thz: f64) -> Self {
        Self {
            length,
            chi2: chi2_from_r41(2.85, 1.17e-21),
            n_ir: 2.85,
            n_g: 3.2,
            thz_index: IndexTable::constant(Complex64::new(n_thz, 0.0)),
        }
    }

    #[inline]
    pub fn index(&self, omega: f64) -> Complex64 {
        self.thz_index.eval(omega)
    }

    /// Probe group velocity `c/n_g`.
    #[inline]
    pub fn group_velocity(&self) -> f64 {
        SPEED_OF_LIGHT / self.n_g
    }

    /// Round trip time `2L n_g / c`.
    #[inline]
    pub fn round_trip_time(&self) -> f64 {
        2.0 * self.length / self.group_velocity()
    }
}

pub fn crystal_index(model: &CrystalModel, omega: f64) -> Complex64 {
    model.index(omega)
}

/// Sign of the oscillator term in the Drude–Lorentz permittivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OscillatorSign {
    /// `ε∞[1 − ω_p²/(Ω² − ω_c² + iΩΓ)]`, passive for `Γ ≥ 0`.
    #[default]
    Passive,
    /// `ε∞[1 + ω_p²/(Ω² − ω_c² + iΩΓ)]`. Gain (`Im ε′ < 0`) for `Ω > 0`.
    Literal,
}

/// Drude–Lorentz plate, all frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeLorentzParams {
    pub eps_inf: f64,
    pub omega_p: f64,
    pub omega_c: f64,
    pub gamma: f64,
    pub sign: OscillatorSign,
}

impl DrudeLorentzParams {
    pub fn new(eps_inf: f64, omega_p: f64, omega_c: f64, gamma: f64) -> Result<Self> {
        if !(eps_inf > 0.0 && eps_inf.is_finite()) {
            return Err(config_err!("eps_inf must be positive, got {eps_inf}"));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(config_err!("Drude-Lorentz damping must be non-negative, got {gamma}"));
        }
        if !omega_p.is_finite() || !omega_c.is_finite() {
            return Err(config_err!("Drude-Lorentz frequencies must be finite"));
        }
        Ok(Self { eps_inf, omega_p, omega_c, gamma, sign: OscillatorSign::Passive })
    }

    /// `ε∞ = 8`, `ω_p = 0.86·2π THz`, `ω_c = 0.04·2π THz`, `Γ = 0.056·2π THz`.
    pub fn reference_plate() -> Self {
        use crate::constants::thz_to_rad_per_s;
        Self {
            eps_inf: 8.0,
            omega_p: thz_to_rad_per_s(0.86),
            omega_c: thz_to_rad_per_s(0.04),
            gamma: thz_to_rad_per_s(0.056),
            sign: OscillatorSign::Passive,
        }
    }

    pub fn with_sign(mut self, sign: OscillatorSign) -> Self {
        self.sign = sign;
        self
    }

    pub fn permittivity(&self, omega: f64) -> Complex64 {
        let denom = Complex64::new(omega * omega - self.omega_c * self.omega_c, omega * self.gamma);
        let term = self.omega_p * self.omega_p / denom;
        match self.sign {
            OscillatorSign::Passive => self.eps_inf * (1.0 - term),
            OscillatorSign::Literal => self.eps_inf * (1.0 + term),
        }
    }

    pub fn index(&self, omega: f64) -> Complex64 {
        passive_sqrt(self.permittivity(omega))
    }
}

pub fn drude_lorentz_index(p: &DrudeLorentzParams, omega: f64) -> Complex64 {
    p.index(omega)
}

/// `χ⁽²⁾ = n⁴ε₀r₄₁/2`.
pub fn chi2_from_r41(n_ir: f64, r41: f64) -> f64 {
    let n2 = n_ir * n_ir;
    n2 * n2 * VACUUM_PERMITTIVITY * r41 / 2.0
}

/// Propagation direction of the second probe pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Along `+z`, co-propagating with the first pulse.
    #[default]
    Forward,
    /// Along `−z`.
    Backward,
}

/// The two probe pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePair {
    /// Beam waist `w` in m.
    pub waist: f64,
    /// Central angular frequency `ω_c` in rad/s.
    pub omega_center: f64,
    /// Pulse duration `Δt` in s.
    pub duration: f64,
    /// Delay `δt` between the pulses in s.
    pub delta_t: f64,
    /// Transverse offset `(δx, δy)` of the second pulse in m.
    pub delta_r: [f64; 2],
    pub direction: Direction,
}

impl PulsePair {
    pub fn new(waist: f64, omega_center: f64, duration: f64) -> Result<Self> {
        let p =
            Self { waist, omega_center, duration, delta_t: 0.0, delta_r: [0.0, 0.0], direction: Direction::Forward };
        p.validate()?;
        Ok(p)
    }

    /// 80 µm waist, 375·2π THz centre, 80 fs duration.
    pub fn reference() -> Self {
        Self {
            waist: 80e-6,
            omega_center: crate::constants::thz_to_rad_per_s(375.0),
            duration: 80e-15,
            delta_t: 0.0,
            delta_r: [0.0, 0.0],
            direction: Direction::Forward,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0 && self.waist.is_finite()) {
            return Err(config_err!("beam waist must be positive, got {}", self.waist));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(config_err!("pulse duration must be positive, got {}", self.duration));
        }
        if !(self.omega_center > 0.0 && self.omega_center.is_finite()) {
            return Err(config_err!("central frequency must be positive, got {}", self.omega_center));
        }
        if !self.delta_t.is_finite() || !self.delta_r.iter().all(|v| v.is_finite()) {
            return Err(config_err!("pulse offsets must be finite"));
        }
        Ok(())
    }

    pub fn with_delay(mut self, delta_t: f64) -> Self {
        self.delta_t = delta_t;
        self
    }

    pub fn with_offset(mut self, dx: f64, dy: f64) -> Self {
        self.delta_r = [dx, dy];
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::thz_to_rad_per_s;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn midpoint_and_clamping() {
        let t = IndexTable::from_rows(vec![(2.0, c(3.2, 0.2)), (1.0, c(3.0, 0.1))]).unwrap();
        let mid = t.eval(1.5);
        assert_relative_eq!(mid.re, 3.1, epsilon = 1e-15);
        assert_relative_eq!(mid.im, 0.15, epsilon = 1e-15);
        assert_eq!(t.eval(0.5), c(3.0, 0.1));
        assert_eq!(t.eval(7.0), c(3.2, 0.2));
    }

    #[test]
    fn cleanup_statistics() {
        let t = IndexTable::from_rows(vec![
            (3.0, c(3.0, -0.01)),
            (1.0, c(2.0, 0.0)),
            (1.0, c(9.0, 0.0)),
            (2.0, c(2.5, 0.0)),
        ])
        .unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.eval(1.0), c(2.0, 0.0));
        assert_eq!(t.eval(3.0), c(3.0, 0.0));
        assert_eq!(t.stats(), TableStats { rows_in: 4, duplicates_removed: 1, passivity_projected: 1 });
    }

    #[test]
    fn degenerate_tables_are_rejected() {
        assert!(matches!(IndexTable::from_rows(vec![]), Err(Error::Config(_))));
        assert!(matches!(IndexTable::from_rows(vec![(1.0, c(1.0, 0.0))]), Err(Error::Data(_))));
        assert!(IndexTable::from_rows(vec![(1.0, c(1.0, 0.0)), (1.0, c(2.0, 0.0))]).is_err());
        assert!(IndexTable::from_rows(vec![(f64::NAN, c(1.0, 0.0)), (1.0, c(2.0, 0.0))]).is_err());
    }

    #[test]
    fn drude_lorentz_limits() {
        let p = DrudeLorentzParams::new(8.0, 2.0, 1.0, 0.0).unwrap();
        let lit = p.with_sign(OscillatorSign::Literal);
        // Static limit ε∞(1 − ω_p²/ω_c²) = −24 for the literal sign.
        assert_relative_eq!(lit.index(0.0).re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(lit.index(0.0).im, 24.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(p.index(0.0).re, 40.0f64.sqrt(), epsilon = 1e-14);
        for q in [p, lit] {
            assert_relative_eq!(q.index(1e9).re, 8.0f64.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn literal_sign_is_gain() {
        let p = DrudeLorentzParams::reference_plate().with_sign(OscillatorSign::Literal);
        assert!(p.permittivity(thz_to_rad_per_s(1.0)).im < 0.0);
        assert!(p.index(thz_to_rad_per_s(1.0)).im >= 0.0);
        assert!(DrudeLorentzParams::reference_plate().permittivity(thz_to_rad_per_s(1.0)).im > 0.0);
    }

    #[test]
    fn drude_lorentz_reference_plate_at_spp_frequency() {
        // Independent evaluation in mpmath (50 digits).
        let n = drude_lorentz_index(&DrudeLorentzParams::reference_plate(), thz_to_rad_per_s(1.85));
        assert_relative_eq!(n.re, 2.5044142399758176, max_relative = 1e-13);
        assert_relative_eq!(n.im, 0.010447962315445914, max_relative = 1e-11);
        let p = DrudeLorentzParams::reference_plate().with_sign(OscillatorSign::Literal);
        let n = p.index(thz_to_rad_per_s(1.85));
        assert_relative_eq!(n.re, -3.118988434463573, max_relative = 1e-13);
        assert_relative_eq!(n.im, 0.008389266632863835, max_relative = 1e-11);
    }

    #[test]
    fn chi2_examples() {
        assert_relative_eq!(chi2_from_r41(1.0, 2.0 / VACUUM_PERMITTIVITY), 1.0, max_relative = 1e-15);
        assert_eq!(chi2_from_r41(0.0, 1.0), 0.0);
        // 2.85⁴ · 8.8541878128e-12 · 1.17e-21 / 2
        assert_relative_eq!(chi2_from_r41(2.85, 1.17e-21), 3.4173073132857e-31, max_relative = 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(PulsePair::new(-1e-6, 1e15, 80e-15).is_err());
        assert!(PulsePair::new(1e-6, 1e15, 0.0).is_err());
        assert!(DrudeLorentzParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(DrudeLorentzParams::new(8.0, 1.0, 1.0, -1.0).is_err());
        let t = IndexTable::constant(c(3.0, 0.0));
        assert!(CrystalModel::new(0.0, 1.0, 2.85, 3.2, t.clone()).is_err());
        assert!(CrystalModel::new(1e-3, 1.0, 0.5, 3.2, t).is_err());
    }
}

//! Run configuration.
//!
//! Configs are TOML documents with engineering units spelled out in every
//! key. Conversion to SI happens here and nowhere else.

use std::path::{Path, PathBuf};

use eosvac_core::constants::thz_to_rad_per_s;
use eosvac_core::dispersion::{
    chi2_from_r41, CrystalModel, Direction, DrudeLorentzParams, IndexTable, OscillatorSign, PulsePair,
};
use eosvac_core::geometry::{Absorption, Geometry, ObscuringConvention};
use eosvac_core::optical_response::{FresnelForm, ReflectorModel};
use eosvac_core::signal::{QuadratureConfig, ResponseChoice, ScanAxis, Which};
use eosvac_core::spectrum::Window;
use eosvac_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::ingest::ingest_index_table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub pulse: PulseSection,
    pub crystal: CrystalSection,
    pub geometry: Vec<GeometrySection>,
    pub scan: ScanSection,
    pub quadrature: QuadratureSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    pub waist_um: f64,
    pub center_frequency_thz: f64,
    pub duration_fs: f64,
    pub delta_t_fs: f64,
    pub delta_x_um: f64,
    pub delta_y_um: f64,
    pub direction: DirectionKey,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            waist_um: 80.0,
            center_frequency_thz: 375.0,
            duration_fs: 80.0,
            delta_t_fs: 0.0,
            delta_x_um: 0.0,
            delta_y_um: 0.0,
            direction: DirectionKey::Co,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DirectionKey {
    #[default]
    Co,
    Counter,
}

impl From<DirectionKey> for Direction {
    fn from(d: DirectionKey) -> Self {
        match d {
            DirectionKey::Co => Direction::Forward,
            DirectionKey::Counter => Direction::Backward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalSection {
    pub length_mm: f64,
    pub n_ir: f64,
    pub n_group: f64,
    /// Electro-optic coefficient in C/V².
    pub r41_c_per_v2: f64,
    /// `freq_thz,re_n,im_n` table, relative to the config file.
    pub index_table: Option<PathBuf>,
    /// Dispersionless THz index, used when no table is given.
    pub n_thz: Option<f64>,
}

impl Default for CrystalSection {
    fn default() -> Self {
        Self { length_mm: 0.1, n_ir: 2.85, n_group: 3.2, r41_c_per_v2: 1.17e-21, index_table: None, n_thz: Some(3.2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    #[default]
    Bulk,
    PlateX,
    PlateY,
    Cavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReflectorKind {
    #[default]
    Perfect,
    Coated,
    Fresnel,
    DrudeLorentz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub kind: GeometryKind,
    /// Beam-plate distance for plates.
    pub d_um: f64,
    pub reflector: ReflectorKind,
    pub rho: f64,
    /// Outer medium for `fresnel`, relative to the config file.
    pub outer_index_table: Option<PathBuf>,
    pub fresnel_form: FresnelFormKey,
    pub drude: DrudeSection,
    pub absorption: AbsorptionKey,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            kind: GeometryKind::Bulk,
            d_um: 160.0,
            reflector: ReflectorKind::Perfect,
            rho: 0.95,
            outer_index_table: None,
            fresnel_form: FresnelFormKey::Verbatim,
            drude: DrudeSection::default(),
            absorption: AbsorptionKey::Lossless,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FresnelFormKey {
    #[default]
    Verbatim,
    Textbook,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AbsorptionKey {
    #[default]
    Lossless,
    Absorptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignKey {
    #[default]
    Passive,
    Literal,
}

/// Drude–Lorentz parameters; frequencies are linear, in THz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DrudeSection {
    pub eps_inf: f64,
    pub omega_p_thz: f64,
    pub omega_c_thz: f64,
    pub gamma_thz: f64,
    pub sign: SignKey,
}

impl Default for DrudeSection {
    fn default() -> Self {
        Self { eps_inf: 8.0, omega_p_thz: 0.86, omega_c_thz: 0.04, gamma_thz: 0.056, sign: SignKey::Passive }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AxisKey {
    #[default]
    None,
    DeltaT,
    DeltaX,
    DeltaY,
    PlateDistance,
}

impl AxisKey {
    pub fn scan_axis(self) -> Option<ScanAxis> {
        match self {
            AxisKey::None => None,
            AxisKey::DeltaT => Some(ScanAxis::DelayT),
            AxisKey::DeltaX => Some(ScanAxis::DeltaX),
            AxisKey::DeltaY => Some(ScanAxis::DeltaY),
            AxisKey::PlateDistance => Some(ScanAxis::PlateDistance),
        }
    }

    /// Unit of the axis values in configs and CSV files.
    pub fn unit(self) -> &'static str {
        match self {
            AxisKey::None => "",
            AxisKey::DeltaT => "fs",
            _ => "um",
        }
    }

    fn to_si(self, v: f64) -> f64 {
        match self {
            AxisKey::None => v,
            AxisKey::DeltaT => v / 1e15,
            _ => v / 1e6,
        }
    }
}

/// A uniform sweep. `start` and `stop` carry the axis unit (fs for
/// `delta_t`, µm otherwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub axis: AxisKey,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self { axis: AxisKey::None, start: 0.0, stop: 0.0, points: 1 }
    }
}

impl ScanSection {
    /// Grid in the axis unit.
    pub fn grid(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|k| if k + 1 == self.points { self.stop } else { self.start + h * k as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObscuringKey {
    #[default]
    Conjugate,
    Verbatim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKey {
    #[default]
    Auto,
    PhaseMatched,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub omega_min_thz: f64,
    pub omega_max_thz: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub q_par_max_ratio: f64,
    pub max_subdivisions: usize,
    pub omega_panels: usize,
    pub obscuring: ObscuringKey,
    pub response: ResponseKey,
    /// Largest tolerated fraction of non-converged points.
    pub max_nonconverged_fraction: f64,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        Self {
            omega_min_thz: 0.1,
            omega_max_thz: 4.0,
            rel_tol: 1e-4,
            abs_tol: 0.0,
            q_par_max_ratio: 5.0,
            max_subdivisions: 400,
            omega_panels: 8,
            obscuring: ObscuringKey::Conjugate,
            response: ResponseKey::Auto,
            max_nonconverged_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WhichKey {
    Bulk,
    Scattering,
    #[default]
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowKey {
    None,
    #[default]
    Taper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// File name prefix inside the output directory.
    pub prefix: String,
    /// Divide by the bulk signal at the base point.
    pub normalize: bool,
    pub which: WhichKey,
    pub window: WindowKey,
    pub taper_fraction: f64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            prefix: "run".into(),
            normalize: false,
            which: WhichKey::Full,
            window: WindowKey::Taper,
            taper_fraction: 0.1,
        }
    }
}

impl RunConfig {
    /// Parses a config and applies `key=value` overrides.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc: toml::Value = toml::from_str(text).map_err(|e| CliError::Config(format!("parse error: {e}")))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig = doc.try_into().map_err(|e| CliError::Config(format!("{e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text, overrides)?, base))
    }

    /// Geometries to run; an empty list means bulk only.
    pub fn geometries(&self) -> Vec<GeometrySection> {
        if self.geometry.is_empty() {
            vec![GeometrySection::default()]
        } else {
            self.geometry.clone()
        }
    }

    fn check(&self) -> Result<(), CliError> {
        let p = &self.pulse;
        for (name, v) in [
            ("pulse.waist_um", p.waist_um),
            ("pulse.center_frequency_thz", p.center_frequency_thz),
            ("pulse.duration_fs", p.duration_fs),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.crystal.length_mm > 0.0) {
            return Err(CliError::Config(format!(
                "crystal.length_mm must be positive, got {}",
                self.crystal.length_mm
            )));
        }
        if self.crystal.index_table.is_none() && self.crystal.n_thz.is_none() {
            return Err(CliError::Config("crystal needs index_table or n_thz".into()));
        }
        let s = &self.scan;
        if s.axis != AxisKey::None && s.points < 1 {
            return Err(CliError::Config("scan.points must be at least 1".into()));
        }
        let q = &self.quadrature;
        if !(0.0..=1.0).contains(&q.max_nonconverged_fraction) {
            return Err(CliError::Config("quadrature.max_nonconverged_fraction must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.output.taper_fraction) {
            return Err(CliError::Config("output.taper_fraction must lie in [0, 1]".into()));
        }
        for g in self.geometries() {
            if matches!(g.kind, GeometryKind::PlateX | GeometryKind::PlateY) && !(g.d_um >= 0.0) {
                return Err(CliError::Config(format!("geometry.d_um must be non-negative, got {}", g.d_um)));
            }
            if g.reflector == ReflectorKind::Fresnel && g.outer_index_table.is_none() {
                return Err(CliError::Config("fresnel reflector needs outer_index_table".into()));
            }
        }
        Ok(())
    }

    pub fn pulse_pair(&self) -> Result<PulsePair, CliError> {
        let p = &self.pulse;
        let pair = PulsePair::new(p.waist_um / 1e6, thz_to_rad_per_s(p.center_frequency_thz), p.duration_fs / 1e15)?
            .with_delay(p.delta_t_fs / 1e15)
            .with_offset(p.delta_x_um / 1e6, p.delta_y_um / 1e6)
            .with_direction(p.direction.into());
        Ok(pair)
    }

    pub fn crystal_model(&self, base: &Path) -> Result<CrystalModel, CliError> {
        let c = &self.crystal;
        let table = match (&c.index_table, c.n_thz) {
            (Some(path), _) => ingest_index_table(&base.join(path))?,
            (None, Some(n)) => IndexTable::constant(Complex64::new(n, 0.0)),
            (None, None) => return Err(CliError::Config("crystal needs index_table or n_thz".into())),
        };
        Ok(CrystalModel::new(c.length_mm / 1e3, chi2_from_r41(c.n_ir, c.r41_c_per_v2), c.n_ir, c.n_group, table)?)
    }

    pub fn quadrature_config(&self) -> QuadratureConfig {
        let q = &self.quadrature;
        QuadratureConfig {
            omega_min: thz_to_rad_per_s(q.omega_min_thz),
            omega_max: thz_to_rad_per_s(q.omega_max_thz),
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            q_par_max_ratio: q.q_par_max_ratio,
            max_subdivisions: q.max_subdivisions,
            omega_panels: q.omega_panels,
            obscuring: match q.obscuring {
                ObscuringKey::Conjugate => ObscuringConvention::Conjugate,
                ObscuringKey::Verbatim => ObscuringConvention::Verbatim,
            },
            response: match q.response {
                ResponseKey::Auto => ResponseChoice::Auto,
                ResponseKey::PhaseMatched => ResponseChoice::PhaseMatched,
                ResponseKey::Full => ResponseChoice::Full,
            },
        }
    }

    pub fn which(&self) -> Which {
        match self.output.which {
            WhichKey::Bulk => Which::Bulk,
            WhichKey::Scattering => Which::Scattering,
            WhichKey::Full => Which::Full,
        }
    }

    pub fn window(&self) -> Window {
        match self.output.window {
            WindowKey::None => Window::None,
            WindowKey::Taper => Window::CosineTaper(self.output.taper_fraction),
        }
    }

    /// Scan grid in SI units.
    pub fn grid_si(&self) -> Vec<f64> {
        self.scan.grid().into_iter().map(|v| self.scan.axis.to_si(v)).collect()
    }
}

impl GeometrySection {
    pub fn build(&self, base: &Path, direction: Direction) -> Result<Geometry, CliError> {
        let reflector = match self.reflector {
            ReflectorKind::Perfect => ReflectorModel::Perfect,
            ReflectorKind::Coated => ReflectorModel::Coated { rho: self.rho },
            ReflectorKind::Fresnel => {
                let path = self
                    .outer_index_table
                    .as_ref()
                    .ok_or_else(|| CliError::Config("fresnel reflector needs outer_index_table".into()))?;
                ReflectorModel::Fresnel {
                    outer_index: ingest_index_table(&base.join(path))?,
                    form: self.fresnel_form.into(),
                }
            }
            ReflectorKind::DrudeLorentz => {
                let d = &self.drude;
                let params = DrudeLorentzParams::new(
                    d.eps_inf,
                    thz_to_rad_per_s(d.omega_p_thz),
                    thz_to_rad_per_s(d.omega_c_thz),
                    thz_to_rad_per_s(d.gamma_thz),
                )?
                .with_sign(match d.sign {
                    SignKey::Passive => OscillatorSign::Passive,
                    SignKey::Literal => OscillatorSign::Literal,
                });
                ReflectorModel::DrudeLorentz { params, form: self.fresnel_form.into() }
            }
        };
        let d = self.d_um / 1e6;
        let g = match self.kind {
            GeometryKind::Bulk => Geometry::Bulk,
            GeometryKind::PlateX => Geometry::PlateX { d, reflector },
            GeometryKind::PlateY => Geometry::PlateY { d, reflector },
            GeometryKind::Cavity => Geometry::Cavity {
                reflector,
                second_pulse: direction,
                absorption: match self.absorption {
                    AbsorptionKey::Lossless => Absorption::Lossless,
                    AbsorptionKey::Absorptive => Absorption::Absorptive,
                },
            },
        };
        g.validate()?;
        Ok(g)
    }
}

impl From<FresnelFormKey> for FresnelForm {
    fn from(f: FresnelFormKey) -> Self {
        match f {
            FresnelFormKey::Verbatim => FresnelForm::Verbatim,
            FresnelFormKey::Textbook => FresnelForm::Textbook,
        }
    }
}

/// Applies `a.b.c=value`. Array elements are addressed by index, e.g.
/// `geometry.0.d_um=240`. Values are parsed as TOML, falling back to a
/// plain string.
fn apply_override(doc: &mut toml::Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not of the form key=value")))?;
    let value: toml::Value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let keys: Vec<&str> = path.trim().split('.').collect();
    let mut node = doc;
    for (i, key) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        node = match node {
            toml::Value::Table(t) => {
                if last {
                    t.insert((*key).to_string(), value);
                    return Ok(());
                }
                t.entry((*key).to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()))
            }
            toml::Value::Array(a) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| CliError::Config(format!("override `{path}`: `{key}` is not an array index")))?;
                let len = a.len();
                let slot = a
                    .get_mut(idx)
                    .ok_or_else(|| CliError::Config(format!("override `{path}`: index {idx} out of range ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(CliError::Config(format!("override `{path}`: `{key}` is not a section"))),
        };
    }
    Err(CliError::Config(format!("override `{spec}` has an empty key")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty_document() {
        let c = RunConfig::parse("", &[]).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.geometries().len(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::parse("[pulse]\nwaist = 80.0\n", &[]).unwrap_err();
        assert!(matches!(e, CliError::Config(_)));
        assert!(RunConfig::parse("[nonsense]\n", &[]).is_err());
    }

    #[test]
    fn negative_waist_is_a_config_error() {
        let e = RunConfig::parse("[pulse]\nwaist_um = -1.0\n", &[]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn overrides_reach_nested_and_array_keys() {
        let text = "[[geometry]]\nkind = \"plate_x\"\nd_um = 80.0\n";
        let c = RunConfig::parse(
            text,
            &["geometry.0.d_um=240".into(), "pulse.direction=counter".into(), "output.prefix=\"x\"".into()],
        )
        .unwrap();
        assert_eq!(c.geometry[0].d_um, 240.0);
        assert_eq!(c.pulse.direction, DirectionKey::Counter);
        assert_eq!(c.output.prefix, "x");
        assert!(RunConfig::parse(text, &["geometry.3.d_um=1".into()]).is_err());
        assert!(RunConfig::parse(text, &["no_equals".into()]).is_err());
    }

    #[test]
    fn resolved_json_round_trips() {
        let text = "[crystal]\nlength_mm = 1.0\n[[geometry]]\nkind = \"cavity\"\nreflector = \"coated\"\n[scan]\naxis = \"delta_t\"\nstop = 1000.0\npoints = 11\n";
        let c = RunConfig::parse(text, &[]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
        let toml_text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&toml_text, &[]).unwrap(), c);
    }

    #[test]
    fn grid_ends_exactly_on_stop() {
        let s = ScanSection { axis: AxisKey::DeltaT, start: 0.0, stop: 0.3, points: 4 };
        let g = s.grid();
        assert_eq!(g.len(), 4);
        assert_eq!(g[3], 0.3);
    }

    #[test]
    fn units_convert_at_the_boundary() {
        let c = RunConfig::parse("[pulse]\nwaist_um = 40.0\nduration_fs = 100.0\n", &[]).unwrap();
        let p = c.pulse_pair().unwrap();
        assert_eq!(p.waist, 40e-6);
        assert_eq!(p.duration, 100e-15);
        let q = c.quadrature_config();
        assert_eq!(q.omega_max, thz_to_rad_per_s(4.0));
    }
}

//! Subcommands.

use std::path::{Path, PathBuf};

use eosvac_core::constants::{rad_per_s_to_thz, thz_to_rad_per_s};
use eosvac_core::geometry::{kernel_value, Geometry};
use eosvac_core::optical_response::{
    photon_normalization, reflection_coefficients, response_squared, spectral_autocorrelation, Normal, ReflectorModel,
    ResponseVariant, WaveVector,
};
use eosvac_core::signal::{delay_symmetry_check, Which};
use eosvac_core::spectrum::{cosine_spectrum, DelayTrace};
use log::{info, warn};
use serde::Serialize;

use crate::config::AxisKey;
use crate::error::CliError;
use crate::output::{
    geometry_stem, records_csv, sidecar_json, spectrum_csv, write_all, GeometryStats, OutputRecord, Sidecar,
};
use crate::runner::{evaluate_groups, with_threads, GeometryRun, Group, Session};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Scan,
    Spectrum,
    Kernels,
    Validate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Scan => "scan",
            Command::Spectrum => "spectrum",
            Command::Kernels => "kernels",
            Command::Validate => "validate",
        }
    }
}

/// Runs `command` and returns the files written.
pub fn run(
    session: &Session,
    command: Command,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Eval | Command::Scan | Command::Spectrum => {
            with_threads(threads, || records(session, command, out_dir))?
        }
        Command::Kernels => kernels(session, out_dir),
        Command::Validate => {
            let checks = validate(session)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if failed > 0 {
                return Err(CliError::Other(format!("{failed} of {} checks failed", checks.len())));
            }
            Ok(Vec::new())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct SpectrumStats {
    file: String,
    decay_warning: bool,
    trace_at_zero: f64,
    integral: f64,
    peak_thz: f64,
    bin_thz: f64,
}

fn records(session: &Session, command: Command, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &session.config;
    let axis = if command == Command::Eval { AxisKey::None } else { cfg.scan.axis };
    if command == Command::Spectrum && (axis != AxisKey::DeltaT || cfg.scan.start != 0.0) {
        return Err(CliError::Config("spectrum needs a delta_t scan starting at 0".into()));
    }
    let runs = if command == Command::Eval { session.eval()? } else { session.scan()? };
    let norm = if cfg.output.normalize { Some(session.bulk_reference()?) } else { None };
    let scale = norm.unwrap_or(1.0);
    let prefix = &cfg.output.prefix;
    let mut files = Vec::new();
    let mut stats = Vec::new();
    let mut spectra = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let stem = geometry_stem(prefix, i, runs.len(), run);
        let recs: Vec<_> =
            run.axis_values.iter().zip(&run.points).map(|(&a, c)| OutputRecord::new(a, c, scale)).collect();
        let name = format!("{stem}.csv");
        files.push((name.clone(), records_csv(&recs)));
        stats.push(GeometryStats::new(name, run));
        if command == Command::Spectrum {
            let (name, body, s) = spectrum_of(session, run, &recs, &stem)?;
            files.push((name, body));
            spectra.push(s);
        }
    }
    let sidecar = Sidecar {
        version: env!("CARGO_PKG_VERSION"),
        command: command.as_str(),
        axis: axis.scan_axis().map(|a| a.as_str()).unwrap_or("none"),
        axis_unit: axis.unit(),
        normalization: norm,
        config: cfg,
        geometries: stats,
        extra: spectra,
    };
    files.push((format!("{prefix}.json"), sidecar_json(&sidecar)?));
    let written = write_all(out_dir, &files)?;
    for p in &written {
        info!("wrote {}", p.display());
    }
    check_convergence(&runs, cfg.quadrature.max_nonconverged_fraction)?;
    Ok(written)
}

fn spectrum_of(
    session: &Session,
    run: &GeometryRun,
    recs: &[OutputRecord],
    stem: &str,
) -> Result<(String, String, SpectrumStats), CliError> {
    let values: Vec<f64> = recs
        .iter()
        .map(|r| match session.config.which() {
            Which::Bulk => r.g0,
            Which::Scattering => r.g1,
            Which::Full => r.g_full,
        })
        .collect();
    let trace = DelayTrace::new(session.config.grid_si(), values, run.geometry.name())?;
    let spec = cosine_spectrum(&trace, session.config.window())?;
    if spec.decay_warning {
        warn!("{stem}: trace has not decayed at the end of the scan; spectrum is windowless");
    }
    let freq: Vec<f64> = spec.omega.iter().map(|&w| rad_per_s_to_thz(w)).collect();
    let name = format!("{stem}_spectrum.csv");
    let stats = SpectrumStats {
        file: name.clone(),
        decay_warning: spec.decay_warning,
        trace_at_zero: trace.values[0],
        integral: spec.integral(),
        peak_thz: rad_per_s_to_thz(spec.peak_omega()),
        bin_thz: rad_per_s_to_thz(spec.bin()),
    };
    Ok((name, spectrum_csv(&freq, &spec.density), stats))
}

fn check_convergence(runs: &[GeometryRun], max_fraction: f64) -> Result<(), CliError> {
    let total: usize = runs.iter().map(|r| r.points.len()).sum();
    let failed: usize = runs.iter().map(|r| r.non_converged()).sum();
    if failed > 0 {
        warn!("{failed} of {total} points did not converge");
    }
    if failed as f64 > max_fraction * total as f64 {
        return Err(CliError::NotConverged { failed, total });
    }
    Ok(())
}

/// `q∥/Re q` ratios dumped by `kernels`.
pub const KERNEL_RATIOS: [f64; 6] = [0.0, 0.5, 0.9, 1.1, 1.5, 2.0];

const KERNEL_HEADER: &str =
    "freq_thz,q_par_ratio,p0_re,p0_im,p1_re,p1_im,o0_re,o0_im,o1_re,o1_im,rp_re,rp_im,rs_re,rs_im,resp_re,resp_im,f";

/// Dumps `p`, `O`, `R` and the response on an `(Ω, q∥)` grid at `φ = 0`.
fn kernels(session: &Session, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &session.config;
    let n = if cfg.scan.points >= 2 { cfg.scan.points } else { 41 };
    let (lo, hi) = (cfg.quadrature.omega_min_thz, cfg.quadrature.omega_max_thz);
    let sections = cfg.geometries();
    let mut files = Vec::new();
    for (i, section) in sections.iter().enumerate() {
        let geometry = session.geometry(section)?;
        let mut s = String::from(KERNEL_HEADER);
        s.push('\n');
        for k in 0..n {
            let f_thz = if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
            let omega = thz_to_rad_per_s(f_thz);
            let index = session.crystal.index(omega);
            for &ratio in &KERNEL_RATIOS {
                let q_par = ratio * index.re * omega / eosvac_core::constants::SPEED_OF_LIGHT;
                let wv = WaveVector::new(omega, index, q_par, 0.0, geometry.frame());
                let kv = kernel_value(&geometry, &wv, &session.pulse, &session.crystal, session.quadrature.obscuring);
                let (rp, rs) = match geometry.reflector() {
                    Some(r) => reflection_coefficients(r, index, omega, q_par),
                    None => (0.0.into(), 0.0.into()),
                };
                let resp = response_squared(&session.pulse, &session.crystal, &wv, ResponseVariant::PhaseMatched);
                let f = spectral_autocorrelation(session.pulse.duration, omega);
                let row = [
                    f_thz, ratio, kv.p0.re, kv.p0.im, kv.p1.re, kv.p1.im, kv.o0.re, kv.o0.im, kv.o1.re, kv.o1.im,
                    rp.re, rp.im, rs.re, rs.im, resp.re, resp.im, f,
                ];
                let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
        }
        let stem = if sections.len() == 1 {
            format!("{}_kernels", cfg.output.prefix)
        } else {
            format!("{}_{i}_{}_kernels", cfg.output.prefix, geometry.name())
        };
        files.push((format!("{stem}.csv"), s));
    }
    write_all(out_dir, &files)
}

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

/// Invariant suite on the configured inputs.
pub fn validate(session: &Session) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let rel = session.quadrature.rel_tol;
    let mut centered = session.pulse.with_delay(0.0).with_offset(0.0, 0.0);
    centered.direction = session.pulse.direction;

    for section in session.config.geometries() {
        let geometry = session.geometry(&section)?;
        let name = geometry.name();
        let mut req = session.request(geometry.clone(), Which::Full);
        req.pulse = centered;
        let g = evaluate_groups(&[Group { delays: vec![0.0], request: req.clone() }])?[0][0];
        let im = g.imag_residue.abs();
        checks.push(Check::new(
            format!("realness[{name}]"),
            im <= rel * g.g0.abs(),
            format!("|Im| = {im:e}, g0 = {:e}", g.g0),
        ));
        let dt = 1.5 * session.pulse.duration;
        let even = delay_symmetry_check(&req, dt)?;
        checks.push(Check::new(format!("even_delay[{name}]"), even, format!("g(±{:e} s)", dt)));
        if let Some(r) = geometry.reflector() {
            let worst = passivity_margin(session, r);
            checks.push(Check::new(format!("passivity[{name}]"), worst <= 1.0 + 1e-12, format!("max |R| = {worst}")));
        }
    }

    let far = photon_normalization(&centered, 1e3 * centered.waist, Normal::X);
    let zero = photon_normalization(&centered, 0.0, Normal::Y);
    checks.push(Check::new(
        "photon_normalization",
        (far - 1.0).abs() < 1e-12 && (zero - 0.5).abs() < 1e-12,
        format!("N(∞) = {far}, N(0) = {zero}"),
    ));

    let d = 32.0 * centered.waist;
    let groups: Vec<Group> = [
        Geometry::Bulk,
        Geometry::PlateX { d, reflector: ReflectorModel::Perfect },
        Geometry::PlateY { d, reflector: ReflectorModel::Perfect },
    ]
    .into_iter()
    .map(|geometry| {
        let mut request = session.request(geometry, Which::Full);
        request.pulse = centered.with_direction(eosvac_core::dispersion::Direction::Forward);
        Group { delays: vec![0.0], request }
    })
    .collect();
    let r = evaluate_groups(&groups)?;
    let (b, x, y) = (r[0][0].full(), r[1][0].full(), r[2][0].full());
    let tol = 10.0 * rel * b.abs();
    checks.push(Check::new(
        "frame_consistency",
        (x - b).abs() <= tol && (y - b).abs() <= tol,
        format!("bulk {b:e}, plate_x {x:e}, plate_y {y:e} at d = 32w"),
    ));

    let one = with_threads(Some(1), || evaluate_groups(&groups[..1]))??;
    let two = with_threads(Some(2), || evaluate_groups(&groups[..1]))??;
    let same = one[0][0].g0.to_bits() == two[0][0].g0.to_bits();
    checks.push(Check::new("determinism", same, format!("{:?} vs {:?}", one[0][0].g0, two[0][0].g0)));
    Ok(checks)
}

/// Largest `|R_p|`, `|R_s|` for waves propagating in the crystal (taken
/// lossless) over the quadrature window.
fn passivity_margin(session: &Session, reflector: &ReflectorModel) -> f64 {
    let (lo, hi) = (session.quadrature.omega_min, session.quadrature.omega_max);
    let mut worst: f64 = 0.0;
    for k in 0..=60 {
        let omega = lo + (hi - lo) * k as f64 / 60.0;
        let n = session.crystal.index(omega).re;
        let index = eosvac_core::Complex64::new(n, 0.0);
        for j in 0..=30 {
            let q_par = 0.033 * j as f64 * n * omega / eosvac_core::constants::SPEED_OF_LIGHT;
            let (rp, rs) = reflection_coefficients(reflector, index, omega, q_par);
            worst = worst.max(rp.norm()).max(rs.norm());
        }
    }
    worst
}

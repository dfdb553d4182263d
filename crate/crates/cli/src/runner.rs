//! Parallel evaluation of scans.
//!
//! Work is split into `(group, panel)` jobs, where a group is one request
//! together with the delays it shares inner integrals for. Jobs run on the
//! rayon pool and are reduced in a fixed order, so results do not depend on
//! the number of threads.

use std::path::{Path, PathBuf};

use eosvac_core::dispersion::{CrystalModel, Direction, PulsePair};
use eosvac_core::geometry::Geometry;
use eosvac_core::signal::{
    combine, integrate_panel, panels, request_at, tail_diagnostic, validate_grid, Components, QuadratureConfig,
    ScanAxis, SignalRequest, Which,
};
use log::{debug, info};
use rayon::prelude::*;

use crate::config::{AxisKey, GeometrySection, RunConfig};
use crate::error::CliError;

/// A request and the delays evaluated for it.
#[derive(Debug, Clone)]
pub struct Group {
    pub request: SignalRequest,
    pub delays: Vec<f64>,
}

/// Evaluates every group, in parallel over groups and `Ω` panels.
pub fn evaluate_groups(groups: &[Group]) -> Result<Vec<Vec<Components>>, CliError> {
    for g in groups {
        g.request.validate()?;
    }
    let jobs: Vec<(usize, usize)> =
        groups.iter().enumerate().flat_map(|(i, g)| (0..panels(&g.request)).map(move |p| (i, p))).collect();
    let parts = jobs
        .par_iter()
        .map(|&(i, p)| integrate_panel(&groups[i].request, &groups[i].delays, p))
        .collect::<Result<Vec<_>, _>>()?;
    let tails: Vec<_> = groups.par_iter().map(|g| tail_diagnostic(&g.request)).collect();
    let mut out = Vec::with_capacity(groups.len());
    let mut at = 0;
    for (g, tail) in groups.iter().zip(tails) {
        let n = panels(&g.request);
        out.push(combine(&g.delays, &parts[at..at + n], tail));
        at += n;
    }
    Ok(out)
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Other(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Resolved physical inputs of a run.
#[derive(Debug, Clone)]
pub struct Session {
    pub config: RunConfig,
    pub base_dir: PathBuf,
    pub pulse: PulsePair,
    pub crystal: CrystalModel,
    pub quadrature: QuadratureConfig,
}

/// One geometry evaluated along the scan axis.
#[derive(Debug, Clone)]
pub struct GeometryRun {
    pub section: GeometrySection,
    pub geometry: Geometry,
    /// Axis values in config units.
    pub axis_values: Vec<f64>,
    pub points: Vec<Components>,
}

impl GeometryRun {
    pub fn evaluations(&self) -> usize {
        // Delay scans share one evaluation count across all points.
        if self.points.len() > 1 && self.points.iter().all(|p| p.n_evaluations == self.points[0].n_evaluations) {
            self.points[0].n_evaluations
        } else {
            self.points.iter().map(|p| p.n_evaluations).sum()
        }
    }

    pub fn non_converged(&self) -> usize {
        self.points.iter().filter(|p| !p.converged).count()
    }
}

impl Session {
    pub fn new(config: RunConfig, base_dir: &Path) -> Result<Self, CliError> {
        let pulse = config.pulse_pair()?;
        let crystal = config.crystal_model(base_dir)?;
        let quadrature = config.quadrature_config();
        quadrature.validate()?;
        Ok(Self { config, base_dir: base_dir.to_path_buf(), pulse, crystal, quadrature })
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let (config, base) = RunConfig::load(path, overrides)?;
        Self::new(config, &base)
    }

    pub fn request(&self, geometry: Geometry, which: Which) -> SignalRequest {
        SignalRequest { pulse: self.pulse, crystal: self.crystal.clone(), geometry, which, quadrature: self.quadrature }
    }

    pub fn geometry(&self, section: &GeometrySection) -> Result<Geometry, CliError> {
        section.build(&self.base_dir, self.pulse.direction)
    }

    /// Co-propagating bulk `g⁽⁰⁾` at zero delay and offset, the unit of
    /// normalized output.
    pub fn bulk_reference(&self) -> Result<f64, CliError> {
        let mut req = self.request(Geometry::Bulk, Which::Bulk);
        req.pulse = req.pulse.with_delay(0.0).with_offset(0.0, 0.0).with_direction(Direction::Forward);
        let g = evaluate_groups(&[Group { delays: vec![0.0], request: req }])?;
        let g0 = g[0][0].g0;
        info!("bulk reference g0/C = {g0:?}");
        if !(g0.is_finite() && g0 != 0.0) {
            return Err(CliError::Other(format!("bulk reference is not usable: {g0}")));
        }
        Ok(g0)
    }

    /// Evaluates every configured geometry at the base point only.
    pub fn eval(&self) -> Result<Vec<GeometryRun>, CliError> {
        self.run_grid(AxisKey::None, &[0.0], &[0.0])
    }

    /// Evaluates every configured geometry along the scan axis.
    pub fn scan(&self) -> Result<Vec<GeometryRun>, CliError> {
        let axis = self.config.scan.axis;
        if axis == AxisKey::None {
            return self.eval();
        }
        self.run_grid(axis, &self.config.scan.grid(), &self.config.grid_si())
    }

    fn run_grid(&self, axis: AxisKey, values: &[f64], grid: &[f64]) -> Result<Vec<GeometryRun>, CliError> {
        let sections = self.config.geometries();
        let mut layouts = Vec::new();
        let mut groups = Vec::new();
        for section in &sections {
            let geometry = self.geometry(section)?;
            let base = self.request(geometry.clone(), Which::Full);
            base.validate()?;
            let start = groups.len();
            match axis.scan_axis() {
                None => groups.push(Group { delays: vec![base.pulse.delta_t], request: base }),
                Some(ScanAxis::DelayT) => {
                    validate_grid(&base, ScanAxis::DelayT, grid)?;
                    groups.push(Group { delays: grid.to_vec(), request: base });
                }
                Some(a) => {
                    validate_grid(&base, a, grid)?;
                    for &v in grid {
                        let r = request_at(&base, a, v);
                        groups.push(Group { delays: vec![r.pulse.delta_t], request: r });
                    }
                }
            }
            layouts.push((section.clone(), geometry, start..groups.len()));
        }
        debug!("{} groups over {} geometries", groups.len(), sections.len());
        let results = evaluate_groups(&groups)?;
        Ok(layouts
            .into_iter()
            .map(|(section, geometry, range)| GeometryRun {
                section,
                geometry,
                axis_values: values.to_vec(),
                points: results[range].iter().flatten().copied().collect(),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(extra: &str) -> Session {
        let text = format!("[crystal]\nlength_mm = 0.1\n[quadrature]\nrel_tol = 1e-3\nomega_panels = 3\n{extra}");
        Session::new(RunConfig::parse(&text, &[]).unwrap(), Path::new(".")).unwrap()
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let s = session("[scan]\naxis = \"delta_t\"\nstop = 600.0\npoints = 4\n");
        let one = with_threads(Some(1), || s.scan()).unwrap().unwrap();
        let three = with_threads(Some(3), || s.scan()).unwrap().unwrap();
        let bits = |r: &[GeometryRun]| -> Vec<(u64, u64)> {
            r[0].points.iter().map(|p| (p.g0.to_bits(), p.g1.to_bits())).collect()
        };
        assert_eq!(bits(&one), bits(&three));
    }

    #[test]
    fn scan_matches_single_evaluations() {
        let s = session("[scan]\naxis = \"delta_x\"\nstart = 0.0\nstop = 40.0\npoints = 2\n");
        let runs = s.scan().unwrap();
        let req = s.request(Geometry::Bulk, Which::Full);
        let direct =
            eosvac_core::signal::eval_components(&request_at(&req, ScanAxis::DeltaX, s.config.grid_si()[1])).unwrap();
        assert_eq!(runs[0].points[1].g0.to_bits(), direct.g0.to_bits());
    }

    #[test]
    fn bulk_reference_is_positive() {
        assert!(session("").bulk_reference().unwrap() > 0.0);
    }
}

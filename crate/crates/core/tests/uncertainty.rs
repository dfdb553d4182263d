use eosvac_core::dispersion::{CrystalModel, Direction, PulsePair};
use eosvac_core::geometry::{Absorption, Geometry};
use eosvac_core::optical_response::ReflectorModel;
use eosvac_core::signal::{QuadratureConfig, SignalRequest, Which};
use eosvac_core::spectrum::uncertainty_demo;

fn coated_cavity() -> SignalRequest {
    SignalRequest {
        pulse: PulsePair::reference(),
        crystal: CrystalModel::znte_constant_index(0.1e-3, 3.2),
        geometry: Geometry::Cavity {
            reflector: ReflectorModel::Coated { rho: 0.95 },
            second_pulse: Direction::Forward,
            absorption: Absorption::Lossless,
        },
        which: Which::Full,
        quadrature: QuadratureConfig { rel_tol: 1e-3, ..QuadratureConfig::default() },
    }
}

#[test]
fn first_mode_contrast_grows_with_trace_length() {
    let req = coated_cavity();
    let transit = 0.5 * req.crystal.round_trip_time();
    let units = [1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 12.0, 16.0, 20.0];
    let t_max: Vec<f64> = units.iter().map(|u| u * transit).collect();
    let rows = uncertainty_demo(&req, &t_max, transit / 48.0).unwrap();
    let c: Vec<f64> = rows.iter().map(|r| r.contrast).collect();
    println!("{c:?}");
    // Before the first reflection returns nothing is resolved.
    assert!(c[0] < 0.2, "{}", c[0]);
    assert!(c.windows(2).all(|w| w[1] >= w[0]), "{c:?}");
    assert!(c[6] > c[3]);
    assert_eq!(c[6].to_bits(), c[7].to_bits());
}

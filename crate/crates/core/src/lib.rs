//! Electro-optic sampling of vacuum fluctuations next to plates and inside
//! cavities.
//!
//! The crate evaluates the two-pulse correlation signal `g(δt, δr∥)` of an
//! electro-optic sampling experiment, split into its bulk part `g⁽⁰⁾` and the
//! part `g⁽¹⁾` produced by reflecting boundaries. Everything here is pure
//! computation on immutable inputs and builds without `std`; file formats,
//! the command line and thread pools live in the `eosvac` crate.
//!
//! Module map:
//!
//! * [`dispersion`]: crystal THz index tables, Drude–Lorentz plates, `χ⁽²⁾`.
//! * [`optical_response`]: vacuum strength, Fresnel coefficients, the
//!   response function and photon-count normalization.
//! * [`geometry`]: propagation and obscuring factors per geometry.
//! * [`signal`]: the nested adaptive integration of the signal.
//! * [`spectrum`]: delay traces to spectra.
#![no_std]
// NaN inputs must fail the `!(x > 0.0)` guards; the indexed loops walk parallel arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod constants;
pub mod dispersion;
mod error;
pub mod geometry;
pub mod optical_response;
pub mod quadrature;
pub mod signal;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

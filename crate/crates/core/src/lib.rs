//! Riesz potentials, the centered Hardy–Littlewood maximal operator, Morrey
//! constants and the spectral fractional Laplacian on uniform grids in
//! dimensions one to three, together with a harness that evaluates both sides
//! of the weighted estimates relating them and reports empirical constants.
//!
//! The crate is `no_std` and only needs an allocator. File formats, run
//! configuration and the command-line front end live in `rieszkit-cli`.

#![no_std]
#![forbid(unsafe_code)]
// When std is linked anywhere in the graph its inherent float methods shadow
// `num_traits::Float`, leaving the import unused.
#![allow(unused_imports)]

extern crate alloc;

mod error;
pub mod fft;
pub mod format;
pub mod grid;
pub mod maximal;
pub mod morrey;
pub mod oracle;
pub mod params;
pub mod quad;
pub mod riesz;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{ball_integral, lp_norm, Ball, Field, GridSpec, Point};
pub use maximal::{a1_constant, a1_lift, maximal, maximal_indicator_majorant, RadiusLadder};
pub use morrey::{morrey_constant, power_weight, random_weight, MorreyConvention, MorreyReport};
pub use params::{choose_gamma, validate_params, ExponentParams};
pub use riesz::{adjoint_defect, riesz_at_point_radial, riesz_direct, riesz_fft, RieszKernelTable, RieszOperator};
pub use spectral::{frac_laplacian, gradient, riesz_inversion_constant, SpectralBox};

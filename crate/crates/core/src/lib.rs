//! Radiation fields, the translation representation and scattering for
//! warped asymptotically hyperbolic models g = (dx² + c(x)²|dy|²)/x² on
//! (0, X_MAX] × Tⁿ with a Dirichlet cap at x = X_MAX.
//!
//! Every boundary Fourier mode reduces the wave equation to a characteristic
//! system ∂ₓ'∂ₜ'W + q(x′t′)W = 0 in x = x′t′, s = 2 log t′, which is marched
//! by [`goursat`]. Fields, their inverses and the scattering operator are built
//! on top of that march in [`fields`] and [`scattering`].

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(any(test, feature = "parallel"), allow(unused_imports))]
extern crate alloc;

pub mod energy;
pub mod error;
pub mod fields;
pub mod goursat;
pub mod grid;
pub mod h3;
pub mod inverse;
pub mod math;
pub mod metric;
mod par;
pub mod radial;
pub mod scattering;
pub mod spectrum;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use fields::{FieldKind, RadiationField};
pub use goursat::{ModeField, ModeProblem, Parity};
pub use grid::{Bump, CauchyData, DataSpec, GridSpec};
pub use math::C64;
pub use metric::{Cutoff, Mode, Profile, WarpedMetric};

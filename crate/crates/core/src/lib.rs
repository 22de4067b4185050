//! Numerical core for variable-speed mixing subsolutions of the unstable
//! Muskat problem.
//!
//! The crate is `no_std` and needs only `alloc`. Floating-point intrinsics go
//! through `libm` via `num-traits`.
//!
//! Layout:
//! - [`profiles`]: closed-form profile functions and weighted Hölder norms.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration with principal values.
//! - [`kernels`]: kernel algebra, speed ladder and configuration.
//! - [`operators`]: weighted Hilbert transforms, normal and plane velocities,
//!   expansion residuals.
//! - [`pseudo_interface`]: the corrected mid-curve, its ODE and the density.
//! - [`subsolution`]: potentials, fields and the admissibility certificate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod interp;
pub mod jet;
pub mod kernels;
pub mod operators;
pub mod profiles;
pub mod pseudo_interface;
pub mod quadrature;
pub mod subsolution;

pub use error::{Error, Result};
pub use kernels::{CbarConvention, MixingConfig, MixingParams, SpeedMode};
pub use profiles::{make_profile, ProfileFunction, ProfileSpec, SamplingGrid};
pub use quadrature::{QuadResult, QuadSpec};

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
///
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: &[T], f: F) -> alloc::vec::Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: &[T], f: F) -> alloc::vec::Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

//! Semiclassical radiation spectra of a point electron in monochromatic
//! plane-wave fields.
//!
//! The crate evaluates the energy `W(Δφ)` and the energy rate `w(Δφ)` that an
//! electron radiates while its current is observed through a finite phase
//! window `Δφ`, for circularly and linearly polarized waves. Spectra are built
//! from Bessel-harmonic expansions of the windowed current and are checked
//! against a direct oscillatory quadrature of that current ([`oracle`]).
//!
//! Units: `m = c = e0 = ω_w = 1`. Energies are in `e0²ω_w/c`, rates in
//! `e0²ω_w²/c`, times in `1/ω_w` and lengths in `c/ω_w`.
//!
//! The crate is `no_std` with `alloc` when built without the `std` feature.
//! The `parallel` feature (default) evaluates quadrature nodes on the rayon
//! pool of the caller; results do not depend on the worker count.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod float;

pub mod error;
pub mod harmonic;
pub mod kinematics;
pub mod oracle;
pub mod parallel;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;
pub mod spectrum_circular;
pub mod spectrum_linear;

pub use error::{Error, Result};
pub use kinematics::{
    FieldConfig, FourMomentum, Handedness, ParticleParams, PhaseWindow, Polarization,
    QuasiMomentum,
};
pub use quadrature::{GridConfig, IntegrationResult};
pub use spectrum::{EmissionPoint, SpectrumResult};

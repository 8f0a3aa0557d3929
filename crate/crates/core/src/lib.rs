//! Enantioselective topological frequency conversion (TFC) for microwave-driven
//! chiral molecules.
//!
//! A pair of slowly modulated, mutually incommensurate drive tones turns the
//! rotating-frame Hamiltonian of a cyclically driven three-level rotational
//! manifold into a quasiperiodic family over a two-torus of drive phases. The
//! adiabatic bands of that family carry Chern numbers whose sign is set by the
//! product of the three dipole couplings around the cycle, which flips between
//! the two enantiomers of a chiral molecule. The quantized energy-pumping rate
//! between the two tones is therefore an enantioselective observable.
//!
//! The crate is organized along the pipeline:
//!
//! - [`model`] — physical parameters, selection-rule dipole elements, drive
//!   envelopes, configuration validation
//! - [`hamiltonian`] — lab-frame RWA, rotating-frame 4×4, and effective
//!   spin-1 3×3 Hamiltonians plus the frame transformation
//! - [`topology`] — adiabatic bands over the drive torus, lattice Chern
//!   numbers, phase diagrams
//! - [`dynamics`] — adiabatic preparation ramp, long-horizon unitary
//!   propagation, band populations, pumping rates
//! - [`spectrum`] — lab-frame sideband powers and the Chern number extracted
//!   from them
//! - [`ensemble`] — enantiomeric-excess signal and shot-noise estimates
//!
//! All internal quantities are in Hartree atomic units with ħ = 1.
//!
//! Core numerics are generic over the floating-point scalar through [`Real`];
//! production entry points use the `f64` aliases exported at the crate root.

pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod hamiltonian;
pub mod linalg;
pub mod model;
pub mod spectrum;
pub mod topology;

mod error;

pub use error::TfcError;

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

/// Scalar bound for all core numerics: an IEEE float with the constants and
/// conversions the kernels need, shareable across parallel workers.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Widening to `f64` for reporting and file output.
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn as_f64(self) -> f64 {
        self
    }
}

/// Shorthand for pulling an `f64` literal into the working scalar type.
#[inline]
pub fn real<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 literal must convert to the scalar type")
}

/// Complex number over the working scalar.
pub type Cplx<R> = num_complex::Complex<R>;

// Concrete aliases for the default double-precision pipeline.
pub type SimConfig64 = model::SimConfig<f64>;
pub type BandData64 = topology::BandData<f64>;

//! Thermoacoustic tomography toolkit.
//!
//! Forward models for spherical means and acoustic pressure, closed-form
//! filtered backprojection, eigenfunction series and time-reversal
//! reconstructions, and tools for auditing data against the range
//! conditions of the spherical mean transform.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod analysis;
pub mod data;
pub mod error;
pub mod fbp;
pub mod forward;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod phantom;
pub mod scalar;
pub mod series;
pub mod special;
pub mod wavesim;

pub use data::{DataKind, TatData};
pub use error::{FormatError, Result, TatError};
pub use geometry::{DetectorGeometry, Surface, SurfaceKind};
pub use grid::{Grid, ScalarField};
pub use phantom::{PhantomSpec, Primitive, Shape, Source};
pub use scalar::Real;

/// Double-precision field.
pub type Field = ScalarField<f64>;
/// Double-precision grid.
pub type Grid64 = Grid<f64>;
/// Double-precision data set.
pub type Data = TatData<f64>;
/// Double-precision detector set.
pub type Geometry = DetectorGeometry<f64>;
/// Double-precision phantom.
pub type Phantom = PhantomSpec<f64>;
/// Single-precision field.
pub type Field32 = ScalarField<f32>;

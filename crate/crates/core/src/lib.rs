//! Exact Fourier analysis on F₂ⁿ and lower bounds for the algebra norm of
//! indicator functions.

pub mod cli;
pub mod constructions;
pub mod dyadic;
pub mod error;
pub mod explorer;
pub mod fourier;
pub mod group;
pub mod iteration;
pub mod registry;
pub mod sampling;
pub mod sets;
pub mod spectrum;
pub mod verify;

pub use dyadic::DyadicScalar;
pub use error::{Error, Result};
pub use fourier::{a_norm, fwht, inverse_fwht, FunctionTable, Spectrum};
pub use group::{DualSubspace, GroupDim};
pub use sets::PointSet;

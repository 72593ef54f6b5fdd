//! Discretizations, spectra and rigorous error bounds for the kernel
//! K(x, y) = 1/2 - {1/(xy)} on the unit square, and exact checks of the
//! Mertens-function identity it comes from.

pub mod bounds;
pub mod discretization;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod mertens;
pub mod par;
pub mod quad;
pub mod spectra;

pub use error::{Error, Result};

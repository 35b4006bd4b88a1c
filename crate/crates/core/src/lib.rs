//! Extended-precision asymptotics of the Anger-Weber function `A_nu(lambda nu)`.

pub mod error;
pub mod expansion;
pub mod kernels;
pub mod latecoeff;
pub mod numerics;
pub mod powser;
pub mod stokes;
pub mod terminant;

pub use error::{Error, Result};
pub use kernels::{Lambda, Regime};

//! Numerical toolkit for Fourier amalgam norms and the KdV-Burgers second
//! Picard iterate.
//!
//! * [`spectral`]: frequency grids, piecewise-constant and sampled spectra,
//!   interval algebra and composite Gauss–Legendre quadrature.
//! * [`norms`]: amalgam, Fourier-Lebesgue, Sobolev and modulation norms.
//! * [`kdvb`]: propagator, Duhamel/Picard iteration and the closed-form
//!   second iterate with its time-quadrature reference.
//! * [`witness`]: the `phi_N` family and the sweep showing that its norm
//!   vanishes for `s < -1` while the second iterate does not.

pub mod error;
pub mod kdvb;
pub mod norms;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};

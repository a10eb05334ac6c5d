//! Frequency-line primitives: grids, spectra, interval algebra and quadrature.

pub mod interval;
pub mod quadrature;
pub mod spectrum;

pub use interval::{Interval, IntervalSet};
pub use quadrature::{integrate_on, Quadrature, DEFAULT_DENSITY};
pub use spectrum::{
    evaluate, AsSpectrum, FrequencyGrid, Piece, PiecewiseConstSpectrum, SampledSpectrum, Spectrum, SpectrumView,
};

//! Frequency-side representations of a function's Fourier transform.

use num_complex::Complex64;

use super::interval::{Interval, IntervalSet};
use crate::error::{Error, Result};

/// Uniform grid `xi_min + k * spacing`, `k = 0..num_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    xi_min: f64,
    xi_max: f64,
    num_points: usize,
}

impl FrequencyGrid {
    pub fn new(xi_min: f64, xi_max: f64, num_points: usize) -> Result<Self> {
        if !(xi_min.is_finite() && xi_max.is_finite()) || xi_min >= xi_max {
            return Err(Error::InvalidGrid(format!(
                "need finite xi_min < xi_max, got [{xi_min}, {xi_max}]"
            )));
        }
        if num_points < 2 {
            return Err(Error::InvalidGrid(format!("num_points must be >= 2, got {num_points}")));
        }
        Ok(Self {
            xi_min,
            xi_max,
            num_points,
        })
    }

    /// Symmetric grid on `[-half_width, half_width]` with the given spacing.
    /// The point count is rounded so that zero is a grid node.
    pub fn symmetric(half_width: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        let half = (half_width / spacing).round() as usize;
        Self::new(-(half as f64) * spacing, half as f64 * spacing, 2 * half + 1)
    }

    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn spacing(&self) -> f64 {
        (self.xi_max - self.xi_min) / (self.num_points - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.xi_min + k as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(move |k| self.point(k))
    }

    pub fn contains(&self, xi: f64) -> bool {
        self.xi_min <= xi && xi <= self.xi_max
    }
}

/// One constant piece `amplitude * chi_[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub interval: Interval,
    pub amplitude: Complex64,
}

/// Compactly supported, piecewise-constant Fourier transform.
///
/// Evaluation at a point shared by two pieces returns the amplitude of the
/// piece with the larger left endpoint; outside every piece it is exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstSpectrum {
    pieces: Vec<Piece>,
    real_valued_field: bool,
}

impl PiecewiseConstSpectrum {
    /// Builds a spectrum from `(lo, hi, amplitude)` triples.
    ///
    /// Pieces must have `lo < hi` and be disjoint up to endpoints. When
    /// `real_valued_field` is set, the mirrored piece `([-hi, -lo], conj(c))`
    /// must be present for every piece.
    pub fn new(pieces: Vec<(f64, f64, Complex64)>, real_valued_field: bool) -> Result<Self> {
        let mut out = Vec::with_capacity(pieces.len());
        for (lo, hi, c) in pieces {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidSpectrum(format!(
                    "piece [{lo}, {hi}] needs finite lo < hi"
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidSpectrum(format!(
                    "piece [{lo}, {hi}] has non-finite amplitude"
                )));
            }
            out.push(Piece {
                interval: Interval::new(lo, hi).expect("checked"),
                amplitude: c,
            });
        }
        out.sort_by(|a, b| a.interval.lo().total_cmp(&b.interval.lo()));
        for w in out.windows(2) {
            if w[1].interval.lo() < w[0].interval.hi() {
                return Err(Error::InvalidSpectrum(format!(
                    "pieces {} and {} overlap",
                    w[0].interval, w[1].interval
                )));
            }
        }
        let spec = Self {
            pieces: out,
            real_valued_field,
        };
        if real_valued_field {
            for p in &spec.pieces {
                let mirrored = spec.pieces.iter().any(|m| {
                    m.interval.lo() == -p.interval.hi()
                        && m.interval.hi() == -p.interval.lo()
                        && m.amplitude == p.amplitude.conj()
                });
                if !mirrored {
                    return Err(Error::InvalidSpectrum(format!(
                        "real_valued_field requires the mirror of piece {}",
                        p.interval
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn zero() -> Self {
        Self {
            pieces: Vec::new(),
            real_valued_field: true,
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_real_valued_field(&self) -> bool {
        self.real_valued_field
    }

    pub fn support(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.pieces.iter().map(|p| p.interval))
    }

    pub fn evaluate(&self, xi: f64) -> Complex64 {
        // Pieces are sorted by left endpoint, so the last match has the larger one.
        self.pieces
            .iter()
            .rev()
            .find(|p| p.interval.contains(xi))
            .map_or(Complex64::new(0.0, 0.0), |p| p.amplitude)
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    interval: p.interval,
                    amplitude: p.amplitude * lambda,
                })
                .collect(),
            real_valued_field: self.real_valued_field && lambda.im == 0.0,
        }
    }

    /// Samples onto `grid`. At a jump the mean of the one-sided limits is
    /// stored, which keeps trapezoid sums second-order accurate.
    pub fn sample(&self, grid: &FrequencyGrid) -> SampledSpectrum {
        let h = grid.spacing();
        let values = grid
            .points()
            .map(|xi| {
                let on_edge = self
                    .pieces
                    .iter()
                    .any(|p| (xi - p.interval.lo()).abs() < 1e-9 * h || (xi - p.interval.hi()).abs() < 1e-9 * h);
                if on_edge {
                    let d = 1e-6 * h;
                    (self.evaluate(xi - d) + self.evaluate(xi + d)) * 0.5
                } else {
                    self.evaluate(xi)
                }
            })
            .collect();
        SampledSpectrum { grid: *grid, values }
    }
}

/// Complex samples of a Fourier transform on a [`FrequencyGrid`].
///
/// Between nodes the transform is the linear interpolant; outside the grid
/// it is treated as zero by the norm and convolution routines.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl SampledSpectrum {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(Error::InvalidSpectrum(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.num_points()
            )));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidSpectrum(format!("non-finite sample at index {k}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.num_points()],
        }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: FrequencyGrid, f: F) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Linear interpolation; errors outside `[xi_min, xi_max]`.
    pub fn evaluate(&self, xi: f64) -> Result<Complex64> {
        if !self.grid.contains(xi) {
            return Err(Error::Domain(format!(
                "xi = {xi} outside sampled range [{}, {}]",
                self.grid.xi_min(),
                self.grid.xi_max()
            )));
        }
        Ok(self.interpolate(xi))
    }

    /// Linear interpolation, zero outside the grid.
    pub fn interpolate(&self, xi: f64) -> Complex64 {
        let pos = (xi - self.grid.xi_min()) / self.grid.spacing();
        let last = self.grid.num_points() - 1;
        if !(pos >= 0.0 && pos <= last as f64) {
            return Complex64::new(0.0, 0.0);
        }
        let k = (pos.floor() as usize).min(last - 1);
        let frac = pos - k as f64;
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }

    /// Smallest interval of grid nodes carrying every nonzero sample.
    pub fn nonzero_hull(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|v| v.norm_sqr() > 0.0)?;
        let last = self.values.iter().rposition(|v| v.norm_sqr() > 0.0)?;
        Some((first, last))
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * lambda).collect(),
        }
    }
}

/// Borrowed view over either representation.
#[derive(Debug, Clone, Copy)]
pub enum SpectrumView<'a> {
    Piecewise(&'a PiecewiseConstSpectrum),
    Sampled(&'a SampledSpectrum),
}

pub trait AsSpectrum {
    fn view(&self) -> SpectrumView<'_>;
}

impl AsSpectrum for PiecewiseConstSpectrum {
    fn view(&self) -> SpectrumView<'_> {
        SpectrumView::Piecewise(self)
    }
}

impl AsSpectrum for SampledSpectrum {
    fn view(&self) -> SpectrumView<'_> {
        SpectrumView::Sampled(self)
    }
}

/// Owned spectrum of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Piecewise(PiecewiseConstSpectrum),
    Sampled(SampledSpectrum),
}

impl AsSpectrum for Spectrum {
    fn view(&self) -> SpectrumView<'_> {
        match self {
            Spectrum::Piecewise(p) => SpectrumView::Piecewise(p),
            Spectrum::Sampled(s) => SpectrumView::Sampled(s),
        }
    }
}

impl From<PiecewiseConstSpectrum> for Spectrum {
    fn from(p: PiecewiseConstSpectrum) -> Self {
        Spectrum::Piecewise(p)
    }
}

impl From<SampledSpectrum> for Spectrum {
    fn from(s: SampledSpectrum) -> Self {
        Spectrum::Sampled(s)
    }
}

/// Value of the transform at `xi`, for either representation.
pub fn evaluate<S: AsSpectrum + ?Sized>(spectrum: &S, xi: f64) -> Result<Complex64> {
    match spectrum.view() {
        SpectrumView::Piecewise(p) => Ok(p.evaluate(xi)),
        SpectrumView::Sampled(s) => s.evaluate(xi),
    }
}

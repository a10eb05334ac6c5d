//! Fourier amalgam norms and their Fourier-Lebesgue, Sobolev and modulation relatives.
//!
//! The amalgam norm slices the Fourier transform into unit boxes
//! `n + Q`, `Q = (-1/2, 1/2]`, takes an `L^p` norm on each box, weights the
//! result by `<n>^s` and sums the sequence in `l^q`:
//!
//! ```text
//! ||f|| = || ( ||chi_{n+Q} Ff||_{L^p} <n>^s )_n ||_{l^q}
//! ```
//!
//! For piecewise-constant spectra every box integral is computed exactly
//! from overlap lengths. Sampled spectra are integrated with the composite
//! Gauss–Legendre rule cell by cell.

pub mod partition;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::spectral::{AsSpectrum, Interval, PiecewiseConstSpectrum, Quadrature, SampledSpectrum, SpectrumView};

pub use partition::{build_partition, BumpProfile, SmoothWindowFamily};

/// Lebesgue exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        Self::checked(p, "exponent")
    }

    /// Validates `p >= 1`; `f64::INFINITY` maps to [`Exponent::Infinity`].
    pub fn checked(p: f64, name: &'static str) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 && p.is_finite() {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter {
                name,
                reason: format!("must be >= 1 or infinity, got {p}"),
            })
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// `(p, q, s)` plus the quadrature density used wherever integrals are not exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmalgamParams {
    pub p: Exponent,
    pub q: Exponent,
    pub s: f64,
    pub quad: Quadrature,
}

impl AmalgamParams {
    pub fn new(p: f64, q: f64, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: format!("must be finite, got {s}"),
            });
        }
        Ok(Self {
            p: Exponent::checked(p, "p")?,
            q: Exponent::checked(q, "q")?,
            s,
            quad: Quadrature::default(),
        })
    }

    pub fn with_quad_density(mut self, density: usize) -> Result<Self> {
        self.quad = Quadrature::new(density)?;
        Ok(self)
    }
}

/// `<x> = (1 + x^2)^{1/2}`.
pub fn japanese_bracket(x: f64) -> f64 {
    1.0f64.hypot(x)
}

/// Box `n + Q` as a closed interval; its left endpoint is excluded only for sup norms.
fn unit_box(n: i64) -> Interval {
    Interval::new(n as f64 - 0.5, n as f64 + 0.5).expect("unit box")
}

/// Integers `n` whose box `(n - 1/2, n + 1/2]` meets the closed interval `iv`.
fn boxes_meeting(iv: &Interval) -> std::ops::RangeInclusive<i64> {
    // n - 1/2 < hi and n + 1/2 >= lo
    let first = (iv.lo() - 0.5).ceil() as i64;
    let last = (iv.hi() + 0.5).ceil() as i64 - 1;
    first..=last
}

/// Indices of the boxes that meet the support of a piecewise-constant spectrum.
pub fn contributing_boxes(f: &PiecewiseConstSpectrum) -> BTreeSet<i64> {
    f.support().intervals().iter().flat_map(boxes_meeting).collect()
}

/// `l^q` norm of a sequence, summed in the given order.
fn lq<I: IntoIterator<Item = f64>>(values: I, q: Exponent) -> f64 {
    match q {
        Exponent::Infinity => values.into_iter().fold(0.0, f64::max),
        Exponent::Finite(q) => values.into_iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q),
    }
}

/// Integrates `f` over `[lo, hi]` one grid cell at a time.
fn integrate_cells<F: Fn(f64) -> f64>(s: &SampledSpectrum, lo: f64, hi: f64, rule: &Quadrature, f: F) -> f64 {
    let g = s.grid();
    let lo = lo.max(g.xi_min());
    let hi = hi.min(g.xi_max());
    if !(lo < hi) {
        return 0.0;
    }
    let h = g.spacing();
    let first = ((lo - g.xi_min()) / h).floor() as usize;
    let last = (((hi - g.xi_min()) / h).ceil() as usize).min(g.num_points() - 1);
    let mut acc = 0.0;
    for k in first..last {
        let a = g.point(k).max(lo);
        let b = g.point(k + 1).min(hi);
        if let Some(cell) = Interval::new(a, b) {
            acc += rule.integrate_interval(&f, &cell);
        }
    }
    acc
}

/// Supremum of `weight(xi) |f(xi)|` over `(lo, hi]`, probing every grid node
/// in the range and `density` points per unit length.
fn sampled_sup<W: Fn(f64) -> f64>(s: &SampledSpectrum, lo: f64, hi: f64, density: usize, weight: W) -> f64 {
    let g = s.grid();
    let mut best: f64 = 0.0;
    let mut probe = |xi: f64| {
        if xi > lo && xi <= hi {
            best = best.max(weight(xi) * s.interpolate(xi).norm());
        }
    };
    let h = g.spacing();
    let first = ((lo - g.xi_min()) / h).floor().max(0.0) as usize;
    let last = (((hi - g.xi_min()) / h).ceil().max(0.0) as usize).min(g.num_points() - 1);
    for k in first..=last {
        probe(g.point(k));
    }
    let n = ((hi - lo) * density as f64).ceil().max(1.0) as usize;
    for k in 1..=n {
        probe(lo + (hi - lo) * k as f64 / n as f64);
    }
    best
}

/// Range `[lo, hi]` outside which a sampled spectrum vanishes identically.
/// Errors if the data reach the edge of the grid, since the transform is
/// then truncated rather than compactly supported.
fn sampled_extent(s: &SampledSpectrum) -> Result<Option<(f64, f64)>> {
    let Some((first, last)) = s.nonzero_hull() else {
        return Ok(None);
    };
    let n = s.grid().num_points();
    if first == 0 || last == n - 1 {
        return Err(Error::UnsupportedInput(
            "sampled spectrum is nonzero at the edge of its grid; its effective support is not bounded by the grid"
                .into(),
        ));
    }
    Ok(Some((s.grid().point(first - 1), s.grid().point(last + 1))))
}

/// `L^p` norm of `Ff` over the box `n + Q`.
pub fn box_lp_norm<S: AsSpectrum + ?Sized>(f: &S, n: i64, p: Exponent, rule: &Quadrature) -> Result<f64> {
    let b = unit_box(n);
    match f.view() {
        SpectrumView::Piecewise(pc) => Ok(piecewise_box_norm(pc, &b, p)),
        SpectrumView::Sampled(s) => {
            let g = s.grid();
            if b.hi() <= g.xi_min() || b.lo() >= g.xi_max() {
                return Err(Error::Domain(format!(
                    "box {n} + Q lies outside the sampled range [{}, {}]",
                    g.xi_min(),
                    g.xi_max()
                )));
            }
            Ok(sampled_box_norm(s, &b, p, rule))
        }
    }
}

fn piecewise_box_norm(f: &PiecewiseConstSpectrum, b: &Interval, p: Exponent) -> f64 {
    let overlaps = f.pieces().iter().filter_map(|piece| {
        let len = piece.interval.intersect(b).map_or(0.0, |iv| iv.length());
        (len > 0.0).then_some((piece.amplitude.norm(), len))
    });
    match p {
        Exponent::Infinity => overlaps.map(|(a, _)| a).fold(0.0, f64::max),
        Exponent::Finite(p) => overlaps.map(|(a, len)| a.powf(p) * len).sum::<f64>().powf(1.0 / p),
    }
}

fn sampled_box_norm(s: &SampledSpectrum, b: &Interval, p: Exponent, rule: &Quadrature) -> f64 {
    match p {
        Exponent::Infinity => sampled_sup(s, b.lo(), b.hi(), rule.density(), |_| 1.0),
        Exponent::Finite(p) => {
            integrate_cells(s, b.lo(), b.hi(), rule, |xi| s.interpolate(xi).norm().powf(p)).powf(1.0 / p)
        }
    }
}

/// Fourier amalgam norm `||f||_{w^{p,q}_s}`.
pub fn amalgam_norm<S: AsSpectrum + ?Sized>(f: &S, params: &AmalgamParams) -> Result<f64> {
    let boxes: Vec<i64> = match f.view() {
        SpectrumView::Piecewise(pc) => contributing_boxes(pc).into_iter().collect(),
        SpectrumView::Sampled(s) => match sampled_extent(s)? {
            None => Vec::new(),
            Some((lo, hi)) => boxes_meeting(&Interval::new(lo, hi).expect("ordered")).collect(),
        },
    };
    let mut terms = Vec::with_capacity(boxes.len());
    for n in boxes {
        let b = box_lp_norm(f, n, params.p, &params.quad)?;
        terms.push(b * japanese_bracket(n as f64).powf(params.s));
    }
    Ok(lq(terms, params.q))
}

/// Fourier-Lebesgue norm `||<xi>^s Ff||_{L^q}`.
pub fn fourier_lebesgue_norm<S: AsSpectrum + ?Sized>(f: &S, q: Exponent, s: f64, rule: &Quadrature) -> Result<f64> {
    let weight = |xi: f64| japanese_bracket(xi).powf(s);
    match f.view() {
        SpectrumView::Piecewise(pc) => Ok(match q {
            Exponent::Infinity => pc
                .pieces()
                .iter()
                .map(|piece| {
                    let (a, b) = (piece.interval.lo(), piece.interval.hi());
                    // <xi>^s is monotone in |xi|; its max sits at the point nearest
                    // to 0 when s < 0, at the farthest endpoint otherwise.
                    let w = if s < 0.0 {
                        weight(if a <= 0.0 && 0.0 <= b {
                            0.0
                        } else {
                            a.abs().min(b.abs())
                        })
                    } else {
                        weight(a.abs().max(b.abs()))
                    };
                    piece.amplitude.norm() * w
                })
                .fold(0.0, f64::max),
            Exponent::Finite(q) => pc
                .pieces()
                .iter()
                .map(|piece| {
                    let w: f64 = rule.integrate_interval(&|xi: f64| weight(xi).powf(q), &piece.interval);
                    piece.amplitude.norm().powf(q) * w
                })
                .sum::<f64>()
                .powf(1.0 / q),
        }),
        SpectrumView::Sampled(sm) => {
            let Some((lo, hi)) = sampled_extent(sm)? else {
                return Ok(0.0);
            };
            Ok(match q {
                Exponent::Infinity => sampled_sup(sm, lo, hi, rule.density(), weight),
                Exponent::Finite(q) => {
                    integrate_cells(sm, lo, hi, rule, |xi| (weight(xi) * sm.interpolate(xi).norm()).powf(q))
                        .powf(1.0 / q)
                }
            })
        }
    }
}

/// Sobolev norm `||f||_{H^s}`, the `q = 2` Fourier-Lebesgue norm.
pub fn sobolev_norm<S: AsSpectrum + ?Sized>(f: &S, s: f64, rule: &Quadrature) -> Result<f64> {
    fourier_lebesgue_norm(f, Exponent::Finite(2.0), s, rule)
}

/// Modulation norm `||f||_{M^{2,q}_s}` with `||box_n f||_{L^2_x}` computed on the
/// frequency side as `||sigma_n Ff||_{L^2_xi}`. Only `p = 2` is supported.
pub fn modulation_norm<S: AsSpectrum + ?Sized>(
    f: &S,
    params: &AmalgamParams,
    windows: &SmoothWindowFamily,
) -> Result<f64> {
    if params.p != Exponent::Finite(2.0) {
        return Err(Error::UnsupportedParameter("modulation norm requires p=2".into()));
    }
    let rule = &params.quad;
    let window = |n: i64| Interval::new(n as f64 - 1.0, n as f64 + 1.0).expect("window");
    let local_l2 = |n: i64| -> f64 {
        let w = window(n);
        let sq = |xi: f64| windows.sigma(n, xi).powi(2);
        let energy = match f.view() {
            SpectrumView::Piecewise(pc) => pc
                .pieces()
                .iter()
                .filter_map(|piece| piece.interval.intersect(&w).map(|iv| (piece.amplitude.norm_sqr(), iv)))
                .map(|(a2, iv)| a2 * rule.integrate_interval(&sq, &iv))
                .sum::<f64>(),
            SpectrumView::Sampled(s) => {
                integrate_cells(s, w.lo(), w.hi(), rule, |xi| sq(xi) * s.interpolate(xi).norm_sqr())
            }
        };
        energy.sqrt()
    };
    let extent = match f.view() {
        SpectrumView::Piecewise(pc) => pc.support().bounds(),
        SpectrumView::Sampled(s) => sampled_extent(s)?,
    };
    let Some((lo, hi)) = extent else {
        return Ok(0.0);
    };
    // sigma_n is supported in [n - 1, n + 1]
    let first = (lo - 1.0).floor() as i64;
    let last = (hi + 1.0).ceil() as i64;
    let terms = (first..=last).map(|n| local_l2(n) * japanese_bracket(n as f64).powf(params.s));
    Ok(lq(terms, params.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::FrequencyGrid;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn indicator(a: f64, b: f64) -> PiecewiseConstSpectrum {
        PiecewiseConstSpectrum::new(vec![(a, b, c(1.0))], false).unwrap()
    }

    fn phi(n: f64) -> PiecewiseConstSpectrum {
        PiecewiseConstSpectrum::new(vec![(n, n + 2.0, c(n)), (-n - 2.0, -n, c(n))], true).unwrap()
    }

    fn rule() -> Quadrature {
        Quadrature::default()
    }

    #[test]
    fn box_norm_of_half_box_indicator() {
        let f = indicator(0.0, 0.5);
        let v = box_lp_norm(&f, 0, Exponent::Finite(2.0), &rule()).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn box_norm_on_full_box_is_amplitude() {
        for p in [
            Exponent::Finite(1.0),
            Exponent::Finite(2.0),
            Exponent::Finite(3.5),
            Exponent::Infinity,
        ] {
            let v = box_lp_norm(&phi(4.0), 5, p, &rule()).unwrap();
            assert!((v - 4.0).abs() < 1e-14, "p = {p}");
        }
    }

    #[test]
    fn zero_spectrum_norms_vanish() {
        let z = PiecewiseConstSpectrum::zero();
        let params = AmalgamParams::new(2.0, 2.0, -1.0).unwrap();
        assert_eq!(box_lp_norm(&z, 3, Exponent::Finite(2.0), &rule()).unwrap(), 0.0);
        assert_eq!(amalgam_norm(&z, &params).unwrap(), 0.0);
        assert_eq!(
            fourier_lebesgue_norm(&z, Exponent::Finite(3.0), 1.0, &rule()).unwrap(),
            0.0
        );
        assert_eq!(sobolev_norm(&z, -2.0, &rule()).unwrap(), 0.0);
        assert_eq!(
            modulation_norm(&z, &params, &SmoothWindowFamily::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_box_amalgam_ignores_weight() {
        let f = indicator(0.0, 0.5);
        for (p, q, s) in [(1.0, 1.0, -3.0), (2.0, 4.0, 2.0), (3.0, f64::INFINITY, 0.5)] {
            let v = amalgam_norm(&f, &AmalgamParams::new(p, q, s).unwrap()).unwrap();
            assert!((v - 0.5f64.powf(1.0 / p)).abs() < 1e-15);
        }
        let v = amalgam_norm(&f, &AmalgamParams::new(f64::INFINITY, 2.0, 1.0).unwrap()).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn contributing_boxes_of_phi4() {
        let g: Vec<i64> = contributing_boxes(&phi(4.0)).into_iter().collect();
        assert_eq!(g, vec![-6, -5, -4, 4, 5, 6]);
    }

    #[test]
    fn box_endpoint_convention() {
        // (n - 1/2, n + 1/2]: a piece ending exactly at n - 1/2 does not meet box n
        let f = indicator(0.0, 0.5);
        let g: Vec<i64> = contributing_boxes(&f).into_iter().collect();
        assert_eq!(g, vec![0]);
        let touching = indicator(-1.0, -0.5);
        let g: Vec<i64> = contributing_boxes(&touching).into_iter().collect();
        assert_eq!(g, vec![-1]);
    }

    #[test]
    fn invalid_exponents_rejected() {
        assert!(AmalgamParams::new(0.5, 2.0, 0.0).is_err());
        assert!(AmalgamParams::new(2.0, f64::NAN, 0.0).is_err());
        assert!(AmalgamParams::new(2.0, 2.0, f64::INFINITY).is_err());
    }

    #[test]
    fn sobolev_of_unit_indicator() {
        let v = sobolev_norm(&indicator(0.0, 1.0), 0.0, &rule()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let v = fourier_lebesgue_norm(&indicator(0.0, 0.5), Exponent::Finite(2.0), 0.0, &rule()).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn weighted_sobolev_against_arctan() {
        // int_{-1/4}^{1/4} (1 + xi^2)^{-1} = 2 atan(1/4)
        let v = sobolev_norm(&indicator(-0.25, 0.25), -1.0, &rule()).unwrap();
        assert!((v - (2.0 * 0.25f64.atan()).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fourier_lebesgue_sup() {
        let f = indicator(-1.0, 2.0).scale(c(3.0));
        let v = fourier_lebesgue_norm(&f, Exponent::Infinity, -1.0, &rule()).unwrap();
        assert_eq!(v, 3.0);
        let v = fourier_lebesgue_norm(&f, Exponent::Infinity, 1.0, &rule()).unwrap();
        assert!((v - 3.0 * 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn modulation_requires_p2() {
        let params = AmalgamParams::new(1.0, 2.0, 0.0).unwrap();
        let err = modulation_norm(&phi(4.0), &params, &SmoothWindowFamily::default()).unwrap_err();
        assert_eq!(err.to_string(), "modulation norm requires p=2");
    }

    #[test]
    fn modulation_of_centered_indicator() {
        // sigma_{+-1} overlap (-1/4, 1/4] except at 0, so the value is
        // (int sum_n sigma_n^2)^{1/2}, strictly between 2^{-1} and 2^{-1/2}.
        let f = indicator(-0.25, 0.25);
        let w = SmoothWindowFamily::default();
        let params = AmalgamParams::new(2.0, 2.0, 0.0).unwrap();
        let m = modulation_norm(&f, &params, &w).unwrap();
        let oracle: f64 = {
            let steps = 200_000;
            let h = 0.5 / steps as f64;
            (0..steps)
                .map(|k| {
                    let xi = -0.25 + (k as f64 + 0.5) * h;
                    (-1..=1).map(|n| w.sigma(n, xi).powi(2)).sum::<f64>() * h
                })
                .sum::<f64>()
                .sqrt()
        };
        assert!((m - oracle).abs() < 1e-9, "{m} vs {oracle}");
        let h0 = sobolev_norm(&f, 0.0, &rule()).unwrap();
        assert!(m < h0 && m > h0 / 2f64.sqrt());
    }

    #[test]
    fn sampled_norms_match_piecewise_for_hat() {
        // A hat function is exactly representable on a grid with nodes at its kinks.
        let grid = FrequencyGrid::symmetric(4.0, 0.25).unwrap();
        let s = crate::spectral::SampledSpectrum::from_fn(grid, |xi| c((1.0 - (xi - 1.0).abs()).max(0.0))).unwrap();
        let b = box_lp_norm(&s, 1, Exponent::Finite(2.0), &rule()).unwrap();
        // int_{1/2}^{3/2} (1 - |x - 1|)^2 = 2 * int_{1/2}^1 u^2 = 7/12
        assert!((b - (7.0f64 / 12.0).sqrt()).abs() < 1e-13);
        let sup = box_lp_norm(&s, 1, Exponent::Infinity, &rule()).unwrap();
        assert!((sup - 1.0).abs() < 1e-15);
        let l1 = amalgam_norm(&s, &AmalgamParams::new(1.0, 1.0, 0.0).unwrap()).unwrap();
        assert!((l1 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn sampled_box_outside_grid_is_domain_error() {
        let grid = FrequencyGrid::symmetric(2.0, 0.5).unwrap();
        let s = crate::spectral::SampledSpectrum::zeros(grid);
        assert!(matches!(
            box_lp_norm(&s, 5, Exponent::Finite(2.0), &rule()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn truncated_sampled_spectrum_rejected() {
        let grid = FrequencyGrid::symmetric(2.0, 0.5).unwrap();
        let s = crate::spectral::SampledSpectrum::from_fn(grid, |_| c(1.0)).unwrap();
        let params = AmalgamParams::new(2.0, 2.0, 0.0).unwrap();
        assert!(matches!(amalgam_norm(&s, &params), Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn monotone_in_s_on_phi_family() {
        let f = phi(16.0);
        let mut last = 0.0;
        for s in [-3.0, -2.0, -1.5, -1.0, 0.0, 0.5] {
            let v = amalgam_norm(&f, &AmalgamParams::new(2.0, 1.0, s).unwrap()).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    fn arb_piecewise() -> impl Strategy<Value = PiecewiseConstSpectrum> {
        prop::collection::vec((0.0f64..1.5, 0.05f64..1.5, -3.0f64..3.0, -3.0f64..3.0), 1..5).prop_map(|v| {
            let mut x = -4.0;
            let mut pieces = Vec::new();
            for (gap, w, re, im) in v {
                x += gap;
                pieces.push((x, x + w, Complex64::new(re, im)));
                x += w;
            }
            PiecewiseConstSpectrum::new(pieces, false).unwrap()
        })
    }

    fn arb_params() -> impl Strategy<Value = AmalgamParams> {
        let e = prop_oneof![Just(1.0), Just(2.0), Just(3.0), Just(f64::INFINITY), 1.0f64..6.0];
        (e.clone(), e, -2.5f64..1.5).prop_map(|(p, q, s)| AmalgamParams::new(p, q, s).unwrap())
    }

    proptest! {
        #[test]
        fn homogeneity(f in arb_piecewise(), params in arb_params(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let lambda = Complex64::new(re, im);
            prop_assume!(lambda.norm() > 1e-3);
            let a = amalgam_norm(&f.scale(lambda), &params).unwrap();
            let b = lambda.norm() * amalgam_norm(&f, &params).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }

        #[test]
        fn homogeneity_sampled(f in arb_piecewise(), params in arb_params(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let lambda = Complex64::new(re, im);
            prop_assume!(lambda.norm() > 1e-3);
            let grid = FrequencyGrid::symmetric(8.0, 0.125).unwrap();
            let s = f.sample(&grid);
            let a = amalgam_norm(&s.scale(lambda), &params).unwrap();
            let b = lambda.norm() * amalgam_norm(&s, &params).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }

        #[test]
        fn triangle_inequality(f in arb_piecewise(), g in arb_piecewise(), params in arb_params()) {
            // Sum of two piecewise spectra: refine on the union of breakpoints.
            let mut cuts: Vec<f64> = f.pieces().iter().chain(g.pieces()).flat_map(|p| [p.interval.lo(), p.interval.hi()]).collect();
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let pieces: Vec<_> = cuts.windows(2).filter_map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let v = f.evaluate(mid) + g.evaluate(mid);
                (w[1] > w[0] && v.norm() > 0.0).then_some((w[0], w[1], v))
            }).collect();
            let sum = PiecewiseConstSpectrum::new(pieces, false).unwrap();
            let lhs = amalgam_norm(&sum, &params).unwrap();
            let rhs = amalgam_norm(&f, &params).unwrap() + amalgam_norm(&g, &params).unwrap();
            prop_assert!(lhs <= rhs + 1e-10);
        }

        #[test]
        fn single_box_special_case(a in -0.49f64..0.3, w in 0.01f64..0.19, re in -3.0f64..3.0, n in -20i64..20) {
            // With s = 0 the weight is constant, so w^{2,2}_0 and H^0 coincide.
            let f = PiecewiseConstSpectrum::new(vec![(n as f64 + a, n as f64 + a + w, c(re + 3.5))], false).unwrap();
            let amalgam = amalgam_norm(&f, &AmalgamParams::new(2.0, 2.0, 0.0).unwrap()).unwrap();
            let sobolev = sobolev_norm(&f, 0.0, &rule()).unwrap();
            prop_assert!((amalgam - sobolev).abs() < 1e-10);
        }
    }
}

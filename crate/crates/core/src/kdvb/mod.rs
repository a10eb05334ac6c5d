//! KdV-Burgers dynamics on the Fourier side.
//!
//! The equation `u_t + u_xxx - u_xx + u u_x = 0` has the linear propagator
//! `F[S(t) u0](xi) = e^{-t xi^2 + i t xi^3} F[u0](xi)` and the Duhamel form
//!
//! ```text
//! u(t) = S(t) u0 - 1/2 int_0^t S(t - tau) d_x [u(tau)]^2 dtau.
//! ```
//!
//! [`picard_iterate`] runs the iteration on a frequency grid. The quadratic
//! term of the second iterate, `A2(t, h, h) = int_0^t S(t - tau) d_x [S(tau) h]^2 dtau`
//! (no `-1/2`), has a closed form for piecewise-constant data:
//! [`second_iterate_closed_form`].

pub mod kernel;
pub mod oracle;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    AsSpectrum, FrequencyGrid, Interval, PiecewiseConstSpectrum, Quadrature, SampledSpectrum, SpectrumView,
};

pub use kernel::{
    cexpm1, damped_duhamel_factor, duhamel_direct, duhamel_factor, duhamel_series, exponent_gaps, interaction_exponent,
    ExponentGaps, DEFAULT_SERIES_THRESHOLD,
};
pub use oracle::{second_iterate_oracle, OracleOptions, OracleValue};

/// `e^{-t xi^2 + i t xi^3}`.
#[inline]
pub fn semigroup_multiplier(xi: f64, t: f64) -> Complex64 {
    Complex64::new(-t * xi * xi, t * xi * xi * xi).exp()
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "the semigroup is forward-only; need t >= 0, got {t}"
        )))
    }
}

/// Applies `S(t)` to sampled data.
pub fn semigroup_apply(f: &SampledSpectrum, t: f64) -> Result<SampledSpectrum> {
    check_time(t)?;
    let grid = *f.grid();
    let values = grid
        .points()
        .zip(f.values())
        .map(|(xi, v)| v * semigroup_multiplier(xi, t))
        .collect();
    SampledSpectrum::new(grid, values)
}

/// Applies `S(t)` to piecewise-constant data, sampling the result on `grid`.
pub fn semigroup_apply_piecewise(h: &PiecewiseConstSpectrum, t: f64, grid: &FrequencyGrid) -> Result<SampledSpectrum> {
    semigroup_apply(&h.sample(grid), t)
}

/// Simulation settings for the grid Picard scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub t: f64,
    pub grid: FrequencyGrid,
    /// Trapezoid panels on `[0, t]`.
    pub time_steps: usize,
    /// `|z| t` below which the closed-form kernel uses its series.
    pub epsilon: f64,
}

impl PicardConfig {
    pub fn new(t: f64, grid: FrequencyGrid, time_steps: usize) -> Result<Self> {
        check_time(t)?;
        if time_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "time_steps",
                reason: "must be positive".into(),
            });
        }
        Ok(Self {
            t,
            grid,
            time_steps,
            epsilon: DEFAULT_SERIES_THRESHOLD,
        })
    }
}

/// `(Fu * Fu)(xi_k)` on the grid of `u`, by the trapezoid rule in `xi1`.
///
/// Fails if the grid cannot hold `supp Fu + supp Fu`.
pub fn self_convolve(u: &SampledSpectrum) -> Result<SampledSpectrum> {
    let grid = *u.grid();
    let Some((first, last)) = u.nonzero_hull() else {
        return Ok(SampledSpectrum::zeros(grid));
    };
    let (lo, hi) = (2.0 * grid.point(first), 2.0 * grid.point(last));
    let slack = 1e-9 * grid.spacing();
    if lo < grid.xi_min() - slack || hi > grid.xi_max() + slack {
        return Err(Error::SupportOverflow {
            lo,
            hi,
            xi_min: grid.xi_min(),
            xi_max: grid.xi_max(),
        });
    }
    let h = grid.spacing();
    let vals = u.values();
    let n = grid.num_points();
    // xi_k - xi_j = xi_min + (k - j + offset) h
    let offset = -grid.xi_min() / h;
    let aligned = (offset - offset.round()).abs() < 1e-9;
    let shift = offset.round() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let xi = grid.point(k);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, vj) in vals.iter().enumerate().take(last + 1).skip(first) {
            let other = if aligned {
                let idx = k as i64 - j as i64 + shift;
                if idx < 0 || idx >= n as i64 {
                    continue;
                }
                vals[idx as usize]
            } else {
                u.interpolate(xi - grid.point(j))
            };
            acc += vj * other;
        }
        *slot = acc * h;
    }
    SampledSpectrum::new(grid, out)
}

/// Frequency side of `d_x [u]^2` without the propagator: `i xi (Fu * Fu)(xi)`.
fn derivative_of_square(u: &SampledSpectrum) -> Result<SampledSpectrum> {
    let conv = self_convolve(u)?;
    let grid = *conv.grid();
    let values = grid
        .points()
        .zip(conv.values())
        .map(|(xi, c)| Complex64::new(0.0, xi) * c)
        .collect();
    SampledSpectrum::new(grid, values)
}

/// Integrand of the Duhamel term: `F[S(t - tau) d_x [u]^2]`.
pub fn duhamel_rhs(u: &SampledSpectrum, t: f64, tau: f64) -> Result<SampledSpectrum> {
    if !(0.0 <= tau && tau <= t) {
        return Err(Error::Domain(format!("need 0 <= tau <= t, got tau = {tau}, t = {t}")));
    }
    semigroup_apply(&derivative_of_square(u)?, t - tau)
}

/// `K` steps of the Picard scheme, returning `u^(K)(t)`.
///
/// `u^(1)(tau) = S(tau) u0`, and each later iterate is
/// `S(tau) u0 - 1/2 int_0^tau duhamel_rhs(u^(k)(s), tau, s) ds`, with the time
/// integral done by the composite trapezoid rule on `config.time_steps` panels.
pub fn picard_iterate<S: AsSpectrum + ?Sized>(
    u0: &S,
    iterations: usize,
    config: &PicardConfig,
) -> Result<SampledSpectrum> {
    if iterations == 0 {
        return Err(Error::InvalidParameter {
            name: "iterations",
            reason: "need at least one Picard iterate".into(),
        });
    }
    check_time(config.t)?;
    let grid = config.grid;
    let u0 = match u0.view() {
        SpectrumView::Piecewise(p) => p.sample(&grid),
        SpectrumView::Sampled(s) => {
            if s.grid() != &grid {
                return Err(Error::InvalidGrid(
                    "initial data must live on the configured grid".into(),
                ));
            }
            s.clone()
        }
    };
    if iterations == 1 {
        return semigroup_apply(&u0, config.t);
    }
    let m = config.time_steps;
    let dt = config.t / m as f64;
    let times: Vec<f64> = (0..=m).map(|j| j as f64 * dt).collect();
    let mut level: Vec<SampledSpectrum> = times
        .iter()
        .map(|&tau| semigroup_apply(&u0, tau))
        .collect::<Result<_>>()?;
    for k in 1..iterations {
        let sources: Vec<SampledSpectrum> = level.iter().map(derivative_of_square).collect::<Result<_>>()?;
        // Only the final time is needed on the last pass.
        let targets: Vec<usize> = if k + 1 == iterations {
            vec![m]
        } else {
            (0..=m).collect()
        };
        let mut next = Vec::with_capacity(targets.len());
        for &j in &targets {
            let tau_j = times[j];
            let mut values: Vec<Complex64> = u0
                .values()
                .iter()
                .zip(grid.points())
                .map(|(v, xi)| v * semigroup_multiplier(xi, tau_j))
                .collect();
            if j > 0 {
                for i in 0..=j {
                    let w = if i == 0 || i == j { 0.5 * dt } else { dt };
                    let lag = tau_j - times[i];
                    for (idx, xi) in grid.points().enumerate() {
                        values[idx] -= 0.5 * w * semigroup_multiplier(xi, lag) * sources[i].values()[idx];
                    }
                }
            }
            next.push(SampledSpectrum::new(grid, values)?);
        }
        level = next;
    }
    Ok(level.pop().expect("final time computed"))
}

/// Quadrature and series settings for the closed-form second iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    pub epsilon: f64,
    pub quad: Quadrature,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_SERIES_THRESHOLD,
            quad: Quadrature::default(),
        }
    }
}

/// Pieces of `{xi1 : xi1 in supp Fh, xi - xi1 in supp Fh}`, one per ordered
/// pair of pieces, with the product of their amplitudes.
pub fn interaction_support(h: &PiecewiseConstSpectrum, xi: f64) -> Vec<(Interval, Complex64)> {
    let mut out = Vec::new();
    for a in h.pieces() {
        for b in h.pieces() {
            if let Some(iv) = a.interval.intersect(&b.interval.reflect_about(xi)) {
                if iv.length() > 0.0 {
                    out.push((iv, a.amplitude * b.amplitude));
                }
            }
        }
    }
    out
}

/// `F[A2(t, h, h)](xi)` in closed form:
///
/// ```text
/// e^{-t xi^2 + i t xi^3} (i xi) int Fh(xi1) Fh(xi - xi1) G(z, t) dxi1,
/// z = 2 xi1 (xi - xi1) - 3i xi xi1 (xi - xi1),  G(z, t) = (e^{zt} - 1) / z,
/// ```
///
/// with the `xi1` integral taken over the exact interaction support.
pub fn second_iterate_closed_form(
    h: &PiecewiseConstSpectrum,
    t: f64,
    xi: f64,
    opts: &KernelOptions,
) -> Result<Complex64> {
    check_time(t)?;
    if t == 0.0 || xi == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let damping = xi * xi;
    let mut integral = Complex64::new(0.0, 0.0);
    for (iv, amp) in interaction_support(h, xi) {
        let part: Complex64 = opts.quad.integrate_interval(
            &|xi1: f64| damped_duhamel_factor(interaction_exponent(xi, xi1), damping, t, opts.epsilon),
            &iv,
        );
        integral += amp * part;
    }
    // e^{-t xi^2} is already folded into the damped kernel.
    let phase = Complex64::new(0.0, t * xi * xi * xi).exp();
    Ok(phase * Complex64::new(0.0, xi) * integral)
}

/// Evaluates [`second_iterate_closed_form`] at every node of `grid`.
pub fn second_iterate_on_grid(
    h: &PiecewiseConstSpectrum,
    t: f64,
    grid: &FrequencyGrid,
    opts: &KernelOptions,
) -> Result<SampledSpectrum> {
    let values = grid
        .points()
        .map(|xi| second_iterate_closed_form(h, t, xi, opts))
        .collect::<Result<Vec<_>>>()?;
    SampledSpectrum::new(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn phi(n: f64) -> PiecewiseConstSpectrum {
        PiecewiseConstSpectrum::new(vec![(n, n + 2.0, c(n)), (-n - 2.0, -n, c(n))], true).unwrap()
    }

    #[test]
    fn semigroup_identity_at_zero() {
        let grid = FrequencyGrid::symmetric(4.0, 0.25).unwrap();
        let f = SampledSpectrum::from_fn(grid, |xi| Complex64::new(xi.sin(), xi.cos())).unwrap();
        assert_eq!(semigroup_apply(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn semigroup_modulus_at_one() {
        assert!((semigroup_multiplier(1.0, 1.0).norm() - (-1.0f64).exp()).abs() < 1e-16);
        assert!((semigroup_multiplier(1.0, 1.0).norm() - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn semigroup_rejects_negative_time() {
        let grid = FrequencyGrid::symmetric(1.0, 0.5).unwrap();
        let f = SampledSpectrum::zeros(grid);
        assert!(matches!(semigroup_apply(&f, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn semigroup_composes() {
        let grid = FrequencyGrid::symmetric(3.0, 0.1).unwrap();
        let f = SampledSpectrum::from_fn(grid, |xi| Complex64::new(1.0 + xi, -0.5 * xi)).unwrap();
        let (t1, t2) = (0.13, 0.41);
        let a = semigroup_apply(&semigroup_apply(&f, t1).unwrap(), t2).unwrap();
        let b = semigroup_apply(&f, t1 + t2).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-12 * y.norm().max(1e-300));
        }
    }

    #[test]
    fn duhamel_rhs_of_zero_is_zero() {
        let grid = FrequencyGrid::symmetric(4.0, 0.25).unwrap();
        let out = duhamel_rhs(&SampledSpectrum::zeros(grid), 1.0, 0.5).unwrap();
        assert!(out.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn duhamel_rhs_vanishes_at_zero_frequency() {
        let grid = FrequencyGrid::symmetric(4.0, 0.25).unwrap();
        let u = SampledSpectrum::from_fn(grid, |xi| c((1.0 - xi.abs()).max(0.0))).unwrap();
        let out = duhamel_rhs(&u, 1.0, 0.25).unwrap();
        assert_eq!(out.values()[16], c(0.0));
        assert!(out.values()[17].norm() > 0.0);
    }

    #[test]
    fn duhamel_rhs_rejects_bad_tau() {
        let grid = FrequencyGrid::symmetric(1.0, 0.5).unwrap();
        let u = SampledSpectrum::zeros(grid);
        assert!(duhamel_rhs(&u, 1.0, 1.5).is_err());
        assert!(duhamel_rhs(&u, 1.0, -0.5).is_err());
    }

    #[test]
    fn convolution_support_of_indicator() {
        // chi_[1,2] * chi_[1,2] is the hat on [2,4] peaking at 3.
        let grid = FrequencyGrid::symmetric(5.0, 0.125).unwrap();
        let u = PiecewiseConstSpectrum::new(vec![(1.0, 2.0, c(1.0))], false)
            .unwrap()
            .sample(&grid);
        let conv = self_convolve(&u).unwrap();
        for (xi, v) in grid.points().zip(conv.values()) {
            if !(2.0..=4.0).contains(&xi) {
                assert_eq!(v.norm(), 0.0, "xi = {xi}");
            }
            // direct summation oracle
            let mut direct = Complex64::new(0.0, 0.0);
            for (j, xj) in grid.points().enumerate() {
                let k = ((xi - xj - grid.xi_min()) / grid.spacing()).round();
                if k >= 0.0 && (k as usize) < grid.num_points() {
                    direct += u.values()[j] * u.values()[k as usize];
                }
            }
            assert!((direct * grid.spacing() - v).norm() < 1e-13);
        }
        // averaged jumps make the trapezoid exact wherever the two factors jump at different nodes
        for (xi, exact) in [(2.5, 0.5), (3.25, 0.75), (3.5, 0.5)] {
            assert!((conv.evaluate(xi).unwrap() - c(exact)).norm() < 1e-12, "xi = {xi}");
        }
        let out = duhamel_rhs(&u, 0.5, 0.1).unwrap();
        for (xi, v) in grid.points().zip(out.values()) {
            if !(2.0..=4.0).contains(&xi) {
                assert_eq!(v.norm(), 0.0);
            }
        }
    }

    #[test]
    fn convolution_overflow_detected() {
        let grid = FrequencyGrid::symmetric(3.0, 0.125).unwrap();
        let u = PiecewiseConstSpectrum::new(vec![(1.0, 2.0, c(1.0))], false)
            .unwrap()
            .sample(&grid);
        assert!(matches!(self_convolve(&u), Err(Error::SupportOverflow { .. })));
    }

    #[test]
    fn first_iterate_is_free_evolution() {
        let grid = FrequencyGrid::symmetric(12.0, 0.25).unwrap();
        let config = PicardConfig::new(0.3, grid, 10).unwrap();
        let h = phi(2.0);
        let u1 = picard_iterate(&h, 1, &config).unwrap();
        assert_eq!(u1, semigroup_apply_piecewise(&h, 0.3, &grid).unwrap());
    }

    #[test]
    fn zero_data_stays_zero() {
        let grid = FrequencyGrid::symmetric(4.0, 0.25).unwrap();
        let config = PicardConfig::new(0.5, grid, 8).unwrap();
        for k in 1..=3 {
            let u = picard_iterate(&PiecewiseConstSpectrum::zero(), k, &config).unwrap();
            assert!(u.values().iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn picard_needs_room_for_convolution() {
        let grid = FrequencyGrid::symmetric(6.0, 0.25).unwrap();
        let config = PicardConfig::new(0.5, grid, 4).unwrap();
        assert!(matches!(
            picard_iterate(&phi(2.0), 2, &config),
            Err(Error::SupportOverflow { .. })
        ));
        assert!(picard_iterate(&phi(2.0), 0, &config).is_err());
    }

    fn picard_a2_error(spacing: f64) -> f64 {
        let h = PiecewiseConstSpectrum::new(vec![(1.0, 2.0, c(1.0)), (-2.0, -1.0, c(1.0))], true).unwrap();
        let t = 0.3;
        let grid = FrequencyGrid::symmetric(5.0, spacing).unwrap();
        let cfg = PicardConfig::new(t, grid, 64).unwrap();
        let u1 = picard_iterate(&h, 1, &cfg).unwrap();
        let u2 = picard_iterate(&h, 2, &cfg).unwrap();
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for (k, xi) in grid.points().enumerate() {
            let a2 = (u2.values()[k] - u1.values()[k]) * -2.0;
            let exact = second_iterate_closed_form(&h, t, xi, &KernelOptions::default()).unwrap();
            err = err.max((a2 - exact).norm());
            scale = scale.max(exact.norm());
        }
        err / scale
    }

    #[test]
    fn grid_picard_second_iterate_tracks_closed_form() {
        // jumps in the data limit the grid scheme to first order in the spacing
        let coarse = picard_a2_error(1.0 / 16.0);
        let fine = picard_a2_error(1.0 / 32.0);
        assert!(fine < 0.03, "relative error {fine}");
        let ratio = coarse / fine;
        assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn closed_form_trivial_zeros() {
        let h = phi(4.0);
        let opts = KernelOptions::default();
        assert_eq!(second_iterate_closed_form(&h, 0.0, 0.3, &opts).unwrap(), c(0.0));
        assert_eq!(second_iterate_closed_form(&h, 0.7, 0.0, &opts).unwrap(), c(0.0));
        assert!(second_iterate_closed_form(&h, -0.1, 0.3, &opts).is_err());
    }

    #[test]
    fn closed_form_is_hermitian_for_real_data() {
        let h = phi(3.0);
        let opts = KernelOptions::default();
        for xi in [0.1, 0.45, 1.7, 6.3, 9.2] {
            let a = second_iterate_closed_form(&h, 0.4, xi, &opts).unwrap();
            let b = second_iterate_closed_form(&h, 0.4, -xi, &opts).unwrap();
            assert!((b - a.conj()).norm() <= 1e-10 * a.norm(), "xi = {xi}");
        }
    }

    #[test]
    fn closed_form_handles_removable_singularity() {
        // Support through zero puts xi1 = 0 and xi1 = xi inside the integration range.
        let h = PiecewiseConstSpectrum::new(vec![(-1.0, 1.0, c(1.0))], true).unwrap();
        let opts = KernelOptions::default();
        let v = second_iterate_closed_form(&h, 0.5, 0.3, &opts).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite() && v.norm() > 0.0);
        let oracle = second_iterate_oracle(&h, 0.5, 0.3, &OracleOptions::default()).unwrap();
        assert!(oracle.converged);
        assert!((v - oracle.value).norm() <= 1e-8 * v.norm());
    }
}

//! Second-iterate witness of ill-posedness below `s = -1`.
//!
//! The data family `F[phi_N] = N (chi_{I_N} + chi_{I_N}(-.))`, `I_N = [N, N + 2]`,
//! has amalgam norm of order `N^{1+s}`, so it tends to zero for `s < -1`. The
//! high-high-to-low interaction of its two bumps lands in the box around
//! the origin, where `|F[A2(t, phi_N, phi_N)]|` stays bounded below
//! uniformly in `N`. This module computes both sides of that comparison.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kdvb::{damped_duhamel_factor, interaction_exponent, second_iterate_closed_form, KernelOptions};
use crate::norms::{amalgam_norm, AmalgamParams, Exponent};
use crate::spectral::{Interval, IntervalSet, PiecewiseConstSpectrum, Quadrature};

/// `F[phi_N] = N (chi_[N, N+2] + chi_[-N-2, -N])`.
pub fn make_phi_n(n: u64) -> Result<PiecewiseConstSpectrum> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "must be >= 1".into(),
        });
    }
    let nf = n as f64;
    let amp = Complex64::new(nf, 0.0);
    PiecewiseConstSpectrum::new(vec![(nf, nf + 2.0, amp), (-nf - 2.0, -nf, amp)], true)
}

fn i_n(n: u64) -> Interval {
    Interval::new(n as f64, n as f64 + 2.0).expect("I_N")
}

/// `K_xi = {xi1 in -I_N, xi - xi1 in I_N} U {xi1 in I_N, xi - xi1 in -I_N}`.
pub fn resonant_set(xi: f64, n: u64) -> IntervalSet {
    let pos = IntervalSet::from_interval(i_n(n));
    let neg = pos.reflect_about(0.0);
    // xi - xi1 in I_N  <=>  xi1 in xi - I_N
    let left = neg.intersect(&pos.reflect_about(xi));
    let right = pos.intersect(&neg.reflect_about(xi));
    left.union(&right)
}

/// Extremes of the two phase factors over `K_xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentBounds {
    /// `max |3 xi xi1 (xi - xi1)|`.
    pub max_cubic: f64,
    /// `min |2 xi1 (xi - xi1)|`.
    pub min_quadratic: f64,
    /// `max |2 xi1 (xi - xi1)|`.
    pub max_quadratic: f64,
}

/// Samples `K_xi` at `density` points per unit length plus every interval endpoint.
pub fn exponent_bounds_check(xi: f64, n: u64, density: usize) -> Result<ExponentBounds> {
    if xi.abs() > 0.5 {
        return Err(Error::Domain(format!("need |xi| <= 1/2, got {xi}")));
    }
    let k = resonant_set(xi, n);
    if k.measure() == 0.0 {
        return Err(Error::Domain(format!("K_xi is empty for xi = {xi}, N = {n}")));
    }
    let mut b = ExponentBounds {
        max_cubic: 0.0,
        min_quadratic: f64::INFINITY,
        max_quadratic: 0.0,
    };
    for iv in k.intervals() {
        let m = ((iv.length() * density as f64).ceil() as usize).max(1);
        for j in 0..=m {
            let xi1 = iv.lo() + iv.length() * j as f64 / m as f64;
            let prod = xi1 * (xi - xi1);
            let quad = (2.0 * prod).abs();
            b.max_cubic = b.max_cubic.max((3.0 * xi * prod).abs());
            b.min_quadratic = b.min_quadratic.min(quad);
            b.max_quadratic = b.max_quadratic.max(quad);
        }
    }
    Ok(b)
}

/// Whether `e^{-2 (N+2)^2 t} <= e^{-t/4} / 2`.
pub fn threshold_holds(n: u64, t: f64) -> bool {
    let m = n as f64 + 2.0;
    (-2.0 * m * m * t).exp() <= 0.5 * (-t / 4.0).exp()
}

/// Smallest `N >= 1` satisfying [`threshold_holds`].
pub fn min_n_for(t: f64) -> Result<u64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    // (N + 2)^2 >= (t/4 + ln 2) / (2t)
    let root = ((t / 4.0 + std::f64::consts::LN_2) / (2.0 * t)).sqrt() - 2.0;
    let mut n = (root.ceil().max(1.0)) as u64;
    // Settle rounding at the boundary against the inequality itself.
    while n > 1 && threshold_holds(n - 1, t) {
        n -= 1;
    }
    while !threshold_holds(n, t) {
        n += 1;
    }
    Ok(n)
}

fn require_threshold(n: u64, t: f64) -> Result<()> {
    let min = min_n_for(t)?;
    if n < min {
        return Err(Error::BelowThreshold { n, min, t });
    }
    Ok(())
}

/// Integrand numerator `e^{-(xi1^2 + (xi - xi1)^2) t} e^{-3i xi xi1 (xi - xi1) t} - e^{-xi^2 t}`.
pub fn resonant_numerator(xi: f64, xi1: f64, t: f64) -> Complex64 {
    let xi2 = xi - xi1;
    let decay = -(xi1 * xi1 + xi2 * xi2) * t;
    let phase = -3.0 * xi * xi1 * xi2 * t;
    Complex64::new(decay, phase).exp() - (-xi * xi * t).exp()
}

/// `int_{K_xi} numerator / z dxi1` with `z = 2 xi1 (xi - xi1) - 3i xi xi1 (xi - xi1)`.
///
/// `N^2 |xi|` times its modulus is `|F[A2(t, phi_N, phi_N)](xi)|` for `|xi| <= 1/2`.
pub fn lower_bound_integral(xi: f64, n: u64, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    if xi.abs() > 0.5 {
        return Err(Error::Domain(format!("need |xi| <= 1/2, got {xi}")));
    }
    require_threshold(n, t)?;
    let k = resonant_set(xi, n);
    if k.measure() == 0.0 {
        return Err(Error::Domain(format!("K_xi is empty for xi = {xi}, N = {n}")));
    }
    let damping = xi * xi;
    let mut acc = Complex64::new(0.0, 0.0);
    for iv in k.intervals() {
        let part: Complex64 = opts.quad.integrate_interval(
            &|xi1: f64| damped_duhamel_factor(interaction_exponent(xi, xi1), damping, t, opts.epsilon),
            iv,
        );
        acc += part;
    }
    Ok(acc)
}

/// `N^2 e^{t/4} |int_{K_xi} ...|`, the quantity bounded below by a constant.
pub fn normalized_lower_bound(xi: f64, n: u64, t: f64, opts: &KernelOptions) -> Result<f64> {
    let i = lower_bound_integral(xi, n, t, opts)?;
    let nf = n as f64;
    Ok(nf * nf * (t / 4.0).exp() * i.norm())
}

/// Quadrature controls for witness computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOptions {
    pub kernel: KernelOptions,
    /// Rule on the central box; the box is split at `xi = 0`.
    pub box_quad: Quadrature,
    /// Probe points per unit length for the `p = inf` box norm.
    pub sup_density: usize,
    /// Uniform samples of `(-1/2, 1/2]` for the min-over-xi diagnostics.
    pub xi_samples: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            kernel: KernelOptions::default(),
            box_quad: Quadrature::new(16).expect("density"),
            sup_density: 256,
            xi_samples: 65,
        }
    }
}

impl WitnessOptions {
    fn xi_grid(&self) -> impl Iterator<Item = f64> {
        let m = self.xi_samples.max(1);
        (1..=m).map(move |k| -0.5 + k as f64 / m as f64)
    }
}

/// `L^p((-1/2, 1/2])` norm of `F[A2(t, phi_N, phi_N)]`, a lower bound for its
/// amalgam norm at every `(q, s)` since `<0>^s = 1`.
pub fn a2_norm_lower(n: u64, t: f64, p: Exponent, opts: &WitnessOptions) -> Result<f64> {
    require_threshold(n, t)?;
    let h = make_phi_n(n)?;
    let modulus = |xi: f64| second_iterate_closed_form(&h, t, xi, &opts.kernel).map(|v| v.norm());
    match p {
        Exponent::Infinity => {
            let m = opts.sup_density.max(1);
            let mut best: f64 = 0.0;
            for k in 1..=m {
                best = best.max(modulus(-0.5 + k as f64 / m as f64)?);
            }
            Ok(best)
        }
        Exponent::Finite(p) => {
            let mut acc = 0.0;
            for half in [(-0.5, 0.0), (0.0, 0.5)] {
                let iv = Interval::new(half.0, half.1).expect("half box");
                let mut nodes = Vec::new();
                opts.box_quad.for_each_node(&iv, |xi, w| nodes.push((xi, w)));
                for (xi, w) in nodes {
                    acc += w * modulus(xi)?.powf(p);
                }
            }
            Ok(acc.powf(1.0 / p))
        }
    }
}

/// Outcome of the witness check over a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// `s >= -1`: the data family does not vanish, so there is nothing to witness.
    Inapplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "true",
            Verdict::Fail => "false",
            Verdict::Inapplicable => "NA",
        })
    }
}

/// One `(N, t)` cell of a witness sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub n: u64,
    pub t: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub s: f64,
    pub phi_norm: f64,
    pub a2_box0_lower: f64,
    pub kxi_min_measure: f64,
    pub normalized_integral_min: f64,
    pub threshold_ok: bool,
    pub verdict: Verdict,
}

/// Computes every field of one report except the sweep-level verdict.
pub fn witness_row(n: u64, t: f64, params: &AmalgamParams, opts: &WitnessOptions) -> Result<WitnessReport> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("witness time must satisfy 0 < t < 1, got {t}")));
    }
    require_threshold(n, t)?;
    let phi = make_phi_n(n)?;
    let phi_norm = amalgam_norm(&phi, params)?;
    let a2 = a2_norm_lower(n, t, params.p, opts)?;
    let mut kxi_min = f64::INFINITY;
    let mut norm_min = f64::INFINITY;
    for xi in opts.xi_grid() {
        kxi_min = kxi_min.min(resonant_set(xi, n).measure());
        norm_min = norm_min.min(normalized_lower_bound(xi, n, t, &opts.kernel)?);
    }
    Ok(WitnessReport {
        n,
        t,
        p: params.p,
        q: params.q,
        s: params.s,
        phi_norm,
        a2_box0_lower: a2,
        kxi_min_measure: kxi_min,
        normalized_integral_min: norm_min,
        threshold_ok: threshold_holds(n, t),
        verdict: Verdict::Inapplicable,
    })
}

/// Checks the sweep inputs before any work is done.
pub fn validate_sweep(t: f64, n_list: &[u64]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::Config("N list is empty".into()));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("witness time must satisfy 0 < t < 1, got {t}")));
    }
    let min = min_n_for(t)?;
    if let Some(&n) = n_list.iter().find(|&&n| n < min) {
        return Err(Error::BelowThreshold { n, min, t });
    }
    Ok(())
}

/// Sweep-level decision: `phi_N` vanishing (strictly decreasing, last below a
/// quarter of the first) while the iterate floor holds (every value at least
/// half the value at the smallest `N`).
pub fn sweep_verdict(rows: &[WitnessReport], s: f64) -> Verdict {
    if s >= -1.0 {
        return Verdict::Inapplicable;
    }
    let Some(first) = rows.first() else {
        return Verdict::Fail;
    };
    let last = rows.last().expect("nonempty");
    let decreasing = rows.windows(2).all(|w| w[1].phi_norm < w[0].phi_norm);
    let vanishing = decreasing && last.phi_norm < 0.25 * first.phi_norm;
    let base = rows
        .iter()
        .min_by_key(|r| r.n)
        .map(|r| r.a2_box0_lower)
        .expect("nonempty");
    let min_a2 = rows.iter().map(|r| r.a2_box0_lower).fold(f64::INFINITY, f64::min);
    let floor = base > 0.0 && min_a2 >= 0.5 * base;
    if vanishing && floor {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Rows in `N` order with the sweep verdict stamped on each.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityReport {
    pub rows: Vec<WitnessReport>,
    pub verdict: Verdict,
}

impl DiscontinuityReport {
    pub fn hypothesis_met(&self) -> bool {
        self.verdict != Verdict::Inapplicable
    }
}

/// Attaches the sweep verdict to rows computed elsewhere (e.g. in parallel).
pub fn assemble_report(mut rows: Vec<WitnessReport>, s: f64) -> DiscontinuityReport {
    rows.sort_by_key(|r| r.n);
    let verdict = sweep_verdict(&rows, s);
    for r in &mut rows {
        r.verdict = verdict;
    }
    DiscontinuityReport { rows, verdict }
}

pub fn discontinuity_report(
    t: f64,
    n_list: &[u64],
    params: &AmalgamParams,
    opts: &WitnessOptions,
) -> Result<DiscontinuityReport> {
    validate_sweep(t, n_list)?;
    let rows = n_list
        .iter()
        .map(|&n| witness_row(n, t, params, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_report(rows, params.s))
}

/// Least-squares fit of `log ||phi_N||` against `log N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub norms: Vec<(u64, f64)>,
}

pub fn scaling_scan(n_list: &[u64], params: &AmalgamParams) -> Result<ScalingFit> {
    let mut ns: Vec<u64> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 4 {
        return Err(Error::Config(format!(
            "scaling fit needs >= 4 distinct N, got {}",
            ns.len()
        )));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 8) {
        return Err(Error::Config(format!("scaling fit needs every N >= 8, got {n}")));
    }
    let norms = ns
        .iter()
        .map(|&n| Ok((n, amalgam_norm(&make_phi_n(n)?, params)?)))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = norms.iter().map(|&(n, v)| ((n as f64).ln(), v.ln())).collect();
    let (slope, intercept) = least_squares(&pts);
    Ok(ScalingFit {
        slope,
        intercept,
        norms,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

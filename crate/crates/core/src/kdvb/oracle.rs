//! Time-quadrature reference for the second Picard iterate.
//!
//! Evaluates `int_0^t e^{(t - tau)(-xi^2 + i xi^3)} (i xi) (F[S(tau)h] * F[S(tau)h])(xi) dtau`
//! by composite Simpson in `tau`, doubling the step count until two
//! successive estimates agree. The integrand is built from free-evolution
//! multipliers only; nothing here uses the analytic time kernel.

use num_complex::Complex64;

use super::{interaction_support, semigroup_multiplier};
use crate::error::{Error, Result};
use crate::spectral::{PiecewiseConstSpectrum, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Rule for the `xi1` convolution integral.
    pub quad: Quadrature,
    /// Stop once successive Simpson estimates differ by less than this, relatively.
    pub rel_tol: f64,
    pub initial_steps: usize,
    pub max_steps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            quad: Quadrature::default(),
            rel_tol: 1e-8,
            initial_steps: 16,
            max_steps: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    /// Simpson panels used for the final estimate.
    pub steps: usize,
    pub converged: bool,
}

/// One `xi1` node of the convolution, carrying its weight times `Fh(xi1) Fh(xi - xi1)`.
struct Node {
    xi1: f64,
    weight: Complex64,
}

pub fn second_iterate_oracle(h: &PiecewiseConstSpectrum, t: f64, xi: f64, opts: &OracleOptions) -> Result<OracleValue> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("need t >= 0, got {t}")));
    }
    if opts.initial_steps < 2 || !opts.initial_steps.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "initial_steps",
            reason: "Simpson needs an even panel count >= 2".into(),
        });
    }
    let mut nodes = Vec::new();
    for (iv, amp) in interaction_support(h, xi) {
        opts.quad
            .for_each_node(&iv, |xi1, w| nodes.push(Node { xi1, weight: amp * w }));
    }
    if t == 0.0 || nodes.is_empty() {
        return Ok(OracleValue {
            value: Complex64::new(0.0, 0.0),
            steps: 0,
            converged: true,
        });
    }

    let outer = Complex64::new(0.0, xi);
    // Per-node product of the two free evolutions at tau: e^{tau b(xi1)}.
    let rates: Vec<Complex64> = nodes
        .iter()
        .map(|n| {
            let a = Complex64::new(-n.xi1 * n.xi1, n.xi1.powi(3));
            let r = xi - n.xi1;
            a + Complex64::new(-r * r, r.powi(3))
        })
        .collect();
    let integrand = |tau: f64, conv: Complex64| semigroup_multiplier(xi, t - tau) * outer * conv;

    // Convolution at tau = start + k * stride, k = 0..count, by repeated multiplication.
    let conv_along = |start: f64, stride: f64, count: usize| -> Vec<Complex64> {
        let mut sums = vec![Complex64::new(0.0, 0.0); count];
        for (node, rate) in nodes.iter().zip(&rates) {
            let mut cur = (rate * start).exp();
            let step = (rate * stride).exp();
            for slot in sums.iter_mut() {
                *slot += node.weight * cur;
                cur *= step;
            }
        }
        sums
    };
    // Sanity cross-check of the multiplier algebra at tau = t.
    debug_assert!({
        let direct: Complex64 = nodes
            .iter()
            .map(|n| n.weight * semigroup_multiplier(n.xi1, t) * semigroup_multiplier(xi - n.xi1, t))
            .sum();
        let via_rates = conv_along(t, 0.0, 1)[0];
        (direct - via_rates).norm() <= 1e-10 * direct.norm().max(1e-300)
    });

    let mut steps = opts.initial_steps;
    let mut hstep = t / steps as f64;
    let ends = {
        let c = conv_along(0.0, t, 2);
        integrand(0.0, c[0]) + integrand(t, c[1])
    };
    let evens = {
        let c = conv_along(2.0 * hstep, 2.0 * hstep, steps / 2 - 1);
        c.iter()
            .enumerate()
            .map(|(k, v)| integrand(2.0 * hstep * (k + 1) as f64, *v))
            .sum::<Complex64>()
    };
    let odd_sum = |h: f64, count: usize| -> Complex64 {
        let c = conv_along(h, 2.0 * h, count);
        c.iter()
            .enumerate()
            .map(|(k, v)| integrand(h * (2 * k + 1) as f64, *v))
            .sum()
    };
    let mut interior_even = evens;
    let mut odds = odd_sum(hstep, steps / 2);
    let mut estimate = (ends + odds * 4.0 + interior_even * 2.0) * (hstep / 3.0);
    loop {
        if steps * 2 > opts.max_steps {
            return Ok(OracleValue {
                value: estimate,
                steps,
                converged: false,
            });
        }
        interior_even += odds;
        steps *= 2;
        hstep *= 0.5;
        odds = odd_sum(hstep, steps / 2);
        let refined = (ends + odds * 4.0 + interior_even * 2.0) * (hstep / 3.0);
        let diff = (refined - estimate).norm();
        estimate = refined;
        if diff <= opts.rel_tol * refined.norm() {
            return Ok(OracleValue {
                value: estimate,
                steps,
                converged: true,
            });
        }
    }
}

//! Smooth frequency-uniform partition of unity `sigma_n = rho_n / sum_l rho_l`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bump profile `rho`: equal to 1 on `|xi| <= 1/2`, zero on `|xi| >= 1`,
/// values in `[0, 1]` between.
#[derive(Clone, Default)]
pub enum BumpProfile {
    /// Plateau joined to zero by the `exp(-1/x)` smooth step; C-infinity everywhere.
    #[default]
    SmoothStep,
    Custom(ProfileFn),
}

impl fmt::Debug for BumpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BumpProfile::SmoothStep => write!(f, "SmoothStep"),
            BumpProfile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl BumpProfile {
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        BumpProfile::Custom(Arc::new(f))
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            BumpProfile::SmoothStep => smooth_step_bump(xi),
            BumpProfile::Custom(f) => f(xi),
        }
    }
}

fn smooth_step_bump(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        // x runs from 1 at |xi| = 1/2 down to 0 at |xi| = 1
        let x = 2.0 - 2.0 * a;
        let up = (-1.0 / x).exp();
        let down = (-1.0 / (1.0 - x)).exp();
        up / (up + down)
    }
}

/// Normalized translates `sigma_n` of a bump profile.
#[derive(Debug, Clone)]
pub struct SmoothWindowFamily {
    profile: BumpProfile,
}

/// Checks the plateau, support and range constraints on a grid of probe points.
pub fn build_partition(profile: BumpProfile) -> Result<SmoothWindowFamily> {
    const PROBES: usize = 2000;
    for k in 0..=PROBES {
        let xi = -3.0 + 6.0 * k as f64 / PROBES as f64;
        let v = profile.eval(xi);
        let a = xi.abs();
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidProfile(format!("rho({xi}) = {v} is outside [0, 1]")));
        }
        if a <= 0.5 && v != 1.0 {
            return Err(Error::InvalidProfile(format!(
                "rho({xi}) = {v}, expected 1 on |xi| <= 1/2"
            )));
        }
        if a >= 1.0 && v != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "rho({xi}) = {v}, expected 0 on |xi| >= 1"
            )));
        }
    }
    Ok(SmoothWindowFamily { profile })
}

impl Default for SmoothWindowFamily {
    fn default() -> Self {
        Self {
            profile: BumpProfile::SmoothStep,
        }
    }
}

impl SmoothWindowFamily {
    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    /// `rho_n(xi) = rho(xi - n)`.
    pub fn rho(&self, n: i64, xi: f64) -> f64 {
        self.profile.eval(xi - n as f64)
    }

    fn normalizer(&self, xi: f64) -> f64 {
        let base = xi.floor() as i64;
        (base - 1..=base + 2).map(|l| self.rho(l, xi)).sum()
    }

    pub fn sigma(&self, n: i64, xi: f64) -> f64 {
        let r = self.rho(n, xi);
        if r == 0.0 {
            return 0.0;
        }
        r / self.normalizer(xi)
    }

    /// Indices `n` with `sigma_n(xi) != 0`.
    pub fn active(&self, xi: f64) -> Vec<i64> {
        let base = xi.floor() as i64;
        (base - 1..=base + 2).filter(|&n| self.rho(n, xi) > 0.0).collect()
    }

    pub fn partition_sum(&self, xi: f64) -> f64 {
        let norm = self.normalizer(xi);
        let base = xi.floor() as i64;
        (base - 1..=base + 2).map(|n| self.rho(n, xi) / norm).sum()
    }
}

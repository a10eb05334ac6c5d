//! Composite 8-point Gauss–Legendre quadrature over interval sets.

use std::ops::{Add, Mul};

use super::interval::{Interval, IntervalSet};
use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
/// Positive nodes of the 8-point Gauss–Legendre rule on [-1, 1].
const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

#[allow(clippy::excessive_precision)]
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

pub const DEFAULT_DENSITY: usize = 64;

/// Composite Gauss–Legendre rule: each interval of length `L` is cut into
/// `ceil(density * L)` equal panels, each integrated with 8 nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature {
    density: usize,
}

impl Quadrature {
    pub fn new(density: usize) -> Result<Self> {
        if density < 2 {
            return Err(Error::InvalidParameter {
                name: "quad_density",
                reason: format!("must be >= 2, got {density}"),
            });
        }
        Ok(Self { density })
    }

    pub fn density(&self) -> usize {
        self.density
    }

    pub fn panels_for(&self, length: f64) -> usize {
        ((self.density as f64) * length).ceil().max(1.0) as usize
    }

    /// Integrates `f` over one interval. Degenerate intervals give zero.
    pub fn integrate_interval<T, F>(&self, f: &F, iv: &Interval) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let len = iv.length();
        if len <= 0.0 {
            return T::default();
        }
        let panels = self.panels_for(len);
        let h = len / panels as f64;
        let mut acc = T::default();
        for k in 0..panels {
            let a = iv.lo() + k as f64 * h;
            acc = acc + gl8_panel(f, a, h);
        }
        acc
    }

    /// Visits every (node, weight) pair the rule would use on `iv`.
    pub fn for_each_node<F: FnMut(f64, f64)>(&self, iv: &Interval, mut visit: F) {
        let len = iv.length();
        if len <= 0.0 {
            return;
        }
        let panels = self.panels_for(len);
        let h = len / panels as f64;
        for k in 0..panels {
            let mid = iv.lo() + (k as f64 + 0.5) * h;
            let half = 0.5 * h;
            for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
                visit(mid - half * x, w * half);
                visit(mid + half * x, w * half);
            }
        }
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            density: DEFAULT_DENSITY,
        }
    }
}

fn gl8_panel<T, F>(f: &F, a: f64, h: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let half = 0.5 * h;
    let mid = a + half;
    let mut acc = T::default();
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        acc = acc + (f(mid - half * x) + f(mid + half * x)) * *w;
    }
    acc * half
}

/// Integrates `f` over every interval of `set` in ascending order.
/// An empty set integrates to zero.
pub fn integrate_on<T, F>(f: F, set: &IntervalSet, rule: &Quadrature) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    set.intervals()
        .iter()
        .fold(T::default(), |acc, iv| acc + rule.integrate_interval(&f, iv))
}

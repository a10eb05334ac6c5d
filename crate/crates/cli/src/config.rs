//! JSON run configurations. Every struct rejects unknown fields.

use std::fmt;
use std::path::Path;

use kdvb_core::norms::AmalgamParams;
use kdvb_core::spectral::{FrequencyGrid, PiecewiseConstSpectrum, SampledSpectrum, Spectrum};
use kdvb_core::witness::make_phi_n;
use num_complex::Complex64;
use serde::de::{self, DeserializeOwned, Deserializer};
use serde::Deserialize;

use crate::CliError;

/// A Lebesgue exponent written as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentValue(pub f64);

impl<'de> Deserialize<'de> for ExponentValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = ExponentValue;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number >= 1 or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExponentValue, E> {
                Ok(ExponentValue(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExponentValue, E> {
                Ok(ExponentValue(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExponentValue, E> {
                Ok(ExponentValue(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExponentValue, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(ExponentValue(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(Visitor)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub num_points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<FrequencyGrid, CliError> {
        FrequencyGrid::new(self.xi_min, self.xi_max, self.num_points).map_err(|e| CliError::config("grid", e))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Input data on the frequency side.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSpec {
    Piecewise {
        pieces: Vec<PieceSpec>,
        #[serde(default)]
        real_valued_field: bool,
    },
    PhiN {
        n: u64,
    },
    Sampled {
        grid: GridSpec,
        re: Vec<f64>,
        #[serde(default)]
        im: Option<Vec<f64>>,
    },
}

impl SpectrumSpec {
    pub fn build(&self) -> Result<Spectrum, CliError> {
        match self {
            SpectrumSpec::Sampled { grid, re, im } => {
                let grid = grid.build()?;
                let values: Vec<Complex64> = match im {
                    Some(im) if im.len() != re.len() => {
                        return Err(CliError::Usage(format!(
                            "spectrum.im: expected {} values to match spectrum.re, got {}",
                            re.len(),
                            im.len()
                        )))
                    }
                    Some(im) => re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect(),
                    None => re.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
                };
                let s = SampledSpectrum::new(grid, values).map_err(|e| CliError::config("spectrum.re", e))?;
                Ok(Spectrum::Sampled(s))
            }
            other => other.piecewise().map(Spectrum::Piecewise),
        }
    }

    /// Piecewise-constant form; sampled data are rejected.
    pub fn piecewise(&self) -> Result<PiecewiseConstSpectrum, CliError> {
        match self {
            SpectrumSpec::Piecewise {
                pieces,
                real_valued_field,
            } => PiecewiseConstSpectrum::new(
                pieces
                    .iter()
                    .map(|p| (p.lo, p.hi, Complex64::new(p.re, p.im)))
                    .collect(),
                *real_valued_field,
            )
            .map_err(|e| CliError::config("spectrum.pieces", e)),
            SpectrumSpec::PhiN { n } => make_phi_n(*n).map_err(|e| CliError::config("spectrum.n", e)),
            SpectrumSpec::Sampled { .. } => Err(CliError::Usage(
                "spectrum.kind: this command needs piecewise data (\"piecewise\" or \"phi_n\")".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Amalgam,
    FourierLebesgue,
    Sobolev,
    Modulation,
}

impl NormKind {
    pub fn name(&self) -> &'static str {
        match self {
            NormKind::Amalgam => "amalgam",
            NormKind::FourierLebesgue => "fourier-lebesgue",
            NormKind::Sobolev => "sobolev",
            NormKind::Modulation => "modulation",
        }
    }
}

fn default_norms() -> Vec<NormKind> {
    vec![NormKind::Amalgam]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub spectrum: SpectrumSpec,
    pub p: ExponentValue,
    pub q: ExponentValue,
    pub s: f64,
    #[serde(default = "default_norms")]
    pub norms: Vec<NormKind>,
    pub quad_density: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateConfig {
    pub spectrum: SpectrumSpec,
    pub t: f64,
    pub grid: GridSpec,
    /// Initial Simpson panel count for the oracle.
    pub time_steps: Option<usize>,
    /// Series threshold for the time kernel.
    pub epsilon: Option<f64>,
    pub quad_density: Option<usize>,
}

/// One time or a list of times.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Times {
    One(f64),
    Many(Vec<f64>),
}

impl Times {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Times::One(t) => vec![*t],
            Times::Many(ts) => ts.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub t: Times,
    pub n_list: Vec<u64>,
    pub p: ExponentValue,
    pub q: ExponentValue,
    pub s: f64,
    pub quad_density: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub xi_min: f64,
    pub xi_max: f64,
    pub samples: usize,
    pub tolerance: Option<f64>,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            xi_min: -8.0,
            xi_max: 8.0,
            samples: 10_001,
            tolerance: None,
        }
    }
}

pub fn amalgam_params(
    p: ExponentValue,
    q: ExponentValue,
    s: f64,
    density: Option<usize>,
) -> Result<AmalgamParams, CliError> {
    let params = AmalgamParams::new(p.0, q.0, s).map_err(|e| CliError::config("p/q/s", e))?;
    match density {
        Some(d) => params
            .with_quad_density(d)
            .map_err(|e| CliError::config("quad_density", e)),
        None => Ok(params),
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

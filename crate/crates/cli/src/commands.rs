use kdvb_core::kdvb::{second_iterate_closed_form, second_iterate_oracle, KernelOptions, OracleOptions};
use kdvb_core::norms::{
    amalgam_norm, build_partition, fourier_lebesgue_norm, modulation_norm, sobolev_norm, AmalgamParams, BumpProfile,
    Exponent,
};
use kdvb_core::spectral::{AsSpectrum, Quadrature};
use kdvb_core::witness::{assemble_report, validate_sweep, witness_row, Verdict, WitnessOptions, WitnessReport};
use kdvb_core::Error;
use rayon::prelude::*;

use crate::config::{amalgam_params, IterateConfig, NormConfig, NormKind, PartitionConfig, WitnessConfig};
use crate::report::{Cell, Table};
use crate::CliError;

/// Relative oracle mismatch allowed by `iterate --oracle`.
pub const ORACLE_TOLERANCE: f64 = 1e-6;
/// Below this modulus the oracle mismatch is measured absolutely.
const ORACLE_FLOOR: f64 = 1e-10;
const PARTITION_TOLERANCE: f64 = 1e-12;

/// A finished command: the table to write and, if a check failed, why.
pub struct Run {
    pub table: Table,
    pub failure: Option<String>,
}

impl Run {
    fn ok(table: Table) -> Self {
        Self { table, failure: None }
    }
}

fn exponent_cell(e: Exponent) -> Cell {
    Cell::Float(e.as_f64())
}

fn not_applicable() -> Cell {
    Cell::Text("NA".into())
}

pub fn norm(cfg: &NormConfig, density: Option<usize>) -> Result<Run, CliError> {
    let params = amalgam_params(cfg.p, cfg.q, cfg.s, density.or(cfg.quad_density))?;
    let spectrum = cfg.spectrum.build()?;
    if cfg.norms.is_empty() {
        return Err(CliError::Usage("norms: list at least one norm".into()));
    }
    let mut table = Table::new("norm", &["norm", "p", "q", "s", "value"]);
    for kind in &cfg.norms {
        let (p, q, value) = evaluate_norm(*kind, &spectrum, &params)?;
        table.push(vec![kind.name().into(), p, q, params.s.into(), value.into()]);
    }
    Ok(Run::ok(table))
}

fn evaluate_norm(kind: NormKind, f: &impl AsSpectrum, params: &AmalgamParams) -> Result<(Cell, Cell, f64), CliError> {
    let fail = |e: Error| CliError::config("norms", e);
    Ok(match kind {
        NormKind::Amalgam => (
            exponent_cell(params.p),
            exponent_cell(params.q),
            amalgam_norm(f, params).map_err(fail)?,
        ),
        NormKind::FourierLebesgue => (
            not_applicable(),
            exponent_cell(params.q),
            fourier_lebesgue_norm(f, params.q, params.s, &params.quad).map_err(fail)?,
        ),
        NormKind::Sobolev => (
            not_applicable(),
            Cell::Float(2.0),
            sobolev_norm(f, params.s, &params.quad).map_err(fail)?,
        ),
        NormKind::Modulation => {
            let windows = build_partition(BumpProfile::default()).map_err(fail)?;
            let v = modulation_norm(f, params, &windows).map_err(|e| match e {
                Error::UnsupportedParameter(msg) => CliError::Usage(msg),
                other => fail(other),
            })?;
            (exponent_cell(params.p), exponent_cell(params.q), v)
        }
    })
}

/// `(xi, value, (oracle mismatch, converged))`.
type IterateRow = (f64, num_complex::Complex64, Option<(f64, bool)>);

pub fn iterate(cfg: &IterateConfig, density: Option<usize>, with_oracle: bool) -> Result<Run, CliError> {
    let h = cfg.spectrum.piecewise()?;
    let grid = cfg.grid.build()?;
    if !(cfg.t >= 0.0 && cfg.t.is_finite()) {
        return Err(CliError::Usage(format!("t: need a finite t >= 0, got {}", cfg.t)));
    }
    if let Some((lo, hi)) = h.support().bounds() {
        let (lo, hi) = (2.0 * lo, 2.0 * hi);
        if lo < grid.xi_min() || hi > grid.xi_max() {
            let e = Error::SupportOverflow {
                lo,
                hi,
                xi_min: grid.xi_min(),
                xi_max: grid.xi_max(),
            };
            return Err(CliError::config("grid", e));
        }
    }
    let quad = match density.or(cfg.quad_density) {
        Some(d) => Quadrature::new(d).map_err(|e| CliError::config("quad_density", e))?,
        None => Quadrature::default(),
    };
    let mut kernel = KernelOptions {
        quad,
        ..Default::default()
    };
    if let Some(eps) = cfg.epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(CliError::Usage(format!("epsilon: must be positive, got {eps}")));
        }
        kernel.epsilon = eps;
    }
    let mut oracle = OracleOptions {
        quad,
        ..Default::default()
    };
    if let Some(steps) = cfg.time_steps {
        if steps < 2 || !steps.is_multiple_of(2) || steps > oracle.max_steps {
            return Err(CliError::Usage(format!(
                "time_steps: need an even count in [2, {}], got {steps}",
                oracle.max_steps
            )));
        }
        oracle.initial_steps = steps;
    }

    let points: Vec<f64> = grid.points().collect();
    let rows: Vec<IterateRow> = points
        .par_iter()
        .map(|&xi| {
            let v = second_iterate_closed_form(&h, cfg.t, xi, &kernel)?;
            let check = if with_oracle {
                let o = second_iterate_oracle(&h, cfg.t, xi, &oracle)?;
                Some(((v - o.value).norm() / o.value.norm().max(ORACLE_FLOOR), o.converged))
            } else {
                None
            };
            Ok((xi, v, check))
        })
        .collect::<Result<_, Error>>()
        .map_err(|e| CliError::config("iterate", e))?;

    let mut columns = vec!["xi", "re", "im", "abs"];
    if with_oracle {
        columns.push("oracle_mismatch");
    }
    let mut table = Table::new("iterate", &columns);
    let mut worst: f64 = 0.0;
    let mut unconverged = 0usize;
    for (xi, v, check) in rows {
        let mut row: Vec<Cell> = vec![xi.into(), v.re.into(), v.im.into(), v.norm().into()];
        if let Some((mismatch, converged)) = check {
            worst = worst.max(mismatch);
            unconverged += usize::from(!converged);
            row.push(mismatch.into());
        }
        table.push(row);
    }
    let failure = if !with_oracle {
        None
    } else if unconverged > 0 {
        Some(format!("oracle did not converge at {unconverged} grid points"))
    } else if worst >= ORACLE_TOLERANCE {
        Some(format!("oracle mismatch {worst:e} exceeds {ORACLE_TOLERANCE:e}"))
    } else {
        eprintln!("oracle: max mismatch {worst:e}");
        None
    };
    Ok(Run { table, failure })
}

const WITNESS_COLUMNS: [&str; 10] = [
    "N",
    "t",
    "p",
    "q",
    "s",
    "phi_norm",
    "a2_box0_lower",
    "kxi_min_measure",
    "threshold_ok",
    "verdict",
];

pub fn witness(cfg: &WitnessConfig, density: Option<usize>, verify: bool) -> Result<Run, CliError> {
    let params = amalgam_params(cfg.p, cfg.q, cfg.s, density.or(cfg.quad_density))?;
    if verify && params.s >= -1.0 {
        return Err(CliError::Usage(format!(
            "s: witness verify needs s < -1 (got {}); use witness scan for a report",
            params.s
        )));
    }
    let times = cfg.t.to_vec();
    if times.is_empty() {
        return Err(CliError::Usage("t: list at least one time".into()));
    }
    for &t in &times {
        validate_sweep(t, &cfg.n_list).map_err(|e| match e {
            Error::BelowThreshold { .. } => CliError::config("n_list", e),
            Error::Config(_) => CliError::config("n_list", e),
            other => CliError::config("t", other),
        })?;
    }
    let mut opts = WitnessOptions::default();
    opts.kernel.quad = params.quad;

    let cells: Vec<(f64, u64)> = times
        .iter()
        .flat_map(|&t| cfg.n_list.iter().map(move |&n| (t, n)))
        .collect();
    let rows: Vec<WitnessReport> = cells
        .par_iter()
        .map(|&(t, n)| witness_row(n, t, &params, &opts))
        .collect::<Result<_, Error>>()
        .map_err(|e| CliError::config("witness", e))?;

    let mut table = Table::new(if verify { "witness verify" } else { "witness scan" }, &WITNESS_COLUMNS);
    let mut failed = Vec::new();
    for (chunk, &t) in rows.chunks(cfg.n_list.len()).zip(&times) {
        let report = assemble_report(chunk.to_vec(), params.s);
        // scan is report-only
        let verdict = if verify { report.verdict } else { Verdict::Inapplicable };
        if verify && verdict != Verdict::Pass {
            failed.push(t);
        }
        for r in &report.rows {
            table.push(vec![
                r.n.into(),
                r.t.into(),
                exponent_cell(r.p),
                exponent_cell(r.q),
                r.s.into(),
                r.phi_norm.into(),
                r.a2_box0_lower.into(),
                r.kxi_min_measure.into(),
                r.threshold_ok.into(),
                verdict.to_string().into(),
            ]);
        }
    }
    let failure = (!failed.is_empty()).then(|| format!("witness check failed at t = {failed:?}"));
    Ok(Run { table, failure })
}

pub fn partition_check(cfg: &PartitionConfig) -> Result<Run, CliError> {
    if !(cfg.xi_min < cfg.xi_max) || !cfg.xi_min.is_finite() || !cfg.xi_max.is_finite() {
        return Err(CliError::Usage(format!(
            "xi_min/xi_max: need a finite range with xi_min < xi_max, got [{}, {}]",
            cfg.xi_min, cfg.xi_max
        )));
    }
    if cfg.samples < 2 {
        return Err(CliError::Usage(format!(
            "samples: need at least 2, got {}",
            cfg.samples
        )));
    }
    let tol = cfg.tolerance.unwrap_or(PARTITION_TOLERANCE);
    let windows = build_partition(BumpProfile::default()).map_err(|e| CliError::config("profile", e))?;
    let step = (cfg.xi_max - cfg.xi_min) / (cfg.samples - 1) as f64;
    let mut worst: f64 = 0.0;
    let mut worst_xi = cfg.xi_min;
    let mut max_active = 0;
    for k in 0..cfg.samples {
        let xi = cfg.xi_min + k as f64 * step;
        let dev = (windows.partition_sum(xi) - 1.0).abs();
        if dev > worst {
            worst = dev;
            worst_xi = xi;
        }
        max_active = max_active.max(windows.active(xi).len());
    }
    let ok = worst <= tol;
    let mut table = Table::new(
        "partition check",
        &[
            "xi_min",
            "xi_max",
            "samples",
            "max_deviation",
            "worst_xi",
            "max_active",
            "tolerance",
            "ok",
        ],
    );
    table.push(vec![
        cfg.xi_min.into(),
        cfg.xi_max.into(),
        (cfg.samples as u64).into(),
        worst.into(),
        worst_xi.into(),
        (max_active as u64).into(),
        tol.into(),
        ok.into(),
    ]);
    let failure = (!ok).then(|| format!("partition of unity off by {worst:e} at xi = {worst_xi}"));
    Ok(Run { table, failure })
}

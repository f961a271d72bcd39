//! Execute one configured flow run: integrate, evaluate verdicts, and write
//! the trajectory CSV and summary JSON.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use daflab_core::functionals::{
    check_conservation, check_dilaton_bounds, check_dirichlet_monotone, check_max_principle,
    check_monotone_anomaly, check_monotone_dual, format_sci17, monitor_closure, monitor_names,
    stationary_check, DilatonBound, MonitorSeries, Verdict,
};
use daflab_core::grid::{integrate, FlowTrajectory, IntegrateOptions};
use daflab_core::reductions::{Reduction, ReductionKind};

use crate::config::ExperimentConfig;

pub struct RunOutcome {
    pub reduction: Reduction,
    pub trajectory: FlowTrajectory,
    pub series: MonitorSeries,
    pub summary: Value,
}

/// Integrate the configured flow and evaluate every verdict. Pure compute;
/// no filesystem access.
pub fn execute_run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let spec = cfg.run.to_reduction_spec(cfg.seed);
    let (reduction, field0) = spec.build().context("building reduction")?;
    let opts = IntegrateOptions {
        t_end: cfg.run.t_end,
        controller: cfg.run.controller(),
        floor: cfg.run.floor,
        ceiling: cfg.run.ceiling,
    };
    let names = monitor_names(&reduction, &cfg.run.alphas);
    let trajectory = {
        let mut monitor = monitor_closure(&reduction, &cfg.run.alphas);
        integrate(&reduction, &field0, &opts, names, &mut monitor)
    };
    let series = MonitorSeries::from_trajectory(&trajectory, &cfg.run.alphas);
    let summary = build_summary(cfg, &reduction, &trajectory, &series);
    Ok(RunOutcome {
        reduction,
        trajectory,
        series,
        summary,
    })
}

fn combine_range_verdicts(verdicts: &[Verdict]) -> Value {
    let asserted: Vec<&Verdict> = verdicts
        .iter()
        .filter(|v| !matches!(v, Verdict::Recorded))
        .collect();
    if asserted.is_empty() {
        return if verdicts.is_empty() {
            Value::Null
        } else {
            Value::String("RECORDED".into())
        };
    }
    if asserted.iter().any(|v| !v.passed()) {
        Value::String("FAIL".into())
    } else {
        Value::String("PASS".into())
    }
}

fn build_summary(
    cfg: &ExperimentConfig,
    reduction: &Reduction,
    trajectory: &FlowTrajectory,
    series: &MonitorSeries,
) -> Value {
    let kind = reduction.kind();

    let monotone_dual = if kind.is_dual_flow() {
        let verdicts: Vec<Verdict> = (0..series.alphas.len())
            .map(|i| check_monotone_dual(series, i, reduction.ambient_n()))
            .collect();
        combine_range_verdicts(&verdicts)
    } else {
        Value::Null
    };
    let monotone_anomaly = if kind == ReductionKind::AnomalyCkSemiflat {
        let verdicts: Vec<Verdict> = (0..series.alphas.len())
            .map(|i| check_monotone_anomaly(series, i))
            .collect();
        combine_range_verdicts(&verdicts)
    } else {
        Value::Null
    };
    let bound_kind = if kind.is_dual_flow() {
        DilatonBound::DualLower
    } else {
        DilatonBound::AnomalyUpper
    };
    let dilaton_bound = check_dilaton_bounds(series, bound_kind);
    let conservation = if series.conservation_names.is_empty() {
        Value::Null
    } else {
        Value::String(
            check_conservation(series, cfg.run.conservation_tol)
                .as_str()
                .into(),
        )
    };
    let max_principle = match reduction.max_principle_bounds() {
        Some(bounds) => Value::String(check_max_principle(series, bounds, 1e-8).as_str().into()),
        None => Value::Null,
    };
    let dirichlet = if reduction.dirichlet_applicable() {
        Value::String(check_dirichlet_monotone(series).as_str().into())
    } else {
        Value::Null
    };

    let closed_form_error = closed_form_error(reduction, series);
    let stat = stationary_check(reduction, &trajectory.final_field, 1e-8);

    json!({
        "kind": kind.as_str(),
        "seed": cfg.seed,
        "t_final": trajectory.final_time,
        "singularity": trajectory.singularity.as_ref().map(|s| json!({
            "t_star": s.t_star,
            "type": s.kind.as_str(),
            "witness_index": s.witness_index,
            "witness_value": s.witness_value,
            "dt_at_stop": s.dt_at_stop,
        })).unwrap_or(Value::Null),
        "verdicts": {
            "monotone_dual": monotone_dual,
            "monotone_anomaly": monotone_anomaly,
            "dilaton_bound": dilaton_bound.as_str(),
            "conservation": conservation,
            "max_principle": max_principle,
            "dirichlet_monotone": dirichlet,
        },
        "closed_form_error": closed_form_error.map(Value::from).unwrap_or(Value::Null),
        "stationary": {
            "velocity_norm": stat.velocity_norm,
            "flat_residual": stat.flat_residual,
            "converged": stat.converged,
        },
    })
}

/// Max deviation of the evolved scalar from the attached closed form, over
/// the first 90% of the lifetime (the singular tail is excluded: there the
/// comparison drops below the floor scale).
fn closed_form_error(reduction: &Reduction, series: &MonitorSeries) -> Option<f64> {
    reduction.closed_form(0.0)?;
    let t_cut = match reduction {
        Reduction::Iwasawa(f) => 0.9 * f.extinction_time,
        Reduction::Sl2c(f) => 0.9 * f.extinction_time,
        _ => f64::INFINITY,
    };
    let mut worst: f64 = 0.0;
    for (i, &t) in series.times.iter().enumerate() {
        if t > t_cut {
            break;
        }
        let exact = reduction.closed_form(t)?;
        worst = worst.max((series.min_field[i] - exact).abs());
    }
    Some(worst)
}

// ---------------------------------------------------------------------------
// artifacts
// ---------------------------------------------------------------------------

/// Refuse to write into an occupied output directory unless overwriting was
/// requested.
pub fn prepare_out_dir(out_dir: &Path, overwrite: bool) -> Result<()> {
    let occupied = out_dir.join("summary.json").exists()
        || out_dir.join("trajectory.csv").exists()
        || out_dir.join("report.json").exists()
        || out_dir.join("index.json").exists();
    if occupied && !overwrite {
        bail!(
            "output directory {} already holds run artifacts (pass --overwrite to replace)",
            out_dir.display()
        );
    }
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    Ok(())
}

/// Per-step 0/1 flags for the CSV: each flag reports whether the property
/// held at that step.
fn per_step_flags(
    cfg: &ExperimentConfig,
    reduction: &Reduction,
    series: &MonitorSeries,
) -> Vec<[u8; 4]> {
    let n = series.len();
    let ambient = reduction.ambient_n();
    let in_range: Vec<usize> = (0..series.alphas.len())
        .filter(|&i| {
            if reduction.kind().is_dual_flow() {
                series.alphas[i] <= 2.0 / (ambient as f64 - 1.0)
            } else {
                series.alphas[i] > 2.0
            }
        })
        .collect();
    let bounds = reduction.max_principle_bounds();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let monotone_ok = if i == 0 {
            true
        } else {
            in_range.iter().all(|&a| {
                let prev = series.f_alpha[i - 1][a];
                let cur = series.f_alpha[i][a];
                cur - prev <= 1e-8 * prev.abs() + 1e-10 * (1.0 + prev.abs())
            })
        };
        let dilaton_ok = if reduction.kind().is_dual_flow() {
            series.min_dilaton[i] >= series.min_dilaton[0] - 1e-8
        } else {
            series.max_dilaton[i] <= series.max_dilaton[0] + 1e-8
        };
        let conservation_ok = series.conservation_names.iter().enumerate().all(|(c, _)| {
            let c0 = series.conservation[0][c];
            (series.conservation[i][c] - c0).abs() / c0.abs().max(1e-12)
                <= cfg.run.conservation_tol
        });
        let max_principle_ok = match bounds {
            Some((lo, hi)) => {
                series.min_field[i] >= lo - 1e-8 && series.max_field[i] <= hi + 1e-8
            }
            None => true,
        };
        out.push([
            monotone_ok as u8,
            dilaton_ok as u8,
            conservation_ok as u8,
            max_principle_ok as u8,
        ]);
    }
    out
}

/// Write trajectory.csv and summary.json; returns their paths.
pub fn write_artifacts(
    cfg: &ExperimentConfig,
    outcome: &RunOutcome,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    let series = &outcome.series;
    let flags = per_step_flags(cfg, &outcome.reduction, series);

    let mut csv = String::new();
    csv.push_str("t,dt");
    for a in &series.alphas {
        csv.push_str(&format!(",F_alpha[{a}]"));
    }
    csv.push_str(",min_dilaton,max_dilaton");
    for c in &series.conservation_names {
        csv.push_str(&format!(",conservation[{c}]"));
    }
    csv.push_str(",dirichlet_energy,flag_monotone,flag_dilaton_bound,flag_conservation,flag_max_principle\n");
    for (i, flag_row) in flags.iter().enumerate() {
        csv.push_str(&format_sci17(series.times[i]));
        csv.push(',');
        csv.push_str(&format_sci17(series.dts[i]));
        for a in 0..series.alphas.len() {
            csv.push(',');
            csv.push_str(&format_sci17(series.f_alpha[i][a]));
        }
        csv.push(',');
        csv.push_str(&format_sci17(series.min_dilaton[i]));
        csv.push(',');
        csv.push_str(&format_sci17(series.max_dilaton[i]));
        for c in 0..series.conservation_names.len() {
            csv.push(',');
            csv.push_str(&format_sci17(series.conservation[i][c]));
        }
        csv.push(',');
        csv.push_str(&format_sci17(series.dirichlet[i]));
        let f = flag_row;
        csv.push_str(&format!(",{},{},{},{}\n", f[0], f[1], f[2], f[3]));
    }

    let csv_path = out_dir.join("trajectory.csv");
    fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;

    let summary_path = out_dir.join("summary.json");
    let mut body = serde_json::to_string_pretty(&outcome.summary)?;
    body.push('\n');
    fs::write(&summary_path, body)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    Ok((csv_path, summary_path))
}

/// `run` entrypoint: execute and persist; singular endings are recorded
/// outcomes, not errors.
pub fn cmd_run(cfg: &ExperimentConfig, out_dir: &Path, overwrite: bool) -> Result<RunOutcome> {
    prepare_out_dir(out_dir, overwrite)?;
    let outcome = execute_run(cfg)?;
    write_artifacts(cfg, &outcome, out_dir)?;
    Ok(outcome)
}

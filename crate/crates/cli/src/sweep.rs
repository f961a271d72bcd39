//! Parameter sweeps: independent runs over a value grid, executed on a
//! bounded worker pool, each writing its own artifact directory.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use crate::config::{apply_sweep_value, ExperimentConfig};
use crate::runner::{execute_run, prepare_out_dir, write_artifacts};

/// Thread cap: DUAL_ANOMALY_LAB_THREADS, defaulting to the machine's
/// available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("DUAL_ANOMALY_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Execute every sweep value; per-run outputs land in `run_NNN/` under the
/// sweep directory and an index.json records the grid. The exit status is
/// the worst run's.
pub fn cmd_sweep(cfg: &ExperimentConfig, out_dir: &Path, overwrite: bool) -> Result<bool> {
    let sweep = cfg
        .sweep
        .clone()
        .context("config has no [sweep] section")?;
    prepare_out_dir(out_dir, overwrite)?;

    let jobs: Vec<(usize, ExperimentConfig)> = sweep
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, apply_sweep_value(cfg, &sweep.parameter, v)))
        .collect();

    let results: Mutex<Vec<Option<Value>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let workers = thread_cap().min(jobs.len()).max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let (idx, job_cfg) = &jobs[i];
                let run_dir = out_dir.join(format!("run_{idx:03}"));
                let entry = run_one(job_cfg, &sweep.parameter, sweep.values[*idx], &run_dir);
                results.lock().unwrap()[*idx] = Some(entry);
            });
        }
    });

    let entries: Vec<Value> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|e| e.expect("every job ran"))
        .collect();
    let all_ok = entries
        .iter()
        .all(|e| e.get("ok").and_then(Value::as_bool) == Some(true));

    let index = json!({
        "parameter": sweep.parameter,
        "values": sweep.values,
        "runs": entries,
        "ok": all_ok,
    });
    let mut body = serde_json::to_string_pretty(&index)?;
    body.push('\n');
    fs::write(out_dir.join("index.json"), body)?;
    Ok(all_ok)
}

fn run_one(cfg: &ExperimentConfig, parameter: &str, value: f64, run_dir: &Path) -> Value {
    let result = (|| -> Result<Value> {
        fs::create_dir_all(run_dir)?;
        let outcome = execute_run(cfg)?;
        write_artifacts(cfg, &outcome, run_dir)?;
        let verdict_fail = outcome
            .summary
            .get("verdicts")
            .and_then(Value::as_object)
            .map(|v| v.values().any(|x| x.as_str() == Some("FAIL")))
            .unwrap_or(false);
        Ok(json!({
            "parameter": parameter,
            "value": value,
            "dir": run_dir.file_name().and_then(|s| s.to_str()).unwrap_or(""),
            "ok": !verdict_fail,
            "t_final": outcome.summary.get("t_final").cloned().unwrap_or(Value::Null),
            "singularity": outcome.summary.get("singularity").cloned().unwrap_or(Value::Null),
            "closed_form_error": outcome.summary.get("closed_form_error").cloned().unwrap_or(Value::Null),
            "flat_residual": outcome.summary.pointer("/stationary/flat_residual").cloned().unwrap_or(Value::Null),
            "verdicts": outcome.summary.get("verdicts").cloned().unwrap_or(Value::Null),
        }))
    })();
    match result {
        Ok(v) => v,
        Err(e) => json!({
            "parameter": parameter,
            "value": value,
            "dir": run_dir.file_name().and_then(|s| s.to_str()).unwrap_or(""),
            "ok": false,
            "error": e.to_string(),
        }),
    }
}

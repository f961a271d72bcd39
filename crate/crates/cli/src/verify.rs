//! `verify-algebra`: run the full pointwise identity suite and emit a
//! structured report.

use std::fs;
use std::path::Path;

use anyhow::Result;
use serde_json::json;

use daflab_core::identities::{run_identity_suite, SuiteOptions, SuiteReport};

use crate::runner::prepare_out_dir;

pub struct VerifyArgs {
    pub n_list: Vec<u8>,
    pub seeds: u32,
    pub tolerance: f64,
    /// negative-control hook: force the named identity to fail
    pub flip: Option<String>,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        let d = SuiteOptions::default();
        VerifyArgs {
            n_list: d.n_list,
            seeds: d.seeds,
            tolerance: d.tolerance,
            flip: None,
        }
    }
}

pub fn cmd_verify_algebra(
    args: &VerifyArgs,
    out_dir: &Path,
    overwrite: bool,
) -> Result<SuiteReport> {
    prepare_out_dir(out_dir, overwrite)?;
    let opts = SuiteOptions {
        n_list: args.n_list.clone(),
        seeds: args.seeds,
        tolerance: args.tolerance,
        flip: args.flip.clone(),
    };
    let report = run_identity_suite(&opts)?;
    write_report(&report, out_dir)?;
    Ok(report)
}

fn write_report(report: &SuiteReport, out_dir: &Path) -> Result<()> {
    let entries: Vec<_> = report
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "identity": o.name,
                "n": o.n,
                "seeds": o.seeds,
                "max_residual": o.max_residual,
                "tolerance": o.tolerance,
                "passed": o.passed,
                "note": o.note,
            })
        })
        .collect();
    let body = json!({ "identities": entries, "passed": report.passed() });
    let mut text = serde_json::to_string_pretty(&body)?;
    text.push('\n');
    fs::write(out_dir.join("report.json"), text)?;

    let mut table = String::new();
    table.push_str(&format!(
        "{:<34} {:>2} {:>6} {:>13} {:>6}\n",
        "identity", "n", "seeds", "max_residual", "pass"
    ));
    for o in &report.outcomes {
        table.push_str(&format!(
            "{:<34} {:>2} {:>6} {:>13.3e} {:>6}\n",
            o.name,
            o.n,
            o.seeds,
            o.max_residual,
            if o.passed { "ok" } else { "FAIL" }
        ));
    }
    fs::write(out_dir.join("report.txt"), table)?;
    Ok(())
}

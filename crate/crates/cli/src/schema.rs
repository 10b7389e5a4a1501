//! Machine-readable description of each experiment's config and files.

use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::output::SCHEMA_VERSION;

fn csv_columns(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::ZenoRun => &["n", "step", "t", "survival_probability"],
        Experiment::Convergence => &[
            "n",
            "survival_probability",
            "limit_error",
            "boundary_amp_left",
            "boundary_amp_right",
        ],
        Experiment::Spectrum => &["k", "eigenvalue", "continuum_value", "relative_error"],
        Experiment::SemigroupProbe => &["t", "probe", "distance"],
        Experiment::SoftCompare => &["n", "discrepancy", "generator_norm", "sharp_limit_error"],
        Experiment::DomainCheck => &[
            "rule_id",
            "A",
            "B",
            "C",
            "H",
            "hypotheses_hold",
            "verdict",
            "conclusion_holds",
            "lhs",
            "rhs",
            "witness_exponent",
        ],
    }
}

fn plot_files(e: Experiment) -> Value {
    match e {
        Experiment::ZenoRun => {
            json!([{ "name": "survival_n{n}.dat", "columns": ["t", "survival_probability"] }])
        }
        Experiment::Convergence => json!([
            { "name": "limit_error.dat", "columns": ["log10_n", "log10_limit_error"] },
            { "name": "survival.dat", "columns": ["log10_n", "survival_probability"] },
            { "name": "boundary_trace.dat", "columns": ["log10_n", "log10_boundary_amp_left", "log10_boundary_amp_right"] },
        ]),
        Experiment::Spectrum => json!([{ "name": "spectrum.dat", "columns": csv_columns(e) }]),
        Experiment::SemigroupProbe => {
            json!([{ "name": "probe_{probe}.dat", "columns": ["log10_t", "log10_distance"] }])
        }
        Experiment::SoftCompare => json!([{
            "name": "soft_compare.dat",
            "columns": ["log10_n", "log10_discrepancy", "log10_sharp_limit_error"],
        }]),
        Experiment::DomainCheck => json!([]),
    }
}

pub fn schema(e: Experiment) -> Value {
    let report = match e {
        Experiment::DomainCheck => "array of hypothesis reports, one per exponent point",
        _ => "object with run summary values",
    };
    json!({
        "experiment": e,
        "schema_version": SCHEMA_VERSION,
        "config_keys": e.keys(),
        "defaults": ExperimentConfig::default_for(e),
        "results_csv": {
            "first_line": format!("# zeno-lab {e} schema v{SCHEMA_VERSION}"),
            "columns": csv_columns(e),
            "number_format": "17 significant digits, exponent notation",
        },
        "report_json": report,
        "plot_files": plot_files(e),
        "manifest_json": ["tool", "tool_version", "experiment", "config_hash", "timestamp_unix", "config", "files", "guards", "warnings"],
    })
}

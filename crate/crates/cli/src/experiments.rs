//! Runs a validated plan into an ordered set of output files.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use zeno_core::domain::{check_rule, measuror_requirement, HypothesisReport, Role, RuleId};
use zeno_core::grid::{CounterRegion, GridSpec};
use zeno_core::propagator::{dirichlet_spectrum, Dispersion, HamiltonianRep};
use zeno_core::zeno::{
    run_zeno, semigroup_probe, soft_zeno_compare, zeno_limit_error, ZenoResult, ZenoRunConfig,
    EDGE_BAND, EDGE_MASS_LIMIT,
};

use crate::config::{Body, Experiment, Plan};
use crate::output::{num, opt_num, OutputBuffer, PlotData, Table};
use crate::RunError;

/// Name of the only numerical guard.
pub const EDGE_GUARD: &str = "box-edge-mass";

/// How close the state came to the edge of a periodic box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuardStatus {
    pub name: &'static str,
    pub limit: f64,
    pub band: f64,
    pub observed: f64,
    pub tripped: bool,
}

impl GuardStatus {
    fn edge(observed: f64) -> Self {
        GuardStatus {
            name: EDGE_GUARD,
            limit: EDGE_MASS_LIMIT,
            band: EDGE_BAND,
            observed,
            tripped: observed > EDGE_MASS_LIMIT,
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: OutputBuffer,
    pub guards: Vec<GuardStatus>,
}

fn core(e: zeno_core::error::Error) -> RunError {
    RunError::Numerical(e.to_string())
}

fn log10(x: f64) -> f64 {
    x.log10()
}

fn is_free(h: &HamiltonianRep) -> bool {
    matches!(h, HamiltonianRep::FreePeriodic { .. })
}

pub fn execute(plan: &Plan) -> Result<Outcome, RunError> {
    let mut out = Outcome::default();
    let experiment = plan.resolved.experiment;
    match &plan.body {
        Body::Zeno { run, trace } => {
            let res = run_zeno(run).map_err(core)?;
            if res.edge_guarded {
                out.guards.push(GuardStatus::edge(res.max_edge_mass));
            }
            if *trace {
                zeno_run_files(run, &res, plan.emit_plot_data, &mut out.files)?;
            } else {
                convergence_files(&res, plan.emit_plot_data, &mut out.files)?;
            }
        }
        Body::Spectrum {
            grid,
            region,
            count,
            dispersion,
        } => {
            spectrum_files(
                grid,
                region,
                *count,
                *dispersion,
                plan.emit_plot_data,
                &mut out.files,
            )?;
        }
        Body::Probe {
            hamiltonian,
            measuror,
            probes,
            t_list,
            n_fixed,
        } => {
            let rows =
                semigroup_probe(hamiltonian, measuror, probes, t_list, *n_fixed).map_err(core)?;
            if is_free(hamiltonian) {
                out.guards.push(GuardStatus::edge(
                    rows.iter().map(|r| r.max_edge_mass).fold(0.0, f64::max),
                ));
            }
            let mut table = Table::new(experiment.as_str(), &["t", "probe", "distance"]);
            for r in &rows {
                table.row(&[num(r.t), r.probe.clone(), num(r.distance)]);
            }
            out.files.push("results.csv", table.into_bytes());
            let summary: Vec<_> = probes
                .iter()
                .map(|(name, _)| {
                    let mine: Vec<_> = rows.iter().filter(|r| &r.probe == name).collect();
                    json!({
                        "probe": name,
                        "distance_at_largest_t": mine.first().map(|r| r.distance),
                        "distance_at_smallest_t": mine.last().map(|r| r.distance),
                    })
                })
                .collect();
            out.files.push_json(
                "report.json",
                &json!({ "n_fixed": n_fixed, "probes": summary }),
            )?;
            if plan.emit_plot_data {
                for (name, _) in probes {
                    let mut plot = PlotData::new(&["log10_t", "log10_distance"]);
                    for r in rows.iter().filter(|r| &r.probe == name) {
                        plot.row(&[log10(r.t), log10(r.distance)]);
                    }
                    out.files
                        .push(format!("probe_{name}.dat"), plot.into_bytes());
                }
            }
        }
        Body::Soft {
            hamiltonian,
            measuror,
            sharp,
            initial,
            t_total,
            n_list,
            max_dimension,
        } => {
            let rows: Vec<(usize, f64, f64, f64, f64)> = n_list
                .par_iter()
                .map(|&n| {
                    let soft = soft_zeno_compare(
                        initial,
                        hamiltonian,
                        measuror,
                        *t_total,
                        n,
                        *max_dimension,
                    )?;
                    let sharp_err =
                        zeno_limit_error(initial, hamiltonian, sharp, *t_total, n, *max_dimension)?;
                    Ok((
                        n,
                        soft.discrepancy,
                        soft.generator_state.norm(),
                        sharp_err,
                        soft.max_edge_mass,
                    ))
                })
                .collect::<Result<_, zeno_core::error::Error>>()
                .map_err(core)?;
            if is_free(hamiltonian) {
                out.guards.push(GuardStatus::edge(
                    rows.iter().map(|r| r.4).fold(0.0, f64::max),
                ));
            }
            let mut table = Table::new(
                experiment.as_str(),
                &["n", "discrepancy", "generator_norm", "sharp_limit_error"],
            );
            for &(n, d, g, s, _) in &rows {
                table.row(&[n.to_string(), num(d), num(g), num(s)]);
            }
            out.files.push("results.csv", table.into_bytes());
            let last = rows.last().expect("validated non-empty");
            out.files.push_json(
                "report.json",
                &json!({
                    "measuror": measuror.kind().name(),
                    "n_max": last.0,
                    "discrepancy_at_n_max": last.1,
                    "sharp_limit_error_at_n_max": last.3,
                    "initial_norm": initial.norm(),
                }),
            )?;
            if plan.emit_plot_data {
                let mut plot =
                    PlotData::new(&["log10_n", "log10_discrepancy", "log10_sharp_limit_error"]);
                for &(n, d, _, s, _) in &rows {
                    plot.row(&[log10(n as f64), log10(d), log10(s)]);
                }
                out.files.push("soft_compare.dat", plot.into_bytes());
            }
        }
        Body::Domain { rule, points } => domain_files(*rule, points, &mut out.files)?,
    }
    Ok(out)
}

fn convergence_files(
    res: &ZenoResult,
    plot: bool,
    files: &mut OutputBuffer,
) -> Result<(), RunError> {
    let mut table = Table::new(
        Experiment::Convergence.as_str(),
        &[
            "n",
            "survival_probability",
            "limit_error",
            "boundary_amp_left",
            "boundary_amp_right",
        ],
    );
    for r in &res.records {
        table.row(&[
            r.n.to_string(),
            num(r.survival_probability),
            opt_num(r.limit_error),
            num(r.boundary_amp.0),
            num(r.boundary_amp.1),
        ]);
    }
    files.push("results.csv", table.into_bytes());
    files.push_json("report.json", &zeno_summary(res))?;
    if plot {
        let mut err = PlotData::new(&["log10_n", "log10_limit_error"]);
        let mut surv = PlotData::new(&["log10_n", "survival_probability"]);
        let mut trace = PlotData::new(&[
            "log10_n",
            "log10_boundary_amp_left",
            "log10_boundary_amp_right",
        ]);
        for r in &res.records {
            let x = log10(r.n as f64);
            err.row(&[x, r.limit_error.map_or(f64::NAN, log10)]);
            surv.row(&[x, r.survival_probability]);
            trace.row(&[x, log10(r.boundary_amp.0), log10(r.boundary_amp.1)]);
        }
        files.push("limit_error.dat", err.into_bytes());
        files.push("survival.dat", surv.into_bytes());
        files.push("boundary_trace.dat", trace.into_bytes());
    }
    Ok(())
}

fn zeno_run_files(
    run: &ZenoRunConfig,
    res: &ZenoResult,
    plot: bool,
    files: &mut OutputBuffer,
) -> Result<(), RunError> {
    let traces = res.traces.as_ref().expect("traces requested");
    let mut table = Table::new(
        Experiment::ZenoRun.as_str(),
        &["n", "step", "t", "survival_probability"],
    );
    for (&n, trace) in run.n_list.iter().zip(traces) {
        let dt = run.t_total / n as f64;
        for (i, &p) in trace.iter().enumerate() {
            let step = i + 1;
            table.row(&[
                n.to_string(),
                step.to_string(),
                num(step as f64 * dt),
                num(p),
            ]);
        }
    }
    files.push("results.csv", table.into_bytes());
    files.push_json("report.json", &zeno_summary(res))?;
    if plot {
        for (&n, trace) in run.n_list.iter().zip(traces) {
            let dt = run.t_total / n as f64;
            let mut p = PlotData::new(&["t", "survival_probability"]);
            p.row(&[0.0, res.initial_survival]);
            for (i, &s) in trace.iter().enumerate() {
                p.row(&[(i + 1) as f64 * dt, s]);
            }
            files.push(format!("survival_n{n}.dat"), p.into_bytes());
        }
    }
    Ok(())
}

fn zeno_summary(res: &ZenoResult) -> serde_json::Value {
    let last = res.records.last().expect("validated non-empty");
    json!({
        "initial_survival": res.initial_survival,
        "n_max": last.n,
        "survival_at_n_max": last.survival_probability,
        "limit_error_at_n_max": last.limit_error,
        "monotone_from": res.monotone_from,
        "max_step_increase": res.records.iter().map(|r| r.max_step_increase).fold(0.0, f64::max),
        "max_edge_mass": res.max_edge_mass,
        "edge_guarded": res.edge_guarded,
    })
}

fn spectrum_files(
    grid: &GridSpec,
    region: &CounterRegion,
    count: usize,
    dispersion: Dispersion,
    plot: bool,
    files: &mut OutputBuffer,
) -> Result<(), RunError> {
    let values = dirichlet_spectrum(grid, region, count, dispersion).map_err(core)?;
    let len = region.length();
    let columns = ["k", "eigenvalue", "continuum_value", "relative_error"];
    let mut table = Table::new(Experiment::Spectrum.as_str(), &columns);
    let mut data = PlotData::new(&columns);
    let mut worst: f64 = 0.0;
    for (i, &lam) in values.iter().enumerate() {
        let k = (i + 1) as f64;
        let exact = (k * PI / len).powi(2);
        let rel = (lam - exact).abs() / exact;
        worst = worst.max(rel);
        table.row(&[(i + 1).to_string(), num(lam), num(exact), num(rel)]);
        data.row(&[k, lam, exact, rel]);
    }
    files.push("results.csv", table.into_bytes());
    files.push_json(
        "report.json",
        &json!({
            "counter": [region.a, region.b],
            "counter_nodes": region.interior_count(grid),
            "dispersion": dispersion,
            "max_relative_error": worst,
        }),
    )?;
    if plot {
        files.push("spectrum.dat", data.into_bytes());
    }
    Ok(())
}

fn domain_files(
    rule: RuleId,
    points: &[std::collections::BTreeMap<Role, zeno_core::domain::Exponent>],
    files: &mut OutputBuffer,
) -> Result<(), RunError> {
    let reports: Vec<HypothesisReport> = points
        .par_iter()
        .map(|p| check_rule(rule, p))
        .collect::<Result<_, _>>()
        .map_err(core)?;
    let mut table = Table::new(
        Experiment::DomainCheck.as_str(),
        &[
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
    );
    for r in &reports {
        let role = |x: Role| {
            r.exponents
                .get(&x)
                .map_or_else(String::new, |e| e.to_string())
        };
        table.row(&[
            rule.as_str().to_string(),
            role(Role::A),
            role(Role::B),
            role(Role::C),
            role(Role::H),
            r.hypotheses_hold.to_string(),
            serde_json::to_value(r.verdict)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            r.conclusion.holds.to_string(),
            r.lhs.domain.to_string(),
            r.rhs.domain.to_string(),
            r.witness
                .as_ref()
                .map_or_else(String::new, |w| w.exponent.to_string()),
        ]);
    }
    files.push("results.csv", table.into_bytes());
    files.push_json("report.json", &reports)?;
    if rule == RuleId::Corollary42 {
        let hs: BTreeSet<_> = points
            .iter()
            .filter_map(|p| p.get(&Role::H).copied())
            .collect();
        let reqs: Vec<_> = hs.into_iter().map(measuror_requirement).collect();
        files.push_json("requirements.json", &reqs)?;
    }
    Ok(())
}

//! Experiment configuration files and their validation.
//!
//! A config is a single JSON object. Every key except `experiment` is
//! optional and falls back to a documented default; keys that the chosen
//! experiment does not read are rejected, as are unknown keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use zeno_core::domain::{standard_exponents, Exponent, Role, RuleId};
use zeno_core::grid::{CounterRegion, GridKind, GridSpec};
use zeno_core::measuror::{Measuror, MollifierProfile};
use zeno_core::propagator::{Dispersion, HamiltonianRep, DEFAULT_MAX_DIMENSION};
use zeno_core::state::{prepare_state, PrepWarning, StatePrep, StateVector};
use zeno_core::zeno::{default_probe_set, Reference, ZenoRunConfig};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ZenoRun,
    Convergence,
    Spectrum,
    SemigroupProbe,
    SoftCompare,
    DomainCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::ZenoRun,
        Experiment::Convergence,
        Experiment::Spectrum,
        Experiment::SemigroupProbe,
        Experiment::SoftCompare,
        Experiment::DomainCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::ZenoRun => "zeno-run",
            Experiment::Convergence => "convergence",
            Experiment::Spectrum => "spectrum",
            Experiment::SemigroupProbe => "semigroup-probe",
            Experiment::SoftCompare => "soft-compare",
            Experiment::DomainCheck => "domain-check",
        }
    }

    /// Optional keys this experiment reads.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::ZenoRun | Experiment::Convergence => &[
                "output_dir",
                "emit_plot_data",
                "grid",
                "counter",
                "hamiltonian",
                "measuror",
                "t_total",
                "n_list",
                "initial",
                "reference",
                "max_dimension",
                "edge_guard",
            ],
            Experiment::Spectrum => &[
                "output_dir",
                "emit_plot_data",
                "grid",
                "counter",
                "hamiltonian",
                "count",
                "max_dimension",
            ],
            Experiment::SemigroupProbe => &[
                "output_dir",
                "emit_plot_data",
                "grid",
                "counter",
                "hamiltonian",
                "measuror",
                "t_list",
                "n_fixed",
                "edge_guard",
            ],
            Experiment::SoftCompare => &[
                "output_dir",
                "emit_plot_data",
                "grid",
                "counter",
                "hamiltonian",
                "measuror",
                "t_total",
                "n_list",
                "initial",
                "max_dimension",
                "edge_guard",
            ],
            Experiment::DomainCheck => {
                &["output_dir", "emit_plot_data", "rule", "exponents", "sweep"]
            }
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.as_str()).collect();
                format!(
                    "unknown experiment `{s}`; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterSpec {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    /// `-d^2/dx^2` on a periodic box.
    Free {
        #[serde(default = "discrete")]
        dispersion: Dispersion,
    },
    /// Dirichlet Laplacian of the counter, in its sine basis.
    Dirichlet {
        #[serde(default = "discrete")]
        dispersion: Dispersion,
    },
    /// Row-major Hermitian matrix of `[re, im]` entries.
    Dense { matrix: Vec<Vec<[f64; 2]>> },
}

fn discrete() -> Dispersion {
    Dispersion::Discrete
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasurorSpec {
    Sharp,
    Mollified {
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "raised_cosine")]
        profile: MollifierProfile,
    },
    Custom {
        weights: Vec<f64>,
    },
    Identity,
}

fn default_eps() -> f64 {
    0.05
}

fn raised_cosine() -> MollifierProfile {
    MollifierProfile::RaisedCosine
}

/// What happens when the box-edge mass guard trips.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuardPolicy {
    /// Write the results, then exit with status 3.
    #[default]
    Fail,
    /// Write the results and record the trip in the manifest only.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counter: Option<CounterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measuror: Option<MeasurorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<StatePrep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_guard: Option<GuardPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_fixed: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<BTreeMap<Role, Exponent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<Exponent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit_plot_data: Option<bool>,
}

/// `16, 32, ..., 8192`.
pub fn default_n_list() -> Vec<usize> {
    (4..=13).map(|p| 1usize << p).collect()
}

/// `0.5, 0.25, ..., 0.5 / 1024`.
pub fn default_t_list() -> Vec<f64> {
    (0..=10).map(|j| 0.5 / f64::from(1u32 << j)).collect()
}

pub const DEFAULT_T_TOTAL: f64 = 0.5;
pub const DEFAULT_N_FIXED: usize = 64;
pub const DEFAULT_SPECTRUM_COUNT: usize = 3;

/// One validation finding, tied to a config key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "key `{}`: {}", self.key, self.message)
    }
}

/// Everything an experiment needs, built and checked up front.
#[derive(Debug, Clone)]
pub enum Body {
    Zeno {
        run: ZenoRunConfig,
        trace: bool,
    },
    Spectrum {
        grid: GridSpec,
        region: CounterRegion,
        count: usize,
        dispersion: Dispersion,
    },
    Probe {
        hamiltonian: HamiltonianRep,
        measuror: Measuror,
        probes: Vec<(String, StateVector)>,
        t_list: Vec<f64>,
        n_fixed: usize,
    },
    Soft {
        hamiltonian: HamiltonianRep,
        measuror: Measuror,
        sharp: Measuror,
        initial: StateVector,
        t_total: f64,
        n_list: Vec<usize>,
        max_dimension: usize,
    },
    Domain {
        rule: RuleId,
        points: Vec<BTreeMap<Role, Exponent>>,
    },
}

#[derive(Debug, Clone)]
pub struct Plan {
    /// The config with every default filled in; `output_dir` is cleared.
    pub resolved: ExperimentConfig,
    pub body: Body,
    pub emit_plot_data: bool,
    pub edge_guard: GuardPolicy,
    pub output_dir: Option<PathBuf>,
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            RunError::Config(msg) => RunError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// The config an experiment runs with when nothing else is given.
    pub fn default_for(experiment: Experiment) -> Self {
        let mut cfg = ExperimentConfig::bare(experiment);
        cfg.fill_defaults();
        cfg
    }

    fn bare(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            grid: None,
            counter: None,
            hamiltonian: None,
            measuror: None,
            t_total: None,
            n_list: None,
            initial: None,
            reference: None,
            max_dimension: None,
            edge_guard: None,
            count: None,
            t_list: None,
            n_fixed: None,
            rule: None,
            exponents: None,
            sweep: None,
            output_dir: None,
            emit_plot_data: None,
        }
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let flags = [
            ("grid", self.grid.is_some()),
            ("counter", self.counter.is_some()),
            ("hamiltonian", self.hamiltonian.is_some()),
            ("measuror", self.measuror.is_some()),
            ("t_total", self.t_total.is_some()),
            ("n_list", self.n_list.is_some()),
            ("initial", self.initial.is_some()),
            ("reference", self.reference.is_some()),
            ("max_dimension", self.max_dimension.is_some()),
            ("edge_guard", self.edge_guard.is_some()),
            ("count", self.count.is_some()),
            ("t_list", self.t_list.is_some()),
            ("n_fixed", self.n_fixed.is_some()),
            ("rule", self.rule.is_some()),
            ("exponents", self.exponents.is_some()),
            ("sweep", self.sweep.is_some()),
            ("output_dir", self.output_dir.is_some()),
            ("emit_plot_data", self.emit_plot_data.is_some()),
        ];
        flags
            .into_iter()
            .filter(|&(_, on)| on)
            .map(|(k, _)| k)
            .collect()
    }

    /// Fills every key the experiment reads with its default.
    fn fill_defaults(&mut self) {
        let keys = self.experiment.keys();
        let uses = |k: &str| keys.contains(&k);
        if uses("grid") && self.grid.is_none() {
            self.grid = Some(match self.experiment {
                Experiment::Spectrum => GridSpec::default_counter(),
                _ => GridSpec::default_free(),
            });
        }
        if uses("counter") && self.counter.is_none() {
            self.counter = Some(CounterSpec { a: 0.0, b: 1.0 });
        }
        if uses("hamiltonian") && self.hamiltonian.is_none() {
            self.hamiltonian = Some(HamiltonianSpec::Free {
                dispersion: Dispersion::Discrete,
            });
        }
        if uses("measuror") && self.measuror.is_none() {
            self.measuror = Some(match self.experiment {
                Experiment::SoftCompare => MeasurorSpec::Mollified {
                    eps: default_eps(),
                    profile: raised_cosine(),
                },
                _ => MeasurorSpec::Sharp,
            });
        }
        if uses("t_total") {
            self.t_total.get_or_insert(DEFAULT_T_TOTAL);
        }
        if uses("n_list") && self.n_list.is_none() {
            self.n_list = Some(default_n_list());
        }
        if uses("initial") && self.initial.is_none() {
            let c = self.counter.expect("filled above");
            self.initial = Some(StatePrep::SineMode {
                k: 1,
                a: c.a,
                b: c.b,
            });
        }
        if uses("reference") {
            self.reference.get_or_insert(Reference::CompressedGenerator);
        }
        if uses("max_dimension") {
            self.max_dimension.get_or_insert(DEFAULT_MAX_DIMENSION);
        }
        if uses("edge_guard") {
            self.edge_guard.get_or_insert(GuardPolicy::Fail);
        }
        if uses("count") {
            self.count.get_or_insert(DEFAULT_SPECTRUM_COUNT);
        }
        if uses("t_list") && self.t_list.is_none() {
            self.t_list = Some(default_t_list());
        }
        if uses("n_fixed") {
            self.n_fixed.get_or_insert(DEFAULT_N_FIXED);
        }
        if uses("rule") {
            self.rule.get_or_insert(RuleId::Lemma31);
        }
        if self.experiment == Experiment::DomainCheck
            && self.exponents.is_none()
            && self.sweep.is_none()
        {
            self.sweep = Some(standard_exponents());
        }
        self.emit_plot_data.get_or_insert(true);
    }

    /// Checks every precondition and builds the experiment inputs. All
    /// findings are collected before returning.
    pub fn plan(&self) -> Result<Plan, RunError> {
        let mut diags = Vec::new();
        let allowed = self.experiment.keys();
        for key in self.present_keys() {
            if !allowed.contains(&key) {
                diags.push(Diagnostic {
                    key: key.to_string(),
                    message: format!("not used by experiment `{}`", self.experiment),
                });
            }
        }
        let mut resolved = self.clone();
        resolved.fill_defaults();
        let output_dir = resolved.output_dir.take();
        let mut warnings = Vec::new();
        let body = build_body(&resolved, &mut diags, &mut warnings);
        if !diags.is_empty() {
            return Err(RunError::Validation(diags));
        }
        Ok(Plan {
            emit_plot_data: resolved.emit_plot_data.unwrap_or(true),
            edge_guard: resolved.edge_guard.unwrap_or_default(),
            output_dir,
            resolved,
            body: body.expect("no diagnostics"),
            warnings,
        })
    }
}

fn diag(diags: &mut Vec<Diagnostic>, key: &str, message: impl fmt::Display) {
    diags.push(Diagnostic {
        key: key.to_string(),
        message: message.to_string(),
    });
}

fn check_n_list(n_list: &[usize], diags: &mut Vec<Diagnostic>) {
    if n_list.is_empty() {
        diag(diags, "n_list", "must not be empty");
    } else if n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        diag(diags, "n_list", "must be positive and strictly ascending");
    }
}

fn check_t_total(t: f64, diags: &mut Vec<Diagnostic>) {
    if !(t.is_finite() && t > 0.0) {
        diag(
            diags,
            "t_total",
            format!("must be positive and finite, got {t}"),
        );
    }
}

fn build_hamiltonian(
    spec: &HamiltonianSpec,
    grid: &GridSpec,
    region: Option<&CounterRegion>,
    max_dim: usize,
    diags: &mut Vec<Diagnostic>,
) -> Option<HamiltonianRep> {
    let built = match spec {
        HamiltonianSpec::Free { dispersion } => {
            if grid.kind != GridKind::PeriodicBox {
                diag(
                    diags,
                    "hamiltonian",
                    "the free kind needs a periodic-box grid",
                );
                return None;
            }
            HamiltonianRep::free(grid, *dispersion)
        }
        HamiltonianSpec::Dirichlet { dispersion } => {
            HamiltonianRep::dirichlet(grid, region?, *dispersion)
        }
        HamiltonianSpec::Dense { matrix } => {
            let n = grid.n_points;
            if n > max_dim {
                diag(
                    diags,
                    "hamiltonian",
                    format!("dense matrix of dimension {n} exceeds max_dimension {max_dim}"),
                );
                return None;
            }
            if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                diag(
                    diags,
                    "hamiltonian",
                    format!("dense matrix must be {n} x {n}"),
                );
                return None;
            }
            let entries = matrix
                .iter()
                .flatten()
                .map(|&[re, im]| zeno_core::Complex64::new(re, im))
                .collect();
            HamiltonianRep::dense(grid, entries)
        }
    };
    built.map_err(|e| diag(diags, "hamiltonian", e)).ok()
}

fn build_measuror(
    spec: &MeasurorSpec,
    grid: &GridSpec,
    region: &CounterRegion,
    diags: &mut Vec<Diagnostic>,
) -> Option<Measuror> {
    let built = match spec {
        MeasurorSpec::Sharp => Ok(Measuror::sharp(grid, region)),
        MeasurorSpec::Mollified { eps, profile } => {
            Measuror::mollified(grid, region, *eps, *profile)
        }
        MeasurorSpec::Custom { weights } => Measuror::custom(grid, weights.clone()),
        MeasurorSpec::Identity => Ok(Measuror::identity(grid)),
    };
    built.map_err(|e| diag(diags, "measuror", e)).ok()
}

fn build_initial(
    prep: &StatePrep,
    grid: &GridSpec,
    diags: &mut Vec<Diagnostic>,
    warnings: &mut Vec<String>,
) -> Option<StateVector> {
    match prepare_state(grid, prep) {
        Ok(p) => {
            for w in p.warnings {
                warnings.push(match w {
                    PrepWarning::UnderResolved { sigma, dx } => {
                        format!("initial: sigma = {sigma} is below two grid spacings (dx = {dx})")
                    }
                    PrepWarning::RegionSnapped { distance } => {
                        format!("initial: sine-mode interval snapped to the grid by {distance}")
                    }
                });
            }
            Some(p.state)
        }
        Err(e) => {
            diag(diags, "initial", e);
            None
        }
    }
}

/// Number of nodes with nonzero weight, the size of the compressed block.
fn active_dimension(m: &Measuror) -> usize {
    m.weights().iter().filter(|&&w| w != 0.0).count()
}

fn build_body(
    cfg: &ExperimentConfig,
    diags: &mut Vec<Diagnostic>,
    warnings: &mut Vec<String>,
) -> Option<Body> {
    if cfg.experiment == Experiment::DomainCheck {
        return build_domain(cfg, diags);
    }
    let grid = cfg.grid.clone().expect("filled");
    if let Err(e) = grid.validate() {
        diag(diags, "grid", e);
        return None;
    }
    let c = cfg.counter.expect("filled");
    let region = match CounterRegion::on_grid(&grid, c.a, c.b) {
        Ok(r) => {
            if r.snap_distance > 0.0 {
                warnings.push(format!(
                    "counter: endpoints snapped to [{}, {}] (moved by {:e})",
                    r.a, r.b, r.snap_distance
                ));
            }
            Some(r)
        }
        Err(e) => {
            diag(diags, "counter", e);
            None
        }
    };
    let max_dim = cfg.max_dimension.unwrap_or(DEFAULT_MAX_DIMENSION);
    if max_dim == 0 {
        diag(diags, "max_dimension", "must be positive");
    }
    let h_spec = cfg.hamiltonian.as_ref().expect("filled");

    match cfg.experiment {
        Experiment::Spectrum => {
            let dispersion = match h_spec {
                HamiltonianSpec::Free { dispersion } => *dispersion,
                _ => {
                    diag(
                        diags,
                        "hamiltonian",
                        "the spectrum experiment compresses the free kind only",
                    );
                    return None;
                }
            };
            let region = region?;
            let m = region.interior_count(&grid);
            let count = cfg.count.expect("filled");
            if count == 0 || count > m {
                diag(
                    diags,
                    "count",
                    format!("must be between 1 and the {m} counter nodes, got {count}"),
                );
            }
            if m > max_dim {
                diag(
                    diags,
                    "max_dimension",
                    format!("counter block of dimension {m} exceeds {max_dim}"),
                );
            }
            Some(Body::Spectrum {
                grid,
                region,
                count,
                dispersion,
            })
        }
        Experiment::ZenoRun | Experiment::Convergence => {
            let t_total = cfg.t_total.expect("filled");
            check_t_total(t_total, diags);
            let n_list = cfg.n_list.clone().expect("filled");
            check_n_list(&n_list, diags);
            let region = region?;
            let h = build_hamiltonian(h_spec, &grid, Some(&region), max_dim, diags);
            let m = build_measuror(
                cfg.measuror.as_ref().expect("filled"),
                &grid,
                &region,
                diags,
            );
            let initial = build_initial(
                cfg.initial.as_ref().expect("filled"),
                &grid,
                diags,
                warnings,
            );
            let reference = cfg.reference.expect("filled");
            if let Some(m) = &m {
                if reference == Reference::CompressedGenerator && active_dimension(m) > max_dim {
                    diag(
                        diags,
                        "max_dimension",
                        format!(
                            "compressed generator of dimension {} exceeds {max_dim}",
                            active_dimension(m)
                        ),
                    );
                }
                if reference == Reference::DirichletContinuum && m.region().is_none() {
                    diag(
                        diags,
                        "reference",
                        "dirichlet-continuum needs a sharp or mollified measuror",
                    );
                }
            }
            let run = ZenoRunConfig {
                hamiltonian: h?,
                measuror: m?,
                t_total,
                n_list,
                initial: initial?,
                reference,
                keep_states: false,
                keep_traces: cfg.experiment == Experiment::ZenoRun,
                max_dimension: max_dim,
            };
            Some(Body::Zeno {
                run,
                trace: cfg.experiment == Experiment::ZenoRun,
            })
        }
        Experiment::SemigroupProbe => {
            let t_list = cfg.t_list.clone().expect("filled");
            if t_list.is_empty() {
                diag(diags, "t_list", "must not be empty");
            } else if t_list.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                diag(diags, "t_list", "times must be finite and non-negative");
            } else if t_list.windows(2).any(|w| w[1] > w[0]) {
                diag(diags, "t_list", "times must be non-increasing");
            }
            let n_fixed = cfg.n_fixed.expect("filled");
            if n_fixed == 0 {
                diag(diags, "n_fixed", "must be positive");
            }
            let region = region?;
            let h = build_hamiltonian(h_spec, &grid, Some(&region), max_dim, diags);
            let m = build_measuror(
                cfg.measuror.as_ref().expect("filled"),
                &grid,
                &region,
                diags,
            );
            let probes = default_probe_set(&grid, &region)
                .map_err(|e| diag(diags, "counter", e))
                .ok();
            Some(Body::Probe {
                hamiltonian: h?,
                measuror: m?,
                probes: probes?,
                t_list,
                n_fixed,
            })
        }
        Experiment::SoftCompare => {
            let t_total = cfg.t_total.expect("filled");
            check_t_total(t_total, diags);
            let n_list = cfg.n_list.clone().expect("filled");
            check_n_list(&n_list, diags);
            let region = region?;
            let spec = cfg.measuror.as_ref().expect("filled");
            if *spec == MeasurorSpec::Sharp {
                diag(diags, "measuror", "soft-compare needs a non-sharp measuror");
                return None;
            }
            let h = build_hamiltonian(h_spec, &grid, Some(&region), max_dim, diags);
            let m = build_measuror(spec, &grid, &region, diags);
            let initial = build_initial(
                cfg.initial.as_ref().expect("filled"),
                &grid,
                diags,
                warnings,
            );
            let sharp = Measuror::sharp(&grid, &region);
            for (name, w) in [("soft", m.as_ref()), ("sharp", Some(&sharp))] {
                if let Some(w) = w {
                    if active_dimension(w) > max_dim {
                        diag(
                            diags,
                            "max_dimension",
                            format!(
                                "{name} compressed generator of dimension {} exceeds {max_dim}",
                                active_dimension(w)
                            ),
                        );
                    }
                }
            }
            Some(Body::Soft {
                hamiltonian: h?,
                measuror: m?,
                sharp,
                initial: initial?,
                t_total,
                n_list,
                max_dimension: max_dim,
            })
        }
        Experiment::DomainCheck => unreachable!(),
    }
}

fn build_domain(cfg: &ExperimentConfig, diags: &mut Vec<Diagnostic>) -> Option<Body> {
    let rule = cfg.rule.expect("filled");
    let roles = rule.roles();
    match (&cfg.exponents, &cfg.sweep) {
        (Some(_), Some(_)) => {
            diag(
                diags,
                "exponents",
                "give either `exponents` or `sweep`, not both",
            );
            None
        }
        (Some(point), None) => {
            for role in roles {
                if !point.contains_key(role) {
                    diag(
                        diags,
                        "exponents",
                        format!("missing role `{}` for {}", role.as_str(), rule.as_str()),
                    );
                }
            }
            for role in point.keys() {
                if !roles.contains(role) {
                    diag(
                        diags,
                        "exponents",
                        format!("role `{}` is not used by {}", role.as_str(), rule.as_str()),
                    );
                }
            }
            Some(Body::Domain {
                rule,
                points: vec![point.clone()],
            })
        }
        (None, Some(values)) => {
            if values.is_empty() {
                diag(diags, "sweep", "must not be empty");
                return None;
            }
            let total = values
                .len()
                .checked_pow(roles.len() as u32)
                .unwrap_or(usize::MAX);
            if total > 1_000_000 {
                diag(
                    diags,
                    "sweep",
                    format!("{total} points is more than the supported 1000000"),
                );
                return None;
            }
            let mut points = Vec::with_capacity(total);
            for mut idx in 0..total {
                let mut point = BTreeMap::new();
                for &role in roles.iter().rev() {
                    point.insert(role, values[idx % values.len()]);
                    idx /= values.len();
                }
                points.push(point);
            }
            Some(Body::Domain { rule, points })
        }
        (None, None) => unreachable!("defaults fill the sweep"),
    }
}

//! Repeated measurement products `(M U(t/n) M)^n` and the diagnostics
//! built on them.
//!
//! The reference dynamics for a product is `exp(-i (M H M) t) M psi0`, the
//! compressed generator on the same grid and with the same dispersion as the
//! propagator, so that the measured error is the product-formula error
//! alone.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CounterRegion, GridSpec};
use crate::measuror::{Measuror, MeasurorKind};
use crate::propagator::{
    compress_hamiltonian, DenseSpectrum, Dispersion, HamiltonianRep, Propagator,
};
use crate::state::{prepare_state, sine_mode, StatePrep, StateVector};

/// Box-edge mass above which a free-space run is flagged.
pub const EDGE_MASS_LIMIT: f64 = 1e-6;

/// Width of the band next to each box edge watched by the edge-mass guard.
pub const EDGE_BAND: f64 = 1.0;

/// Slack allowed for a survival probability to grow across one step.
pub const STEP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    #[default]
    CompressedGenerator,
    DirichletContinuum,
    None,
}

/// One `M U(t/n) M` slice, applied `n` times.
struct Stepper<'a> {
    propagator: Propagator,
    measuror: &'a Measuror,
}

#[derive(Debug, Clone)]
pub struct ZenoTrajectory {
    pub state: StateVector,
    /// Survival probability after each of the `n` steps.
    pub survival: Vec<f64>,
    /// Largest mass seen inside the box-edge bands (free kind only).
    pub max_edge_mass: f64,
}

fn edge_mass(psi: &StateVector) -> f64 {
    let g = psi.grid();
    let (lo, hi) = (g.x_lo + EDGE_BAND, g.x_hi - EDGE_BAND);
    psi.mass_where(|x| x < lo || x > hi)
}

impl<'a> Stepper<'a> {
    fn new(h: &HamiltonianRep, m: &'a Measuror, t: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "need at least one step"));
        }
        h.grid().ensure_same(m.grid())?;
        Ok(Stepper {
            propagator: Propagator::new(h, t / n as f64)?,
            measuror: m,
        })
    }

    fn run(
        &self,
        psi0: &StateVector,
        n: usize,
        trace: bool,
        watch_edges: bool,
    ) -> Result<ZenoTrajectory> {
        self.measuror.grid().ensure_same(psi0.grid())?;
        let collapse = self.measuror.is_projection();
        let mut psi = psi0.clone();
        let mut survival = Vec::with_capacity(if trace { n } else { 0 });
        let mut max_edge_mass = 0.0_f64;
        for step in 0..n {
            // M^2 = M for projections, so only the first leading M is needed
            if !(collapse && step > 0) {
                self.measuror.apply_in_place(&mut psi);
            }
            self.propagator.evolve_in_place(&mut psi);
            if watch_edges {
                max_edge_mass = max_edge_mass.max(edge_mass(&psi));
            }
            self.measuror.apply_in_place(&mut psi);
            if trace {
                survival.push(psi.norm_sqr());
            }
        }
        Ok(ZenoTrajectory {
            state: psi,
            survival,
            max_edge_mass,
        })
    }
}

/// `(M U(t/n) M)^n psi0`.
pub fn zeno_product(
    psi0: &StateVector,
    h: &HamiltonianRep,
    m: &Measuror,
    t: f64,
    n: usize,
) -> Result<StateVector> {
    Ok(Stepper::new(h, m, t, n)?.run(psi0, n, false, false)?.state)
}

/// Like [`zeno_product`], also recording the survival probability after
/// every step.
pub fn zeno_trajectory(
    psi0: &StateVector,
    h: &HamiltonianRep,
    m: &Measuror,
    t: f64,
    n: usize,
) -> Result<ZenoTrajectory> {
    let watch = matches!(h, HamiltonianRep::FreePeriodic { .. });
    Stepper::new(h, m, t, n)?.run(psi0, n, true, watch)
}

/// `||psi_n||^2`.
pub fn survival_probability(psi_n: &StateVector) -> f64 {
    psi_n.norm_sqr()
}

/// The compressed-generator dynamics `exp(-i (M H M) t) M psi0`, with the
/// eigendecomposition done once.
#[derive(Debug, Clone)]
pub struct CompressedReference {
    measuror: Measuror,
    spectrum: Arc<DenseSpectrum>,
}

impl CompressedReference {
    pub fn new(h: &HamiltonianRep, m: &Measuror, max_dim: usize) -> Result<Self> {
        let hc = compress_hamiltonian(h, m, max_dim)?;
        Ok(CompressedReference {
            measuror: m.clone(),
            spectrum: Arc::new(hc.decompose(max_dim)?),
        })
    }

    pub fn spectrum(&self) -> &DenseSpectrum {
        &self.spectrum
    }

    /// `exp(-i (M H M) t) psi`, without the leading measurement.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        Propagator::from_spectrum(self.spectrum.clone(), t).evolve(psi)
    }

    /// `exp(-i (M H M) t) M psi0`.
    pub fn state(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        self.evolve(&self.measuror.apply(psi0)?, t)
    }
}

/// `||(M U(t/n) M)^n psi0 - exp(-i (M H M) t) M psi0||`.
pub fn zeno_limit_error(
    psi0: &StateVector,
    h: &HamiltonianRep,
    m: &Measuror,
    t: f64,
    n: usize,
    max_dim: usize,
) -> Result<f64> {
    let reference = CompressedReference::new(h, m, max_dim)?.state(psi0, t)?;
    zeno_product(psi0, h, m, t, n)?.distance(&reference)
}

/// `|psi|` at the interior nodes next to `a` and next to `b`.
pub fn boundary_trace(psi: &StateVector, region: &CounterRegion) -> (f64, f64) {
    let r = region.interior(psi.grid());
    if r.is_empty() {
        return (0.0, 0.0);
    }
    let amps = psi.amplitudes();
    (amps[r.start].norm(), amps[r.end - 1].norm())
}

/// Position spread of the centered Gaussian probe, relative to the counter
/// length.
pub const GAUSSIAN_PROBE_WIDTH: f64 = 0.3;

/// Gaussian centered in the counter with `sigma = 0.3 (b - a)`; it overlaps
/// both counter endpoints.
pub fn centered_gaussian(grid: &GridSpec, region: &CounterRegion) -> Result<StateVector> {
    let prep = StatePrep::Gaussian {
        x0: region.center(),
        k0: 0.0,
        sigma: GAUSSIAN_PROBE_WIDTH * region.length(),
    };
    Ok(prepare_state(grid, &prep)?.state)
}

/// Sine modes 1..=3 of the counter and the centered Gaussian.
pub fn default_probe_set(
    grid: &GridSpec,
    region: &CounterRegion,
) -> Result<Vec<(String, StateVector)>> {
    let mut probes = Vec::with_capacity(4);
    for k in 1..=3 {
        probes.push((format!("sine-{k}"), sine_mode(grid, region, k)?));
    }
    probes.push(("gaussian".to_string(), centered_gaussian(grid, region)?));
    Ok(probes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub t: f64,
    pub probe: String,
    /// `||(M U(t/n) M)^n psi - M psi||`.
    pub distance: f64,
    pub max_edge_mass: f64,
}

/// Tabulates `d(t) = ||(M U(t/n) M)^n psi - M psi||` along a time list that
/// decreases towards zero. Nothing is asserted about the limit.
pub fn semigroup_probe(
    h: &HamiltonianRep,
    m: &Measuror,
    probes: &[(String, StateVector)],
    t_list: &[f64],
    n_fixed: usize,
) -> Result<Vec<ProbeRow>> {
    if t_list.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::param(
            "t_list",
            "times must be finite and non-negative",
        ));
    }
    if t_list.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::param("t_list", "times must be non-increasing"));
    }
    let watch = matches!(h, HamiltonianRep::FreePeriodic { .. });
    let mut rows = Vec::with_capacity(t_list.len() * probes.len());
    for &t in t_list {
        let stepper = Stepper::new(h, m, t, n_fixed)?;
        for (name, psi) in probes {
            let measured = m.apply(psi)?;
            let traj = stepper.run(psi, n_fixed, false, watch)?;
            rows.push(ProbeRow {
                t,
                probe: name.clone(),
                distance: traj.state.distance(&measured)?,
                max_edge_mass: traj.max_edge_mass,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SoftComparison {
    /// `(A U(t/n) A)^n psi0`.
    pub product_state: StateVector,
    /// `exp(-i (A H A) t) psi0`.
    pub generator_state: StateVector,
    pub discrepancy: f64,
    pub max_edge_mass: f64,
}

/// Puts the soft-measuror product next to the unitary group generated by
/// `A H A`. The discrepancy is reported, not expected to vanish.
pub fn soft_zeno_compare(
    psi0: &StateVector,
    h: &HamiltonianRep,
    m: &Measuror,
    t: f64,
    n: usize,
    max_dim: usize,
) -> Result<SoftComparison> {
    if let MeasurorKind::Sharp { .. } = m.kind() {
        return Err(Error::WrongKind {
            expected: "a non-sharp measuror",
            found: "sharp",
        });
    }
    let watch = matches!(h, HamiltonianRep::FreePeriodic { .. });
    let traj = Stepper::new(h, m, t, n)?.run(psi0, n, false, watch)?;
    let generator_state = CompressedReference::new(h, m, max_dim)?.evolve(psi0, t)?;
    let discrepancy = traj.state.distance(&generator_state)?;
    Ok(SoftComparison {
        product_state: traj.state,
        generator_state,
        discrepancy,
        max_edge_mass: traj.max_edge_mass,
    })
}

#[derive(Debug, Clone)]
pub struct ZenoRunConfig {
    pub hamiltonian: HamiltonianRep,
    pub measuror: Measuror,
    pub t_total: f64,
    pub n_list: Vec<usize>,
    pub initial: StateVector,
    pub reference: Reference,
    pub keep_states: bool,
    /// Keep the per-step survival probabilities of every run.
    pub keep_traces: bool,
    pub max_dimension: usize,
}

impl ZenoRunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_total.is_finite() && self.t_total > 0.0) {
            return Err(Error::param(
                "t_total",
                format!("must be positive, got {}", self.t_total),
            ));
        }
        if self.n_list.is_empty() {
            return Err(Error::param("n_list", "must not be empty"));
        }
        if self.n_list[0] == 0 || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "n_list",
                "must be positive and strictly ascending",
            ));
        }
        self.hamiltonian.grid().ensure_same(self.measuror.grid())?;
        self.hamiltonian.grid().ensure_same(self.initial.grid())?;
        if self.reference == Reference::DirichletContinuum && self.measuror.region().is_none() {
            return Err(Error::param(
                "reference",
                "dirichlet-continuum needs a measuror with a counter region",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZenoRecord {
    pub n: usize,
    pub survival_probability: f64,
    pub limit_error: Option<f64>,
    pub boundary_amp: (f64, f64),
    /// Largest growth of the survival probability across a single step.
    pub max_step_increase: f64,
    pub max_edge_mass: f64,
}

#[derive(Debug, Clone)]
pub struct ZenoResult {
    pub records: Vec<ZenoRecord>,
    pub final_states: Option<Vec<StateVector>>,
    pub traces: Option<Vec<Vec<f64>>>,
    /// `||M psi0||^2`, the ceiling for every survival probability.
    pub initial_survival: f64,
    /// First `n` from which the limit error never increases again.
    pub monotone_from: Option<usize>,
    pub max_edge_mass: f64,
    /// Whether the edge-mass guard applies (free-space runs only).
    pub edge_guarded: bool,
}

impl ZenoResult {
    pub fn edge_guard_tripped(&self) -> bool {
        self.edge_guarded && self.max_edge_mass > EDGE_MASS_LIMIT
    }
}

fn reference_state(cfg: &ZenoRunConfig) -> Result<Option<StateVector>> {
    match cfg.reference {
        Reference::None => Ok(None),
        Reference::CompressedGenerator => {
            let r = CompressedReference::new(&cfg.hamiltonian, &cfg.measuror, cfg.max_dimension)?;
            Ok(Some(r.state(&cfg.initial, cfg.t_total)?))
        }
        Reference::DirichletContinuum => {
            let region = cfg.measuror.region().expect("validated");
            let hd = HamiltonianRep::dirichlet(cfg.initial.grid(), region, Dispersion::Continuum)?;
            let start = cfg.measuror.apply(&cfg.initial)?;
            Ok(Some(Propagator::new(&hd, cfg.t_total)?.evolve(&start)?))
        }
    }
}

/// Runs one product per `n`, in parallel across `n`, with records in
/// ascending `n`.
pub fn run_zeno(cfg: &ZenoRunConfig) -> Result<ZenoResult> {
    cfg.validate()?;
    let reference = reference_state(cfg)?;
    let watch = matches!(cfg.hamiltonian, HamiltonianRep::FreePeriodic { .. });
    let region = cfg.measuror.region().cloned();
    let initial_survival = cfg.measuror.apply(&cfg.initial)?.norm_sqr();
    let runs: Vec<(ZenoRecord, ZenoTrajectory)> = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let stepper = Stepper::new(&cfg.hamiltonian, &cfg.measuror, cfg.t_total, n)?;
            let traj = stepper.run(&cfg.initial, n, true, watch)?;
            let mut prev = initial_survival;
            let mut max_step_increase = f64::NEG_INFINITY;
            for &s in &traj.survival {
                max_step_increase = max_step_increase.max(s - prev);
                prev = s;
            }
            let limit_error = reference
                .as_ref()
                .map(|r| traj.state.distance(r))
                .transpose()?;
            let record = ZenoRecord {
                n,
                survival_probability: survival_probability(&traj.state),
                limit_error,
                boundary_amp: region
                    .as_ref()
                    .map_or((0.0, 0.0), |r| boundary_trace(&traj.state, r)),
                max_step_increase,
                max_edge_mass: traj.max_edge_mass,
            };
            Ok((record, traj))
        })
        .collect::<Result<_>>()?;
    let (records, trajs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let traces = cfg
        .keep_traces
        .then(|| trajs.iter().map(|t| t.survival.clone()).collect());
    let states = trajs.into_iter().map(|t| t.state).collect();
    let monotone_from = monotone_tail_start(&records);
    let max_edge_mass = records.iter().map(|r| r.max_edge_mass).fold(0.0, f64::max);
    Ok(ZenoResult {
        final_states: cfg.keep_states.then_some(states),
        traces,
        records,
        initial_survival,
        monotone_from,
        max_edge_mass,
        edge_guarded: watch,
    })
}

fn monotone_tail_start(records: &[ZenoRecord]) -> Option<usize> {
    let errors: Vec<f64> = records
        .iter()
        .map(|r| r.limit_error)
        .collect::<Option<_>>()?;
    let mut start = errors.len() - 1;
    while start > 0 && errors[start] <= errors[start - 1] {
        start -= 1;
    }
    Some(records[start].n)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::measuror::MollifierProfile;
    use crate::state::fidelity;

    fn default_setup(
        dispersion: Dispersion,
    ) -> (GridSpec, CounterRegion, HamiltonianRep, Measuror) {
        let g = GridSpec::default_free();
        let r = CounterRegion::unit(&g).unwrap();
        let h = HamiltonianRep::free(&g, dispersion).unwrap();
        let e = Measuror::sharp(&g, &r);
        (g, r, h, e)
    }

    fn coarse_setup() -> (GridSpec, CounterRegion, HamiltonianRep, Measuror) {
        let g = GridSpec::periodic(-2.0, 3.0, 64).unwrap();
        let r = CounterRegion::unit(&g).unwrap();
        let h = HamiltonianRep::free(&g, Dispersion::Discrete).unwrap();
        let e = Measuror::sharp(&g, &r);
        (g, r, h, e)
    }

    /// `exp(-i H t) psi` for the continuum free Hamiltonian by an explicit
    /// O(N^2) discrete Fourier sum.
    fn dft_free_evolution(psi: &StateVector, t: f64) -> Vec<Complex64> {
        let g = psi.grid();
        let n = g.n_points;
        let len = g.x_hi - g.x_lo;
        let amps = psi.amplitudes();
        let kappa = |k: usize| {
            2.0 * PI
                * (if k < n / 2 {
                    k as f64
                } else {
                    k as f64 - n as f64
                })
                / len
        };
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        amps[j] * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let phase = 2.0 * PI * (k * j) as f64 / n as f64 - kappa(k).powi(2) * t;
                        coeffs[k] * Complex64::from_polar(1.0, phase)
                    })
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect()
    }

    #[test]
    fn identity_measuror_gives_free_evolution() {
        let g = GridSpec::periodic(-4.0, 4.0, 64).unwrap();
        let h = HamiltonianRep::free(&g, Dispersion::Continuum).unwrap();
        let psi = prepare_state(
            &g,
            &StatePrep::Gaussian {
                x0: 0.3,
                k0: 1.5,
                sigma: 0.6,
            },
        )
        .unwrap()
        .state;
        let product = zeno_product(&psi, &h, &Measuror::identity(&g), 0.4, 7).unwrap();
        let oracle = dft_free_evolution(&psi, 0.4);
        let err = product
            .amplitudes()
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn free_gaussian_matches_closed_form() {
        let g = GridSpec::default_free();
        let h = HamiltonianRep::free(&g, Dispersion::Continuum).unwrap();
        let (x0, k0, sigma, t) = (0.5, 5.0, 0.2, 0.05);
        let psi = prepare_state(&g, &StatePrep::Gaussian { x0, k0, sigma })
            .unwrap()
            .state;
        let out = zeno_product(&psi, &h, &Measuror::identity(&g), t, 4).unwrap();
        let alpha = 1.0 / (4.0 * sigma * sigma);
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        let denom = Complex64::new(1.0, 4.0 * alpha * t);
        let err = ((0..g.n_points)
            .map(|j| {
                let y = g.node(j) - x0;
                let num = Complex64::new(-alpha * y * y, k0 * y - k0 * k0 * t);
                let exact = norm * (num / denom).exp() / denom.sqrt();
                (out.amplitudes()[j] - exact).norm_sqr()
            })
            .sum::<f64>()
            * g.spacing())
        .sqrt();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn zero_time_product_is_the_measured_state() {
        let (g, _, h, e) = default_setup(Dispersion::Discrete);
        let psi = prepare_state(
            &g,
            &StatePrep::Gaussian {
                x0: 0.5,
                k0: 0.0,
                sigma: 0.3,
            },
        )
        .unwrap()
        .state;
        let out = zeno_product(&psi, &h, &e, 0.0, 9).unwrap();
        assert_eq!(out, e.apply(&psi).unwrap());
    }

    #[test]
    fn product_approaches_compressed_generator() {
        for dispersion in [Dispersion::Continuum, Dispersion::Discrete] {
            let (g, r, h, e) = default_setup(dispersion);
            let psi = sine_mode(&g, &r, 1).unwrap();
            let product = zeno_product(&psi, &h, &e, 0.5, 2048).unwrap();
            let reference = CompressedReference::new(&h, &e, 4096)
                .unwrap()
                .state(&psi, 0.5)
                .unwrap();
            let f = fidelity(&product, &reference).unwrap();
            assert!(f >= 0.999, "{dispersion:?}: {f}");
        }
    }

    #[test]
    fn survival_vanishes_outside_the_counter() {
        let (g, _, h, e) = default_setup(Dispersion::Discrete);
        let outside = prepare_state(&g, &StatePrep::PointMass { index: 100 })
            .unwrap()
            .state;
        let out = zeno_product(&outside, &h, &e, 0.5, 64).unwrap();
        assert_eq!(survival_probability(&out), 0.0);
    }

    #[test]
    fn single_step_survival_matches_fourier_oracle() {
        let g = GridSpec::periodic(-1.0, 2.0, 32).unwrap();
        let r = CounterRegion::unit(&g).unwrap();
        let h = HamiltonianRep::free(&g, Dispersion::Continuum).unwrap();
        let e = Measuror::sharp(&g, &r);
        let psi = prepare_state(
            &g,
            &StatePrep::Gaussian {
                x0: 0.5,
                k0: 0.0,
                sigma: 0.3,
            },
        )
        .unwrap()
        .state;
        let measured = e.apply(&psi).unwrap();
        let evolved = dft_free_evolution(&measured, 0.05);
        let dx = g.spacing();
        let oracle: f64 = (0..g.n_points)
            .filter(|&j| e.weights()[j] == 1.0)
            .map(|j| evolved[j].norm_sqr())
            .sum::<f64>()
            * dx;
        let got = survival_probability(&zeno_product(&psi, &h, &e, 0.05, 1).unwrap());
        assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
    }

    #[test]
    fn survival_never_exceeds_initial_counter_mass() {
        let (g, r, h, e) = default_setup(Dispersion::Discrete);
        let psi = centered_gaussian(&g, &r).unwrap();
        let ceiling = e.apply(&psi).unwrap().norm_sqr();
        let traj = zeno_trajectory(&psi, &h, &e, 0.5, 256).unwrap();
        assert_eq!(traj.survival.len(), 256);
        assert!(traj.survival.iter().all(|&s| s <= ceiling + 1e-10));
        assert!(traj.survival.windows(2).all(|w| w[1] <= w[0] + STEP_SLACK));
    }

    #[test]
    fn limit_error_halves_on_a_coarse_grid() {
        let (_, r, h, e) = coarse_setup();
        let psi = sine_mode(h.grid(), &r, 1).unwrap();
        let e1 = zeno_limit_error(&psi, &h, &e, 0.5, 4096, 4096).unwrap();
        let e2 = zeno_limit_error(&psi, &h, &e, 0.5, 8192, 4096).unwrap();
        let ratio = e2 / e1;
        assert!((0.3..=0.7).contains(&ratio), "{ratio}");
    }

    #[test]
    fn limit_error_degenerate_cases() {
        let (g, r, h, e) = coarse_setup();
        let psi = sine_mode(&g, &r, 2).unwrap();
        let id = zeno_limit_error(&psi, &h, &Measuror::identity(&g), 0.7, 5, 4096).unwrap();
        assert!(id <= 1e-10, "{id}");
        let zero = zeno_limit_error(&psi, &h, &e, 0.0, 5, 4096).unwrap();
        assert!(zero <= 1e-12, "{zero}");
    }

    #[test]
    fn matched_pair_compressed_generator_is_discrete_dirichlet() {
        let (g, r, h, e) = default_setup(Dispersion::Discrete);
        let psi = centered_gaussian(&g, &r).unwrap();
        let compressed = CompressedReference::new(&h, &e, 4096)
            .unwrap()
            .state(&psi, 0.5)
            .unwrap();
        let hd = HamiltonianRep::dirichlet(&g, &r, Dispersion::Discrete).unwrap();
        let direct = Propagator::new(&hd, 0.5)
            .unwrap()
            .evolve(&e.apply(&psi).unwrap())
            .unwrap();
        let d = compressed.distance(&direct).unwrap();
        assert!(d <= 1e-8, "{d}");
    }

    #[test]
    fn boundary_trace_of_first_mode() {
        let (g, r, h, e) = default_setup(Dispersion::Discrete);
        let psi = sine_mode(&g, &r, 1).unwrap();
        let expected = 2f64.sqrt() * (PI * g.spacing()).sin();
        let (left, right) = boundary_trace(&psi, &r);
        assert!((left / expected - 1.0).abs() < 0.05 && (right / expected - 1.0).abs() < 0.05);
        assert_eq!(boundary_trace(&StateVector::zeros(&g), &r), (0.0, 0.0));

        for psi in [psi, centered_gaussian(&g, &r).unwrap()] {
            let coarse = boundary_trace(&zeno_product(&psi, &h, &e, 0.5, 16).unwrap(), &r);
            let fine = boundary_trace(&zeno_product(&psi, &h, &e, 0.5, 4096).unwrap(), &r);
            assert!(fine.0 < coarse.0 && fine.1 < coarse.1);
        }
    }

    #[test]
    fn semigroup_probe_identity_matches_parseval() {
        let g = GridSpec::periodic(-4.0, 4.0, 64).unwrap();
        let h = HamiltonianRep::free(&g, Dispersion::Continuum).unwrap();
        let psi = prepare_state(
            &g,
            &StatePrep::Gaussian {
                x0: 0.0,
                k0: 1.0,
                sigma: 0.5,
            },
        )
        .unwrap()
        .state;
        let probes = vec![("g".to_string(), psi.clone())];
        let ts = [0.2, 0.05, 0.0];
        let rows = semigroup_probe(&h, &Measuror::identity(&g), &probes, &ts, 3).unwrap();
        let n = g.n_points;
        let len = g.x_hi - g.x_lo;
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        psi.amplitudes()[j]
                            * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect();
        for row in &rows {
            let sum: f64 = (0..n)
                .map(|k| {
                    let q = 2.0
                        * PI
                        * (if k < n / 2 {
                            k as f64
                        } else {
                            k as f64 - n as f64
                        })
                        / len;
                    (Complex64::from_polar(1.0, -q * q * row.t) - 1.0).norm_sqr()
                        * coeffs[k].norm_sqr()
                })
                .sum();
            let oracle = (sum * g.spacing() / n as f64).sqrt();
            assert!(
                (row.distance - oracle).abs() < 1e-12,
                "{} vs {oracle}",
                row.distance
            );
        }
        assert_eq!(rows.last().unwrap().distance, 0.0);
    }

    #[test]
    fn semigroup_probe_shrinks_with_time() {
        let (g, r, h, e) = coarse_setup();
        let probes = default_probe_set(&g, &r).unwrap();
        let rows = semigroup_probe(&h, &e, &probes, &[0.4, 0.01], 64).unwrap();
        for (name, _) in &probes {
            let d: Vec<f64> = rows
                .iter()
                .filter(|row| &row.probe == name)
                .map(|row| row.distance)
                .collect();
            assert!(d[1] <= d[0], "{name}: {d:?}");
        }
        assert!(semigroup_probe(&h, &e, &probes, &[0.1, 0.2], 4).is_err());
        assert!(semigroup_probe(&h, &e, &probes, &[-0.1], 4).is_err());
    }

    #[test]
    fn soft_measuror_discrepancy_is_comparable_to_sharp_error() {
        let (g, r, h, e) = default_setup(Dispersion::Discrete);
        let psi = sine_mode(&g, &r, 1).unwrap();
        let sharp = zeno_limit_error(&psi, &h, &e, 0.5, 1024, 4096).unwrap();
        let a = Measuror::mollified(&g, &r, 0.01, MollifierProfile::RaisedCosine).unwrap();
        let soft = soft_zeno_compare(&psi, &h, &a, 0.5, 1024, 4096).unwrap();
        assert!(
            soft.discrepancy <= 2.0 * sharp && sharp <= 2.0 * soft.discrepancy,
            "{} vs {sharp}",
            soft.discrepancy
        );
        assert!((soft.generator_state.norm() - psi.norm()).abs() < 1e-10);
        assert!(soft_zeno_compare(&psi, &h, &e, 0.5, 4, 4096).is_err());
    }

    #[test]
    fn soft_compare_with_unit_weights_is_free_evolution() {
        let (g, r, h, _) = coarse_setup();
        let ones = Measuror::custom(&g, vec![1.0; g.n_points]).unwrap();
        let psi = sine_mode(&g, &r, 1).unwrap();
        let cmp = soft_zeno_compare(&psi, &h, &ones, 0.3, 8, 4096).unwrap();
        assert!(cmp.discrepancy <= 1e-10, "{}", cmp.discrepancy);
    }

    #[test]
    fn run_zeno_records_in_order() {
        let (g, r, h, e) = coarse_setup();
        let cfg = ZenoRunConfig {
            hamiltonian: h,
            measuror: e,
            t_total: 0.5,
            n_list: vec![64, 128, 256, 512],
            initial: sine_mode(&g, &r, 1).unwrap(),
            reference: Reference::CompressedGenerator,
            keep_states: true,
            keep_traces: true,
            max_dimension: 4096,
        };
        let res = run_zeno(&cfg).unwrap();
        assert_eq!(
            res.records.iter().map(|r| r.n).collect::<Vec<_>>(),
            cfg.n_list
        );
        assert_eq!(res.final_states.as_ref().unwrap().len(), 4);
        let traces = res.traces.as_ref().unwrap();
        assert!(traces.iter().zip(&cfg.n_list).all(|(t, &n)| t.len() == n));
        assert_eq!(
            *traces[3].last().unwrap(),
            res.records[3].survival_probability
        );
        assert!(res
            .records
            .iter()
            .all(|r| r.survival_probability <= res.initial_survival + 1e-10));
        assert_eq!(res.monotone_from, Some(64));
        let direct = zeno_limit_error(
            &cfg.initial,
            &cfg.hamiltonian,
            &cfg.measuror,
            0.5,
            256,
            4096,
        )
        .unwrap();
        assert_eq!(res.records[2].limit_error, Some(direct));

        let mut bad = cfg.clone();
        bad.n_list = vec![8, 8];
        assert!(run_zeno(&bad).is_err());
        bad.n_list = vec![8];
        bad.t_total = -1.0;
        assert!(run_zeno(&bad).is_err());
    }
}

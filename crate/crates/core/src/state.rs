//! Wavefunctions on a grid and the states the experiments start from.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CounterRegion, GridSpec};

/// Complex amplitudes on the nodes of a grid.
///
/// The squared norm is `dx * sum |psi_j|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(grid: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a grid of {} nodes",
                amplitudes.len(),
                grid.n_points
            )));
        }
        if let Some(j) = amplitudes
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::param(
                "amplitudes",
                format!("entry {j} is not finite"),
            ));
        }
        Ok(StateVector { grid, amplitudes })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        StateVector {
            grid: grid.clone(),
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.n_points],
        }
    }

    pub(crate) fn from_parts(grid: GridSpec, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), grid.n_points);
        StateVector { grid, amplitudes }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.spacing() * self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        inner(self, other)
    }

    pub fn scaled(&self, alpha: Complex64) -> StateVector {
        let amplitudes = self.amplitudes.iter().map(|z| alpha * z).collect();
        StateVector {
            grid: self.grid.clone(),
            amplitudes,
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(
        &self,
        alpha: Complex64,
        other: &StateVector,
        beta: Complex64,
    ) -> Result<StateVector> {
        self.grid.ensure_same(&other.grid)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Ok(StateVector {
            grid: self.grid.clone(),
            amplitudes,
        })
    }

    /// L2 distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let sum: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        Ok((self.grid.spacing() * sum).sqrt())
    }

    /// `norm^2` restricted to nodes where `keep(x)` holds.
    pub fn mass_where(&self, keep: impl Fn(f64) -> bool) -> f64 {
        let dx = self.grid.spacing();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(j, _)| keep(self.grid.node(*j)))
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            * dx
    }

    pub(crate) fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::param("state", "cannot normalize the zero state"));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|z| *z *= inv);
        Ok(self)
    }
}

/// `dx`-weighted inner product, conjugate-linear in `psi`.
pub fn inner(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    psi.grid.ensure_same(&phi.grid)?;
    let sum: Complex64 = psi
        .amplitudes
        .iter()
        .zip(&phi.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(sum * psi.grid.spacing())
}

/// `|<a, b>| / (||a|| ||b||)`, the overlap of the two rays.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(inner(a, b)?.norm() / denom)
}

/// Recipe for an initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StatePrep {
    /// `exp(-(x-x0)^2 / (4 sigma^2) + i k0 (x - x0))`; `sigma` is the
    /// position spread of `|psi|^2`.
    Gaussian {
        x0: f64,
        k0: f64,
        sigma: f64,
    },
    /// `sqrt(2/L) sin(k pi (x-a)/L)` inside `(a, b)`, zero elsewhere.
    SineMode {
        k: u32,
        #[serde(default)]
        a: f64,
        #[serde(default = "one")]
        b: f64,
    },
    PointMass {
        index: usize,
    },
    /// Raw amplitudes as `[re, im]` pairs; not normalized.
    Custom {
        amplitudes: Vec<[f64; 2]>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "warning", rename_all = "kebab-case")]
pub enum PrepWarning {
    /// The Gaussian is narrower than two grid spacings.
    UnderResolved { sigma: f64, dx: f64 },
    /// A region endpoint was moved onto the grid.
    RegionSnapped { distance: f64 },
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub state: StateVector,
    pub warnings: Vec<PrepWarning>,
}

pub fn prepare_state(grid: &GridSpec, prep: &StatePrep) -> Result<Prepared> {
    grid.validate()?;
    let mut warnings = Vec::new();
    let state = match *prep {
        StatePrep::Gaussian { x0, k0, sigma } => {
            if !(sigma > 0.0) {
                return Err(Error::param(
                    "sigma",
                    format!("must be positive, got {sigma}"),
                ));
            }
            if !(grid.x_lo..=grid.x_hi).contains(&x0) {
                return Err(Error::param("x0", format!("{x0} lies outside the grid")));
            }
            let nyquist = grid.nyquist_wavenumber();
            if !(k0.abs() <= nyquist) {
                return Err(Error::param(
                    "k0",
                    format!("|{k0}| exceeds the Nyquist wavenumber {nyquist}"),
                ));
            }
            if sigma < 2.0 * grid.spacing() {
                warnings.push(PrepWarning::UnderResolved {
                    sigma,
                    dx: grid.spacing(),
                });
            }
            let amps = grid
                .nodes()
                .into_iter()
                .map(|x| {
                    let y = x - x0;
                    Complex64::from_polar((-y * y / (4.0 * sigma * sigma)).exp(), k0 * y)
                })
                .collect();
            StateVector::from_parts(grid.clone(), amps).normalized()?
        }
        StatePrep::SineMode { k, a, b } => {
            let region = CounterRegion::on_grid(grid, a, b)?;
            if region.snap_distance > 0.0 {
                warnings.push(PrepWarning::RegionSnapped {
                    distance: region.snap_distance,
                });
            }
            sine_mode(grid, &region, k)?
        }
        StatePrep::PointMass { index } => {
            if index >= grid.n_points {
                return Err(Error::param("index", format!("{index} is out of range")));
            }
            let mut amps = vec![Complex64::new(0.0, 0.0); grid.n_points];
            amps[index] = Complex64::new(1.0 / grid.spacing().sqrt(), 0.0);
            StateVector::from_parts(grid.clone(), amps)
        }
        StatePrep::Custom { ref amplitudes } => StateVector::new(
            grid.clone(),
            amplitudes
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )?,
    };
    Ok(Prepared { state, warnings })
}

/// The `k`-th Dirichlet eigenfunction of `region`, sampled on `grid`.
pub fn sine_mode(grid: &GridSpec, region: &CounterRegion, k: u32) -> Result<StateVector> {
    let interior = region.interior(grid);
    if k == 0 || k as usize > interior.len() {
        return Err(Error::param(
            "k",
            format!(
                "mode {k} is not resolved by {} interior nodes",
                interior.len()
            ),
        ));
    }
    let (a, len) = (region.a, region.length());
    let amp = (2.0 / len).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); grid.n_points];
    for j in interior {
        let x = grid.node(j);
        amps[j] = Complex64::new(amp * (k as f64 * PI * (x - a) / len).sin(), 0.0);
    }
    StateVector::from_parts(grid.clone(), amps).normalized()
}

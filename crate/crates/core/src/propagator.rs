//! Hamiltonians on a grid and the unitary groups they generate.
//!
//! Three representations are supported:
//!
//! * the free Laplacian `-d^2/dx^2` on a periodic box, diagonal in the
//!   Fourier basis;
//! * the Dirichlet Laplacian of a counter region, diagonal in the sine basis
//!   of the region's interior nodes (acting as zero outside the region);
//! * an arbitrary dense Hermitian matrix, exponentiated through a full
//!   eigendecomposition.
//!
//! Each of the first two comes with a [`Dispersion`]: `Continuum` uses the
//! exact Laplacian symbol (`kappa^2`, `(k pi / L)^2`), `Discrete` uses the
//! symbol of the three-point difference stencil. The discrete free operator
//! compressed to a counter is exactly the discrete Dirichlet operator of
//! that counter, which is what makes product-formula runs comparable with
//! the compressed generator without a discretization mismatch.
//!
//! The sign convention is `U(t) = exp(-i H t)` throughout.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dst::SineTransform;
use crate::eigen::HermitianEigen;
use crate::error::{Error, Result};
use crate::grid::{CounterRegion, GridKind, GridSpec};
use crate::measuror::Measuror;
use crate::state::StateVector;

/// Largest dense matrix the crate will materialize or diagonalize.
pub const DEFAULT_MAX_DIMENSION: usize = 4096;

/// Allowed `max |M - M^H|` for a dense Hamiltonian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dispersion {
    #[default]
    Continuum,
    Discrete,
}

impl Dispersion {
    /// Symbol of the free Laplacian at wavenumber `kappa`.
    pub fn free_symbol(self, kappa: f64, dx: f64) -> f64 {
        match self {
            Dispersion::Continuum => kappa * kappa,
            Dispersion::Discrete => {
                let s = (0.5 * kappa * dx).sin();
                4.0 * s * s / (dx * dx)
            }
        }
    }

    /// `k`-th Dirichlet eigenvalue of a region of `cells` lattice cells of
    /// width `dx`.
    pub fn dirichlet_eigenvalue(self, k: usize, cells: usize, dx: f64) -> f64 {
        match self {
            Dispersion::Continuum => {
                let q = k as f64 * PI / (cells as f64 * dx);
                q * q
            }
            Dispersion::Discrete => {
                let s = (0.5 * k as f64 * PI / cells as f64).sin();
                4.0 * s * s / (dx * dx)
            }
        }
    }
}

/// Wavenumbers `2 pi m / (x_hi - x_lo)` in FFT order.
pub fn wavenumbers(grid: &GridSpec) -> Vec<f64> {
    let n = grid.n_points as i64;
    let scale = 2.0 * PI / (grid.x_hi - grid.x_lo);
    (0..n)
        .map(|i| if i < n / 2 { i } else { i - n })
        .map(|m| m as f64 * scale)
        .collect()
}

/// A dense Hermitian matrix acting on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    grid: GridSpec,
    /// Row-major `n_points x n_points`.
    entries: Vec<Complex64>,
}

impl DenseHamiltonian {
    pub fn new(grid: GridSpec, entries: Vec<Complex64>) -> Result<Self> {
        let n = grid.n_points;
        if entries.len() != n * n {
            return Err(Error::GridMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        let h = DenseHamiltonian { grid, entries };
        let deviation = h.hermiticity_defect();
        if !(deviation <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(h)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.n_points
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim() + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `max_{ij} |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst =
                    worst.max((self.entries[i * n + j] - self.entries[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// Indices whose row or column has a nonzero entry. The complement is an
    /// invariant subspace on which the matrix vanishes.
    fn active_indices(&self) -> Vec<usize> {
        let n = self.dim();
        (0..n)
            .filter(|&i| {
                (0..n).any(|j| {
                    self.entries[i * n + j] != Complex64::new(0.0, 0.0)
                        || self.entries[j * n + i] != Complex64::new(0.0, 0.0)
                })
            })
            .collect()
    }

    /// Diagonalizes the active block, refusing blocks above `max_dim`.
    pub fn decompose(&self, max_dim: usize) -> Result<DenseSpectrum> {
        let active = self.active_indices();
        let m = active.len();
        if m > max_dim {
            return Err(Error::DimensionCap {
                dim: m,
                cap: max_dim,
            });
        }
        let n = self.dim();
        let block: Vec<Complex64> = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.entries[i * n + j])
            .collect();
        let eigen = HermitianEigen::decompose(m, &block)?;
        Ok(DenseSpectrum {
            grid: self.grid.clone(),
            active,
            eigen,
        })
    }

    fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(psi)
                    .map(|(h, x)| h * x)
                    .sum()
            })
            .collect()
    }
}

/// Eigendecomposition of a [`DenseHamiltonian`] restricted to its active
/// indices; reusable across evolution times.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    grid: GridSpec,
    active: Vec<usize>,
    eigen: HermitianEigen,
}

impl DenseSpectrum {
    pub fn values(&self) -> &[f64] {
        self.eigen.values()
    }

    pub fn active_indices(&self) -> &[usize] {
        &self.active
    }

    fn apply_multipliers(&self, psi: &mut StateVector, multipliers: &[Complex64]) {
        let amps = psi.amplitudes_mut();
        let x: Vec<Complex64> = self.active.iter().map(|&i| amps[i]).collect();
        let y = self.eigen.apply_multipliers(&x, multipliers);
        for (&i, v) in self.active.iter().zip(y) {
            amps[i] = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianRep {
    FreePeriodic {
        grid: GridSpec,
        dispersion: Dispersion,
    },
    DirichletSine {
        grid: GridSpec,
        region: CounterRegion,
        spectrum: Dispersion,
    },
    Dense(DenseHamiltonian),
}

impl HamiltonianRep {
    pub fn free(grid: &GridSpec, dispersion: Dispersion) -> Result<Self> {
        grid.validate()?;
        if grid.kind != GridKind::PeriodicBox {
            return Err(Error::InvalidGrid(
                "the free Hamiltonian needs a periodic-box grid".into(),
            ));
        }
        Ok(HamiltonianRep::FreePeriodic {
            grid: grid.clone(),
            dispersion,
        })
    }

    pub fn dirichlet(
        grid: &GridSpec,
        region: &CounterRegion,
        spectrum: Dispersion,
    ) -> Result<Self> {
        grid.validate()?;
        if region.interior_count(grid) as i64 != region.cells() - 1 {
            return Err(Error::param("region", "region must lie on the grid"));
        }
        Ok(HamiltonianRep::DirichletSine {
            grid: grid.clone(),
            region: region.clone(),
            spectrum,
        })
    }

    pub fn dense(grid: &GridSpec, entries: Vec<Complex64>) -> Result<Self> {
        Ok(HamiltonianRep::Dense(DenseHamiltonian::new(
            grid.clone(),
            entries,
        )?))
    }

    pub fn grid(&self) -> &GridSpec {
        match self {
            HamiltonianRep::FreePeriodic { grid, .. }
            | HamiltonianRep::DirichletSine { grid, .. } => grid,
            HamiltonianRep::Dense(d) => &d.grid,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            HamiltonianRep::FreePeriodic { .. } => "free-periodic-spectral",
            HamiltonianRep::DirichletSine { .. } => "dirichlet-sine",
            HamiltonianRep::Dense(_) => "dense-hermitian",
        }
    }

    /// Multiplier of each Fourier mode (free kind) in FFT order.
    fn free_symbols(grid: &GridSpec, dispersion: Dispersion) -> Vec<f64> {
        let dx = grid.spacing();
        wavenumbers(grid)
            .into_iter()
            .map(|k| dispersion.free_symbol(k, dx))
            .collect()
    }

    fn dirichlet_symbols(
        grid: &GridSpec,
        region: &CounterRegion,
        spectrum: Dispersion,
    ) -> Vec<f64> {
        let cells = region.cells() as usize;
        (1..cells)
            .map(|k| spectrum.dirichlet_eigenvalue(k, cells, grid.spacing()))
            .collect()
    }

    /// First column of the circulant matrix of the free Hamiltonian.
    fn free_circulant(grid: &GridSpec, dispersion: Dispersion) -> Vec<f64> {
        let n = grid.n_points;
        let dx = grid.spacing();
        let mut col = vec![0.0; n];
        match dispersion {
            Dispersion::Discrete => {
                col[0] = 2.0 / (dx * dx);
                col[1] = -1.0 / (dx * dx);
                col[n - 1] = -1.0 / (dx * dx);
            }
            Dispersion::Continuum => {
                let mut buf: Vec<Complex64> = Self::free_symbols(grid, dispersion)
                    .into_iter()
                    .map(|s| Complex64::new(s, 0.0))
                    .collect();
                FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
                let scale = 1.0 / n as f64;
                for j in 0..n {
                    col[j] = buf[j].re * scale;
                }
                // symbols are even in the wavenumber, so the column is too
                for j in 1..n / 2 {
                    let avg = 0.5 * (col[j] + col[n - j]);
                    col[j] = avg;
                    col[n - j] = avg;
                }
            }
        }
        col
    }

    /// Dense position-space matrix, refused above `max_dim` nodes.
    pub fn materialize(&self, max_dim: usize) -> Result<DenseHamiltonian> {
        let grid = self.grid();
        let n = grid.n_points;
        if n > max_dim {
            return Err(Error::DimensionCap {
                dim: n,
                cap: max_dim,
            });
        }
        let entries = match self {
            HamiltonianRep::Dense(d) => return Ok(d.clone()),
            HamiltonianRep::FreePeriodic { grid, dispersion } => {
                let col = Self::free_circulant(grid, *dispersion);
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| Complex64::new(col[(i + n - j) % n], 0.0))
                    .collect()
            }
            HamiltonianRep::DirichletSine {
                grid,
                region,
                spectrum,
            } => {
                let range = region.interior(grid);
                let m = range.len();
                let dst = SineTransform::new(m);
                let symbols = Self::dirichlet_symbols(grid, region, *spectrum);
                let mut block = vec![0.0; m * m];
                for q in 0..m {
                    let mut e = vec![Complex64::new(0.0, 0.0); m];
                    e[q] = Complex64::new(1.0, 0.0);
                    let mut c = dst.forward(&e);
                    c.iter_mut().zip(&symbols).for_each(|(ck, s)| *ck *= s);
                    for (p, v) in dst.inverse(&c).into_iter().enumerate() {
                        block[p * m + q] = v.re;
                    }
                }
                let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
                for p in 0..m {
                    for q in 0..m {
                        let v = 0.5 * (block[p * m + q] + block[q * m + p]);
                        entries[(range.start + p) * n + range.start + q] = Complex64::new(v, 0.0);
                    }
                }
                entries
            }
        };
        DenseHamiltonian::new(grid.clone(), entries)
    }

    /// `H psi`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.grid().ensure_same(psi.grid())?;
        let grid = psi.grid().clone();
        let amps = match self {
            HamiltonianRep::FreePeriodic { grid, dispersion } => {
                let n = grid.n_points;
                let mut planner = FftPlanner::new();
                let mut buf = psi.amplitudes().to_vec();
                planner.plan_fft_forward(n).process(&mut buf);
                let scale = 1.0 / n as f64;
                buf.iter_mut()
                    .zip(Self::free_symbols(grid, *dispersion))
                    .for_each(|(z, s)| *z *= s * scale);
                planner.plan_fft_inverse(n).process(&mut buf);
                buf
            }
            HamiltonianRep::DirichletSine {
                grid,
                region,
                spectrum,
            } => {
                let range = region.interior(grid);
                let dst = SineTransform::new(range.len());
                let mut c = dst.forward(&psi.amplitudes()[range.clone()]);
                c.iter_mut()
                    .zip(Self::dirichlet_symbols(grid, region, *spectrum))
                    .for_each(|(ck, s)| *ck *= s);
                let mut out = vec![Complex64::new(0.0, 0.0); grid.n_points];
                out[range].copy_from_slice(&dst.inverse(&c));
                out
            }
            HamiltonianRep::Dense(d) => d.apply(psi.amplitudes()),
        };
        Ok(StateVector::from_parts(grid, amps))
    }

    /// `<psi, H psi>`, real for Hermitian `H`.
    pub fn energy(&self, psi: &StateVector) -> Result<f64> {
        Ok(psi.inner(&self.apply(psi)?)?.re)
    }
}

#[derive(Clone)]
enum Plan {
    Identity,
    Free {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        phases: Vec<Complex64>,
    },
    Dirichlet {
        range: std::ops::Range<usize>,
        dst: SineTransform,
        phases: Vec<Complex64>,
    },
    Dense {
        spectrum: Arc<DenseSpectrum>,
        phases: Vec<Complex64>,
    },
}

/// `U(t) = exp(-i H t)` prepared for repeated application.
#[derive(Clone)]
pub struct Propagator {
    grid: GridSpec,
    t: f64,
    plan: Plan,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.plan {
            Plan::Identity => "identity",
            Plan::Free { .. } => "free",
            Plan::Dirichlet { .. } => "dirichlet",
            Plan::Dense { .. } => "dense",
        };
        f.debug_struct("Propagator")
            .field("t", &self.t)
            .field("plan", &kind)
            .finish()
    }
}

fn phases(symbols: impl IntoIterator<Item = f64>, t: f64, scale: f64) -> Vec<Complex64> {
    symbols
        .into_iter()
        .map(|s| Complex64::from_polar(scale, -s * t))
        .collect()
}

impl Propagator {
    pub fn new(h: &HamiltonianRep, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::param("t", format!("time must be finite, got {t}")));
        }
        let grid = h.grid().clone();
        if t == 0.0 {
            return Ok(Propagator {
                grid,
                t,
                plan: Plan::Identity,
            });
        }
        let plan = match h {
            HamiltonianRep::FreePeriodic { grid, dispersion } => {
                let n = grid.n_points;
                let mut planner = FftPlanner::new();
                Plan::Free {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                    phases: phases(
                        HamiltonianRep::free_symbols(grid, *dispersion),
                        t,
                        1.0 / n as f64,
                    ),
                }
            }
            HamiltonianRep::DirichletSine {
                grid,
                region,
                spectrum,
            } => {
                let range = region.interior(grid);
                Plan::Dirichlet {
                    dst: SineTransform::new(range.len()),
                    range,
                    phases: phases(
                        HamiltonianRep::dirichlet_symbols(grid, region, *spectrum),
                        t,
                        1.0,
                    ),
                }
            }
            HamiltonianRep::Dense(d) => {
                let spectrum = Arc::new(d.decompose(DEFAULT_MAX_DIMENSION)?);
                return Ok(Self::from_spectrum(spectrum, t));
            }
        };
        Ok(Propagator { grid, t, plan })
    }

    /// Reuses an existing decomposition for a new time.
    pub fn from_spectrum(spectrum: Arc<DenseSpectrum>, t: f64) -> Self {
        let grid = spectrum.grid.clone();
        if t == 0.0 {
            return Propagator {
                grid,
                t,
                plan: Plan::Identity,
            };
        }
        let phases = phases(spectrum.values().iter().copied(), t, 1.0);
        Propagator {
            grid,
            t,
            plan: Plan::Dense { spectrum, phases },
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn evolve(&self, psi: &StateVector) -> Result<StateVector> {
        self.grid.ensure_same(psi.grid())?;
        let mut out = psi.clone();
        self.evolve_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn evolve_in_place(&self, psi: &mut StateVector) {
        match &self.plan {
            Plan::Identity => {}
            Plan::Free {
                forward,
                inverse,
                phases,
            } => {
                let amps = psi.amplitudes_mut();
                forward.process(amps);
                amps.iter_mut().zip(phases).for_each(|(z, p)| *z *= p);
                inverse.process(amps);
            }
            Plan::Dirichlet { range, dst, phases } => {
                let amps = psi.amplitudes_mut();
                let mut c = dst.forward(&amps[range.clone()]);
                c.iter_mut().zip(phases).for_each(|(ck, p)| *ck *= p);
                amps[range.clone()].copy_from_slice(&dst.inverse(&c));
            }
            Plan::Dense { spectrum, phases } => spectrum.apply_multipliers(psi, phases),
        }
    }
}

pub fn evolve(plan: &Propagator, psi: &StateVector) -> Result<StateVector> {
    plan.evolve(psi)
}

/// `W H W` with `W = diag(weights of m)`, as a dense matrix.
pub fn compress_hamiltonian(
    h: &HamiltonianRep,
    m: &Measuror,
    max_dim: usize,
) -> Result<DenseHamiltonian> {
    h.grid().ensure_same(m.grid())?;
    let dense = h.materialize(max_dim)?;
    let n = dense.dim();
    let w = m.weights();
    let entries = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| dense.entries[i * n + j] * (w[i] * w[j]))
        .collect();
    DenseHamiltonian::new(dense.grid.clone(), entries)
}

/// `exp(-i hc t) psi` through a full eigendecomposition of `hc`.
pub fn evolve_compressed(hc: &DenseHamiltonian, psi: &StateVector, t: f64) -> Result<StateVector> {
    let spectrum = Arc::new(hc.decompose(DEFAULT_MAX_DIMENSION)?);
    Propagator::from_spectrum(spectrum, t).evolve(psi)
}

/// Ascending eigenvalues of the free Hamiltonian compressed to the interior
/// nodes of `region`.
///
/// On a periodic box the free Hamiltonian of that box is used. An
/// interior-Dirichlet grid is embedded in a periodic host box of the same
/// spacing, at least twice as long as the counter.
pub fn dirichlet_spectrum(
    grid: &GridSpec,
    region: &CounterRegion,
    count: usize,
    dispersion: Dispersion,
) -> Result<Vec<f64>> {
    grid.validate()?;
    if count > grid.n_points {
        return Err(Error::param(
            "count",
            format!("{count} exceeds the {} grid nodes", grid.n_points),
        ));
    }
    let (host, offset, m) = match grid.kind {
        GridKind::PeriodicBox => {
            let r = region.interior(grid);
            (grid.clone(), r.start, r.len())
        }
        GridKind::InteriorDirichlet => {
            let r = region.interior(grid);
            let dx = grid.spacing();
            let n_host = (2 * (grid.n_points + 1)).next_power_of_two();
            let pad = (n_host - (grid.n_points + 1)) / 2;
            let x_lo = grid.x_lo - pad as f64 * dx;
            let host = GridSpec::periodic(x_lo, x_lo + n_host as f64 * dx, n_host)?;
            // interior-Dirichlet node j sits at lattice site j + 1
            (host, pad + 1 + r.start, r.len())
        }
    };
    if count > m {
        return Err(Error::param(
            "count",
            format!("{count} exceeds the {m} counter nodes"),
        ));
    }
    let col = HamiltonianRep::free_circulant(&host, dispersion);
    let n = host.n_points;
    let block: Vec<Complex64> = (0..m)
        .flat_map(|p| (0..m).map(move |q| (p, q)))
        .map(|(p, q)| Complex64::new(col[(offset + p + n - (offset + q)) % n], 0.0))
        .collect();
    let eig = HermitianEigen::decompose(m, &block)?;
    Ok(eig.values()[..count].to_vec())
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceRow {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    /// `|psi_t(x_1)| / dx` at the first interior node.
    pub boundary_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub rows: Vec<InvarianceRow>,
    pub initial_energy: f64,
    pub max_energy_drift: f64,
    pub max_norm_drift: f64,
    /// Every boundary ratio stays below the initial one times `1 + 1e-6`.
    pub boundary_bounded: bool,
    pub energy_conserved: bool,
}

/// Evolves a normalized combination of Dirichlet modes `(k, weight)` and
/// tracks energy, norm and the amplitude next to the left counter endpoint.
pub fn domain_invariance_check(
    grid: &GridSpec,
    region: &CounterRegion,
    modes: &[(u32, f64)],
    t_list: &[f64],
    spectrum: Dispersion,
) -> Result<InvarianceReport> {
    if modes.is_empty() {
        return Err(Error::param("modes", "need at least one sine mode"));
    }
    let mut psi = StateVector::zeros(grid);
    for &(k, w) in modes {
        let mode = crate::state::sine_mode(grid, region, k)?;
        psi = psi.combine(Complex64::new(1.0, 0.0), &mode, Complex64::new(w, 0.0))?;
    }
    let psi0 = psi.normalized()?;
    let h = HamiltonianRep::dirichlet(grid, region, spectrum)?;
    let first = region.interior(grid).start;
    let dx = grid.spacing();
    let initial_energy = h.energy(&psi0)?;
    let ratio0 = psi0.amplitudes()[first].norm() / dx;
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let psi_t = Propagator::new(&h, t)?.evolve(&psi0)?;
        rows.push(InvarianceRow {
            t,
            norm: psi_t.norm(),
            energy: h.energy(&psi_t)?,
            boundary_ratio: psi_t.amplitudes()[first].norm() / dx,
        });
    }
    let max_energy_drift = rows
        .iter()
        .map(|r| (r.energy - initial_energy).abs())
        .fold(0.0, f64::max);
    let max_norm_drift = rows
        .iter()
        .map(|r| (r.norm - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(InvarianceReport {
        boundary_bounded: rows
            .iter()
            .all(|r| r.boundary_ratio <= ratio0 * (1.0 + 1e-6)),
        energy_conserved: max_energy_drift <= 1e-9,
        rows,
        initial_energy,
        max_energy_drift,
        max_norm_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{prepare_state, sine_mode, StatePrep};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_time_is_identity() {
        let g = GridSpec::default_free();
        let psi = prepare_state(
            &g,
            &StatePrep::Gaussian {
                x0: 0.3,
                k0: 4.0,
                sigma: 0.2,
            },
        )
        .unwrap()
        .state;
        for disp in [Dispersion::Continuum, Dispersion::Discrete] {
            let h = HamiltonianRep::free(&g, disp).unwrap();
            assert_eq!(Propagator::new(&h, 0.0).unwrap().evolve(&psi).unwrap(), psi);
        }
    }

    #[test]
    fn dirichlet_mode_picks_up_phase() {
        let g = GridSpec::default_counter();
        let r = CounterRegion::whole(&g);
        let h = HamiltonianRep::dirichlet(&g, &r, Dispersion::Continuum).unwrap();
        let psi = sine_mode(&g, &r, 1).unwrap();
        let out = Propagator::new(&h, 0.1).unwrap().evolve(&psi).unwrap();
        let expected = psi.scaled(Complex64::from_polar(1.0, -PI * PI * 0.1));
        assert!(out.distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn discrete_free_circulant_matches_fft_route() {
        let g = GridSpec::periodic(-1.0, 1.0, 64).unwrap();
        let exact = HamiltonianRep::free_circulant(&g, Dispersion::Discrete);
        let symbols = HamiltonianRep::free_symbols(&g, Dispersion::Discrete);
        let mut buf: Vec<Complex64> = symbols.into_iter().map(|s| c(s, 0.0)).collect();
        FftPlanner::new().plan_fft_inverse(64).process(&mut buf);
        for (j, v) in buf.iter().enumerate() {
            assert!((v.re / 64.0 - exact[j]).abs() < 1e-9 * exact[0]);
        }
    }

    #[test]
    fn apply_agrees_with_materialized_matrix() {
        let g = GridSpec::periodic(-2.0, 2.0, 32).unwrap();
        let psi = prepare_state(
            &g,
            &StatePrep::Gaussian {
                x0: 0.1,
                k0: 2.0,
                sigma: 0.5,
            },
        )
        .unwrap()
        .state;
        let r = CounterRegion::on_grid(&g, -1.0, 1.0).unwrap();
        for h in [
            HamiltonianRep::free(&g, Dispersion::Continuum).unwrap(),
            HamiltonianRep::free(&g, Dispersion::Discrete).unwrap(),
            HamiltonianRep::dirichlet(&g, &r, Dispersion::Continuum).unwrap(),
        ] {
            let dense = HamiltonianRep::Dense(h.materialize(DEFAULT_MAX_DIMENSION).unwrap());
            let a = h.apply(&psi).unwrap();
            let b = dense.apply(&psi).unwrap();
            assert!(
                a.distance(&b).unwrap() < 1e-9 * a.norm(),
                "{}",
                h.kind_name()
            );
        }
    }

    #[test]
    fn non_hermitian_dense_is_rejected() {
        let g = GridSpec::periodic(0.0, 1.0, 8).unwrap();
        let mut entries = vec![c(0.0, 0.0); 64];
        entries[1] = c(1.0, 0.0);
        assert!(matches!(
            HamiltonianRep::dense(&g, entries),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn diagonal_dense_exponentiation() {
        let g = GridSpec::periodic(0.0, 1.0, 8).unwrap();
        let d: Vec<f64> = (0..8).map(|j| j as f64 - 3.5).collect();
        let mut entries = vec![c(0.0, 0.0); 64];
        for j in 0..8 {
            entries[j * 8 + j] = c(d[j], 0.0);
        }
        let hc = DenseHamiltonian::new(g.clone(), entries).unwrap();
        let psi = StateVector::new(g, (0..8).map(|j| c(1.0, j as f64)).collect()).unwrap();
        let t = 0.7;
        let out = evolve_compressed(&hc, &psi, t).unwrap();
        for j in 0..8 {
            let expected = psi.amplitudes()[j] * Complex64::from_polar(1.0, -d[j] * t);
            assert!((out.amplitudes()[j] - expected).norm() < 1e-12);
        }
        assert_eq!(evolve_compressed(&hc, &psi, 0.0).unwrap(), psi);
    }

    #[test]
    fn identity_compression_reproduces_h() {
        let g = GridSpec::periodic(-1.0, 1.0, 32).unwrap();
        let h = HamiltonianRep::free(&g, Dispersion::Continuum).unwrap();
        let full = h.materialize(DEFAULT_MAX_DIMENSION).unwrap();
        let comp =
            compress_hamiltonian(&h, &Measuror::identity(&g), DEFAULT_MAX_DIMENSION).unwrap();
        let worst = full
            .entries()
            .iter()
            .zip(comp.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12);
    }

    #[test]
    fn sharp_compression_annihilates_complement() {
        let g = GridSpec::periodic(-1.0, 2.0, 64).unwrap();
        let r = CounterRegion::unit(&g).unwrap();
        let h = HamiltonianRep::free(&g, Dispersion::Continuum).unwrap();
        let e = Measuror::sharp(&g, &r);
        let comp = compress_hamiltonian(&h, &e, DEFAULT_MAX_DIMENSION).unwrap();
        let inside = r.interior(&g);
        for i in 0..64 {
            for j in 0..64 {
                if !inside.contains(&i) || !inside.contains(&j) {
                    assert_eq!(comp.entry(i, j), c(0.0, 0.0));
                }
            }
        }
        assert_eq!(comp.hermiticity_defect(), 0.0);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let g = GridSpec::periodic(-1.0, 1.0, 64).unwrap();
        let h = HamiltonianRep::free(&g, Dispersion::Continuum).unwrap();
        let e = Measuror::identity(&g);
        assert!(matches!(
            compress_hamiltonian(&h, &e, 32),
            Err(Error::DimensionCap { dim: 64, cap: 32 })
        ));
    }

    #[test]
    fn spectrum_is_positive_and_increasing() {
        let g = GridSpec::interior_dirichlet(0.0, 1.0, 64).unwrap();
        let r = CounterRegion::whole(&g);
        for disp in [Dispersion::Continuum, Dispersion::Discrete] {
            let ev = dirichlet_spectrum(&g, &r, 10, disp).unwrap();
            assert!(ev[0] > 0.0);
            assert!(ev.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(dirichlet_spectrum(&g, &r, 65, Dispersion::Continuum).is_err());
    }

    #[test]
    fn mode_one_energy_is_conserved() {
        let g = GridSpec::default_counter();
        let r = CounterRegion::whole(&g);
        let t_list = [0.0, 0.1, 0.5, 1.0, 3.0];
        let rep =
            domain_invariance_check(&g, &r, &[(1, 1.0)], &t_list, Dispersion::Continuum).unwrap();
        for row in &rep.rows {
            assert!((row.energy - PI * PI).abs() < 1e-9);
            assert!((row.norm - 1.0).abs() < 1e-10);
        }
        assert!(rep.boundary_bounded && rep.energy_conserved);
    }

    #[test]
    fn two_mode_energy_is_the_average() {
        let g = GridSpec::default_counter();
        let r = CounterRegion::whole(&g);
        let t_list = [0.05, 0.2, 0.7, 1.3];
        for disp in [Dispersion::Continuum, Dispersion::Discrete] {
            let rep =
                domain_invariance_check(&g, &r, &[(1, 1.0), (2, 1.0)], &t_list, disp).unwrap();
            // Parseval: equal weights on orthonormal eigenmodes
            let lam = |k| disp.dirichlet_eigenvalue(k, 512, 1.0 / 512.0);
            let expected = 0.5 * (lam(1) + lam(2));
            for row in &rep.rows {
                assert!(
                    (row.energy - expected).abs() < 1e-9,
                    "{} vs {expected}",
                    row.energy
                );
                assert!((row.norm - 1.0).abs() < 1e-10);
            }
            assert!(rep.boundary_bounded);
        }
    }
}

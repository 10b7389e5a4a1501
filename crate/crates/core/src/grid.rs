//! Uniform one-dimensional grids and counter regions.
//!
//! Positions are dimensionless with `hbar = 1` and `2m = 1`. Every grid lives
//! on a lattice `x_lo + i * dx`; a periodic box stores lattice sites
//! `i = 0..n`, an interior-Dirichlet grid stores `i = 1..=n` and treats the
//! two end sites as implicit zeros.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    PeriodicBox,
    InteriorDirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_points: usize,
    pub kind: GridKind,
}

pub const MIN_POINTS: usize = 8;

impl GridSpec {
    pub fn new(x_lo: f64, x_hi: f64, n_points: usize, kind: GridKind) -> Result<Self> {
        let grid = GridSpec {
            x_lo,
            x_hi,
            n_points,
            kind,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn periodic(x_lo: f64, x_hi: f64, n_points: usize) -> Result<Self> {
        Self::new(x_lo, x_hi, n_points, GridKind::PeriodicBox)
    }

    pub fn interior_dirichlet(x_lo: f64, x_hi: f64, n_points: usize) -> Result<Self> {
        Self::new(x_lo, x_hi, n_points, GridKind::InteriorDirichlet)
    }

    /// Free-space box `[-8, 9]` with 2048 nodes; the unit counter sits well
    /// inside it.
    pub fn default_free() -> Self {
        GridSpec {
            x_lo: -8.0,
            x_hi: 9.0,
            n_points: 2048,
            kind: GridKind::PeriodicBox,
        }
    }

    /// The unit counter `[0, 1]` resolved by 511 interior nodes.
    pub fn default_counter() -> Self {
        GridSpec {
            x_lo: 0.0,
            x_hi: 1.0,
            n_points: 511,
            kind: GridKind::InteriorDirichlet,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_lo.is_finite() && self.x_hi.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if self.x_lo >= self.x_hi {
            return Err(Error::InvalidGrid(format!(
                "x_lo ({}) must be below x_hi ({})",
                self.x_lo, self.x_hi
            )));
        }
        if self.n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {} is below the minimum of {MIN_POINTS}",
                self.n_points
            )));
        }
        if self.kind == GridKind::PeriodicBox && !self.n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "periodic box needs a power-of-two n_points, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn spacing(&self) -> f64 {
        let cells = match self.kind {
            GridKind::PeriodicBox => self.n_points,
            GridKind::InteriorDirichlet => self.n_points + 1,
        };
        (self.x_hi - self.x_lo) / cells as f64
    }

    /// Lattice index of the first stored node.
    pub(crate) fn lattice_offset(&self) -> i64 {
        match self.kind {
            GridKind::PeriodicBox => 0,
            GridKind::InteriorDirichlet => 1,
        }
    }

    /// Number of lattice cells between `x_lo` and `x_hi`.
    pub(crate) fn lattice_cells(&self) -> i64 {
        match self.kind {
            GridKind::PeriodicBox => self.n_points as i64,
            GridKind::InteriorDirichlet => self.n_points as i64 + 1,
        }
    }

    pub(crate) fn lattice_position(&self, i: i64) -> f64 {
        self.x_lo + i as f64 * self.spacing()
    }

    pub fn node(&self, j: usize) -> f64 {
        self.lattice_position(j as i64 + self.lattice_offset())
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Largest wavenumber the grid resolves, `pi / dx`.
    pub fn nyquist_wavenumber(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// The counter interval `[a, b]`, with both endpoints snapped onto lattice
/// sites of the grid it was built for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterRegion {
    pub a: f64,
    pub b: f64,
    pub requested: (f64, f64),
    /// Largest distance an endpoint moved while snapping.
    pub snap_distance: f64,
    #[serde(skip)]
    lattice: (i64, i64),
}

impl CounterRegion {
    pub fn on_grid(grid: &GridSpec, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::param(
                "region",
                format!("need a < b, got [{a}, {b}]"),
            ));
        }
        if a < grid.x_lo || b > grid.x_hi {
            return Err(Error::param(
                "region",
                format!("[{a}, {b}] leaves the grid [{}, {}]", grid.x_lo, grid.x_hi),
            ));
        }
        let dx = grid.spacing();
        let snap = |x: f64| ((x - grid.x_lo) / dx).round() as i64;
        let (ia, ib) = (snap(a).max(0), snap(b).min(grid.lattice_cells()));
        if ib - ia < 2 {
            return Err(Error::param(
                "region",
                format!("[{a}, {b}] contains no interior grid node"),
            ));
        }
        let (sa, sb) = (grid.lattice_position(ia), grid.lattice_position(ib));
        Ok(CounterRegion {
            a: sa,
            b: sb,
            requested: (a, b),
            snap_distance: (sa - a).abs().max((sb - b).abs()),
            lattice: (ia, ib),
        })
    }

    /// The default counter `[0, 1]`.
    pub fn unit(grid: &GridSpec) -> Result<Self> {
        Self::on_grid(grid, 0.0, 1.0)
    }

    /// The region covering a whole interior-Dirichlet grid.
    pub fn whole(grid: &GridSpec) -> Self {
        let cells = grid.lattice_cells();
        CounterRegion {
            a: grid.x_lo,
            b: grid.x_hi,
            requested: (grid.x_lo, grid.x_hi),
            snap_distance: 0.0,
            lattice: (0, cells),
        }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Stored indices of the nodes strictly between `a` and `b`.
    pub fn interior(&self, grid: &GridSpec) -> std::ops::Range<usize> {
        let off = grid.lattice_offset();
        let lo = (self.lattice.0 + 1 - off).max(0) as usize;
        let hi = ((self.lattice.1 - off).max(0) as usize).min(grid.n_points);
        lo..hi.max(lo)
    }

    pub fn interior_count(&self, grid: &GridSpec) -> usize {
        self.interior(grid).len()
    }

    /// Lattice cells spanned by the region; `interior_count + 1` when the
    /// region fits on the grid.
    pub(crate) fn cells(&self) -> i64 {
        self.lattice.1 - self.lattice.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::periodic(0.0, 1.0, 1000).is_err());
        assert!(GridSpec::periodic(1.0, 0.0, 16).is_err());
        assert!(GridSpec::interior_dirichlet(0.0, 1.0, 7).is_err());
        assert!(GridSpec::interior_dirichlet(0.0, 1.0, 9).is_ok());
    }

    #[test]
    fn node_conventions() {
        let p = GridSpec::periodic(0.0, 1.0, 8).unwrap();
        assert_eq!(p.spacing(), 0.125);
        assert_eq!(p.node(0), 0.0);
        let d = GridSpec::interior_dirichlet(0.0, 1.0, 9).unwrap();
        assert_eq!(d.spacing(), 0.1);
        assert!((d.node(0) - 0.1).abs() < 1e-15);
        assert!((d.node(8) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn counter_snaps_to_nodes() {
        let g = GridSpec::default_free();
        let r = CounterRegion::unit(&g).unwrap();
        assert!(r.snap_distance <= 0.5 * g.spacing());
        let dx = g.spacing();
        let frac = |x: f64| ((x - g.x_lo) / dx - ((x - g.x_lo) / dx).round()).abs();
        assert!(frac(r.a) < 1e-9 && frac(r.b) < 1e-9);
        let inside = r.interior(&g);
        assert_eq!(inside.len() as i64, r.cells() - 1);
        assert!(g.node(inside.start) > r.a && g.node(inside.end - 1) < r.b);
        assert!(g.node(inside.start - 1) <= r.a + 1e-12);
    }

    #[test]
    fn whole_region_covers_dirichlet_grid() {
        let g = GridSpec::default_counter();
        let r = CounterRegion::whole(&g);
        assert_eq!(r.interior(&g), 0..511);
        let snapped = CounterRegion::on_grid(&g, 0.0, 1.0).unwrap();
        assert_eq!(snapped.interior(&g), 0..511);
        assert_eq!(snapped.snap_distance, 0.0);
    }

    #[test]
    fn region_outside_grid_is_rejected() {
        let g = GridSpec::default_counter();
        assert!(CounterRegion::on_grid(&g, -0.5, 0.5).is_err());
        assert!(CounterRegion::on_grid(&g, 0.5, 0.5).is_err());
    }
}

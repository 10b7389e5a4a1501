//! Measurement operators acting by pointwise multiplication.
//!
//! A measuror is a diagonal weight `0 <= w_j <= 1` on the grid nodes: the
//! sharp counter projection (the characteristic function of the open
//! counter interval), a mollified version of it, or arbitrary weights.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CounterRegion, GridSpec};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MollifierProfile {
    /// `(1 - cos(pi s)) / 2`, C1 at both ends of the ramp.
    RaisedCosine,
    /// `s^3 (10 - 15 s + 6 s^2)`, C2 at both ends of the ramp.
    PolyBump,
}

impl MollifierProfile {
    fn ramp(self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match self {
            MollifierProfile::RaisedCosine => 0.5 * (1.0 - (PI * s).cos()),
            MollifierProfile::PolyBump => s * s * s * (10.0 - 15.0 * s + 6.0 * s * s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurorKind {
    Sharp {
        region: CounterRegion,
    },
    Mollified {
        region: CounterRegion,
        eps: f64,
        profile: MollifierProfile,
    },
    Custom,
}

impl MeasurorKind {
    pub fn name(&self) -> &'static str {
        match self {
            MeasurorKind::Sharp { .. } => "sharp",
            MeasurorKind::Mollified { .. } => "mollified",
            MeasurorKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measuror {
    grid: GridSpec,
    kind: MeasurorKind,
    weights: Vec<f64>,
}

impl Measuror {
    /// Multiplication by the characteristic function of `(a, b)`; the
    /// endpoint nodes themselves get weight zero.
    pub fn sharp(grid: &GridSpec, region: &CounterRegion) -> Self {
        let mut weights = vec![0.0; grid.n_points];
        weights[region.interior(grid)]
            .iter_mut()
            .for_each(|w| *w = 1.0);
        Measuror {
            grid: grid.clone(),
            kind: MeasurorKind::Sharp {
                region: region.clone(),
            },
            weights,
        }
    }

    pub fn mollified(
        grid: &GridSpec,
        region: &CounterRegion,
        eps: f64,
        profile: MollifierProfile,
    ) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5 * region.length()) {
            return Err(Error::param(
                "eps",
                format!(
                    "need 0 < eps < (b - a)/2 = {}, got {eps}",
                    0.5 * region.length()
                ),
            ));
        }
        let mut weights = vec![0.0; grid.n_points];
        for j in region.interior(grid) {
            let x = grid.node(j);
            let s = ((x - region.a) / eps).min((region.b - x) / eps);
            weights[j] = if s >= 1.0 { 1.0 } else { profile.ramp(s) };
        }
        Ok(Measuror {
            grid: grid.clone(),
            kind: MeasurorKind::Mollified {
                region: region.clone(),
                eps,
                profile,
            },
            weights,
        })
    }

    pub fn custom(grid: &GridSpec, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.n_points {
            return Err(Error::GridMismatch(format!(
                "{} weights for a grid of {} nodes",
                weights.len(),
                grid.n_points
            )));
        }
        if let Some(j) = weights.iter().position(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::param(
                "weights",
                format!("w[{j}] = {} is outside [0, 1]", weights[j]),
            ));
        }
        Ok(Measuror {
            grid: grid.clone(),
            kind: MeasurorKind::Custom,
            weights,
        })
    }

    pub fn identity(grid: &GridSpec) -> Self {
        Measuror {
            grid: grid.clone(),
            kind: MeasurorKind::Custom,
            weights: vec![1.0; grid.n_points],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kind(&self) -> &MeasurorKind {
        &self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn region(&self) -> Option<&CounterRegion> {
        match &self.kind {
            MeasurorKind::Sharp { region } | MeasurorKind::Mollified { region, .. } => Some(region),
            MeasurorKind::Custom => None,
        }
    }

    /// True when every weight is 0 or 1, so that `M^2 = M`.
    pub fn is_projection(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    pub fn is_identity(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.grid.ensure_same(psi.grid())?;
        let mut out = psi.clone();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, psi: &mut StateVector) {
        for (z, &w) in psi.amplitudes_mut().iter_mut().zip(&self.weights) {
            *z *= w;
        }
    }
}

pub fn apply_measuror(m: &Measuror, psi: &StateVector) -> Result<StateVector> {
    m.apply(psi)
}

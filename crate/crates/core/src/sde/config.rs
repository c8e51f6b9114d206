use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootsys::RootSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Steps shrink with the distance to the nearest mirror.
    #[default]
    EulerAdaptive,
    /// Steps of `dt_base`, refined only on a predicted crossing.
    EulerFixed,
}

/// What to do when a crossing persists at the smallest allowed step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPolicy {
    /// Abort the path with [`Error::DtUnderflow`].
    #[default]
    Fail,
    /// Reflect the proposed state back into the current chamber. Norms are
    /// preserved, so moment statistics of `|X|^2` are unaffected.
    Fold,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub system: RootSystem<f64>,
    /// Multiplies every multiplicity of `system`.
    pub k_scale: f64,
    pub x0: Vec<f64>,
    pub t_end: f64,
    pub dt_base: f64,
    pub scheme: Scheme,
    pub ensemble: usize,
    pub master_seed: u64,
    /// Times at which states are recorded; `t_end` is always included.
    pub observation_times: Vec<f64>,
    /// Keep every accepted step and its increments for replay.
    pub record_steps: bool,
    pub boundary: BoundaryPolicy,
    /// Adaptive step fraction: `dt <= eta (alpha.x)^2 / (k alpha^2)`.
    pub eta: f64,
}

/// Smallest step is `dt_base * 2^-DT_FLOOR_HALVINGS`.
pub const DT_FLOOR_HALVINGS: i32 = 20;

/// Largest `rate * dt` a planned step may carry.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

impl SimConfig {
    pub fn new(system: RootSystem<f64>, x0: Vec<f64>, t_end: f64, dt_base: f64) -> Self {
        SimConfig {
            system,
            k_scale: 1.0,
            x0,
            t_end,
            dt_base,
            scheme: Scheme::default(),
            ensemble: 1,
            master_seed: 0,
            observation_times: Vec::new(),
            record_steps: false,
            boundary: BoundaryPolicy::default(),
            eta: 0.02,
        }
    }

    pub fn dt_min(&self) -> f64 {
        self.dt_base * 2f64.powi(-DT_FLOOR_HALVINGS)
    }

    /// Sorted, deduplicated observation times ending at `t_end`.
    pub fn observation_grid(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .observation_times
            .iter()
            .copied()
            .filter(|t| *t > 0.0 && *t < self.t_end)
            .collect();
        ts.push(self.t_end);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    /// Effective `gamma`, i.e. `k_scale * gamma(R)`.
    pub fn gamma(&self) -> f64 {
        self.k_scale * self.system.gamma()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("T must be positive and finite");
        }
        if !(self.dt_base > 0.0 && self.dt_base.is_finite()) {
            return bad("dt must be positive and finite");
        }
        if self.ensemble == 0 {
            return bad("ensemble size must be at least 1");
        }
        if !(self.k_scale >= 0.0 && self.k_scale.is_finite()) {
            return bad("k-scale must be non-negative and finite");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad("eta must lie in (0, 1]");
        }
        if self.observation_times.iter().any(|t| !t.is_finite() || *t < 0.0 || *t > self.t_end) {
            return bad("observation times must lie in [0, T]");
        }
        if self.x0.len() != self.system.dim() {
            return Err(Error::Dimension {
                expected: self.system.dim(),
                got: self.x0.len(),
            });
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return bad("x0 must be finite");
        }
        for &i in self.system.positive_indices() {
            let r = self.system.root(i);
            if r.multiplicity * self.k_scale > 0.0 && r.pair(&self.x0) == 0.0 {
                return Err(Error::HyperplaneProximity { root: i, distance: 0.0 });
            }
        }
        Ok(())
    }
}

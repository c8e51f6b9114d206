//! Large-multiplicity experiments: scaled positions of radial processes
//! against Hermite (type A) and Laguerre (type B) zeros.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::roots::{hermite_roots, laguerre_roots};
use super::sim::{path_rng, simulate_radial, Trajectory};
use super::stats::Moments;
use crate::error::{Error, Result};
use crate::rootsys::{Family, RootScale, RootSystem};

/// Spacing of the ordered start `eps * (1, ..., N)`.
pub const FREEZE_EPSILON: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreezeRow {
    pub k: f64,
    /// Ensemble mean of the sorted scaled positions.
    pub mean_scaled: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Sup-norm distance of `mean_scaled` from the reference.
    pub deviation: f64,
    /// Mean over paths of the per-path sup-norm distance.
    pub path_deviation: f64,
    pub rejected_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreezeTable {
    pub family: String,
    pub n: usize,
    pub t: f64,
    pub ensemble: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub dt_base: f64,
    /// Laguerre parameter, when the reference is Laguerre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laguerre_a: Option<f64>,
    pub reference: Vec<f64>,
    pub rows: Vec<FreezeRow>,
}

impl FreezeTable {
    /// Whether `path_deviation` strictly decreases along the rows. The mean
    /// positions converge faster than single paths, so their distance is
    /// soon dominated by Monte Carlo noise.
    pub fn deviation_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].path_deviation < w[0].path_deviation)
    }

    /// Plot-ready CSV: one reference row, then one row per `k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k");
        for i in 1..=self.n {
            out.push_str(&format!(",z{i}"));
        }
        out.push_str(",deviation,path_deviation\n");
        out.push_str("reference");
        for z in &self.reference {
            out.push_str(&format!(",{z:e}"));
        }
        out.push_str(",0,0\n");
        for r in &self.rows {
            out.push_str(&format!("{:e}", r.k));
            for z in &r.mean_scaled {
                out.push_str(&format!(",{z:e}"));
            }
            out.push_str(&format!(",{:e},{:e}\n", r.deviation, r.path_deviation));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct FreezeSetup {
    pub epsilon: f64,
    /// Base step as a fraction of `t`.
    pub dt_fraction: f64,
}

impl Default for FreezeSetup {
    fn default() -> Self {
        FreezeSetup {
            epsilon: FREEZE_EPSILON,
            dt_fraction: 1e-3,
        }
    }
}

fn check_k_list(k_list: &[f64], t: f64, m: usize) -> Result<()> {
    if k_list.is_empty() {
        return Err(Error::InvalidParameter("k list is empty".into()));
    }
    if k_list.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(Error::InvalidParameter("freezing requires every k > 0".into()));
    }
    if k_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("k list must be strictly increasing".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter("t must be positive".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
    }
    Ok(())
}

fn row_from(
    k: f64,
    t: f64,
    reference: &[f64],
    finals: &[Vec<f64>],
    scaled_of: impl Fn(f64) -> f64,
    rejected_steps: usize,
) -> FreezeRow {
    let n = reference.len();
    let mut ms = vec![Moments::default(); n];
    let mut path_dev = Moments::default();
    let s = (2.0 * k * t).sqrt();
    for x in finals {
        let mut z: Vec<f64> = x.iter().map(|v| scaled_of(*v) / s).collect();
        z.sort_by(f64::total_cmp);
        for (m, v) in ms.iter_mut().zip(&z) {
            m.push(*v);
        }
        path_dev.push(sup_dist(&z, reference));
    }
    let mean: Vec<f64> = ms.iter().map(|m| m.mean).collect();
    FreezeRow {
        k,
        deviation: sup_dist(&mean, reference),
        mean_scaled: mean,
        stderr: ms.iter().map(Moments::stderr).collect(),
        path_deviation: path_dev.mean,
        rejected_steps,
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn finals(trs: &[Trajectory]) -> (Vec<Vec<f64>>, usize) {
    (
        trs.iter().map(|t| t.final_state().to_vec()).collect(),
        trs.iter().map(|t| t.rejected_steps).sum(),
    )
}

/// A-type radial paths from `eps * (1..N)`; sorted `X_t / sqrt(2 k t)`
/// against the Hermite zeros.
pub fn freezing_experiment(n: usize, k_list: &[f64], t: f64, m: usize, seed: u64) -> Result<FreezeTable> {
    freezing_experiment_with(n, k_list, t, m, seed, &FreezeSetup::default())
}

pub fn freezing_experiment_with(
    n: usize,
    k_list: &[f64],
    t: f64,
    m: usize,
    seed: u64,
    setup: &FreezeSetup,
) -> Result<FreezeTable> {
    check_k_list(k_list, t, m)?;
    let reference = hermite_roots(n)?;
    let x0: Vec<f64> = (1..=n).map(|i| setup.epsilon * i as f64).collect();
    let dt_base = setup.dt_fraction * t;
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let (fin, rej) = if n == 1 {
            // no mirrors: plain Brownian motion
            let fin = (0..m)
                .map(|i| {
                    let mut rng = path_rng(seed, i as u64);
                    vec![x0[0] + t.sqrt() * rng.sample::<f64, _>(StandardNormal)]
                })
                .collect();
            (fin, 0)
        } else {
            let sys = RootSystem::build(Family::A, n - 1, &[1.0], RootScale::IntegerRepresentatives)?;
            let mut cfg = SimConfig::new(sys, x0.clone(), t, dt_base);
            cfg.k_scale = k;
            cfg.ensemble = m;
            cfg.master_seed = seed;
            finals(&simulate_radial(&cfg)?)
        };
        rows.push(row_from(k, t, &reference, &fin, |v| v, rej));
    }
    Ok(FreezeTable {
        family: "A".into(),
        n,
        t,
        ensemble: m,
        master_seed: seed,
        epsilon: setup.epsilon,
        dt_base,
        laguerre_a: None,
        reference,
        rows,
    })
}

/// B_N radial paths with `k` on long roots and `(a + 1) k` on short roots.
/// Scaled positions `X_t / sqrt(2 k t)` are compared with the square roots
/// of the Laguerre zeros `L_N^(a)`. Reported, not asserted.
pub fn laguerre_freezing_probe(
    n: usize,
    a: f64,
    k_list: &[f64],
    t: f64,
    m: usize,
    seed: u64,
) -> Result<FreezeTable> {
    check_k_list(k_list, t, m)?;
    let setup = FreezeSetup::default();
    let reference: Vec<f64> = laguerre_roots(n, a)?.iter().map(|y| y.sqrt()).collect();
    let x0: Vec<f64> = (1..=n).map(|i| setup.epsilon * i as f64).collect();
    let dt_base = setup.dt_fraction * t;
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let sys = RootSystem::build(Family::B, n, &[(a + 1.0) * k, k], RootScale::IntegerRepresentatives)?;
        let mut cfg = SimConfig::new(sys, x0.clone(), t, dt_base);
        cfg.ensemble = m;
        cfg.master_seed = seed;
        let (fin, rej) = finals(&simulate_radial(&cfg)?);
        rows.push(row_from(k, t, &reference, &fin, f64::abs, rej));
    }
    Ok(FreezeTable {
        family: "B".into(),
        n,
        t,
        ensemble: m,
        master_seed: seed,
        epsilon: setup.epsilon,
        dt_base,
        laguerre_a: Some(a),
        reference,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_particles_freeze() {
        let tab = freezing_experiment(2, &[1e4], 1.0, 200, 7).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = &tab.rows[0];
        assert!((r.mean_scaled[0] + s).abs() < 0.05 && (r.mean_scaled[1] - s).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn zero_k_rejected() {
        assert!(freezing_experiment(3, &[0.0, 1.0], 1.0, 4, 1).is_err());
        assert!(freezing_experiment(3, &[10.0, 1.0], 1.0, 4, 1).is_err());
    }

    #[test]
    fn single_particle_table() {
        let tab = freezing_experiment(1, &[100.0], 1.0, 50, 3).unwrap();
        assert_eq!(tab.reference, vec![0.0]);
        assert!(tab.rows[0].deviation < 0.5);
        assert_eq!(tab.to_csv().lines().count(), 3);
    }

    #[test]
    fn b1_stays_positive() {
        let sys = RootSystem::build(Family::B, 1, &[0.7, 1.0], RootScale::IntegerRepresentatives).unwrap();
        let mut cfg = SimConfig::new(sys, vec![0.2], 1.0, 1e-3);
        cfg.ensemble = 50;
        cfg.record_steps = true;
        for tr in simulate_radial(&cfg).unwrap() {
            assert!(tr.states.iter().all(|x| x[0] > 0.0));
        }
    }

    #[test]
    fn laguerre_probe_runs() {
        let tab = laguerre_freezing_probe(2, 0.0, &[1e2, 1e3], 1.0, 20, 5).unwrap();
        assert_eq!(tab.rows.len(), 2);
        assert!(tab.rows.iter().all(|r| r.mean_scaled.iter().all(|v| *v > 0.0)));
    }
}

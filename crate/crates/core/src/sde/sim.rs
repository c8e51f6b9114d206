//! Euler schemes for radial and jumping Dunkl processes.
//!
//! Between jumps a path follows `dX = dB + sum_{R_+} k alpha/(alpha.X) dt`.
//! A step whose endpoint changes the sign of some `alpha . X` (with `k > 0`)
//! is rejected and the same Brownian increment is split in two halves by a
//! Brownian bridge, so refinement never changes the driving noise. In the
//! jumping process each accepted step may reflect the state through one
//! mirror, chosen by thinning with rate `k alpha^2 / (2 (alpha.X)^2)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BoundaryPolicy, Scheme, SimConfig, MAX_JUMP_PROBABILITY};
use crate::error::{Error, Result};
use crate::scalar::dot;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    /// Index into the root list of the system.
    pub root: usize,
}

/// One accepted step, sufficient for bitwise replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub dt: f64,
    pub db: Vec<f64>,
    /// Reflections applied by the fold policy, in order.
    pub folds: Vec<usize>,
    pub jump: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Whether a jump happened since the previous row.
    pub jump_flags: Vec<bool>,
    pub jump_events: Vec<JumpEvent>,
    /// Sum over accepted steps of the probability that the step jumps; this
    /// is `sum rate * dt` to first order and the exact compensator of the
    /// jump count.
    pub integrated_intensity: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub folds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepRecord>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("at least the initial state")
    }

    /// State at the recorded time closest to `t`.
    pub fn state_at(&self, t: f64) -> &[f64] {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        &self.states[i]
    }

    /// CSV with header `time,x1..xN,jump_flag`.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("time");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        out.push_str(",jump_flag\n");
        for ((t, x), j) in self.times.iter().zip(&self.states).zip(&self.jump_flags) {
            out.push_str(&format!("{t:e}"));
            for v in x {
                out.push_str(&format!(",{v:e}"));
            }
            out.push_str(if *j { ",1\n" } else { ",0\n" });
        }
        out
    }
}

/// Independent stream for path `index`: the ChaCha key comes from
/// `master_seed` and the stream id is the path index.
pub fn path_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Positive roots with nonzero effective multiplicity.
struct Active {
    index: usize,
    vector: Vec<f64>,
    k: f64,
    norm2: f64,
}

struct Dynamics {
    roots: Vec<Active>,
    /// Reflection matrices of all roots, for jumps and folds.
    dim: usize,
}

impl Dynamics {
    fn new(cfg: &SimConfig) -> Self {
        let sys = &cfg.system;
        let roots = sys
            .positive_indices()
            .iter()
            .filter_map(|&i| {
                let r = sys.root(i);
                let k = r.multiplicity * cfg.k_scale;
                (k > 0.0).then(|| Active {
                    index: i,
                    vector: r.vector.clone(),
                    k,
                    norm2: r.squared_norm,
                })
            })
            .collect();
        Dynamics {
            roots,
            dim: sys.dim(),
        }
    }

    fn drift(&self, x: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for r in &self.roots {
            let c = r.k / dot(&r.vector, x);
            for (di, a) in d.iter_mut().zip(&r.vector) {
                *di += c * a;
            }
        }
        d
    }

    fn euler(&self, x: &[f64], dt: f64, db: &[f64]) -> Vec<f64> {
        let d = self.drift(x);
        x.iter()
            .zip(&d)
            .zip(db)
            .map(|((xi, di), bi)| xi + di * dt + bi)
            .collect()
    }

    fn crosses(&self, x: &[f64], y: &[f64]) -> bool {
        self.roots.iter().any(|r| {
            let a = dot(&r.vector, x);
            let b = dot(&r.vector, y);
            b == 0.0 || (a > 0.0) != (b > 0.0)
        })
    }

    fn rate(r: &Active, x: &[f64]) -> f64 {
        let p = dot(&r.vector, x);
        r.k * r.norm2 / (2.0 * p * p)
    }

    fn max_rate(&self, x: &[f64]) -> f64 {
        self.roots.iter().map(|r| Self::rate(r, x)).fold(0.0, f64::max)
    }

    fn planned_dt(&self, x: &[f64], cfg: &SimConfig) -> f64 {
        match cfg.scheme {
            Scheme::EulerFixed => cfg.dt_base,
            Scheme::EulerAdaptive => {
                let limit = self
                    .roots
                    .iter()
                    .map(|r| {
                        let p = dot(&r.vector, x);
                        cfg.eta * p * p / (r.k * r.norm2)
                    })
                    .fold(f64::INFINITY, f64::min);
                limit.clamp(cfg.dt_min(), cfg.dt_base)
            }
        }
    }

    fn reflect(r: &Active, y: &mut [f64]) {
        let c = 2.0 * dot(&r.vector, y) / r.norm2;
        for (yi, a) in y.iter_mut().zip(&r.vector) {
            *yi -= c * a;
        }
    }

    /// Reflect `y` into the chamber of `x`; returns the roots used.
    fn fold(&self, x: &[f64], y: &mut [f64]) -> Result<Vec<usize>> {
        let mut used = Vec::new();
        let limit = 4 * self.roots.len().max(1) * self.roots.len().max(1);
        while let Some(pos) = self.roots.iter().position(|r| {
            let a = dot(&r.vector, x);
            let b = dot(&r.vector, y);
            b != 0.0 && (a > 0.0) != (b > 0.0)
        }) {
            if used.len() > limit {
                return Err(Error::Internal("fold did not terminate".into()));
            }
            Self::reflect(&self.roots[pos], y);
            used.push(pos);
        }
        if self.roots.iter().any(|r| dot(&r.vector, y) == 0.0) {
            return Err(Error::Internal("folded state lies on a mirror".into()));
        }
        Ok(used)
    }
}

fn normals(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Simulate path `index` of the ensemble described by `cfg`.
pub fn simulate_path(cfg: &SimConfig, index: usize, jumps: bool) -> Result<Trajectory> {
    let dyn_ = Dynamics::new(cfg);
    let mut rng = path_rng(cfg.master_seed, index as u64);
    let grid = cfg.observation_grid();
    let dt_min = cfg.dt_min();
    let n = dyn_.dim;

    let mut x = cfg.x0.clone();
    let mut t = 0.0;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        jump_flags: vec![false],
        jump_events: Vec::new(),
        integrated_intensity: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
        folds: 0,
        steps: cfg.record_steps.then(Vec::new),
    };
    let mut jumped_since_row = false;
    let mut order: Vec<usize> = (0..dyn_.roots.len()).collect();

    for &target in &grid {
        while t < target {
            let remaining = target - t;
            let mut dt = dyn_.planned_dt(&x, cfg);
            if jumps {
                let mr = dyn_.max_rate(&x);
                if mr > 0.0 {
                    dt = dt.min((MAX_JUMP_PROBABILITY / mr).max(dt_min));
                }
            }
            let last = dt >= remaining;
            if last {
                dt = remaining;
            }
            let t_start = t;
            let mut stack = vec![(dt, normals(&mut rng, n, dt.sqrt()))];
            while let Some((h, db)) = stack.pop() {
                let mut y = dyn_.euler(&x, h, &db);
                let mut folds = Vec::new();
                if dyn_.crosses(&x, &y) {
                    traj.rejected_steps += 1;
                    if h * 0.5 >= dt_min {
                        let z = normals(&mut rng, n, (h * 0.25).sqrt());
                        let db1: Vec<f64> = db.iter().zip(&z).map(|(b, zi)| 0.5 * b + zi).collect();
                        let db2: Vec<f64> = db.iter().zip(&db1).map(|(b, b1)| b - b1).collect();
                        stack.push((h * 0.5, db2));
                        stack.push((h * 0.5, db1));
                        continue;
                    }
                    match cfg.boundary {
                        BoundaryPolicy::Fail => {
                            return Err(Error::DtUnderflow { time: t, dt_min });
                        }
                        BoundaryPolicy::Fold => {
                            folds = dyn_.fold(&x, &mut y)?;
                            traj.folds += 1;
                        }
                    }
                }
                let mut jump = None;
                if jumps && !dyn_.roots.is_empty() {
                    let rates: Vec<f64> = dyn_.roots.iter().map(|r| Dynamics::rate(r, &x)).collect();
                    let stay: f64 = rates.iter().map(|r| 1.0 - (r * h).min(1.0)).product();
                    traj.integrated_intensity += 1.0 - stay;
                    order.shuffle(&mut rng);
                    for &j in &order {
                        let p = (rates[j] * h).min(1.0);
                        if rng.random::<f64>() < p {
                            Dynamics::reflect(&dyn_.roots[j], &mut y);
                            jump = Some(j);
                            break;
                        }
                    }
                }
                t += h;
                if let Some(j) = jump {
                    let root = dyn_.roots[j].index;
                    traj.jump_events.push(JumpEvent { time: t, root });
                    jumped_since_row = true;
                }
                x = y;
                traj.accepted_steps += 1;
                if let Some(steps) = traj.steps.as_mut() {
                    steps.push(StepRecord {
                        dt: h,
                        db,
                        folds: folds.iter().map(|&f| dyn_.roots[f].index).collect(),
                        jump: jump.map(|j| dyn_.roots[j].index),
                    });
                }
                if cfg.record_steps && !stack.is_empty() {
                    traj.times.push(t);
                    traj.states.push(x.clone());
                    traj.jump_flags.push(std::mem::take(&mut jumped_since_row));
                }
            }
            t = if last { target } else { t_start + dt };
            if cfg.record_steps && t < target {
                traj.times.push(t);
                traj.states.push(x.clone());
                traj.jump_flags.push(std::mem::take(&mut jumped_since_row));
            }
        }
        traj.times.push(target);
        traj.states.push(x.clone());
        traj.jump_flags.push(std::mem::take(&mut jumped_since_row));
    }
    Ok(traj)
}

fn run(cfg: &SimConfig, jumps: bool) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    (0..cfg.ensemble)
        .into_par_iter()
        .map(|i| simulate_path(cfg, i, jumps))
        .collect()
}

/// Continuous (reflection-invariant) part of the process.
pub fn simulate_radial(cfg: &SimConfig) -> Result<Vec<Trajectory>> {
    run(cfg, false)
}

/// Full process with jumps through the mirrors.
pub fn simulate_dunkl(cfg: &SimConfig) -> Result<Vec<Trajectory>> {
    run(cfg, true)
}

/// Recompute the final state of `traj` from `x0` and its recorded steps.
pub fn replay(cfg: &SimConfig, traj: &Trajectory) -> Result<Vec<f64>> {
    let steps = traj
        .steps
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("trajectory has no step record".into()))?;
    let dyn_ = Dynamics::new(cfg);
    let sys = &cfg.system;
    let mut x = cfg.x0.clone();
    for s in steps {
        let mut y = dyn_.euler(&x, s.dt, &s.db);
        for &i in s.folds.iter().chain(s.jump.iter()) {
            let r = sys.root(i);
            let c = 2.0 * dot(&r.vector, &y) / r.squared_norm;
            for (yi, a) in y.iter_mut().zip(&r.vector) {
                *yi -= c * a;
            }
        }
        x = y;
    }
    Ok(x)
}

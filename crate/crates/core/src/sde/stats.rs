//! Mergeable ensemble statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::sim::Trajectory;
use crate::scalar::norm_sq;

/// Running count, mean and centred second moment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    /// Pairwise combination; associative up to rounding.
    pub fn merge(&self, o: &Moments) -> Moments {
        if self.count == 0 {
            return *o;
        }
        if o.count == 0 {
            return *self;
        }
        let n = (self.count + o.count) as f64;
        let d = o.mean - self.mean;
        Moments {
            count: self.count + o.count,
            mean: self.mean + d * o.count as f64 / n,
            m2: self.m2 + o.m2 + d * d * self.count as f64 * o.count as f64 / n,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(it: I) -> Self {
        let mut m = Moments::default();
        for v in it {
            m.push(v);
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum Observable {
    /// `|X_t|^2 - |x0|^2`.
    NormSqIncrement,
    Coordinate(usize),
    /// i-th smallest coordinate.
    SortedCoordinate(usize),
    /// Jumps up to `t`.
    JumpCount,
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::NormSqIncrement => "norm_sq_increment".into(),
            Observable::Coordinate(i) => format!("x{}", i + 1),
            Observable::SortedCoordinate(i) => format!("sorted_x{}", i + 1),
            Observable::JumpCount => "jump_count".into(),
        }
    }

    fn eval(&self, traj: &Trajectory, row: usize) -> f64 {
        let x = &traj.states[row];
        match *self {
            Observable::NormSqIncrement => norm_sq(x) - norm_sq(&traj.states[0]),
            Observable::Coordinate(i) => x[i],
            Observable::SortedCoordinate(i) => {
                let mut s = x.clone();
                s.sort_by(f64::total_cmp);
                s[i]
            }
            Observable::JumpCount => {
                let t = traj.times[row];
                traj.jump_events.iter().filter(|e| e.time <= t).count() as f64
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
}

impl From<&Moments> for Summary {
    fn from(m: &Moments) -> Self {
        Summary {
            mean: m.mean,
            variance: m.variance(),
            stderr: m.stderr(),
        }
    }
}

/// Per-time moments of a set of observables over an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub master_seed: u64,
    pub paths: u64,
    pub times: Vec<f64>,
    pub moments: BTreeMap<String, Vec<Moments>>,
}

impl EnsembleStats {
    pub fn empty(master_seed: u64, times: Vec<f64>) -> Self {
        EnsembleStats {
            master_seed,
            paths: 0,
            times,
            moments: BTreeMap::new(),
        }
    }

    /// Accumulate observables at `times` (matched against each trajectory's
    /// recorded rows).
    pub fn collect(
        master_seed: u64,
        times: &[f64],
        observables: &[Observable],
        trajectories: &[Trajectory],
    ) -> Self {
        let mut s = Self::empty(master_seed, times.to_vec());
        for o in observables {
            s.moments.insert(o.name(), vec![Moments::default(); times.len()]);
        }
        for tr in trajectories {
            s.add(observables, tr);
        }
        s
    }

    fn add(&mut self, observables: &[Observable], tr: &Trajectory) {
        self.paths += 1;
        let rows: Vec<usize> = self
            .times
            .iter()
            .map(|&t| {
                tr.times
                    .iter()
                    .position(|&u| u == t)
                    .unwrap_or_else(|| tr.times.len() - 1)
            })
            .collect();
        for o in observables {
            let ms = self.moments.get_mut(&o.name()).expect("observable registered");
            for (m, &r) in ms.iter_mut().zip(&rows) {
                m.push(o.eval(tr, r));
            }
        }
    }

    pub fn merge(&self, other: &EnsembleStats) -> EnsembleStats {
        let mut out = self.clone();
        out.paths += other.paths;
        for (k, v) in &other.moments {
            let e = out
                .moments
                .entry(k.clone())
                .or_insert_with(|| vec![Moments::default(); v.len()]);
            for (a, b) in e.iter_mut().zip(v) {
                *a = a.merge(b);
            }
        }
        out
    }

    pub fn summary(&self, name: &str) -> Option<Vec<Summary>> {
        self.moments.get(name).map(|v| v.iter().map(Summary::from).collect())
    }
}

/// Comparison of the ensemble mean of `|X_t|^2 - |x0|^2` with `(N + 2 gamma) t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentLawCheck {
    pub time: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub predicted: f64,
    /// `(estimate - predicted) / stderr`.
    pub z: f64,
    pub within_3_stderr: bool,
}

pub fn moment_law(cfg: &SimConfig, trajectories: &[Trajectory]) -> Vec<MomentLawCheck> {
    let times = cfg.observation_grid();
    let st = EnsembleStats::collect(cfg.master_seed, &times, &[Observable::NormSqIncrement], trajectories);
    let slope = cfg.x0.len() as f64 + 2.0 * cfg.gamma();
    times
        .iter()
        .zip(&st.moments[&Observable::NormSqIncrement.name()])
        .map(|(&t, m)| {
            let predicted = slope * t;
            let se = m.stderr();
            let z = if se > 0.0 {
                (m.mean - predicted) / se
            } else if m.mean == predicted {
                0.0
            } else {
                f64::INFINITY
            };
            MomentLawCheck {
                time: t,
                estimate: m.mean,
                stderr: se,
                predicted,
                z,
                within_3_stderr: z.abs() <= 3.0,
            }
        })
        .collect()
}

/// Observed jump counts against the integrated jump intensity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpCheck {
    pub mean_jumps: f64,
    pub mean_intensity: f64,
    /// `|mean_jumps / mean_intensity - 1|`.
    pub rel_diff: f64,
    pub stderr_jumps: f64,
}

pub fn jump_consistency(trajectories: &[Trajectory]) -> JumpCheck {
    let jumps: Moments = trajectories.iter().map(|t| t.jump_events.len() as f64).collect();
    let intensity: Moments = trajectories.iter().map(|t| t.integrated_intensity).collect();
    let rel_diff = if intensity.mean > 0.0 {
        (jumps.mean / intensity.mean - 1.0).abs()
    } else if jumps.mean == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    JumpCheck {
        mean_jumps: jumps.mean,
        mean_intensity: intensity.mean,
        rel_diff,
        stderr_jumps: jumps.stderr(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25];
        let m: Moments = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((m.mean - mean).abs() < 1e-14);
        assert!((m.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let all: Moments = xs.iter().copied().collect();
        let a: Moments = xs[..30].iter().copied().collect();
        let b: Moments = xs[30..].iter().copied().collect();
        let m = a.merge(&b);
        assert_eq!(m.count, all.count);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-9);
        assert_eq!(Moments::default().merge(&a), a);
    }
}

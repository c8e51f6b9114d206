//! Zero-noise limit of the scaled A-type radial process,
//! `dv_i/dt = sum_{j != i} 1/(v_i - v_j)`.

use serde::{Deserialize, Serialize};

use super::roots::hermite_roots;
use crate::error::{Error, Result};

/// Spacing of the near-degenerate start.
pub const ODE_START_SPREAD: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Accepted and rejected adaptive steps.
    pub accepted: usize,
    pub rejected: usize,
}

impl OdeTrajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("nonempty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }
}

/// Scaled final positions `v(T)/sqrt(2T)` against the Hermite roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreezeOdeResult {
    pub n: usize,
    pub t_end: f64,
    pub scaled: Vec<f64>,
    pub hermite: Vec<f64>,
    /// Sup-norm of `scaled - hermite`.
    pub max_error: f64,
    pub trajectory: OdeTrajectory,
}

fn field(v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = v
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, vj)| 1.0 / (v[i] - vj))
            .sum();
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate from `(t0, v0)` to `t_end` with adaptive Dormand-Prince steps,
/// recording the state at each time in `checkpoints` (and at `t_end`).
pub fn integrate_freeze_ode(
    v0: &[f64],
    t0: f64,
    t_end: f64,
    rtol: f64,
    checkpoints: &[f64],
) -> Result<OdeTrajectory> {
    let n = v0.len();
    if n < 2 {
        return Err(Error::InvalidParameter("the freeze ODE needs N >= 2".into()));
    }
    if !(t_end > t0) {
        return Err(Error::InvalidParameter("t_end must exceed the start time".into()));
    }
    let mut sorted = v0.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("initial positions must be distinct".into()));
    }
    let mut stops: Vec<f64> = checkpoints.iter().copied().filter(|&c| c > t0 && c < t_end).collect();
    stops.push(t_end);
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let atol = rtol * 1e-3;
    let mut t = t0;
    let mut v = v0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    field(&v, &mut k[0]);
    let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let vmax = k[0].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut h = (0.01 * min_gap / vmax).min(t_end - t0);
    let mut out = OdeTrajectory {
        times: vec![t0],
        states: vec![v.clone()],
        accepted: 0,
        rejected: 0,
    };
    let mut y = vec![0.0; n];
    let mut next = vec![0.0; n];
    for &stop in &stops {
        while t < stop {
            let last = t + h >= stop;
            let step = if last { stop - t } else { h };
            for s in 1..7 {
                for i in 0..n {
                    y[i] = v[i] + step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
                }
                field(&y, &mut k[s]);
            }
            let mut err = 0.0f64;
            for i in 0..n {
                let y5 = v[i] + step * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>();
                let y4 = v[i] + step * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>();
                next[i] = y5;
                let sc = atol + rtol * v[i].abs().max(y5.abs());
                err = err.max(((y5 - y4) / sc).abs());
            }
            let ordered = {
                let mut o: Vec<usize> = (0..n).collect();
                o.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
                o.windows(2).all(|w| next[w[0]] < next[w[1]])
            };
            if err <= 1.0 && ordered && next.iter().all(|x| x.is_finite()) {
                t = if last { stop } else { t + step };
                std::mem::swap(&mut v, &mut next);
                k.swap(0, 6);
                out.accepted += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    h = step * fac;
                }
            } else {
                out.rejected += 1;
                let fac = if ordered && err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
                h = step * fac;
                if h <= f64::EPSILON * t.abs().max(1e-300) * 4.0 || h < 1e-300 {
                    return Err(Error::DtUnderflow { time: t, dt_min: h });
                }
            }
        }
        out.times.push(stop);
        out.states.push(v.clone());
    }
    Ok(out)
}

/// Integrate from the centred start `eps * (i - (N+1)/2)` at `t = 0` to
/// `t_end`, and compare `v(t_end)/sqrt(2 t_end)` with the Hermite roots.
pub fn deterministic_freeze_ode(n: usize, t_end: f64) -> Result<FreezeOdeResult> {
    if n < 2 {
        return Err(Error::InvalidParameter("the freeze ODE needs N >= 2".into()));
    }
    let hermite = hermite_roots(n)?;
    let c = (n as f64 + 1.0) / 2.0;
    let v0: Vec<f64> = (1..=n).map(|i| ODE_START_SPREAD * (i as f64 - c)).collect();
    let checkpoints: Vec<f64> = (-6..=6)
        .map(|e| 10f64.powi(e))
        .filter(|&c| c < t_end)
        .collect();
    let trajectory = integrate_freeze_ode(&v0, 0.0, t_end, 1e-12, &checkpoints)?;
    let s = (2.0 * t_end).sqrt();
    let mut scaled: Vec<f64> = trajectory.final_state().iter().map(|v| v / s).collect();
    scaled.sort_by(f64::total_cmp);
    let max_error = scaled
        .iter()
        .zip(&hermite)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(FreezeOdeResult {
        n,
        t_end,
        scaled,
        hermite,
        max_error,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_particles_follow_sqrt_t() {
        let t0: f64 = 0.25;
        let tr = integrate_freeze_ode(&[-t0.sqrt(), t0.sqrt()], t0, 100.0, 1e-12, &[1.0, 10.0]).unwrap();
        for (t, v) in tr.times.iter().zip(&tr.states) {
            assert!((v[1] - t.sqrt()).abs() < 1e-9 * (1.0 + t.sqrt()), "t={t}");
            assert!((v[0] + t.sqrt()).abs() < 1e-9 * (1.0 + t.sqrt()));
        }
    }

    #[test]
    fn converges_to_hermite_roots() {
        for n in 2..=8 {
            let r = deterministic_freeze_ode(n, 1e3).unwrap();
            assert!(r.max_error < 1e-6, "n={n} err={}", r.max_error);
        }
    }

    #[test]
    fn permutation_equivariance() {
        let v0 = [0.3, -0.7, 1.1, 0.05];
        let p = [2, 0, 3, 1];
        let w0: Vec<f64> = p.iter().map(|&i| v0[i]).collect();
        let a = integrate_freeze_ode(&v0, 0.0, 5.0, 1e-12, &[]).unwrap();
        let b = integrate_freeze_ode(&w0, 0.0, 5.0, 1e-12, &[]).unwrap();
        for (k, &i) in p.iter().enumerate() {
            assert!((b.final_state()[k] - a.final_state()[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(deterministic_freeze_ode(1, 10.0).is_err());
        assert!(integrate_freeze_ode(&[1.0, 1.0], 0.0, 1.0, 1e-10, &[]).is_err());
        assert!(integrate_freeze_ode(&[0.0, 1.0], 1.0, 1.0, 1e-10, &[]).is_err());
    }
}

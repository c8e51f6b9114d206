//! Calogero-Moser Hamiltonians with exchange terms, their ground states, and
//! the Polychronakos-Frahm exchange matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::dunkl::{DunklContext, HYPERPLANE_FLOOR};
use crate::error::{check_dim, Error, Result};
use crate::func::PointFunction;
use crate::polyx::MultiPoly;
use crate::report::Comparison;
use crate::rootsys::{Family, RootScale, RootSystem};
use crate::scalar::{from_usize, half, norm_sq, Rational, Scalar};

/// Largest chain length for the dense exchange matrix.
pub const PF_MAX_SITES: usize = 12;

#[derive(Clone, Debug)]
pub struct CmParams<S> {
    system: RootSystem<S>,
    omega: S,
    floor: f64,
}

impl<S: Scalar> CmParams<S> {
    pub fn new(system: RootSystem<S>, omega: S) -> Result<Self> {
        if omega < S::zero() {
            return Err(Error::InvalidParameter("omega must be non-negative".into()));
        }
        Ok(CmParams {
            system,
            omega,
            floor: HYPERPLANE_FLOOR,
        })
    }

    pub fn system(&self) -> &RootSystem<S> {
        &self.system
    }

    pub fn omega(&self) -> S {
        self.omega.clone()
    }

    /// `(H f)(x)` with exchange operators acting by argument reflection.
    pub fn apply<F: PointFunction<S> + ?Sized>(&self, f: &F, x: &[S]) -> Result<S> {
        check_dim(self.system.dim(), f.dim())?;
        self.system.ensure_off_hyperplanes(x, self.floor)?;
        let fx = f.value(x)?;
        let mut acc = -(f.laplacian(x)? * half::<S>());
        for r in self.system.positive_roots() {
            if r.multiplicity.is_zero() {
                continue;
            }
            let p = r.pair(x);
            let k = r.multiplicity.clone();
            let fr = f.reflected_value(r, x)?;
            acc = acc
                + r.squared_norm.clone() * half::<S>() * k.clone() * (k * fx.clone() - fr)
                    / (p.clone() * p);
        }
        let w = self.omega.clone();
        Ok(acc + w.clone() * w * half::<S>() * norm_sq(x) * fx)
    }

    /// `E_0 = omega (gamma + N/2)`.
    pub fn ground_energy(&self) -> S {
        self.omega.clone() * (self.system.gamma() + from_usize::<S>(self.system.dim()) * half::<S>())
    }
}

/// `[k N + k^2 N (N-1)] / 2`, the type-A value with `omega = k`.
pub fn ground_energy_type_a<S: Scalar>(n: usize, k: S) -> S {
    let nn = from_usize::<S>(n);
    (k.clone() * nn.clone() + k.clone() * k * nn.clone() * (nn - S::one())) * half::<S>()
}

/// `exp(-omega |x|^2/2) prod_{R_+} |alpha . x|^k` with closed-form
/// derivatives.
pub struct GroundState<'a> {
    system: &'a RootSystem<f64>,
    omega: f64,
}

impl<'a> GroundState<'a> {
    pub fn new(system: &'a RootSystem<f64>, omega: f64) -> Self {
        GroundState { system, omega }
    }

    fn log_parts(&self, x: &[f64]) -> (f64, Vec<f64>, f64) {
        let mut lv = -0.5 * self.omega * norm_sq(x);
        let mut g: Vec<f64> = x.iter().map(|v| -self.omega * v).collect();
        let mut lap = -self.omega * x.len() as f64;
        for r in self.system.positive_roots() {
            if r.multiplicity == 0.0 {
                continue;
            }
            let p = r.pair(x);
            lv += r.multiplicity * p.abs().ln();
            for (gi, a) in g.iter_mut().zip(&r.vector) {
                *gi += r.multiplicity * a / p;
            }
            lap -= r.multiplicity * r.squared_norm / (p * p);
        }
        (lv, g, lap)
    }
}

impl PointFunction<f64> for GroundState<'_> {
    fn dim(&self) -> usize {
        self.system.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.log_parts(x).0.exp())
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let (lv, g, _) = self.log_parts(x);
        let v = lv.exp();
        Ok(g.into_iter().map(|gi| gi * v).collect())
    }

    fn laplacian(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let (lv, g, lap) = self.log_parts(x);
        Ok(lv.exp() * (norm_sq(&g) + lap))
    }
}

impl CmParams<f64> {
    /// `H Phi_0` against `E_0 Phi_0` at `x`.
    pub fn groundstate_residual(&self, x: &[f64]) -> Result<Comparison> {
        let phi = GroundState::new(&self.system, self.omega);
        let lhs = self.apply(&phi, x)?;
        let rhs = self.ground_energy() * phi.value(x)?;
        Ok(Comparison::new(lhs, rhs))
    }
}

/// Type-A similarity check with `W = |x|^2/2 - sum_{i<j} ln|x_i - x_j|`:
/// compares `-e^{kW} (H - E) e^{-kW} p` with `(1/2) sum T_i^2 p - k x . grad p`.
pub fn transformed_hamiltonian_check(
    n: usize,
    k: f64,
    p: &MultiPoly,
    x: &[f64],
) -> Result<Comparison> {
    if n < 2 {
        return Err(Error::InvalidParameter("type A needs N >= 2".into()));
    }
    check_dim(n, x.len())?;
    check_dim(n, p.nvars())?;
    let kr = Rational::from_f64(k)
        .ok_or_else(|| Error::InvalidParameter("multiplicity must be finite".into()))?;
    let exact = RootSystem::build(Family::A, n - 1, &[kr], RootScale::IntegerRepresentatives)?;
    let float = exact.to_f64();
    float.ensure_off_hyperplanes(x, HYPERPLANE_FLOOR)?;

    // V = kW and its derivatives.
    let v_of = |y: &[f64]| -> f64 {
        let mut s = 0.5 * norm_sq(y);
        for i in 0..n {
            for j in (i + 1)..n {
                s -= (y[i] - y[j]).abs().ln();
            }
        }
        k * s
    };
    let mut grad_v: Vec<f64> = x.iter().map(|v| k * v).collect();
    let mut lap_v = k * n as f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = x[i] - x[j];
            grad_v[i] -= k / d;
            grad_v[j] += k / d;
            lap_v += 2.0 * k / (d * d);
        }
    }
    let grad_p: Vec<f64> = p
        .gradient()
        .iter()
        .map(|g| g.eval_f64(x))
        .collect::<Result<_>>()?;
    let pv = p.eval_f64(x)?;
    let lap_p = p.laplacian().eval_f64(x)?;
    // e^{V} Delta (e^{-V} p)
    let conj_lap = lap_p - 2.0 * crate::scalar::dot(&grad_v, &grad_p) + (norm_sq(&grad_v) - lap_v) * pv;
    let v0 = v_of(x);
    let mut h = -0.5 * conj_lap + 0.5 * k * k * norm_sq(x) * pv;
    for r in float.positive_roots() {
        let y = r.reflect(x)?;
        let d = r.pair(x);
        // e^{V(x)} e^{-V(sigma x)} p(sigma x)
        let swapped = (v0 - v_of(&y)).exp() * p.eval_f64(&y)?;
        h += k * (k * pv - swapped) / (d * d);
    }
    let lhs = -(h - ground_energy_type_a(n, k) * pv);

    let ctx = DunklContext::new(exact)?;
    let dl = ctx.dunkl_laplacian_direct(p)?.eval_f64(x)?;
    let euler: f64 = grad_p.iter().zip(x).map(|(g, xi)| g * xi).sum();
    let rhs = 0.5 * dl - k * euler;
    Ok(Comparison::new(lhs, rhs))
}

/// Dense exchange Hamiltonian `sum_{i<j} SWAP_ij / (z_i - z_j)^2` on `2^N`
/// spin-1/2 states. Bit `i` of a basis index is the spin at site `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinChainMatrix {
    sites: usize,
    positions: Vec<f64>,
    data: Vec<f64>,
}

#[derive(Serialize)]
struct CooDoc<'a> {
    sites: usize,
    positions: &'a [f64],
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

fn swap_bits(s: usize, i: usize, j: usize) -> usize {
    let (bi, bj) = ((s >> i) & 1, (s >> j) & 1);
    if bi == bj {
        s
    } else {
        s ^ ((1 << i) | (1 << j))
    }
}

pub fn pf_matrix(z: &[f64]) -> Result<SpinChainMatrix> {
    let n = z.len();
    if n == 0 || n > PF_MAX_SITES {
        return Err(Error::Range(format!(
            "spin chain length must be in 1..={PF_MAX_SITES}, got {n}"
        )));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("site positions must be finite".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if z[i] == z[j] {
                return Err(Error::InvalidParameter(format!(
                    "repeated site position {} at sites {} and {}",
                    z[i],
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let dim = 1usize << n;
    let mut data = vec![0.0; dim * dim];
    for s in 0..dim {
        for i in 0..n {
            for j in (i + 1)..n {
                let d = z[i] - z[j];
                let t = swap_bits(s, i, j);
                data[t * dim + s] += 1.0 / (d * d);
            }
        }
    }
    Ok(SpinChainMatrix {
        sites: n,
        positions: z.to_vec(),
        data,
    })
}

impl SpinChainMatrix {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim() + col]
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..r).all(|c| self.get(r, c).to_bits() == self.get(c, r).to_bits()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `2^{N-1} sum_{i<j} 1/(z_i - z_j)^2`.
    pub fn expected_trace(&self) -> f64 {
        let z = &self.positions;
        let mut s = 0.0;
        for i in 0..self.sites {
            for j in (i + 1)..self.sites {
                s += 1.0 / (z[i] - z[j]).powi(2);
            }
        }
        s * (1u64 << (self.sites - 1)) as f64
    }

    /// True when no entry couples states of different magnetization.
    pub fn conserves_magnetization(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| {
            (0..d).all(|c| {
                (r as u32).count_ones() == (c as u32).count_ones() || self.get(r, c) == 0.0
            })
        })
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_row_slice(d, d, &self.data);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Row-major dense CSV, no header.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut out = String::with_capacity(d * d * 8);
        for r in 0..d {
            let row: Vec<String> = (0..d).map(|c| format!("{:e}", self.get(r, c))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Coordinate list of nonzero entries.
    pub fn to_coo_json(&self) -> serde_json::Value {
        let d = self.dim();
        let entries = (0..d)
            .flat_map(|r| (0..d).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let v = self.get(r, c);
                (v != 0.0).then_some((r, c, v))
            })
            .collect();
        serde_json::to_value(CooDoc {
            sites: self.sites,
            positions: &self.positions,
            dim: d,
            entries,
        })
        .expect("plain data serializes")
    }
}

//! The diffusion-scaling transformation as pointwise operator identities.
//!
//! With `tau = ln t / (2 omega)` and `zeta = x / sqrt(2 omega t)`, writing a
//! density as `u = e^{-W} U` turns the forward equation of a Dunkl process
//! into an imaginary-time Schrodinger equation for the CM Hamiltonian:
//!
//! ```text
//! e^{W} (d_tau - L_fwd - omega zeta . grad) e^{-W} U = d_tau U + (H - E_0) U
//! ```
//!
//! Every check below evaluates both sides at a point with closed-form
//! derivatives. Conjugated functions are normalized by `e^{W(zeta)}` at the
//! evaluation point so residuals are on the scale of `U`.

use crate::cm::{ground_energy_type_a, CmParams};
use crate::dunkl::{DunklContext, HYPERPLANE_FLOOR};
use crate::error::{check_dim, Error, Result};
use crate::func::{PointFunction, PolyFunction};
use crate::polyx::MultiPoly;
use crate::report::Comparison;
use crate::rootsys::{Root, RootSystem};
use crate::scalar::{dot, norm_sq, Scalar};

/// `(tau, zeta)` for time `t > 0`.
pub fn substitute(t: f64, x: &[f64], omega: f64) -> Result<(f64, Vec<f64>)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let s = (2.0 * omega * t).sqrt();
    Ok((t.ln() / (2.0 * omega), x.iter().map(|v| v / s).collect()))
}

/// Inverse of [`substitute`].
pub fn unsubstitute(tau: f64, zeta: &[f64], omega: f64) -> (f64, Vec<f64>) {
    let t = (2.0 * omega * tau).exp();
    let s = (2.0 * omega * t).sqrt();
    (t, zeta.iter().map(|v| v * s).collect())
}

/// `U(tau, zeta) = exp(lambda tau) p(zeta)`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub lambda: f64,
    p: PolyFunction,
}

impl TestFunction {
    pub fn new(lambda: f64, p: MultiPoly) -> Self {
        TestFunction {
            lambda,
            p: PolyFunction::new(p),
        }
    }

    pub fn poly(&self) -> &MultiPoly {
        self.p.poly()
    }

    /// The spatial slice at fixed `tau`.
    pub fn at(&self, tau: f64) -> TestSlice<'_> {
        TestSlice {
            p: &self.p,
            factor: (self.lambda * tau).exp(),
        }
    }

    pub fn value(&self, tau: f64, zeta: &[f64]) -> Result<f64> {
        self.at(tau).value(zeta)
    }

    pub fn dtau(&self, tau: f64, zeta: &[f64]) -> Result<f64> {
        Ok(self.lambda * self.value(tau, zeta)?)
    }
}

pub struct TestSlice<'a> {
    p: &'a PolyFunction,
    factor: f64,
}

impl PointFunction<f64> for TestSlice<'_> {
    fn dim(&self) -> usize {
        PointFunction::<f64>::dim(self.p)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.factor * self.p.value(x)?)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .p
            .gradient(x)?
            .into_iter()
            .map(|g| g * self.factor)
            .collect())
    }

    fn laplacian(&self, x: &[f64]) -> Result<f64> {
        Ok(self.factor * self.p.laplacian(x)?)
    }
}

/// A potential `W` with closed-form derivatives.
trait Potential: Sync {
    fn value(&self, y: &[f64]) -> f64;
    fn gradient(&self, y: &[f64]) -> Vec<f64>;
    fn laplacian(&self, y: &[f64]) -> f64;
}

/// `e^{-(W(y) - W(y0))} f(y)`.
struct Conjugated<'a, P, F> {
    pot: &'a P,
    f: &'a F,
    w0: f64,
}

impl<P: Potential, F: PointFunction<f64>> Conjugated<'_, P, F> {
    fn factor(&self, y: &[f64]) -> f64 {
        (self.w0 - self.pot.value(y)).exp()
    }
}

impl<P: Potential, F: PointFunction<f64>> PointFunction<f64> for Conjugated<'_, P, F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        Ok(self.factor(y) * self.f.value(y)?)
    }

    fn gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (e, v) = (self.factor(y), self.f.value(y)?);
        let gw = self.pot.gradient(y);
        Ok(self
            .f
            .gradient(y)?
            .iter()
            .zip(&gw)
            .map(|(gf, g)| e * (gf - v * g))
            .collect())
    }

    fn laplacian(&self, y: &[f64]) -> Result<f64> {
        let (e, v) = (self.factor(y), self.f.value(y)?);
        let gw = self.pot.gradient(y);
        let gf = self.f.gradient(y)?;
        let lap = self.f.laplacian(y)? - 2.0 * dot(&gw, &gf)
            + (norm_sq(&gw) - self.pot.laplacian(y)) * v;
        Ok(e * lap)
    }
}

#[derive(Clone, Debug)]
pub struct TransformParams {
    ctx: DunklContext<f64>,
    cm: CmParams<f64>,
    omega: f64,
    floor: f64,
}

/// `W` at a fixed `tau`.
struct ScaledWeight<'a> {
    system: &'a RootSystem<f64>,
    omega: f64,
    tau: f64,
}

impl Potential for ScaledWeight<'_> {
    fn value(&self, y: &[f64]) -> f64 {
        let n = y.len() as f64;
        let mut w = 0.5 * self.omega * norm_sq(y) + self.omega * n * self.tau;
        for r in self.system.positive_roots() {
            if r.multiplicity != 0.0 {
                w -= r.multiplicity * r.pair(y).abs().ln();
            }
        }
        w
    }

    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        // Half-sum over all roots, each pair counted twice.
        let mut g: Vec<f64> = y.iter().map(|v| self.omega * v).collect();
        for r in self.system.roots() {
            if r.multiplicity == 0.0 {
                continue;
            }
            let c = 0.5 * r.multiplicity / r.pair(y);
            for (gi, a) in g.iter_mut().zip(&r.vector) {
                *gi -= c * a;
            }
        }
        g
    }

    fn laplacian(&self, y: &[f64]) -> f64 {
        let mut l = self.omega * y.len() as f64;
        for r in self.system.positive_roots() {
            let p = r.pair(y);
            l += r.multiplicity * r.squared_norm / (p * p);
        }
        l
    }
}

/// `W_0 = -sum_{R_+} k ln|alpha . x|`.
struct LogWeight<'a> {
    system: &'a RootSystem<f64>,
}

impl Potential for LogWeight<'_> {
    fn value(&self, y: &[f64]) -> f64 {
        -self
            .system
            .positive_roots()
            .filter(|r| r.multiplicity != 0.0)
            .map(|r| r.multiplicity * r.pair(y).abs().ln())
            .sum::<f64>()
    }

    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; y.len()];
        for r in self.system.positive_roots() {
            let c = r.multiplicity / r.pair(y);
            for (gi, a) in g.iter_mut().zip(&r.vector) {
                *gi -= c * a;
            }
        }
        g
    }

    fn laplacian(&self, y: &[f64]) -> f64 {
        self.system
            .positive_roots()
            .map(|r| {
                let p = r.pair(y);
                r.multiplicity * r.squared_norm / (p * p)
            })
            .sum()
    }
}

/// Residuals of the three conjugation identities at one point.
#[derive(Clone, Debug)]
pub struct SimilarityResiduals {
    pub time: Comparison,
    pub gradient: Vec<Comparison>,
    pub laplacian: Comparison,
}

impl SimilarityResiduals {
    pub fn all(&self) -> impl Iterator<Item = &Comparison> {
        std::iter::once(&self.time)
            .chain(self.gradient.iter())
            .chain(std::iter::once(&self.laplacian))
    }
}

impl TransformParams {
    pub fn new(system: RootSystem<f64>, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(TransformParams {
            cm: CmParams::new(system.clone(), omega)?,
            ctx: DunklContext::new(system)?,
            omega,
            floor: HYPERPLANE_FLOOR,
        })
    }

    pub fn system(&self) -> &RootSystem<f64> {
        self.ctx.system()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn weight(&self, tau: f64) -> ScaledWeight<'_> {
        ScaledWeight {
            system: self.system(),
            omega: self.omega,
            tau,
        }
    }

    fn check_point(&self, zeta: &[f64]) -> Result<()> {
        check_dim(self.system().dim(), zeta.len())?;
        self.system().ensure_off_hyperplanes(zeta, self.floor)
    }

    /// `W = omega |zeta|^2/2 - sum_{R_+} k ln|alpha . zeta| + omega N tau`.
    pub fn w(&self, tau: f64, zeta: &[f64]) -> Result<f64> {
        self.check_point(zeta)?;
        Ok(self.weight(tau).value(zeta))
    }

    pub fn grad_w(&self, zeta: &[f64]) -> Result<Vec<f64>> {
        self.check_point(zeta)?;
        Ok(self.weight(0.0).gradient(zeta))
    }

    pub fn laplacian_w(&self, zeta: &[f64]) -> Result<f64> {
        self.check_point(zeta)?;
        Ok(self.weight(0.0).laplacian(zeta))
    }

    /// `dW/dtau = omega N`.
    pub fn dtau_w(&self) -> f64 {
        self.omega * self.system().dim() as f64
    }

    /// Conjugation identities for `d_tau`, `d_i` and the Laplacian, each
    /// side evaluated on `f` independently.
    pub fn similarity_check(
        &self,
        f: &TestFunction,
        tau: f64,
        zeta: &[f64],
    ) -> Result<SimilarityResiduals> {
        self.check_point(zeta)?;
        let sys = self.system();
        let w = self.omega;
        let n = sys.dim() as f64;
        let slice = f.at(tau);
        let fv = slice.value(zeta)?;
        let gf = slice.gradient(zeta)?;
        let lf = slice.laplacian(zeta)?;
        let pot = self.weight(tau);
        let gw = pot.gradient(zeta);
        let lw = pot.laplacian(zeta);

        let time = Comparison::new(f.dtau(tau, zeta)? - self.dtau_w() * fv, f.dtau(tau, zeta)? - w * n * fv);

        let mut sum_a = vec![0.0; sys.dim()];
        for r in sys.positive_roots() {
            let c = r.multiplicity / r.pair(zeta);
            for (s, a) in sum_a.iter_mut().zip(&r.vector) {
                *s += c * a;
            }
        }
        let gradient = (0..sys.dim())
            .map(|i| {
                Comparison::new(
                    gf[i] - gw[i] * fv,
                    gf[i] - w * zeta[i] * fv + sum_a[i] * fv,
                )
            })
            .collect();

        let lhs = lf - 2.0 * dot(&gw, &gf) + (norm_sq(&gw) - lw) * fv;
        let mut drift = 0.0;
        let mut single = 0.0;
        for r in sys.positive_roots() {
            let p = r.pair(zeta);
            drift += r.multiplicity * dot(&r.vector, &gf) / p;
            single += r.multiplicity * r.squared_norm / (p * p);
        }
        let double = double_sum(sys, zeta);
        let gamma = sys.gamma();
        let rhs = lf - 2.0 * w * dot(zeta, &gf) + 2.0 * drift
            + (w * w * norm_sq(zeta) - (2.0 * gamma + n) * w + double - single) * fv;
        Ok(SimilarityResiduals {
            time,
            gradient,
            laplacian: Comparison::new(lhs, rhs),
        })
    }

    /// Both sides of the transformation identity at `(t, x)`.
    pub fn theorem1(&self, u: &TestFunction, t: f64, x: &[f64]) -> Result<Comparison> {
        check_dim(self.system().dim(), x.len())?;
        let (tau, zeta) = substitute(t, x, self.omega)?;
        self.check_point(&zeta)?;
        let pot = self.weight(tau);
        let slice = u.at(tau);
        let conj = Conjugated {
            pot: &pot,
            f: &slice,
            w0: pot.value(&zeta),
        };
        let uv = slice.value(&zeta)?;
        let dtau_u = (u.lambda - self.dtau_w()) * uv;
        let fwd = self.ctx.kfe_generator(&conj, &zeta)?;
        let radial = self.omega * dot(&zeta, &conj.gradient(&zeta)?);
        let lhs = dtau_u - fwd - radial;
        let h = self.cm.apply(&slice, &zeta)?;
        let rhs = u.lambda * uv + h - self.cm.ground_energy() * uv;
        Ok(Comparison::new(lhs, rhs))
    }
}

/// `sum_{alpha, xi in R_+} (alpha . xi) k(alpha) k(xi) / ((alpha . zeta)(xi . zeta))`.
fn double_sum<S: Scalar>(sys: &RootSystem<S>, zeta: &[S]) -> S {
    let pos: Vec<(&Root<S>, S)> = sys
        .positive_roots()
        .map(|r| (r, r.multiplicity.clone() / r.pair(zeta)))
        .collect();
    let mut acc = S::zero();
    for (a, ca) in &pos {
        for (b, cb) in &pos {
            acc = acc + dot(&a.vector, &b.vector) * ca.clone() * cb.clone();
        }
    }
    acc
}

/// Both sides of the double-sum collapse
/// `sum_{alpha, xi} (alpha . xi) k k' / ((alpha.zeta)(xi.zeta)) = sum_alpha alpha^2 k^2 / (alpha.zeta)^2`.
pub fn lemma2<S: Scalar>(sys: &RootSystem<S>, zeta: &[S]) -> Result<(S, S)> {
    sys.ensure_off_hyperplanes(zeta, HYPERPLANE_FLOOR)?;
    let lhs = double_sum(sys, zeta);
    let rhs = sys.positive_roots().fold(S::zero(), |acc, r| {
        let p = r.pair(zeta);
        let k = r.multiplicity.clone();
        acc + r.squared_norm.clone() * k.clone() * k / (p.clone() * p)
    });
    Ok((lhs, rhs))
}

/// Largest `|1/((z_i-z_j)(z_i-z_l)) + cyclic|` over all triples.
pub fn triple_sum_a<S: Scalar>(zeta: &[S]) -> Result<S> {
    let n = zeta.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if zeta[i].near(&zeta[j], 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "coordinates {} and {} coincide",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let term = |a: &S, b: &S, c: &S| S::one() / ((a.clone() - b.clone()) * (a.clone() - c.clone()));
    let mut worst = S::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            for l in (j + 1)..n {
                let (a, b, c) = (&zeta[i], &zeta[j], &zeta[l]);
                let v = (term(a, b, c) + term(b, c, a) + term(c, a, b)).abs();
                if v > worst {
                    worst = v;
                }
            }
        }
    }
    Ok(worst)
}

/// Type-A transformation identity with `omega = k`, written with explicit
/// pair sums and coordinate swaps.
pub fn corollary1(n: usize, k: f64, u: &TestFunction, t: f64, x: &[f64]) -> Result<Comparison> {
    if n < 2 {
        return Err(Error::InvalidParameter("type A needs N >= 2".into()));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidParameter("multiplicity must be positive".into()));
    }
    check_dim(n, x.len())?;
    check_dim(n, u.poly().nvars())?;
    let (tau, z) = substitute(t, x, k)?;
    for i in 0..n {
        for j in (i + 1)..n {
            if ((z[i] - z[j]).abs() / 2f64.sqrt()) < HYPERPLANE_FLOOR {
                return Err(Error::HyperplaneProximity {
                    root: i * n + j,
                    distance: (z[i] - z[j]).abs() / 2f64.sqrt(),
                });
            }
        }
    }
    let nf = n as f64;
    let wa = |y: &[f64]| -> f64 {
        let mut s = 0.5 * k * norm_sq(y) + k * nf * tau;
        for i in 0..n {
            for j in (i + 1)..n {
                s -= k * (y[i] - y[j]).abs().ln();
            }
        }
        s
    };
    let mut gw: Vec<f64> = z.iter().map(|v| k * v).collect();
    let mut lw = k * nf;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = z[i] - z[j];
                gw[i] -= k / d;
                lw += k / (d * d);
            }
        }
    }
    let slice = u.at(tau);
    let uv = slice.value(&z)?;
    let gu = slice.gradient(&z)?;
    let lu = slice.laplacian(&z)?;
    let w0 = wa(&z);
    // derivatives of e^{-(W - W(z))} U at z
    let grad: Vec<f64> = gu.iter().zip(&gw).map(|(g, w)| g - uv * w).collect();
    let lap = lu - 2.0 * dot(&gw, &gu) + (norm_sq(&gw) - lw) * uv;

    let mut fwd = 0.5 * lap;
    let mut h = -0.5 * lu + 0.5 * k * k * norm_sq(&z) * uv;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = z[i] - z[j];
            let mut s = z.clone();
            s.swap(i, j);
            let us = slice.value(&s)?;
            let conj_s = (w0 - wa(&s)).exp() * us;
            fwd += -k * (grad[i] - grad[j]) / d + k * (uv + conj_s) / (d * d);
            h += k * (k * uv - us) / (d * d);
        }
    }
    let lhs = (u.lambda - k * nf) * uv - fwd - k * dot(&z, &grad);
    let rhs = u.lambda * uv + h - ground_energy_type_a(n, k) * uv;
    Ok(Comparison::new(lhs, rhs))
}

/// Conjugation by `e^{-W_0}`, `W_0 = -sum_{R_+} k ln|alpha . x|`, takes the
/// forward generator to minus the CM Hamiltonian without confinement:
/// compares `e^{W_0} L_fwd (e^{-W_0} f)` with `-H_{omega=0} f`.
pub fn unconfined_check<F: PointFunction<f64>>(
    system: &RootSystem<f64>,
    f: &F,
    x: &[f64],
) -> Result<Comparison> {
    let ctx = DunklContext::new(system.clone())?;
    check_dim(system.dim(), x.len())?;
    system.ensure_off_hyperplanes(x, HYPERPLANE_FLOOR)?;
    let pot = LogWeight { system };
    let conj = Conjugated {
        pot: &pot,
        f,
        w0: pot.value(x),
    };
    let lhs = ctx.kfe_generator(&conj, x)?;
    let cm = CmParams::new(system.clone(), 0.0)?;
    Ok(Comparison::new(lhs, -cm.apply(f, x)?))
}

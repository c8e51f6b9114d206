//! Dunkl operators, the Dunkl Laplacian and the backward/forward generators
//! of Dunkl processes.

use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::func::PointFunction;
use crate::polyx::MultiPoly;
use crate::rootsys::RootSystem;
use crate::scalar::{dot, two, Rational, Scalar};

/// Default normalized hyperplane distance below which float evaluation is
/// refused.
pub const HYPERPLANE_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct DunklContext<S> {
    system: RootSystem<S>,
    floor: f64,
}

/// The pieces of the generators at one point, summed over `R_+`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorTerms<S> {
    pub value: S,
    pub laplacian: S,
    /// `sum k (alpha . grad f) / (alpha . x)`
    pub drift: S,
    /// `sum k alpha^2 (f(x) - f(sigma x)) / (alpha . x)^2`
    pub jump_difference: S,
    /// `sum k alpha^2 (f(x) + f(sigma x)) / (alpha . x)^2`
    pub jump_sum: S,
}

impl<S: Scalar> DunklContext<S> {
    /// Fails unless the system is closed and reduced.
    pub fn new(system: RootSystem<S>) -> Result<Self> {
        let rep = system.check_closure();
        if !rep.ok() {
            return Err(Error::InvalidRootSystem(format!(
                "not a reduced root system: {rep:?}"
            )));
        }
        Ok(DunklContext {
            system,
            floor: HYPERPLANE_FLOOR,
        })
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn system(&self) -> &RootSystem<S> {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn generator_terms<F: PointFunction<S> + ?Sized>(
        &self,
        f: &F,
        x: &[S],
    ) -> Result<GeneratorTerms<S>> {
        check_dim(self.dim(), f.dim())?;
        self.system.ensure_off_hyperplanes(x, self.floor)?;
        let value = f.value(x)?;
        let grad = f.gradient(x)?;
        let laplacian = f.laplacian(x)?;
        let (mut drift, mut jd, mut js) = (S::zero(), S::zero(), S::zero());
        for r in self.system.positive_roots() {
            if r.multiplicity.is_zero() {
                continue;
            }
            let p = r.pair(x);
            let fr = f.reflected_value(r, x)?;
            let k = r.multiplicity.clone();
            drift = drift + k.clone() * dot(&r.vector, &grad) / p.clone();
            let c = k * r.squared_norm.clone() / (p.clone() * p);
            jd = jd + c.clone() * (value.clone() - fr.clone());
            js = js + c * (value.clone() + fr);
        }
        Ok(GeneratorTerms {
            value,
            laplacian,
            drift,
            jump_difference: jd,
            jump_sum: js,
        })
    }

    /// Dunkl Laplacian from its expanded form.
    pub fn dunkl_laplacian_expanded<F: PointFunction<S> + ?Sized>(
        &self,
        f: &F,
        x: &[S],
    ) -> Result<S> {
        let t = self.generator_terms(f, x)?;
        Ok(t.laplacian + two::<S>() * t.drift - t.jump_difference)
    }

    /// Backward generator: half the Dunkl Laplacian.
    pub fn kbe_generator<F: PointFunction<S> + ?Sized>(&self, f: &F, x: &[S]) -> Result<S> {
        let t = self.generator_terms(f, x)?;
        Ok((t.laplacian - t.jump_difference) / two::<S>() + t.drift)
    }

    /// Forward generator acting on the terminal variable.
    pub fn kfe_generator<F: PointFunction<S> + ?Sized>(&self, f: &F, x: &[S]) -> Result<S> {
        let t = self.generator_terms(f, x)?;
        Ok((t.laplacian + t.jump_sum) / two::<S>() - t.drift)
    }
}

impl DunklContext<Rational> {
    /// Difference quotients `(p - p o sigma_alpha)/(alpha . x)` for every
    /// positive root with nonzero multiplicity, pre-multiplied by `k(alpha)`.
    fn weighted_quotients(&self, p: &MultiPoly) -> Result<Vec<(usize, MultiPoly)>> {
        check_dim(self.dim(), p.nvars())?;
        self.system
            .positive_indices()
            .iter()
            .filter(|&&i| !self.system.root(i).multiplicity.is_zero())
            .map(|&i| {
                let r = self.system.root(i);
                let q = p.alternating_quotient(&r.vector)?;
                Ok((i, q.scale(&r.multiplicity)))
            })
            .collect()
    }

    /// `T_xi p`.
    pub fn dunkl_apply(&self, xi: &[Rational], p: &MultiPoly) -> Result<MultiPoly> {
        check_dim(self.dim(), xi.len())?;
        let mut out = p.directional(xi)?;
        for (i, q) in self.weighted_quotients(p)? {
            let c = self.system.root(i).pair(xi);
            out = out.try_add(&q.scale(&c))?;
        }
        Ok(out)
    }

    /// `(T_1 p, ..., T_N p)` sharing the difference quotients.
    pub fn dunkl_gradient(&self, p: &MultiPoly) -> Result<Vec<MultiPoly>> {
        let qs = self.weighted_quotients(p)?;
        (0..self.dim())
            .map(|j| {
                let mut out = p.partial(j)?;
                for (i, q) in &qs {
                    let a = &self.system.root(*i).vector[j];
                    out = out.try_add(&q.scale(a))?;
                }
                Ok(out)
            })
            .collect()
    }

    /// `T_i p` along the coordinate axis `i` (zero-based).
    pub fn dunkl_partial(&self, i: usize, p: &MultiPoly) -> Result<MultiPoly> {
        if i >= self.dim() {
            return Err(Error::VariableIndex {
                index: i,
                nvars: self.dim(),
            });
        }
        let mut e = vec![Rational::from_i64(0); self.dim()];
        e[i] = Rational::from_i64(1);
        self.dunkl_apply(&e, p)
    }

    /// `sum_i T_i (T_i p)` by repeated application.
    pub fn dunkl_laplacian_direct(&self, p: &MultiPoly) -> Result<MultiPoly> {
        let grad = self.dunkl_gradient(p)?;
        let mut out = MultiPoly::zero(self.dim());
        for (i, g) in grad.iter().enumerate() {
            out = out.try_add(&self.dunkl_partial(i, g)?)?;
        }
        Ok(out)
    }
}

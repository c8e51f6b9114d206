//! Functions evaluable at a point together with their gradient, Laplacian
//! and reflected values.

use crate::error::{check_dim, Result};
use crate::polyx::MultiPoly;
use crate::rootsys::Root;
use crate::scalar::{norm_sq, Scalar};

pub trait PointFunction<S: Scalar>: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[S]) -> Result<S>;

    fn gradient(&self, x: &[S]) -> Result<Vec<S>>;

    fn laplacian(&self, x: &[S]) -> Result<S>;

    /// `f(sigma_alpha x)`.
    fn reflected_value(&self, root: &Root<S>, x: &[S]) -> Result<S> {
        self.value(&root.reflect(x)?)
    }
}

/// Polynomial with exact derivatives, evaluable in any scalar field.
#[derive(Clone, Debug)]
pub struct PolyFunction {
    poly: MultiPoly,
    grad: Vec<MultiPoly>,
    lap: MultiPoly,
}

impl PolyFunction {
    pub fn new(poly: MultiPoly) -> Self {
        let grad = poly.gradient();
        let lap = poly.laplacian();
        PolyFunction { poly, grad, lap }
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }
}

impl<S: Scalar> PointFunction<S> for PolyFunction {
    fn dim(&self) -> usize {
        self.poly.nvars()
    }

    fn value(&self, x: &[S]) -> Result<S> {
        self.poly.eval_generic(x)
    }

    fn gradient(&self, x: &[S]) -> Result<Vec<S>> {
        self.grad.iter().map(|g| g.eval_generic(x)).collect()
    }

    fn laplacian(&self, x: &[S]) -> Result<S> {
        self.lap.eval_generic(x)
    }
}

/// A value-only closure; derivatives come from central differences.
pub struct FnFunction<F> {
    dim: usize,
    f: F,
}

impl<F> FnFunction<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnFunction { dim, f }
    }

    fn step(x: &[f64], power: f64) -> f64 {
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        f64::EPSILON.powf(power) * scale
    }
}

impl<F> PointFunction<f64> for FnFunction<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok((self.f)(x))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let h = Self::step(x, 1.0 / 3.0);
        let mut y = x.to_vec();
        Ok((0..self.dim)
            .map(|i| {
                y[i] = x[i] + h;
                let fp = (self.f)(&y);
                y[i] = x[i] - h;
                let fm = (self.f)(&y);
                y[i] = x[i];
                (fp - fm) / (2.0 * h)
            })
            .collect())
    }

    fn laplacian(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        // Second differences balance truncation against rounding at eps^(1/4).
        let h = Self::step(x, 0.25);
        let f0 = (self.f)(x);
        let mut y = x.to_vec();
        let mut acc = 0.0;
        for i in 0..self.dim {
            y[i] = x[i] + h;
            let fp = (self.f)(&y);
            y[i] = x[i] - h;
            let fm = (self.f)(&y);
            y[i] = x[i];
            acc += (fp - 2.0 * f0 + fm) / (h * h);
        }
        Ok(acc)
    }
}

/// `exp(-omega |x|^2 / 2)` with closed-form derivatives.
#[derive(Clone, Copy, Debug)]
pub struct Gaussian {
    pub dim: usize,
    pub omega: f64,
}

impl PointFunction<f64> for Gaussian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok((-0.5 * self.omega * norm_sq(x)).exp())
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let v = self.value(x)?;
        Ok(x.iter().map(|xi| -self.omega * xi * v).collect())
    }

    fn laplacian(&self, x: &[f64]) -> Result<f64> {
        let v = self.value(x)?;
        let w = self.omega;
        Ok((w * w * norm_sq(x) - w * self.dim as f64) * v)
    }
}

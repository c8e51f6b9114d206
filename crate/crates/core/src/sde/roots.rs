//! Zeros of Hermite and Laguerre polynomials.
//!
//! Eigenvalues of the symmetric Jacobi matrix give starting values, which are
//! then polished by Newton steps on the three-term recurrence.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{int, Rational};

pub const MAX_ROOTS: usize = 50;

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_ROOTS).contains(&n) {
        Ok(())
    } else {
        Err(Error::Range(format!("N must lie in 1..={MAX_ROOTS}, got {n}")))
    }
}

fn jacobi_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn polish(z: &mut [f64], eval: impl Fn(f64) -> (f64, f64)) {
    for zi in z.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = eval(*zi);
            if dp == 0.0 || !p.is_finite() || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            let next = *zi - step;
            if step.abs() <= f64::EPSILON * zi.abs().max(1e-300) {
                *zi = next;
                break;
            }
            *zi = next;
        }
    }
}

/// `(H_n(x), H_n'(x))`, physicists' convention.
fn hermite_eval(n: usize, x: f64) -> (f64, f64) {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * m as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    (h1, 2.0 * n as f64 * h0)
}

/// `(L_n^(a)(x), d/dx L_n^(a)(x))`.
fn laguerre_eval(n: usize, a: f64, x: f64) -> (f64, f64) {
    let (mut l0, mut l1) = (1.0, 1.0 + a - x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 1..n {
        let mf = m as f64;
        let l2 = ((2.0 * mf + 1.0 + a - x) * l1 - (mf + a) * l0) / (mf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    let nf = n as f64;
    (l1, (nf * l1 - (nf + a) * l0) / x)
}

/// Ascending zeros of the Hermite polynomial `H_n`, exactly symmetric about 0.
pub fn hermite_roots(n: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    let mut z = jacobi_eigenvalues(&vec![0.0; n], &off);
    polish(&mut z, |x| hermite_eval(n, x));
    let sym: Vec<f64> = (0..n).map(|i| 0.5 * (z[i] - z[n - 1 - i])).collect();
    Ok(sym)
}

/// Ascending zeros of the generalized Laguerre polynomial `L_n^(a)`, `a > -1`.
pub fn laguerre_roots(n: usize, a: f64) -> Result<Vec<f64>> {
    check_n(n)?;
    if !(a > -1.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("Laguerre parameter must exceed -1, got {a}")));
    }
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + a + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|i| (i as f64 * (i as f64 + a)).sqrt()).collect();
    let mut z = jacobi_eigenvalues(&diag, &off);
    polish(&mut z, |x| laguerre_eval(n, a, x));
    z.sort_by(f64::total_cmp);
    Ok(z)
}

/// `max_i |sum_{j != i} 1/(z_i - z_j) - target(z_i)|`.
pub fn pair_sum_residual(z: &[f64], target: impl Fn(f64) -> f64) -> f64 {
    per_root(z, target).into_iter().fold(0.0, f64::max)
}

/// Per-root residuals of `sum_{j != i} 1/(z_i - z_j) = z_i`.
pub fn hermite_identity_residuals(z: &[f64]) -> Vec<f64> {
    per_root(z, |x| x)
}

/// Per-root residuals of `sum_{j != i} 1/(z_i - z_j) = (z_i - a - 1)/(2 z_i)`.
pub fn laguerre_identity_residuals(z: &[f64], a: f64) -> Vec<f64> {
    per_root(z, |x| (x - a - 1.0) / (2.0 * x))
}

fn per_root(z: &[f64], target: impl Fn(f64) -> f64) -> Vec<f64> {
    z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            let s: f64 = z
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, zj)| 1.0 / (zi - zj))
                .sum();
            (s - target(zi)).abs()
        })
        .collect()
}

/// Dense univariate polynomial, coefficient of `x^i` at index `i`.
pub type UniPoly = Vec<Rational>;

fn trim(mut p: UniPoly) -> UniPoly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// `H_n` with exact coefficients from the recurrence.
pub fn hermite_poly(n: usize) -> UniPoly {
    let mut h0: UniPoly = vec![int(1)];
    if n == 0 {
        return h0;
    }
    let mut h1: UniPoly = vec![int(0), int(2)];
    for m in 1..n {
        let mut h2 = vec![Rational::zero(); m + 2];
        for (i, c) in h1.iter().enumerate() {
            h2[i + 1] += c * int(2);
        }
        for (i, c) in h0.iter().enumerate() {
            h2[i] -= c * int(2 * m as i64);
        }
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `L_n^(a)` with exact coefficients, rational `a`.
pub fn laguerre_poly(n: usize, a: &Rational) -> UniPoly {
    let mut l0: UniPoly = vec![int(1)];
    if n == 0 {
        return l0;
    }
    let mut l1: UniPoly = vec![int(1) + a, int(-1)];
    for m in 1..n {
        let mr = int(m as i64);
        let mut l2 = vec![Rational::zero(); m + 2];
        let c1 = int(2) * &mr + int(1) + a;
        for (i, c) in l1.iter().enumerate() {
            l2[i] += c * &c1;
            l2[i + 1] -= c.clone();
        }
        for (i, c) in l0.iter().enumerate() {
            l2[i] -= c * (&mr + a);
        }
        let d = &mr + int(1);
        l0 = l1;
        l1 = l2.into_iter().map(|c| c / &d).collect();
    }
    l1
}

pub fn uni_derivative(p: &UniPoly) -> UniPoly {
    if p.len() <= 1 {
        return vec![Rational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * int(i as i64))
        .collect()
}

pub fn uni_mul(p: &UniPoly, q: &UniPoly) -> UniPoly {
    let mut out = vec![Rational::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    trim(out)
}

pub fn uni_sub(p: &UniPoly, q: &UniPoly) -> UniPoly {
    let n = p.len().max(q.len());
    let get = |v: &UniPoly, i: usize| v.get(i).cloned().unwrap_or_else(Rational::zero);
    trim((0..n).map(|i| get(p, i) - get(q, i)).collect())
}

/// Quotient and remainder of `p / d`.
pub fn uni_divrem(p: &UniPoly, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
    let d = trim(d.clone());
    let lead = d.last().cloned().unwrap_or_else(Rational::zero);
    if lead.is_zero() {
        return Err(Error::InvalidParameter("division by the zero polynomial".into()));
    }
    let mut r = trim(p.clone());
    if r.len() < d.len() {
        return Ok((vec![Rational::zero()], r));
    }
    let mut q = vec![Rational::zero(); r.len() - d.len() + 1];
    while r.len() >= d.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - d.len();
        let c = r.last().unwrap() / &lead;
        for (i, dc) in d.iter().enumerate() {
            r[shift + i] -= &c * dc;
        }
        q[shift] = c;
        r.pop();
        if r.is_empty() {
            r.push(Rational::zero());
        }
        r = trim(r);
    }
    Ok((trim(q), r))
}

pub fn uni_is_zero(p: &UniPoly) -> bool {
    p.iter().all(Zero::is_zero)
}

pub fn uni_eval_f64(p: &UniPoly, x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + crate::scalar::Scalar::to_f64(c))
}

/// Exact check that `H_n'' - 2x H_n'` is divisible by `H_n`, which makes
/// `H_n''(z)/(2 H_n'(z)) = z` at every zero.
pub fn hermite_ode_remainder_vanishes(n: usize) -> Result<bool> {
    let h = hermite_poly(n);
    let d1 = uni_derivative(&h);
    let d2 = uni_derivative(&d1);
    let lhs = uni_sub(&d2, &uni_mul(&vec![Rational::zero(), int(2)], &d1));
    Ok(uni_is_zero(&uni_divrem(&lhs, &h)?.1))
}

/// Exact check that `x L'' - (x - a - 1) L'` is divisible by `L = L_n^(a)`.
pub fn laguerre_ode_remainder_vanishes(n: usize, a: &Rational) -> Result<bool> {
    let l = laguerre_poly(n, a);
    let d1 = uni_derivative(&l);
    let d2 = uni_derivative(&d1);
    let x = vec![Rational::zero(), Rational::one()];
    let shift = vec![-(int(1) + a), Rational::one()];
    let lhs = uni_sub(&uni_mul(&x, &d2), &uni_mul(&shift, &d1));
    Ok(uni_is_zero(&uni_divrem(&lhs, &l)?.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn small_hermite() {
        assert_eq!(hermite_roots(1).unwrap(), vec![0.0]);
        let z = hermite_roots(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z[0] + s).abs() < 1e-14 && (z[1] - s).abs() < 1e-14);
        assert!(hermite_roots(0).is_err());
        assert!(hermite_roots(51).is_err());
    }

    #[test]
    fn exact_polys() {
        assert_eq!(hermite_poly(2), vec![int(-2), int(0), int(4)]);
        assert_eq!(hermite_poly(3), vec![int(0), int(-12), int(0), int(8)]);
        // L_2^(a) = ((a+1)(a+2) - 2(a+2)x + x^2)/2
        let a = rat(1, 2);
        let l2 = laguerre_poly(2, &a);
        assert_eq!(l2, vec![rat(15, 8), rat(-5, 2), rat(1, 2)]);
    }

    #[test]
    fn ode_oracles_hold_exactly() {
        for n in 1..=20 {
            assert!(hermite_ode_remainder_vanishes(n).unwrap(), "H_{n}");
        }
        for a in [int(0), rat(1, 2), int(3)] {
            for n in 1..=10 {
                assert!(laguerre_ode_remainder_vanishes(n, &a).unwrap());
            }
        }
    }

    #[test]
    fn roots_match_ode_ratio() {
        // H''/(2H') evaluated from exact coefficients agrees with the pair sum.
        for n in 2..=12 {
            let z = hermite_roots(n).unwrap();
            let h = hermite_poly(n);
            let d1 = uni_derivative(&h);
            let d2 = uni_derivative(&d1);
            for (i, zi) in z.iter().enumerate() {
                let ratio = uni_eval_f64(&d2, *zi) / (2.0 * uni_eval_f64(&d1, *zi));
                let s: f64 = z.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, zj)| 1.0 / (zi - zj)).sum();
                assert!((ratio - s).abs() < 1e-8 * (1.0 + s.abs()), "n={n}");
            }
        }
    }

    #[test]
    fn electrostatic_identities() {
        for n in 1..=20 {
            let z = hermite_roots(n).unwrap();
            assert!(pair_sum_residual(&z, |x| x) < 1e-10, "n={n}");
            assert!(z.windows(2).all(|w| w[0] < w[1]));
        }
        for a in [0.0, 0.5, 2.0] {
            for n in 1..=20 {
                let z = laguerre_roots(n, a).unwrap();
                let r = pair_sum_residual(&z, |x| (x - a - 1.0) / (2.0 * x));
                assert!(r < 1e-10, "n={n} a={a} r={r}");
                assert!(z[0] > 0.0);
            }
        }
        assert!(laguerre_roots(3, -1.0).is_err());
    }

    #[test]
    fn large_n_stays_accurate() {
        let z = hermite_roots(50).unwrap();
        let scale = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(pair_sum_residual(&z, |x| x) < 1e-9 * scale);
    }
}

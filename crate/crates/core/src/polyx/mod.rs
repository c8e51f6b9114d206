//! Exact multivariate polynomials with rational coefficients.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::scalar::{int, Rational, Scalar};

pub use parse::parse_poly;

/// Largest total degree a polynomial may reach.
pub const DEGREE_CAP: u32 = 16;

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `nvars` variables. Zero coefficients are never stored, so
/// structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::VariableIndex { index: i, nvars });
        }
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exponents: Vec<u32>, c: Rational) -> Result<Self> {
        let m = Monomial(exponents);
        let d = m.degree();
        if d > DEGREE_CAP {
            return Err(Error::DegreeCap {
                degree: d,
                cap: DEGREE_CAP,
            });
        }
        let mut p = Self::zero(m.0.len());
        p.add_term(m, c);
        Ok(p)
    }

    /// The linear form `alpha . x`.
    pub fn linear_form(alpha: &[Rational]) -> Self {
        let n = alpha.len();
        let mut p = Self::zero(n);
        for (i, a) in alpha.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(Monomial(e), a.clone());
        }
        p
    }

    /// `|x|^2`.
    pub fn norm_squared(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.add_term(Monomial(e), Rational::one());
        }
        p
    }

    /// All monomials `x^e` with `|e| <= degree`, in increasing graded order.
    pub fn monomials_up_to(nvars: usize, degree: u32) -> Result<Vec<Self>> {
        if degree > DEGREE_CAP {
            return Err(Error::DegreeCap {
                degree,
                cap: DEGREE_CAP,
            });
        }
        let mut out = Vec::new();
        let mut e = vec![0u32; nvars];
        fn rec(i: usize, left: u32, e: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == e.len() {
                out.push(Monomial(e.clone()));
                return;
            }
            for v in 0..=left {
                e[i] = v;
                rec(i + 1, left - v, e, out);
            }
            e[i] = 0;
        }
        let mut ms = Vec::new();
        rec(0, degree, &mut e, &mut ms);
        ms.sort();
        for m in ms {
            out.push(Self::monomial(m.0, Rational::one())?);
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.nvars, other.nvars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.nvars, other.nvars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.nvars, other.nvars)?;
        if let (Some(a), Some(b)) = (self.degree(), other.degree()) {
            if a + b > DEGREE_CAP {
                return Err(Error::DegreeCap {
                    degree: a + b,
                    cap: DEGREE_CAP,
                });
            }
        }
        let mut out = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = Self::one(self.nvars);
        for _ in 0..e {
            out = out.try_mul(self)?;
        }
        Ok(out)
    }

    /// Formal derivative with respect to the zero-based variable `i`.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.nvars {
            return Err(Error::VariableIndex {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c.clone() * int(e as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars)
            .map(|i| self.partial(i).expect("index in range"))
            .collect()
    }

    /// Directional derivative `xi . grad p`.
    pub fn directional(&self, xi: &[Rational]) -> Result<Self> {
        check_dim(self.nvars, xi.len())?;
        let mut out = Self::zero(self.nvars);
        for (i, c) in xi.iter().enumerate() {
            if !c.is_zero() {
                out = out.try_add(&self.partial(i)?.scale(c))?;
            }
        }
        Ok(out)
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for i in 0..self.nvars {
            let d2 = self
                .partial(i)
                .and_then(|d| d.partial(i))
                .expect("index in range");
            out = out.try_add(&d2).expect("same variable count");
        }
        out
    }

    /// `p(M x)` for an `nvars x nvars` matrix `M`.
    pub fn compose_linear(&self, matrix: &[Vec<Rational>]) -> Result<Self> {
        check_dim(self.nvars, matrix.len())?;
        for row in matrix {
            check_dim(self.nvars, row.len())?;
        }
        let forms: Vec<MultiPoly> = matrix.iter().map(|row| Self::linear_form(row)).collect();
        let maxdeg = self.degree().unwrap_or(0);
        // powers[i][e] = (row_i . x)^e
        let mut powers: Vec<Vec<MultiPoly>> = Vec::with_capacity(self.nvars);
        for f in &forms {
            let mut ps = vec![Self::one(self.nvars)];
            for e in 1..=maxdeg as usize {
                let next = ps[e - 1].try_mul(f)?;
                ps.push(next);
            }
            powers.push(ps);
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut t = Self::constant(self.nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.try_mul(&powers[i][e as usize])?;
                }
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }

    /// `p(sigma_alpha x)`.
    pub fn compose_reflection(&self, alpha: &[Rational]) -> Result<Self> {
        check_dim(self.nvars, alpha.len())?;
        if alpha.iter().all(Zero::is_zero) {
            return Err(Error::InvalidRoot("zero root vector".into()));
        }
        let n2: Rational = alpha.iter().map(|a| a.clone() * a.clone()).sum();
        let c = int(2) / n2;
        let m: Vec<Vec<Rational>> = (0..self.nvars)
            .map(|i| {
                (0..self.nvars)
                    .map(|j| {
                        let d = if i == j { Rational::one() } else { Rational::zero() };
                        d - c.clone() * alpha[i].clone() * alpha[j].clone()
                    })
                    .collect()
            })
            .collect();
        self.compose_linear(&m)
    }

    /// Divide by the linear form `alpha . x`, returning quotient and
    /// remainder. The remainder does not involve the pivot variable.
    pub fn div_linear(&self, alpha: &[Rational]) -> Result<(Self, Self)> {
        check_dim(self.nvars, alpha.len())?;
        let v = alpha
            .iter()
            .rposition(|a| !a.is_zero())
            .ok_or_else(|| Error::InvalidRoot("zero root vector".into()))?;
        let av = alpha[v].clone();
        let mut rem = self.clone();
        let mut quo = Self::zero(self.nvars);
        loop {
            let lead = rem
                .terms
                .iter()
                .filter(|(m, _)| m.0[v] > 0)
                .max_by(|a, b| a.0 .0[v].cmp(&b.0 .0[v]).then_with(|| a.0.cmp(b.0)))
                .map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = lead else { break };
            let mut mq = m;
            mq.0[v] -= 1;
            let cq = c / av.clone();
            for (j, a) in alpha.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut mj = mq.clone();
                mj.0[j] += 1;
                rem.add_term(mj, -(cq.clone() * a.clone()));
            }
            quo.add_term(mq, cq);
        }
        Ok((quo, rem))
    }

    /// The polynomial `q` with `q (alpha . x) = p - p o sigma_alpha`.
    pub fn alternating_quotient(&self, alpha: &[Rational]) -> Result<Self> {
        let num = self.try_sub(&self.compose_reflection(alpha)?)?;
        let (q, r) = num.div_linear(alpha)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "difference quotient left remainder {r}"
            )));
        }
        Ok(q)
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        self.eval_generic(x)
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.eval_generic(x)
    }

    /// Evaluate in any scalar field; coefficients are converted first.
    pub fn eval_generic<S: Scalar>(&self, x: &[S]) -> Result<S> {
        check_dim(self.nvars, x.len())?;
        let maxdeg = self.degree().unwrap_or(0) as usize;
        let powers: Vec<Vec<S>> = x
            .iter()
            .map(|xi| {
                let mut ps = vec![S::one()];
                for e in 1..=maxdeg {
                    let next = ps[e - 1].clone() * xi.clone();
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[i][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    /// Panics on mismatched variable counts; see [`MultiPoly::try_add`].
    fn add(self, rhs: Self) -> MultiPoly {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: Self) -> MultiPoly {
        self.try_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: Self) -> MultiPoly {
        self.try_mul(rhs).expect("variable count mismatch or degree cap")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            let is_const = m.degree() == 0;
            let mut first = true;
            if is_const || !a.is_one() {
                write!(f, "{a}")?;
                first = false;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "x{}", i + 1)?;
                } else {
                    write!(f, "x{}^{}", i + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn p(s: &str, n: usize) -> MultiPoly {
        parse_poly(s, n).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&p("x1 + x2", 2) * &p("x1 - x2", 2), p("x1^2 - x2^2", 2));
        let q = p("3/2 x1^2 x2 - 7", 2);
        assert_eq!(&q + &MultiPoly::zero(2), q);
        assert_eq!(p("x1^2", 1).scale(&rat(1, 2)), p("1/2 x1^2", 1));
        assert!(matches!(
            p("x1", 1).try_add(&p("x1", 2)),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            p("x1^9", 1).try_mul(&p("x1^8", 1)),
            Err(Error::DegreeCap { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("x1^2 x2", 2).partial(0).unwrap(), p("2 x1 x2", 2));
        assert!(p("x1^2", 2).partial(1).unwrap().is_zero());
        assert!(matches!(
            p("x1", 2).partial(2),
            Err(Error::VariableIndex { .. })
        ));
        let vandermonde = p("x2 - x1", 3);
        let disc = &(&vandermonde * &p("x3 - x1", 3)) * &p("x3 - x2", 3);
        assert!(disc.laplacian().is_zero());
    }

    #[test]
    fn reflection_examples() {
        let a = [int(1), int(-1)];
        assert_eq!(p("x1", 2).compose_reflection(&a).unwrap(), p("x2", 2));
        let r = p("x1^2 + x2^2", 2);
        for alpha in [[1, 0], [0, 1], [1, 1], [1, -1]] {
            let al = [int(alpha[0]), int(alpha[1])];
            assert_eq!(r.compose_reflection(&al).unwrap(), r);
        }
        assert_eq!(
            p("x1", 2).compose_reflection(&[int(1), int(0)]).unwrap(),
            p("-x1", 2)
        );
        assert!(p("x1", 1).compose_reflection(&[int(0)]).is_err());
    }

    #[test]
    fn quotient_examples() {
        let e1 = [int(1)];
        assert_eq!(p("x1", 1).alternating_quotient(&e1).unwrap(), p("2", 1));
        assert!(p("x1^2", 1).alternating_quotient(&e1).unwrap().is_zero());
        assert_eq!(
            p("x1^2", 2).alternating_quotient(&[int(1), int(-1)]).unwrap(),
            p("x1 + x2", 2)
        );
    }

    #[test]
    fn div_linear_leaves_remainder_for_generic_input() {
        let (q, r) = p("x1 x2 + 3", 2).div_linear(&[int(1), int(2)]).unwrap();
        let back = &(&q * &MultiPoly::linear_form(&[int(1), int(2)])) + &r;
        assert_eq!(back, p("x1 x2 + 3", 2));
        assert!(r.terms().all(|(m, _)| m.exponents()[1] == 0));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("x1 x2", 2).eval(&[int(2), int(3)]).unwrap(), int(6));
        let q = p("5/3 x1^3 - x2 + 4", 2);
        assert_eq!(q.eval(&[int(0), int(0)]).unwrap(), int(4));
        assert!((q.eval_f64(&[0.5, 2.0]).unwrap() - (5.0 / 24.0 + 2.0)).abs() < 1e-15);
        assert!(q.eval(&[int(0)]).is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["3/2 x1^2 x3 - x2", "-x1 + 1", "0", "-7/3", "x1 x2 x3"] {
            let q = p(s, 3);
            assert_eq!(q.to_string(), s);
            assert_eq!(p(&q.to_string(), 3), q);
        }
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(MultiPoly::monomials_up_to(2, 2).unwrap().len(), 6);
        assert_eq!(MultiPoly::monomials_up_to(3, 4).unwrap().len(), 35);
    }
}

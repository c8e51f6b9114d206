#![allow(dead_code)]

use dunkl_core::scalar::{int, rat};
use dunkl_core::{Family, MultiPoly, Rational, RootScale, RootSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial of total degree <= `deg` with small rational
/// coefficients on about half of the monomials.
pub fn random_poly(r: &mut ChaCha8Rng, nvars: usize, deg: u32) -> MultiPoly {
    let mut p = MultiPoly::zero(nvars);
    for m in MultiPoly::monomials_up_to(nvars, deg).unwrap() {
        if r.random_bool(0.5) {
            let c = rat(r.random_range(-5..=5), r.random_range(1..=4));
            p = &p + &m.scale(&c);
        }
    }
    if p.is_zero() {
        p = MultiPoly::one(nvars);
    }
    p
}

pub fn random_rational_point(r: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rat(r.random_range(-40..=40), r.random_range(1..=7))).collect()
}

/// Random rational point off every mirror of `sys`.
pub fn generic_rational_point(r: &mut ChaCha8Rng, sys: &RootSystem<Rational>) -> Vec<Rational> {
    loop {
        let x = random_rational_point(r, sys.dim());
        if sys.ensure_off_hyperplanes(&x, 0.0).is_ok() {
            return x;
        }
    }
}

pub fn exact(f: Family, rank: usize, ks: &[Rational]) -> RootSystem<Rational> {
    RootSystem::build(f, rank, ks, RootScale::IntegerRepresentatives).unwrap()
}

pub fn ones(f: Family) -> Vec<Rational> {
    vec![int(1); f.multiplicity_count()]
}

pub fn random_ks(r: &mut ChaCha8Rng, f: Family) -> Vec<Rational> {
    (0..f.multiplicity_count())
        .map(|_| rat(r.random_range(1..=12), r.random_range(1..=4)))
        .collect()
}

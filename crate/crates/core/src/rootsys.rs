//! Root systems, reflections, multiplicities, the weight function and the
//! discriminant.
//!
//! A [`RootSystem`] is generic over [`Scalar`]: `RootSystem<f64>` for
//! pointwise numerics and `RootSystem<Rational>` for exact identities. Exact
//! systems always store integer representatives (`e_i - e_j`, `e_i`, ...),
//! since normalized roots of the classical families involve `sqrt(2)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::scalar::{dot, is_zero_vec, norm_sq, two, Rational, Scalar};

/// Tolerance used when matching floating-point roots.
pub const FLOAT_ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    D,
    I2,
}

impl Family {
    pub fn multiplicity_count(self) -> usize {
        match self {
            Family::A | Family::D => 1,
            Family::B | Family::I2 => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::D => "D",
            Family::I2 => "I2",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "D" => Ok(Family::D),
            "I2" | "I" => Ok(Family::I2),
            other => Err(Error::Unsupported(format!("root system family '{other}'"))),
        }
    }
}

/// How roots are scaled when a family is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootScale {
    /// Unit-length roots, e.g. `(e_i - e_j)/sqrt(2)`.
    Normalized,
    /// Integer coordinates, e.g. `e_i - e_j`.
    IntegerRepresentatives,
}

/// Reflection `x - 2 (x.alpha / alpha^2) alpha`.
pub fn reflect<S: Scalar>(alpha: &[S], x: &[S]) -> Result<Vec<S>> {
    check_dim(alpha.len(), x.len())?;
    if is_zero_vec(alpha) {
        return Err(Error::InvalidRoot("zero root vector".into()));
    }
    let c = two::<S>() * dot(x, alpha) / norm_sq(alpha);
    Ok(x.iter()
        .zip(alpha)
        .map(|(xi, ai)| xi.clone() - c.clone() * ai.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Root<S> {
    pub vector: Vec<S>,
    /// Cached `alpha . alpha`.
    pub squared_norm: S,
    pub multiplicity: S,
    /// Index of the reflection orbit this root belongs to.
    pub orbit: usize,
}

impl<S: Scalar> Root<S> {
    pub fn new(vector: Vec<S>, multiplicity: S) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidRoot("empty root vector".into()));
        }
        if is_zero_vec(&vector) {
            return Err(Error::InvalidRoot("zero root vector".into()));
        }
        if multiplicity < S::zero() {
            return Err(Error::InvalidRoot(format!(
                "negative multiplicity {multiplicity:?}"
            )));
        }
        let squared_norm = norm_sq(&vector);
        Ok(Root {
            vector,
            squared_norm,
            multiplicity,
            orbit: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    /// `alpha . x`.
    pub fn pair(&self, x: &[S]) -> S {
        dot(&self.vector, x)
    }

    pub fn reflect(&self, x: &[S]) -> Result<Vec<S>> {
        check_dim(self.dim(), x.len())?;
        let c = two::<S>() * self.pair(x) / self.squared_norm.clone();
        Ok(x.iter()
            .zip(&self.vector)
            .map(|(xi, ai)| xi.clone() - c.clone() * ai.clone())
            .collect())
    }

    /// `|alpha . x| / |alpha|`, the Euclidean distance to the mirror.
    pub fn hyperplane_distance(&self, x: &[S]) -> f64 {
        self.pair(x).to_f64().abs() / self.squared_norm.to_f64().sqrt()
    }
}

/// Descriptor of a built-in family, kept alongside the roots it produced.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyLabel<S> {
    pub family: Family,
    pub rank: usize,
    pub multiplicities: Vec<S>,
    pub scale: RootScale,
}

/// Outcome of [`RootSystem::check_closure`].
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureReport {
    pub closed: bool,
    pub reduced: bool,
    /// First `(alpha, xi)` pair whose reflection `sigma_alpha xi` is missing.
    pub missing: Option<(usize, usize)>,
    /// First pair of parallel roots other than `+-alpha`.
    pub non_reduced: Option<(usize, usize)>,
}

impl ClosureReport {
    pub fn ok(&self) -> bool {
        self.closed && self.reduced
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSystem<S> {
    dim: usize,
    roots: Vec<Root<S>>,
    positive: Vec<usize>,
    reflections: Vec<Vec<Vec<S>>>,
    gamma: S,
    chamber: Vec<f64>,
    label: Option<FamilyLabel<S>>,
}

impl<S: Scalar> RootSystem<S> {
    /// Build one of the supported families.
    ///
    /// `rank` is `N - 1` for `A_{N-1}`, `N` for `B_N` and `D_N`, and `m` for
    /// the dihedral family `I2(m)`.
    pub fn build(
        family: Family,
        rank: usize,
        multiplicities: &[S],
        scale: RootScale,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidParameter("rank must be at least 1".into()));
        }
        let expected = family.multiplicity_count();
        if multiplicities.len() != expected {
            return Err(Error::MultiplicityCount {
                family: family.to_string(),
                expected,
                got: multiplicities.len(),
            });
        }
        if let Some(k) = multiplicities.iter().find(|k| **k < S::zero()) {
            return Err(Error::InvalidParameter(format!(
                "multiplicities must be non-negative, got {k:?}"
            )));
        }
        if S::EXACT && scale == RootScale::Normalized {
            return Err(Error::Irrational(
                "normalized roots need square roots; use integer representatives".into(),
            ));
        }

        let (vectors, classes) = match family {
            Family::A => integer_vectors(type_a(rank + 1)),
            Family::B => integer_vectors(type_b(rank)),
            Family::D => {
                if rank < 2 {
                    return Err(Error::InvalidParameter("D_N requires N >= 2".into()));
                }
                integer_vectors(type_d(rank))
            }
            Family::I2 => dihedral::<S>(rank, scale, multiplicities)?,
        };

        let mut roots = Vec::with_capacity(vectors.len());
        for (v, class) in vectors.into_iter().zip(classes) {
            let v = if scale == RootScale::Normalized && family != Family::I2 {
                normalize(&v)
            } else {
                v
            };
            roots.push(Root::new(v, multiplicities[class].clone())?);
        }
        let label = FamilyLabel {
            family,
            rank,
            multiplicities: multiplicities.to_vec(),
            scale,
        };
        Self::assemble(roots, Some(label))
    }

    /// Assemble a system from arbitrary roots. Closure and reducedness are not
    /// enforced here; see [`RootSystem::check_closure`].
    pub fn from_roots(vectors: Vec<Vec<S>>, multiplicities: Vec<S>) -> Result<Self> {
        if vectors.len() != multiplicities.len() {
            return Err(Error::InvalidParameter(format!(
                "{} roots but {} multiplicities",
                vectors.len(),
                multiplicities.len()
            )));
        }
        let roots = vectors
            .into_iter()
            .zip(multiplicities)
            .map(|(v, k)| Root::new(v, k))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(roots, None)
    }

    fn assemble(mut roots: Vec<Root<S>>, label: Option<FamilyLabel<S>>) -> Result<Self> {
        let dim = roots
            .first()
            .map(Root::dim)
            .ok_or_else(|| Error::InvalidRootSystem("no roots".into()))?;
        for r in &roots {
            check_dim(dim, r.dim())?;
        }
        let orbits = compute_orbits(&roots);
        for (r, o) in roots.iter_mut().zip(orbits) {
            r.orbit = o;
        }
        let chamber = default_chamber(&roots, dim)?;
        let positive = positive_for(&roots, &chamber)?;
        let reflections = roots.iter().map(|r| reflection_matrix(&r.vector)).collect();
        let gamma = positive
            .iter()
            .fold(S::zero(), |acc, &i| acc + roots[i].multiplicity.clone());
        Ok(RootSystem {
            dim,
            roots,
            positive,
            reflections,
            gamma,
            chamber,
            label,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn roots(&self) -> &[Root<S>] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &Root<S> {
        &self.roots[i]
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Indices of the positive subsystem `R_+`.
    pub fn positive_indices(&self) -> &[usize] {
        &self.positive
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &Root<S>> + '_ {
        self.positive.iter().map(move |&i| &self.roots[i])
    }

    /// The chamber vector `h` defining `R_+ = {alpha : alpha . h > 0}`.
    pub fn chamber_vector(&self) -> &[f64] {
        &self.chamber
    }

    pub fn label(&self) -> Option<&FamilyLabel<S>> {
        self.label.as_ref()
    }

    pub fn reflection_matrix(&self, i: usize) -> &[Vec<S>] {
        &self.reflections[i]
    }

    /// `gamma = sum_{alpha in R_+} k(alpha)`.
    pub fn gamma(&self) -> S {
        self.gamma.clone()
    }

    /// `gamma` recomputed for the positive subsystem selected by `h`.
    pub fn gamma_for_chamber(&self, h: &[f64]) -> Result<S> {
        check_dim(self.dim, h.len())?;
        let pos = positive_for(&self.roots, h)?;
        Ok(pos
            .iter()
            .fold(S::zero(), |acc, &i| acc + self.roots[i].multiplicity.clone()))
    }

    /// Half the total multiplicity over all roots.
    pub fn half_total_multiplicity(&self) -> S {
        self.roots
            .iter()
            .fold(S::zero(), |acc, r| acc + r.multiplicity.clone())
            / two::<S>()
    }

    /// Index of the root equal (within tolerance for `f64`) to `v`.
    pub fn find(&self, v: &[S]) -> Option<usize> {
        self.roots
            .iter()
            .position(|r| vec_near(&r.vector, v))
    }

    /// Closure under reflections and reducedness.
    pub fn check_closure(&self) -> ClosureReport {
        let mut missing = None;
        'outer: for (a, ra) in self.roots.iter().enumerate() {
            for (b, rb) in self.roots.iter().enumerate() {
                let img = ra.reflect(&rb.vector).expect("dimension checked at assembly");
                if self.find(&img).is_none() {
                    missing = Some((a, b));
                    break 'outer;
                }
            }
        }
        let mut non_reduced = None;
        'outer2: for (a, ra) in self.roots.iter().enumerate() {
            for (b, rb) in self.roots.iter().enumerate().skip(a + 1) {
                if parallel(&ra.vector, &rb.vector) && !vec_near(&ra.vector, &neg(&rb.vector)) {
                    non_reduced = Some((a, b));
                    break 'outer2;
                }
            }
        }
        ClosureReport {
            closed: missing.is_none(),
            reduced: non_reduced.is_none(),
            missing,
            non_reduced,
        }
    }

    /// True when `k(sigma_alpha xi) = k(xi)` for every pair of roots.
    pub fn multiplicities_invariant(&self) -> bool {
        self.roots.iter().all(|ra| {
            self.roots.iter().all(|rb| {
                let img = ra.reflect(&rb.vector).expect("dimension checked at assembly");
                match self.find(&img) {
                    Some(j) => self.roots[j].multiplicity == rb.multiplicity,
                    None => false,
                }
            })
        })
    }

    /// True when `R_- = -R_+` and the two halves have equal size.
    pub fn halves_balanced(&self) -> bool {
        let pos = &self.positive;
        if pos.len() * 2 != self.roots.len() {
            return false;
        }
        pos.iter()
            .all(|&i| self.find(&neg(&self.roots[i].vector)).is_some_and(|j| !pos.contains(&j)))
    }

    /// Reflect `x` through the mirror of root `i`, using the stored matrix.
    pub fn reflect_by(&self, i: usize, x: &[S]) -> Result<Vec<S>> {
        check_dim(self.dim, x.len())?;
        Ok(self.reflections[i]
            .iter()
            .map(|row| dot(row, x))
            .collect())
    }

    /// Discriminant `a_R(x) = prod_{v in R_+} v . x`.
    pub fn discriminant(&self, x: &[S]) -> Result<S> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .positive_roots()
            .fold(S::one(), |acc, r| acc * r.pair(x)))
    }

    /// Smallest normalized distance from `x` to any mirror, and the root
    /// attaining it.
    pub fn min_hyperplane_distance(&self, x: &[S]) -> (usize, f64) {
        self.positive
            .iter()
            .map(|&i| (i, self.roots[i].hyperplane_distance(x)))
            .fold((usize::MAX, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    /// Fail with [`Error::HyperplaneProximity`] when `x` is closer than
    /// `floor` to a mirror. Exact scalars only reject points on a mirror.
    pub fn ensure_off_hyperplanes(&self, x: &[S], floor: f64) -> Result<()> {
        check_dim(self.dim, x.len())?;
        for &i in &self.positive {
            let r = &self.roots[i];
            if S::EXACT {
                if r.pair(x).is_zero() {
                    return Err(Error::HyperplaneProximity {
                        root: i,
                        distance: 0.0,
                    });
                }
            } else {
                let d = r.hyperplane_distance(x);
                if !(d >= floor) {
                    return Err(Error::HyperplaneProximity { root: i, distance: d });
                }
            }
        }
        Ok(())
    }

    /// Same roots with every root in `orbit` multiplied by `c`.
    pub fn with_orbit_scaled(&self, orbit: usize, c: S) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidParameter("scale factor must be nonzero".into()));
        }
        let roots = self
            .roots
            .iter()
            .map(|r| {
                let v = if r.orbit == orbit {
                    r.vector.iter().map(|a| a.clone() * c.clone()).collect()
                } else {
                    r.vector.clone()
                };
                let mut root = Root::new(v, r.multiplicity.clone())?;
                root.orbit = r.orbit;
                Ok(root)
            })
            .collect::<Result<Vec<_>>>()?;
        let reflections = roots.iter().map(|r| reflection_matrix(&r.vector)).collect();
        let positive = positive_for(&roots, &self.chamber)?;
        Ok(RootSystem {
            dim: self.dim,
            roots,
            positive,
            reflections,
            gamma: self.gamma.clone(),
            chamber: self.chamber.clone(),
            label: None,
        })
    }

    /// Same roots with every multiplicity multiplied by `factor`.
    pub fn with_multiplicities_scaled(&self, factor: S) -> Result<Self> {
        if factor < S::zero() {
            return Err(Error::InvalidParameter("multiplicity scale must be >= 0".into()));
        }
        let mut out = self.clone();
        for r in &mut out.roots {
            r.multiplicity = r.multiplicity.clone() * factor.clone();
        }
        out.gamma = out.gamma * factor.clone();
        if let Some(l) = &mut out.label {
            for k in &mut l.multiplicities {
                *k = k.clone() * factor.clone();
            }
        }
        Ok(out)
    }

    pub fn num_orbits(&self) -> usize {
        self.roots.iter().map(|r| r.orbit + 1).max().unwrap_or(0)
    }

    pub fn to_f64(&self) -> RootSystem<f64> {
        let conv = |v: &[S]| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
        RootSystem {
            dim: self.dim,
            roots: self
                .roots
                .iter()
                .map(|r| Root {
                    vector: conv(&r.vector),
                    squared_norm: r.squared_norm.to_f64(),
                    multiplicity: r.multiplicity.to_f64(),
                    orbit: r.orbit,
                })
                .collect(),
            positive: self.positive.clone(),
            reflections: self
                .reflections
                .iter()
                .map(|m| m.iter().map(|row| conv(row)).collect())
                .collect(),
            gamma: self.gamma.to_f64(),
            chamber: self.chamber.clone(),
            label: self.label.as_ref().map(|l| FamilyLabel {
                family: l.family,
                rank: l.rank,
                multiplicities: conv(&l.multiplicities),
                scale: l.scale,
            }),
        }
    }

    /// Deterministic point at normalized distance at least `min_distance`
    /// from every mirror.
    pub fn sample_generic_point(&self, seed: u64, min_distance: f64) -> Result<Vec<f64>> {
        let fs = self.to_f64();
        sample_point_with(&fs, seed, min_distance, |v| v)
    }
}

impl RootSystem<f64> {
    /// Weight `w_k(x) = prod_{alpha in R} |alpha . x|^{k(alpha)}`.
    pub fn weight(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .roots
            .iter()
            .map(|r| {
                if r.multiplicity == 0.0 {
                    1.0
                } else {
                    r.pair(x).abs().powf(r.multiplicity)
                }
            })
            .product())
    }

    /// `ln w_k(x) = 2 sum_{alpha in R_+} k(alpha) ln|alpha . x|`.
    pub fn log_weight(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(2.0
            * self
                .positive_roots()
                .filter(|r| r.multiplicity != 0.0)
                .map(|r| r.multiplicity * r.pair(x).abs().ln())
                .sum::<f64>())
    }

    /// Closed-form `Delta w_k(x)` away from the mirrors.
    pub fn weight_laplacian(&self, x: &[f64]) -> Result<f64> {
        let w = self.weight(x)?;
        let mut grad = vec![0.0; self.dim];
        let mut lap_log = 0.0;
        for r in &self.roots {
            let p = r.pair(x);
            for (g, a) in grad.iter_mut().zip(&r.vector) {
                *g += r.multiplicity * a / p;
            }
            lap_log -= r.multiplicity * r.squared_norm / (p * p);
        }
        Ok(w * (norm_sq(&grad) + lap_log))
    }
}

impl RootSystem<Rational> {
    /// Generic point with rational coordinates of denominator `denominator`.
    pub fn sample_generic_point_exact(
        &self,
        seed: u64,
        min_distance: f64,
        denominator: i64,
    ) -> Result<Vec<Rational>> {
        if denominator <= 0 {
            return Err(Error::InvalidParameter("denominator must be positive".into()));
        }
        let fs = self.to_f64();
        let d = denominator as f64;
        let p = sample_point_with(&fs, seed, min_distance, |v| (v * d).round() / d)?;
        Ok(p
            .iter()
            .map(|v| crate::scalar::rat((v * d).round() as i64, denominator))
            .collect())
    }
}

fn sample_point_with(
    fs: &RootSystem<f64>,
    seed: u64,
    min_distance: f64,
    snap: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    const ATTEMPTS: usize = 10_000;
    if !(min_distance > 0.0) {
        return Err(Error::InvalidParameter(
            "minimum hyperplane distance must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Unit-scale spread, widened with the number of mirrors so that typical
    // gaps stay comparable to moderate requested distances.
    let spread = 1.0 + (fs.positive.len() as f64).sqrt() * min_distance.min(1.0);
    for _ in 0..ATTEMPTS {
        let x: Vec<f64> = (0..fs.dim)
            .map(|_| snap(spread * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        if fs.min_hyperplane_distance(&x).1 >= min_distance {
            return Ok(x);
        }
    }
    Err(Error::Sampling {
        attempts: ATTEMPTS,
        reason: format!("no point at distance >= {min_distance} from every mirror"),
    })
}

fn reflection_matrix<S: Scalar>(alpha: &[S]) -> Vec<Vec<S>> {
    let n = alpha.len();
    let c = two::<S>() / norm_sq(alpha);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { S::one() } else { S::zero() };
                    delta - c.clone() * alpha[i].clone() * alpha[j].clone()
                })
                .collect()
        })
        .collect()
}

fn vec_near<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.near(y, FLOAT_ROOT_TOL))
}

fn neg<S: Scalar>(a: &[S]) -> Vec<S> {
    a.iter().map(|x| -x.clone()).collect()
}

fn parallel<S: Scalar>(a: &[S], b: &[S]) -> bool {
    // Cauchy-Schwarz equality: (a.b)^2 = |a|^2 |b|^2.
    let ab = dot(a, b);
    let lhs = ab.clone() * ab;
    let rhs = norm_sq(a) * norm_sq(b);
    if S::EXACT {
        lhs == rhs
    } else {
        (lhs.to_f64() - rhs.to_f64()).abs() <= FLOAT_ROOT_TOL * rhs.to_f64().max(1.0)
    }
}

fn default_chamber<S: Scalar>(roots: &[Root<S>], dim: usize) -> Result<Vec<f64>> {
    let base: Vec<f64> = (0..dim).map(|i| 2f64.powi(i as i32)).collect();
    let candidates = std::iter::once(base.clone()).chain((1..8).map(|s| {
        base.iter()
            .enumerate()
            .map(|(i, b)| b + 0.1 * ((i + s + 1) as f64).sqrt())
            .collect()
    }));
    for h in candidates {
        if roots.iter().all(|r| chamber_pair(r, &h).abs() > 1e-9) {
            return Ok(h);
        }
    }
    Err(Error::InvalidRootSystem(
        "could not find a chamber vector off every mirror".into(),
    ))
}

fn chamber_pair<S: Scalar>(r: &Root<S>, h: &[f64]) -> f64 {
    r.vector
        .iter()
        .zip(h)
        .map(|(a, b)| a.to_f64() * b)
        .sum::<f64>()
        / r.squared_norm.to_f64().sqrt()
}

fn positive_for<S: Scalar>(roots: &[Root<S>], h: &[f64]) -> Result<Vec<usize>> {
    let mut pos = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        let p = chamber_pair(r, h);
        if p.abs() <= 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "chamber vector lies on the mirror of root {i}"
            )));
        }
        if p > 0.0 {
            pos.push(i);
        }
    }
    Ok(pos)
}

fn compute_orbits<S: Scalar>(roots: &[Root<S>]) -> Vec<usize> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for a in roots {
        for (j, b) in roots.iter().enumerate() {
            let img = a.reflect(&b.vector).expect("dimension checked");
            if let Some(k) = roots.iter().position(|r| vec_near(&r.vector, &img)) {
                let (rj, rk) = (find(&mut parent, j), find(&mut parent, k));
                if rj != rk {
                    parent[rj.max(rk)] = rj.min(rk);
                }
            }
        }
    }
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if labels[r] == usize::MAX {
            labels[r] = next;
            next += 1;
        }
        out[i] = labels[r];
    }
    out
}

/// Integer vectors with the index of the multiplicity class of each.
type Generated = (Vec<Vec<i64>>, Vec<usize>);

fn unit(n: usize, i: usize, s: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = s;
    v
}

fn pair_vec(n: usize, i: usize, si: i64, j: usize, sj: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = si;
    v[j] = sj;
    v
}

fn type_a(n: usize) -> Generated {
    let mut vs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                vs.push(pair_vec(n, i, 1, j, -1));
            }
        }
    }
    let c = vec![0; vs.len()];
    (vs, c)
}

fn type_b(n: usize) -> Generated {
    let (mut vs, mut cs) = (Vec::new(), Vec::new());
    for i in 0..n {
        for s in [1, -1] {
            vs.push(unit(n, i, s));
            cs.push(0);
        }
    }
    let (dv, dc) = type_d(n);
    vs.extend(dv);
    cs.extend(dc.into_iter().map(|_| 1));
    (vs, cs)
}

fn type_d(n: usize) -> Generated {
    let mut vs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                vs.push(pair_vec(n, i, si, j, sj));
            }
        }
    }
    let c = vec![0; vs.len()];
    (vs, c)
}

fn integer_vectors<S: Scalar>((vs, cs): Generated) -> (Vec<Vec<S>>, Vec<usize>) {
    (
        vs.into_iter()
            .map(|v| v.into_iter().map(S::from_i64).collect())
            .collect(),
        cs,
    )
}

fn normalize<S: Scalar>(v: &[S]) -> Vec<S> {
    let n = norm_sq(v).to_f64().sqrt();
    v.iter()
        .map(|a| S::from_f64(a.to_f64() / n).expect("finite"))
        .collect()
}

fn dihedral<S: Scalar>(
    m: usize,
    scale: RootScale,
    multiplicities: &[S],
) -> Result<(Vec<Vec<S>>, Vec<usize>)> {
    if m < 3 {
        return Err(Error::InvalidParameter("I2(m) requires m >= 3".into()));
    }
    if m % 2 == 1 && multiplicities[0] != multiplicities[1] {
        return Err(Error::InvalidParameter(
            "I2(m) with odd m has a single reflection orbit; multiplicities must agree".into(),
        ));
    }
    let classes: Vec<usize> = (0..2 * m).map(|j| j % 2).collect();
    if m == 4 && (scale == RootScale::IntegerRepresentatives) {
        let ints: [[i64; 2]; 8] = [
            [1, 0],
            [1, 1],
            [0, 1],
            [-1, 1],
            [-1, 0],
            [-1, -1],
            [0, -1],
            [1, -1],
        ];
        let vs = ints
            .iter()
            .map(|v| v.iter().map(|&c| S::from_i64(c)).collect())
            .collect();
        return Ok((vs, classes));
    }
    if S::EXACT {
        return Err(Error::Irrational(format!(
            "I2({m}) has irrational reflection matrices; exact mode supports I2(4) only"
        )));
    }
    if scale == RootScale::IntegerRepresentatives {
        return Err(Error::Unsupported(format!(
            "I2({m}) has no integer representatives; use normalized roots"
        )));
    }
    let vs = (0..2 * m)
        .map(|j| {
            let th = std::f64::consts::PI * j as f64 / m as f64;
            [th.cos(), th.sin()]
                .into_iter()
                .map(|c| if c.abs() < 1e-15 { 0.0 } else { c })
                .map(|c| S::from_f64(c).expect("finite"))
                .collect()
        })
        .collect();
    Ok((vs, classes))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootSystemJson {
    family: Option<Family>,
    rank: Option<usize>,
    mode: Option<RootScale>,
    /// Per family parameter when `family` is set, per root otherwise.
    multiplicities: Vec<serde_json::Value>,
    roots: Vec<Vec<serde_json::Value>>,
    positive: Vec<usize>,
}

fn encode<S: Scalar>(v: &S) -> serde_json::Value {
    if S::EXACT {
        serde_json::Value::String(v.to_string())
    } else {
        serde_json::json!(v.to_f64())
    }
}

fn decode<S: Scalar>(v: &serde_json::Value) -> Result<S> {
    match v {
        serde_json::Value::String(s) => s
            .trim()
            .parse::<Rational>()
            .map(|r| S::from_rational(&r))
            .map_err(|e| Error::Serde(format!("bad rational '{s}': {e}"))),
        serde_json::Value::Number(n) => n
            .as_f64()
            .and_then(S::from_f64)
            .ok_or_else(|| Error::Serde(format!("bad number {n}"))),
        other => Err(Error::Serde(format!("expected a number or fraction string, got {other}"))),
    }
}

impl<S: Scalar> RootSystem<S> {
    /// `{family, rank, mode, multiplicities, roots, positive}`; exact values
    /// are written as fraction strings.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = match &self.label {
            Some(l) => RootSystemJson {
                family: Some(l.family),
                rank: Some(l.rank),
                mode: Some(l.scale),
                multiplicities: l.multiplicities.iter().map(encode).collect(),
                roots: self.roots.iter().map(|r| r.vector.iter().map(encode).collect()).collect(),
                positive: self.positive.clone(),
            },
            None => RootSystemJson {
                family: None,
                rank: None,
                mode: None,
                multiplicities: self.roots.iter().map(|r| encode(&r.multiplicity)).collect(),
                roots: self.roots.iter().map(|r| r.vector.iter().map(encode).collect()).collect(),
                positive: self.positive.clone(),
            },
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }

    /// Rebuild from [`RootSystem::to_json`] output and check that the stored
    /// roots and positive subsystem agree with the rebuilt ones.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let doc: RootSystemJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Serde(e.to_string()))?;
        let mults = doc.multiplicities.iter().map(decode).collect::<Result<Vec<S>>>()?;
        let roots = doc
            .roots
            .iter()
            .map(|r| r.iter().map(decode).collect::<Result<Vec<S>>>())
            .collect::<Result<Vec<_>>>()?;
        let sys = match (doc.family, doc.rank) {
            (Some(f), Some(rank)) => {
                Self::build(f, rank, &mults, doc.mode.unwrap_or(RootScale::IntegerRepresentatives))?
            }
            (None, None) => Self::from_roots(roots.clone(), mults)?,
            _ => return Err(Error::Serde("family and rank must be given together".into())),
        };
        let same = sys.roots.len() == roots.len()
            && sys.roots.iter().zip(&roots).all(|(a, b)| {
                a.vector.len() == b.len()
                    && a.vector.iter().zip(b).all(|(x, y)| x.near(y, FLOAT_ROOT_TOL))
            });
        if !same {
            return Err(Error::InvalidRootSystem("stored roots differ from the rebuilt family".into()));
        }
        if sys.positive != doc.positive {
            return Err(Error::InvalidRootSystem("stored positive subsystem differs".into()));
        }
        Ok(sys)
    }
}

impl<S: Scalar> Serialize for RootSystem<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for RootSystem<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Self::from_json(&v).map_err(serde::de::Error::custom)
    }
}

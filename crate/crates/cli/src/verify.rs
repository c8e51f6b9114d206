//! Identity checks run by `dunkl-lab verify`.

use dunkl_core::cm::transformed_hamiltonian_check;
use dunkl_core::scalar::rat;
use dunkl_core::transform::{corollary1, lemma2, unconfined_check};
use dunkl_core::{
    parse_poly, CmParams, Comparison, Family, IdentityReport, MultiPoly, PolyFunction, Rational,
    RootScale, RootSystem, Scalar, TestFunction, TransformParams,
};

use crate::config::{Format, RunConfig, Suite};
use crate::error::CliError;

pub const DEFAULT_POINTS: usize = 50;
const MIN_DISTANCE: f64 = 0.05;
const EXACT_DENOMINATOR: i64 = 7;

pub fn default_rank(f: Family) -> usize {
    match f {
        Family::A | Family::B => 2,
        Family::D => 3,
        Family::I2 => 4,
    }
}

pub fn default_tolerance(suite: Suite) -> f64 {
    match suite {
        Suite::Lemma1 | Suite::Lemma2 => 1e-10,
        _ => 1e-8,
    }
}

/// Fill in every default the suite uses, so the report records them.
pub fn resolve(mut cfg: RunConfig, suite: Suite) -> Result<RunConfig, CliError> {
    let family = cfg.family()?;
    let exact = cfg.exact.unwrap_or(false);
    if exact && !matches!(suite, Suite::Lemma1 | Suite::Lemma2) {
        return Err(CliError::Config(format!(
            "--exact is available for lemma1 and lemma2, not {}",
            suite.name()
        )));
    }
    if matches!(suite, Suite::Corollary1 | Suite::TransformedHamiltonian) && family != Family::A {
        return Err(CliError::Config(format!("{} is defined for family A only", suite.name())));
    }
    cfg.suite = Some(suite);
    cfg.family = Some(family.to_string());
    cfg.rank.get_or_insert(default_rank(family));
    cfg.exact = Some(exact);
    cfg.seed.get_or_insert(0);
    cfg.points.get_or_insert(DEFAULT_POINTS);
    cfg.tol.get_or_insert(default_tolerance(suite));
    if matches!(suite, Suite::Theorem1 | Suite::Similarity | Suite::GroundState) {
        cfg.omega.get_or_insert(1.0);
    }
    if matches!(suite, Suite::Theorem1 | Suite::Similarity | Suite::Corollary1) {
        cfg.lambda.get_or_insert(0.3);
    }
    if cfg.multiplicities.is_none() {
        cfg.multiplicities = Some(vec![crate::config::Multiplicity::Number(1.0); family.multiplicity_count()]);
    }
    if let Some(t) = cfg.tol {
        if !(t >= 0.0) {
            return Err(CliError::Config("tolerance must be non-negative".into()));
        }
    }
    if cfg.points == Some(0) {
        return Err(CliError::Config("points must be at least 1".into()));
    }
    Ok(cfg)
}

struct Ctx {
    family: Family,
    rank: usize,
    seed: u64,
    points: usize,
    ks: Vec<Rational>,
    cfg: RunConfig,
}

impl Ctx {
    fn float_system(&self) -> Result<RootSystem<f64>, CliError> {
        let ks: Vec<f64> = self.ks.iter().map(Scalar::to_f64).collect();
        Ok(RootSystem::build(self.family, self.rank, &ks, RootScale::Normalized)?)
    }

    fn exact_system(&self) -> Result<RootSystem<Rational>, CliError> {
        Ok(RootSystem::build(self.family, self.rank, &self.ks, RootScale::IntegerRepresentatives)?)
    }

    fn point(&self, sys: &RootSystem<f64>, i: usize) -> Result<Vec<f64>, CliError> {
        Ok(sys.sample_generic_point(self.seed.wrapping_add(i as u64), MIN_DISTANCE)?)
    }

    fn omega(&self) -> f64 {
        self.cfg.omega.unwrap_or(1.0)
    }

    fn lambda(&self) -> f64 {
        self.cfg.lambda.unwrap_or(0.0)
    }

    /// The user polynomial, or a fixed family of dense polynomials of
    /// degrees 1 to `max_deg`.
    fn polys(&self, dim: usize, max_deg: u32) -> Result<Vec<MultiPoly>, CliError> {
        if let Some(p) = &self.cfg.poly {
            return Ok(vec![parse_poly(p, dim)?]);
        }
        (1..=max_deg)
            .map(|d| {
                let mut p = MultiPoly::zero(dim);
                for (j, m) in MultiPoly::monomials_up_to(dim, d)?.into_iter().enumerate() {
                    let c = rat((j as i64 * 7 + 3) % 11 - 5, (j as i64 % 4) + 1);
                    p = &p + &m.scale(&c);
                }
                Ok(p)
            })
            .collect::<Result<_, dunkl_core::Error>>()
            .map_err(CliError::from)
    }

    /// Time for point `i`, spread over `[0.2, 2.65]`.
    fn time(i: usize) -> f64 {
        0.2 + 0.35 * (i % 8) as f64
    }
}

pub fn run(cfg: &RunConfig, suite: Suite) -> Result<IdentityReport, CliError> {
    let family = cfg.family()?;
    let ctx = Ctx {
        family,
        rank: cfg.rank.unwrap_or(default_rank(family)),
        seed: cfg.seed.unwrap_or(0),
        points: cfg.points.unwrap_or(DEFAULT_POINTS),
        ks: cfg.rational_multiplicities(family)?,
        cfg: cfg.clone(),
    };
    let label = match family {
        Family::I2 => format!("I2({})", ctx.rank),
        _ => format!("{family}{}", ctx.rank),
    };
    let mut rep = IdentityReport::new(suite.name(), &label, cfg.to_json());
    let exact = cfg.exact.unwrap_or(false);
    match suite {
        Suite::Lemma1 if exact => lemma1_exact(&ctx, &mut rep)?,
        Suite::Lemma1 => lemma1_float(&ctx, &mut rep)?,
        Suite::Lemma2 if exact => lemma2_exact(&ctx, &mut rep)?,
        Suite::Lemma2 => lemma2_float(&ctx, &mut rep)?,
        Suite::Similarity => similarity(&ctx, &mut rep)?,
        Suite::Theorem1 => theorem1(&ctx, &mut rep)?,
        Suite::Corollary1 => corollary(&ctx, &mut rep)?,
        Suite::GroundState => ground_state(&ctx, &mut rep)?,
        Suite::TransformedHamiltonian => transformed(&ctx, &mut rep)?,
        Suite::Unconfined => unconfined(&ctx, &mut rep)?,
    }
    rep.judge(cfg.tol.unwrap_or(default_tolerance(suite)));
    Ok(rep)
}

fn lemma1_exact(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let sys = ctx.exact_system()?;
    for i in 0..ctx.points {
        let x = sys.sample_generic_point_exact(ctx.seed.wrapping_add(i as u64), MIN_DISTANCE, EXACT_DENOMINATOR)?;
        let a = sys.discriminant(&x)?;
        for r in 0..sys.len() {
            let y = sys.reflect_by(r, &x)?;
            rep.record_exact(&x, &(sys.discriminant(&y)? + a.clone()));
        }
    }
    Ok(())
}

fn lemma1_float(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let sys = ctx.float_system()?;
    for i in 0..ctx.points {
        let x = ctx.point(&sys, i)?;
        let a = sys.discriminant(&x)?;
        for r in 0..sys.len() {
            let y = sys.reflect_by(r, &x)?;
            rep.record(&x, Comparison::new(sys.discriminant(&y)?, -a));
        }
    }
    Ok(())
}

fn lemma2_exact(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let sys = ctx.exact_system()?;
    for i in 0..ctx.points {
        let x = sys.sample_generic_point_exact(ctx.seed.wrapping_add(i as u64), MIN_DISTANCE, EXACT_DENOMINATOR)?;
        let (l, r) = lemma2(&sys, &x)?;
        rep.record_exact(&x, &(l - r));
    }
    Ok(())
}

fn lemma2_float(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let sys = ctx.float_system()?;
    for i in 0..ctx.points {
        let x = ctx.point(&sys, i)?;
        let (l, r) = lemma2(&sys, &x)?;
        rep.record(&x, Comparison::new(l, r));
    }
    Ok(())
}

fn similarity(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let p = TransformParams::new(ctx.float_system()?, ctx.omega())?;
    let us = test_functions(ctx, p.system().dim())?;
    for i in 0..ctx.points {
        let z = ctx.point(p.system(), i)?;
        let tau = 0.1 * (i % 5) as f64 - 0.2;
        for c in p.similarity_check(&us[i % us.len()], tau, &z)?.all() {
            rep.record(&z, *c);
        }
    }
    Ok(())
}

fn test_functions(ctx: &Ctx, dim: usize) -> Result<Vec<TestFunction>, CliError> {
    Ok(ctx
        .polys(dim, 4)?
        .into_iter()
        .map(|p| TestFunction::new(ctx.lambda(), p))
        .collect())
}

fn theorem1(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let p = TransformParams::new(ctx.float_system()?, ctx.omega())?;
    let us = test_functions(ctx, p.system().dim())?;
    for i in 0..ctx.points {
        let x = ctx.point(p.system(), i)?;
        rep.record(&x, p.theorem1(&us[i % us.len()], Ctx::time(i), &x)?);
    }
    Ok(())
}

fn single_k(ctx: &Ctx) -> Result<f64, CliError> {
    let k = ctx.ks[0].to_f64();
    if !(k > 0.0) {
        return Err(CliError::Config("this suite needs a positive multiplicity".into()));
    }
    Ok(k)
}

fn corollary(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let k = single_k(ctx)?;
    if let Some(w) = ctx.cfg.omega {
        if w != k {
            return Err(CliError::Config(format!("corollary1 fixes omega = k = {k}; got omega {w}")));
        }
    }
    let n = ctx.rank + 1;
    let sys = RootSystem::build(Family::A, ctx.rank, &[k], RootScale::IntegerRepresentatives)?;
    let p = TransformParams::new(sys, k)?;
    let us = test_functions(ctx, n)?;
    let mut gap = 0.0f64;
    for i in 0..ctx.points {
        let x = ctx.point(p.system(), i)?;
        let u = &us[i % us.len()];
        let c = corollary1(n, k, u, Ctx::time(i), &x)?;
        let g = p.theorem1(u, Ctx::time(i), &x)?;
        gap = gap.max((c.residual() - g.residual()).abs() / c.lhs.abs().max(c.rhs.abs()).max(1.0));
        rep.record(&x, c);
    }
    rep.observe("max_gap_to_general_form", gap.into());
    Ok(())
}

fn ground_state(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let sys = ctx.float_system()?;
    let cm = CmParams::new(sys.clone(), ctx.omega())?;
    for i in 0..ctx.points {
        let x = ctx.point(&sys, i)?;
        rep.record(&x, cm.groundstate_residual(&x)?);
    }
    rep.observe("ground_energy", cm.ground_energy().into());
    Ok(())
}

fn transformed(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let k = single_k(ctx)?;
    let n = ctx.rank + 1;
    let sys = RootSystem::build(Family::A, ctx.rank, &[k], RootScale::IntegerRepresentatives)?;
    let polys = match &ctx.cfg.poly {
        Some(_) => ctx.polys(n, 4)?,
        None => MultiPoly::monomials_up_to(n, 4)?,
    };
    for i in 0..ctx.points.max(polys.len()) {
        let x = ctx.point(&sys, i)?;
        rep.record(&x, transformed_hamiltonian_check(n, k, &polys[i % polys.len()], &x)?);
    }
    Ok(())
}

fn unconfined(ctx: &Ctx, rep: &mut IdentityReport) -> Result<(), CliError> {
    let sys = ctx.float_system()?;
    let fs: Vec<PolyFunction> = ctx.polys(sys.dim(), 4)?.into_iter().map(PolyFunction::new).collect();
    for i in 0..ctx.points {
        let x = ctx.point(&sys, i)?;
        rep.record(&x, unconfined_check(&sys, &fs[i % fs.len()], &x)?);
    }
    Ok(())
}

pub fn render(rep: &IdentityReport, format: Format) -> String {
    match format {
        Format::Json => crate::output::json(rep),
        Format::Csv => {
            let mut s = String::from("identity,family,points,max_abs_residual,max_rel_residual,exact_residual,tolerance,passed\n");
            s.push_str(&format!(
                "{},{},{},{:e},{:e},{},{},{}\n",
                rep.identity,
                rep.family,
                rep.points,
                rep.max_abs_residual,
                rep.max_rel_residual,
                rep.exact_residual.as_deref().unwrap_or(""),
                rep.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
                rep.passed.unwrap_or(false)
            ));
            s
        }
    }
}

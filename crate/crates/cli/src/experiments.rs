//! `simulate`, `freeze` and `roots`.

use dunkl_core::sde::{
    deterministic_freeze_ode, freezing_experiment, hermite_identity_residuals, hermite_roots,
    jump_consistency, laguerre_freezing_probe, laguerre_identity_residuals, laguerre_roots,
    moment_law, simulate_dunkl, simulate_radial, BoundaryPolicy, Observable, Scheme,
};
use dunkl_core::{EnsembleStats, RootScale, RootSystem, SimConfig, Trajectory};
use serde_json::json;

use crate::config::{BoundaryArg, Format, Process, RootsKind, RunConfig, SchemeArg};
use crate::error::CliError;
use crate::output::{emit, json};
use crate::verify::default_rank;

pub fn resolve_simulate(mut cfg: RunConfig) -> Result<RunConfig, CliError> {
    let family = cfg.family()?;
    cfg.family = Some(family.to_string());
    cfg.rank.get_or_insert(default_rank(family));
    if cfg.multiplicities.is_none() {
        cfg.multiplicities = Some(vec![crate::config::Multiplicity::Number(1.0); family.multiplicity_count()]);
    }
    cfg.k_scale.get_or_insert(1.0);
    cfg.seed.get_or_insert(0);
    cfg.ensemble.get_or_insert(1000);
    cfg.t.get_or_insert(1.0);
    cfg.dt.get_or_insert(1e-3);
    cfg.process.get_or_insert_default();
    cfg.scheme.get_or_insert_default();
    cfg.boundary.get_or_insert_default();
    cfg.observe.get_or_insert_with(Vec::new);
    cfg.record_steps.get_or_insert(false);
    cfg.format.get_or_insert_default();
    if cfg.x0.is_none() {
        let sys = float_system(&cfg)?;
        cfg.x0 = Some(sys.sample_generic_point(cfg.seed.unwrap_or(0), 0.1)?);
    }
    Ok(cfg)
}

fn float_system(cfg: &RunConfig) -> Result<RootSystem<f64>, CliError> {
    let family = cfg.family()?;
    let ks = cfg.float_multiplicities(family)?;
    Ok(RootSystem::build(family, cfg.rank.unwrap_or(default_rank(family)), &ks, RootScale::Normalized)?)
}

pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = float_system(cfg)?;
    let dim = sys.dim();
    let mut sc = SimConfig::new(sys, cfg.x0.clone().unwrap_or_default(), cfg.t.unwrap_or(1.0), cfg.dt.unwrap_or(1e-3));
    sc.k_scale = cfg.k_scale.unwrap_or(1.0);
    sc.ensemble = cfg.ensemble.unwrap_or(1000);
    sc.master_seed = cfg.seed.unwrap_or(0);
    sc.observation_times = cfg.observe.clone().unwrap_or_default();
    sc.record_steps = cfg.record_steps.unwrap_or(false);
    sc.scheme = match cfg.scheme.unwrap_or_default() {
        SchemeArg::EulerAdaptive => Scheme::EulerAdaptive,
        SchemeArg::EulerFixed => Scheme::EulerFixed,
    };
    sc.boundary = match cfg.boundary.unwrap_or_default() {
        BoundaryArg::Fail => BoundaryPolicy::Fail,
        BoundaryArg::Fold => BoundaryPolicy::Fold,
    };
    let jumps = cfg.process.unwrap_or_default() == Process::Dunkl;
    let trs = if jumps { simulate_dunkl(&sc) } else { simulate_radial(&sc) }?;

    let mut obs = vec![Observable::NormSqIncrement];
    obs.extend((0..dim).map(Observable::Coordinate));
    if jumps {
        obs.push(Observable::JumpCount);
    } else {
        obs.extend((0..dim).map(Observable::SortedCoordinate));
    }
    let stats = EnsembleStats::collect(sc.master_seed, &sc.observation_grid(), &obs, &trs);
    let law = moment_law(&sc, &trs);
    let jc = jumps.then(|| jump_consistency(&trs));

    eprintln!("moment law, predicted slope {}:", dim as f64 + 2.0 * sc.gamma() * sc.k_scale);
    for c in &law {
        eprintln!(
            "  t={} estimate {:.6} +- {:.6}, predicted {:.6}, z {:.2}{}",
            c.time,
            c.estimate,
            c.stderr,
            c.predicted,
            c.z,
            if c.within_3_stderr { "" } else { "  (outside 3 stderr)" }
        );
    }
    if let Some(j) = &jc {
        eprintln!(
            "jumps: mean count {:.5}, mean intensity {:.5}, relative difference {:.4}",
            j.mean_jumps, j.mean_intensity, j.rel_diff
        );
    }

    let ensemble = json(&json!({
        "config": cfg.to_json(),
        "moment_law": law,
        "jump_check": jc,
        "stats": stats,
    }));
    let csv = trajectories_csv(&trs, dim);
    let primary = match cfg.format() {
        Format::Json => "ensemble.json",
        Format::Csv => "trajectories.csv",
    };
    emit(
        cfg.out.as_deref(),
        &[
            ("ensemble.json", ensemble),
            ("trajectories.csv", csv),
            ("config.json", json(&cfg.to_json())),
        ],
        primary,
    )
}

fn trajectories_csv(trs: &[Trajectory], dim: usize) -> String {
    let mut s = String::from("path,time");
    for i in 1..=dim {
        s.push_str(&format!(",x{i}"));
    }
    s.push_str(",jump_flag\n");
    for (p, t) in trs.iter().enumerate() {
        for line in t.to_csv().lines().skip(1) {
            s.push_str(&format!("{p},{line}\n"));
        }
    }
    s
}

pub fn resolve_freeze(mut cfg: RunConfig) -> Result<RunConfig, CliError> {
    let ode = cfg.ode.unwrap_or(false);
    cfg.ode = Some(ode);
    cfg.n.get_or_insert(4);
    cfg.format.get_or_insert_default();
    if ode {
        if cfg.laguerre_a.is_some() {
            return Err(CliError::Config("--ode and --laguerre-a cannot be combined".into()));
        }
        cfg.t.get_or_insert(1e3);
        cfg.tol.get_or_insert(1e-6);
    } else {
        cfg.t.get_or_insert(1.0);
        cfg.ensemble.get_or_insert(200);
        cfg.seed.get_or_insert(0);
        cfg.k_list.get_or_insert_with(|| vec![1e2, 1e3, 1e4]);
    }
    Ok(cfg)
}

pub fn freeze(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n.unwrap_or(4);
    let t = cfg.t.unwrap_or(1.0);
    if cfg.ode == Some(true) {
        let r = deterministic_freeze_ode(n, t)?;
        let tol = cfg.tol.unwrap_or(1e-6);
        let mut csv = String::from("i,scaled,hermite,error\n");
        for (i, (a, b)) in r.scaled.iter().zip(&r.hermite).enumerate() {
            csv.push_str(&format!("{},{a:e},{b:e},{:e}\n", i + 1, (a - b).abs()));
        }
        let body = json(&json!({
            "config": cfg.to_json(),
            "n": r.n,
            "t_end": r.t_end,
            "scaled": r.scaled,
            "hermite": r.hermite,
            "max_error": r.max_error,
            "accepted_steps": r.trajectory.accepted,
            "rejected_steps": r.trajectory.rejected,
            "passed": r.max_error <= tol,
        }));
        write_pair(cfg, "freeze-ode", body, csv)?;
        eprintln!("freeze ODE N={n}: max error {:.3e} (tolerance {tol:e})", r.max_error);
        if r.max_error > tol {
            return Err(CliError::Verification(format!(
                "freeze ODE error {:e} exceeds {tol:e}",
                r.max_error
            )));
        }
        return Ok(());
    }
    let ks = cfg.k_list.clone().unwrap_or_default();
    let m = cfg.ensemble.unwrap_or(200);
    let seed = cfg.seed.unwrap_or(0);
    let tab = match cfg.laguerre_a {
        Some(a) => laguerre_freezing_probe(n, a, &ks, t, m, seed)?,
        None => freezing_experiment(n, &ks, t, m, seed)?,
    };
    for r in &tab.rows {
        eprintln!("k={:e}: deviation {:.3e}, per-path {:.3e}", r.k, r.deviation, r.path_deviation);
    }
    eprintln!("per-path deviation decreasing: {}", tab.deviation_decreasing());
    let body = json(&json!({
        "config": cfg.to_json(),
        "table": tab,
        "deviation_decreasing": tab.deviation_decreasing(),
    }));
    write_pair(cfg, "freeze", body, tab.to_csv())
}

fn write_pair(cfg: &RunConfig, stem: &str, body: String, csv: String) -> Result<(), CliError> {
    let (jn, cn) = (format!("{stem}.json"), format!("{stem}.csv"));
    let primary = match cfg.format() {
        Format::Json => jn.clone(),
        Format::Csv => cn.clone(),
    };
    emit(cfg.out.as_deref(), &[(&jn, body), (&cn, csv), ("config.json", json(&cfg.to_json()))], &primary)
}

pub fn resolve_roots(mut cfg: RunConfig) -> Result<RunConfig, CliError> {
    let kind = cfg.roots.ok_or_else(|| CliError::Config("roots needs hermite or laguerre".into()))?;
    if cfg.n.is_none() {
        return Err(CliError::Config("roots needs N".into()));
    }
    if kind == RootsKind::Laguerre {
        cfg.laguerre_a.get_or_insert(0.0);
    } else if cfg.laguerre_a.is_some() {
        return Err(CliError::Config("the parameter a applies to laguerre only".into()));
    }
    cfg.format.get_or_insert(Format::Csv);
    Ok(cfg)
}

pub fn roots(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n.unwrap_or(0);
    let (z, res) = match cfg.roots {
        Some(RootsKind::Laguerre) => {
            let a = cfg.laguerre_a.unwrap_or(0.0);
            let z = laguerre_roots(n, a)?;
            let r = laguerre_identity_residuals(&z, a);
            (z, r)
        }
        _ => {
            let z = hermite_roots(n)?;
            let r = hermite_identity_residuals(&z);
            (z, r)
        }
    };
    let mut csv = String::from("i,root,residual\n");
    for (i, (x, r)) in z.iter().zip(&res).enumerate() {
        csv.push_str(&format!("{},{x:e},{r:e}\n", i + 1));
    }
    let body = json(&json!({ "config": cfg.to_json(), "roots": z, "residuals": res }));
    write_pair(cfg, "roots", body, csv)
}

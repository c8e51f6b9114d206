use dunkl_core::sde::{
    freezing_experiment, jump_consistency, laguerre_freezing_probe, laguerre_roots, moment_law,
    pair_sum_residual, replay, simulate_dunkl, simulate_radial, BoundaryPolicy, EnsembleStats,
    Observable, Scheme,
};
use dunkl_core::{Error, Family, RootScale, RootSystem, SimConfig};

fn a(rank: usize, k: f64) -> RootSystem<f64> {
    RootSystem::build(Family::A, rank, &[k], RootScale::IntegerRepresentatives).unwrap()
}

#[test]
fn jump_count_matches_intensity() {
    let mut cfg = SimConfig::new(a(1, 0.5), vec![-0.5, 0.5], 1.0, 1e-3);
    cfg.ensemble = 10_000;
    cfg.master_seed = 3;
    cfg.boundary = BoundaryPolicy::Fold;
    let jc = jump_consistency(&simulate_dunkl(&cfg).unwrap());
    assert!(jc.mean_jumps > 1.0);
    assert!(jc.rel_diff < 0.05, "{jc:?}");
}

#[test]
fn brownian_limit() {
    let mut cfg = SimConfig::new(a(2, 1.0), vec![-1.0, 0.0, 1.0], 0.5, 1e-2);
    cfg.k_scale = 0.0;
    cfg.ensemble = 10_000;
    cfg.master_seed = 11;
    cfg.scheme = Scheme::EulerFixed;
    let trs = simulate_dunkl(&cfg).unwrap();
    assert!(trs.iter().all(|t| t.jump_events.is_empty() && t.accepted_steps == 50));
    for c in moment_law(&cfg, &trs) {
        assert_eq!(c.predicted, 3.0 * c.time);
        assert!(c.within_3_stderr, "{c:?}");
    }
}

#[test]
fn a3_ordering_and_replay() {
    let mut cfg = SimConfig::new(a(3, 1.2), vec![-1.0, -0.2, 0.3, 1.5], 0.5, 1e-3);
    cfg.ensemble = 50;
    cfg.record_steps = true;
    for tr in simulate_radial(&cfg).unwrap() {
        for s in &tr.states {
            assert!(s.windows(2).all(|w| w[0] < w[1]), "{s:?}");
        }
    }
    for tr in simulate_dunkl(&cfg).unwrap() {
        let x = replay(&cfg, &tr).unwrap();
        assert_eq!(x, tr.final_state());
        for e in &tr.jump_events {
            assert!(e.time > 0.0 && e.time <= cfg.t_end);
        }
    }
}

#[test]
fn fixed_scheme_refines_on_crossing() {
    let mut cfg = SimConfig::new(a(1, 1.0), vec![-0.05, 0.05], 0.2, 0.05);
    cfg.scheme = Scheme::EulerFixed;
    cfg.ensemble = 200;
    let trs = simulate_radial(&cfg).unwrap();
    assert!(trs.iter().any(|t| t.rejected_steps > 0));
    for t in &trs {
        let x = t.final_state();
        assert!(x[0] < x[1]);
    }
}

#[test]
fn underflow_reports_time() {
    let mut cfg = SimConfig::new(a(1, 0.5), vec![-0.5, 0.5], 1.0, 1e-3);
    cfg.ensemble = 2000;
    match simulate_radial(&cfg) {
        Err(Error::DtUnderflow { time, dt_min }) => {
            assert!(time > 0.0 && time < 1.0);
            assert_eq!(dt_min, cfg.dt_min());
        }
        other => panic!("expected an underflow, got {:?}", other.map(|v| v.len())),
    }
}

#[test]
fn ensemble_stats_merge_and_serialize() {
    let mut cfg = SimConfig::new(a(2, 1.0), vec![-1.0, 0.0, 1.0], 0.5, 1e-3);
    cfg.ensemble = 40;
    cfg.observation_times = vec![0.25];
    let trs = simulate_dunkl(&cfg).unwrap();
    let times = cfg.observation_grid();
    let obs = [Observable::NormSqIncrement, Observable::SortedCoordinate(0), Observable::JumpCount];
    let all = EnsembleStats::collect(cfg.master_seed, &times, &obs, &trs);
    let left = EnsembleStats::collect(cfg.master_seed, &times, &obs, &trs[..15]);
    let right = EnsembleStats::collect(cfg.master_seed, &times, &obs, &trs[15..]);
    let merged = left.merge(&right);
    assert_eq!(merged.paths, 40);
    for (k, v) in &all.moments {
        for (x, y) in v.iter().zip(&merged.moments[k]) {
            assert_eq!(x.count, y.count);
            assert!((x.mean - y.mean).abs() < 1e-12 * (1.0 + x.mean.abs()));
        }
    }
    let js = serde_json::to_string(&all).unwrap();
    let back: EnsembleStats = serde_json::from_str(&js).unwrap();
    assert_eq!(back, all);
}

#[test]
fn two_particle_freezing() {
    let tab = freezing_experiment(2, &[1e2, 1e4], 1.0, 200, 2).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = &tab.rows[1];
    assert!((r.mean_scaled[0] + s).abs() < 0.05 && (r.mean_scaled[1] - s).abs() < 0.05);
    assert!(tab.deviation_decreasing());
}

#[test]
fn laguerre_reference_and_probe() {
    let z = laguerre_roots(3, 0.0).unwrap();
    assert!(pair_sum_residual(&z, |x| (x - 1.0) / (2.0 * x)) < 1e-10);
    let tab = laguerre_freezing_probe(3, 0.0, &[1e2, 1e3], 1.0, 50, 4).unwrap();
    assert_eq!(tab.reference.len(), 3);
    assert_eq!(tab.laguerre_a, Some(0.0));
    assert!(tab.to_csv().starts_with("k,z1,z2,z3,deviation,path_deviation\nreference,"));
}

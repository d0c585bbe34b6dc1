mod common;

use common::arb_bell_diagonal;
use proptest::prelude::*;
use qrepeater::cavity::HeraldMode;
use qrepeater::chain::{
    swap_bell_diagonal, swap_nested, swap_pairs, t_repe, ChainParams, ChainPlanner, PlanOutcome,
};
use qrepeater::config::Config;
use qrepeater::noise::GateNoise;
use qrepeater::quantum::{bell_state, to_bell_diagonal, werner, Bell};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bell_diagonal_swap_matches_circuit(a in arb_bell_diagonal(), b in arb_bell_diagonal(), f in 0.5f64..=1.0, eta in 0.5f64..=1.0) {
        let noise = GateNoise::new(f, eta).unwrap();
        let full = swap_pairs(&a.to_density_matrix(), &b.to_density_matrix(), &noise).unwrap();
        let (diag, leakage) = to_bell_diagonal(&full.state).unwrap();
        prop_assert!(leakage < 1e-12);
        prop_assert!(diag.max_abs_diff(&swap_bell_diagonal(&a, &b, &noise)) < 1e-9);
    }

    #[test]
    fn corrected_branches_agree(a in arb_bell_diagonal(), b in arb_bell_diagonal()) {
        let bm = swap_pairs(&a.to_density_matrix(), &b.to_density_matrix(), &GateNoise::default()).unwrap();
        let total: f64 = bm.branches.iter().map(|br| br.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for branch in &bm.branches {
            prop_assert!((branch.probability - 0.25).abs() < 1e-12);
            prop_assert!(branch.state.as_ref().unwrap().max_abs_diff(&bm.state) < 1e-9);
        }
    }

    #[test]
    fn nested_werner_recurrence(f in 0.5f64..=1.0, levels in 0usize..4) {
        let states = swap_nested(&werner(f).unwrap(), levels, &GateNoise::ideal()).unwrap();
        let mut expected = f;
        for state in &states {
            let got = state.fidelity_bell(Bell::PsiPlus).unwrap();
            prop_assert!((got - expected).abs() < 1e-9);
            expected = expected * expected + (1.0 - expected).powi(2) / 3.0;
        }
    }
}

#[test]
fn perfect_operations_keep_perfect_pairs() {
    let states = swap_nested(&bell_state(Bell::PsiPlus), 4, &GateNoise::ideal()).unwrap();
    for s in states {
        assert!((s.fidelity_bell(Bell::PsiPlus).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn half_chain_signalling_time() {
    assert!((t_repe(299.792458, 200.0, 0.299792458) - 700.0).abs() < 1e-9);
}

fn pipelined() -> Config {
    Config {
        herald_mode: HeraldMode::Pipelined,
        ..Config::default()
    }
}

#[test]
fn optimization_is_deterministic() {
    let chain = ChainParams::new(9, 120.0).unwrap();
    let a = ChainPlanner::new(&pipelined())
        .unwrap()
        .optimize(&chain, true)
        .unwrap();
    let b = ChainPlanner::new(&pipelined())
        .unwrap()
        .optimize(&chain, true)
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn wider_search_never_slows_the_plan() {
    let mut planner = ChainPlanner::new(&pipelined()).unwrap();
    for (m, l, fc) in [
        (5, 25.0, false),
        (17, 250.0, true),
        (2, 0.1, false),
        (9, 60.0, false),
    ] {
        let chain = ChainParams::new(m, l).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..=8 {
            if let PlanOutcome::Feasible(p) = planner.optimize_within(&chain, fc, k).unwrap() {
                assert!(p.t_qr_us <= last, "M={m} L={l} k={k}");
                last = p.t_qr_us;
            }
        }
        assert!(last.is_finite(), "M={m} L={l} never feasible");
    }
}

#[test]
fn plans_meet_target_and_respect_components() {
    let mut planner = ChainPlanner::new(&pipelined()).unwrap();
    let rows = planner
        .rate_vs_distance(&[2, 5, 17], &[1.0, 30.0, 300.0], &[false, true])
        .unwrap();
    assert_eq!(rows.len(), 18);
    for row in rows.iter().filter_map(PlanOutcome::plan) {
        assert!(row.fidelity >= 0.99);
        assert!((row.t_qr_us - row.t_pair_us - row.t_eg2_us).abs() < 1e-9);
        assert!(row.t_eg2_us >= ((1u64 << row.n2) - 1) as f64 * row.t_pair_us - 1e-9);
        assert!((row.rate_hz * row.t_qr_us - 1e6).abs() < 1e-6);
    }
    let keys: Vec<(f64, usize, bool)> = rows
        .iter()
        .map(|r| match r {
            PlanOutcome::Feasible(p) => (p.total_length_km, p.stations, p.fc_enabled),
            PlanOutcome::Infeasible {
                total_length_km,
                stations,
                fc_enabled,
                ..
            } => (*total_length_km, *stations, *fc_enabled),
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn lossless_chain_rate_depends_only_on_signalling() {
    let config = Config {
        fiber_db_per_km: 0.0,
        ..pipelined()
    };
    let mut planner = ChainPlanner::new(&config).unwrap();
    let near = planner
        .optimize(&ChainParams::new(5, 1.0).unwrap(), false)
        .unwrap();
    let far = planner
        .optimize(&ChainParams::new(5, 200.0).unwrap(), false)
        .unwrap();
    let (near, far) = (near.plan().unwrap(), far.plan().unwrap());
    assert!(far.t_qr_us > near.t_qr_us);
    let c = config.c_km_per_us;
    let no_flight = Config {
        c_km_per_us: c * 1e9,
        ..config.clone()
    };
    let mut fast = ChainPlanner::new(&no_flight).unwrap();
    let a = fast
        .optimize(&ChainParams::new(5, 1.0).unwrap(), false)
        .unwrap()
        .rate_hz();
    let b = fast
        .optimize(&ChainParams::new(5, 200.0).unwrap(), false)
        .unwrap()
        .rate_hz();
    assert!((a - b).abs() / a < 1e-6);
}

use proptest::prelude::*;
use qramnet::model::{monte_carlo, run_once};
use qramnet::noise::NoiseParams;
use qramnet::sim::{
    attempt_cycle_duration, sample_heralded_success, simulate_layer_td, simulate_layer_ts, simulate_qram, Placement,
    Protocol, SimConfig, TdSchedule, TimingModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(cnot: f64, eta: f64) -> NoiseParams {
    NoiseParams::from_electron_times(2.0, 0.1, cnot, eta).unwrap()
}

fn placement() -> impl Strategy<Value = Placement> {
    prop_oneof![
        (0.0..=1.0f64).prop_map(|p_d| Placement::Random { p_d }),
        (1usize..6).prop_map(|offset| Placement::TopLayers { offset }),
    ]
}

#[test]
fn geometric_mean_at_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 40_000;
    let total: u64 = (0..n).map(|_| sample_heralded_success(0.5, &mut rng).unwrap()).sum();
    let mean = total as f64 / n as f64;
    assert!((mean - 2.0).abs() < 0.05, "mean {mean}");
    assert_eq!(sample_heralded_success(1.0, &mut rng).unwrap(), 1);
    assert!(sample_heralded_success(0.0, &mut rng).is_err());
}

/// E[max of m geometric(p) draws] = Σ_{k≥0} 1 - (1 - q^k)^m.
#[test]
fn max_of_geometrics_matches_order_statistic() {
    let (p, m) = (0.3, 16);
    let q: f64 = 1.0 - p;
    let exact: f64 = (0..2000).map(|k| 1.0 - (1.0 - q.powi(k)).powi(m)).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 20_000;
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| sample_heralded_success(p, &mut rng).unwrap())
                .max()
                .unwrap() as f64
        })
        .collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!((mean - exact).abs() < 4.0 * sd / (n as f64).sqrt(), "{mean} vs {exact}");
}

#[test]
fn unit_efficiency_is_seed_independent() {
    let timing = TimingModel::default();
    let cycle = attempt_cycle_duration(&timing);
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        simulate_layer_td(16, &params(0.0, 1.0), &timing, TdSchedule::Sequential, &mut rng).unwrap()
    };
    let a = run(2);
    a.check().unwrap();
    assert_eq!(a, run(3));
    let even: Vec<f64> = a.links.iter().step_by(2).map(|l| l.ready).collect();
    assert!(even.iter().all(|&r| r == even[0] && r > cycle && r < 2.0 * cycle));
    assert_eq!(a.cnot_events.len(), 7);
}

#[test]
fn runs_are_reproducible() {
    for protocol in [Protocol::Td, Protocol::Ts] {
        let mut cfg = SimConfig::new(protocol, 7, params(1e-3, 0.6));
        cfg.placement = Placement::Random { p_d: 0.2 };
        assert_eq!(simulate_qram(&cfg, 42).unwrap(), simulate_qram(&cfg, 42).unwrap());
        assert_ne!(simulate_qram(&cfg, 42).unwrap(), simulate_qram(&cfg, 43).unwrap());
    }
}

#[test]
fn disjoint_seed_ranges_agree() {
    for protocol in [Protocol::Td, Protocol::Ts] {
        let mut cfg = SimConfig::new(protocol, 6, params(1e-3, 0.7));
        cfg.placement = Placement::TopLayers { offset: 2 };
        let a = monte_carlo(&cfg, 200, 0).unwrap();
        let b = monte_carlo(&cfg, 200, 10_000).unwrap();
        let tol = |x: f64, y: f64| 3.0 * (x * x + y * y).sqrt();
        assert!(
            (a.mean_fidelity - b.mean_fidelity).abs() <= tol(a.stderr_fidelity, b.stderr_fidelity),
            "{protocol}: {} vs {}",
            a.mean_fidelity,
            b.mean_fidelity
        );
        assert!(
            (a.mean_query_time - b.mean_query_time).abs() <= tol(a.stderr_query_time, b.stderr_query_time),
            "{protocol}"
        );
    }
}

#[test]
fn thread_count_does_not_change_summary() {
    let cfg = SimConfig::new(Protocol::Ts, 6, params(1e-3, 0.6));
    let many = monte_carlo(&cfg, 50, 3).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let one = pool.install(|| monte_carlo(&cfg, 50, 3).unwrap());
    assert_eq!(many, one);
}

#[test]
fn layer_one_is_perfect_without_extension() {
    let mut cfg = SimConfig::new(Protocol::Td, 3, params(1e-2, 0.8));
    cfg.extend_with_qc_link = false;
    let e = run_once(&cfg, 0).unwrap();
    assert_eq!(e.per_layer_fidelity[0], 1.0);
    cfg.extend_with_qc_link = true;
    assert!(run_once(&cfg, 0).unwrap().per_layer_fidelity[0] < 1.0);
}

#[test]
fn odd_td_layers_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let timing = TimingModel::default();
    assert!(simulate_layer_td(3, &params(0.0, 0.9), &timing, TdSchedule::Sequential, &mut rng).is_err());
    assert!(simulate_layer_td(0, &params(0.0, 0.9), &timing, TdSchedule::Sequential, &mut rng).is_err());
}

#[test]
fn ts_needs_p_link_for_photonic_merges() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let timing = TimingModel::default();
    let p = params(0.0, 0.9).with_p_link(0.0);
    assert!(simulate_layer_ts(8, &p, &timing, &Placement::Random { p_d: 0.0 }, &mut rng).is_err());
    assert!(simulate_layer_ts(8, &p, &timing, &Placement::Random { p_d: 1.0 }, &mut rng).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ledgers_are_consistent(
        seed in any::<u64>(),
        log_n in 0u32..8,
        eta in 0.2..=1.0f64,
        placement in placement(),
        overlap in any::<bool>(),
    ) {
        let n = 1usize << log_n;
        let timing = TimingModel::default();
        let p = params(1e-3, eta);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schedule = if overlap { TdSchedule::Overlapped } else { TdSchedule::Sequential };
        let td = simulate_layer_td(n, &p, &timing, schedule, &mut rng).unwrap();
        td.check().unwrap();
        prop_assert_eq!(td.links.len(), n - 1);
        let ts = simulate_layer_ts(n, &p, &timing, &placement, &mut rng).unwrap();
        ts.check().unwrap();
        prop_assert_eq!(ts.links.len(), n - 1);
        prop_assert!(ts.n_deterministic <= n.saturating_sub(2));
        if n > 1 {
            prop_assert!(td.completion > 0.0 && ts.completion > 0.0);
        }
    }

    /// CNOT errors do not touch the timing, so for one seed they can only
    /// lower the fidelity; the same holds for shorter memory times.
    #[test]
    fn noise_is_monotone_per_seed(seed in any::<u64>(), protocol in prop_oneof![Just(Protocol::Td), Just(Protocol::Ts)]) {
        let mut cfg = SimConfig::new(protocol, 5, params(1e-4, 0.7));
        cfg.placement = Placement::TopLayers { offset: 1 };
        let base = run_once(&cfg, seed).unwrap();
        cfg.params = params(1e-2, 0.7);
        let noisier = run_once(&cfg, seed).unwrap();
        prop_assert_eq!(base.query_time, noisier.query_time);
        prop_assert!(noisier.tree_fidelity <= base.tree_fidelity);
        cfg.params = NoiseParams::from_electron_times(2.0, 0.01, 1e-4, 0.7).unwrap();
        let faster_decay = run_once(&cfg, seed).unwrap();
        prop_assert!(faster_decay.tree_fidelity <= base.tree_fidelity);
        prop_assert!((0.0..=1.0).contains(&base.tree_fidelity));
    }

    #[test]
    fn noiseless_runs_are_perfect(seed in any::<u64>(), layers in 1usize..9, eta in 0.3..=1.0f64, placement in placement()) {
        for protocol in [Protocol::Td, Protocol::Ts] {
            let mut cfg = SimConfig::new(protocol, layers, NoiseParams::noiseless(eta));
            cfg.placement = placement;
            let e = run_once(&cfg, seed).unwrap();
            prop_assert!((e.tree_fidelity - 1.0).abs() < 1e-12);
            prop_assert!(e.query_time > 0.0);
        }
    }
}

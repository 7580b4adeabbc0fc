use dipolatt::ensemble_protocol::{
    cnot_flush_cycle, estimate_fidelity, fill_lattice, paired_probability, run_ensemble, EnsembleConfig, ErrorModel,
    ErrorSplit,
};
use proptest::prelude::*;

fn config(n_sites: usize, p: f64, f: f64, seed: u64) -> EnsembleConfig {
    EnsembleConfig { n_sites, fill_probability: p, seed, model: ErrorModel::ideal_split(f), pre_cycles: 0, replicas: 1 }
}

#[test]
fn fill_extremes() {
    let empty = fill_lattice(1000, 0.0, 3).unwrap();
    assert_eq!((empty.controls(), empty.targets(), empty.pairs()), (0, 0, 0));
    let full = fill_lattice(1000, 1.0, 3).unwrap();
    assert_eq!((full.controls(), full.targets(), full.pairs()), (1000, 1000, 1000));
    assert!(fill_lattice(10, 1.5, 0).is_err());
    assert!(fill_lattice(10, f64::NAN, 0).is_err());
}

#[test]
fn paired_fraction_is_p_squared() {
    let (n, p) = (1_000_000, 0.1);
    let ens = fill_lattice(n, p, 11).unwrap();
    let q = paired_probability(p);
    let sigma = (n as f64 * q * (1.0 - q)).sqrt();
    assert!((ens.pairs() as f64 - n as f64 * q).abs() < 3.0 * sigma);
}

#[test]
fn perfect_and_null_gates() {
    let mut ens = fill_lattice(10_000, 1.0, 5).unwrap();
    let c = cnot_flush_cycle(&mut ens, &ErrorModel::ideal_split(1.0)).unwrap();
    assert_eq!(c.retained, 10_000);
    let mut ens = fill_lattice(10_000, 1.0, 5).unwrap();
    let model = ErrorModel {
        error_split: ErrorSplit { partner_lost: 0.0, both_lost: 1.0, wrong_state: 0.0 },
        ..ErrorModel::ideal_split(0.0)
    };
    let c = cnot_flush_cycle(&mut ens, &model).unwrap();
    assert_eq!((c.retained, c.lost, c.controls_lost), (0, 10_000, 10_000));
    assert_eq!(ens.targets(), 0);
}

#[test]
fn survivors_are_binomial() {
    let n = 100_000;
    let mut ens = fill_lattice(n, 1.0, 9).unwrap();
    let c = cnot_flush_cycle(&mut ens, &ErrorModel::ideal_split(0.9)).unwrap();
    let sigma = (n as f64 * 0.9 * 0.1).sqrt();
    assert!((c.retained as f64 - 0.9 * n as f64).abs() < 3.0 * sigma);
}

#[test]
fn ratio_estimator() {
    let e = estimate_fidelity(9000, 8100).unwrap();
    assert!((e.value - 0.9).abs() < 1e-15);
    assert!((e.std_error - (0.09f64 / 9000.0).sqrt()).abs() < 1e-15);
    assert!(estimate_fidelity(0, 0).is_err());
    assert!(estimate_fidelity(5, 6).is_err());
}

#[test]
fn recovers_injected_fidelity() {
    // 4·10⁵ sites at p = 1/2 hold about 10⁵ pairs
    let run = run_ensemble(&config(400_000, 0.5, 0.92, 2024)).unwrap();
    assert!((run.initial_pairs as f64 / 1e5 - 1.0).abs() < 0.02);
    let (lo, hi) = run.estimate.interval(3.0);
    assert!(lo <= 0.92 && 0.92 <= hi, "{:?}", run.estimate);
}

#[test]
fn intervals_shrink_with_size() {
    let mut last = f64::INFINITY;
    for (i, n) in [1_000, 10_000, 100_000].into_iter().enumerate() {
        let run = run_ensemble(&config(n, 1.0, 0.92, 40 + i as u64)).unwrap();
        let (lo, hi) = run.estimate.interval(3.0);
        assert!(lo <= 0.92 && 0.92 <= hi, "n = {n}: {:?}", run.estimate);
        assert!(hi - lo < last);
        last = hi - lo;
    }
}

#[test]
fn seeded_runs_repeat() {
    let mut cfg = config(20_000, 0.5, 0.9, 77);
    cfg.replicas = 4;
    let a = run_ensemble(&cfg).unwrap();
    let b = run_ensemble(&cfg).unwrap();
    assert_eq!(a, b);
    cfg.seed = 78;
    assert_ne!(a.cycles, run_ensemble(&cfg).unwrap().cycles);
}

#[test]
fn pre_cycles_remove_unpaired_bias() {
    let mut cfg = config(200_000, 0.5, 0.9, 13);
    cfg.model.unpaired_flip_probability = 0.3;
    let biased = run_ensemble(&cfg).unwrap().estimate;
    cfg.pre_cycles = 4;
    let settled = run_ensemble(&cfg).unwrap().estimate;
    assert!((biased.value - 0.9).abs() > 3.0 * biased.std_error);
    assert!((settled.value - 0.9).abs() < 3.0 * settled.std_error, "{settled:?}");
}

#[test]
fn rejects_bad_config() {
    let mut cfg = config(100, 0.5, 0.9, 1);
    cfg.replicas = 0;
    assert!(run_ensemble(&cfg).is_err());
    let json = r#"{"n_sites":10,"fill_probability":0.5,"seed":1,"model":{"gate_fidelity":0.9},"bogus":1}"#;
    assert!(serde_json::from_str::<EnsembleConfig>(json).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn counts_are_conserved(
        seed in any::<u64>(),
        p in 0.0f64..=1.0,
        f in 0.0f64..=1.0,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
        flip in 0.0f64..=1.0,
    ) {
        let total = a + b + 1.0;
        let model = ErrorModel {
            gate_fidelity: f,
            error_split: ErrorSplit { partner_lost: a / total, both_lost: b / total, wrong_state: 1.0 / total },
            control_fraction: 0.5,
            unpaired_flip_probability: flip,
        };
        let mut ens = fill_lattice(2_000, p, seed).unwrap();
        for _ in 0..3 {
            let before = ens.targets() as u64;
            let c = cnot_flush_cycle(&mut ens, &model).unwrap();
            prop_assert_eq!(c.targets, before);
            prop_assert_eq!(c.targets, c.retained + c.flushed + c.lost);
            prop_assert_eq!(ens.targets() as u64, c.retained);
            prop_assert!(c.pairs <= c.targets);
        }
    }
}

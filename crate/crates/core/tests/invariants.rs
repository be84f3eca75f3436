use proptest::prelude::*;

use progbar_sched::engine::{run, run_fixed_step};
use progbar_sched::experiments::{run_figure_to_dir, ExperimentConfig};
use progbar_sched::model::{check_delay_decomposition, opt_cost};
use progbar_sched::policies::{simulate, PolicyConfig};
use progbar_sched::verify::{zoo_case, POLICY_ZOO};

fn sizes() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..20.0, 2..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn schedules_are_sound(p in sizes(), idx in 0..POLICY_ZOO.len(), seed in any::<u64>()) {
        let (inst, config) = zoo_case(POLICY_ZOO[idx], p, 3, seed).unwrap();
        let out = simulate(&inst, &config).unwrap();
        let opt = opt_cost(&inst).unwrap();
        prop_assert!(out.total_cost >= opt * (1.0 - 1e-9), "{} < {}", out.total_cost, opt);
        for (j, c) in out.completion.iter().enumerate() {
            prop_assert!(*c >= inst.p(j) * (1.0 - 1e-9));
        }
        if inst.machines() == 1 {
            prop_assert!(check_delay_decomposition(&out, &inst, 1e-9));
        }
        // Same input, same run.
        let again = simulate(&inst, &config).unwrap();
        prop_assert_eq!(out.completion, again.completion);
    }

    #[test]
    fn round_robin_is_two_competitive(p in sizes()) {
        let inst = progbar_sched::model::Instance::from_sizes(p).unwrap();
        let out = simulate(&inst, &PolicyConfig::Rr).unwrap();
        prop_assert!(out.total_cost <= 2.0 * opt_cost(&inst).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn scaling_time_scales_cost(p in sizes(), idx in 0..POLICY_ZOO.len(), seed in any::<u64>(), k in 0.1f64..10.0) {
        let (inst, config) = zoo_case(POLICY_ZOO[idx], p.clone(), 1, seed).unwrap();
        let (scaled, _) = zoo_case(POLICY_ZOO[idx], p.iter().map(|x| x * k).collect(), 1, seed).unwrap();
        let a = simulate(&inst, &config).unwrap().total_cost;
        let b = simulate(&scaled, &config).unwrap().total_cost;
        prop_assert!((b - k * a).abs() <= 1e-7 * k * a, "{} vs {}", b, k * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engine_matches_fixed_step(p in prop::collection::vec(0.1f64..2.0, 2..6), idx in 0..POLICY_ZOO.len(), seed in any::<u64>()) {
        let (inst, config) = zoo_case(POLICY_ZOO[idx], p, 2, seed).unwrap();
        let exact = run(&inst, &mut config.build(&inst).unwrap()).unwrap();
        let stepped = run_fixed_step(&inst, &mut config.build(&inst).unwrap(), 1e-4).unwrap();
        for (a, b) in exact.completion.iter().zip(&stepped.completion) {
            prop_assert!((a - b).abs() <= 1e-2, "{} vs {}", a, b);
        }
    }
}

#[test]
fn figure_csv_is_reproducible() {
    let mut config = ExperimentConfig::preset("robustification").unwrap();
    config.n = 12;
    config.trials = 3;
    config.sweep = vec![0.0, 10.0];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let out_a = run_figure_to_dir(&config, a.path(), Some(1)).unwrap();
    let out_b = run_figure_to_dir(&config, b.path(), Some(4)).unwrap();
    assert_eq!(std::fs::read(&out_a.csv).unwrap(), std::fs::read(&out_b.csv).unwrap());
    assert_eq!(
        std::fs::read(out_a.meta.unwrap()).unwrap(),
        std::fs::read(out_b.meta.unwrap()).unwrap()
    );
    assert!(out_a.records.iter().all(|r| r.ratio >= 1.0 - 1e-9));
}

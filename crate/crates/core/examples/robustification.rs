//! Three ways to make size predictions robust: time sharing with
//! round-robin, Alg1 on delayed signals, and the combiner.

use progbar_sched::bars::{prediction_beta, PredictionMode};
use progbar_sched::combining::{combine, Candidate};
use progbar_sched::experiments::{
    gen_gaussian_predictions, gen_pareto_instance, predicted_order, with_single_signal_bars,
};
use progbar_sched::model::opt_cost;
use progbar_sched::policies::{simulate, PolicyConfig};

fn main() -> progbar_sched::error::Result<()> {
    let base = gen_pareto_instance(200, 1.1, 7)?;
    let opt = opt_cost(&base)?;
    for sigma in [0.0, 5.0, 50.0] {
        let pi = gen_gaussian_predictions(&base, sigma, 11)?;
        let follow = PolicyConfig::FollowOrder {
            order: predicted_order(&pi),
        };

        let ts = PolicyConfig::TimeSharing {
            lambda: 1.0 / 3.0,
            inner_a: Box::new(follow.clone()),
            inner_b: Box::new(PolicyConfig::Rr),
        };
        let ts = simulate(&base, &ts)?.total_cost;

        let (alpha, rho) = (5.0 / 9.0, 0.9);
        let betas: Vec<f64> = pi
            .iter()
            .zip(base.sizes())
            .map(|(&q, p)| prediction_beta(alpha, q, p, PredictionMode::Delayed))
            .collect();
        let delayed = with_single_signal_bars(&base, alpha, &betas)?;
        let dp = simulate(
            &delayed,
            &PolicyConfig::Alg1 {
                alpha,
                rho,
                level: None,
            },
        )?
        .total_cost;

        let candidates = vec![
            Candidate::from_config(PolicyConfig::Rr, false)?,
            Candidate::from_config(follow, false)?,
        ];
        let (out, report) = combine(&base, candidates, None, 3)?;
        println!(
            "sigma={sigma:<4} time sharing {:.3}  delayed {:.3}  combining {:.3} (chose {}, {} pairs)",
            ts / opt,
            dp / opt,
            out.total_cost / opt,
            ["rr", "follow"][report.chosen],
            report.m_pairs
        );
    }
    Ok(())
}

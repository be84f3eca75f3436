//! Preferential execution on several machines.

use progbar_sched::engine::run;
use progbar_sched::experiments::{gen_pareto_instance, with_accurate_bars, with_single_signal_bars};
use progbar_sched::model::opt_cost;
use progbar_sched::policies::MultiMachine;
use rand::Rng;

fn main() -> progbar_sched::error::Result<()> {
    let alpha = 0.5;
    let base = gen_pareto_instance(60, 1.1, 4)?;
    let mut rng = progbar_sched::rng::rng_from_seed(8);
    let random: Vec<f64> = (0..base.len()).map(|_| rng.random()).collect();
    for m in [1, 2, 4] {
        let accurate = with_accurate_bars(&base, alpha)?.with_machines(m)?;
        let noisy = with_single_signal_bars(&base, alpha, &random)?.with_machines(m)?;
        let a = run(&accurate, &mut MultiMachine::new(alpha, m, None)?)?.total_cost / opt_cost(&accurate)?;
        let b = run(&noisy, &mut MultiMachine::new(alpha, m, None)?)?.total_cost / opt_cost(&noisy)?;
        println!(
            "m={m}: accurate {a:.4} (<= {}), random signals {b:.4} (<= {})",
            1.0 + alpha,
            1.0 + 1.0 / alpha
        );
    }
    Ok(())
}

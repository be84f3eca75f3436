//! Repeated explore-then-commit on Poisson progress bars.

use progbar_sched::bars::poisson_bar;
use progbar_sched::engine::run;
use progbar_sched::experiments::gen_pareto_instance;
use progbar_sched::model::opt_cost;
use progbar_sched::policies::{tuned_k, RepeatedEtc, RoundRobin};
use progbar_sched::rng::derived_rng;

fn main() -> progbar_sched::error::Result<()> {
    let base = gen_pareto_instance(50, 1.1, 2)?;
    let opt = opt_cost(&base)?;
    let rr = run(&base, &mut RoundRobin)?.total_cost / opt;
    println!("round-robin {rr:.4}");
    for g in [2, 12, 48, 192] {
        let bars = (0..base.len())
            .map(|j| poisson_bar(g, &mut derived_rng(9, &[g as u64, j as u64])))
            .collect::<Result<Vec<_>, _>>()?;
        let inst = base.with_bars(bars)?;
        let k = tuned_k(g);
        let one = run(&inst, &mut RepeatedEtc::new(1, g)?)?.total_cost / opt;
        let tuned = run(&inst, &mut RepeatedEtc::new(k, g)?)?.total_cost / opt;
        let bound = 1.0 + (12.0 / g as f64).cbrt();
        println!("g={g:<4} k=1 {one:.4}  k={k:<3} {tuned:.4}  (expected-ratio bound {bound:.3})");
    }
    Ok(())
}

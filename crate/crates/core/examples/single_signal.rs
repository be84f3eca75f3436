//! Blindly following signals versus Alg1 with windows, on accurate bars and
//! on the instance where every signal comes slightly early.

use progbar_sched::engine::run;
use progbar_sched::experiments::{brittleness_instance, gen_pareto_instance, with_accurate_bars};
use progbar_sched::model::opt_cost;
use progbar_sched::policies::{Alg1, BlindFollow};

fn main() -> progbar_sched::error::Result<()> {
    let alpha = 0.5;
    let inst = with_accurate_bars(&gen_pareto_instance(50, 1.1, 1)?, alpha)?;
    let opt = opt_cost(&inst)?;
    let blind = run(&inst, &mut BlindFollow::default())?.total_cost;
    println!("accurate bars: blind follow {:.4}, bound {}", blind / opt, 1.0 + alpha);

    let brittle = brittleness_instance(alpha, 200, 1e-4)?;
    let opt = opt_cost(&brittle)?;
    for rho in [1.0, 0.5, 0.1] {
        let cost = run(&brittle, &mut Alg1::new(alpha, rho, None)?)?.total_cost;
        println!("early signals: alg1 rho={rho:<4} ratio {:.4}", cost / opt);
    }
    Ok(())
}

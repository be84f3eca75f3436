//! Picking between round-robin and a fixed order from sampled job pairs.

use progbar_sched::combining::{all_pairs_choice, combine, default_m_pairs, Candidate};
use progbar_sched::experiments::gen_pareto_instance;
use progbar_sched::model::opt_cost;
use progbar_sched::policies::PolicyConfig;

fn main() -> progbar_sched::error::Result<()> {
    let inst = gen_pareto_instance(64, 1.1, 5)?;
    let mut reversed = inst.spt_order();
    reversed.reverse();
    let candidates = vec![
        Candidate::from_config(PolicyConfig::Rr, false)?,
        Candidate::from_config(PolicyConfig::FollowOrder { order: reversed }, false)?,
        Candidate::from_config(
            PolicyConfig::FollowOrder {
                order: inst.spt_order(),
            },
            false,
        )?,
    ];
    println!(
        "default pair count for n=64, 3 candidates: {}",
        default_m_pairs(64, 3.0)
    );

    let (chosen, scores) = all_pairs_choice(&inst, &candidates)?;
    println!("all pairs: scores {scores:.1?} -> candidate {chosen}");

    let opt = opt_cost(&inst)?;
    for seed in 0..4 {
        let (out, report) = combine(&inst, candidates.clone(), Some(6), seed)?;
        println!(
            "seed {seed}: sampled {:?}, chose {}, ratio {:.3}",
            report.pairs,
            report.chosen,
            out.total_cost / opt
        );
    }
    Ok(())
}

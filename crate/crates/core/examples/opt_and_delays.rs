//! Optimal cost, a round-robin run and its pairwise delay matrix.

use progbar_sched::model::{delay_decomposition_total, opt_cost, Instance};
use progbar_sched::policies::{simulate, PolicyConfig};

fn main() -> progbar_sched::error::Result<()> {
    let inst = Instance::from_sizes(vec![1.0, 2.0, 4.0])?;
    println!("OPT = {}", opt_cost(&inst)?);

    let out = simulate(&inst, &PolicyConfig::Rr)?;
    println!("RR completions {:?}, total {}", out.completion, out.total_cost);

    // d(i, j): how long i ran before j finished.
    for i in 0..inst.len() {
        let row: Vec<String> = (0..inst.len()).map(|j| format!("{:5.2}", out.delay(i, j))).collect();
        println!("d({i}, .) = [{}]", row.join(" "));
    }
    println!(
        "sum p + sum of pair delays = {} (cost {})",
        delay_decomposition_total(&out, &inst),
        out.total_cost
    );
    Ok(())
}

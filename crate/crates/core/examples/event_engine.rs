//! Writing a policy against the engine and checking it with the fixed-step
//! simulator.

use progbar_sched::engine::{run, run_fixed_step, Policy, SimState, Wake};
use progbar_sched::model::{Instance, StepProgressBar};

/// Runs the job with the highest displayed progress, lowest id on ties.
struct MostProgress;

impl Policy for MostProgress {
    fn name(&self) -> String {
        "most_progress".into()
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        let best = state
            .alive_ids()
            .max_by(|&a, &b| state.displayed[a].total_cmp(&state.displayed[b]).then(b.cmp(&a)))?;
        rates[best] = 1.0;
        None
    }
}

fn main() -> progbar_sched::error::Result<()> {
    let bars = vec![
        StepProgressBar::new(vec![0.5], vec![0.9, 1.0])?,
        StepProgressBar::new(vec![0.5], vec![0.1, 1.0])?,
        StepProgressBar::new(vec![0.5], vec![0.5, 1.0])?,
    ];
    let inst = Instance::new(vec![3.0, 1.0, 2.0], bars, 1)?;

    let exact = run(&inst, &mut MostProgress)?;
    print!("{}", exact.event_log_tsv());
    let stepped = run_fixed_step(&inst, &mut MostProgress, 1e-3)?;
    println!("exact   {:?}", exact.completion);
    println!("stepped {:?}", stepped.completion);
    Ok(())
}

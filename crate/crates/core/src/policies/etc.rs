//! Explore-then-commit policies for many-level progress bars.

use crate::engine::{Policy, SimState, Wake};
use crate::error::{Error, Result};
use crate::model::Instance;

use super::baselines::round_robin_rates;

/// Slack when comparing displayed progress against a level.
const LEVEL_TOL: f64 = 1e-12;

/// Round-robin until some job displays at least `k/(g+1)`, then run that job
/// to completion; repeat on the rest.
#[derive(Clone, Debug)]
pub struct RepeatedEtc {
    k: usize,
    g: usize,
    committed: Option<usize>,
}

impl RepeatedEtc {
    pub fn new(k: usize, g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidParameter("g must be positive".into()));
        }
        if k == 0 || k > g + 1 {
            return Err(Error::InvalidParameter(format!("k = {k} outside 1..={}", g + 1)));
        }
        Ok(Self { k, g, committed: None })
    }

    /// `k = ceil((g/2)^(2/3)) + 1`.
    pub fn tuned(g: usize) -> Result<Self> {
        Self::new(tuned_k(g), g)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn trigger(&self) -> f64 {
        self.k as f64 / (self.g + 1) as f64
    }
}

pub fn tuned_k(g: usize) -> usize {
    ((g as f64 / 2.0).powf(2.0 / 3.0) - 1e-9).ceil() as usize + 1
}

impl Policy for RepeatedEtc {
    fn name(&self) -> String {
        "repeated_etc".into()
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        if instance.granularity() != self.g {
            return Err(Error::InvalidParameter(format!(
                "bars have granularity {} but g = {}",
                instance.granularity(),
                self.g
            )));
        }
        self.committed = None;
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        if let Some(j) = self.committed.filter(|&j| state.alive[j]) {
            rates[j] = 1.0;
            return None;
        }
        let trigger = self.trigger() - LEVEL_TOL;
        self.committed = state.alive_ids().find(|&j| state.displayed[j] >= trigger);
        match self.committed {
            Some(j) => rates[j] = 1.0,
            None => round_robin_rates(state, rates),
        }
        None
    }
}

/// Round-robin until every alive job displays at least `threshold`, then
/// runs the jobs one by one by decreasing displayed progress.
#[derive(Clone, Debug)]
pub struct GenericEtc {
    threshold: f64,
    order: Option<Vec<usize>>,
}

impl GenericEtc {
    pub fn new(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold fraction {threshold} outside (0, 1]"
            )));
        }
        Ok(Self { threshold, order: None })
    }

    pub fn default_threshold(g: usize) -> f64 {
        (g as f64).powf(-1.0 / 3.0).min(1.0)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Policy for GenericEtc {
    fn name(&self) -> String {
        "generic_etc".into()
    }

    fn init(&mut self, _instance: &Instance) -> Result<()> {
        self.order = None;
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        if self.order.is_none() {
            let ready = state
                .alive_ids()
                .all(|j| state.displayed[j] >= self.threshold - LEVEL_TOL);
            if !ready {
                round_robin_rates(state, rates);
                return None;
            }
            let mut order: Vec<usize> = state.alive_ids().collect();
            order.sort_by(|&a, &b| state.displayed[b].total_cmp(&state.displayed[a]).then(a.cmp(&b)));
            self.order = Some(order);
        }
        if let Some(&j) = self.order.as_ref().and_then(|o| o.iter().find(|&&j| state.alive[j])) {
            rates[j] = 1.0;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, run_fixed_step};
    use crate::model::StepProgressBar;

    fn uniform_levels(g: usize) -> Vec<f64> {
        (1..=g).map(|h| h as f64 / (g + 1) as f64).collect()
    }

    fn bar(g: usize, first: &[f64]) -> StepProgressBar {
        let mut thresholds = first.to_vec();
        thresholds.resize(g, 1.0);
        thresholds.push(1.0);
        StepProgressBar::new(uniform_levels(g), thresholds).unwrap()
    }

    #[test]
    fn commits_to_first_job_to_reach_level() {
        let g = 3;
        let bars = vec![bar(g, &[0.2, 0.5, 0.7]), bar(g, &[0.4, 0.6, 0.8])];
        let inst = Instance::new(vec![1.0, 1.0], bars, 1).unwrap();
        let out = run(&inst, &mut RepeatedEtc::new(1, g).unwrap()).unwrap();
        assert!((out.completion[0] - 1.2).abs() < 1e-12);
        assert!((out.completion[1] - 2.0).abs() < 1e-12);
        assert!((out.total_cost - 3.2).abs() < 1e-12);
        assert!((out.delay(0, 1) + out.delay(1, 0) - 1.2).abs() < 1e-12);
    }

    #[test]
    fn tuned_k_values() {
        assert_eq!(tuned_k(12), 5);
        assert_eq!(tuned_k(2), 2);
        assert_eq!(tuned_k(16), 5);
        assert_eq!(RepeatedEtc::tuned(48).unwrap().k(), 10);
    }

    #[test]
    fn single_job_and_parameter_checks() {
        let inst = Instance::new(vec![2.5], vec![bar(4, &[0.1])], 1).unwrap();
        for k in 1..=5 {
            let out = run(&inst, &mut RepeatedEtc::new(k, 4).unwrap()).unwrap();
            assert!((out.completion[0] - 2.5).abs() < 1e-12);
        }
        assert!(RepeatedEtc::new(6, 4).is_err());
        assert!(RepeatedEtc::new(0, 4).is_err());
        assert!(run(&inst, &mut RepeatedEtc::new(1, 3).unwrap()).is_err());
        assert!(GenericEtc::new(0.0).is_err());
        assert!(GenericEtc::new(1.5).is_err());
        let out = run(&inst, &mut GenericEtc::new(0.5).unwrap()).unwrap();
        assert!((out.completion[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn generic_etc_starts_sequential_when_ready() {
        let g = 2;
        let bars = vec![bar(g, &[0.0, 0.5]), bar(g, &[0.0, 0.0])];
        let inst = Instance::new(vec![1.0, 2.0], bars, 1).unwrap();
        let out = run(&inst, &mut GenericEtc::new(1.0 / 3.0).unwrap()).unwrap();
        // Job 1 displays more at time zero, so it goes first.
        assert!((out.completion[1] - 2.0).abs() < 1e-12);
        assert!((out.completion[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn generic_etc_phase_switch() {
        let g = 8;
        let threshold = GenericEtc::default_threshold(g);
        assert!((threshold - 0.5).abs() < 1e-12);
        // Level 5/9 is the first at or above 1/2. Job 0 reaches it at elapsed
        // 0.6, job 1 earlier at 0.5, so the switch happens at 2 * 0.6.
        let bars = vec![
            bar(g, &[0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9]),
            bar(g, &[0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.6, 0.7]),
        ];
        let inst = Instance::new(vec![1.0, 2.0], bars, 1).unwrap();
        let exact = run(&inst, &mut GenericEtc::new(threshold).unwrap()).unwrap();
        let approx = run_fixed_step(&inst, &mut GenericEtc::new(threshold).unwrap(), 1e-4).unwrap();
        let switch = 2.0 * 0.6;
        // After the switch job 1 (displayed 6/9) runs first.
        assert!((exact.completion[1] - (switch + 1.4)).abs() < 1e-9);
        assert!((exact.completion[0] - (switch + 1.4 + 0.4)).abs() < 1e-9);
        for j in 0..2 {
            assert!((exact.completion[j] - approx.completion[j]).abs() < 1e-2);
        }
    }
}

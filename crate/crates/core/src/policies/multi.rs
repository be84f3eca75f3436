use std::collections::VecDeque;

use crate::engine::{Policy, SimState, Wake};
use crate::error::{Error, Result};
use crate::model::Instance;

/// Preferential execution on `m` machines.
///
/// Unsignalled jobs share the capacity left over by the preferential set at
/// rate `min(1, (m - |S|) / |E|)`. A signal at elapsed `e` queues the job
/// (FIFO) with a budget of `e (1 - alpha) / alpha`; the first `m` queued jobs
/// run at rate 1 and leave the queue once their budget is spent.
#[derive(Clone, Debug)]
pub struct MultiMachine {
    alpha: f64,
    m: usize,
    level: Option<usize>,
    jump: usize,
    signalled: Vec<bool>,
    budget: Vec<f64>,
    used: Vec<f64>,
    queue: VecDeque<usize>,
    running: Vec<usize>,
    last_now: f64,
}

impl MultiMachine {
    pub fn new(alpha: f64, m: usize, level: Option<usize>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1]")));
        }
        if m < 1 {
            return Err(Error::InvalidParameter("need at least one machine".into()));
        }
        Ok(Self {
            alpha,
            m,
            level,
            jump: 1,
            signalled: Vec::new(),
            budget: Vec::new(),
            used: Vec::new(),
            queue: VecDeque::new(),
            running: Vec::new(),
            last_now: 0.0,
        })
    }
}

impl Policy for MultiMachine {
    fn name(&self) -> String {
        "multi_machine".into()
    }

    fn machines(&self) -> usize {
        self.m
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        let g = instance.granularity();
        self.jump = match self.level {
            None if g == 1 => 1,
            None => return Err(Error::SingleSignal(g)),
            Some(h) if (1..=g).contains(&h) => h,
            Some(h) => return Err(Error::InvalidParameter(format!("signal level {h} outside 1..={g}"))),
        };
        let n = instance.len();
        self.signalled = vec![false; n];
        self.budget = vec![0.0; n];
        self.used = vec![0.0; n];
        self.queue.clear();
        self.running.clear();
        self.last_now = 0.0;
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        let dt = state.now - self.last_now;
        self.last_now = state.now;
        for &j in &self.running {
            self.used[j] += dt;
        }

        let factor = (1.0 - self.alpha) / self.alpha;
        for j in state.alive_ids() {
            if !self.signalled[j] && state.signals_seen[j] >= self.jump {
                self.signalled[j] = true;
                self.budget[j] = state.elapsed[j] * factor;
                self.queue.push_back(j);
            }
        }
        let tol = 1e-12 * state.now.abs().max(1.0);
        let (budget, used) = (&self.budget, &self.used);
        self.queue.retain(|&j| state.alive[j] && used[j] < budget[j] - tol);

        self.running.clear();
        self.running.extend(self.queue.iter().take(self.m).copied());
        for &j in &self.running {
            rates[j] = 1.0;
        }
        let pool: Vec<usize> = state.alive_ids().filter(|j| !self.queue.contains(j)).collect();
        if !pool.is_empty() {
            let q = ((self.m - self.running.len()) as f64 / pool.len() as f64).min(1.0);
            for &j in &pool {
                rates[j] = q;
            }
        }

        self.running
            .iter()
            .map(|&j| (state.now + self.budget[j] - self.used[j], j))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(at, j)| Wake::timer(at, j as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bars::accurate_bar;
    use crate::engine::{run, SimState};
    use crate::model::{check_delay_decomposition, opt_cost, opt_cost_sizes};

    fn accurate(p: &[f64], alpha: f64, m: usize) -> Instance {
        let bars = vec![accurate_bar(alpha).unwrap(); p.len()];
        Instance::new(p.to_vec(), bars, m).unwrap()
    }

    #[test]
    fn single_machine_is_consistent() {
        let inst = accurate(&[1.0, 2.0], 0.5, 1);
        let out = run(&inst, &mut MultiMachine::new(0.5, 1, None).unwrap()).unwrap();
        assert!(out.total_cost <= 1.5 * opt_cost(&inst).unwrap() * (1.0 + 1e-9));
        assert!(check_delay_decomposition(&out, &inst, 1e-9));
    }

    #[test]
    fn abundant_machines_run_everything_at_once() {
        let p = [1.0, 3.0, 2.0];
        let inst = accurate(&p, 0.4, 4);
        let out = run(&inst, &mut MultiMachine::new(0.4, 4, None).unwrap()).unwrap();
        for j in 0..3 {
            assert!((out.completion[j] - p[j]).abs() < 1e-9);
        }
        assert!((out.total_cost - opt_cost_sizes(&p, 4).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn initial_rates_split_capacity() {
        let inst = accurate(&[1.0, 1.0, 2.0, 2.0], 0.5, 2);
        let mut policy = MultiMachine::new(0.5, 2, None).unwrap();
        policy.init(&inst).unwrap();
        let state = SimState::new(&inst);
        let mut rates = vec![0.0; 4];
        policy.decide(&state, &mut rates);
        assert_eq!(rates, vec![0.5; 4]);
    }

    #[test]
    fn parameter_checks() {
        assert!(MultiMachine::new(0.0, 2, None).is_err());
        assert!(MultiMachine::new(0.5, 0, None).is_err());
        let inst = accurate(&[1.0, 2.0], 0.5, 2);
        assert!(matches!(
            run(&inst, &mut MultiMachine::new(0.5, 3, None).unwrap()),
            Err(Error::MachineMismatch { .. })
        ));
    }
}

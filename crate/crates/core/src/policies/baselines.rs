use crate::engine::{Policy, SimState, Wake, WakeKind};
use crate::error::{Error, Result};
use crate::model::{Instance, ABS_TOL, REL_TOL};

/// Equal rates over every alive job.
#[derive(Clone, Debug, Default)]
pub struct RoundRobin;

pub(crate) fn round_robin_rates(state: &SimState, rates: &mut [f64]) {
    if state.n_alive == 0 {
        return;
    }
    let share = 1.0 / state.n_alive as f64;
    for j in state.alive_ids() {
        rates[j] = share;
    }
}

impl Policy for RoundRobin {
    fn name(&self) -> String {
        "rr".into()
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        round_robin_rates(state, rates);
        None
    }
}

fn same_level(a: f64, b: f64) -> bool {
    (a - b).abs() <= ABS_TOL.max(REL_TOL * a.abs().max(b.abs()))
}

/// Shares the machine among the alive jobs with the least elapsed time and
/// asks to be woken when that group catches up with the next job.
pub(crate) fn setf_rates(state: &SimState, rates: &mut [f64]) -> Option<Wake> {
    let min = state
        .alive_ids()
        .map(|j| state.elapsed[j])
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let group: Vec<usize> = state
        .alive_ids()
        .filter(|&j| same_level(state.elapsed[j], min))
        .collect();
    let share = 1.0 / group.len() as f64;
    for &j in &group {
        rates[j] = share;
    }
    let next = state
        .alive_ids()
        .map(|j| state.elapsed[j])
        .filter(|&e| !same_level(e, min))
        .fold(f64::INFINITY, f64::min);
    next.is_finite().then_some(Wake {
        at: state.now + (next - min) * group.len() as f64,
        kind: WakeKind::Merge(group),
    })
}

/// Shortest elapsed time first.
#[derive(Clone, Debug, Default)]
pub struct Setf;

impl Policy for Setf {
    fn name(&self) -> String {
        "setf".into()
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        setf_rates(state, rates)
    }
}

/// Shortest processing time first; needs the sizes.
#[derive(Clone, Debug, Default)]
pub struct Spt {
    order: Vec<usize>,
}

impl Policy for Spt {
    fn name(&self) -> String {
        "spt".into()
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        if !instance.is_clairvoyant() {
            return Err(Error::ClairvoyanceRequired);
        }
        self.order = instance.spt_order();
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        if let Some(&j) = self.order.iter().find(|&&j| state.alive[j]) {
            rates[j] = 1.0;
        }
        None
    }
}

/// Runs jobs one at a time in a fixed order.
#[derive(Clone, Debug)]
pub struct FollowOrder {
    order: Vec<usize>,
}

impl FollowOrder {
    pub fn new(order: Vec<usize>) -> Self {
        Self { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidParameter(format!(
            "order has {} entries for {n} jobs",
            order.len()
        )));
    }
    for &j in order {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidParameter(format!("order is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

impl Policy for FollowOrder {
    fn name(&self) -> String {
        "follow_order".into()
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        check_permutation(&self.order, instance.len())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        if let Some(&j) = self.order.iter().find(|&&j| state.alive[j]) {
            rates[j] = 1.0;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, run_fixed_step};
    use crate::model::check_delay_decomposition;

    fn sizes(p: &[f64]) -> Instance {
        Instance::from_sizes(p.to_vec()).unwrap()
    }

    #[test]
    fn rr_examples() {
        let inst = sizes(&[1.0, 2.0]);
        let out = run(&inst, &mut RoundRobin).unwrap();
        assert!((out.total_cost - 5.0).abs() < 1e-12);
        assert!((out.delay(0, 1) + out.delay(1, 0) - 2.0).abs() < 1e-12);

        let c = 1.7;
        let out = run(&sizes(&[c; 5]), &mut RoundRobin).unwrap();
        for &cj in &out.completion {
            assert!((cj - 5.0 * c).abs() < 1e-9);
        }
        assert!((out.total_cost - 25.0 * c).abs() < 1e-9);
    }

    #[test]
    fn spt_is_optimal() {
        let inst = sizes(&[3.0, 1.0, 2.0]);
        let out = run(&inst, &mut Spt::default()).unwrap();
        assert_eq!(out.completion, vec![6.0, 1.0, 3.0]);
        assert_eq!(out.total_cost, 10.0);

        let blind = inst.with_clairvoyance(false);
        assert!(matches!(
            run(&blind, &mut Spt::default()),
            Err(Error::ClairvoyanceRequired)
        ));
    }

    #[test]
    fn setf_equal_jobs_finish_together() {
        let inst = sizes(&[1.0, 1.0, 1.0]);
        let out = run(&inst, &mut Setf).unwrap();
        for &c in &out.completion {
            assert!((c - 3.0).abs() < 1e-9);
        }
        let dt = 1e-3;
        let out = run_fixed_step(&inst, &mut Setf, dt).unwrap();
        for &c in &out.completion {
            assert!((c - 3.0).abs() <= 3.0 * dt);
        }
    }

    #[test]
    fn setf_matches_round_robin_from_zero() {
        // Starting from equal elapsed times SETF and RR coincide.
        let inst = sizes(&[0.5, 2.0, 1.25, 3.0]);
        let a = run(&inst, &mut Setf).unwrap();
        let b = run(&inst, &mut RoundRobin).unwrap();
        for j in 0..4 {
            assert!((a.completion[j] - b.completion[j]).abs() < 1e-9);
        }
        assert!(check_delay_decomposition(&a, &inst, 1e-9));
    }

    #[test]
    fn follow_order_delays_are_prefix_sums() {
        let inst = sizes(&[4.0, 1.0, 3.0, 2.0]);
        let order = vec![2, 0, 3, 1];
        let out = run(&inst, &mut FollowOrder::new(order.clone())).unwrap();
        let mut pos = [0; 4];
        for (k, &j) in order.iter().enumerate() {
            pos[j] = k;
        }
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let expected = if pos[i] < pos[j] { inst.p(i) } else { 0.0 };
                    assert!((out.delay(i, j) - expected).abs() < 1e-12);
                }
            }
        }
        assert!(run(&inst, &mut FollowOrder::new(vec![0, 1, 1, 2])).is_err());
    }
}

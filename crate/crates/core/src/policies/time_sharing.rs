use crate::engine::{Policy, SimState, Wake, WakeKind};
use crate::error::{Error, Result};
use crate::model::Instance;

/// One inner policy running on its own virtual clock. It observes the
/// physical state of every job (elapsed time, bar, completion).
struct Lane {
    policy: Box<dyn Policy>,
    speed: f64,
    state: SimState,
    rates: Vec<f64>,
}

impl Lane {
    fn new(policy: Box<dyn Policy>, speed: f64) -> Self {
        Self {
            policy,
            speed,
            state: SimState {
                now: 0.0,
                elapsed: Vec::new(),
                alive: Vec::new(),
                n_alive: 0,
                signals_seen: Vec::new(),
                displayed: Vec::new(),
                machines: 1,
            },
            rates: Vec::new(),
        }
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        if self.policy.machines() != 1 {
            return Err(Error::MachineMismatch {
                policy: self.policy.machines(),
                instance: 1,
            });
        }
        self.policy.init(&instance.clone().with_machines(1)?)?;
        self.state.now = 0.0;
        self.rates = vec![0.0; instance.len()];
        Ok(())
    }

    /// Moves the virtual clock forward by `dt` physical time units and copies
    /// the physical job state.
    fn advance(&mut self, dt: f64, physical: &SimState) {
        self.state.now += dt * self.speed;
        self.state.elapsed.clone_from(&physical.elapsed);
        self.state.alive.clone_from(&physical.alive);
        self.state.n_alive = physical.n_alive;
        self.state.signals_seen.clone_from(&physical.signals_seen);
        self.state.displayed.clone_from(&physical.displayed);
    }

    /// Returns the physical time of the requested wake-up, if any.
    fn decide(&mut self, physical_now: f64) -> Option<(f64, WakeKind)> {
        self.rates.fill(0.0);
        let wake = self.policy.decide(&self.state, &mut self.rates);
        for (r, &alive) in self.rates.iter_mut().zip(&self.state.alive) {
            if !alive {
                *r = 0.0;
            }
        }
        wake.map(|w| {
            let ahead = (w.at - self.state.now).max(0.0);
            (physical_now + ahead / self.speed, w.kind)
        })
    }
}

/// Runs two single-machine policies side by side, the first at speed
/// `lambda` and the second at `1 - lambda`. A job completes once the two
/// lanes together have processed it for its size.
pub struct TimeSharing {
    lambda: f64,
    lanes: [Lane; 2],
    last_now: f64,
}

impl TimeSharing {
    pub fn new(lambda: f64, a: Box<dyn Policy>, b: Box<dyn Policy>) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter(format!("lambda {lambda} outside (0, 1)")));
        }
        Ok(Self {
            lambda,
            lanes: [Lane::new(a, lambda), Lane::new(b, 1.0 - lambda)],
            last_now: 0.0,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Policy for TimeSharing {
    fn name(&self) -> String {
        format!(
            "time_sharing({},{})",
            self.lanes[0].policy.name(),
            self.lanes[1].policy.name()
        )
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        for lane in &mut self.lanes {
            lane.init(instance)?;
        }
        self.last_now = 0.0;
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        let dt = state.now - self.last_now;
        self.last_now = state.now;
        let mut wake: Option<Wake> = None;
        for lane in &mut self.lanes {
            lane.advance(dt, state);
            if let Some((at, kind)) = lane.decide(state.now) {
                if wake.as_ref().is_none_or(|w| at < w.at) {
                    wake = Some(Wake { at, kind });
                }
            }
            for (r, lr) in rates.iter_mut().zip(&lane.rates) {
                *r += lane.speed * lr;
            }
        }
        for r in rates.iter_mut() {
            *r = r.min(1.0);
        }
        wake
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::model::{opt_cost, StepProgressBar};
    use crate::policies::baselines::RoundRobin;
    use crate::policies::single_signal::{Alg1, BlindFollow};

    fn two_jobs(betas: [f64; 2]) -> Instance {
        let bars = betas
            .iter()
            .map(|&b| StepProgressBar::new(vec![0.5], vec![b, 1.0]).unwrap())
            .collect();
        Instance::new(vec![1.0, 2.0], bars, 1).unwrap()
    }

    #[test]
    fn even_split_of_round_robin_is_round_robin() {
        let inst = Instance::from_sizes(vec![1.0, 1.0]).unwrap();
        let mut ts = TimeSharing::new(0.5, Box::new(RoundRobin), Box::new(RoundRobin)).unwrap();
        let out = run(&inst, &mut ts).unwrap();
        assert!((out.total_cost - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_near_one_tracks_first_policy() {
        let inst = two_jobs([0.5, 0.5]);
        let alone = run(&inst, &mut Alg1::new(0.5, 1.0, None).unwrap()).unwrap();
        let mut ts = TimeSharing::new(
            1.0 - 1e-9,
            Box::new(Alg1::new(0.5, 1.0, None).unwrap()),
            Box::new(RoundRobin),
        )
        .unwrap();
        let shared = run(&inst, &mut ts).unwrap();
        assert!((shared.total_cost - alone.total_cost).abs() <= 1e-5 * alone.total_cost);
    }

    #[test]
    fn adversarial_signals_stay_within_split_bound() {
        let inst = two_jobs([1.0, 1.0]);
        let lambda = 1.0 / 3.0;
        let mut ts = TimeSharing::new(lambda, Box::new(BlindFollow::default()), Box::new(RoundRobin)).unwrap();
        let out = run(&inst, &mut ts).unwrap();
        assert!(out.total_cost <= 2.0 / (1.0 - lambda) * opt_cost(&inst).unwrap());
    }

    #[test]
    fn rejects_bad_lambda() {
        for lambda in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(TimeSharing::new(lambda, Box::new(RoundRobin), Box::new(RoundRobin)).is_err());
        }
    }
}

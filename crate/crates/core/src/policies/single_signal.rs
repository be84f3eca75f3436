//! Policies driven by one designated jump of each progress bar.

use std::collections::VecDeque;

use crate::engine::{Policy, SimState, Wake};
use crate::error::{Error, Result};
use crate::model::Instance;

use super::baselines::{round_robin_rates, setf_rates};

/// Resolves which jump counts as "the" signal: the configured one, or the
/// only one when bars have a single intermediate level.
fn signal_jump(instance: &Instance, level: Option<usize>) -> Result<usize> {
    let g = instance.granularity();
    match level {
        None if g == 1 => Ok(1),
        None => Err(Error::SingleSignal(g)),
        Some(h) if (1..=g).contains(&h) => Ok(h),
        Some(h) => Err(Error::InvalidParameter(format!("signal level {h} outside 1..={g}"))),
    }
}

/// Signal bookkeeping shared by both policies: queues newly signalled jobs
/// by ascending id.
#[derive(Clone, Debug, Default)]
struct SignalQueue {
    jump: usize,
    queued: Vec<bool>,
    queue: VecDeque<usize>,
}

impl SignalQueue {
    fn reset(&mut self, n: usize, jump: usize) {
        self.jump = jump;
        self.queued = vec![false; n];
        self.queue.clear();
    }

    fn poll(&mut self, state: &SimState) {
        for j in state.alive_ids() {
            if !self.queued[j] && state.signals_seen[j] >= self.jump {
                self.queued[j] = true;
                self.queue.push_back(j);
            }
        }
    }
}

/// Round-robin until a job signals; a signalled job then runs alone until it
/// completes.
#[derive(Clone, Debug, Default)]
pub struct BlindFollow {
    level: Option<usize>,
    signals: SignalQueue,
}

impl BlindFollow {
    pub fn new(level: Option<usize>) -> Self {
        Self {
            level,
            signals: SignalQueue::default(),
        }
    }
}

impl Policy for BlindFollow {
    fn name(&self) -> String {
        "blind_follow".into()
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        let jump = signal_jump(instance, self.level)?;
        self.signals.reset(instance.len(), jump);
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        self.signals.poll(state);
        while let Some(&j) = self.signals.queue.front() {
            if state.alive[j] {
                rates[j] = 1.0;
                return None;
            }
            self.signals.queue.pop_front();
        }
        round_robin_rates(state, rates);
        None
    }
}

/// SETF exploration with a bounded preferential window after each signal.
///
/// A job signalling at elapsed time `e` runs alone for `(1/(alpha rho) - 1) e`
/// time units and then rejoins the SETF pool if unfinished.
#[derive(Clone, Debug)]
pub struct Alg1 {
    alpha: f64,
    rho: f64,
    level: Option<usize>,
    signals: SignalQueue,
    window: Option<(usize, f64)>,
}

impl Alg1 {
    pub fn new(alpha: f64, rho: f64, level: Option<usize>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1]")));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho {rho} outside (0, 1]")));
        }
        Ok(Self {
            alpha,
            rho,
            level,
            signals: SignalQueue::default(),
            window: None,
        })
    }

    pub fn window_factor(&self) -> f64 {
        1.0 / (self.alpha * self.rho) - 1.0
    }
}

impl Policy for Alg1 {
    fn name(&self) -> String {
        "alg1".into()
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        let jump = signal_jump(instance, self.level)?;
        self.signals.reset(instance.len(), jump);
        self.window = None;
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        self.signals.poll(state);
        if let Some((j, end)) = self.window {
            let tol = 1e-12 * end.abs().max(1.0);
            if state.alive[j] && state.now < end - tol {
                rates[j] = 1.0;
                return Some(Wake::timer(end, j as u64));
            }
            self.window = None;
        }
        while let Some(j) = self.signals.queue.pop_front() {
            if !state.alive[j] {
                continue;
            }
            let length = self.window_factor() * state.elapsed[j];
            if length > 0.0 {
                let end = state.now + length;
                self.window = Some((j, end));
                rates[j] = 1.0;
                return Some(Wake::timer(end, j as u64));
            }
        }
        setf_rates(state, rates)
    }
}

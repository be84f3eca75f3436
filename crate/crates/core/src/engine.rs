//! Event-driven continuous-time simulation.
//!
//! A [`Policy`] maps the current [`SimState`] to a rate per job. Rates stay
//! constant until the next event: a job crossing its next progress-bar
//! threshold, a job completing, or a wake-up the policy asked for. The engine
//! jumps straight to that instant, so completion times are exact up to
//! floating-point rounding.
//!
//! [`run_fixed_step`] drives the same policies with a plain Euler
//! discretisation and serves as an independent reference for [`run`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::model::{Instance, ScheduleOutcome};

/// Tolerance (relative to the current time, floor 1) under which two event
/// times are treated as simultaneous.
const TIME_TOL: f64 = 1e-12;
/// Slack allowed on rate feasibility checks.
const RATE_TOL: f64 = 1e-9;

/// Everything a policy may observe. Processing times are not part of it.
#[derive(Clone, Debug)]
pub struct SimState {
    pub now: f64,
    pub elapsed: Vec<f64>,
    pub alive: Vec<bool>,
    pub n_alive: usize,
    /// Number of bar jumps observed per job (`g + 1` once completed).
    pub signals_seen: Vec<usize>,
    pub displayed: Vec<f64>,
    pub machines: usize,
}

impl SimState {
    pub fn new(instance: &Instance) -> Self {
        let n = instance.len();
        Self {
            now: 0.0,
            elapsed: vec![0.0; n],
            alive: vec![true; n],
            n_alive: n,
            signals_seen: vec![0; n],
            displayed: vec![0.0; n],
            machines: instance.machines(),
        }
    }

    pub fn len(&self) -> usize {
        self.elapsed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elapsed.is_empty()
    }

    pub fn alive_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive.iter().enumerate().filter_map(|(j, &a)| a.then_some(j))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimEventKind {
    /// Job crossed its `jump`-th threshold (1-based).
    SignalEmitted {
        job: usize,
        jump: usize,
    },
    JobCompleted {
        job: usize,
    },
    PolicyTimer {
        tag: u64,
    },
    /// A group of equally processed jobs caught up with other jobs.
    Merge {
        jobs: Vec<usize>,
    },
}

impl SimEventKind {
    fn rank(&self) -> u8 {
        match self {
            SimEventKind::JobCompleted { .. } => 0,
            SimEventKind::SignalEmitted { .. } => 1,
            SimEventKind::PolicyTimer { .. } | SimEventKind::Merge { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub time: f64,
    pub kind: SimEventKind,
}

impl SimEvent {
    /// `time\tkind\tjob\tdetail`, time with 12 significant digits.
    pub fn to_tsv(&self) -> String {
        let (kind, job, detail) = match &self.kind {
            SimEventKind::SignalEmitted { job, jump } => ("signal", job.to_string(), jump.to_string()),
            SimEventKind::JobCompleted { job } => ("complete", job.to_string(), String::new()),
            SimEventKind::PolicyTimer { tag } => ("timer", "-".to_string(), tag.to_string()),
            SimEventKind::Merge { jobs } => (
                "merge",
                "-".to_string(),
                jobs.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(","),
            ),
        };
        format!("{}\t{}\t{}\t{}", sig(self.time, 12), kind, job, detail)
    }
}

impl fmt::Display for SimEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv())
    }
}

/// A wake-up requested by a policy.
#[derive(Clone, Debug, PartialEq)]
pub struct Wake {
    pub at: f64,
    pub kind: WakeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WakeKind {
    Timer(u64),
    Merge(Vec<usize>),
}

impl Wake {
    pub fn timer(at: f64, tag: u64) -> Self {
        Self {
            at,
            kind: WakeKind::Timer(tag),
        }
    }

    fn event_kind(&self) -> SimEventKind {
        match &self.kind {
            WakeKind::Timer(tag) => SimEventKind::PolicyTimer { tag: *tag },
            WakeKind::Merge(jobs) => SimEventKind::Merge { jobs: jobs.clone() },
        }
    }
}

/// Earliest of two optional wake-ups.
pub fn earliest(a: Option<Wake>, b: Option<Wake>) -> Option<Wake> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.at < a.at { b } else { a }),
        (a, b) => a.or(b),
    }
}

/// A scheduling policy: a state machine choosing processing rates.
///
/// `decide` is called at time zero and after every event. It receives a
/// zeroed rate slice with one entry per job and must leave completed jobs at
/// rate zero, every rate within `[0, 1]` and the total within the machine
/// count. Policies must detect new signals and completions from the state
/// itself; wake-ups only guarantee that `decide` runs again at that time.
pub trait Policy: Send {
    fn name(&self) -> String;

    fn machines(&self) -> usize {
        1
    }

    /// Validates the instance and resets internal state.
    fn init(&mut self, _instance: &Instance) -> Result<()> {
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake>;

    /// Called once with the final state after the last completion.
    fn finish(&mut self, _state: &SimState) {}
}

impl Policy for Box<dyn Policy> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn machines(&self) -> usize {
        (**self).machines()
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        (**self).init(instance)
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        (**self).decide(state, rates)
    }

    fn finish(&mut self, state: &SimState) {
        (**self).finish(state)
    }
}

fn validate_rates(state: &SimState, rates: &[f64]) -> Result<()> {
    let mut total = 0.0;
    for (j, &r) in rates.iter().enumerate() {
        if !r.is_finite() || !(0.0..=1.0 + RATE_TOL).contains(&r) {
            return Err(Error::InfeasibleRates(format!("job {j} has rate {r}")));
        }
        if !state.alive[j] && r != 0.0 {
            return Err(Error::InfeasibleRates(format!("completed job {j} has rate {r}")));
        }
        total += r;
    }
    if total > state.machines as f64 + RATE_TOL {
        return Err(Error::InfeasibleRates(format!(
            "total rate {total} exceeds {} machine(s)",
            state.machines
        )));
    }
    Ok(())
}

/// Next threshold of job `j` that emits a visible signal, as an elapsed-time
/// target. Thresholds at `1` coincide with completion and are suppressed.
fn next_signal_target(instance: &Instance, next_jump: &[usize], j: usize) -> Option<f64> {
    let bar = instance.bar(j);
    let h = next_jump[j];
    (h < bar.granularity() && bar.thresholds()[h] < 1.0).then(|| bar.thresholds()[h] * instance.p(j))
}

/// Earliest future event for the given rates: a threshold crossing, a
/// completion or the policy wake-up. Simultaneous candidates resolve as
/// completions first, then signals, then the wake-up, ties by job id.
pub fn next_event_horizon(
    state: &SimState,
    rates: &[f64],
    instance: &Instance,
    wake: Option<&Wake>,
) -> Option<(f64, SimEventKind)> {
    let next_jump: Vec<usize> = state
        .signals_seen
        .iter()
        .zip(&state.alive)
        .map(|(&s, &a)| if a { s } else { usize::MAX })
        .collect();
    let mut best: Option<(f64, SimEventKind)> = None;
    let mut offer = |t: f64, kind: SimEventKind| {
        let better = match &best {
            None => true,
            Some((bt, bk)) => t < *bt || (t == *bt && kind.rank() < bk.rank()),
        };
        if better {
            best = Some((t, kind));
        }
    };
    for j in state.alive_ids() {
        let r = rates[j];
        if r <= 0.0 {
            if state.elapsed[j] >= instance.p(j) {
                offer(state.now, SimEventKind::JobCompleted { job: j });
            }
            continue;
        }
        let to_complete = ((instance.p(j) - state.elapsed[j]) / r).max(0.0);
        offer(state.now + to_complete, SimEventKind::JobCompleted { job: j });
        if next_jump[j] != usize::MAX {
            if let Some(target) = next_signal_target(instance, &next_jump, j) {
                let to_signal = ((target - state.elapsed[j]) / r).max(0.0);
                offer(
                    state.now + to_signal,
                    SimEventKind::SignalEmitted {
                        job: j,
                        jump: next_jump[j] + 1,
                    },
                );
            }
        }
    }
    if let Some(w) = wake {
        offer(w.at.max(state.now), w.event_kind());
    }
    best
}

/// Bookkeeping shared by both engines.
struct Recorder<'a> {
    instance: &'a Instance,
    state: SimState,
    next_jump: Vec<usize>,
    completion: Vec<f64>,
    delays: Vec<f64>,
    log: Vec<SimEvent>,
}

impl<'a> Recorder<'a> {
    fn new(instance: &'a Instance) -> Self {
        let n = instance.len();
        Self {
            instance,
            state: SimState::new(instance),
            next_jump: vec![0; n],
            completion: vec![f64::NAN; n],
            delays: vec![0.0; n * n],
            log: Vec::new(),
        }
    }

    /// Completes `j` at `time`; `elapsed_at` gives every job's elapsed time
    /// at that instant.
    fn complete(&mut self, j: usize, time: f64, elapsed_at: impl Fn(usize) -> f64) {
        let n = self.instance.len();
        for i in 0..n {
            self.delays[i * n + j] = if i == j { 0.0 } else { elapsed_at(i) };
        }
        self.completion[j] = time;
        let st = &mut self.state;
        st.alive[j] = false;
        st.n_alive -= 1;
        st.elapsed[j] = self.instance.p(j);
        st.signals_seen[j] = self.instance.bar(j).granularity() + 1;
        st.displayed[j] = 1.0;
        self.next_jump[j] = usize::MAX;
        self.log.push(SimEvent {
            time,
            kind: SimEventKind::JobCompleted { job: j },
        });
    }

    /// Emits every pending signal of alive job `j` whose target has been
    /// reached.
    fn emit_signals(&mut self, j: usize, time: f64) {
        while let Some(target) = next_signal_target(self.instance, &self.next_jump, j) {
            if self.state.elapsed[j] < target {
                break;
            }
            self.next_jump[j] += 1;
            let jump = self.next_jump[j];
            self.state.signals_seen[j] = jump;
            self.state.displayed[j] = self.instance.bar(j).level_after(jump);
            self.log.push(SimEvent {
                time,
                kind: SimEventKind::SignalEmitted { job: j, jump },
            });
        }
    }

    /// Processes instantaneous events at the current time: completions of
    /// jobs at their size, then signals, both by ascending id.
    fn settle(&mut self) {
        let now = self.state.now;
        for j in 0..self.instance.len() {
            if self.state.alive[j] && self.state.elapsed[j] >= self.instance.p(j) {
                let snapshot = self.state.elapsed.clone();
                self.complete(j, now, |i| snapshot[i]);
            }
        }
        for j in 0..self.instance.len() {
            if self.state.alive[j] {
                self.emit_signals(j, now);
            }
        }
    }

    fn finish(self) -> ScheduleOutcome {
        ScheduleOutcome::new(self.completion, self.delays, self.log)
    }
}

fn prepare(instance: &Instance, policy: &mut dyn Policy) -> Result<()> {
    if instance.is_empty() {
        return Err(Error::EmptyInstance);
    }
    if policy.machines() != instance.machines() {
        return Err(Error::MachineMismatch {
            policy: policy.machines(),
            instance: instance.machines(),
        });
    }
    policy.init(instance)
}

/// Simulates `policy` on `instance` exactly, event by event.
pub fn run(instance: &Instance, policy: &mut dyn Policy) -> Result<ScheduleOutcome> {
    prepare(instance, policy)?;
    let n = instance.len();
    let mut rec = Recorder::new(instance);
    rec.settle();

    let mut rates = vec![0.0; n];
    let mut to_complete = vec![f64::INFINITY; n];
    let mut to_signal = vec![f64::INFINITY; n];
    let mut idle_steps = 0usize;
    let idle_limit = 8 * n + 1000;

    while rec.state.n_alive > 0 {
        rates.fill(0.0);
        let wake = policy.decide(&rec.state, &mut rates);
        validate_rates(&rec.state, &rates)?;

        let now = rec.state.now;
        let mut dt = f64::INFINITY;
        for j in 0..n {
            to_complete[j] = f64::INFINITY;
            to_signal[j] = f64::INFINITY;
            let r = rates[j];
            if !rec.state.alive[j] || r <= 0.0 {
                continue;
            }
            let e = rec.state.elapsed[j];
            to_complete[j] = ((instance.p(j) - e) / r).max(0.0);
            dt = dt.min(to_complete[j]);
            if let Some(target) = next_signal_target(instance, &rec.next_jump, j) {
                to_signal[j] = ((target - e) / r).max(0.0);
                dt = dt.min(to_signal[j]);
            }
        }
        let wake_dt = wake.as_ref().map(|w| (w.at - now).max(0.0));
        if let Some(w) = wake_dt {
            dt = dt.min(w);
        }
        if !dt.is_finite() {
            return Err(Error::StalledPolicy(now));
        }
        if dt == 0.0 {
            idle_steps += 1;
            if idle_steps > idle_limit {
                return Err(Error::StalledPolicy(now));
            }
        } else {
            idle_steps = 0;
        }

        let t_next = now + dt;
        let tol = TIME_TOL * t_next.abs().max(1.0);
        let st = &mut rec.state;
        for j in 0..n {
            let r = rates[j];
            if !st.alive[j] || r <= 0.0 {
                continue;
            }
            st.elapsed[j] += r * dt;
            if to_complete[j] <= dt + tol {
                st.elapsed[j] = instance.p(j);
            } else if to_signal[j] <= dt + tol {
                let target = next_signal_target(instance, &rec.next_jump, j).expect("pending signal");
                st.elapsed[j] = st.elapsed[j].max(target);
            }
            st.elapsed[j] = st.elapsed[j].min(instance.p(j));
        }
        st.now = t_next;
        rec.settle();
        if let (Some(w), Some(wdt)) = (&wake, wake_dt) {
            if wdt <= dt + tol {
                rec.log.push(SimEvent {
                    time: t_next,
                    kind: w.event_kind(),
                });
            }
        }
    }
    policy.finish(&rec.state);
    Ok(rec.finish())
}

/// Simulates `policy` with fixed time steps of length `dt`.
///
/// The policy is queried once per step and its rates are held for the whole
/// step; completions and threshold crossings inside a step are interpolated
/// linearly. Completion times are accurate to `O(n dt)`.
pub fn run_fixed_step(instance: &Instance, policy: &mut dyn Policy, dt: f64) -> Result<ScheduleOutcome> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("step {dt} must be positive")));
    }
    prepare(instance, policy)?;
    let n = instance.len();
    let mut rec = Recorder::new(instance);
    rec.settle();

    let total: f64 = instance.jobs().iter().map(|j| j.p).sum();
    let max_steps = ((total / dt) * 4.0 + 1e6) as u64;
    let mut rates = vec![0.0; n];
    let mut steps = 0u64;

    while rec.state.n_alive > 0 {
        steps += 1;
        if steps > max_steps {
            return Err(Error::StalledPolicy(rec.state.now));
        }
        rates.fill(0.0);
        let wake = policy.decide(&rec.state, &mut rates);
        validate_rates(&rec.state, &rates)?;
        if rates.iter().all(|&r| r == 0.0) && wake.is_none() {
            return Err(Error::StalledPolicy(rec.state.now));
        }

        let start = rec.state.now;
        let start_elapsed = rec.state.elapsed.clone();
        let elapsed_at = |i: usize, t: f64| -> f64 { (start_elapsed[i] + rates[i] * (t - start)).min(instance.p(i)) };

        // Completions inside the step, in time order (ties by id).
        let mut finishing: Vec<(f64, usize)> = rec
            .state
            .alive_ids()
            .filter(|&j| rates[j] > 0.0 && start_elapsed[j] + rates[j] * dt >= instance.p(j))
            .map(|j| (start + (instance.p(j) - start_elapsed[j]) / rates[j], j))
            .collect();
        finishing.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(t, j) in &finishing {
            rec.complete(j, t, |i| elapsed_at(i, t));
        }

        let end = start + dt;
        for j in 0..n {
            if rec.state.alive[j] {
                rec.state.elapsed[j] = elapsed_at(j, end);
                rec.emit_signals(j, end);
            }
        }
        rec.state.now = end;
        if let Some(w) = &wake {
            if w.at <= end {
                rec.log.push(SimEvent {
                    time: end,
                    kind: w.event_kind(),
                });
            }
        }
    }
    policy.finish(&rec.state);
    rec.log
        .sort_by(|a, b| a.time.total_cmp(&b.time).then(a.kind.rank().cmp(&b.kind.rank())));
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_delay_decomposition, StepProgressBar};

    /// Equal rates over alive jobs.
    struct Fair;

    impl Policy for Fair {
        fn name(&self) -> String {
            "fair".into()
        }

        fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
            let share = 1.0 / state.n_alive as f64;
            for j in state.alive_ids() {
                rates[j] = share;
            }
            None
        }
    }

    struct Lazy;

    impl Policy for Lazy {
        fn name(&self) -> String {
            "lazy".into()
        }

        fn decide(&mut self, _: &SimState, _: &mut [f64]) -> Option<Wake> {
            None
        }
    }

    struct Greedy;

    impl Policy for Greedy {
        fn name(&self) -> String {
            "greedy".into()
        }

        fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
            for j in state.alive_ids() {
                rates[j] = 1.0;
            }
            None
        }
    }

    /// Idles until t = 7, then runs everything fairly.
    struct Sleeper;

    impl Policy for Sleeper {
        fn name(&self) -> String {
            "sleeper".into()
        }

        fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
            if state.now < 7.0 {
                return Some(Wake::timer(7.0, 42));
            }
            Fair.decide(state, rates)
        }
    }

    fn two_jobs() -> Instance {
        let bars = vec![
            StepProgressBar::new(vec![0.5], vec![0.5, 1.0]).unwrap(),
            StepProgressBar::new(vec![0.5], vec![1.0, 1.0]).unwrap(),
        ];
        Instance::new(vec![1.0, 2.0], bars, 1).unwrap()
    }

    #[test]
    fn round_robin_two_jobs() {
        let inst = two_jobs();
        let out = run(&inst, &mut Fair).unwrap();
        assert!((out.completion[0] - 2.0).abs() < 1e-12);
        assert!((out.completion[1] - 3.0).abs() < 1e-12);
        assert!((out.total_cost - 5.0).abs() < 1e-12);
        assert!(check_delay_decomposition(&out, &inst, 1e-9));
        assert_eq!(out.delay(0, 1), 1.0);
        assert_eq!(out.delay(1, 0), 1.0);

        let mut corrupted = out.clone();
        *corrupted.delay_mut(0, 1) += 0.5;
        assert!(!check_delay_decomposition(&corrupted, &inst, 1e-9));
    }

    #[test]
    fn signal_logged_before_completion_and_suppressed_at_one() {
        let out = run(&two_jobs(), &mut Fair).unwrap();
        let kinds: Vec<_> = out.event_log.iter().map(|e| (e.time, e.kind.clone())).collect();
        assert_eq!(
            kinds,
            vec![
                (1.0, SimEventKind::SignalEmitted { job: 0, jump: 1 }),
                (2.0, SimEventKind::JobCompleted { job: 0 }),
                (3.0, SimEventKind::JobCompleted { job: 1 }),
            ]
        );
        assert_eq!(out.event_log[0].to_tsv(), "1\tsignal\t0\t1");
    }

    #[test]
    fn horizon_examples() {
        let inst = two_jobs();
        let state = SimState::new(&inst);
        let (t, kind) = next_event_horizon(&state, &[0.5, 0.5], &inst, None).unwrap();
        assert_eq!(t, 1.0);
        assert_eq!(kind, SimEventKind::SignalEmitted { job: 0, jump: 1 });

        let wake = Wake::timer(7.0, 3);
        let (t, kind) = next_event_horizon(&state, &[0.0, 0.0], &inst, Some(&wake)).unwrap();
        assert_eq!((t, kind), (7.0, SimEventKind::PolicyTimer { tag: 3 }));

        let mut done = state.clone();
        done.elapsed[1] = 2.0;
        let (t, kind) = next_event_horizon(&done, &[0.0, 1.0], &inst, None).unwrap();
        assert_eq!((t, kind), (0.0, SimEventKind::JobCompleted { job: 1 }));
    }

    #[test]
    fn timers_fire_and_idle_time_counts() {
        let inst = two_jobs();
        let out = run(&inst, &mut Sleeper).unwrap();
        assert_eq!(out.event_log[0].kind, SimEventKind::PolicyTimer { tag: 42 });
        assert_eq!(out.event_log[0].time, 7.0);
        assert!((out.completion[0] - 9.0).abs() < 1e-12);
        assert!((out.completion[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let inst = two_jobs();
        assert!(matches!(run(&inst, &mut Lazy), Err(Error::StalledPolicy(_))));
        assert!(matches!(run(&inst, &mut Greedy), Err(Error::InfeasibleRates(_))));
        assert!(matches!(
            run_fixed_step(&inst, &mut Lazy, 0.01),
            Err(Error::StalledPolicy(_))
        ));
        assert!(run_fixed_step(&inst, &mut Fair, 0.0).is_err());
        let multi = inst.clone().with_machines(2).unwrap();
        assert!(matches!(run(&multi, &mut Fair), Err(Error::MachineMismatch { .. })));
    }

    #[test]
    fn zero_threshold_signals_at_time_zero() {
        let bars = vec![StepProgressBar::new(vec![0.3, 0.6], vec![0.0, 0.0, 1.0]).unwrap()];
        let inst = Instance::new(vec![2.0], bars, 1).unwrap();
        let out = run(&inst, &mut Fair).unwrap();
        assert_eq!(
            out.event_log[0],
            SimEvent {
                time: 0.0,
                kind: SimEventKind::SignalEmitted { job: 0, jump: 1 }
            }
        );
        assert_eq!(out.event_log[1].kind, SimEventKind::SignalEmitted { job: 0, jump: 2 });
        assert_eq!(out.completion, vec![2.0]);
    }

    #[test]
    fn fixed_step_matches_round_robin() {
        let inst = two_jobs();
        let exact = run(&inst, &mut Fair).unwrap();
        let approx = run_fixed_step(&inst, &mut Fair, 1e-4).unwrap();
        for j in 0..2 {
            assert!((exact.completion[j] - approx.completion[j]).abs() <= 1e-3);
        }
        let single = Instance::from_sizes(vec![1.0]).unwrap();
        let out = run_fixed_step(&single, &mut Fair, 1e-3).unwrap();
        assert!(out.completion[0] >= 1.0 - 1e-12 && out.completion[0] <= 1.0 + 1e-3);
    }
}

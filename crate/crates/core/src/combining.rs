//! Choosing among candidate policies from a few sampled job pairs.
//!
//! Each candidate must come with a delay formula: `d(i, j)` as a function of
//! data known once both jobs finished. The combiner runs the jobs of
//! `m_pairs` random pairs to completion, scores each candidate by its
//! predicted pairwise delays on those pairs, and schedules everything else
//! with the lowest-scoring candidate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{run, Policy, SimState, Wake};
use crate::error::{Error, Result};
use crate::model::{Instance, ScheduleOutcome};
use crate::policies::PolicyConfig;
use crate::rng::rng_from_seed;

/// Round-robin delays each job by the smaller of the two sizes.
pub fn delay_oracle_rr(p_i: f64, p_j: f64) -> f64 {
    p_i.min(p_j)
}

/// Delay of `i` on `j` when each job runs alone as soon as it signals.
/// `signal_*` is the elapsed time at the signal (`beta * p`); equal signal
/// times go to the lower id.
pub fn delay_oracle_blind(i: usize, p_i: f64, signal_i: f64, j: usize, signal_j: f64) -> f64 {
    let i_first = signal_i < signal_j || (signal_i == signal_j && i < j);
    if i_first {
        p_i
    } else {
        signal_j
    }
}

/// Sequential schedule: `i` delays `j` fully iff it comes first.
pub fn delay_oracle_permutation(p_i: f64, pos_i: usize, pos_j: usize) -> f64 {
    if pos_i < pos_j {
        p_i
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelayOracle {
    RoundRobin,
    BlindFollow {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<usize>,
    },
    /// Positions of the jobs in the followed order.
    Permutation {
        positions: Vec<usize>,
    },
    /// `d(i, j) <= p_i`; scores are upper bounds, not exact delays.
    UpperBound,
}

impl DelayOracle {
    pub fn is_exact(&self) -> bool {
        !matches!(self, DelayOracle::UpperBound)
    }

    /// Combined delay `d(i,j) + d(j,i)`. `signals[j]` lists the elapsed
    /// times at which job `j` showed each jump.
    fn pair(&self, i: usize, j: usize, p: &[f64], signals: &[Vec<f64>]) -> f64 {
        match self {
            DelayOracle::RoundRobin => delay_oracle_rr(p[i], p[j]) + delay_oracle_rr(p[j], p[i]),
            DelayOracle::BlindFollow { level } => {
                let h = level.unwrap_or(1);
                let at = |k: usize| signals[k].get(h - 1).copied().unwrap_or(p[k]).min(p[k]);
                let (si, sj) = (at(i), at(j));
                delay_oracle_blind(i, p[i], si, j, sj) + delay_oracle_blind(j, p[j], sj, i, si)
            }
            DelayOracle::Permutation { positions } => {
                delay_oracle_permutation(p[i], positions[i], positions[j])
                    + delay_oracle_permutation(p[j], positions[j], positions[i])
            }
            DelayOracle::UpperBound => p[i] + p[j],
        }
    }
}

/// A policy together with the formula used to score it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub config: PolicyConfig,
    pub oracle: DelayOracle,
}

impl Candidate {
    /// Picks the delay formula matching `config`; policies without one are
    /// rejected unless `allow_upper_bound`.
    pub fn from_config(config: PolicyConfig, allow_upper_bound: bool) -> Result<Self> {
        let oracle = match &config {
            PolicyConfig::Rr => DelayOracle::RoundRobin,
            PolicyConfig::BlindFollow { level } => DelayOracle::BlindFollow { level: *level },
            PolicyConfig::FollowOrder { order } => {
                let mut positions = vec![usize::MAX; order.len()];
                for (k, &j) in order.iter().enumerate() {
                    if j >= order.len() {
                        return Err(Error::InvalidParameter(format!("order entry {j} out of range")));
                    }
                    positions[j] = k;
                }
                DelayOracle::Permutation { positions }
            }
            _ if allow_upper_bound => DelayOracle::UpperBound,
            other => return Err(Error::NoDelayOracle(other.to_json())),
        };
        Ok(Self { config, oracle })
    }
}

/// `max(1, ceil(n^(2/3) (ln g)^(1/3) / 8))`.
pub fn default_m_pairs(n: usize, g: f64) -> usize {
    let ln_g = g.max(1.0).ln();
    let x = (n as f64).powf(2.0 / 3.0) * ln_g.cbrt() / 8.0;
    ((x - 1e-9).ceil() as usize).max(1)
}

/// What the combiner saw and chose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombineReport {
    pub m_pairs: usize,
    pub pairs: Vec<(usize, usize)>,
    pub scores: Vec<f64>,
    pub chosen: usize,
    pub exact: Vec<bool>,
    /// Sampled pairs are drawn with replacement.
    pub with_replacement: bool,
}

pub struct Combining {
    candidates: Vec<Candidate>,
    m_pairs: Option<usize>,
    seed: u64,
    policies: Vec<Box<dyn Policy>>,
    pairs: Vec<(usize, usize)>,
    sampled: Vec<usize>,
    signals: Vec<Vec<f64>>,
    scores: Vec<f64>,
    chosen: Option<usize>,
    start: f64,
    shifted: Option<SimState>,
}

impl Combining {
    pub fn new(candidates: Vec<Candidate>, m_pairs: Option<usize>, seed: u64) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidParameter("no candidate policies".into()));
        }
        if m_pairs == Some(0) {
            return Err(Error::InvalidParameter("m_pairs must be at least 1".into()));
        }
        Ok(Self {
            candidates,
            m_pairs,
            seed,
            policies: Vec::new(),
            pairs: Vec::new(),
            sampled: Vec::new(),
            signals: Vec::new(),
            scores: Vec::new(),
            chosen: None,
            start: 0.0,
            shifted: None,
        })
    }

    /// Available once the run has moved past the sampling phase.
    pub fn report(&self) -> Option<CombineReport> {
        self.chosen.map(|chosen| CombineReport {
            m_pairs: self.pairs.len(),
            pairs: self.pairs.clone(),
            scores: self.scores.clone(),
            chosen,
            exact: self.candidates.iter().map(|c| c.oracle.is_exact()).collect(),
            with_replacement: true,
        })
    }

    fn record_signals(&mut self, state: &SimState) {
        for j in state.alive_ids() {
            while self.signals[j].len() < state.signals_seen[j] {
                self.signals[j].push(state.elapsed[j]);
            }
        }
    }

    fn choose(&mut self, state: &SimState) {
        // Sampled jobs are complete, so their sizes are now known.
        let p = &state.elapsed;
        self.scores = self
            .candidates
            .iter()
            .map(|c| {
                self.pairs
                    .iter()
                    .map(|&(u, v)| c.oracle.pair(u, v, p, &self.signals))
                    .sum()
            })
            .collect();
        let mut best = 0;
        for (h, &s) in self.scores.iter().enumerate() {
            if s < self.scores[best] {
                best = h;
            }
        }
        self.chosen = Some(best);
        self.start = state.now;
    }
}

impl Policy for Combining {
    fn name(&self) -> String {
        "combining".into()
    }

    fn init(&mut self, instance: &Instance) -> Result<()> {
        let n = instance.len();
        if n < 2 {
            return Err(Error::NeedTwoJobs);
        }
        self.policies = self
            .candidates
            .iter()
            .map(|c| {
                let mut policy = c.config.build(instance)?;
                if policy.machines() != instance.machines() {
                    return Err(Error::MachineMismatch {
                        policy: policy.machines(),
                        instance: instance.machines(),
                    });
                }
                policy.init(instance)?;
                Ok(policy)
            })
            .collect::<Result<_>>()?;
        for c in &self.candidates {
            if let DelayOracle::Permutation { positions } = &c.oracle {
                if positions.len() != n {
                    return Err(Error::InvalidParameter("order length differs from job count".into()));
                }
            }
        }

        let m = self
            .m_pairs
            .unwrap_or_else(|| default_m_pairs(n, self.candidates.len() as f64));
        let mut rng = rng_from_seed(self.seed);
        self.pairs = (0..m)
            .map(|_| {
                let u = rng.random_range(0..n);
                let mut v = rng.random_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                (u.min(v), u.max(v))
            })
            .collect();
        self.sampled = self.pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        self.sampled.sort_unstable();
        self.sampled.dedup();
        self.signals = vec![Vec::new(); n];
        self.scores.clear();
        self.chosen = None;
        self.start = 0.0;
        self.shifted = None;
        Ok(())
    }

    fn decide(&mut self, state: &SimState, rates: &mut [f64]) -> Option<Wake> {
        if self.chosen.is_none() {
            self.record_signals(state);
            if let Some(&j) = self.sampled.iter().find(|&&j| state.alive[j]) {
                rates[j] = 1.0;
                return None;
            }
            self.choose(state);
        }
        let chosen = self.chosen.expect("chosen after sampling");
        let shifted = self.shifted.get_or_insert_with(|| state.clone());
        shifted.clone_from(state);
        shifted.now = state.now - self.start;
        let start = self.start;
        self.policies[chosen]
            .decide(shifted, rates)
            .map(|w| Wake { at: w.at + start, ..w })
    }

    fn finish(&mut self, state: &SimState) {
        if self.chosen.is_none() {
            self.record_signals(state);
            self.choose(state);
        }
    }
}

/// Scores every candidate on all `n(n-1)/2` pairs using the true sizes and
/// the signal times implied by the bars, and returns the lowest-scoring
/// index (ties to the first) with the scores. Each score is
/// `A^(h) - sum_j p_j` when the oracle is exact.
pub fn all_pairs_choice(instance: &Instance, candidates: &[Candidate]) -> Result<(usize, Vec<f64>)> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate policies".into()));
    }
    let n = instance.len();
    if n < 2 {
        return Err(Error::NeedTwoJobs);
    }
    let p = instance.sizes();
    let signals: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let th = instance.bar(j).thresholds();
            th[..th.len() - 1].iter().map(|b| b * p[j]).collect()
        })
        .collect();
    let scores: Vec<f64> = candidates
        .iter()
        .map(|c| {
            (0..n)
                .flat_map(|j| (0..j).map(move |i| (i, j)))
                .map(|(i, j)| c.oracle.pair(i, j, &p, &signals))
                .sum()
        })
        .collect();
    let mut best = 0;
    for (h, &s) in scores.iter().enumerate() {
        if s < scores[best] {
            best = h;
        }
    }
    Ok((best, scores))
}

/// Runs the combiner and returns the outcome with its selection report.
pub fn combine(
    instance: &Instance,
    candidates: Vec<Candidate>,
    m_pairs: Option<usize>,
    seed: u64,
) -> Result<(ScheduleOutcome, CombineReport)> {
    let mut policy = Combining::new(candidates, m_pairs, seed)?;
    let outcome = run(instance, &mut policy)?;
    let report = policy.report().expect("every sampled job completes");
    Ok((outcome, report))
}

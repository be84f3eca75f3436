//! Scheduling policies and their JSON configuration.

mod baselines;
mod etc;
mod multi;
mod single_signal;
mod time_sharing;

use serde::{Deserialize, Serialize};

pub use baselines::{FollowOrder, RoundRobin, Setf, Spt};
pub use etc::{tuned_k, GenericEtc, RepeatedEtc};
pub use multi::MultiMachine;
pub use single_signal::{Alg1, BlindFollow};
pub use time_sharing::TimeSharing;

use crate::combining::{Candidate, Combining};
use crate::engine::{run, Policy};
use crate::error::Result;
use crate::model::{Instance, ScheduleOutcome};

/// Serializable policy description, e.g. `{"variant":"Alg1","alpha":0.5,"rho":1}`.
///
/// `level` selects which bar jump acts as the signal for single-signal
/// policies; it defaults to the only jump of granularity-1 bars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum PolicyConfig {
    #[serde(rename = "SPT")]
    Spt,
    #[serde(rename = "RR")]
    Rr,
    #[serde(rename = "SETF")]
    Setf,
    BlindFollow {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<usize>,
    },
    Alg1 {
        alpha: f64,
        rho: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<usize>,
    },
    TimeSharing {
        lambda: f64,
        inner_a: Box<PolicyConfig>,
        inner_b: Box<PolicyConfig>,
    },
    #[serde(rename = "RepeatedETC")]
    RepeatedEtc {
        k: usize,
        g: usize,
    },
    /// Without a threshold, `min(1, g^(-1/3))` for the instance's `g`.
    #[serde(rename = "GenericETC")]
    GenericEtc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        threshold_fraction: Option<f64>,
    },
    /// `m` defaults to the instance's machine count.
    MultiMachinePrefExec {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<usize>,
    },
    FollowOrder {
        order: Vec<usize>,
    },
    /// Samples `m_pairs` job pairs, scores the candidates on them and hands
    /// the remaining jobs to the best one.
    Combining {
        candidates: Vec<PolicyConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_pairs: Option<usize>,
        #[serde(default)]
        seed: u64,
        /// Admit candidates without an exact delay formula, scored by the
        /// trivial bound `d(i,j) <= p_i`.
        #[serde(default)]
        allow_upper_bound: bool,
    },
}

impl PolicyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policy config serializes")
    }

    /// Builds a fresh policy; defaults that depend on the instance are
    /// resolved here.
    pub fn build(&self, instance: &Instance) -> Result<Box<dyn Policy>> {
        Ok(match self {
            PolicyConfig::Spt => Box::new(Spt::default()),
            PolicyConfig::Rr => Box::new(RoundRobin),
            PolicyConfig::Setf => Box::new(Setf),
            PolicyConfig::BlindFollow { level } => Box::new(BlindFollow::new(*level)),
            PolicyConfig::Alg1 { alpha, rho, level } => Box::new(Alg1::new(*alpha, *rho, *level)?),
            PolicyConfig::TimeSharing {
                lambda,
                inner_a,
                inner_b,
            } => {
                let single = instance.clone().with_machines(1)?;
                Box::new(TimeSharing::new(
                    *lambda,
                    inner_a.build(&single)?,
                    inner_b.build(&single)?,
                )?)
            }
            PolicyConfig::RepeatedEtc { k, g } => Box::new(RepeatedEtc::new(*k, *g)?),
            PolicyConfig::GenericEtc { threshold_fraction } => {
                let t = threshold_fraction.unwrap_or_else(|| GenericEtc::default_threshold(instance.granularity()));
                Box::new(GenericEtc::new(t)?)
            }
            PolicyConfig::MultiMachinePrefExec { alpha, m, level } => {
                Box::new(MultiMachine::new(*alpha, m.unwrap_or(instance.machines()), *level)?)
            }
            PolicyConfig::FollowOrder { order } => Box::new(FollowOrder::new(order.clone())),
            PolicyConfig::Combining {
                candidates,
                m_pairs,
                seed,
                allow_upper_bound,
            } => {
                let candidates = candidates
                    .iter()
                    .map(|c| Candidate::from_config(c.clone(), *allow_upper_bound))
                    .collect::<Result<Vec<_>>>()?;
                Box::new(Combining::new(candidates, *m_pairs, *seed)?)
            }
        })
    }
}

/// Builds and runs `config` on `instance`.
pub fn simulate(instance: &Instance, config: &PolicyConfig) -> Result<ScheduleOutcome> {
    let mut policy = config.build(instance)?;
    run(instance, &mut policy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    Spt,
    RoundRobin,
    Setf,
}

pub fn simulate_baseline(instance: &Instance, baseline: Baseline) -> Result<ScheduleOutcome> {
    match baseline {
        Baseline::Spt => run(instance, &mut Spt::default()),
        Baseline::RoundRobin => run(instance, &mut RoundRobin),
        Baseline::Setf => run(instance, &mut Setf),
    }
}

pub fn simulate_blind_follow(instance: &Instance) -> Result<ScheduleOutcome> {
    run(instance, &mut BlindFollow::default())
}

pub fn simulate_alg1(instance: &Instance, alpha: f64, rho: f64) -> Result<ScheduleOutcome> {
    run(instance, &mut Alg1::new(alpha, rho, None)?)
}

pub fn simulate_time_sharing(
    instance: &Instance,
    lambda: f64,
    inner_a: &PolicyConfig,
    inner_b: &PolicyConfig,
) -> Result<ScheduleOutcome> {
    let config = PolicyConfig::TimeSharing {
        lambda,
        inner_a: Box::new(inner_a.clone()),
        inner_b: Box::new(inner_b.clone()),
    };
    simulate(instance, &config)
}

pub fn simulate_repeated_etc(instance: &Instance, k: usize, g: usize) -> Result<ScheduleOutcome> {
    run(instance, &mut RepeatedEtc::new(k, g)?)
}

/// `threshold` defaults to `min(1, g^(-1/3))`.
pub fn simulate_generic_etc(instance: &Instance, threshold: Option<f64>) -> Result<ScheduleOutcome> {
    simulate(
        instance,
        &PolicyConfig::GenericEtc {
            threshold_fraction: threshold,
        },
    )
}

pub fn simulate_multimachine(instance: &Instance, alpha: f64, m: usize) -> Result<ScheduleOutcome> {
    run(instance, &mut MultiMachine::new(alpha, m, None)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bars::accurate_bar;

    #[test]
    fn config_json_round_trip() {
        let configs = [
            r#"{"variant":"RR"}"#,
            r#"{"variant":"SPT"}"#,
            r#"{"variant":"Alg1","alpha":0.5,"rho":1.0}"#,
            r#"{"variant":"TimeSharing","lambda":0.25,"inner_a":{"variant":"BlindFollow"},"inner_b":{"variant":"RR"}}"#,
            r#"{"variant":"RepeatedETC","k":5,"g":12}"#,
            r#"{"variant":"MultiMachinePrefExec","alpha":0.5,"m":2}"#,
        ];
        for text in configs {
            let config = PolicyConfig::from_json(text).unwrap();
            assert_eq!(PolicyConfig::from_json(&config.to_json()).unwrap(), config);
        }
        assert!(PolicyConfig::from_json(r#"{"variant":"Nope"}"#).is_err());
        assert!(PolicyConfig::from_json(r#"{"variant":"Alg1","alpha":0.5}"#).is_err());
    }

    #[test]
    fn simulate_helpers_agree_with_configs() {
        let inst = Instance::from_sizes(vec![1.0, 2.0, 0.5])
            .unwrap()
            .with_bars(vec![accurate_bar(0.5).unwrap(); 3])
            .unwrap();
        let a = simulate_alg1(&inst, 0.5, 0.5).unwrap();
        let b = simulate(
            &inst,
            &PolicyConfig::Alg1 {
                alpha: 0.5,
                rho: 0.5,
                level: None,
            },
        )
        .unwrap();
        assert_eq!(a.completion, b.completion);
        assert_eq!(
            simulate_baseline(&inst, Baseline::Spt).unwrap().total_cost,
            crate::model::opt_cost(&inst).unwrap()
        );
        assert!(simulate_multimachine(&inst, 0.5, 1).is_ok());
        assert!(simulate_blind_follow(&inst).is_ok());
        assert!(simulate_generic_etc(&inst, None).is_ok());
    }
}

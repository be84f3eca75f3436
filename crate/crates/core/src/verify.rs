//! Invariant suites run by `progbar-sched verify`.
//!
//! Each suite returns a list of named checks. A suite passes when every
//! check does; failing checks carry the seed needed to reproduce them.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bars::{poisson_bar, poisson_points};
use crate::combining::{all_pairs_choice, combine, Candidate};
use crate::engine::{run, run_fixed_step};
use crate::error::{Error, Result};
use crate::experiments::{
    aggregate, brittleness_instance, check_high_probability_etc, gen_pareto_instance, pareto_sizes, run_figure,
    with_accurate_bars, with_single_signal_bars, ExperimentConfig, Summary, DEFAULT_PARETO_SHAPE,
};
use crate::model::{check_delay_decomposition, delay_decomposition_total, error_terms, opt_cost, Instance};
use crate::policies::{simulate, Alg1, MultiMachine, PolicyConfig, RoundRobin};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub property: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(property: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            property: property.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const SUITES: [&str; 11] = [
    "decomposition",
    "engine_oracle",
    "consistency",
    "robustness",
    "smoothness",
    "brittleness",
    "combining",
    "stochastic",
    "poisson",
    "high_probability",
    "figures",
];

/// Runs one suite at its default size.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match name {
        "decomposition" => decomposition(seed, 500)?,
        "engine_oracle" => engine_oracle(seed, 50, 1e-4)?,
        "consistency" => consistency(seed, 100, 50)?,
        "robustness" => robustness(seed, 500, 50)?,
        "smoothness" => smoothness(seed, 500, 50)?,
        "brittleness" => brittleness()?,
        "combining" => combining(seed, 200, 64, 200)?,
        "stochastic" => stochastic(seed, 200, 50)?,
        "poisson" => poisson(seed, 100_000)?,
        "high_probability" => high_probability(seed)?,
        "figures" => figures(seed)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite {other:?} (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Policy names accepted by [`zoo_case`].
pub const POLICY_ZOO: [&str; 11] = [
    "SPT",
    "RR",
    "SETF",
    "BlindFollow",
    "Alg1",
    "TimeSharing",
    "RepeatedETC",
    "GenericETC",
    "MultiMachinePrefExec",
    "FollowOrder",
    "Combining",
];

/// Random bars and parameters for one policy on the given sizes.
///
/// Single-signal bars use a random level in {0.25, 0.5, 0.9} and uniform
/// thresholds; the ETC policies get Poisson bars with `g` in 1..=6.
/// Only MultiMachine uses more than one machine (up to `max_machines`).
pub fn zoo_case(policy: &str, sizes: Vec<f64>, max_machines: usize, seed: u64) -> Result<(Instance, PolicyConfig)> {
    let mut rng = rng_from_seed(seed);
    let n = sizes.len();
    let base = Instance::from_sizes(sizes)?;
    let alpha = [0.25, 0.5, 0.9][rng.random_range(0..3)];
    let betas: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                alpha
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    let single = with_single_signal_bars(&base, alpha, &betas)?;
    let mut shuffled: Vec<usize> = (0..n).collect();
    shuffled.shuffle(&mut rng);
    let rho = [0.1, 0.5, 1.0][rng.random_range(0..3)];

    let poisson = |rng: &mut crate::rng::Rng, g: usize| -> Result<Instance> {
        let bars = (0..n).map(|_| poisson_bar(g, rng)).collect::<Result<Vec<_>>>()?;
        base.with_bars(bars)
    };

    Ok(match policy {
        "SPT" => (single, PolicyConfig::Spt),
        "RR" => (single, PolicyConfig::Rr),
        "SETF" => (single, PolicyConfig::Setf),
        "BlindFollow" => (single, PolicyConfig::BlindFollow { level: None }),
        "Alg1" => (
            single,
            PolicyConfig::Alg1 {
                alpha,
                rho,
                level: None,
            },
        ),
        "TimeSharing" => {
            let lambda = [1.0 / 3.0, 0.5, 0.8][rng.random_range(0..3)];
            let config = PolicyConfig::TimeSharing {
                lambda,
                inner_a: Box::new(PolicyConfig::Alg1 {
                    alpha,
                    rho,
                    level: None,
                }),
                inner_b: Box::new(PolicyConfig::Rr),
            };
            (single, config)
        }
        "RepeatedETC" => {
            let g = rng.random_range(1..=6);
            let k = rng.random_range(1..=g + 1);
            (poisson(&mut rng, g)?, PolicyConfig::RepeatedEtc { k, g })
        }
        "GenericETC" => {
            let g = rng.random_range(1..=6);
            (
                poisson(&mut rng, g)?,
                PolicyConfig::GenericEtc {
                    threshold_fraction: None,
                },
            )
        }
        "MultiMachinePrefExec" => {
            let m = rng.random_range(1..=max_machines.max(1));
            let config = PolicyConfig::MultiMachinePrefExec {
                alpha,
                m: None,
                level: None,
            };
            (single.with_machines(m)?, config)
        }
        "FollowOrder" => (single, PolicyConfig::FollowOrder { order: shuffled }),
        "Combining" => {
            let config = PolicyConfig::Combining {
                candidates: vec![
                    PolicyConfig::Rr,
                    PolicyConfig::FollowOrder { order: shuffled },
                    PolicyConfig::BlindFollow { level: None },
                ],
                m_pairs: Some(rng.random_range(1..=3)),
                seed: rng.random(),
                allow_upper_bound: false,
            };
            (single, config)
        }
        other => return Err(Error::InvalidParameter(format!("unknown policy {other:?}"))),
    })
}

/// `ALG = sum p + sum_{i<j} (d(i,j) + d(j,i))` on single-machine runs that
/// cycle through every policy.
pub fn decomposition(seed: u64, runs: usize) -> Result<Vec<Check>> {
    let results: Vec<(usize, u64, f64)> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let case_seed = derive_seed(seed, &[r as u64]);
            let mut rng = rng_from_seed(case_seed);
            let n = rng.random_range(2..=30);
            let sizes = pareto_sizes(n, DEFAULT_PARETO_SHAPE, &mut rng);
            let idx = r % POLICY_ZOO.len();
            let (inst, config) = zoo_case(POLICY_ZOO[idx], sizes, 1, derive_seed(case_seed, &[1]))?;
            let out = simulate(&inst, &config)?;
            let rel = if check_delay_decomposition(&out, &inst, 1e-9) {
                0.0
            } else {
                (out.total_cost - delay_decomposition_total(&out, &inst)).abs() / out.total_cost
            };
            Ok((idx, case_seed, rel))
        })
        .collect::<Result<_>>()?;

    Ok(POLICY_ZOO
        .iter()
        .enumerate()
        .map(|(idx, name)| {
            let mine: Vec<&(usize, u64, f64)> = results.iter().filter(|r| r.0 == idx).collect();
            let bad: Vec<u64> = mine.iter().filter(|r| r.2 > 0.0).map(|r| r.1).collect();
            let detail = if bad.is_empty() {
                format!("{} runs within 1e-9 relative", mine.len())
            } else {
                format!("{} of {} runs off; first case seed {}", bad.len(), mine.len(), bad[0])
            };
            Check::new(format!("decomposition[{name}]"), bad.is_empty(), detail)
        })
        .collect())
}

/// Event engine against the fixed-step simulator: max per-job completion
/// time difference at most 1e-2.
pub fn engine_oracle(seed: u64, per_policy: usize, dt: f64) -> Result<Vec<Check>> {
    POLICY_ZOO
        .iter()
        .enumerate()
        .map(|(idx, name)| {
            let errs: Vec<(u64, f64)> = (0..per_policy)
                .into_par_iter()
                .map(|c| {
                    let case_seed = derive_seed(seed, &[idx as u64, c as u64]);
                    let mut rng = rng_from_seed(case_seed);
                    let n = rng.random_range(2..=8);
                    let sizes: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
                    let (inst, config) = zoo_case(name, sizes, 3, derive_seed(case_seed, &[1]))?;
                    let exact = run(&inst, &mut config.build(&inst)?)?;
                    let stepped = run_fixed_step(&inst, &mut config.build(&inst)?, dt)?;
                    let err = exact
                        .completion
                        .iter()
                        .zip(&stepped.completion)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    Ok((case_seed, err))
                })
                .collect::<Result<_>>()?;
            let (worst_seed, worst) = errs
                .iter()
                .copied()
                .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            Ok(Check::new(
                format!("engine_oracle[{name}]"),
                worst <= 1e-2,
                format!(
                    "{} instances, max completion error {worst:.3e} (case seed {worst_seed})",
                    errs.len()
                ),
            ))
        })
        .collect()
}

/// Worst `ALG / bound` over the runs and the seed that produced it.
#[derive(Clone, Copy)]
struct Worst {
    ratio: f64,
    seed: u64,
}

impl Worst {
    fn new() -> Self {
        Self { ratio: 0.0, seed: 0 }
    }

    fn merge(self, other: Self) -> Self {
        if other.ratio > self.ratio {
            other
        } else {
            self
        }
    }

    fn check(self, property: String, runs: usize) -> Check {
        Check::new(
            property,
            self.ratio <= 1.0 + 1e-9,
            format!("{runs} runs, worst ALG/bound {:.6} (seed {})", self.ratio, self.seed),
        )
    }
}

/// Accurate bars at alpha: BlindFollow, Alg1 and MultiMachine stay within
/// `(1 + alpha) OPT`.
pub fn consistency(seed: u64, instances: usize, n: usize) -> Result<Vec<Check>> {
    let rhos = [0.1, 0.5, 1.0];
    let machines = [2, 3];
    let mut checks = Vec::new();
    for alpha in [0.25, 0.5, 0.9] {
        let per: Vec<Vec<Worst>> = (0..instances)
            .into_par_iter()
            .map(|i| {
                let s = derive_seed(seed, &[i as u64]);
                let inst = with_accurate_bars(&gen_pareto_instance(n, DEFAULT_PARETO_SHAPE, s)?, alpha)?;
                let bound = (1.0 + alpha) * opt_cost(&inst)?;
                let mut row = Vec::new();
                let blind = simulate(&inst, &PolicyConfig::BlindFollow { level: None })?;
                row.push(Worst {
                    ratio: blind.total_cost / bound,
                    seed: s,
                });
                for rho in rhos {
                    let out = run(&inst, &mut Alg1::new(alpha, rho, None)?)?;
                    row.push(Worst {
                        ratio: out.total_cost / bound,
                        seed: s,
                    });
                }
                for m in machines {
                    let multi = inst.clone().with_machines(m)?;
                    let out = run(&multi, &mut MultiMachine::new(alpha, m, None)?)?;
                    let bound = (1.0 + alpha) * opt_cost(&multi)?;
                    row.push(Worst {
                        ratio: out.total_cost / bound,
                        seed: s,
                    });
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let mut labels = vec!["blind_follow".to_string()];
        labels.extend(rhos.iter().map(|r| format!("alg1(rho={r})")));
        labels.extend(machines.iter().map(|m| format!("multi_machine(m={m})")));
        for (k, label) in labels.into_iter().enumerate() {
            let worst = per.iter().map(|row| row[k]).fold(Worst::new(), Worst::merge);
            checks.push(worst.check(format!("consistency[{label}, alpha={alpha}]"), instances));
        }
    }
    Ok(checks)
}

fn uniform_trial(seed: u64, t: usize, n: usize, alpha: f64) -> Result<(Instance, Vec<f64>, u64)> {
    let s = derive_seed(seed, &[t as u64]);
    let base = gen_pareto_instance(n, DEFAULT_PARETO_SHAPE, s)?;
    let mut rng = rng_from_seed(derive_seed(s, &[1]));
    let betas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    Ok((with_single_signal_bars(&base, alpha, &betas)?, betas, s))
}

/// Uniformly random thresholds at alpha = 0.5: Alg1 within
/// `1 + 1/(rho alpha)`, MultiMachine within `1 + 1/alpha`, RR within 2.
pub fn robustness(seed: u64, trials: usize, n: usize) -> Result<Vec<Check>> {
    let alpha = 0.5;
    let rhos = [0.5, 1.0];
    let machines = [1, 2, 3];
    let per: Vec<Vec<Worst>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (inst, _, s) = uniform_trial(seed, t, n, alpha)?;
            let opt = opt_cost(&inst)?;
            let mut row = Vec::new();
            for rho in rhos {
                let out = run(&inst, &mut Alg1::new(alpha, rho, None)?)?;
                row.push(Worst {
                    ratio: out.total_cost / ((1.0 + 1.0 / (rho * alpha)) * opt),
                    seed: s,
                });
            }
            for m in machines {
                let multi = inst.clone().with_machines(m)?;
                let out = run(&multi, &mut MultiMachine::new(alpha, m, None)?)?;
                row.push(Worst {
                    ratio: out.total_cost / ((1.0 + 1.0 / alpha) * opt_cost(&multi)?),
                    seed: s,
                });
            }
            let out = run(&inst, &mut RoundRobin)?;
            row.push(Worst {
                ratio: out.total_cost / (2.0 * opt),
                seed: s,
            });
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut labels: Vec<String> = rhos.iter().map(|r| format!("alg1(rho={r})")).collect();
    labels.extend(machines.iter().map(|m| format!("multi_machine(m={m})")));
    labels.push("rr".into());
    Ok(labels
        .into_iter()
        .enumerate()
        .map(|(k, label)| {
            let worst = per.iter().map(|row| row[k]).fold(Worst::new(), Worst::merge);
            worst.check(format!("robustness[{label}]"), trials)
        })
        .collect())
}

/// Same trials as [`robustness`]: Alg1 with rho in {0.1, 0.5} stays within
/// `(1 + alpha) OPT + 2n / (rho (1 - rho) alpha^2) sum |beta_i - alpha| p_i`.
pub fn smoothness(seed: u64, trials: usize, n: usize) -> Result<Vec<Check>> {
    let alpha = 0.5;
    let rhos = [0.1, 0.5];
    let per: Vec<Vec<Worst>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (inst, betas, s) = uniform_trial(seed, t, n, alpha)?;
            let opt = opt_cost(&inst)?;
            let l1 = error_terms(&inst, alpha, &betas)?.l1;
            rhos.iter()
                .map(|&rho| {
                    let out = run(&inst, &mut Alg1::new(alpha, rho, None)?)?;
                    let bound = (1.0 + alpha) * opt + 2.0 * n as f64 / (rho * (1.0 - rho) * alpha * alpha) * l1;
                    Ok(Worst {
                        ratio: out.total_cost / bound,
                        seed: s,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rhos
        .iter()
        .enumerate()
        .map(|(k, rho)| {
            let worst = per.iter().map(|row| row[k]).fold(Worst::new(), Worst::merge);
            worst.check(format!("smoothness[alg1(rho={rho})]"), trials)
        })
        .collect())
}

/// Signals slightly early on every job: rho = 1 loses a factor 2, rho = 0.1
/// does not. The small instance is cross-checked with the fixed-step
/// simulator.
pub fn brittleness() -> Result<Vec<Check>> {
    let alpha = 0.5;
    let inst = brittleness_instance(alpha, 200, 1e-4)?;
    let opt = opt_cost(&inst)?;
    let betas = inst.single_signal_betas().expect("single-signal bars");
    let l1 = error_terms(&inst, alpha, &betas)?.l1;
    let total: f64 = inst.sizes().iter().sum();
    let ratio = |rho: f64| -> Result<f64> { Ok(run(&inst, &mut Alg1::new(alpha, rho, None)?)?.total_cost / opt) };
    let (r1, r01) = (ratio(1.0)?, ratio(0.1)?);

    let small = brittleness_instance(alpha, 10, 1e-4)?;
    let mut worst = 0.0_f64;
    for rho in [1.0, 0.1] {
        let a = run(&small, &mut Alg1::new(alpha, rho, None)?)?;
        let b = run_fixed_step(&small, &mut Alg1::new(alpha, rho, None)?, 1e-4)?;
        for (x, y) in a.completion.iter().zip(&b.completion) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(vec![
        Check::new("brittleness[rho=1 ratio >= 2]", r1 >= 2.0, format!("ratio {r1:.6}")),
        Check::new(
            "brittleness[small deviation]",
            l1 <= 0.04 * total,
            format!("sum |beta - alpha| p = {l1:.3e}, sum p = {total}"),
        ),
        Check::new(
            "brittleness[rho=0.1 ratio <= 1.6]",
            r01 <= 1.6,
            format!("ratio {r01:.6}"),
        ),
        Check::new(
            "brittleness[fixed-step agreement, m_half=10]",
            worst <= 1e-2,
            format!("max completion error {worst:.3e}"),
        ),
    ])
}

/// Mean regret of the combiner over `seeds` runs, the per-run sampling
/// bound, and exact selection when every pair is scored.
pub fn combining(seed: u64, seeds: usize, n: usize, cases: usize) -> Result<Vec<Check>> {
    let runs: Vec<(f64, f64, f64, bool)> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let inst = gen_pareto_instance(n, DEFAULT_PARETO_SHAPE, derive_seed(seed, &[s as u64]))?;
            let configs = [
                PolicyConfig::Rr,
                PolicyConfig::FollowOrder {
                    order: inst.spt_order(),
                },
            ];
            let costs: Vec<f64> = configs
                .iter()
                .map(|c| Ok(simulate(&inst, c)?.total_cost))
                .collect::<Result<_>>()?;
            let candidates = configs
                .iter()
                .map(|c| Candidate::from_config(c.clone(), false))
                .collect::<Result<Vec<_>>>()?;
            let (out, report) = combine(&inst, candidates, None, derive_seed(seed, &[s as u64, 1]))?;
            let max_p = inst.sizes().iter().cloned().fold(0.0, f64::max);
            let best = costs.iter().cloned().fold(f64::INFINITY, f64::min);
            let regret_term = 2.25 * (n as f64).powf(5.0 / 3.0) * (configs.len() as f64).ln().cbrt() * max_p;
            let sampling_ok = out.total_cost
                <= (costs[report.chosen] + 2.0 * report.m_pairs as f64 * n as f64 * max_p) * (1.0 + 1e-9);
            Ok((out.total_cost, best, best + regret_term, sampling_ok))
        })
        .collect::<Result<_>>()?;
    let k = runs.len() as f64;
    let mean_alg = runs.iter().map(|r| r.0).sum::<f64>() / k;
    let mean_best = runs.iter().map(|r| r.1).sum::<f64>() / k;
    let mean_bound = runs.iter().map(|r| r.2).sum::<f64>() / k;
    let sampling_bad = runs.iter().filter(|r| !r.3).count();

    let picks: Vec<(u64, bool)> = (0..cases)
        .into_par_iter()
        .map(|c| {
            let s = derive_seed(seed, &[c as u64, 2]);
            let mut rng = rng_from_seed(s);
            let n = rng.random_range(2..=12);
            let sizes = pareto_sizes(n, DEFAULT_PARETO_SHAPE, &mut rng);
            let (inst, _) = zoo_case("BlindFollow", sizes, 1, derive_seed(s, &[1]))?;
            let mut shuffled: Vec<usize> = (0..n).collect();
            shuffled.shuffle(&mut rng);
            let configs = [
                PolicyConfig::Rr,
                PolicyConfig::FollowOrder {
                    order: inst.spt_order(),
                },
                PolicyConfig::FollowOrder { order: shuffled },
                PolicyConfig::BlindFollow { level: None },
            ];
            let candidates = configs
                .iter()
                .map(|c| Candidate::from_config(c.clone(), false))
                .collect::<Result<Vec<_>>>()?;
            let (chosen, _) = all_pairs_choice(&inst, &candidates)?;
            let costs: Vec<f64> = configs
                .iter()
                .map(|c| Ok(simulate(&inst, c)?.total_cost))
                .collect::<Result<_>>()?;
            let best = costs.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok((s, costs[chosen] <= best * (1.0 + 1e-9)))
        })
        .collect::<Result<_>>()?;
    let wrong: Vec<u64> = picks.iter().filter(|p| !p.1).map(|p| p.0).collect();

    Ok(vec![
        Check::new(
            "combining[mean regret bound]",
            mean_alg <= mean_bound,
            format!("{seeds} seeds, mean ALG {mean_alg:.1}, mean min_h A {mean_best:.1}, mean bound {mean_bound:.1}"),
        ),
        Check::new(
            "combining[ALG <= A(chosen) + 2 m n max p]",
            sampling_bad == 0,
            format!("{sampling_bad} of {seeds} runs above"),
        ),
        Check::new(
            "combining[all-pairs selection is argmin]",
            wrong.is_empty(),
            match wrong.first() {
                None => format!("{cases} instances"),
                Some(s) => format!("{} of {cases} wrong; first case seed {s}", wrong.len()),
            },
        ),
    ])
}

fn summaries_for<'a>(summaries: &'a [Summary], algorithm: &str) -> Vec<&'a Summary> {
    summaries.iter().filter(|s| s.algorithm == algorithm).collect()
}

/// Looks up `key=value` in a `;`-separated parameter string.
fn param<'a>(params: &'a str, key: &str) -> Option<&'a str> {
    params.split(';').find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
}

/// Tuned repeated ETC on Poisson bars: mean ratio within `1 + (12/g)^(1/3)`
/// and nonincreasing in g up to two pooled standard errors.
pub fn stochastic(seed: u64, trials: usize, n: usize) -> Result<Vec<Check>> {
    let config = ExperimentConfig {
        n,
        trials,
        master_seed: seed,
        sweep: vec![12.0, 48.0, 192.0],
        ..ExperimentConfig::preset("stochastic")?
    };
    let summaries = aggregate(&run_figure(&config, None)?);
    let tuned = summaries_for(&summaries, "etc_tuned");
    let mut checks: Vec<Check> = tuned
        .iter()
        .map(|s| {
            let bound = 1.0 + (12.0 / s.x).cbrt();
            Check::new(
                format!("stochastic[g={} mean ratio bound]", s.x),
                s.mean <= bound,
                format!("mean {:.4} (std {:.4}), bound {bound:.4}", s.mean, s.std),
            )
        })
        .collect();
    for w in tuned.windows(2) {
        let se = |s: &Summary| s.std / (s.trials as f64).sqrt();
        let slack = 2.0 * (se(w[0]).powi(2) + se(w[1]).powi(2)).sqrt();
        checks.push(Check::new(
            format!("stochastic[nonincreasing g={} -> g={}]", w[0].x, w[1].x),
            w[1].mean <= w[0].mean + slack,
            format!("{:.4} -> {:.4}, slack {slack:.4}", w[0].mean, w[1].mean),
        ));
    }
    Ok(checks)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Poisson bars: elapsed time at the k-th jump averages `(k/g) p` and the
/// jump count at progress x averages `g x`, both within 3 standard errors.
pub fn poisson(seed: u64, draws: usize) -> Result<Vec<Check>> {
    let (g, p) = (20, 2.5);
    let points: Vec<Vec<f64>> = (0..draws)
        .into_par_iter()
        .map(|d| poisson_points(g, &mut rng_from_seed(derive_seed(seed, &[d as u64]))))
        .collect();
    let mut checks = Vec::new();
    for k in [1, 7, 20] {
        let taus: Vec<f64> = points.iter().map(|pts| p * pts[k - 1]).collect();
        let (mean, se) = mean_se(&taus);
        let want = k as f64 / g as f64 * p;
        checks.push(Check::new(
            format!("poisson[E tau_{k} = (k/g) p, g={g}]"),
            (mean - want).abs() <= 3.0 * se,
            format!("mean {mean:.5}, expected {want:.5}, se {se:.2e}"),
        ));
    }
    for x in [0.1, 0.3] {
        let counts: Vec<f64> = points
            .iter()
            .map(|pts| pts.iter().filter(|&&b| b <= x).count() as f64)
            .collect();
        let (mean, se) = mean_se(&counts);
        let want = g as f64 * x;
        checks.push(Check::new(
            format!("poisson[jump count at x={x} ~ Poisson(gx)]"),
            (mean - want).abs() <= 3.0 * se,
            format!("mean {mean:.5}, expected {want:.5}, se {se:.2e}"),
        ));
    }
    Ok(checks)
}

/// `RepeatedEtc(k = g = 10^4)` with epsilon = 0.5 on 10 jobs, 100 trials.
pub fn high_probability(seed: u64) -> Result<Vec<Check>> {
    let r = check_high_probability_etc(10_000, 10_000, 0.5, 10, 100, seed)?;
    Ok(vec![Check::new(
        "high_probability[violation rate]",
        r.passed,
        format!(
            "{} of {} runs above {:.3}, allowed rate {:.3e} + {:.3e}, max ratio {:.4}",
            r.violations, r.trials, r.ratio_bound, r.probability_bound, r.slack, r.max_ratio
        ),
    )])
}

/// Curve shapes of the smoothness and robustification presets.
pub fn figures(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let config = ExperimentConfig {
        master_seed: seed,
        ..ExperimentConfig::preset("smoothness_rho")?
    };
    let sm = aggregate(&run_figure(&config, None)?);
    let x_max = config.sweep.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let at_zero: Vec<&Summary> = sm.iter().filter(|s| s.x == 0.0).collect();
    let worst = at_zero.iter().map(|s| s.mean).fold(0.0, f64::max);
    checks.push(Check::new(
        "figures[smoothness_rho: every curve <= 1.5 at sigma=0]",
        !at_zero.is_empty() && worst <= 1.5 + 1e-6,
        format!("max mean {worst:.4}"),
    ));
    let curve = |rho: &str| -> Vec<&Summary> { sm.iter().filter(|s| param(&s.params, "rho") == Some(rho)).collect() };
    let (hi, lo) = (curve("0.1"), curve("1e-15"));
    let at = |c: &[&Summary], x: f64| c.iter().find(|s| s.x == x).map(|s| s.mean).unwrap_or(f64::NAN);
    let above: Vec<String> = config
        .sweep
        .iter()
        .filter(|&&x| at(&hi, x) > at(&lo, x))
        .map(|x| x.to_string())
        .collect();
    let (a, b) = (at(&hi, x_max), at(&lo, x_max));
    checks.push(Check::new(
        "figures[smoothness_rho: rho=0.1 above rho=1e-15 at largest sigma]",
        a > b,
        format!(
            "sigma={x_max}: rho=0.1 {a:.4}, rho=1e-15 {b:.4}; rho=0.1 above at sigma in [{}]",
            above.join(", ")
        ),
    ));

    let config = ExperimentConfig {
        master_seed: seed,
        ..ExperimentConfig::preset("robustification")?
    };
    let rb = aggregate(&run_figure(&config, None)?);
    let x_max = config.sweep.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = |alg: &str| {
        rb.iter()
            .find(|s| s.algorithm == alg && s.x == x_max)
            .map(|s| (s.mean, s.std))
            .unwrap_or((f64::NAN, f64::NAN))
    };
    let (c, c_std) = mean("combining");
    let (ts, _) = mean("time_sharing");
    let (dp, _) = mean("delayed_predictions");
    checks.push(Check::new(
        "figures[robustification: combining <= both baselines + 0.05 at largest sigma]",
        c <= ts + 0.05 && c <= dp + 0.05,
        format!("sigma={x_max}: combining {c:.4} (std {c_std:.4}), time_sharing {ts:.4}, delayed_predictions {dp:.4}"),
    ));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_lookup() {
        assert_eq!(param("alpha=0.5;rho=0.1;rng=chacha8", "rho"), Some("0.1"));
        assert_eq!(param("alpha=0.5;rho=0.1", "rh"), None);
        assert_eq!(param("", "rho"), None);
    }

    #[test]
    fn zoo_cases_build() {
        for name in POLICY_ZOO {
            let (inst, config) = zoo_case(name, vec![1.0, 2.0, 0.5], 2, 7).unwrap();
            simulate(&inst, &config).unwrap();
        }
        assert!(zoo_case("LRU", vec![1.0], 1, 0).is_err());
    }

    #[test]
    fn small_suites_pass() {
        for checks in [
            decomposition(3, 44).unwrap(),
            engine_oracle(3, 2, 1e-4).unwrap(),
            consistency(3, 3, 10).unwrap(),
            smoothness(3, 5, 10).unwrap(),
        ] {
            for c in checks {
                assert!(c.passed, "{} {}", c.property, c.detail);
            }
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 0).is_err());
    }
}

use rayon::prelude::*;
use serde::Serialize;

use crate::bars::poisson_bar;
use crate::engine::run;
use crate::error::{Error, Result};
use crate::model::opt_cost;
use crate::policies::RepeatedEtc;
use crate::rng::{derive_seed, derived_rng};

use super::generators::{gen_pareto_instance, DEFAULT_PARETO_SHAPE};

/// Outcome of the tail check for repeated explore-then-commit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HighProbabilityReport {
    pub g: usize,
    pub k: usize,
    pub epsilon: f64,
    pub n: usize,
    pub trials: usize,
    /// Runs whose ratio exceeded `1 + 3 epsilon + 4k/g`.
    pub violations: usize,
    pub violation_rate: f64,
    pub ratio_bound: f64,
    /// `min(1, 2n exp(-epsilon^2 k / 7))`.
    pub probability_bound: f64,
    /// Three binomial standard errors at the probability bound.
    pub slack: f64,
    pub max_ratio: f64,
    pub passed: bool,
}

/// Runs `RepeatedEtc(k, g)` on `trials` Pareto instances with Poisson bars
/// and compares the fraction of runs above `1 + 3 epsilon + 4k/g` with
/// `2n exp(-epsilon^2 k / 7)`.
pub fn check_high_probability_etc(
    g: usize,
    k: usize,
    epsilon: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<HighProbabilityReport> {
    if k == 0 || k > g {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={g}")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1]")));
    }
    if trials == 0 || n == 0 {
        return Err(Error::InvalidParameter("need at least one job and one trial".into()));
    }
    let ratio_bound = 1.0 + 3.0 * epsilon + 4.0 * k as f64 / g as f64;
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let base = gen_pareto_instance(n, DEFAULT_PARETO_SHAPE, derive_seed(seed, &[trial as u64]))?;
            let bars = (0..n)
                .map(|j| poisson_bar(g, &mut derived_rng(seed, &[trial as u64, 2, j as u64])))
                .collect::<Result<Vec<_>>>()?;
            let inst = base.with_bars(bars)?;
            let out = run(&inst, &mut RepeatedEtc::new(k, g)?)?;
            Ok(out.total_cost / opt_cost(&inst)?)
        })
        .collect::<Result<_>>()?;
    let violations = ratios.iter().filter(|&&r| r > ratio_bound).count();
    let violation_rate = violations as f64 / trials as f64;
    let probability_bound = (2.0 * n as f64 * (-epsilon * epsilon * k as f64 / 7.0).exp()).min(1.0);
    let slack = 3.0 * (probability_bound * (1.0 - probability_bound) / trials as f64).sqrt();
    Ok(HighProbabilityReport {
        g,
        k,
        epsilon,
        n,
        trials,
        violations,
        violation_rate,
        ratio_bound,
        probability_bound,
        slack,
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        passed: violation_rate <= probability_bound + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loose_bound_is_met() {
        let report = check_high_probability_etc(50, 50, 1.0, 8, 10, 4).unwrap();
        assert_eq!(report.ratio_bound, 8.0);
        assert_eq!(report.violations, 0);
        assert!(report.passed);
        assert!(report.max_ratio <= 2.0 + 1e-9);
    }

    #[test]
    fn parameter_checks() {
        assert!(check_high_probability_etc(10, 11, 0.5, 3, 2, 0).is_err());
        assert!(check_high_probability_etc(10, 5, 1.5, 3, 2, 0).is_err());
    }
}

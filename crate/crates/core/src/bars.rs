//! Progress-bar constructors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::StepProgressBar;

/// How a size prediction `pi` becomes a signal threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionMode {
    /// `beta = clamp(alpha * pi / p)`: the bar jumps once the job has run for
    /// `alpha * pi`.
    Delayed,
    /// `beta = clamp(pi / p)`.
    Direct,
}

/// Declarative bar description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarSpec {
    Accurate { alpha: f64 },
    FromPrediction { alpha: f64, pi: f64, mode: PredictionMode },
    Explicit { levels: Vec<f64>, thresholds: Vec<f64> },
    Poisson { g: usize, seed: u64 },
    Binomial { g: usize, seed: u64 },
}

impl BarSpec {
    /// Builds the bar for a job of size `p`.
    pub fn build(&self, p: f64) -> Result<StepProgressBar> {
        match self {
            BarSpec::Accurate { alpha } => accurate_bar(*alpha),
            BarSpec::FromPrediction { alpha, pi, mode } => bar_from_prediction(*alpha, *pi, p, *mode),
            BarSpec::Explicit { levels, thresholds } => StepProgressBar::new(levels.clone(), thresholds.clone()),
            BarSpec::Poisson { g, seed } => poisson_bar(*g, &mut crate::rng::rng_from_seed(*seed)),
            BarSpec::Binomial { g, seed } => binomial_bar(*g, &mut crate::rng::rng_from_seed(*seed)),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1]")))
    }
}

/// Single jump to `alpha` at progress `alpha`.
pub fn accurate_bar(alpha: f64) -> Result<StepProgressBar> {
    check_alpha(alpha)?;
    StepProgressBar::new(vec![alpha], vec![alpha, 1.0])
}

/// Single-jump bar at level `alpha` whose threshold comes from a (possibly
/// negative or wildly wrong) prediction `pi` of the size `p`.
pub fn bar_from_prediction(alpha: f64, pi: f64, p: f64, mode: PredictionMode) -> Result<StepProgressBar> {
    check_alpha(alpha)?;
    StepProgressBar::new(vec![alpha], vec![prediction_beta(alpha, pi, p, mode), 1.0])
}

pub fn prediction_beta(alpha: f64, pi: f64, p: f64, mode: PredictionMode) -> f64 {
    let raw = match mode {
        PredictionMode::Delayed => alpha * pi / p,
        PredictionMode::Direct => pi / p,
    };
    if raw.is_nan() {
        return 1.0;
    }
    raw.clamp(0.0, 1.0)
}

/// Levels `h/(g+1)` for `h = 1..=g`.
pub fn uniform_levels(g: usize) -> Vec<f64> {
    (1..=g).map(|h| h as f64 / (g + 1) as f64).collect()
}

fn check_g(g: usize) -> Result<()> {
    if g == 0 {
        Err(Error::InvalidParameter("granularity must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// First `g` points of a rate-`g` Poisson process on the progress axis,
/// before clamping. Gaps use the inverse CDF `-ln(1 - U) / g`.
pub fn poisson_points<R: Rng + ?Sized>(g: usize, rng: &mut R) -> Vec<f64> {
    let rate = g as f64;
    let mut x = 0.0;
    (0..g)
        .map(|_| {
            let u: f64 = rng.random();
            x += -(1.0 - u).ln() / rate;
            x
        })
        .collect()
}

pub fn poisson_bar<R: Rng + ?Sized>(g: usize, rng: &mut R) -> Result<StepProgressBar> {
    check_g(g)?;
    let mut thresholds: Vec<f64> = poisson_points(g, rng).into_iter().map(|b| b.min(1.0)).collect();
    thresholds.push(1.0);
    StepProgressBar::new(uniform_levels(g), thresholds)
}

/// `g` sorted uniform thresholds.
pub fn binomial_bar<R: Rng + ?Sized>(g: usize, rng: &mut R) -> Result<StepProgressBar> {
    check_g(g)?;
    let mut thresholds: Vec<f64> = (0..g).map(|_| rng.random::<f64>()).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.push(1.0);
    StepProgressBar::new(uniform_levels(g), thresholds)
}

/// Expected elapsed time at the `k`-th Poisson jump of a job of size `p`,
/// ignoring the clamp at 1.
pub fn expected_commit_elapsed(k: usize, g: usize, p: f64) -> Result<f64> {
    if k == 0 || k > g {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={g}")));
    }
    Ok(k as f64 / g as f64 * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn accurate_bars() {
        let bar = accurate_bar(1.0).unwrap();
        assert_eq!(bar.eval(0.999), 0.0);
        assert_eq!(bar.eval(1.0), 1.0);
        let bar = accurate_bar(0.5).unwrap();
        assert_eq!(bar.eval(0.49), 0.0);
        assert_eq!(bar.eval(0.5), 0.5);
        let bar = accurate_bar(1e-6).unwrap();
        assert_eq!(bar.thresholds()[0], 1e-6);
        assert!(accurate_bar(0.0).is_err());
    }

    #[test]
    fn prediction_bars() {
        assert_eq!(prediction_beta(0.5, 2.0, 2.0, PredictionMode::Delayed), 0.5);
        assert_eq!(prediction_beta(0.5, 3.0, 2.0, PredictionMode::Delayed), 0.75);
        assert_eq!(prediction_beta(0.5, 3.0, 2.0, PredictionMode::Direct), 1.0);
        for mode in [PredictionMode::Delayed, PredictionMode::Direct] {
            assert_eq!(prediction_beta(0.5, -1.0, 2.0, mode), 0.0);
        }
        let bar = bar_from_prediction(0.5, 3.0, 2.0, PredictionMode::Delayed).unwrap();
        assert_eq!(bar.thresholds(), &[0.75, 1.0]);
    }

    #[test]
    fn poisson_first_point_mean() {
        let g = 10;
        let mut rng = rng_from_seed(11);
        let firsts: Vec<f64> = (0..100_000).map(|_| poisson_points(g, &mut rng)[0]).collect();
        let (mean, _) = mean_and_se(&firsts);
        assert!((mean - 0.1).abs() < 0.003, "{mean}");
    }

    #[test]
    fn poisson_jump_count_mean() {
        let (g, x) = (100, 0.3);
        let mut rng = rng_from_seed(12);
        let counts: Vec<f64> = (0..10_000)
            .map(|_| poisson_points(g, &mut rng).iter().filter(|&&b| b <= x).count() as f64)
            .collect();
        let (mean, _) = mean_and_se(&counts);
        assert!((mean - 30.0).abs() < 0.6, "{mean}");
    }

    #[test]
    fn binomial_statistics() {
        let (g, x) = (50, 0.4);
        let mut rng = rng_from_seed(13);
        let counts: Vec<f64> = (0..10_000)
            .map(|_| {
                let bar = binomial_bar(g, &mut rng).unwrap();
                bar.thresholds()[..g].iter().filter(|&&b| b <= x).count() as f64
            })
            .collect();
        let (mean, _) = mean_and_se(&counts);
        assert!((mean - 20.0).abs() < 0.7, "{mean}");

        let singles: Vec<f64> = (0..1000)
            .map(|_| binomial_bar(1, &mut rng).unwrap().thresholds()[0])
            .collect();
        let (mean, _) = mean_and_se(&singles);
        assert!((mean - 0.5).abs() < 0.015, "{mean}");
    }

    #[test]
    fn poisson_gaps_pass_ks_test() {
        let g = 5;
        let mut rng = rng_from_seed(14);
        let mut gaps: Vec<f64> = (0..2000)
            .flat_map(|_| {
                let pts = poisson_points(g, &mut rng);
                let mut prev = 0.0;
                pts.into_iter()
                    .map(|b| {
                        let gap = b - prev;
                        prev = b;
                        gap
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        gaps.sort_by(f64::total_cmp);
        let n = gaps.len() as f64;
        let d = gaps
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 1.0 - (-(g as f64) * x).exp();
                (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / n.sqrt(), "KS statistic {d}");
    }

    #[test]
    fn commit_elapsed() {
        assert!((expected_commit_elapsed(5, 100, 1.0).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(expected_commit_elapsed(7, 7, 3.0).unwrap(), 3.0);
        assert!(expected_commit_elapsed(0, 7, 3.0).is_err());
        assert!(expected_commit_elapsed(8, 7, 3.0).is_err());
    }

    #[test]
    fn spec_round_trip_and_determinism() {
        let spec = BarSpec::Poisson { g: 4, seed: 9 };
        assert_eq!(spec.build(1.0).unwrap(), spec.build(1.0).unwrap());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<BarSpec>(&json).unwrap(), spec);
        let g1 = BarSpec::Poisson { g: 1, seed: 3 }.build(1.0).unwrap();
        assert_eq!(g1.granularity(), 1);
        assert!(g1.thresholds()[0] <= 1.0);
    }

    proptest! {
        #[test]
        fn generated_bars_are_valid(g in 1usize..40, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            for bar in [poisson_bar(g, &mut rng).unwrap(), binomial_bar(g, &mut rng).unwrap()] {
                prop_assert_eq!(bar.granularity(), g);
                prop_assert!(bar.thresholds().windows(2).all(|w| w[0] <= w[1]));
                prop_assert_eq!(bar.eval(1.0), 1.0);
            }
        }
    }
}

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::bars::accurate_bar;
use crate::error::{Error, Result};
use crate::model::{Instance, StepProgressBar};
use crate::rng::rng_from_seed;

pub const DEFAULT_PARETO_SHAPE: f64 = 1.1;

/// Pareto sizes with scale 1: `(1 - U)^(-1/shape)`.
pub fn pareto_sizes<R: Rng + ?Sized>(n: usize, shape: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / shape)).collect()
}

/// Sizes only; bars are uninformative until replaced.
pub fn gen_pareto_instance(n: usize, shape: f64, seed: u64) -> Result<Instance> {
    if !(shape > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Pareto shape {shape} must be positive"
        )));
    }
    Instance::from_sizes(pareto_sizes(n, shape, &mut rng_from_seed(seed)))
}

/// `pi_i ~ N(p_i, sigma)` with `sigma` the standard deviation.
pub fn gaussian_predictions<R: Rng + ?Sized>(sizes: &[f64], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be nonnegative")));
    }
    if sigma == 0.0 {
        return Ok(sizes.to_vec());
    }
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(sizes.iter().map(|&p| p + noise.sample(rng)).collect())
}

pub fn gen_gaussian_predictions(instance: &Instance, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    gaussian_predictions(&instance.sizes(), sigma, &mut rng_from_seed(seed))
}

/// `2 m_half` jobs: half of size 1, half of size `1/alpha`, all signalling
/// slightly early at `beta = alpha - delta`.
pub fn brittleness_instance(alpha: f64, m_half: usize, delta: f64) -> Result<Instance> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta < alpha) {
        return Err(Error::InvalidParameter(format!("delta {delta} outside (0, alpha)")));
    }
    if m_half == 0 {
        return Err(Error::InvalidParameter("m_half must be positive".into()));
    }
    let sizes = (0..2 * m_half)
        .map(|j| if j < m_half { 1.0 } else { 1.0 / alpha })
        .collect();
    let bar = StepProgressBar::new(vec![alpha], vec![alpha - delta, 1.0])?;
    Instance::new(sizes, vec![bar; 2 * m_half], 1)
}

/// Same sizes, every bar accurate at `alpha`.
pub fn with_accurate_bars(instance: &Instance, alpha: f64) -> Result<Instance> {
    instance.with_bars(vec![accurate_bar(alpha)?; instance.len()])
}

/// Same sizes, single-jump bars at level `alpha` with the given thresholds.
pub fn with_single_signal_bars(instance: &Instance, alpha: f64, betas: &[f64]) -> Result<Instance> {
    let bars = betas
        .iter()
        .map(|&b| StepProgressBar::new(vec![alpha], vec![b, 1.0]))
        .collect::<Result<Vec<_>>>()?;
    instance.with_bars(bars)
}

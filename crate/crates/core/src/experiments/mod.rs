//! Monte-Carlo experiment pipelines and their CSV output.
//!
//! Every trial draws its sizes from a seed derived from `(master_seed,
//! trial)`, so all algorithms and sweep points of one trial share the same
//! jobs. Noise and bars use further derived seeds; see [`crate::rng`].

mod checks;
mod generators;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{check_high_probability_etc, HighProbabilityReport};
pub use generators::{
    brittleness_instance, gaussian_predictions, gen_gaussian_predictions, gen_pareto_instance, pareto_sizes,
    with_accurate_bars, with_single_signal_bars, DEFAULT_PARETO_SHAPE,
};

use crate::bars::{binomial_bar, poisson_bar, prediction_beta, PredictionMode};
use crate::combining::{combine, Candidate};
use crate::engine::{run, Policy};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::model::{error_terms, opt_cost, ErrorTerms, Instance, ScheduleOutcome};
use crate::policies::{
    tuned_k, Alg1, BlindFollow, FollowOrder, GenericEtc, MultiMachine, PolicyConfig, RepeatedEtc, RoundRobin,
    TimeSharing,
};
use crate::rng::{derive_seed, derived_rng, rng_from_seed, RNG_ALGORITHM};

/// Exact CSV header of every figure file.
pub const CSV_HEADER: [&str; 12] = [
    "figure",
    "algorithm",
    "params",
    "x",
    "trial",
    "seed",
    "alg_cost",
    "opt_cost",
    "ratio",
    "timing_err",
    "inversion_err",
    "l1_err",
];

/// Stream tags mixed into derived seeds.
const NOISE_STREAM: u64 = 1;
const BAR_STREAM: u64 = 2;
const SAMPLING_STREAM: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StochasticBars {
    Poisson,
    Binomial,
}

fn half() -> f64 {
    0.5
}
fn default_rhos() -> Vec<f64> {
    vec![1e-15, 1e-5, 1e-3, 1e-1]
}
fn delayed() -> PredictionMode {
    PredictionMode::Delayed
}
fn one_third() -> f64 {
    1.0 / 3.0
}
fn five_ninths() -> f64 {
    5.0 / 9.0
}
fn nine_tenths() -> f64 {
    0.9
}
fn poisson() -> StochasticBars {
    StochasticBars::Poisson
}
fn check_rhos() -> Vec<f64> {
    vec![0.1, 0.5, 1.0]
}
fn check_machines() -> Vec<usize> {
    vec![2, 3]
}
fn default_shape() -> f64 {
    DEFAULT_PARETO_SHAPE
}

/// Figure family with its algorithm parameters. The sweep variable `x` is
/// the noise scale sigma for the first two, the granularity g for
/// `Stochastic` and alpha for `ThmChecks`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "figure", rename_all = "snake_case")]
pub enum FigureKind {
    /// Alg1 under Gaussian predictions, one curve per rho.
    SmoothnessRho {
        #[serde(default = "half")]
        alpha: f64,
        #[serde(default = "default_rhos")]
        rhos: Vec<f64>,
        #[serde(default = "delayed")]
        beta_mode: PredictionMode,
    },
    /// Three ways to reach robustness 3 from size predictions: time sharing
    /// with the predicted order, Alg1 on delayed predictions, and combining
    /// round-robin with the predicted order.
    Robustification {
        #[serde(default = "one_third")]
        lambda: f64,
        #[serde(default = "five_ninths")]
        alpha: f64,
        #[serde(default = "nine_tenths")]
        rho: f64,
        #[serde(default)]
        m_pairs: Option<usize>,
    },
    /// Explore-then-commit against round-robin on stochastic bars.
    Stochastic {
        #[serde(default = "poisson")]
        bars: StochasticBars,
    },
    /// Single-signal policies on accurate and on uniformly random bars.
    ThmChecks {
        #[serde(default = "check_rhos")]
        rhos: Vec<f64>,
        #[serde(default = "check_machines")]
        machines: Vec<usize>,
    },
}

impl FigureKind {
    pub fn tag(&self) -> &'static str {
        match self {
            FigureKind::SmoothnessRho { .. } => "smoothness_rho",
            FigureKind::Robustification { .. } => "robustification",
            FigureKind::Stochastic { .. } => "stochastic",
            FigureKind::ThmChecks { .. } => "thm_checks",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub kind: FigureKind,
    pub n: usize,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    pub sweep: Vec<f64>,
    #[serde(default = "default_shape")]
    pub pareto_shape: f64,
}

pub const PRESETS: [&str; 4] = ["smoothness_rho", "robustification", "stochastic", "thm_checks"];

impl ExperimentConfig {
    /// Desk-scale defaults: 100 jobs, 20 trials.
    pub fn preset(name: &str) -> Result<Self> {
        let (kind, sweep) = match name {
            "smoothness_rho" => (
                FigureKind::SmoothnessRho {
                    alpha: half(),
                    rhos: default_rhos(),
                    beta_mode: delayed(),
                },
                vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 150.0],
            ),
            "robustification" => (
                FigureKind::Robustification {
                    lambda: one_third(),
                    alpha: five_ninths(),
                    rho: nine_tenths(),
                    m_pairs: None,
                },
                vec![0.0, 1.0, 5.0, 10.0, 50.0, 150.0],
            ),
            "stochastic" => (
                FigureKind::Stochastic { bars: poisson() },
                vec![2.0, 4.0, 8.0, 12.0, 16.0, 32.0, 48.0, 64.0, 128.0, 192.0],
            ),
            "thm_checks" => (
                FigureKind::ThmChecks {
                    rhos: check_rhos(),
                    machines: check_machines(),
                },
                vec![0.25, 0.5, 0.9],
            ),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown preset {other:?} (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(Self {
            kind,
            n: 100,
            trials: 20,
            master_seed: 0,
            sweep,
            pareto_shape: DEFAULT_PARETO_SHAPE,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::InvalidParameter("sweep must not be empty".into()));
        }
        if let FigureKind::Stochastic { .. } = self.kind {
            if self.sweep.iter().any(|&g| g < 1.0 || g.fract() != 0.0) {
                return Err(Error::InvalidParameter(
                    "stochastic sweep values must be integers >= 1".into(),
                ));
            }
        }
        if let FigureKind::Robustification { .. } = self.kind {
            if self.n < 2 {
                return Err(Error::NeedTwoJobs);
            }
        }
        Ok(())
    }
}

/// One algorithm run on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub figure: String,
    pub algorithm: String,
    pub params: String,
    pub x: f64,
    pub trial: usize,
    pub seed: u64,
    pub alg_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
    pub errors: Option<ErrorTerms>,
    /// Extra JSON written next to the CSV (combining selection reports).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl TrialRecord {
    pub fn csv_row(&self) -> [String; 12] {
        let err = |f: fn(&ErrorTerms) -> f64| self.errors.as_ref().map(|e| sig(f(e), 10)).unwrap_or_default();
        [
            self.figure.clone(),
            self.algorithm.clone(),
            self.params.clone(),
            sig(self.x, 10),
            self.trial.to_string(),
            self.seed.to_string(),
            sig(self.alg_cost, 10),
            sig(self.opt_cost, 10),
            sig(self.ratio, 10),
            err(|e| e.timing),
            err(|e| e.inversion),
            err(|e| e.l1),
        ]
    }
}

/// Builds `key=value` parameter strings; the RNG id is always appended.
fn params(pairs: &[(&str, String)]) -> String {
    let mut parts: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.push(format!("rng={RNG_ALGORITHM}"));
    parts.join(";")
}

fn num(x: f64) -> String {
    sig(x, 10)
}

/// Shared per-trial context.
struct Trial<'a> {
    figure: &'a str,
    x: f64,
    trial: usize,
    seed: u64,
    records: Vec<TrialRecord>,
}

impl Trial<'_> {
    fn push(
        &mut self,
        algorithm: &str,
        params: String,
        outcome: &ScheduleOutcome,
        opt: f64,
        errors: Option<ErrorTerms>,
        meta: Option<serde_json::Value>,
    ) {
        self.records.push(TrialRecord {
            figure: self.figure.to_string(),
            algorithm: algorithm.to_string(),
            params,
            x: self.x,
            trial: self.trial,
            seed: self.seed,
            alg_cost: outcome.total_cost,
            opt_cost: opt,
            ratio: outcome.total_cost / opt,
            errors,
            meta,
        });
    }
}

fn run_policy<P: Policy>(instance: &Instance, mut policy: P) -> Result<ScheduleOutcome> {
    run(instance, &mut policy)
}

/// Job order by ascending prediction, ties by id.
pub fn predicted_order(predictions: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..predictions.len()).collect();
    order.sort_by(|&a, &b| predictions[a].total_cmp(&predictions[b]).then(a.cmp(&b)));
    order
}

fn uniform_betas(n: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

fn run_unit(config: &ExperimentConfig, x_idx: usize, trial: usize) -> Result<Vec<TrialRecord>> {
    let master = config.master_seed;
    let x = config.sweep[x_idx];
    let seed = derive_seed(master, &[trial as u64]);
    let base = gen_pareto_instance(config.n, config.pareto_shape, seed)?;
    let sizes = base.sizes();
    let noise_seed = derive_seed(master, &[trial as u64, x_idx as u64, NOISE_STREAM]);
    let mut t = Trial {
        figure: config.kind.tag(),
        x,
        trial,
        seed,
        records: Vec::new(),
    };
    let opt = opt_cost(&base)?;

    match &config.kind {
        FigureKind::SmoothnessRho { alpha, rhos, beta_mode } => {
            let pi = gen_gaussian_predictions(&base, x, noise_seed)?;
            let betas: Vec<f64> = pi
                .iter()
                .zip(&sizes)
                .map(|(&pi, &p)| prediction_beta(*alpha, pi, p, *beta_mode))
                .collect();
            let inst = with_single_signal_bars(&base, *alpha, &betas)?;
            let terms = error_terms(&inst, *alpha, &betas)?;
            let mode = match beta_mode {
                PredictionMode::Delayed => "delayed",
                PredictionMode::Direct => "direct",
            };
            for &rho in rhos {
                let out = run_policy(&inst, Alg1::new(*alpha, rho, None)?)?;
                let p = params(&[("alpha", num(*alpha)), ("rho", num(rho)), ("beta_mode", mode.into())]);
                t.push("alg1", p, &out, opt, Some(terms), None);
            }
        }
        FigureKind::Robustification {
            lambda,
            alpha,
            rho,
            m_pairs,
        } => {
            let pi = gen_gaussian_predictions(&base, x, noise_seed)?;
            let order = predicted_order(&pi);

            let ts = TimeSharing::new(*lambda, Box::new(FollowOrder::new(order.clone())), Box::new(RoundRobin))?;
            let out = run_policy(&base, ts)?;
            t.push(
                "time_sharing",
                params(&[("lambda", num(*lambda))]),
                &out,
                opt,
                None,
                None,
            );

            let betas: Vec<f64> = pi
                .iter()
                .zip(&sizes)
                .map(|(&pi, &p)| prediction_beta(*alpha, pi, p, PredictionMode::Delayed))
                .collect();
            let inst = with_single_signal_bars(&base, *alpha, &betas)?;
            let terms = error_terms(&inst, *alpha, &betas)?;
            let out = run_policy(&inst, Alg1::new(*alpha, *rho, None)?)?;
            let p = params(&[("alpha", num(*alpha)), ("rho", num(*rho))]);
            t.push("delayed_predictions", p, &out, opt, Some(terms), None);

            let candidates = vec![
                Candidate::from_config(PolicyConfig::Rr, false)?,
                Candidate::from_config(PolicyConfig::FollowOrder { order: order.clone() }, false)?,
            ];
            let sampling_seed = derive_seed(master, &[trial as u64, x_idx as u64, SAMPLING_STREAM]);
            let (out, report) = combine(&base, candidates, *m_pairs, sampling_seed)?;
            let p = params(&[("m_pairs", report.m_pairs.to_string())]);
            t.push("combining", p, &out, opt, None, Some(serde_json::to_value(&report)?));

            let out = run_policy(&base, RoundRobin)?;
            t.push("rr", params(&[]), &out, opt, None, None);
            let out = run_policy(&base, FollowOrder::new(order))?;
            t.push("follow_predictions", params(&[]), &out, opt, None, None);
        }
        FigureKind::Stochastic { bars } => {
            let g = x as usize;
            let bar_list = (0..config.n)
                .map(|j| {
                    let mut rng = derived_rng(master, &[trial as u64, x_idx as u64, BAR_STREAM, j as u64]);
                    match bars {
                        StochasticBars::Poisson => poisson_bar(g, &mut rng),
                        StochasticBars::Binomial => binomial_bar(g, &mut rng),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let inst = base.with_bars(bar_list)?;
            let gp = ("g", g.to_string());

            let out = run_policy(&inst, RepeatedEtc::new(1, g)?)?;
            t.push(
                "etc_k1",
                params(&[gp.clone(), ("k", "1".into())]),
                &out,
                opt,
                None,
                None,
            );
            let k = tuned_k(g);
            let out = run_policy(&inst, RepeatedEtc::new(k, g)?)?;
            t.push(
                "etc_tuned",
                params(&[gp.clone(), ("k", k.to_string())]),
                &out,
                opt,
                None,
                None,
            );
            let out = run_policy(&inst, RoundRobin)?;
            t.push("rr", params(std::slice::from_ref(&gp)), &out, opt, None, None);
            let threshold = GenericEtc::default_threshold(g);
            let out = run_policy(&inst, GenericEtc::new(threshold)?)?;
            t.push(
                "generic_etc",
                params(&[gp, ("threshold", num(threshold))]),
                &out,
                opt,
                None,
                None,
            );
        }
        FigureKind::ThmChecks { rhos, machines } => {
            let alpha = x;
            let uniform = uniform_betas(config.n, noise_seed);
            let accurate = vec![alpha; config.n];
            for (label, betas) in [("accurate", &accurate), ("uniform", &uniform)] {
                let inst = with_single_signal_bars(&base, alpha, betas)?;
                let terms = error_terms(&inst, alpha, betas)?;
                let bars = ("bars", label.to_string());

                let out = run_policy(&inst, BlindFollow::default())?;
                t.push(
                    "blind_follow",
                    params(std::slice::from_ref(&bars)),
                    &out,
                    opt,
                    Some(terms),
                    None,
                );
                for &rho in rhos {
                    let out = run_policy(&inst, Alg1::new(alpha, rho, None)?)?;
                    let p = params(&[bars.clone(), ("rho", num(rho))]);
                    t.push("alg1", p, &out, opt, Some(terms), None);
                }
                for &m in machines {
                    let multi = inst.clone().with_machines(m)?;
                    let opt_m = opt_cost(&multi)?;
                    let out = run_policy(&multi, MultiMachine::new(alpha, m, None)?)?;
                    let p = params(&[bars.clone(), ("m", m.to_string())]);
                    t.push("multi_machine", p, &out, opt_m, None, None);
                }
                let out = run_policy(&inst, RoundRobin)?;
                t.push("rr", params(&[bars]), &out, opt, None, None);
            }
        }
    }
    Ok(t.records)
}

/// Runs every (sweep point, trial) pair, in parallel when `workers` allows,
/// and returns the records in a fixed order: sweep point, trial, algorithm.
pub fn run_figure(config: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let units: Vec<(usize, usize)> = (0..config.sweep.len())
        .flat_map(|x| (0..config.trials).map(move |t| (x, t)))
        .collect();
    let work = || -> Result<Vec<TrialRecord>> {
        let chunks: Vec<Vec<TrialRecord>> = units
            .par_iter()
            .map(|&(x, t)| run_unit(config, x, t))
            .collect::<Result<_>>()?;
        Ok(chunks.into_iter().flatten().collect())
    };
    match workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(work),
        None => work(),
    }
}

pub fn write_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.write_record(r.csv_row())?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Writes one JSON line per record that carries metadata.
pub fn write_meta(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    for (row, r) in records.iter().enumerate() {
        if let Some(meta) = &r.meta {
            let line = serde_json::json!({
                "row": row,
                "algorithm": r.algorithm,
                "x": r.x,
                "trial": r.trial,
                "seed": r.seed,
                "meta": meta,
            });
            writeln!(file, "{line}").map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

/// Files written for one figure.
#[derive(Clone, Debug)]
pub struct FigureOutput {
    pub csv: PathBuf,
    pub meta: Option<PathBuf>,
    pub records: Vec<TrialRecord>,
}

/// Runs the figure and writes `<tag>.csv` (plus `<tag>.meta.jsonl` when some
/// rows carry metadata) into `out_dir`.
pub fn run_figure_to_dir(config: &ExperimentConfig, out_dir: &Path, workers: Option<usize>) -> Result<FigureOutput> {
    let records = run_figure(config, workers)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let tag = config.kind.tag();
    let csv = out_dir.join(format!("{tag}.csv"));
    write_csv(&csv, &records)?;
    let meta = if records.iter().any(|r| r.meta.is_some()) {
        let path = out_dir.join(format!("{tag}.meta.jsonl"));
        write_meta(&path, &records)?;
        Some(path)
    } else {
        None
    };
    Ok(FigureOutput { csv, meta, records })
}

/// Mean and sample standard deviation of the ratio for one curve point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub algorithm: String,
    pub params: String,
    pub x: f64,
    pub trials: usize,
    pub mean: f64,
    pub std: f64,
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups records by (algorithm, params, x) in order of first appearance.
pub fn aggregate(records: &[TrialRecord]) -> Vec<Summary> {
    let mut keys: Vec<(String, String, f64)> = Vec::new();
    let mut ratios: Vec<Vec<f64>> = Vec::new();
    for r in records {
        let key = (r.algorithm.clone(), r.params.clone(), r.x);
        let idx = match keys.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                keys.push(key);
                ratios.push(Vec::new());
                keys.len() - 1
            }
        };
        ratios[idx].push(r.ratio);
    }
    keys.into_iter()
        .zip(ratios)
        .map(|((algorithm, params, x), rs)| {
            let (mean, std) = mean_std(&rs);
            Summary {
                algorithm,
                params,
                x,
                trials: rs.len(),
                mean,
                std,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig::preset(name).unwrap();
        c.n = 12;
        c.trials = 3;
        c.sweep.truncate(2);
        c
    }

    #[test]
    fn presets_and_config_json() {
        for name in PRESETS {
            let c = ExperimentConfig::preset(name).unwrap();
            assert_eq!(c.kind.tag(), name);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(ExperimentConfig::from_json(&json).unwrap(), c);
        }
        assert!(ExperimentConfig::preset("nope").is_err());
        let c = ExperimentConfig::from_json(r#"{"figure":"stochastic","n":5,"trials":2,"sweep":[4]}"#).unwrap();
        assert_eq!(
            c.kind,
            FigureKind::Stochastic {
                bars: StochasticBars::Poisson
            }
        );
        assert_eq!(c.pareto_shape, 1.1);
    }

    #[test]
    fn robustification_defaults_give_robustness_three() {
        let FigureKind::Robustification { lambda, alpha, rho, .. } =
            ExperimentConfig::preset("robustification").unwrap().kind
        else {
            unreachable!()
        };
        assert!((2.0 / (1.0 - lambda) - 3.0).abs() < 1e-12);
        assert!((1.0 + 1.0 / (rho * alpha) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn figures_run_and_are_deterministic() {
        for name in PRESETS {
            let c = small(name);
            let a = run_figure(&c, Some(3)).unwrap();
            let b = run_figure(&c, Some(1)).unwrap();
            assert_eq!(a, b, "{name}");
            assert!(!a.is_empty());
            for r in &a {
                assert!(r.ratio >= 1.0 - 1e-9, "{r:?}");
                assert!(r.params.ends_with("rng=chacha8"));
            }
        }
    }

    #[test]
    fn csv_schema_and_formatting() {
        let dir = tempfile::tempdir().unwrap();
        let c = small("smoothness_rho");
        let out = run_figure_to_dir(&c, dir.path(), None).unwrap();
        let text = std::fs::read_to_string(&out.csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 12);
        assert_eq!(first[0], "smoothness_rho");
        assert!(first[2].contains("rho=1e-15"));
        assert!(out.meta.is_none());

        let again = dir.path().join("again");
        let out2 = run_figure_to_dir(&c, &again, Some(2)).unwrap();
        assert_eq!(std::fs::read(&out.csv).unwrap(), std::fs::read(&out2.csv).unwrap());

        let c = small("robustification");
        let out = run_figure_to_dir(&c, dir.path(), None).unwrap();
        let meta = std::fs::read_to_string(out.meta.unwrap()).unwrap();
        assert_eq!(meta.lines().count(), 6);
        assert!(meta.contains("\"scores\""));
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = write_csv(&blocker.join("out.csv"), &[]).unwrap_err();
        assert!(err.to_string().contains("out.csv"));
    }

    #[test]
    fn aggregation() {
        let rec = |alg: &str, x: f64, ratio: f64| TrialRecord {
            figure: "f".into(),
            algorithm: alg.into(),
            params: String::new(),
            x,
            trial: 0,
            seed: 0,
            alg_cost: ratio,
            opt_cost: 1.0,
            ratio,
            errors: None,
            meta: None,
        };
        let s = aggregate(&[
            rec("a", 0.0, 1.0),
            rec("b", 0.0, 5.0),
            rec("a", 0.0, 3.0),
            rec("a", 1.0, 2.0),
        ]);
        assert_eq!(s.len(), 3);
        assert_eq!((s[0].mean, s[0].trials), (2.0, 2));
        assert!((s[0].std - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(s[2].std, 0.0);
        assert_eq!(predicted_order(&[3.0, -1.0, 3.0]), vec![1, 0, 2]);
    }
}

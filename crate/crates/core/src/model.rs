//! Jobs, progress bars, instances, schedule outcomes and the closed-form
//! metrics computed on them (optimal cost, delay decomposition, signal error
//! terms).

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::SimEvent;
use crate::error::{Error, Result};

/// Relative tolerance used for floating-point identity checks.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor paired with [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

/// `a <= b` up to the crate-wide tolerances.
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * a.abs().max(b.abs()) + ABS_TOL
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: usize,
    pub p: f64,
}

/// Displayed progress as a step function of actual progress.
///
/// `levels` holds the `g` intermediate displayed levels; `thresholds` holds
/// the `g + 1` actual-progress fractions at which the bar jumps, the last one
/// being exactly `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepProgressBar {
    levels: Vec<f64>,
    thresholds: Vec<f64>,
}

impl StepProgressBar {
    pub fn new(levels: Vec<f64>, thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.len() != levels.len() + 1 {
            return Err(Error::InvalidBar(format!(
                "{} thresholds for {} levels (expected levels + 1)",
                thresholds.len(),
                levels.len()
            )));
        }
        if thresholds.last() != Some(&1.0) {
            return Err(Error::InvalidBar("last threshold must be exactly 1".into()));
        }
        if let Some(bad) = thresholds.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(Error::InvalidBar(format!("threshold {bad} outside [0, 1]")));
        }
        if thresholds.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidBar("thresholds must be nondecreasing".into()));
        }
        if let Some(bad) = levels.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(Error::InvalidBar(format!("level {bad} outside (0, 1]")));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBar("levels must be strictly increasing".into()));
        }
        Ok(Self { levels, thresholds })
    }

    /// The uninformative bar `x -> 1(x = 1)`.
    pub fn non_clairvoyant() -> Self {
        Self {
            levels: Vec::new(),
            thresholds: vec![1.0],
        }
    }

    pub fn granularity(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// All `g + 1` thresholds, including the final `1`.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Displayed level once `jumps` thresholds have been crossed.
    pub fn level_after(&self, jumps: usize) -> f64 {
        match jumps {
            0 => 0.0,
            h if h > self.levels.len() => 1.0,
            h => self.levels[h - 1],
        }
    }

    /// Displayed progress at actual progress `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut value = 0.0;
        let mut prev = 0.0;
        for (h, &beta) in self.thresholds.iter().enumerate() {
            let level = self.levels.get(h).copied().unwrap_or(1.0);
            if x >= beta {
                value += level - prev;
            }
            prev = level;
        }
        value
    }
}

/// A set of jobs with one progress bar each, all bars sharing one level
/// vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    jobs: Vec<Job>,
    bars: Vec<StepProgressBar>,
    machines: usize,
    clairvoyant: bool,
}

impl Instance {
    pub fn new(sizes: Vec<f64>, bars: Vec<StepProgressBar>, machines: usize) -> Result<Self> {
        if sizes.len() != bars.len() {
            return Err(Error::InvalidInstance(format!(
                "{} jobs but {} bars",
                sizes.len(),
                bars.len()
            )));
        }
        if machines == 0 {
            return Err(Error::InvalidInstance("machines must be positive".into()));
        }
        if let Some(bad) = sizes.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidInstance(format!("processing time {bad} is not positive")));
        }
        if let Some(first) = bars.first() {
            if bars.iter().any(|b| b.levels() != first.levels()) {
                return Err(Error::InvalidInstance(
                    "all bars must share the same level vector".into(),
                ));
            }
        }
        let jobs = sizes.into_iter().enumerate().map(|(id, p)| Job { id, p }).collect();
        Ok(Self {
            jobs,
            bars,
            machines,
            clairvoyant: true,
        })
    }

    /// Sizes with uninformative bars on a single machine.
    pub fn from_sizes(sizes: Vec<f64>) -> Result<Self> {
        let bars = vec![StepProgressBar::non_clairvoyant(); sizes.len()];
        Self::new(sizes, bars, 1)
    }

    /// Same sizes and machine count, new bars.
    pub fn with_bars(&self, bars: Vec<StepProgressBar>) -> Result<Self> {
        let mut out = Self::new(self.sizes(), bars, self.machines)?;
        out.clairvoyant = self.clairvoyant;
        Ok(out)
    }

    pub fn with_machines(mut self, machines: usize) -> Result<Self> {
        if machines == 0 {
            return Err(Error::InvalidInstance("machines must be positive".into()));
        }
        self.machines = machines;
        Ok(self)
    }

    /// Marks whether the harness may reveal processing times to a policy.
    pub fn with_clairvoyance(mut self, clairvoyant: bool) -> Self {
        self.clairvoyant = clairvoyant;
        self
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn p(&self, j: usize) -> f64 {
        self.jobs[j].p
    }

    pub fn sizes(&self) -> Vec<f64> {
        self.jobs.iter().map(|j| j.p).collect()
    }

    pub fn bars(&self) -> &[StepProgressBar] {
        &self.bars
    }

    pub fn bar(&self, j: usize) -> &StepProgressBar {
        &self.bars[j]
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn is_clairvoyant(&self) -> bool {
        self.clairvoyant
    }

    /// Shared granularity of the bars (0 for an empty instance).
    pub fn granularity(&self) -> usize {
        self.bars.first().map_or(0, |b| b.granularity())
    }

    pub fn levels(&self) -> &[f64] {
        self.bars.first().map_or(&[], |b| b.levels())
    }

    /// The single-signal emission fractions `beta_j`, when every bar has
    /// granularity one.
    pub fn single_signal_betas(&self) -> Option<Vec<f64>> {
        if self.granularity() != 1 {
            return None;
        }
        Some(self.bars.iter().map(|b| b.thresholds()[0]).collect())
    }

    /// Job ids sorted by ascending processing time, ties by id.
    pub fn spt_order(&self) -> Vec<usize> {
        spt_order(&self.sizes())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// On-disk instance document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub machines: usize,
    pub levels: Vec<f64>,
    pub jobs: Vec<JobEntry>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub clairvoyant: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobEntry {
    pub p: f64,
    pub thresholds: Vec<f64>,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl From<&Instance> for InstanceFile {
    fn from(instance: &Instance) -> Self {
        InstanceFile {
            machines: instance.machines,
            levels: instance.levels().to_vec(),
            jobs: instance
                .jobs
                .iter()
                .zip(&instance.bars)
                .map(|(job, bar)| JobEntry {
                    p: job.p,
                    thresholds: bar.thresholds().to_vec(),
                })
                .collect(),
            clairvoyant: instance.clairvoyant,
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let mut sizes = Vec::with_capacity(file.jobs.len());
        let mut bars = Vec::with_capacity(file.jobs.len());
        for entry in file.jobs {
            sizes.push(entry.p);
            bars.push(StepProgressBar::new(file.levels.clone(), entry.thresholds)?);
        }
        Ok(Instance::new(sizes, bars, file.machines)?.with_clairvoyance(file.clairvoyant))
    }
}

/// Completion times, pairwise delays and the event log of one simulated run.
#[derive(Clone, Debug)]
pub struct ScheduleOutcome {
    pub completion: Vec<f64>,
    /// Row-major `n x n`; entry `(i, j)` is the elapsed time of `i` when `j`
    /// completed.
    delays: Vec<f64>,
    pub total_cost: f64,
    pub event_log: Vec<SimEvent>,
}

impl ScheduleOutcome {
    pub(crate) fn new(completion: Vec<f64>, delays: Vec<f64>, event_log: Vec<SimEvent>) -> Self {
        let total_cost = completion.iter().sum();
        Self {
            completion,
            delays,
            total_cost,
            event_log,
        }
    }

    pub fn len(&self) -> usize {
        self.completion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.completion.is_empty()
    }

    /// `d(i, j)`: processing `i` had received when `j` completed.
    pub fn delay(&self, i: usize, j: usize) -> f64 {
        self.delays[i * self.completion.len() + j]
    }

    pub fn delay_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let n = self.completion.len();
        &mut self.delays[i * n + j]
    }

    /// Renders the event log, one tab-separated line per event.
    pub fn event_log_tsv(&self) -> String {
        self.event_log.iter().map(|e| e.to_tsv() + "\n").collect()
    }
}

pub fn total_cost(outcome: &ScheduleOutcome) -> f64 {
    outcome.completion.iter().sum()
}

/// Job ids by ascending size, ties broken by id.
pub fn spt_order(sizes: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        sizes[a]
            .partial_cmp(&sizes[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Optimal total completion time for `sizes` on `machines` identical
/// machines: shortest processing time first, each job going to the machine
/// that frees up first.
pub fn opt_cost_sizes(sizes: &[f64], machines: usize) -> Result<f64> {
    if sizes.is_empty() {
        return Err(Error::EmptyInstance);
    }
    if machines == 0 {
        return Err(Error::InvalidInstance("machines must be positive".into()));
    }
    let order = spt_order(sizes);
    if machines == 1 {
        let n = sizes.len();
        return Ok(order
            .iter()
            .enumerate()
            .map(|(rank, &j)| (n - rank) as f64 * sizes[j])
            .sum());
    }
    let mut loads = vec![0.0_f64; machines];
    let mut total = 0.0;
    for j in order {
        let (slot, _) = loads
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(Ordering::Equal))
            .expect("at least one machine");
        loads[slot] += sizes[j];
        total += loads[slot];
    }
    Ok(total)
}

pub fn opt_cost(instance: &Instance) -> Result<f64> {
    opt_cost_sizes(&instance.sizes(), instance.machines())
}

/// Right-hand side of the delay decomposition:
/// `sum_j p_j + sum_{i<j} (d(i,j) + d(j,i))`.
pub fn delay_decomposition_total(outcome: &ScheduleOutcome, instance: &Instance) -> f64 {
    let n = instance.len();
    let mut total: f64 = instance.jobs().iter().map(|j| j.p).sum();
    for j in 0..n {
        for i in 0..j {
            total += outcome.delay(i, j) + outcome.delay(j, i);
        }
    }
    total
}

/// Whether total cost equals the delay decomposition within `tol` (relative).
///
/// Holds for every non-idling single-machine schedule.
pub fn check_delay_decomposition(outcome: &ScheduleOutcome, instance: &Instance, tol: f64) -> bool {
    let alg = outcome.total_cost;
    let rhs = delay_decomposition_total(outcome, instance);
    (alg - rhs).abs() <= tol * alg.abs() + ABS_TOL
}

/// Error terms of the single-signal bound for blindly following signals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTerms {
    /// `sum_i (n - i)(beta_i - alpha) p_i` over ascending sizes; may be negative.
    pub timing: f64,
    /// `sum_{i<j} (p_j - p_i) 1(beta_j p_j < beta_i p_i)` over ascending sizes.
    pub inversion: f64,
    /// `sum_i |beta_i - alpha| p_i`.
    pub l1: f64,
}

pub fn error_terms(instance: &Instance, alpha: f64, betas: &[f64]) -> Result<ErrorTerms> {
    let n = instance.len();
    if betas.len() != n {
        return Err(Error::InvalidParameter(format!("{} betas for {n} jobs", betas.len())));
    }
    if let Some(bad) = betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(Error::InvalidParameter(format!("beta {bad} outside [0, 1]")));
    }
    let order = instance.spt_order();
    let p = |j: usize| instance.p(j);
    let mut timing = 0.0;
    let mut inversion = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        timing += (n - rank - 1) as f64 * (betas[i] - alpha) * p(i);
        for &j in &order[rank + 1..] {
            if betas[j] * p(j) < betas[i] * p(i) {
                inversion += p(j) - p(i);
            }
        }
    }
    let l1 = betas.iter().enumerate().map(|(j, b)| (b - alpha).abs() * p(j)).sum();
    Ok(ErrorTerms { timing, inversion, l1 })
}

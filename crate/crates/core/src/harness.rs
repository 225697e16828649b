//! Seeded Monte Carlo experiments and their CSV/JSON reports.
//!
//! Trial `t` at the `i`-th sample size draws from the ChaCha8 stream
//! `(i << 32) | t` of the master seed, and trials are collected in index
//! order, so records do not depend on the number of workers.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{empirical_fdr, empirical_fndr, RateBundle};
use crate::learners::{learn_constrained, learn_lambda, make_schedule, member_counts, Criterion, LearnResult, ObjectiveSpec};
use crate::model::{confusion_counts, Classifier, Dataset, Direction, HypothesisClass, DEFAULT_ENUMERATION_CAP};
use crate::oracle::{
    constrained_optimum, optimal_e_lambda, sample_with, stream_rng, true_e_lambda, true_rates, ConstrainedOptimum,
    DiscreteDistribution, Optimum, OptimumWitness,
};
use crate::penalties::{complexity, penalized_objective_from_counts, phi_from_complexity, ZeroConvention};
use crate::rate::ExtendedRate;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Float slack on the per-draw estimation-error comparison.
pub const ESTIMATION_SLACK: f64 = 1e-12;

pub const CSV_HEADER: [&str; 9] =
    ["experiment", "n", "trial", "seed_stream", "n_D", "n_ND", "abstained", "regret_or_gap", "violation_flags"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    BoundCheck,
    Consistency,
    ConstrainedCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::BoundCheck => "bound_check",
            Experiment::Consistency => "consistency",
            Experiment::ConstrainedCheck => "constrained_check",
        }
    }
}

/// An inline distribution or the path of a distribution JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSource {
    Inline(DiscreteDistribution),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassSpec {
    /// `m` thresholds at cuts `j/(m+1)`.
    Threshold {
        m: usize,
        #[serde(default)]
        direction: Direction,
    },
    Histogram {
        k: u32,
        d: usize,
    },
    /// The histogram class at the schedule level `k_n` for each `n`.
    Schedule,
}

impl ClassSpec {
    pub fn resolve(&self, n: usize, d: usize) -> Result<HypothesisClass> {
        match self {
            ClassSpec::Threshold { m, direction } => HypothesisClass::threshold_grid(*m, *direction),
            ClassSpec::Histogram { k, d } => HypothesisClass::histogram(*k, *d),
            ClassSpec::Schedule => HypothesisClass::histogram(make_schedule(n, d)?.k_n, d),
        }
    }
}

/// Which constrained rule a constrained check runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Fdr,
    Np,
    Pr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub distribution: DistributionSource,
    pub class_spec: ClassSpec,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// Reads a config; a relative distribution path is resolved against
    /// the config file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        if let DistributionSource::Path(p) = &mut cfg.distribution {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn distribution(&self) -> Result<DiscreteDistribution> {
        match &self.distribution {
            DistributionSource::Inline(d) => Ok(d.clone()),
            DistributionSource::Path(p) => DiscreteDistribution::from_json_path(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n < 3) {
            return Err(Error::config("n_grid must be nonempty with every n >= 3"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers must be positive"));
        }
        let in_unit = |name: &str, v: Option<f64>| match v {
            Some(v) if v > 0.0 && v < 1.0 => Ok(v),
            Some(v) => Err(Error::config(format!("{name} must lie in (0, 1), got {v}"))),
            None => Err(Error::config(format!("{name} is required for {}", self.experiment.name()))),
        };
        match self.experiment {
            Experiment::BoundCheck => {
                in_unit("delta", self.delta)?;
                if matches!(self.class_spec, ClassSpec::Schedule) {
                    return Err(Error::config("bound_check needs a fixed class"));
                }
            }
            Experiment::Consistency => match self.lambda {
                Some(l) if l > 0.0 && l.is_finite() => {}
                _ => return Err(Error::config("consistency needs a positive lambda")),
            },
            Experiment::ConstrainedCheck => {
                self.constrained_spec()?;
            }
        }
        Ok(())
    }

    pub fn constrained_spec(&self) -> Result<ObjectiveSpec> {
        let delta = self.delta.ok_or_else(|| Error::config("delta is required for constrained_check"))?;
        let level = |name: &str, v: Option<f64>| v.ok_or_else(|| Error::config(format!("{name} is required")));
        let criterion = match self.mode.ok_or_else(|| Error::config("mode is required for constrained_check"))? {
            Mode::Fdr => Criterion::Fdr { alpha: level("alpha", self.alpha)? },
            Mode::Np => Criterion::NeymanPearson { alpha: level("alpha", self.alpha)? },
            Mode::Pr => Criterion::PrecisionRecall { beta: level("beta", self.beta)? },
        };
        let spec = ObjectiveSpec::constrained(criterion, delta);
        spec.validate()?;
        Ok(spec)
    }
}

/// The `regret_or_gap` column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Value(f64),
    Infinite,
    DegenerateOptimum,
}

impl Measure {
    fn from_rate(r: ExtendedRate) -> Self {
        match r {
            ExtendedRate::Finite(v) => Measure::Value(v),
            ExtendedRate::Infinite => Measure::Infinite,
        }
    }

    fn sort_key(&self) -> f64 {
        match self {
            Measure::Value(v) => *v,
            _ => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::Value(v) => write!(f, "{v}"),
            Measure::Infinite => write!(f, "inf"),
            Measure::DegenerateOptimum => write!(f, "degenerate-optimum"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment: Experiment,
    pub n: usize,
    pub trial: usize,
    pub seed_stream: u64,
    pub n_d: Option<u64>,
    pub n_nd: Option<u64>,
    pub abstained: bool,
    pub regret_or_gap: Measure,
    pub violation_flags: Vec<&'static str>,
}

impl TrialRecord {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.violation_flags.contains(&flag)
    }

    fn csv_row(&self) -> [String; 9] {
        let opt = |v: Option<u64>| v.map_or_else(String::new, |v| v.to_string());
        [
            self.experiment.name().to_string(),
            self.n.to_string(),
            self.trial.to_string(),
            self.seed_stream.to_string(),
            opt(self.n_d),
            opt(self.n_nd),
            self.abstained.to_string(),
            self.regret_or_gap.to_string(),
            if self.violation_flags.is_empty() { "-".to_string() } else { self.violation_flags.join("|") },
        ]
    }
}

pub mod flags {
    pub const FDR: &str = "fdr";
    pub const FNDR: &str = "fndr";
    pub const ESTIMATION: &str = "estimation";
    pub const ESTIMATION_UNVERIFIED: &str = "estimation_unverified";
    pub const SOLVER_MISMATCH: &str = "solver_mismatch";
    pub const R0: &str = "r0";
    pub const R1: &str = "r1";
}

/// Aggregates over the trials at one sample size.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Summary {
    pub n: usize,
    pub trials: usize,
    pub abstain_frequency: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fdr_violation_frequency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fndr_violation_frequency: Option<f64>,
    /// Median of the per-trial regret (`+∞` for abstentions).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_regret: Option<ExtendedRate>,
    /// Mean regret over the non-abstaining trials.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_regret: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimation_violations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimation_unverified: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_mismatches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint_satisfaction_frequency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excess_bound_frequency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint_satisfaction_frequency: Option<f64>,
    /// Median excess `R_1(ĥ) - R_1(h*)` (`+∞` for abstentions).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_excess: Option<ExtendedRate>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub degenerate_optimum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub tool_version: String,
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<Optimum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constrained_optimum: Option<ConstrainedOptimum>,
    pub summaries: Vec<Summary>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn summary(&self, n: usize) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.n == n)
    }

    pub fn write_records_csv<W: Write>(&self, w: W) -> Result<()> {
        write_records_csv(&self.records, w)
    }

    /// `records.csv` and `summary.json` inside `dir`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let csv = std::fs::File::create(dir.join("records.csv"))?;
        self.write_records_csv(std::io::BufWriter::new(csv))?;
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("summary.json"), json + "\n")?;
        Ok(())
    }
}

pub fn write_records_csv<W: Write>(records: &[TrialRecord], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record(r.csv_row())?;
    }
    out.flush()?;
    Ok(())
}

pub fn stream_id(n_index: usize, trial: usize) -> u64 {
    ((n_index as u64) << 32) | trial as u64
}

/// Runs the experiment named in the config.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.experiment {
        Experiment::BoundCheck => run_bound_check(cfg),
        Experiment::Consistency => run_consistency(cfg),
        Experiment::ConstrainedCheck => run_constrained_check(cfg),
    }
}

fn run_trials<T: Send>(workers: Option<usize>, trials: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::config(format!("worker pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(f).collect())
}

fn frequency(records: &[&TrialRecord], pred: impl Fn(&TrialRecord) -> bool) -> f64 {
    records.iter().filter(|r| pred(r)).count() as f64 / records.len() as f64
}

fn median(mut values: Vec<Measure>) -> ExtendedRate {
    values.sort_by(|a, b| a.sort_key().total_cmp(&b.sort_key()));
    let m = values.len();
    let key = |i: usize| values[i].sort_key();
    let v = if m % 2 == 1 { key(m / 2) } else { (key(m / 2 - 1) + key(m / 2)) / 2.0 };
    if v.is_finite() {
        ExtendedRate::Finite(v)
    } else {
        ExtendedRate::Infinite
    }
}

fn for_n(records: &[TrialRecord], n: usize) -> Vec<&TrialRecord> {
    records.iter().filter(|r| r.n == n).collect()
}

fn finish(
    cfg: &ExperimentConfig,
    start: Instant,
    records: Vec<TrialRecord>,
    summaries: Vec<Summary>,
    optimum: Option<Optimum>,
    constrained: Option<ConstrainedOptimum>,
) -> ExperimentReport {
    ExperimentReport {
        tool_version: TOOL_VERSION.to_string(),
        experiment: cfg.experiment,
        config: cfg.clone(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        optimum,
        constrained_optimum: constrained,
        summaries,
        records,
    }
}

/// Frequency with which some class member's empirical FDR (FNDR) deviates
/// from the true value by more than its penalty.
///
/// Members without discoveries (nondiscoveries) have an infinite penalty
/// and never violate.
pub fn run_bound_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.validate()?;
    let dist = cfg.distribution()?;
    let delta = cfg.delta.expect("validated");
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for (ni, &n) in cfg.n_grid.iter().enumerate() {
        let class = cfg.class_spec.resolve(n, dist.dim())?;
        let members = class.enumerate_with_codelengths(DEFAULT_ENUMERATION_CAP)?;
        let truth: Vec<RateBundle> = members.iter().map(|(h, _)| true_rates(&dist, h)).collect::<Result<_>>()?;
        let batch = run_trials(cfg.workers, cfg.trials, |t| {
            let stream = stream_id(ni, t);
            let data = sample_with(&dist, n, &mut stream_rng(cfg.seed, stream))?;
            bound_trial(&class, &data, &truth, delta).map(|(gap, flags)| TrialRecord {
                experiment: cfg.experiment,
                n,
                trial: t,
                seed_stream: stream,
                n_d: None,
                n_nd: None,
                abstained: false,
                regret_or_gap: gap,
                violation_flags: flags,
            })
        })?;
        records.extend(batch);
        let rs = for_n(&records, n);
        summaries.push(Summary {
            n,
            trials: rs.len(),
            fdr_violation_frequency: Some(frequency(&rs, |r| r.has_flag(flags::FDR))),
            fndr_violation_frequency: Some(frequency(&rs, |r| r.has_flag(flags::FNDR))),
            ..Summary::default()
        });
    }
    Ok(finish(cfg, start, records, summaries, None, None))
}

/// Largest `deviation - penalty` over both sides and every member, and the
/// sides on which it is positive.
fn bound_trial(
    class: &HypothesisClass,
    data: &Dataset,
    truth: &[RateBundle],
    delta: f64,
) -> Result<(Measure, Vec<&'static str>)> {
    let members = member_counts(class, data, DEFAULT_ENUMERATION_CAP)?;
    let (mut fdr_violation, mut fndr_violation) = (false, false);
    let mut gap = f64::NEG_INFINITY;
    for (m, t) in members.iter().zip(truth) {
        let cx = complexity(m.codelength_bits, delta);
        let c = &m.counts;
        if c.n_d > 0 {
            let dev = t.fdr.abs_diff(empirical_fdr(c)).to_f64();
            let phi = phi_from_complexity(cx, c.n_d, ZeroConvention::Infinity).to_f64();
            gap = gap.max(dev - phi);
            fdr_violation |= dev > phi;
        }
        if c.n_nd > 0 {
            let dev = t.fndr.abs_diff(empirical_fndr(c)).to_f64();
            let phi = phi_from_complexity(cx, c.n_nd, ZeroConvention::Infinity).to_f64();
            gap = gap.max(dev - phi);
            fndr_violation |= dev > phi;
        }
    }
    let mut flags = Vec::new();
    if fdr_violation {
        flags.push(flags::FDR);
    }
    if fndr_violation {
        flags.push(flags::FNDR);
    }
    // A sample where no member has either kind of prediction has nothing to bound.
    let gap = if gap.is_finite() { Measure::Value(gap) } else { Measure::Infinite };
    Ok((gap, flags))
}

/// Regret `E_λ(ĥ) - E*_λ` of the penalized rule over the schedule's
/// histogram class, with a per-draw check of the estimation-error
/// decomposition `E(ĥ) - min_Ĥ E <= 2 max_Ĥ |E - Ê|`.
pub fn run_consistency(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.validate()?;
    let dist = cfg.distribution()?;
    let lambda = cfg.lambda.expect("validated");
    let optimum = optimal_e_lambda(&dist, lambda)?;
    let degenerate = matches!(optimum.witness, OptimumWitness::Degenerate);
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for (ni, &n) in cfg.n_grid.iter().enumerate() {
        let class = cfg.class_spec.resolve(n, dist.dim())?;
        let batch = run_trials(cfg.workers, cfg.trials, |t| {
            let stream = stream_id(ni, t);
            let data = sample_with(&dist, n, &mut stream_rng(cfg.seed, stream))?;
            let result = learn_lambda(&class, &data, lambda)?;
            let mut flags = Vec::new();
            let regret = if result.abstained {
                if degenerate { Measure::DegenerateOptimum } else { Measure::Infinite }
            } else {
                let e_hat = true_e_lambda(&dist, &result.classifier, lambda)?;
                match check_estimation_error(&dist, &class, &data, lambda, &result, e_hat, optimum.value)? {
                    EstimationCheck::Verified => {}
                    EstimationCheck::Violated => flags.push(flags::ESTIMATION),
                    EstimationCheck::Unverified => flags.push(flags::ESTIMATION_UNVERIFIED),
                    EstimationCheck::SolverMismatch => flags.push(flags::SOLVER_MISMATCH),
                }
                match (degenerate, e_hat, optimum.value) {
                    (true, _, _) => Measure::DegenerateOptimum,
                    (false, ExtendedRate::Finite(e), ExtendedRate::Finite(opt)) => Measure::Value(e - opt),
                    _ => Measure::Infinite,
                }
            };
            Ok(TrialRecord {
                experiment: cfg.experiment,
                n,
                trial: t,
                seed_stream: stream,
                n_d: result.counts.map(|c| c.n_d),
                n_nd: result.counts.map(|c| c.n_nd),
                abstained: result.abstained,
                regret_or_gap: regret,
                violation_flags: flags,
            })
        })?;
        records.extend(batch);
        let rs = for_n(&records, n);
        let finite: Vec<f64> = rs
            .iter()
            .filter_map(|r| match r.regret_or_gap {
                Measure::Value(v) => Some(v),
                _ => None,
            })
            .collect();
        let count = |flag: &str| rs.iter().filter(|r| r.has_flag(flag)).count();
        summaries.push(Summary {
            n,
            trials: rs.len(),
            abstain_frequency: frequency(&rs, |r| r.abstained),
            median_regret: (!degenerate).then(|| median(rs.iter().map(|r| r.regret_or_gap).collect())),
            mean_regret: (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64),
            estimation_violations: Some(count(flags::ESTIMATION)),
            estimation_unverified: Some(count(flags::ESTIMATION_UNVERIFIED)),
            solver_mismatches: Some(count(flags::SOLVER_MISMATCH)),
            degenerate_optimum: degenerate,
            ..Summary::default()
        });
    }
    Ok(finish(cfg, start, records, summaries, Some(optimum), None))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationCheck {
    Verified,
    Violated,
    /// The class is too large to enumerate and the one-member lower bound
    /// on the right-hand side did not suffice.
    Unverified,
    /// Enumeration found an admissible member with a smaller penalized
    /// objective than the solver's.
    SolverMismatch,
}

/// Checks `E(ĥ) - min_{Ĥ_n} E <= 2 max_{Ĥ_n} |E - Ê|` for one draw, where
/// `Ê` is the penalized objective the rule minimizes.
///
/// Enumerable classes are checked exactly. Otherwise `E*_λ` stands in for
/// the minimum (it lower-bounds every classifier) and `2|E(ĥ) - Ê(ĥ)|` for
/// the maximum; the inequality then still follows when this weaker form
/// holds.
pub fn check_estimation_error(
    dist: &DiscreteDistribution,
    class: &HypothesisClass,
    data: &Dataset,
    lambda: f64,
    result: &LearnResult,
    e_hat: ExtendedRate,
    e_star: ExtendedRate,
) -> Result<EstimationCheck> {
    let schedule = make_schedule(data.len(), data.dim())?;
    let adm = schedule.admissibility();
    let e_hat = e_hat.to_f64();
    let enumerable = class.cardinality().is_some_and(|c| c <= DEFAULT_ENUMERATION_CAP);
    if !enumerable {
        let dev = (e_hat - result.objective_value.to_f64()).abs();
        let lhs = e_hat - e_star.to_f64();
        return Ok(if lhs.is_finite() && lhs <= 2.0 * dev + ESTIMATION_SLACK { EstimationCheck::Verified } else { EstimationCheck::Unverified });
    }
    let mut min_true = f64::INFINITY;
    let mut max_dev = 0.0f64;
    let mut min_penalized = ExtendedRate::Infinite;
    for m in member_counts(class, data, DEFAULT_ENUMERATION_CAP)? {
        if !adm.admits(&m.counts) {
            continue;
        }
        let penalized = penalized_objective_from_counts(&m.counts, m.codelength_bits, lambda, schedule.delta_n)?;
        let truth = true_e_lambda(dist, &m.classifier, lambda)?;
        min_true = min_true.min(truth.to_f64());
        max_dev = max_dev.max(truth.abs_diff(penalized).to_f64());
        if penalized < min_penalized {
            min_penalized = penalized;
        }
    }
    if min_penalized.abs_diff(result.objective_value).to_f64() > 1e-12 {
        return Ok(EstimationCheck::SolverMismatch);
    }
    Ok(if e_hat - min_true <= 2.0 * max_dev + ESTIMATION_SLACK { EstimationCheck::Verified } else { EstimationCheck::Violated })
}

/// The two guarantees of the constrained rules, checked against the true
/// rates: `R_0(ĥ) <= α + 2φ_0(ĥ)` and `R_1(ĥ) <= R_1(h*) + 2φ_1(h*)`, where
/// `h*` is the true constrained optimum over the class and both penalties
/// use the draw's counts.
pub fn run_constrained_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    cfg.validate()?;
    let dist = cfg.distribution()?;
    let spec = cfg.constrained_spec()?;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    let mut reported_optimum = None;
    for (ni, &n) in cfg.n_grid.iter().enumerate() {
        let class = cfg.class_spec.resolve(n, dist.dim())?;
        let optimum = constrained_optimum(&dist, &class, &spec)?;
        let batch = run_trials(cfg.workers, cfg.trials, |t| {
            let stream = stream_id(ni, t);
            let data = sample_with(&dist, n, &mut stream_rng(cfg.seed, stream))?;
            let result = learn_constrained(&class, &data, &spec)?;
            let (excess, flags) = constrained_trial(&dist, &class, &data, &spec, &result, &optimum)?;
            Ok(TrialRecord {
                experiment: cfg.experiment,
                n,
                trial: t,
                seed_stream: stream,
                n_d: result.counts.map(|c| c.n_d),
                n_nd: result.counts.map(|c| c.n_nd),
                abstained: result.abstained,
                regret_or_gap: excess,
                violation_flags: flags,
            })
        })?;
        records.extend(batch);
        let rs = for_n(&records, n);
        summaries.push(Summary {
            n,
            trials: rs.len(),
            abstain_frequency: frequency(&rs, |r| r.abstained),
            constraint_satisfaction_frequency: Some(frequency(&rs, |r| !r.has_flag(flags::R0))),
            excess_bound_frequency: Some(frequency(&rs, |r| !r.has_flag(flags::R1))),
            joint_satisfaction_frequency: Some(frequency(&rs, |r| r.violation_flags.is_empty())),
            median_excess: Some(median(rs.iter().map(|r| r.regret_or_gap).collect())),
            ..Summary::default()
        });
        reported_optimum.get_or_insert(optimum);
    }
    Ok(finish(cfg, start, records, summaries, None, reported_optimum))
}

/// `(R_1, R_0)` of a rate bundle for the given rule.
fn errors_of(criterion: &Criterion, r: &RateBundle) -> (ExtendedRate, ExtendedRate) {
    match criterion {
        Criterion::Fdr { .. } => (r.fndr, r.fdr),
        Criterion::NeymanPearson { .. } => (ExtendedRate::Finite(r.fnr), ExtendedRate::Finite(r.fpr)),
        Criterion::PrecisionRecall { .. } => (r.fdr, ExtendedRate::Finite(r.fnr)),
        Criterion::Weighted { .. } => unreachable!("constrained criteria only"),
    }
}

/// `(α, φ_1, φ_0)` for a classifier's counts on the draw.
fn penalties_of(spec: &ObjectiveSpec, c: &crate::model::ConfusionCounts, cx: f64) -> (f64, ExtendedRate, ExtendedRate) {
    use ZeroConvention::{Infinity, One};
    let pen = |denom, zero| phi_from_complexity(cx, denom, zero);
    match spec.criterion {
        Criterion::Fdr { alpha } => (alpha, pen(c.n_nd, Infinity), pen(c.n_d, Infinity)),
        Criterion::NeymanPearson { alpha } => (alpha, pen(c.n1, One), pen(c.n0, One)),
        Criterion::PrecisionRecall { beta } => (1.0 - beta, pen(c.n_d, Infinity), pen(c.n1, One)),
        Criterion::Weighted { .. } => unreachable!("constrained criteria only"),
    }
}

fn constrained_trial(
    dist: &DiscreteDistribution,
    class: &HypothesisClass,
    data: &Dataset,
    spec: &ObjectiveSpec,
    result: &LearnResult,
    optimum: &ConstrainedOptimum,
) -> Result<(Measure, Vec<&'static str>)> {
    let mut flags = Vec::new();
    let star = match &optimum.witness {
        Some(h) => {
            let (r1, _) = errors_of(&spec.criterion, &true_rates(dist, h)?);
            let c = confusion_counts(h, data)?;
            let (_, phi1, _) = penalties_of(spec, &c, complexity(optimum.codelength_bits, spec.delta));
            Some((r1, phi1))
        }
        None => None,
    };
    if result.abstained {
        // Abstaining is consistent with the guarantees only when no member is truly feasible.
        if star.is_some() {
            flags.push(flags::R1);
        }
        return Ok((Measure::Infinite, flags));
    }
    let counts = result.counts.expect("selected classifiers carry counts");
    let (r1, r0) = errors_of(&spec.criterion, &true_rates(dist, &result.classifier)?);
    let bits = codelength_of(class, &result.classifier)?;
    let (level, _, phi0) = penalties_of(spec, &counts, complexity(bits, spec.delta));
    if r0 > 2.0 * phi0 + level {
        flags.push(flags::R0);
    }
    let excess = match star {
        Some((r1_star, phi1_star)) => {
            if r1 > 2.0 * phi1_star + r1_star {
                flags.push(flags::R1);
            }
            match (r1, r1_star) {
                (ExtendedRate::Finite(a), ExtendedRate::Finite(b)) => Measure::Value(a - b),
                _ => Measure::from_rate(r1),
            }
        }
        None => Measure::from_rate(r1),
    };
    Ok((excess, flags))
}

fn codelength_of(class: &HypothesisClass, h: &Classifier) -> Result<f64> {
    if let Some(bits) = class.uniform_codelength() {
        return Ok(bits);
    }
    class
        .enumerate_with_codelengths(DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .find(|(m, _)| m == h)
        .map(|(_, bits)| bits)
        .ok_or_else(|| Error::config("selected classifier is not a class member"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Cell;

    fn config(experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            distribution: DistributionSource::Inline(DiscreteDistribution::uniform(1, 1, &[0.2, 0.8]).unwrap()),
            class_spec: ClassSpec::Threshold { m: 3, direction: Direction::Upper },
            n_grid: vec![50],
            trials: 20,
            delta: Some(0.1),
            lambda: Some(1.0),
            alpha: Some(0.25),
            beta: Some(0.8),
            mode: Some(Mode::Fdr),
            seed: 7,
            workers: Some(1),
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(Experiment::BoundCheck);
        assert!(cfg.validate().is_ok());
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = config(Experiment::Consistency);
        cfg.n_grid = vec![2];
        assert!(cfg.validate().is_err());
        let mut cfg = config(Experiment::ConstrainedCheck);
        cfg.mode = None;
        assert!(cfg.validate().is_err());
        let mut cfg = config(Experiment::BoundCheck);
        cfg.delta = Some(1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_field_names() {
        let text = r#"{
            "experiment": "constrained_check",
            "distribution": {"d": 1, "k_star": 1, "cells": [{"mass": 0.5, "eta": 0.2}, {"mass": 0.5, "eta": 0.8}]},
            "class_spec": {"kind": "threshold", "m": 3},
            "n_grid": [50], "trials": 20, "delta": 0.1, "alpha": 0.25, "mode": "np", "seed": 7
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.mode, Some(Mode::Np));
        assert!(cfg.validate().is_ok());
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<ExperimentConfig>(&text.replace("\"seed\"", "\"sede\"")).is_err());
    }

    #[test]
    fn pure_class_one_never_violates() {
        // Every label is 1, so h ≡ 1 has R_D = R̂_D = 0.
        let dist = DiscreteDistribution::uniform(1, 0, &[1.0]).unwrap();
        let ones = crate::model::CellLabeling::new(0, 1, vec![true]).unwrap();
        let class = HypothesisClass::explicit(1, vec![Classifier::Cells(ones)]).unwrap();
        let data = crate::oracle::sample(&dist, 40, 1).unwrap();
        let truth = vec![true_rates(&dist, &enumerate_one(&class)).unwrap()];
        let (_, flags) = bound_trial(&class, &data, &truth, 0.1).unwrap();
        assert!(flags.is_empty());
    }

    fn enumerate_one(class: &HypothesisClass) -> Classifier {
        class.enumerate_with_codelengths(10).unwrap().remove(0).0
    }

    #[test]
    fn near_vacuous_delta() {
        let mut cfg = config(Experiment::BoundCheck);
        cfg.delta = Some(0.999);
        let report = run(&cfg).unwrap();
        let s = &report.summaries[0];
        assert!(s.fdr_violation_frequency.unwrap() <= 0.999);
        assert_eq!(report.records.len(), 20);
    }

    #[test]
    fn degenerate_distribution_is_flagged() {
        let mut cfg = config(Experiment::Consistency);
        cfg.distribution = DistributionSource::Inline(
            DiscreteDistribution::new(1, 1, vec![Cell { mass: 1.0, eta: 0.3 }, Cell { mass: 0.0, eta: 0.5 }]).unwrap(),
        );
        cfg.class_spec = ClassSpec::Schedule;
        let report = run(&cfg).unwrap();
        assert!(report.summaries[0].degenerate_optimum);
        assert!(report.records.iter().all(|r| r.regret_or_gap == Measure::DegenerateOptimum));
    }

    #[test]
    fn tiny_samples_abstain() {
        let mut cfg = config(Experiment::Consistency);
        cfg.class_spec = ClassSpec::Schedule;
        cfg.n_grid = vec![3];
        let report = run(&cfg).unwrap();
        // ⌈3/ln 3⌉ = 3 discoveries and 3 nondiscoveries cannot both occur in 3 points.
        assert_eq!(report.summaries[0].abstain_frequency, 1.0);
        assert_eq!(report.summaries[0].median_regret, Some(ExtendedRate::Infinite));
    }

    #[test]
    fn csv_layout() {
        let cfg = config(Experiment::ConstrainedCheck);
        let report = run(&cfg).unwrap();
        let mut buf = Vec::new();
        report.write_records_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.count(), 20);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn median_handles_infinity() {
        let m = median(vec![Measure::Value(0.2), Measure::Infinite, Measure::Value(0.1)]);
        assert_eq!(m, ExtendedRate::Finite(0.2));
        let m = median(vec![Measure::Value(0.2), Measure::Infinite]);
        assert_eq!(m, ExtendedRate::Infinite);
    }
}

//! Learning rules over finite classes.
//!
//! - [`learn_lambda`]: minimize the penalized weighted criterion
//!   `R̂_ND + φ_ND + λ(R̂_D + φ_D)` over the classifiers whose empirical
//!   discovery and nondiscovery fractions both reach `p_n`, with
//!   `δ_n = 1/n²` and `p_n = 1/ln n`.
//! - [`learn_constrained`]: minimize a penalized error subject to a
//!   penalty-relaxed constraint on a second error (FDR, Neyman-Pearson and
//!   precision/recall variants).
//! - [`histogram_exact_minimizer`]: exact solver for histogram classes of any
//!   size, exploiting that every criterion depends on the set of cells
//!   labeled 1 only through the number of class-0 and class-1 training
//!   points it contains.
//! - [`brute_force_minimizer`]: exhaustive reference implementation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{empirical_fdr, empirical_fndr, empirical_fpr_fnr, empirical_precision_recall};
use crate::model::{
    cell_index_unchecked, confusion_counts, enumerate_class_capped, CellLabeling, Classifier, ConfusionCounts, Dataset,
    Direction, HypothesisClass, DEFAULT_ENUMERATION_CAP,
};
use crate::penalties::{check_delta, complexity, phi, phi_from_complexity, PenaltyInput, ZeroConvention};
use crate::rate::ExtendedRate;

/// Default memory budget of the histogram solver's reachability tables.
pub const DEFAULT_DP_MEMORY_BUDGET: usize = 1 << 30;

/// Sample-size dependent parameters of the penalized rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n: usize,
    /// `1/n²`.
    pub delta_n: f64,
    /// `1/ln n`.
    pub p_n: f64,
    /// Histogram level: the largest `k` with `2^(k·d) <= n/(ln n)²`,
    /// with the bound replaced by its running minimum from the right so
    /// that `k_n` never decreases.
    pub k_n: u32,
}

impl Schedule {
    pub fn admissibility(&self) -> Admissibility {
        Admissibility::from_fraction(self.n, self.p_n)
    }
}

pub fn make_schedule(n: usize, d: usize) -> Result<Schedule> {
    if n < 3 {
        return Err(Error::config(format!("schedules need n >= 3, got {n}")));
    }
    if d == 0 {
        return Err(Error::config("dimension must be positive"));
    }
    let nf = n as f64;
    // n/(ln n)² decreases up to e² and increases afterwards; among integers
    // its minimum over [3, ∞) sits at n = 7.
    let m = n.max(7) as f64;
    let budget = m / (m.ln() * m.ln());
    let mut k_n = 0u32;
    while ((k_n as u64 + 1) * d as u64) < 63 && ((1u64 << ((k_n as u64 + 1) * d as u64)) as f64) <= budget {
        k_n += 1;
    }
    Ok(Schedule { n, delta_n: 1.0 / (nf * nf), p_n: 1.0 / nf.ln(), k_n })
}

/// Minimum numbers of discoveries and nondiscoveries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Admissibility {
    pub min_discoveries: u64,
    pub min_nondiscoveries: u64,
}

impl Admissibility {
    pub const NONE: Admissibility = Admissibility { min_discoveries: 0, min_nondiscoveries: 0 };

    /// `n_D/n >= p` and `n_ND/n >= p`, i.e. both counts at least `⌈n·p⌉`.
    pub fn from_fraction(n: usize, p: f64) -> Self {
        let m = (n as f64 * p).ceil().max(0.0) as u64;
        Admissibility { min_discoveries: m, min_nondiscoveries: m }
    }

    #[inline]
    pub fn admits(&self, c: &ConfusionCounts) -> bool {
        c.n_d >= self.min_discoveries && c.n_nd >= self.min_nondiscoveries
    }
}

/// Members of an enumerable class that pass the admissibility filter.
pub fn admissible_set(class: &HypothesisClass, data: &Dataset, p: f64) -> Result<Vec<Classifier>> {
    let rule = Admissibility::from_fraction(data.len(), p);
    Ok(member_counts(class, data, DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .filter(|m| rule.admits(&m.counts))
        .map(|m| m.classifier)
        .collect())
}

/// Which error is minimized and which one is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Criterion {
    /// Minimize `R̂_ND + φ_ND + λ(R̂_D + φ_D)`.
    Weighted { lambda: f64 },
    /// Minimize `R̂_ND + φ_ND` s.t. `R̂_D <= α + φ_D`.
    Fdr { alpha: f64 },
    /// Minimize `R̂_FN + φ_FN` s.t. `R̂_FP <= α + φ_FP`.
    NeymanPearson { alpha: f64 },
    /// Maximize `Q̂_PR - φ_D` s.t. `Q̂_RE >= β - φ_FN`.
    PrecisionRecall { beta: f64 },
}

impl Criterion {
    pub fn is_constrained(&self) -> bool {
        !matches!(self, Criterion::Weighted { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub criterion: Criterion,
    pub delta: f64,
    #[serde(default)]
    pub admissibility: Admissibility,
}

impl ObjectiveSpec {
    pub fn weighted(lambda: f64, delta: f64, admissibility: Admissibility) -> Self {
        ObjectiveSpec { criterion: Criterion::Weighted { lambda }, delta, admissibility }
    }

    pub fn constrained(criterion: Criterion, delta: f64) -> Self {
        ObjectiveSpec { criterion, delta, admissibility: Admissibility::NONE }
    }

    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        let level_ok = |v: f64| v > 0.0 && v < 1.0;
        match self.criterion {
            Criterion::Weighted { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::config(format!("lambda must be positive and finite, got {lambda}")))
            }
            Criterion::Fdr { alpha } | Criterion::NeymanPearson { alpha } if !level_ok(alpha) => {
                Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")))
            }
            Criterion::PrecisionRecall { beta } if !level_ok(beta) => {
                Err(Error::config(format!("beta must lie in (0, 1), got {beta}")))
            }
            _ => Ok(()),
        }
    }
}

/// Bounds on the true errors of the selected classifier that hold jointly
/// with probability at least `1 - 2δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBounds {
    /// Upper bound on the minimized error: `E_λ` for the weighted rule,
    /// FNDR, FNR, or FDR (one minus precision) for the constrained rules.
    pub objective_upper: ExtendedRate,
    /// Upper bound `α + 2φ_0` on the constrained error: FDR, FPR, or FNR
    /// (one minus recall). `None` for the weighted rule.
    pub constraint_upper: Option<ExtendedRate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnResult {
    /// The selected classifier, or the all-zeros labeling when abstaining.
    pub classifier: Classifier,
    pub abstained: bool,
    /// The minimized quantity; `+∞` when abstaining. For precision/recall
    /// this is `R̂_D + φ_D = 1 - (Q̂_PR - φ_D)`.
    pub objective_value: ExtendedRate,
    pub counts: Option<ConfusionCounts>,
    pub certified_bounds: Option<CertifiedBounds>,
    /// Number of admissible candidates. Enumerating solvers count
    /// classifiers; the histogram solver counts distinct `(fd, n_D)` count
    /// profiles.
    pub admissible_count: u64,
    /// Admissible candidates that also satisfy the relaxed constraint.
    pub feasible_count: u64,
}

/// Objective evaluation shared by the scanning and dynamic-programming
/// solvers.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Evaluator {
    criterion: Criterion,
    delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Evaluation {
    pub feasible: bool,
    pub value: ExtendedRate,
}

impl Evaluator {
    pub(crate) fn new(spec: &ObjectiveSpec) -> Self {
        Evaluator { criterion: spec.criterion, delta: spec.delta }
    }

    pub(crate) fn complexity(&self, codelength_bits: f64) -> f64 {
        complexity(codelength_bits, self.delta)
    }

    pub(crate) fn evaluate(&self, c: &ConfusionCounts, complexity: f64) -> Evaluation {
        self.evaluate_with(c, |denom, zero| phi_from_complexity(complexity, denom, zero))
    }

    /// `pen(denom, convention)` must return the penalty for the class
    /// complexity the caller is working with.
    #[inline]
    pub(crate) fn evaluate_with(
        &self,
        c: &ConfusionCounts,
        pen: impl Fn(u64, ZeroConvention) -> ExtendedRate,
    ) -> Evaluation {
        use ZeroConvention::{Infinity, One};
        match self.criterion {
            Criterion::Weighted { lambda } => {
                let nd = ExtendedRate::ratio(c.fnd, c.n_nd) + pen(c.n_nd, Infinity);
                let d = ExtendedRate::ratio(c.fd, c.n_d) + pen(c.n_d, Infinity);
                Evaluation { feasible: true, value: nd + lambda * d }
            }
            Criterion::Fdr { alpha } => {
                let phi_d = pen(c.n_d, Infinity);
                Evaluation {
                    feasible: ExtendedRate::ratio(c.fd, c.n_d) <= phi_d + alpha,
                    value: ExtendedRate::ratio(c.fnd, c.n_nd) + pen(c.n_nd, Infinity),
                }
            }
            Criterion::NeymanPearson { alpha } => {
                let (fpr, fnr) = empirical_fpr_fnr(c);
                let phi_fp = pen(c.n0, One);
                Evaluation { feasible: ExtendedRate::Finite(fpr) <= phi_fp + alpha, value: pen(c.n1, One) + fnr }
            }
            Criterion::PrecisionRecall { beta } => {
                let (_, fnr) = empirical_fpr_fnr(c);
                let recall = 1.0 - fnr;
                let phi_fn = pen(c.n1, One).to_f64();
                Evaluation {
                    feasible: recall >= beta - phi_fn,
                    value: ExtendedRate::ratio(c.fd, c.n_d) + pen(c.n_d, Infinity),
                }
            }
        }
    }

    pub(crate) fn certificates(&self, c: &ConfusionCounts, complexity: f64, value: ExtendedRate) -> CertifiedBounds {
        use ZeroConvention::{Infinity, One};
        let pen = |denom, zero| phi_from_complexity(complexity, denom, zero);
        let constraint_upper = match self.criterion {
            Criterion::Weighted { .. } => None,
            Criterion::Fdr { alpha } => Some(2.0 * pen(c.n_d, Infinity) + alpha),
            Criterion::NeymanPearson { alpha } => Some(2.0 * pen(c.n0, One) + alpha),
            Criterion::PrecisionRecall { beta } => Some(2.0 * pen(c.n1, One) + (1.0 - beta)),
        };
        CertifiedBounds { objective_upper: value, constraint_upper }
    }
}

/// One class member with its codelength and counts on a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub classifier: Classifier,
    pub codelength_bits: f64,
    pub counts: ConfusionCounts,
}

/// Counts of every member of an enumerable class.
///
/// Threshold classes are counted from sorted prefix sums and enumerable
/// histogram classes from per-cell totals, so each sample is scanned once.
pub fn member_counts(class: &HypothesisClass, data: &Dataset, cap: u64) -> Result<Vec<Member>> {
    if class.dim() != data.dim() {
        return Err(Error::Dimension { expected: class.dim(), found: data.dim() });
    }
    let (n0, n1) = data.class_counts();
    match class {
        HypothesisClass::Threshold { cuts, direction } => {
            if cuts.len() as u64 > cap {
                return Err(Error::too_large(format!("{} thresholds exceed the cap {cap}", cuts.len())));
            }
            let bits = class.log2_cardinality();
            let mut sorted: Vec<(f64, bool)> = data.iter().map(|(x, y)| (x[0], y)).collect();
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            // ones_below[i] = number of label-1 points among the i smallest.
            let mut ones_below = Vec::with_capacity(sorted.len() + 1);
            ones_below.push(0u64);
            for &(_, y) in &sorted {
                ones_below.push(ones_below.last().unwrap() + y as u64);
            }
            Ok(cuts
                .iter()
                .map(|&cut| {
                    let below = sorted.partition_point(|&(x, _)| x < cut);
                    let ones_lo = ones_below[below];
                    let zeros_lo = below as u64 - ones_lo;
                    let (a, b) = match direction {
                        Direction::Upper => (n0 - zeros_lo, n1 - ones_lo),
                        Direction::Lower => (zeros_lo, ones_lo),
                    };
                    Member {
                        classifier: Classifier::Threshold(crate::model::ThresholdRule { cut, direction: *direction }),
                        codelength_bits: bits,
                        counts: ConfusionCounts::from_discoveries(a, b, n0, n1),
                    }
                })
                .collect())
        }
        HypothesisClass::Histogram { k, d } => {
            let members = enumerate_class_capped(class, cap)?;
            let bits = class.log2_cardinality();
            let cells = 1usize << (*k as usize * *d);
            let mut per_cell = vec![(0u64, 0u64); cells];
            for (x, y) in data.iter() {
                let c = &mut per_cell[cell_index_unchecked(x, *k)];
                if y {
                    c.1 += 1;
                } else {
                    c.0 += 1;
                }
            }
            Ok(members
                .into_iter()
                .map(|h| {
                    let (mut a, mut b) = (0, 0);
                    if let Classifier::Cells(cl) = &h {
                        for (i, &lab) in cl.labels.iter().enumerate() {
                            if lab {
                                a += per_cell[i].0;
                                b += per_cell[i].1;
                            }
                        }
                    }
                    Member { classifier: h, codelength_bits: bits, counts: ConfusionCounts::from_discoveries(a, b, n0, n1) }
                })
                .collect())
        }
        HypothesisClass::Explicit { .. } => class
            .enumerate_with_codelengths(cap)?
            .into_iter()
            .map(|(h, bits)| {
                let counts = confusion_counts(&h, data)?;
                Ok(Member { classifier: h, codelength_bits: bits, counts })
            })
            .collect(),
    }
}

fn abstain_fallback(class: &HypothesisClass) -> Result<Classifier> {
    let (k, d) = match class {
        HypothesisClass::Histogram { k, d } => (*k, *d),
        other => (0, other.dim()),
    };
    Ok(Classifier::Cells(CellLabeling::all_zeros(k, d)?))
}

fn abstain(class: &HypothesisClass, admissible: u64, feasible: u64) -> Result<LearnResult> {
    Ok(LearnResult {
        classifier: abstain_fallback(class)?,
        abstained: true,
        objective_value: ExtendedRate::Infinite,
        counts: None,
        certified_bounds: None,
        admissible_count: admissible,
        feasible_count: feasible,
    })
}

/// Dispatches to the histogram solver or a scan over the members.
pub fn solve(class: &HypothesisClass, data: &Dataset, spec: &ObjectiveSpec) -> Result<LearnResult> {
    spec.validate()?;
    match class {
        HypothesisClass::Histogram { k, d } => {
            if *d != data.dim() {
                return Err(Error::Dimension { expected: *d, found: data.dim() });
            }
            histogram_exact_minimizer(data, *k, spec)
        }
        _ => scan_minimizer(class, data, spec),
    }
}

fn scan_minimizer(class: &HypothesisClass, data: &Dataset, spec: &ObjectiveSpec) -> Result<LearnResult> {
    let eval = Evaluator::new(spec);
    let members = member_counts(class, data, DEFAULT_ENUMERATION_CAP)?;
    let mut best: Option<(usize, ExtendedRate, f64)> = None;
    let (mut admissible, mut feasible) = (0u64, 0u64);
    for (i, m) in members.iter().enumerate() {
        if !spec.admissibility.admits(&m.counts) {
            continue;
        }
        admissible += 1;
        let cx = eval.complexity(m.codelength_bits);
        let e = eval.evaluate(&m.counts, cx);
        if !e.feasible {
            continue;
        }
        feasible += 1;
        if best.is_none_or(|(_, v, _)| e.value < v) {
            best = Some((i, e.value, cx));
        }
    }
    match best {
        None => abstain(class, admissible, feasible),
        Some((i, value, cx)) => {
            let m = &members[i];
            Ok(LearnResult {
                classifier: m.classifier.clone(),
                abstained: false,
                objective_value: value,
                counts: Some(m.counts),
                certified_bounds: Some(eval.certificates(&m.counts, cx, value)),
                admissible_count: admissible,
                feasible_count: feasible,
            })
        }
    }
}

/// The penalized weighted rule with the sample-size schedule:
/// `δ_n = 1/n²` and admissibility fraction `p_n = 1/ln n`.
pub fn learn_lambda(class: &HypothesisClass, data: &Dataset, lambda: f64) -> Result<LearnResult> {
    let schedule = make_schedule(data.len(), data.dim())?;
    let spec = ObjectiveSpec::weighted(lambda, schedule.delta_n, schedule.admissibility());
    solve(class, data, &spec)
}

/// A constrained rule; infeasibility yields an abstaining result.
pub fn learn_constrained(class: &HypothesisClass, data: &Dataset, spec: &ObjectiveSpec) -> Result<LearnResult> {
    if !spec.criterion.is_constrained() {
        return Err(Error::config("learn_constrained needs a constrained criterion"));
    }
    solve(class, data, spec)
}

pub fn histogram_exact_minimizer(data: &Dataset, k: u32, spec: &ObjectiveSpec) -> Result<LearnResult> {
    histogram_exact_minimizer_with_budget(data, k, spec, DEFAULT_DP_MEMORY_BUDGET)
}

/// Exact minimization over all labelings of the level-`k` dyadic cells.
///
/// With `a_i`, `b_i` the class-0 and class-1 counts of cell `i`, labeling a
/// set `S` of cells 1 gives `fd = A_S`, `n_D = A_S + B_S` and
/// `fnd = n1 - B_S`, so every criterion is a function of `(A_S, B_S)`. The
/// solver builds the set of reachable `(A, B)` pairs with a bitset subset-sum
/// recursion over the nonempty cells, remembering for each pair the first
/// cell that reached it; evaluates every admissible, feasible pair; and walks
/// the back-pointers to recover a witness. Empty cells are labeled 0.
///
/// Among pairs with equal objective the smallest `(A, B)` in lexicographic
/// order wins.
pub fn histogram_exact_minimizer_with_budget(
    data: &Dataset,
    k: u32,
    spec: &ObjectiveSpec,
    budget_bytes: usize,
) -> Result<LearnResult> {
    spec.validate()?;
    let d = data.dim();
    let class = HypothesisClass::histogram(k, d)?;
    let bits = class.log2_cardinality();

    let mut cells: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for (x, y) in data.iter() {
        let e = cells.entry(cell_index_unchecked(x, k)).or_default();
        if y {
            e.1 += 1;
        } else {
            e.0 += 1;
        }
    }
    let cell_ids: Vec<usize> = cells.keys().copied().collect();
    let weights: Vec<(usize, usize)> = cells.values().map(|&(a, b)| (a as usize, b as usize)).collect();
    if weights.len() >= u16::MAX as usize {
        return Err(Error::too_large(format!("{} nonempty cells exceed the solver's index width", weights.len())));
    }

    let (n0, n1) = data.class_counts();
    let rows = n0 as usize + 1;
    let cols = n1 as usize + 1;
    let words = cols.div_ceil(64);
    let bytes = rows
        .checked_mul(cols)
        .and_then(|pairs| pairs.checked_mul(std::mem::size_of::<u16>()))
        .and_then(|b| b.checked_add(rows * words * 8))
        .unwrap_or(usize::MAX);
    if bytes > budget_bytes {
        return Err(Error::too_large(format!(
            "reachability tables need {bytes} bytes, budget is {budget_bytes}"
        )));
    }

    let mut reach = vec![0u64; rows * words];
    let mut first = vec![u16::MAX; rows * cols];
    reach[0] = 1;
    let (mut max_a, mut max_b) = (0usize, 0usize);
    for (ci, &(a, b)) in weights.iter().enumerate() {
        let new_max_a = max_a + a;
        let new_max_b = max_b + b;
        let top_word = new_max_b / 64;
        let (ws, bs) = (b / 64, b % 64);
        for dst_row in (a..=new_max_a).rev() {
            let src_row = dst_row - a;
            // Only rows reachable before this cell can contribute.
            if src_row > max_a {
                continue;
            }
            let src = src_row * words;
            let dst = dst_row * words;
            for w in (ws..=top_word).rev() {
                let lo = w - ws;
                let mut shifted = reach[src + lo] << bs;
                if bs > 0 && lo > 0 {
                    shifted |= reach[src + lo - 1] >> (64 - bs);
                }
                let fresh = shifted & !reach[dst + w];
                if fresh != 0 {
                    reach[dst + w] |= fresh;
                    let mut f = fresh;
                    while f != 0 {
                        let bit = f.trailing_zeros() as usize;
                        first[dst_row * cols + w * 64 + bit] = ci as u16;
                        f &= f - 1;
                    }
                }
            }
        }
        max_a = new_max_a;
        max_b = new_max_b;
    }

    // Penalties depend on the pair only through n_D, n_ND, n0, n1.
    let eval = Evaluator::new(spec);
    let cx = eval.complexity(bits);
    let n = (n0 + n1) as usize;
    let phi_inf: Vec<ExtendedRate> =
        (0..=n as u64).map(|m| phi_from_complexity(cx, m, ZeroConvention::Infinity)).collect();
    let phi_one_n0 = phi_from_complexity(cx, n0, ZeroConvention::One);
    let phi_one_n1 = phi_from_complexity(cx, n1, ZeroConvention::One);
    let pen = |denom: u64, zero: ZeroConvention| match zero {
        ZeroConvention::Infinity => phi_inf[denom as usize],
        ZeroConvention::One if denom == n0 => phi_one_n0,
        ZeroConvention::One if denom == n1 => phi_one_n1,
        ZeroConvention::One => phi_from_complexity(cx, denom, ZeroConvention::One),
    };

    let adm = spec.admissibility;
    let mut best: Option<(ExtendedRate, usize, usize)> = None;
    let (mut admissible, mut feasible) = (0u64, 0u64);
    for a in 0..rows {
        let row = &reach[a * words..(a + 1) * words];
        for (w, &word) in row.iter().enumerate() {
            let mut bitsleft = word;
            while bitsleft != 0 {
                let bit = bitsleft.trailing_zeros() as usize;
                bitsleft &= bitsleft - 1;
                let b = w * 64 + bit;
                let c = ConfusionCounts::from_discoveries(a as u64, b as u64, n0, n1);
                if !adm.admits(&c) {
                    continue;
                }
                admissible += 1;
                let e = eval.evaluate_with(&c, pen);
                if !e.feasible {
                    continue;
                }
                feasible += 1;
                if best.is_none_or(|(v, _, _)| e.value < v) {
                    best = Some((e.value, a, b));
                }
            }
        }
    }

    let Some((value, a_star, b_star)) = best else {
        return abstain(&class, admissible, feasible);
    };

    let mut labeling = CellLabeling::all_zeros(k, d)?;
    let (mut a, mut b) = (a_star, b_star);
    while (a, b) != (0, 0) {
        let ci = first[a * cols + b] as usize;
        debug_assert!(ci < weights.len(), "reachable pair without a back-pointer");
        labeling.labels[cell_ids[ci]] = true;
        a -= weights[ci].0;
        b -= weights[ci].1;
    }
    let counts = ConfusionCounts::from_discoveries(a_star as u64, b_star as u64, n0, n1);
    Ok(LearnResult {
        classifier: Classifier::Cells(labeling),
        abstained: false,
        objective_value: value,
        counts: Some(counts),
        certified_bounds: Some(eval.certificates(&counts, cx, value)),
        admissible_count: admissible,
        feasible_count: feasible,
    })
}

/// Exhaustive search over an enumerable class, with the same admissibility,
/// feasibility and tie-breaking rules as the main solvers but computed
/// directly from the per-classifier predictions and the public estimators.
pub fn brute_force_minimizer(class: &HypothesisClass, data: &Dataset, spec: &ObjectiveSpec) -> Result<LearnResult> {
    spec.validate()?;
    let candidates = class.enumerate_with_codelengths(DEFAULT_ENUMERATION_CAP)?;
    let mut best: Option<(Classifier, ConfusionCounts, ExtendedRate, f64)> = None;
    let (mut admissible, mut feasible) = (0u64, 0u64);
    for (h, bits) in candidates {
        let c = confusion_counts(&h, data)?;
        if c.n_d < spec.admissibility.min_discoveries || c.n_nd < spec.admissibility.min_nondiscoveries {
            continue;
        }
        admissible += 1;
        let (ok, value) = reference_value(&spec.criterion, &c, bits, spec.delta)?;
        if !ok {
            continue;
        }
        feasible += 1;
        let better = match &best {
            None => true,
            Some((_, _, v, _)) => value.total_cmp(v).is_lt(),
        };
        if better {
            best = Some((h, c, value, bits));
        }
    }
    match best {
        None => abstain(class, admissible, feasible),
        Some((h, c, value, bits)) => {
            let eval = Evaluator::new(spec);
            let cx = eval.complexity(bits);
            Ok(LearnResult {
                classifier: h,
                abstained: false,
                objective_value: value,
                counts: Some(c),
                certified_bounds: Some(eval.certificates(&c, cx, value)),
                admissible_count: admissible,
                feasible_count: feasible,
            })
        }
    }
}

/// `(feasible, value)` from the estimator and penalty definitions.
fn reference_value(criterion: &Criterion, c: &ConfusionCounts, bits: f64, delta: f64) -> Result<(bool, ExtendedRate)> {
    let phi_of = |denom, zero| -> Result<ExtendedRate> { Ok(phi(&PenaltyInput::new(bits, delta, denom)?, zero)) };
    Ok(match *criterion {
        Criterion::Weighted { lambda } => {
            let v = empirical_fndr(c)
                + phi_of(c.n_nd, ZeroConvention::Infinity)?
                + lambda * (empirical_fdr(c) + phi_of(c.n_d, ZeroConvention::Infinity)?);
            (true, v)
        }
        Criterion::Fdr { alpha } => {
            let fdr = empirical_fdr(c);
            let slack = phi_of(c.n_d, ZeroConvention::Infinity)? + alpha;
            (fdr <= slack, empirical_fndr(c) + phi_of(c.n_nd, ZeroConvention::Infinity)?)
        }
        Criterion::NeymanPearson { alpha } => {
            let (fpr, fnr) = empirical_fpr_fnr(c);
            let slack = phi_of(c.n0, ZeroConvention::One)?.to_f64() + alpha;
            (fpr <= slack, ExtendedRate::Finite(fnr) + phi_of(c.n1, ZeroConvention::One)?)
        }
        Criterion::PrecisionRecall { beta } => {
            let (precision, recall) = empirical_precision_recall(c);
            let ok = recall >= beta - phi_of(c.n1, ZeroConvention::One)?.to_f64();
            // Maximizing precision - φ_D is minimizing (1 - precision) + φ_D.
            let fdr = precision.map_or(ExtendedRate::Infinite, |p| ExtendedRate::Finite(1.0 - p));
            (ok, fdr + phi_of(c.n_d, ZeroConvention::Infinity)?)
        }
    })
}

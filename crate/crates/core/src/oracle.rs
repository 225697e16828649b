//! Piecewise-constant ground-truth distributions on a dyadic grid.
//!
//! `X` has a categorical law over the `2^(k*·d)` cells of level `k*` and is
//! uniform inside its cell; `P(Y = 1 | X)` is constant on each cell. True
//! rates of histogram and threshold classifiers are then exact finite sums.

use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::RateBundle;
use crate::learners::{Criterion, ObjectiveSpec};
use crate::model::{cell_index_unchecked, CellLabeling, Classifier, Dataset, Direction, HypothesisClass, DEFAULT_ENUMERATION_CAP};
use crate::rate::ExtendedRate;

/// Allowed deviation of the total mass from one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Largest distribution handled by [`optimal_e_lambda`].
pub const MAX_OPTIMUM_CELLS: usize = 20;

/// Points of the randomization grid swept by [`optimal_e_lambda`].
pub const GAMMA_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub mass: f64,
    pub eta: f64,
}

#[derive(Debug, Deserialize)]
struct RawDistribution {
    d: usize,
    k_star: u32,
    cells: Vec<Cell>,
}

/// Cells are listed in row-major order of the level-`k_star` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DiscreteDistribution {
    d: usize,
    k_star: u32,
    cells: Vec<Cell>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        DiscreteDistribution::new(raw.d, raw.k_star, raw.cells)
    }
}

/// Probabilities of the four prediction/label events.
#[derive(Debug, Clone, Copy, Default)]
struct JointMass {
    /// `P(h = 1, Y = 0)`.
    d0: f64,
    /// `P(h = 1, Y = 1)`.
    d1: f64,
    /// `P(h = 0, Y = 0)`.
    nd0: f64,
    /// `P(h = 0, Y = 1)`.
    nd1: f64,
}

impl JointMass {
    fn rates(&self) -> RateBundle {
        let p_d = self.d0 + self.d1;
        let p_nd = self.nd0 + self.nd1;
        let p0 = self.d0 + self.nd0;
        let p1 = self.d1 + self.nd1;
        let fdr = if p_d > 0.0 { ExtendedRate::Finite(self.d0 / p_d) } else { ExtendedRate::Infinite };
        let fndr = if p_nd > 0.0 { ExtendedRate::Finite(self.nd1 / p_nd) } else { ExtendedRate::Infinite };
        let fpr = if p0 > 0.0 { self.d0 / p0 } else { 0.0 };
        let fnr = if p1 > 0.0 { self.nd1 / p1 } else { 0.0 };
        RateBundle { fdr, fndr, fpr, fnr, precision: fdr.finite().map(|v| 1.0 - v), recall: 1.0 - fnr }
    }
}

impl DiscreteDistribution {
    pub fn new(d: usize, k_star: u32, cells: Vec<Cell>) -> Result<Self> {
        // Validates d > 0 and the grid size.
        let grid = CellLabeling::all_zeros(k_star, d)?.num_cells();
        if cells.len() != grid {
            return Err(Error::config(format!("level {k_star} in {d}D has {grid} cells, {} given", cells.len())));
        }
        for (i, c) in cells.iter().enumerate() {
            if !(c.mass >= 0.0 && c.mass.is_finite()) {
                return Err(Error::config(format!("cell {i} has invalid mass {}", c.mass)));
            }
            if !(0.0..=1.0).contains(&c.eta) {
                return Err(Error::config(format!("cell {i} has eta {} outside [0, 1]", c.eta)));
            }
        }
        let total: f64 = cells.iter().map(|c| c.mass).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::config(format!("cell masses sum to {total}, not 1")));
        }
        Ok(DiscreteDistribution { d, k_star, cells })
    }

    /// Equal masses with the given `η` per cell.
    pub fn uniform(d: usize, k_star: u32, etas: &[f64]) -> Result<Self> {
        let mass = 1.0 / etas.len().max(1) as f64;
        DiscreteDistribution::new(d, k_star, etas.iter().map(|&eta| Cell { mass, eta }).collect())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn k_star(&self) -> u32 {
        self.k_star
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// `P(Y = 1)`.
    pub fn p1(&self) -> f64 {
        self.cells.iter().map(|c| c.mass * c.eta).sum()
    }

    fn per_axis(&self) -> usize {
        1usize << self.k_star
    }

    fn joint(&self, fraction_labeled_one: &[f64]) -> JointMass {
        let mut j = JointMass::default();
        for (c, &f) in self.cells.iter().zip(fraction_labeled_one) {
            let (one, zero) = (c.mass * f, c.mass * (1.0 - f));
            j.d0 += one * (1.0 - c.eta);
            j.d1 += one * c.eta;
            j.nd0 += zero * (1.0 - c.eta);
            j.nd1 += zero * c.eta;
        }
        j
    }

    /// Fraction of each distribution cell's volume that `h` labels 1.
    fn fractions(&self, h: &Classifier) -> Result<Vec<f64>> {
        if h.dim() != self.d {
            return Err(Error::Dimension { expected: self.d, found: h.dim() });
        }
        let s = self.per_axis();
        match h {
            Classifier::Threshold(t) => {
                let w = 1.0 / s as f64;
                Ok((0..s)
                    .map(|j| {
                        let (lo, hi) = (j as f64 * w, (j + 1) as f64 * w);
                        let cut = t.cut.clamp(lo, hi);
                        let ones = match t.direction {
                            Direction::Upper => hi - cut,
                            Direction::Lower => cut - lo,
                        };
                        ones / w
                    })
                    .collect())
            }
            Classifier::Cells(lab) if lab.k <= self.k_star => {
                // Each distribution cell sits inside one classifier cell.
                let shift = self.k_star - lab.k;
                Ok((0..self.cells.len())
                    .map(|j| {
                        let coarse = self.axes(j).iter().fold(0usize, |acc, &i| (acc << lab.k) | (i >> shift));
                        if lab.labels[coarse] { 1.0 } else { 0.0 }
                    })
                    .collect())
            }
            Classifier::Cells(lab) => {
                // Each distribution cell splits into 2^((k-k*)d) classifier cells.
                let shift = lab.k - self.k_star;
                let sub = 1usize << shift;
                let total = sub.pow(self.d as u32);
                let mut ones = vec![0usize; self.cells.len()];
                let fine_axis = 1usize << lab.k;
                for (i, &l) in lab.labels.iter().enumerate() {
                    if !l {
                        continue;
                    }
                    let mut rest = i;
                    let mut coarse = 0usize;
                    let mut scale = 1usize;
                    for _ in 0..self.d {
                        coarse += ((rest % fine_axis) >> shift) * scale;
                        rest /= fine_axis;
                        scale *= s;
                    }
                    ones[coarse] += 1;
                }
                Ok(ones.into_iter().map(|o| o as f64 / total as f64).collect())
            }
        }
    }

    /// Per-axis indices of cell `j`, most significant axis first.
    fn axes(&self, j: usize) -> Vec<usize> {
        let s = self.per_axis();
        let mut out = vec![0; self.d];
        let mut rest = j;
        for a in (0..self.d).rev() {
            out[a] = rest % s;
            rest /= s;
        }
        out
    }
}

/// Population counterparts of the empirical rates.
pub type TrueRates = RateBundle;

/// Exact rates of `h` under `dist`.
///
/// Histograms at any level and threshold rules at any cut are supported:
/// a classifier cell that only covers part of a distribution cell
/// contributes its volume fraction, since `X` is uniform inside the cell.
pub fn true_rates(dist: &DiscreteDistribution, h: &Classifier) -> Result<TrueRates> {
    Ok(dist.joint(&dist.fractions(h)?).rates())
}

/// `E_λ(h) = FNDR(h) + λ·FDR(h)`.
pub fn true_e_lambda(dist: &DiscreteDistribution, h: &Classifier, lambda: f64) -> Result<ExtendedRate> {
    Ok(true_rates(dist, h)?.weighted(lambda))
}

/// ChaCha8 keyed by `master`, positioned on stream `stream`.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// `n` i.i.d. draws with a generator seeded from `seed`.
pub fn sample(dist: &DiscreteDistribution, n: usize, seed: u64) -> Result<Dataset> {
    sample_with(dist, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_with<R: Rng + ?Sized>(dist: &DiscreteDistribution, n: usize, rng: &mut R) -> Result<Dataset> {
    let picker = WeightedIndex::new(dist.cells.iter().map(|c| c.mass))
        .map_err(|e| Error::config(format!("distribution masses: {e}")))?;
    let s = dist.per_axis() as f64;
    let mut data = Dataset::with_capacity(dist.d, n)?;
    let mut x = vec![0.0; dist.d];
    for _ in 0..n {
        let j = picker.sample(rng);
        let axes = dist.axes(j);
        for (xa, &i) in x.iter_mut().zip(&axes) {
            *xa = (i as f64 + rng.random::<f64>()) / s;
        }
        if cell_index_unchecked(&x, dist.k_star) != j {
            // Rounding pushed a coordinate onto the next cell's edge.
            for (xa, &i) in x.iter_mut().zip(&axes) {
                *xa = i as f64 / s;
            }
        }
        let y = rng.random_bool(dist.cells[j].eta);
        data.push(&x, y)?;
    }
    Ok(data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimumWitness {
    /// A deterministic labeling of the distribution's cells.
    Labeling { classifier: Classifier },
    /// Label 1 on cells with `η > eta_cut`, and with probability `gamma` on
    /// cells with `η = eta_cut`.
    RandomizedThreshold { eta_cut: f64, gamma: f64 },
    /// At most one cell carries mass, so every classifier has an infinite
    /// rate.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub value: ExtendedRate,
    pub witness: OptimumWitness,
}

/// `inf_h E_λ(h)` over cell labelings and randomized `η`-thresholds.
///
/// Every deterministic labeling of the distribution cells is enumerated.
/// The randomized family is swept on a grid of [`GAMMA_GRID`] values of the
/// boundary probability, then refined by golden-section search around the
/// best grid point. The randomized branch is reported only when it is
/// strictly better.
pub fn optimal_e_lambda(dist: &DiscreteDistribution, lambda: f64) -> Result<Optimum> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::config(format!("lambda must be positive and finite, got {lambda}")));
    }
    let c = dist.cells.len();
    if c > MAX_OPTIMUM_CELLS {
        return Err(Error::too_large(format!("{c} cells exceed the optimum search limit {MAX_OPTIMUM_CELLS}")));
    }
    if dist.cells.iter().filter(|cell| cell.mass > 0.0).count() <= 1 {
        return Ok(Optimum { value: ExtendedRate::Infinite, witness: OptimumWitness::Degenerate });
    }

    let mut best_mask = 0u32;
    let mut best = ExtendedRate::Infinite;
    let mut fractions = vec![0.0; c];
    for mask in 0u32..(1u32 << c) {
        for (i, f) in fractions.iter_mut().enumerate() {
            *f = ((mask >> i) & 1) as f64;
        }
        let v = dist.joint(&fractions).rates().weighted(lambda);
        if v < best {
            best = v;
            best_mask = mask;
        }
    }
    let labels = (0..c).map(|i| (best_mask >> i) & 1 == 1).collect();
    let mut optimum = Optimum {
        value: best,
        witness: OptimumWitness::Labeling { classifier: Classifier::Cells(CellLabeling::new(dist.k_star, dist.d, labels)?) },
    };

    let mut levels: Vec<f64> = dist.cells.iter().filter(|cell| cell.mass > 0.0).map(|cell| cell.eta).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    for &cut in &levels {
        let at = |gamma: f64| {
            let f: Vec<f64> = dist
                .cells
                .iter()
                .map(|cell| match cell.eta.total_cmp(&cut) {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => gamma,
                    std::cmp::Ordering::Less => 0.0,
                })
                .collect();
            dist.joint(&f).rates().weighted(lambda)
        };
        let step = 1.0 / GAMMA_GRID as f64;
        let mut local = (ExtendedRate::Infinite, 0.0);
        for i in 1..GAMMA_GRID {
            let gamma = i as f64 * step;
            let v = at(gamma);
            if v < local.0 {
                local = (v, gamma);
            }
        }
        let refined = golden_section(&at, (local.1 - step).max(0.0), (local.1 + step).min(1.0));
        let v = at(refined);
        if v < local.0 {
            local = (v, refined);
        }
        if local.0 < optimum.value {
            optimum = Optimum { value: local.0, witness: OptimumWitness::RandomizedThreshold { eta_cut: cut, gamma: local.1 } };
        }
    }
    Ok(optimum)
}

fn golden_section(f: &impl Fn(f64) -> ExtendedRate, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let a = hi - r * (hi - lo);
        let b = lo + r * (hi - lo);
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    (lo + hi) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedOptimum {
    /// The minimized true error; `+∞` when nothing is feasible.
    pub value: ExtendedRate,
    /// `None` when no member satisfies the true constraint.
    pub witness: Option<Classifier>,
    pub codelength_bits: f64,
}

/// Minimizes the true `R_1` over the members with `R_0 <= α`.
///
/// `(R_1, R_0)` is `(FNDR, FDR)`, `(FNR, FPR)` or `(FDR, FNR)` for the
/// FDR, Neyman-Pearson and precision/recall rules; the last constraint
/// reads `recall >= β`. Ties go to the first member in enumeration order.
pub fn constrained_optimum(
    dist: &DiscreteDistribution,
    class: &HypothesisClass,
    spec: &ObjectiveSpec,
) -> Result<ConstrainedOptimum> {
    spec.validate()?;
    let mut best = ConstrainedOptimum { value: ExtendedRate::Infinite, witness: None, codelength_bits: 0.0 };
    for (h, bits) in class.enumerate_with_codelengths(DEFAULT_ENUMERATION_CAP)? {
        let r = true_rates(dist, &h)?;
        let (feasible, value) = match spec.criterion {
            Criterion::Fdr { alpha } => (r.fdr <= ExtendedRate::Finite(alpha), r.fndr),
            Criterion::NeymanPearson { alpha } => (r.fpr <= alpha, ExtendedRate::Finite(r.fnr)),
            Criterion::PrecisionRecall { beta } => (r.recall >= beta, r.fdr),
            Criterion::Weighted { .. } => return Err(Error::config("constrained_optimum needs a constrained criterion")),
        };
        if feasible && (best.witness.is_none() || value < best.value) {
            best = ConstrainedOptimum { value, witness: Some(h), codelength_bits: bits };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ThresholdRule;

    fn two_cells() -> DiscreteDistribution {
        DiscreteDistribution::uniform(1, 1, &[0.2, 0.8]).unwrap()
    }

    fn second_cell() -> Classifier {
        Classifier::Cells(CellLabeling::from_positive_cells(1, 1, &[1]).unwrap())
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn rejects_invalid_distributions() {
        assert!(DiscreteDistribution::new(1, 1, vec![Cell { mass: 0.5, eta: 0.1 }]).is_err());
        assert!(DiscreteDistribution::new(1, 1, vec![Cell { mass: 0.6, eta: 0.1 }, Cell { mass: 0.5, eta: 0.1 }]).is_err());
        assert!(DiscreteDistribution::new(1, 1, vec![Cell { mass: 0.5, eta: 1.1 }, Cell { mass: 0.5, eta: 0.1 }]).is_err());
        assert!(DiscreteDistribution::new(1, 0, vec![Cell { mass: -0.0, eta: 0.3 }]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"d": 1, "k_star": 1, "cells": [{"mass": 0.5, "eta": 0.2}, {"mass": 0.5, "eta": 0.8}]}"#;
        let dist = DiscreteDistribution::from_json_str(text).unwrap();
        assert_eq!(dist, two_cells());
        let back = DiscreteDistribution::from_json_str(&serde_json::to_string(&dist).unwrap()).unwrap();
        assert_eq!(back, dist);
        assert!(DiscreteDistribution::from_json_str(r#"{"d": 1, "k_star": 1, "cells": []}"#).is_err());
    }

    #[test]
    fn two_cell_rates() {
        let r = true_rates(&two_cells(), &second_cell()).unwrap();
        assert!(close(r.fdr.finite().unwrap(), 0.2));
        assert!(close(r.fndr.finite().unwrap(), 0.2));
        assert!(close(r.fpr, 0.2));
        assert!(close(r.recall, 0.8));
        assert!(close(r.precision.unwrap(), 0.8));
    }

    #[test]
    fn constant_classifiers() {
        let zeros = Classifier::Cells(CellLabeling::all_zeros(0, 1).unwrap());
        assert_eq!(true_rates(&two_cells(), &zeros).unwrap().fdr, ExtendedRate::Infinite);
        let pure = DiscreteDistribution::uniform(1, 1, &[1.0, 1.0]).unwrap();
        let ones = Classifier::Cells(CellLabeling::new(0, 1, vec![true]).unwrap());
        let r = true_rates(&pure, &ones).unwrap();
        assert_eq!(r.fdr, ExtendedRate::ZERO);
        assert_eq!(r.fpr, 0.0);
    }

    #[test]
    fn finer_and_coarser_classifiers() {
        let dist = DiscreteDistribution::uniform(1, 2, &[0.1, 0.3, 0.6, 0.9]).unwrap();
        // Level 3 labeling covering cells 2 and 3 exactly equals level 2 labeling {2, 3}.
        let fine = Classifier::Cells(CellLabeling::from_positive_cells(3, 1, &[4, 5, 6, 7]).unwrap());
        let coarse = Classifier::Cells(CellLabeling::from_positive_cells(1, 1, &[1]).unwrap());
        let thr = Classifier::Threshold(ThresholdRule::upper(0.5));
        let a = true_rates(&dist, &fine).unwrap();
        assert_eq!(a, true_rates(&dist, &coarse).unwrap());
        assert_eq!(a, true_rates(&dist, &thr).unwrap());
        // Half of the last cell.
        let half = Classifier::Cells(CellLabeling::from_positive_cells(3, 1, &[7]).unwrap());
        let r = true_rates(&dist, &half).unwrap();
        assert!(close(r.fdr.finite().unwrap(), 0.1));
        let thr = Classifier::Threshold(ThresholdRule::upper(0.875));
        assert_eq!(true_rates(&dist, &thr).unwrap(), r);
    }

    #[test]
    fn two_dimensional_fractions() {
        let dist = DiscreteDistribution::uniform(2, 1, &[0.1, 0.2, 0.7, 0.9]).unwrap();
        // Level 2 in 2D: labeling cell (row 3, col 3) covers a quarter of dist cell (1, 1).
        let h = Classifier::Cells(CellLabeling::from_positive_cells(2, 2, &[15]).unwrap());
        let f = dist.fractions(&h).unwrap();
        assert_eq!(f, vec![0.0, 0.0, 0.0, 0.25]);
        let coarse = Classifier::Cells(CellLabeling::from_positive_cells(0, 2, &[0]).unwrap());
        assert_eq!(dist.fractions(&coarse).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn sampler_degenerate_labels() {
        let ones = sample(&DiscreteDistribution::uniform(1, 0, &[1.0]).unwrap(), 500, 3).unwrap();
        assert!(ones.labels().iter().all(|&y| y));
        let zeros = sample(&DiscreteDistribution::uniform(1, 0, &[0.0]).unwrap(), 500, 3).unwrap();
        assert!(zeros.labels().iter().all(|&y| !y));
    }

    #[test]
    fn sampler_is_deterministic_and_in_cell() {
        let dist = DiscreteDistribution::uniform(2, 2, &[0.3; 16]).unwrap();
        let a = sample(&dist, 1000, 11).unwrap();
        assert_eq!(a, sample(&dist, 1000, 11).unwrap());
        assert_ne!(a, sample(&dist, 1000, 12).unwrap());
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        a.write_csv(&mut ba).unwrap();
        sample(&dist, 1000, 11).unwrap().write_csv(&mut bb).unwrap();
        assert_eq!(ba, bb);
    }

    #[test]
    fn sampler_cell_frequencies() {
        let n = 1_000_000usize;
        let data = sample(&two_cells(), n, 2024).unwrap();
        let upper = data.iter().filter(|(x, _)| x[0] >= 0.5).count() as f64;
        assert!((upper - n as f64 / 2.0).abs() <= 4.0 * (n as f64 * 0.25).sqrt());
    }

    #[test]
    fn optimum_examples() {
        let o = optimal_e_lambda(&two_cells(), 1.0).unwrap();
        assert!(close(o.value.finite().unwrap(), 0.4));
        assert_eq!(o.witness, OptimumWitness::Labeling { classifier: second_cell() });

        let single = DiscreteDistribution::uniform(1, 0, &[0.4]).unwrap();
        let o = optimal_e_lambda(&single, 1.0).unwrap();
        assert_eq!(o.value, ExtendedRate::Infinite);
        assert_eq!(o.witness, OptimumWitness::Degenerate);

        let flat = DiscreteDistribution::uniform(1, 2, &[0.5; 4]).unwrap();
        assert!(close(optimal_e_lambda(&flat, 1.0).unwrap().value.finite().unwrap(), 1.0));

        let big = DiscreteDistribution::uniform(1, 5, &[0.5; 32]).unwrap();
        assert!(matches!(optimal_e_lambda(&big, 1.0), Err(Error::TooLarge(_))));
    }

    #[test]
    fn optimum_lower_bounds_random_labelings() {
        use rand::Rng;
        let dist = DiscreteDistribution::new(
            1,
            3,
            [0.05, 0.2, 0.1, 0.15, 0.1, 0.2, 0.1, 0.1]
                .iter()
                .zip([0.9, 0.1, 0.4, 0.6, 0.2, 0.75, 0.5, 0.3])
                .map(|(&mass, eta)| Cell { mass, eta })
                .collect(),
        )
        .unwrap();
        for lambda in [0.3, 1.0, 4.0] {
            let opt = optimal_e_lambda(&dist, lambda).unwrap().value;
            let mut rng = stream_rng(5, 0);
            for _ in 0..300 {
                let k = rng.random_range(0..=5u32);
                let labels = (0..1usize << k).map(|_| rng.random_bool(0.5)).collect();
                let h = Classifier::Cells(CellLabeling::new(k, 1, labels).unwrap());
                assert!(opt <= true_e_lambda(&dist, &h, lambda).unwrap());
            }
        }
    }

    #[test]
    fn true_rate_complements() {
        let dist = DiscreteDistribution::uniform(1, 2, &[0.1, 0.3, 0.6, 0.9]).unwrap();
        for h in crate::model::enumerate_class(&HypothesisClass::histogram(2, 1).unwrap()).unwrap() {
            let r = true_rates(&dist, &h).unwrap();
            if let ExtendedRate::Finite(fdr) = r.fdr {
                assert_eq!(r.precision, Some(1.0 - fdr));
            } else {
                assert!(r.precision.is_none());
            }
            assert_eq!(r.recall, 1.0 - r.fnr);
        }
    }

    #[test]
    fn constrained_optimum_examples() {
        let class = HypothesisClass::histogram(1, 1).unwrap();
        let spec = ObjectiveSpec::constrained(Criterion::Fdr { alpha: 0.25 }, 0.1);
        let o = constrained_optimum(&two_cells(), &class, &spec).unwrap();
        assert_eq!(o.witness, Some(second_cell()));
        assert!(close(o.value.finite().unwrap(), 0.2));

        let tight = ObjectiveSpec::constrained(Criterion::Fdr { alpha: 0.1 }, 0.1);
        let o = constrained_optimum(&two_cells(), &class, &tight).unwrap();
        assert!(o.witness.is_none());
        assert_eq!(o.value, ExtendedRate::Infinite);

        // With α above every finite FDR the all-ones labeling is feasible too,
        // but its FNDR is infinite; the unconstrained FNDR minimizer wins.
        let loose = ObjectiveSpec::constrained(Criterion::Fdr { alpha: 0.9 }, 0.1);
        let o = constrained_optimum(&two_cells(), &class, &loose).unwrap();
        assert_eq!(o.witness, Some(second_cell()));
    }
}

//! Codelength penalties, the Kraft sum and the penalized weighted objective.
//!
//! For a classifier with codelength `L` bits, confidence `δ` and a relevant
//! count `m` (discoveries, nondiscoveries, or the size of one class), the
//! penalty is `sqrt((L·ln 2 + ln(2/δ)) / (2m))`. When `m = 0` it is `+∞`
//! for the FDR/FNDR penalties and `1` for the FPR/FNR penalties.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{empirical_fdr, empirical_fndr};
use crate::model::{confusion_counts, Classifier, ConfusionCounts, Dataset, HypothesisClass};
use crate::rate::ExtendedRate;

/// Absolute slack allowed on a Kraft sum for floating-point summation error.
pub const KRAFT_TOLERANCE: f64 = 1e-9;

/// Value of a penalty whose count is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroConvention {
    /// `φ_D`, `φ_ND`.
    Infinity,
    /// `φ_FP`, `φ_FN`.
    One,
}

pub fn check_delta(delta: f64) -> Result<f64> {
    if delta > 0.0 && delta < 1.0 {
        Ok(delta)
    } else {
        Err(Error::config(format!("confidence delta must lie in (0, 1), got {delta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyInput {
    pub codelength_bits: f64,
    pub delta: f64,
    pub denom: u64,
}

impl PenaltyInput {
    pub fn new(codelength_bits: f64, delta: f64, denom: u64) -> Result<Self> {
        check_delta(delta)?;
        if !(codelength_bits.is_finite() && codelength_bits >= 0.0) {
            return Err(Error::config(format!("codelength must be finite and nonnegative, got {codelength_bits}")));
        }
        Ok(PenaltyInput { codelength_bits, delta, denom })
    }
}

/// `L·ln 2 + ln(2/δ)`, the numerator shared by every penalty of a classifier.
pub fn complexity(codelength_bits: f64, delta: f64) -> f64 {
    codelength_bits * std::f64::consts::LN_2 + (2.0 / delta).ln()
}

/// The penalty for a precomputed [`complexity`] term.
#[inline]
pub fn phi_from_complexity(complexity: f64, denom: u64, zero: ZeroConvention) -> ExtendedRate {
    if denom == 0 {
        match zero {
            ZeroConvention::Infinity => ExtendedRate::Infinite,
            ZeroConvention::One => ExtendedRate::Finite(1.0),
        }
    } else {
        ExtendedRate::Finite((complexity / (2.0 * denom as f64)).sqrt())
    }
}

pub fn phi(inp: &PenaltyInput, zero: ZeroConvention) -> ExtendedRate {
    phi_from_complexity(complexity(inp.codelength_bits, inp.delta), inp.denom, zero)
}

/// `R̂_ND + φ_ND + λ (R̂_D + φ_D)` evaluated on counts.
pub fn penalized_objective_from_counts(
    c: &ConfusionCounts,
    codelength_bits: f64,
    lambda: f64,
    delta: f64,
) -> Result<ExtendedRate> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::config(format!("lambda must be positive, got {lambda}")));
    }
    let nd = PenaltyInput::new(codelength_bits, delta, c.n_nd)?;
    let d = PenaltyInput::new(codelength_bits, delta, c.n_d)?;
    let fndr_side = empirical_fndr(c) + phi(&nd, ZeroConvention::Infinity);
    let fdr_side = empirical_fdr(c) + phi(&d, ZeroConvention::Infinity);
    Ok(fndr_side + lambda * fdr_side)
}

pub fn penalized_objective(
    h: &Classifier,
    data: &Dataset,
    codelength_bits: f64,
    lambda: f64,
    delta: f64,
) -> Result<ExtendedRate> {
    let c = confusion_counts(h, data)?;
    penalized_objective_from_counts(&c, codelength_bits, lambda, delta)
}

/// `Σ_h 2^(-L(h))`.
///
/// Uniform codes over thresholds and histograms are summed analytically as
/// `|H| · 2^(-log2 |H|)`; explicit lists are summed term by term.
pub fn kraft_sum(class: &HypothesisClass) -> Result<f64> {
    match class {
        HypothesisClass::Explicit { codelength_bits, .. } => Ok(codelength_bits.iter().map(|&l| (-l).exp2()).sum()),
        HypothesisClass::Threshold { cuts, .. } => {
            let bits = class.log2_cardinality();
            Ok(cuts.len() as f64 * (-bits).exp2())
        }
        HypothesisClass::Histogram { .. } => {
            // |H| = 2^(2^(kd)) with 2^(kd) bits each: each term is exactly 1/|H|.
            let bits = class.log2_cardinality();
            if bits <= 1023.0 {
                Ok(bits.exp2() * (-bits).exp2())
            } else {
                // Too large for f64 arithmetic; the uniform code sums to one exactly.
                Ok(1.0)
            }
        }
    }
}

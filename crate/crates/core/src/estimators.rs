//! Empirical error rates computed from [`ConfusionCounts`].
//!
//! FDR and FNDR are infinite when their conditioning event (a discovery,
//! a nondiscovery) never occurs in the sample. FPR and FNR instead fall back
//! to zero when a class is absent from the sample.

use serde::{Deserialize, Serialize};

use crate::model::ConfusionCounts;
pub use crate::rate::ExtendedRate;

/// `fd / n_D`, or `+∞` without discoveries.
pub fn empirical_fdr(c: &ConfusionCounts) -> ExtendedRate {
    ExtendedRate::ratio(c.fd, c.n_d)
}

/// `fnd / n_ND`, or `+∞` without nondiscoveries.
pub fn empirical_fndr(c: &ConfusionCounts) -> ExtendedRate {
    ExtendedRate::ratio(c.fnd, c.n_nd)
}

/// `(fd / n0, fnd / n1)`, each zero when its denominator is zero.
pub fn empirical_fpr_fnr(c: &ConfusionCounts) -> (f64, f64) {
    (ratio_or_zero(c.fd, c.n0), ratio_or_zero(c.fnd, c.n1))
}

/// Precision `1 - FDR` (undefined without discoveries) and recall `1 - FNR`.
pub fn empirical_precision_recall(c: &ConfusionCounts) -> (Option<f64>, f64) {
    let precision = empirical_fdr(c).finite().map(|fdr| 1.0 - fdr);
    let (_, fnr) = empirical_fpr_fnr(c);
    (precision, 1.0 - fnr)
}

fn ratio_or_zero(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// All rates of one classifier, either empirical or (see
/// [`crate::oracle::true_rates`]) population values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBundle {
    pub fdr: ExtendedRate,
    pub fndr: ExtendedRate,
    pub fpr: f64,
    pub fnr: f64,
    /// `None` when there are no discoveries.
    pub precision: Option<f64>,
    pub recall: f64,
}

impl RateBundle {
    pub fn empirical(c: &ConfusionCounts) -> Self {
        let (fpr, fnr) = empirical_fpr_fnr(c);
        let (precision, recall) = empirical_precision_recall(c);
        RateBundle { fdr: empirical_fdr(c), fndr: empirical_fndr(c), fpr, fnr, precision, recall }
    }

    /// `FNDR + λ·FDR`.
    pub fn weighted(&self, lambda: f64) -> ExtendedRate {
        self.fndr + lambda * self.fdr
    }
}

//! Feature space `[0,1]^d`, labeled datasets, the classifier families
//! (dyadic histograms, one-dimensional thresholds, explicit lists) and
//! confusion counting.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest class the enumerating code paths will materialize.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// Histogram levels are limited so that `2^(k·d)` cells stay addressable.
const MAX_CELL_BITS: u32 = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: bool,
}

impl LabeledPoint {
    pub fn new(x: Vec<f64>, y: bool) -> Self {
        LabeledPoint { x, y }
    }
}

/// An ordered sample of labeled points sharing one dimension.
///
/// Features are stored row-major in a single buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    features: Vec<f64>,
    labels: Vec<bool>,
}

impl Dataset {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::config("dataset dimension must be positive"));
        }
        Ok(Dataset { d, features: Vec::new(), labels: Vec::new() })
    }

    pub fn with_capacity(d: usize, n: usize) -> Result<Self> {
        let mut ds = Dataset::new(d)?;
        ds.features.reserve(n * d);
        ds.labels.reserve(n);
        Ok(ds)
    }

    pub fn from_points(d: usize, points: impl IntoIterator<Item = LabeledPoint>) -> Result<Self> {
        let mut ds = Dataset::new(d)?;
        for p in points {
            ds.push(&p.x, p.y)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, x: &[f64], y: bool) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::Dimension { expected: self.d, found: x.len() });
        }
        check_domain(x)?;
        self.features.extend_from_slice(x);
        self.labels.push(y);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point(&self, i: usize) -> (&[f64], bool) {
        (&self.features[i * self.d..(i + 1) * self.d], self.labels[i])
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[f64], bool)> + '_ {
        self.features.chunks_exact(self.d).zip(self.labels.iter().copied())
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// `(n0, n1)`: the number of points labeled 0 and 1.
    pub fn class_counts(&self) -> (u64, u64) {
        let n1 = self.labels.iter().filter(|&&y| y).count() as u64;
        (self.labels.len() as u64 - n1, n1)
    }

    /// Reads the CSV layout `x1,...,xd,y`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::Format("header must be x1,...,xd,y with d >= 1".into()));
        }
        let d = header.len() - 1;
        for (j, name) in header.iter().enumerate() {
            let expected = if j == d { "y".to_string() } else { format!("x{}", j + 1) };
            if name.trim() != expected {
                return Err(Error::Format(format!("header column {} is {name:?}, expected {expected:?}", j + 1)));
            }
        }
        let mut ds = Dataset::new(d)?;
        let mut x = vec![0.0; d];
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = row + 2;
            for (j, field) in record.iter().take(d).enumerate() {
                x[j] = field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {line}: feature x{}: {e}", j + 1)))?;
            }
            let y = match record.get(d).map(str::trim) {
                Some("0") => false,
                Some("1") => true,
                other => return Err(Error::Format(format!("line {line}: label must be 0 or 1, got {other:?}"))),
            };
            ds.push(&x, y).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("line {line}: {msg}")),
                other => other,
            })?;
        }
        Ok(ds)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Dataset::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        let mut header: Vec<String> = (1..=self.d).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        wtr.write_record(&header)?;
        let mut fields = Vec::with_capacity(self.d + 1);
        for (x, y) in self.iter() {
            fields.clear();
            fields.extend(x.iter().map(|v| v.to_string()));
            fields.push(if y { "1".into() } else { "0".into() });
            wtr.write_record(&fields)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn check_domain(x: &[f64]) -> Result<()> {
    for (j, &v) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("coordinate {j} is {v}")));
        }
    }
    Ok(())
}

/// Row-major index of the dyadic cell of binwidth `2^-k` containing `x`.
///
/// A coordinate on a cell edge belongs to the higher cell and `1.0` is
/// clamped into the last cell along its axis.
pub fn cell_index(x: &[f64], k: u32, d: usize) -> Result<usize> {
    if x.len() != d {
        return Err(Error::Dimension { expected: d, found: x.len() });
    }
    check_domain(x)?;
    Ok(cell_index_unchecked(x, k))
}

pub(crate) fn cell_index_unchecked(x: &[f64], k: u32) -> usize {
    let per_axis = 1usize << k;
    let scale = per_axis as f64;
    x.iter().fold(0usize, |acc, &v| {
        let i = ((v * scale).floor() as usize).min(per_axis - 1);
        acc * per_axis + i
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Predict 1 when `x >= cut`.
    #[default]
    Upper,
    /// Predict 1 when `x < cut`.
    Lower,
}

/// A labeling of the `2^(k·d)` dyadic cells at level `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellLabeling {
    pub k: u32,
    pub d: usize,
    pub labels: Vec<bool>,
}

impl CellLabeling {
    pub fn new(k: u32, d: usize, labels: Vec<bool>) -> Result<Self> {
        let cells = cell_count(k, d)?;
        if labels.len() != cells {
            return Err(Error::config(format!("labeling has {} cells, level {k} in {d}D has {cells}", labels.len())));
        }
        Ok(CellLabeling { k, d, labels })
    }

    pub fn all_zeros(k: u32, d: usize) -> Result<Self> {
        let cells = cell_count(k, d)?;
        Ok(CellLabeling { k, d, labels: vec![false; cells] })
    }

    pub fn from_positive_cells(k: u32, d: usize, positive: &[usize]) -> Result<Self> {
        let mut h = CellLabeling::all_zeros(k, d)?;
        for &i in positive {
            *h.labels.get_mut(i).ok_or_else(|| Error::config(format!("cell {i} out of range")))? = true;
        }
        Ok(h)
    }

    pub fn num_cells(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub cut: f64,
    pub direction: Direction,
}

impl ThresholdRule {
    pub fn upper(cut: f64) -> Self {
        ThresholdRule { cut, direction: Direction::Upper }
    }

    pub fn label(&self, x: f64) -> bool {
        match self.direction {
            Direction::Upper => x >= self.cut,
            Direction::Lower => x < self.cut,
        }
    }
}

/// A function `[0,1]^d -> {0,1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    Cells(CellLabeling),
    Threshold(ThresholdRule),
}

impl Classifier {
    pub fn dim(&self) -> usize {
        match self {
            Classifier::Cells(c) => c.d,
            Classifier::Threshold(_) => 1,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: x.len() });
        }
        check_domain(x)?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> bool {
        match self {
            Classifier::Cells(c) => c.labels[cell_index_unchecked(x, c.k)],
            Classifier::Threshold(t) => t.label(x[0]),
        }
    }
}

/// Evaluates `h(x)`.
pub fn predict(h: &Classifier, x: &[f64]) -> Result<bool> {
    h.predict(x)
}

fn cell_count(k: u32, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::config("dimension must be positive"));
    }
    let bits = (k as u64) * (d as u64);
    if bits > MAX_CELL_BITS as u64 {
        return Err(Error::too_large(format!("level {k} in {d}D has 2^{bits} cells")));
    }
    Ok(1usize << bits)
}

/// A finite classifier family with a codelength (in bits) per member.
///
/// Built-in constructors assign the uniform code `log2 |H|`, so the Kraft
/// sum is exactly one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisClass {
    /// All labelings of the dyadic cells at level `k`; `|H| = 2^(2^(k·d))`.
    Histogram { k: u32, d: usize },
    /// One threshold rule per cut, sharing a direction. One-dimensional.
    Threshold { cuts: Vec<f64>, direction: Direction },
    Explicit { d: usize, members: Vec<Classifier>, codelength_bits: Vec<f64> },
}

impl HypothesisClass {
    pub fn histogram(k: u32, d: usize) -> Result<Self> {
        cell_count(k, d)?;
        Ok(HypothesisClass::Histogram { k, d })
    }

    /// `m` upward thresholds at cuts `j/(m+1)`, `j = 1..=m`.
    pub fn threshold_grid(m: usize, direction: Direction) -> Result<Self> {
        let cuts = (1..=m).map(|j| j as f64 / (m + 1) as f64).collect();
        HypothesisClass::threshold(cuts, direction)
    }

    pub fn threshold(cuts: Vec<f64>, direction: Direction) -> Result<Self> {
        if cuts.is_empty() {
            return Err(Error::config("a threshold class needs at least one cut"));
        }
        if cuts.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::config("threshold cuts must lie in [0, 1]"));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("threshold cuts must be strictly increasing"));
        }
        Ok(HypothesisClass::Threshold { cuts, direction })
    }

    /// Explicit list with the uniform code `log2(len)`.
    pub fn explicit(d: usize, members: Vec<Classifier>) -> Result<Self> {
        let bits = if members.is_empty() { 0.0 } else { (members.len() as f64).log2() };
        let codelengths = vec![bits; members.len()];
        HypothesisClass::explicit_with_codelengths(d, members, codelengths)
    }

    pub fn explicit_with_codelengths(d: usize, members: Vec<Classifier>, codelength_bits: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if members.len() != codelength_bits.len() {
            return Err(Error::config("one codelength per member is required"));
        }
        if let Some(h) = members.iter().find(|h| h.dim() != d) {
            return Err(Error::Dimension { expected: d, found: h.dim() });
        }
        if codelength_bits.iter().any(|&l| !(l.is_finite() && l >= 0.0)) {
            return Err(Error::config("codelengths must be finite and nonnegative"));
        }
        let kraft: f64 = codelength_bits.iter().map(|&l| (-l).exp2()).sum();
        if kraft > 1.0 + crate::penalties::KRAFT_TOLERANCE {
            return Err(Error::config(format!("codelengths violate the Kraft inequality (sum {kraft})")));
        }
        Ok(HypothesisClass::Explicit { d, members, codelength_bits })
    }

    pub fn dim(&self) -> usize {
        match self {
            HypothesisClass::Histogram { d, .. } | HypothesisClass::Explicit { d, .. } => *d,
            HypothesisClass::Threshold { .. } => 1,
        }
    }

    /// `log2 |H|`.
    pub fn log2_cardinality(&self) -> f64 {
        match self {
            HypothesisClass::Histogram { k, d } => (1u64 << (*k as u64 * *d as u64)) as f64,
            HypothesisClass::Threshold { cuts, .. } => (cuts.len() as f64).log2(),
            HypothesisClass::Explicit { members, .. } => (members.len() as f64).log2(),
        }
    }

    /// `|H|`, when it fits in a `u64`.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            HypothesisClass::Histogram { k, d } => {
                // 2^(2^(k·d)) fits in a u64 only while k·d <= 5.
                let cell_bits = (*k as u64) * (*d as u64);
                (cell_bits <= 5).then(|| 1u64 << (1u64 << cell_bits))
            }
            HypothesisClass::Threshold { cuts, .. } => Some(cuts.len() as u64),
            HypothesisClass::Explicit { members, .. } => Some(members.len() as u64),
        }
    }

    /// The codelength shared by every member, if the code is uniform.
    pub fn uniform_codelength(&self) -> Option<f64> {
        match self {
            HypothesisClass::Histogram { .. } | HypothesisClass::Threshold { .. } => Some(self.log2_cardinality()),
            HypothesisClass::Explicit { codelength_bits, .. } => {
                let first = *codelength_bits.first()?;
                codelength_bits.iter().all(|&l| l == first).then_some(first)
            }
        }
    }

    /// Members paired with their codelengths, in enumeration order.
    pub fn enumerate_with_codelengths(&self, cap: u64) -> Result<Vec<(Classifier, f64)>> {
        match self {
            HypothesisClass::Explicit { members, codelength_bits, .. } => {
                check_cap(members.len() as u64, cap)?;
                Ok(members.iter().cloned().zip(codelength_bits.iter().copied()).collect())
            }
            _ => {
                let bits = self.log2_cardinality();
                Ok(enumerate_class_capped(self, cap)?.into_iter().map(|h| (h, bits)).collect())
            }
        }
    }
}

fn check_cap(size: u64, cap: u64) -> Result<()> {
    if size > cap {
        Err(Error::too_large(format!("class of {size} classifiers exceeds the enumeration cap {cap}")))
    } else {
        Ok(())
    }
}

/// Every member of `class`, once each, with the default cap.
pub fn enumerate_class(class: &HypothesisClass) -> Result<Vec<Classifier>> {
    enumerate_class_capped(class, DEFAULT_ENUMERATION_CAP)
}

/// Enumeration order is lexicographic on the representation: cell labelings
/// read as bit strings with cell 0 first, thresholds by increasing cut, and
/// explicit lists in input order.
pub fn enumerate_class_capped(class: &HypothesisClass, cap: u64) -> Result<Vec<Classifier>> {
    match class {
        HypothesisClass::Histogram { k, d } => {
            let size = class
                .cardinality()
                .ok_or_else(|| Error::too_large(format!("histogram class at level {k} in {d}D is not enumerable")))?;
            check_cap(size, cap)?;
            let cells = cell_count(*k, *d)?;
            Ok((0..size)
                .map(|m| {
                    let labels = (0..cells).map(|i| (m >> (cells - 1 - i)) & 1 == 1).collect();
                    Classifier::Cells(CellLabeling { k: *k, d: *d, labels })
                })
                .collect())
        }
        HypothesisClass::Threshold { cuts, direction } => {
            check_cap(cuts.len() as u64, cap)?;
            Ok(cuts.iter().map(|&cut| Classifier::Threshold(ThresholdRule { cut, direction: *direction })).collect())
        }
        HypothesisClass::Explicit { members, .. } => {
            check_cap(members.len() as u64, cap)?;
            Ok(members.clone())
        }
    }
}

/// Counting statistics of one classifier on one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub n: u64,
    /// Discoveries: `h(X_i) = 1`.
    pub n_d: u64,
    /// Nondiscoveries: `h(X_i) = 0`.
    pub n_nd: u64,
    /// False discoveries: `Y_i = 0`, `h(X_i) = 1`.
    pub fd: u64,
    /// False nondiscoveries: `Y_i = 1`, `h(X_i) = 0`.
    pub fnd: u64,
    pub n0: u64,
    pub n1: u64,
}

impl ConfusionCounts {
    /// Counts determined by the class-0 (`a`) and class-1 (`b`) points
    /// among the discoveries.
    pub fn from_discoveries(a: u64, b: u64, n0: u64, n1: u64) -> Self {
        debug_assert!(a <= n0 && b <= n1);
        let n = n0 + n1;
        ConfusionCounts { n, n_d: a + b, n_nd: n - a - b, fd: a, fnd: n1 - b, n0, n1 }
    }

    pub fn is_consistent(&self) -> bool {
        self.n_d + self.n_nd == self.n
            && self.n0 + self.n1 == self.n
            && self.fd <= self.n_d.min(self.n0)
            && self.fnd <= self.n_nd.min(self.n1)
            && self.n_d - self.fd <= self.n1
            && self.n_nd - self.fnd <= self.n0
    }
}

pub fn confusion_counts(h: &Classifier, data: &Dataset) -> Result<ConfusionCounts> {
    if h.dim() != data.dim() {
        return Err(Error::Dimension { expected: h.dim(), found: data.dim() });
    }
    let mut c = ConfusionCounts { n: data.len() as u64, ..Default::default() };
    for (x, y) in data.iter() {
        let pred = h.predict_unchecked(x);
        match (pred, y) {
            (true, false) => {
                c.n_d += 1;
                c.fd += 1;
            }
            (true, true) => c.n_d += 1,
            (false, true) => {
                c.n_nd += 1;
                c.fnd += 1;
            }
            (false, false) => c.n_nd += 1,
        }
        if y {
            c.n1 += 1;
        } else {
            c.n0 += 1;
        }
    }
    Ok(c)
}

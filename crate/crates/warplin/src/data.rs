//! Dataset ingestion (delimited label-first text files), stratified
//! cross-validation splits, per-series normalization, and the synthetic
//! two-dimensional generators used in the label-dependency studies.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::products::TimeSeries;

/// A labeled collection of time series. After ingestion labels form the
/// contiguous range `1..=K` in order of first appearance, and every class in
/// range is present.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    examples: Vec<(TimeSeries, usize)>,
    num_classes: usize,
    name: String,
    provenance: String,
}

impl Dataset {
    /// Build a dataset whose labels are already in `1..=num_classes`,
    /// checking that every class is present.
    pub fn new(
        examples: Vec<(TimeSeries, usize)>,
        num_classes: usize,
        name: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if num_classes == 0 {
            return Err(Error::InvalidShape("need at least one class".into()));
        }
        let mut present = vec![false; num_classes];
        for &(_, y) in &examples {
            if y == 0 || y > num_classes {
                return Err(Error::LabelOutOfRange {
                    label: y,
                    num_classes,
                });
            }
            present[y - 1] = true;
        }
        if !present.iter().all(|&p| p) {
            return Err(Error::InvalidShape(
                "every class in 1..=K must be present".into(),
            ));
        }
        Ok(Self {
            examples,
            num_classes,
            name: name.into(),
            provenance: provenance.into(),
        })
    }

    /// Build from raw integer labels, remapping them to `1..=K` in order of
    /// first appearance.
    pub fn from_labeled(
        raw: Vec<(TimeSeries, i64)>,
        name: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut seen: Vec<i64> = Vec::new();
        let mut examples = Vec::with_capacity(raw.len());
        for (x, label) in raw {
            let idx = match seen.iter().position(|&s| s == label) {
                Some(i) => i,
                None => {
                    seen.push(label);
                    seen.len() - 1
                }
            };
            examples.push((x, idx + 1));
        }
        Self::new(examples, seen.len(), name, provenance)
    }

    /// Subset by example indices, keeping the parent's class count. Folds may
    /// miss a class; the contiguous-label invariant is an ingestion contract.
    pub(crate) fn subset(&self, indices: &[usize], suffix: &str) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self {
            examples: indices
                .iter()
                .map(|&i| self.examples[i].clone())
                .collect(),
            num_classes: self.num_classes,
            name: format!("{}[{suffix}]", self.name),
            provenance: self.provenance.clone(),
        })
    }

    pub fn examples(&self) -> &[(TimeSeries, usize)] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn max_series_length(&self) -> usize {
        self.examples.iter().map(|(x, _)| x.len()).max().unwrap_or(0)
    }

    /// Per-series z-normalization; a near-constant series is centered only.
    pub fn znormalized(&self) -> Self {
        let examples = self
            .examples
            .iter()
            .map(|(x, y)| {
                let n = x.len() as f64;
                let mean = x.values().iter().sum::<f64>() / n;
                let var = x.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                let scale = if sd > 1e-12 { sd } else { 1.0 };
                let values: Vec<f64> =
                    x.values().iter().map(|v| (v - mean) / scale).collect();
                (
                    TimeSeries::new(values).expect("normalized series stays finite"),
                    *y,
                )
            })
            .collect();
        Self {
            examples,
            num_classes: self.num_classes,
            name: self.name.clone(),
            provenance: format!("{}:znorm", self.provenance),
        }
    }

    /// Two-class label flip (class 1 becomes 2 and conversely), used by the
    /// label-dependency protocol.
    pub fn with_swapped_binary_labels(&self) -> Result<Self> {
        if self.num_classes != 2 {
            return Err(Error::InvalidShape(
                "label swap requires exactly two classes".into(),
            ));
        }
        Ok(Self {
            examples: self
                .examples
                .iter()
                .map(|(x, y)| (x.clone(), 3 - *y))
                .collect(),
            num_classes: 2,
            name: self.name.clone(),
            provenance: format!("{}:swapped", self.provenance),
        })
    }

    /// Load a delimited label-first text file: one example per line, label
    /// token first, comma- or tab-separated (detected per file), rows of
    /// possibly different lengths, trailing blank fields dropped.
    /// Non-integral labels are rejected; labels are remapped to `1..=K`.
    pub fn load_ucr(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let delimiter = if text.lines().any(|l| l.contains('\t')) {
            '\t'
        } else {
            ','
        };
        let mut raw = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line_no = line_no + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields: Vec<&str> = line.split(delimiter).map(str::trim).collect();
            while fields.last().is_some_and(|f| f.is_empty()) {
                fields.pop();
            }
            let mut it = fields.into_iter();
            let label_tok = it.next().unwrap_or("");
            let label_f: f64 = label_tok.parse().map_err(|_| Error::ParseError {
                line: line_no,
                detail: format!("bad label token {label_tok:?}"),
            })?;
            if (label_f - label_f.round()).abs() > 1e-9 {
                return Err(Error::ParseError {
                    line: line_no,
                    detail: format!("label {label_f} is not an integer"),
                });
            }
            let mut values = Vec::new();
            for tok in it {
                if tok.is_empty() {
                    return Err(Error::ParseError {
                        line: line_no,
                        detail: "empty value field".into(),
                    });
                }
                let v: f64 = tok.parse().map_err(|_| Error::ParseError {
                    line: line_no,
                    detail: format!("bad value token {tok:?}"),
                })?;
                values.push(v);
            }
            let series = TimeSeries::new(values).map_err(|e| Error::ParseError {
                line: line_no,
                detail: e.to_string(),
            })?;
            raw.push((series, label_f.round() as i64));
        }
        if raw.is_empty() {
            return Err(Error::EmptyFile);
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        Self::from_labeled(raw, name, path.display().to_string())
    }

    /// Stratified k-fold split: per class, a seeded shuffle dealt round-robin
    /// into k disjoint test folds whose union is the dataset.
    pub fn kfold_split(&self, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
        if k < 2 {
            return Err(Error::InvalidShape("need at least two folds".into()));
        }
        if k > self.len() {
            return Err(Error::TooFewExamples {
                available: self.len(),
                required: k,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fold_of = vec![0usize; self.len()];
        // Rolling offset so small classes do not pile onto the low folds.
        let mut offset = 0usize;
        for class in 1..=self.num_classes {
            let mut members: Vec<usize> = (0..self.len())
                .filter(|&i| self.examples[i].1 == class)
                .collect();
            // Fisher-Yates with the shared stream.
            for i in (1..members.len()).rev() {
                let j = rng.random_range(0..=i);
                members.swap(i, j);
            }
            for (pos, &idx) in members.iter().enumerate() {
                fold_of[idx] = (offset + pos) % k;
            }
            offset = (offset + members.len()) % k;
        }
        let mut splits = Vec::with_capacity(k);
        for fold in 0..k {
            let test_idx: Vec<usize> =
                (0..self.len()).filter(|&i| fold_of[i] == fold).collect();
            let train_idx: Vec<usize> =
                (0..self.len()).filter(|&i| fold_of[i] != fold).collect();
            let test = self.subset(&test_idx, &format!("fold{fold}-test"))?;
            let train = self.subset(&train_idx, &format!("fold{fold}-train"))?;
            splits.push((train, test));
        }
        Ok(splits)
    }
}

/// Families of two-dimensional synthetic datasets. Points are length-2
/// series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Unit disk (class 1) vs the annulus with radius in (1, 2] (class 2).
    Disk,
    /// Disk r < 1, ring 1 <= r < 1.5, and outer annulus up to r = 2.5.
    Ring3,
    /// Nine unit squares in a 3x3 grid, classes in row-major order.
    Grid9,
    /// Unit square vs the surrounding frame of [-1, 2]^2.
    Square2,
}

impl SynthKind {
    pub fn num_classes(self) -> usize {
        match self {
            SynthKind::Disk | SynthKind::Square2 => 2,
            SynthKind::Ring3 => 3,
            SynthKind::Grid9 => 9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Disk => "disk",
            SynthKind::Ring3 => "ring3",
            SynthKind::Grid9 => "grid9",
            SynthKind::Square2 => "square2",
        }
    }
}

impl std::str::FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(SynthKind::Disk),
            "ring3" => Ok(SynthKind::Ring3),
            "grid9" => Ok(SynthKind::Grid9),
            "square2" => Ok(SynthKind::Square2),
            other => Err(Error::InvalidShape(format!(
                "unknown synthetic kind {other:?}"
            ))),
        }
    }
}

/// Generate `n_per_class` points for every class region of `kind`,
/// deterministically from the seed. Radial regions sample uniformly in area.
pub fn synth_generate(kind: SynthKind, n_per_class: usize, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut examples = Vec::with_capacity(n_per_class * kind.num_classes());
    for class in 1..=kind.num_classes() {
        for _ in 0..n_per_class {
            let (px, py) = sample_point(kind, class, &mut rng);
            examples.push((
                TimeSeries::new(vec![px, py]).expect("finite sample"),
                class,
            ));
        }
    }
    Dataset::new(
        examples,
        kind.num_classes(),
        kind.name(),
        format!("synthetic:{}:seed={seed}:n={n_per_class}", kind.name()),
    )
}

fn sample_point(kind: SynthKind, class: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let mut radial = |r2_low: f64, r2_high: f64, open_low: bool| {
        let u: f64 = rng.random();
        // Interpolating from the high end keeps the low radius strict when
        // the region excludes its inner boundary.
        let r2 = if open_low {
            r2_high - u * (r2_high - r2_low)
        } else {
            r2_low + u * (r2_high - r2_low)
        };
        let r = r2.sqrt();
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        (r * angle.cos(), r * angle.sin())
    };
    match (kind, class) {
        (SynthKind::Disk, 1) => radial(0.0, 1.0, false),
        (SynthKind::Disk, _) => radial(1.0, 4.0, true),
        (SynthKind::Ring3, 1) => radial(0.0, 1.0, false),
        (SynthKind::Ring3, 2) => radial(1.0, 2.25, false),
        (SynthKind::Ring3, _) => radial(2.25, 6.25, true),
        (SynthKind::Grid9, c) => {
            let row = (c - 1) / 3;
            let col = (c - 1) % 3;
            (
                col as f64 + rng.random::<f64>(),
                row as f64 + rng.random::<f64>(),
            )
        }
        (SynthKind::Square2, 1) => (rng.random(), rng.random()),
        (SynthKind::Square2, _) => loop {
            let x = rng.random::<f64>() * 3.0 - 1.0;
            let y = rng.random::<f64>() * 3.0 - 1.0;
            if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
                break (x, y);
            }
        },
    }
}

//! The four classifier families over time series: plain linear scores (SM),
//! warped products (WP), elastic products (EP), and max-linear stacks (ML),
//! each with one discriminant per class or a single discriminant for
//! two-category problems, plus input augmentation, the argmax decision rule
//! with seeded tie-breaking, and a 1-NN baseline on the DTW distance.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learning::loss::LossKind;
use crate::maxlinear::MaxLinearModel;
use crate::products::{dtw_distance, max_plus_dp, TimeSeries, WeightMatrix, WeightSequence};
use crate::warping::PathConstraint;

/// Classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    /// Plain linear discriminants on augmented inputs of fixed length.
    Sm,
    /// Warped-product discriminants; accepts series of any length.
    Wp,
    /// Elastic-product discriminants; accepts series up to the declared
    /// maximum length via the leading sub-matrix.
    Ep,
    /// Stacks of linear components combined by max; fixed input length.
    Ml,
}

impl ClassifierKind {
    pub fn augmentation(self) -> Augmentation {
        match self {
            ClassifierKind::Wp => Augmentation::LeadOnePadZeros,
            _ => Augmentation::LeadOne,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Sm => "sm",
            ClassifierKind::Wp => "wp",
            ClassifierKind::Ep => "ep",
            ClassifierKind::Ml => "ml",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sm" => Ok(ClassifierKind::Sm),
            "wp" => Ok(ClassifierKind::Wp),
            "ep" => Ok(ClassifierKind::Ep),
            "ml" => Ok(ClassifierKind::Ml),
            other => Err(Error::InvalidShape(format!(
                "unknown classifier kind {other:?}"
            ))),
        }
    }
}

/// How raw series are lifted into the augmented input space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augmentation {
    /// Prepend a constant one (bias absorption).
    LeadOne,
    /// Prepend a zero and the constant one, append a zero. Warped-product
    /// discriminants use this form so the weight sequence can express
    /// arbitrary component stacks.
    LeadOnePadZeros,
}

impl Augmentation {
    pub fn name(self) -> &'static str {
        match self {
            Augmentation::LeadOne => "lead_one",
            Augmentation::LeadOnePadZeros => "lead_one_pad_zeros",
        }
    }
}

impl std::str::FromStr for Augmentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lead_one" => Ok(Augmentation::LeadOne),
            "lead_one_pad_zeros" => Ok(Augmentation::LeadOnePadZeros),
            other => Err(Error::InvalidShape(format!(
                "unknown augmentation {other:?}"
            ))),
        }
    }
}

/// Lift a raw series into the augmented input space.
pub fn augment(x: &TimeSeries, mode: Augmentation) -> TimeSeries {
    let mut values = Vec::with_capacity(x.len() + 3);
    match mode {
        Augmentation::LeadOne => {
            values.push(1.0);
            values.extend_from_slice(x.values());
        }
        Augmentation::LeadOnePadZeros => {
            values.push(0.0);
            values.push(1.0);
            values.extend_from_slice(x.values());
            values.push(0.0);
        }
    }
    TimeSeries::new(values).expect("augmented series stays finite")
}

/// Number of discriminant functions a classifier carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscriminantCount {
    /// One discriminant; only valid for two classes. Predicts class 1 iff
    /// the discriminant is strictly positive.
    Single,
    /// One discriminant per class, argmax decision rule.
    PerClass,
}

/// Classifier family plus discriminant arrangement; what a training run
/// produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub discriminants: DiscriminantCount,
}

impl ClassifierSpec {
    pub fn per_class(kind: ClassifierKind) -> Self {
        Self {
            kind,
            discriminants: DiscriminantCount::PerClass,
        }
    }

    pub fn single(kind: ClassifierKind) -> Self {
        Self {
            kind,
            discriminants: DiscriminantCount::Single,
        }
    }
}

/// Training provenance stored with a classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMeta {
    pub loss: LossKind,
    pub lambda: f64,
    pub seed: u64,
    pub learning_rate: Option<f64>,
}

/// Discriminant value together with the gradient support of the active
/// component: sparse `(flat index, coefficient)` pairs into the parameter
/// block.
#[derive(Debug, Clone)]
pub(crate) struct Activation {
    pub value: f64,
    pub feature: Vec<(usize, f64)>,
}

/// A K-discriminant (or single-discriminant) classifier. Parameter blocks
/// are flat row-major buffers whose interpretation depends on the kind:
/// length-`d` vectors (SM), length-`e` weight sequences (WP), `d x e` weight
/// matrices (EP), or `c x d` component stacks (ML, where the elasticity
/// parameter plays the role of `c`).
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    kind: ClassifierKind,
    num_classes: usize,
    d: usize,
    elasticity: usize,
    augmentation: Augmentation,
    band: Option<usize>,
    blocks: Vec<Vec<f64>>,
    meta: Option<TrainingMeta>,
}

impl Classifier {
    /// Zero-initialized classifier. `d` is the maximum augmented input
    /// length the model declares.
    pub fn new(
        spec: ClassifierSpec,
        num_classes: usize,
        d: usize,
        elasticity: usize,
        band: Option<usize>,
    ) -> Result<Self> {
        if num_classes == 0 {
            return Err(Error::InvalidShape("need at least one class".into()));
        }
        if d < 2 {
            return Err(Error::InvalidShape(
                "declared augmented length must be at least 2".into(),
            ));
        }
        if elasticity == 0 {
            return Err(Error::InvalidShape("elasticity must be positive".into()));
        }
        if spec.discriminants == DiscriminantCount::Single && num_classes != 2 {
            return Err(Error::InvalidShape(
                "single-discriminant mode requires exactly two classes".into(),
            ));
        }
        let blocks_needed = match spec.discriminants {
            DiscriminantCount::Single => 1,
            DiscriminantCount::PerClass => num_classes,
        };
        let block_len = match spec.kind {
            ClassifierKind::Sm => d,
            ClassifierKind::Wp => elasticity,
            ClassifierKind::Ep | ClassifierKind::Ml => d * elasticity,
        };
        Ok(Self {
            kind: spec.kind,
            num_classes,
            d,
            elasticity,
            augmentation: spec.kind.augmentation(),
            band,
            blocks: vec![vec![0.0; block_len]; blocks_needed],
            meta: None,
        })
    }

    /// Build a classifier from explicit parameter blocks (one per
    /// discriminant, in the flat layout documented on the type).
    pub fn with_parameters(
        spec: ClassifierSpec,
        num_classes: usize,
        d: usize,
        elasticity: usize,
        band: Option<usize>,
        blocks: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let mut c = Self::new(spec, num_classes, d, elasticity, band)?;
        if blocks.len() != c.blocks.len() {
            return Err(Error::InvalidShape(format!(
                "{} parameter blocks where {} expected",
                blocks.len(),
                c.blocks.len()
            )));
        }
        for (slot, block) in c.blocks.iter_mut().zip(&blocks) {
            if slot.len() != block.len() {
                return Err(Error::InvalidShape(format!(
                    "block of {} values where {} expected",
                    block.len(),
                    slot.len()
                )));
            }
            slot.copy_from_slice(block);
        }
        Ok(c)
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        kind: ClassifierKind,
        num_classes: usize,
        d: usize,
        elasticity: usize,
        augmentation: Augmentation,
        band: Option<usize>,
        blocks: Vec<Vec<f64>>,
        meta: Option<TrainingMeta>,
    ) -> Result<Self> {
        let discriminants = if blocks.len() == 1 && num_classes == 2 {
            DiscriminantCount::Single
        } else if blocks.len() == num_classes {
            DiscriminantCount::PerClass
        } else {
            return Err(Error::InvalidShape(format!(
                "{} parameter blocks for {num_classes} classes",
                blocks.len()
            )));
        };
        let spec = ClassifierSpec {
            kind,
            discriminants,
        };
        let mut c = Self::with_parameters(spec, num_classes, d, elasticity, band, blocks)?;
        c.augmentation = augmentation;
        c.meta = meta;
        Ok(c)
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Declared maximum augmented input length.
    pub fn declared_length(&self) -> usize {
        self.d
    }

    pub fn elasticity(&self) -> usize {
        self.elasticity
    }

    pub fn augmentation(&self) -> Augmentation {
        self.augmentation
    }

    pub fn band(&self) -> Option<usize> {
        self.band
    }

    pub fn num_discriminants(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_single_discriminant(&self) -> bool {
        self.blocks.len() == 1 && self.num_classes == 2
    }

    pub fn meta(&self) -> Option<&TrainingMeta> {
        self.meta.as_ref()
    }

    pub(crate) fn set_meta(&mut self, meta: TrainingMeta) {
        self.meta = Some(meta);
    }

    /// Flat parameters of discriminant `k`.
    pub fn block(&self, k: usize) -> &[f64] {
        &self.blocks[k]
    }

    pub(crate) fn block_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.blocks[k]
    }

    pub(crate) fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub(crate) fn set_blocks(&mut self, blocks: Vec<Vec<f64>>) {
        self.blocks = blocks;
    }

    /// Draw every parameter uniformly from `[-scale, scale]`.
    pub(crate) fn randomize(&mut self, rng: &mut ChaCha8Rng, scale: f64) {
        for block in &mut self.blocks {
            for w in block.iter_mut() {
                *w = if scale > 0.0 {
                    rng.random_range(-scale..=scale)
                } else {
                    0.0
                };
            }
        }
    }

    /// The EP discriminant `k` as a weight matrix.
    pub fn weight_matrix(&self, k: usize) -> Result<WeightMatrix> {
        if self.kind != ClassifierKind::Ep {
            return Err(Error::InvalidShape(format!(
                "classifier kind {} has no weight matrix",
                self.kind.name()
            )));
        }
        let entries =
            Array2::from_shape_vec((self.d, self.elasticity), self.blocks[k].clone())
                .map_err(|e| Error::InvalidShape(e.to_string()))?;
        WeightMatrix::new(entries)
    }

    /// The WP discriminant `k` as a weight sequence.
    pub fn weight_sequence(&self, k: usize) -> Result<WeightSequence> {
        if self.kind != ClassifierKind::Wp {
            return Err(Error::InvalidShape(format!(
                "classifier kind {} has no weight sequence",
                self.kind.name()
            )));
        }
        WeightSequence::new(self.blocks[k].clone())
    }

    /// The ML discriminant `k` as a max-linear model.
    pub fn maxlinear_model(&self, k: usize) -> Result<MaxLinearModel> {
        if self.kind != ClassifierKind::Ml {
            return Err(Error::InvalidShape(format!(
                "classifier kind {} has no max-linear model",
                self.kind.name()
            )));
        }
        MaxLinearModel::from_flat(self.d, self.blocks[k].clone())
    }

    pub fn augment_input(&self, x: &TimeSeries) -> TimeSeries {
        augment(x, self.augmentation)
    }

    fn band_for(&self, m: usize, n: usize) -> Result<Option<PathConstraint>> {
        match self.band {
            None => Ok(None),
            Some(width) => Ok(Some(PathConstraint::band(m, n, width)?)),
        }
    }

    fn check_length(&self, augmented_len: usize) -> Result<()> {
        match self.kind {
            ClassifierKind::Sm | ClassifierKind::Ml => {
                if augmented_len != self.d {
                    return Err(Error::DimensionMismatch(format!(
                        "augmented input length {augmented_len} != declared {}",
                        self.d
                    )));
                }
            }
            ClassifierKind::Ep => {
                if augmented_len > self.d {
                    return Err(Error::DimensionMismatch(format!(
                        "augmented input length {augmented_len} exceeds declared {}",
                        self.d
                    )));
                }
            }
            ClassifierKind::Wp => {}
        }
        Ok(())
    }

    pub(crate) fn activation(&self, k: usize, x_aug: &[f64]) -> Result<Activation> {
        let block = &self.blocks[k];
        match self.kind {
            ClassifierKind::Sm => {
                let mut value = 0.0;
                let mut feature = Vec::with_capacity(x_aug.len());
                for (i, (&w, &xi)) in block.iter().zip(x_aug).enumerate() {
                    value += w * xi;
                    feature.push((i, xi));
                }
                Ok(Activation { value, feature })
            }
            ClassifierKind::Wp => {
                let (m, n) = (block.len(), x_aug.len());
                let q = self.band_for(m, n)?;
                let (value, path) =
                    max_plus_dp(m, n, |i, j| block[i] * x_aug[j], q.as_ref())?;
                let mut weight_feature = vec![0.0; m];
                for &(i, j) in path.points() {
                    weight_feature[i - 1] += x_aug[j - 1];
                }
                let feature = weight_feature
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, v)| v != 0.0)
                    .collect();
                Ok(Activation { value, feature })
            }
            ClassifierKind::Ep => {
                let (m, n) = (x_aug.len(), self.elasticity);
                let q = self.band_for(m, n)?;
                let (value, path) =
                    max_plus_dp(m, n, |i, j| block[i * n + j] * x_aug[i], q.as_ref())?;
                let feature = path
                    .points()
                    .iter()
                    .map(|&(i, j)| ((i - 1) * n + (j - 1), x_aug[i - 1]))
                    .collect();
                Ok(Activation { value, feature })
            }
            ClassifierKind::Ml => {
                let d = self.d;
                let mut best = f64::NEG_INFINITY;
                let mut best_p = 0;
                for (p, comp) in block.chunks(d).enumerate() {
                    let v: f64 = comp.iter().zip(x_aug).map(|(a, b)| a * b).sum();
                    if v > best {
                        best = v;
                        best_p = p;
                    }
                }
                let feature = x_aug
                    .iter()
                    .enumerate()
                    .map(|(i, &xi)| (best_p * d + i, xi))
                    .collect();
                Ok(Activation {
                    value: best,
                    feature,
                })
            }
        }
    }

    pub(crate) fn activations(&self, x: &TimeSeries) -> Result<Vec<Activation>> {
        let x_aug = self.augment_input(x);
        self.check_length(x_aug.len())?;
        (0..self.blocks.len())
            .map(|k| self.activation(k, x_aug.values()))
            .collect()
    }

    /// One discriminant value per block: `K` values in per-class mode, one
    /// value in single-discriminant mode.
    pub fn decision_values(&self, x: &TimeSeries) -> Result<Vec<f64>> {
        Ok(self.activations(x)?.into_iter().map(|a| a.value).collect())
    }

    /// Argmax decision with uniform tie-breaking from the supplied stream;
    /// single-discriminant mode assigns class 1 iff the value is strictly
    /// positive (the decision surface belongs to class 2).
    pub fn predict<R: Rng>(&self, x: &TimeSeries, rng: &mut R) -> Result<usize> {
        let values = self.decision_values(x)?;
        if self.is_single_discriminant() {
            return Ok(if values[0] > 0.0 { 1 } else { 2 });
        }
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == best)
            .map(|(k, _)| k + 1)
            .collect();
        if tied.len() == 1 {
            Ok(tied[0])
        } else {
            Ok(tied[rng.random_range(0..tied.len())])
        }
    }

    /// [`Classifier::predict`] drawing its tie-break stream from a seed.
    pub fn predict_with_seed(&self, x: &TimeSeries, seed: u64) -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.predict(x, &mut rng)
    }
}

/// Label of the training series with the smallest DTW distance to `x`,
/// ties resolved toward the lowest training index.
pub fn nn_dtw_predict(train: &Dataset, x: &TimeSeries) -> Result<usize> {
    let mut best = f64::INFINITY;
    let mut label = None;
    for (series, y) in train.examples() {
        let dist = dtw_distance(series, x);
        if dist < best {
            best = dist;
            label = Some(*y);
        }
    }
    label.ok_or(Error::EmptyDataset)
}

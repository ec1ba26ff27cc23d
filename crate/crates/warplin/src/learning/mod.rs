//! Stochastic subgradient training of the classifier families.
//!
//! Every example step touches only the active component of each discriminant
//! (the optimal warping path, or the maximizing linear piece) with the loss
//! derivative, while weight decay touches all parameters. Updates flow
//! through ADAM; the initial learning rate is selected by halving trials.

pub mod adam;
pub mod loss;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use adam::{AdamState, ADAM_EPSILON};
pub use loss::{multinomial_derivative, multinomial_loss, LossKind};

use crate::classifiers::{Classifier, ClassifierKind, ClassifierSpec, DiscriminantCount, TrainingMeta};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval;
use crate::products::TimeSeries;

/// Hard floor for the learning-rate search.
pub const LR_FLOOR: f64 = 1.0 / (1 << 20) as f64;

/// Epochs per learning-rate trial.
const TRIAL_EPOCHS: usize = 100;

/// Hyper-parameters of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Length of the weight sequence / column count of the weight matrix;
    /// for ML classifiers, the number of linear components.
    pub elasticity: usize,
    pub loss: LossKind,
    /// Weight-decay strength.
    pub lambda: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub max_epochs: usize,
    /// Consecutive epochs without risk improvement before stopping.
    pub patience: usize,
    pub rng_seed: u64,
    /// Skip the learning-rate search and use this rate.
    pub lr_override: Option<f64>,
    /// Whether weight decay also touches bias parameters.
    pub regularize_bias: bool,
    /// Sakoe-Chiba style band half-width, or unconstrained.
    pub band: Option<usize>,
    /// Half-width of the uniform initialization interval.
    pub init_scale: f64,
}

impl TrainConfig {
    pub fn new(elasticity: usize, loss: LossKind) -> Self {
        let lambda = if matches!(loss, LossKind::HingeSvm) {
            1e-4
        } else {
            0.0
        };
        Self {
            elasticity,
            loss,
            lambda,
            beta1: 0.9,
            beta2: 0.999,
            max_epochs: 5000,
            patience: 100,
            rng_seed: 0,
            lr_override: None,
            regularize_bias: false,
            band: None,
            init_scale: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        if self.elasticity == 0 {
            return Err(Error::InvalidShape("elasticity must be positive".into()));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::InvalidShape(format!(
                    "{name} must lie in [0, 1), got {beta}"
                )));
            }
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::InvalidShape(
                "max_epochs and patience must be at least 1".into(),
            ));
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::InvalidShape(format!(
                "lambda must be a finite non-negative number, got {}",
                self.lambda
            )));
        }
        if matches!(self.loss, LossKind::HingeSvm) && self.lambda == 0.0 {
            return Err(Error::InvalidShape(
                "the hinge loss requires positive weight decay".into(),
            ));
        }
        if !self.init_scale.is_finite() || self.init_scale < 0.0 {
            return Err(Error::InvalidShape(
                "init_scale must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Embed `u` as segment `p` (1-based) of a stack of `c` equal segments,
/// zeros elsewhere.
pub fn p_inflation(u: &[f64], p: usize, c: usize) -> Result<Vec<f64>> {
    if p == 0 || p > c {
        return Err(Error::IndexOutOfRange { index: p, bound: c });
    }
    let mut out = vec![0.0; c * u.len()];
    out[(p - 1) * u.len()..p * u.len()].copy_from_slice(u);
    Ok(out)
}

fn is_bias_index(kind: ClassifierKind, d: usize, e: usize, idx: usize) -> bool {
    match kind {
        ClassifierKind::Sm | ClassifierKind::Wp => idx == 0,
        ClassifierKind::Ep => idx < e,
        ClassifierKind::Ml => idx.is_multiple_of(d),
    }
}

/// Per-discriminant loss derivatives at the current decision values.
fn discriminant_derivatives(
    loss: LossKind,
    values: &[f64],
    y: usize,
    single: bool,
) -> Result<Vec<f64>> {
    if single {
        let target = if y == 1 {
            loss.positive_target()
        } else {
            loss.negative_target()
        };
        Ok(vec![loss.binary_derivative(target, values[0])?])
    } else if loss.is_multinomial() {
        multinomial_derivative(y, values)
    } else {
        // One-vs-rest reading: discriminant k sees a positive target iff the
        // example belongs to class k.
        values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let target = if y == k + 1 {
                    loss.positive_target()
                } else {
                    loss.negative_target()
                };
                loss.binary_derivative(target, v)
            })
            .collect()
    }
}

fn example_loss(loss: LossKind, values: &[f64], y: usize, single: bool) -> Result<f64> {
    if single {
        let target = if y == 1 {
            loss.positive_target()
        } else {
            loss.negative_target()
        };
        loss.binary_value(target, values[0])
    } else if loss.is_multinomial() {
        multinomial_loss(y, values)
    } else {
        values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let target = if y == k + 1 {
                    loss.positive_target()
                } else {
                    loss.negative_target()
                };
                loss.binary_value(target, v)
            })
            .sum()
    }
}

fn squared_norm(c: &Classifier, regularize_bias: bool) -> f64 {
    let (d, e) = (c.declared_length(), c.elasticity());
    let mut total = 0.0;
    for k in 0..c.num_discriminants() {
        for (idx, w) in c.block(k).iter().enumerate() {
            if regularize_bias || !is_bias_index(c.kind(), d, e, idx) {
                total += w * w;
            }
        }
    }
    total
}

/// Subgradient of the per-example objective
/// `loss + (lambda/2) ||theta||^2` (bias excluded unless configured), one
/// flat block per discriminant. The loss part lands on the active
/// component's support only; decay touches everything else too.
pub fn subgradient_step(
    c: &Classifier,
    x: &TimeSeries,
    y: usize,
    cfg: &TrainConfig,
) -> Result<Vec<Vec<f64>>> {
    if y == 0 || y > c.num_classes() {
        return Err(Error::LabelOutOfRange {
            label: y,
            num_classes: c.num_classes(),
        });
    }
    let activations = c.activations(x)?;
    let values: Vec<f64> = activations.iter().map(|a| a.value).collect();
    let derivs =
        discriminant_derivatives(cfg.loss, &values, y, c.is_single_discriminant())?;
    let (d, e) = (c.declared_length(), c.elasticity());
    let mut out = Vec::with_capacity(activations.len());
    for (k, act) in activations.iter().enumerate() {
        let block = c.block(k);
        let mut g = vec![0.0; block.len()];
        if derivs[k] != 0.0 {
            for &(idx, coef) in &act.feature {
                g[idx] += derivs[k] * coef;
            }
        }
        if cfg.lambda > 0.0 {
            for (idx, slot) in g.iter_mut().enumerate() {
                if cfg.regularize_bias || !is_bias_index(c.kind(), d, e, idx) {
                    *slot += cfg.lambda * block[idx];
                }
            }
        }
        out.push(g);
    }
    Ok(out)
}

/// The per-example objective whose subgradient [`subgradient_step`]
/// returns: the loss at the decision values plus `(lambda/2) ||theta||^2`
/// over the regularized parameters.
pub fn per_example_objective(
    c: &Classifier,
    x: &TimeSeries,
    y: usize,
    cfg: &TrainConfig,
) -> Result<f64> {
    if y == 0 || y > c.num_classes() {
        return Err(Error::LabelOutOfRange {
            label: y,
            num_classes: c.num_classes(),
        });
    }
    let values = c.decision_values(x)?;
    let loss = example_loss(cfg.loss, &values, y, c.is_single_discriminant())?;
    Ok(loss + 0.5 * cfg.lambda * squared_norm(c, cfg.regularize_bias))
}

/// Mean loss over the dataset plus `lambda ||theta||^2` (bias excluded
/// unless configured).
pub fn regularized_risk(c: &Classifier, ds: &Dataset, cfg: &TrainConfig) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for (x, y) in ds.examples() {
        let values = c.decision_values(x)?;
        total += example_loss(cfg.loss, &values, *y, c.is_single_discriminant())?;
    }
    Ok(total / ds.len() as f64 + cfg.lambda * squared_norm(c, cfg.regularize_bias))
}

/// One row of the training trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Regularized empirical risk over the full training set after the
    /// epoch's updates (epoch zero records the initial parameters).
    pub risk: f64,
    /// Training accuracy in percent.
    pub accuracy: f64,
}

/// Result of a training run: the parameters with the lowest observed risk,
/// the per-epoch trace, and the learning rate used.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub classifier: Classifier,
    pub trace: Vec<EpochRecord>,
    pub best_risk: f64,
    pub best_epoch: usize,
    pub learning_rate: f64,
}

fn check_compatible(cfg: &TrainConfig, ds: &Dataset, spec: ClassifierSpec) -> Result<()> {
    if spec.discriminants == DiscriminantCount::Single && ds.num_classes() != 2 {
        return Err(Error::InvalidShape(
            "single-discriminant training requires a two-class dataset".into(),
        ));
    }
    if spec.discriminants == DiscriminantCount::Single && cfg.loss.is_multinomial() {
        return Err(Error::LabelDomain(
            "multinomial loss needs one discriminant per class".into(),
        ));
    }
    Ok(())
}

fn init_classifier(cfg: &TrainConfig, ds: &Dataset, spec: ClassifierSpec) -> Result<Classifier> {
    let d = 1 + ds.max_series_length();
    let elasticity = if spec.kind == ClassifierKind::Sm {
        1
    } else {
        cfg.elasticity
    };
    let mut c = Classifier::new(spec, ds.num_classes(), d, elasticity, cfg.band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    c.randomize(&mut rng, cfg.init_scale);
    Ok(c)
}

fn trace_seed(base: u64, epoch: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(epoch as u64)
}

fn run_training(
    cfg: &TrainConfig,
    ds: &Dataset,
    spec: ClassifierSpec,
    eta: f64,
    max_epochs: usize,
    patience: Option<usize>,
) -> Result<(Classifier, Vec<EpochRecord>, f64, usize)> {
    let mut c = init_classifier(cfg, ds, spec)?;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(1));
    let mut adam: Vec<AdamState> = (0..c.num_discriminants())
        .map(|k| AdamState::new(c.block(k).len()))
        .collect();

    let risk0 = regularized_risk(&c, ds, cfg)?;
    let mut trace = vec![EpochRecord {
        epoch: 0,
        risk: risk0,
        accuracy: eval::accuracy(&c, ds, trace_seed(cfg.rng_seed, 0))?,
    }];
    let mut best_blocks: Vec<Vec<f64>> = c.blocks().to_vec();
    let mut best_risk = risk0;
    let mut best_epoch = 0;
    let mut stalled = 0usize;

    let mut order: Vec<usize> = (0..ds.len()).collect();
    for epoch in 1..=max_epochs {
        order.shuffle(&mut shuffle_rng);
        for &i in &order {
            let (x, y) = &ds.examples()[i];
            let gs = subgradient_step(&c, x, *y, cfg)?;
            for (k, g) in gs.iter().enumerate() {
                let delta = adam[k].delta(g, eta, cfg.beta1, cfg.beta2, ADAM_EPSILON);
                for (w, dw) in c.block_mut(k).iter_mut().zip(delta) {
                    *w += dw;
                }
            }
        }
        let risk = regularized_risk(&c, ds, cfg)?;
        trace.push(EpochRecord {
            epoch,
            risk,
            accuracy: eval::accuracy(&c, ds, trace_seed(cfg.rng_seed, epoch))?,
        });
        if risk < best_risk {
            best_risk = risk;
            best_epoch = epoch;
            best_blocks = c.blocks().to_vec();
            stalled = 0;
        } else {
            stalled += 1;
            if patience.is_some_and(|p| stalled >= p) {
                break;
            }
        }
    }
    c.set_blocks(best_blocks);
    Ok((c, trace, best_risk, best_epoch))
}

/// Halving search for the initial learning rate: candidates 0.4, 0.2, ...
/// each re-initialize the classifier and run 100 epochs; the first rate
/// whose fraction of non-improving epochs ends below 0.2 wins. Falls back
/// to [`LR_FLOOR`] when no candidate qualifies.
pub fn select_initial_lr(
    cfg: &TrainConfig,
    ds: &Dataset,
    spec: ClassifierSpec,
) -> Result<f64> {
    cfg.validate()?;
    check_compatible(cfg, ds, spec)?;
    let mut eta: f64 = 0.8;
    loop {
        eta /= 2.0;
        if eta < LR_FLOOR {
            return Ok(LR_FLOOR);
        }
        let (_, trace, _, _) = run_training(cfg, ds, spec, eta, TRIAL_EPOCHS, None)?;
        let epochs = trace.len() - 1;
        let mut best = trace[0].risk;
        let mut stalled = 0usize;
        for rec in &trace[1..] {
            if rec.risk < best {
                best = rec.risk;
            } else {
                stalled += 1;
            }
        }
        if epochs > 0 && (stalled as f64) / (epochs as f64) < 0.2 {
            return Ok(eta);
        }
    }
}

/// Train a classifier: seeded initialization, per-epoch seeded shuffles,
/// subgradient steps through ADAM, and early stopping on the patience
/// budget. Returns the parameters that achieved the lowest observed
/// regularized risk (the initial parameters count as observed).
pub fn train(cfg: &TrainConfig, ds: &Dataset, spec: ClassifierSpec) -> Result<TrainOutcome> {
    cfg.validate()?;
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_compatible(cfg, ds, spec)?;
    let eta = match cfg.lr_override {
        Some(lr) => lr,
        None => select_initial_lr(cfg, ds, spec)?,
    };
    let (mut classifier, trace, best_risk, best_epoch) =
        run_training(cfg, ds, spec, eta, cfg.max_epochs, Some(cfg.patience))?;
    classifier.set_meta(TrainingMeta {
        loss: cfg.loss,
        lambda: cfg.lambda,
        seed: cfg.rng_seed,
        learning_rate: Some(eta),
    });
    Ok(TrainOutcome {
        classifier,
        trace,
        best_risk,
        best_epoch,
        learning_rate: eta,
    })
}

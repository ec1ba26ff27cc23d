//! Evaluation harness: accuracy with seeded tie-breaking, pairwise
//! comparison metrics over accuracy tables, mean-rank summaries, the
//! elasticity grid search, and the label-dependency protocol for
//! two-category problems.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifiers::{Classifier, ClassifierKind, ClassifierSpec};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learning::{train, EpochRecord, TrainConfig, TrainOutcome};

/// Percentage of correctly classified examples. Tie-breaking consumes a
/// stream seeded per call, one draw position per example index.
pub fn accuracy(c: &Classifier, ds: &Dataset, seed: u64) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut correct = 0usize;
    for (x, y) in ds.examples() {
        if c.predict(x, &mut rng)? == *y {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / ds.len() as f64)
}

/// Pairwise winning percentages over an accuracy table (rows = classifiers,
/// columns = datasets): entry `(i, j)` is the percentage of datasets on
/// which classifier `i` is strictly more accurate than classifier `j`.
pub fn winning_percentage(accs: &Array2<f64>) -> Result<Array2<f64>> {
    let (k, d) = accs.dim();
    if k == 0 || d == 0 {
        return Err(Error::ShapeMismatch("empty accuracy table".into()));
    }
    let mut out = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            let wins = (0..d).filter(|&t| accs[(j, t)] < accs[(i, t)]).count();
            out[(i, j)] = 100.0 * wins as f64 / d as f64;
        }
    }
    Ok(out)
}

/// Pairwise mean percentage difference in accuracy: the antisymmetric
/// matrix with entries `100 * (2/D) * sum (acc_i - acc_j)/(acc_i + acc_j)`.
pub fn mean_percentage_difference(accs: &Array2<f64>) -> Result<Array2<f64>> {
    let (k, d) = accs.dim();
    if k == 0 || d == 0 {
        return Err(Error::ShapeMismatch("empty accuracy table".into()));
    }
    let mut out = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            let mut total = 0.0;
            for t in 0..d {
                let denom = accs[(i, t)] + accs[(j, t)];
                if denom == 0.0 {
                    return Err(Error::DivisionDomain(format!(
                        "accuracies of classifiers {i} and {j} on dataset {t} sum to zero"
                    )));
                }
                total += (accs[(i, t)] - accs[(j, t)]) / denom;
            }
            out[(i, j)] = 100.0 * 2.0 * total / d as f64;
        }
    }
    Ok(out)
}

/// Per-classifier rank summary over an accuracy table. Ranks go from 1
/// (highest accuracy) down; ties receive the mean of the tied positions,
/// and a tied rank contributes fractionally to the neighboring integer
/// buckets of the distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct RankSummary {
    /// `ranks[i][t]` is the rank of classifier `i` on dataset `t`.
    pub ranks: Vec<Vec<f64>>,
    /// `counts[i][r]` is the (possibly fractional) number of datasets on
    /// which classifier `i` took rank `r + 1`.
    pub counts: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn rank_table(accs: &Array2<f64>) -> Result<RankSummary> {
    let (k, d) = accs.dim();
    if k == 0 || d == 0 {
        return Err(Error::ShapeMismatch("empty accuracy table".into()));
    }
    if accs.iter().any(|v| !v.is_finite()) {
        return Err(Error::ShapeMismatch(
            "accuracy table contains non-finite entries".into(),
        ));
    }
    let mut ranks = vec![vec![0.0; d]; k];
    for t in 0..d {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            accs[(b, t)]
                .partial_cmp(&accs[(a, t)])
                .expect("checked finite above")
        });
        let mut pos = 0;
        while pos < k {
            let mut end = pos;
            while end + 1 < k && accs[(order[end + 1], t)] == accs[(order[pos], t)] {
                end += 1;
            }
            // Mean of the tied positions, 1-based.
            let rank = (pos + 1 + end + 1) as f64 / 2.0;
            for &i in &order[pos..=end] {
                ranks[i][t] = rank;
            }
            pos = end + 1;
        }
    }
    let mut counts = vec![vec![0.0; k]; k];
    for i in 0..k {
        for &r in &ranks[i] {
            let low = r.floor();
            let frac = r - low;
            counts[i][low as usize - 1] += 1.0 - frac;
            if frac > 0.0 {
                counts[i][low as usize] += frac;
            }
        }
    }
    let mean: Vec<f64> = ranks
        .iter()
        .map(|r| r.iter().sum::<f64>() / d as f64)
        .collect();
    let std: Vec<f64> = ranks
        .iter()
        .zip(&mean)
        .map(|(r, m)| (r.iter().map(|v| (v - m).powi(2)).sum::<f64>() / d as f64).sqrt())
        .collect();
    Ok(RankSummary {
        ranks,
        counts,
        mean,
        std,
    })
}

/// Outcome of the elasticity grid search.
#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best_elasticity: usize,
    /// `(elasticity, best training risk)` per grid cell, in grid order.
    pub risks: Vec<(usize, f64)>,
    pub best: TrainOutcome,
}

/// Train one model per elasticity and keep the one with the lowest training
/// risk; ties resolve toward the smallest elasticity. Each cell trains from
/// the same seed, so results do not depend on grid order.
pub fn elasticity_grid(
    base: &TrainConfig,
    grid: &[usize],
    ds: &Dataset,
    spec: ClassifierSpec,
) -> Result<GridOutcome> {
    if grid.is_empty() {
        return Err(Error::InvalidShape("empty elasticity grid".into()));
    }
    let mut risks = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, TrainOutcome)> = None;
    for &e in grid {
        let mut cfg = base.clone();
        cfg.elasticity = e;
        let outcome = train(&cfg, ds, spec)?;
        risks.push((e, outcome.best_risk));
        let better = match &best {
            None => true,
            Some((be, bo)) => {
                outcome.best_risk < bo.best_risk
                    || (outcome.best_risk == bo.best_risk && e < *be)
            }
        };
        if better {
            best = Some((e, outcome));
        }
    }
    let (best_elasticity, best) = best.expect("non-empty grid");
    Ok(GridOutcome {
        best_elasticity,
        risks,
        best,
    })
}

/// The comparison bundle computed from an accuracy table: the table itself
/// plus the pairwise winning percentages, the pairwise mean percentage
/// differences, and the rank summary.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub classifier_names: Vec<String>,
    /// Rows = classifiers, columns = datasets, entries in percent.
    pub accuracies: Array2<f64>,
    pub winning: Array2<f64>,
    pub mean_percentage_difference: Array2<f64>,
    pub ranks: RankSummary,
}

/// Assemble the pairwise comparison report for an accuracy table.
pub fn eval_report(names: Vec<String>, accuracies: Array2<f64>) -> Result<EvalReport> {
    if names.len() != accuracies.dim().0 {
        return Err(Error::ShapeMismatch(format!(
            "{} names for {} classifier rows",
            names.len(),
            accuracies.dim().0
        )));
    }
    Ok(EvalReport {
        winning: winning_percentage(&accuracies)?,
        mean_percentage_difference: mean_percentage_difference(&accuracies)?,
        ranks: rank_table(&accuracies)?,
        classifier_names: names,
        accuracies,
    })
}

/// Render a training trace as tab-separated `epoch / risk / accuracy` rows.
pub fn export_trace(trace: &[EpochRecord]) -> String {
    let mut out = String::from("epoch\trisk\taccuracy\n");
    for rec in trace {
        out.push_str(&format!("{}\t{}\t{}\n", rec.epoch, rec.risk, rec.accuracy));
    }
    out
}

/// Results of the two-category label-dependency protocol on elastic-product
/// classifiers.
#[derive(Debug, Clone)]
pub struct LabelDependencyOutcome {
    /// Single discriminant, labeling with the higher training accuracy.
    pub favourable: LabelDependencyCell,
    /// Single discriminant, labeling with the lower training accuracy.
    pub unfavourable: LabelDependencyCell,
    /// Two discriminants under the original labeling.
    pub two_discriminant: LabelDependencyCell,
    /// Two discriminants under the swapped labeling.
    pub two_discriminant_swapped: LabelDependencyCell,
}

#[derive(Debug, Clone)]
pub struct LabelDependencyCell {
    /// Whether class labels were swapped relative to the input dataset.
    pub swapped: bool,
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
}

/// Train single-discriminant elastic-product classifiers under both label
/// assignments of a two-class dataset (reporting the favourable and
/// unfavourable sides by training accuracy) and two-discriminant classifiers
/// under both assignments.
///
/// The single-discriminant runs use a binary loss (the multinomial loss
/// needs one discriminant per class); the two-discriminant runs use the
/// configured loss as-is.
pub fn label_dependency_ep(
    cfg: &TrainConfig,
    train_ds: &Dataset,
    test_ds: Option<&Dataset>,
) -> Result<LabelDependencyOutcome> {
    if train_ds.num_classes() != 2 {
        return Err(Error::InvalidShape(
            "label dependency protocol requires two classes".into(),
        ));
    }
    let swapped_train = train_ds.with_swapped_binary_labels()?;
    let swapped_test = test_ds.map(Dataset::with_swapped_binary_labels).transpose()?;

    let mut single_cfg = cfg.clone();
    if single_cfg.loss.is_multinomial() {
        single_cfg.loss = crate::learning::LossKind::Logistic;
    }
    let run = |cfg: &TrainConfig,
               spec: ClassifierSpec,
               tr: &Dataset,
               te: Option<&Dataset>,
               swapped: bool|
     -> Result<LabelDependencyCell> {
        let out = train(cfg, tr, spec)?;
        Ok(LabelDependencyCell {
            swapped,
            train_accuracy: accuracy(&out.classifier, tr, cfg.rng_seed)?,
            test_accuracy: te
                .map(|t| accuracy(&out.classifier, t, cfg.rng_seed))
                .transpose()?,
        })
    };

    let single = ClassifierSpec::single(ClassifierKind::Ep);
    let original = run(&single_cfg, single, train_ds, test_ds, false)?;
    let flipped = run(
        &single_cfg,
        single,
        &swapped_train,
        swapped_test.as_ref(),
        true,
    )?;
    let (favourable, unfavourable) = if original.train_accuracy >= flipped.train_accuracy {
        (original, flipped)
    } else {
        (flipped, original)
    };

    let per_class = ClassifierSpec::per_class(ClassifierKind::Ep);
    let two = run(cfg, per_class, train_ds, test_ds, false)?;
    let two_swapped = run(cfg, per_class, &swapped_train, swapped_test.as_ref(), true)?;

    Ok(LabelDependencyOutcome {
        favourable,
        unfavourable,
        two_discriminant: two,
        two_discriminant_swapped: two_swapped,
    })
}

//! Loss functions and their derivatives with respect to the predicted
//! score. Derivatives at hinge-style kinks return zero, a valid subgradient.

use crate::error::{Error, Result};

/// The supported loss families. Binary kinds score a single discriminant
/// value against a label in `{-1, +1}` (logistic regression uses `{0, 1}`);
/// the multinomial kind scores a vector of `K` discriminant values against a
/// class index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// Squared error `0.5 (y - s)^2` on labels `{-1, +1}`.
    Adaline,
    /// `max(0, -y s)` on labels `{-1, +1}`.
    Perceptron,
    /// `max(0, margin - y s)` on labels `{-1, +1}`; `margin > 0`.
    MarginPerceptron { margin: f64 },
    /// Hinge `max(0, 1 - y s)`; the weight-decay term of the SVM objective
    /// is supplied by the trainer's regularization.
    HingeSvm,
    /// Negative log-likelihood of the sigmoid on labels `{0, 1}`.
    Logistic,
    /// Negative log-softmax over `K` discriminant values.
    MultinomialLogistic,
}

impl LossKind {
    pub fn is_multinomial(self) -> bool {
        matches!(self, LossKind::MultinomialLogistic)
    }

    /// Binary target encoding for membership in the positive side.
    pub fn positive_target(self) -> f64 {
        1.0
    }

    pub fn negative_target(self) -> f64 {
        match self {
            LossKind::Logistic => 0.0,
            _ => -1.0,
        }
    }

    pub fn validate(self) -> Result<()> {
        if let LossKind::MarginPerceptron { margin } = self {
            if !margin.is_finite() || margin <= 0.0 {
                return Err(Error::InvalidShape(format!(
                    "margin must be positive and finite, got {margin}"
                )));
            }
        }
        Ok(())
    }

    fn check_binary_label(self, y: f64) -> Result<()> {
        let ok = match self {
            LossKind::Logistic => y == 0.0 || y == 1.0,
            LossKind::MultinomialLogistic => false,
            _ => y == 1.0 || y == -1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::LabelDomain(format!(
                "label {y} invalid for {self:?}"
            )))
        }
    }

    /// Loss at predicted score `s` for binary label `y`.
    pub fn binary_value(self, y: f64, s: f64) -> Result<f64> {
        self.check_binary_label(y)?;
        Ok(match self {
            LossKind::Adaline => 0.5 * (y - s).powi(2),
            LossKind::Perceptron => (-y * s).max(0.0),
            LossKind::MarginPerceptron { margin } => (margin - y * s).max(0.0),
            LossKind::HingeSvm => (1.0 - y * s).max(0.0),
            LossKind::Logistic => {
                let sigma = sigmoid(s);
                -y * sigma.max(f64::MIN_POSITIVE).ln()
                    - (1.0 - y) * (1.0 - sigma).max(f64::MIN_POSITIVE).ln()
            }
            LossKind::MultinomialLogistic => unreachable!("rejected by label check"),
        })
    }

    /// Derivative of the loss with respect to the predicted score.
    pub fn binary_derivative(self, y: f64, s: f64) -> Result<f64> {
        self.check_binary_label(y)?;
        Ok(match self {
            LossKind::Adaline => -(y - s),
            LossKind::Perceptron => {
                if -y * s > 0.0 {
                    -y
                } else {
                    0.0
                }
            }
            LossKind::MarginPerceptron { margin } => {
                if margin - y * s > 0.0 {
                    -y
                } else {
                    0.0
                }
            }
            LossKind::HingeSvm => {
                if 1.0 - y * s > 0.0 {
                    -y
                } else {
                    0.0
                }
            }
            LossKind::Logistic => sigmoid(s) - y,
            LossKind::MultinomialLogistic => unreachable!("rejected by label check"),
        })
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LossKind::Adaline => write!(f, "adaline"),
            LossKind::Perceptron => write!(f, "perceptron"),
            LossKind::MarginPerceptron { margin } => write!(f, "margin_perceptron:{margin}"),
            LossKind::HingeSvm => write!(f, "hinge_svm"),
            LossKind::Logistic => write!(f, "logistic"),
            LossKind::MultinomialLogistic => write!(f, "multinomial_logistic"),
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("margin_perceptron:") {
            let margin: f64 = rest.parse().map_err(|_| {
                Error::InvalidShape(format!("bad margin in loss spec {s:?}"))
            })?;
            let kind = LossKind::MarginPerceptron { margin };
            kind.validate()?;
            return Ok(kind);
        }
        match s {
            "adaline" => Ok(LossKind::Adaline),
            "perceptron" => Ok(LossKind::Perceptron),
            "margin_perceptron" => Ok(LossKind::MarginPerceptron { margin: 1.0 }),
            "hinge_svm" => Ok(LossKind::HingeSvm),
            "logistic" => Ok(LossKind::Logistic),
            "multinomial_logistic" => Ok(LossKind::MultinomialLogistic),
            other => Err(Error::InvalidShape(format!("unknown loss {other:?}"))),
        }
    }
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// Negative log-softmax of `scores` at class `label` (1-based).
pub fn multinomial_loss(label: usize, scores: &[f64]) -> Result<f64> {
    if label == 0 || label > scores.len() {
        return Err(Error::LabelDomain(format!(
            "class {label} outside 1..={}",
            scores.len()
        )));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = max
        + scores
            .iter()
            .map(|s| (s - max).exp())
            .sum::<f64>()
            .ln();
    Ok(log_sum - scores[label - 1])
}

/// Gradient of [`multinomial_loss`] with respect to the score vector:
/// `softmax_k - [k == label]`.
pub fn multinomial_derivative(label: usize, scores: &[f64]) -> Result<Vec<f64>> {
    if label == 0 || label > scores.len() {
        return Err(Error::LabelDomain(format!(
            "class {label} outside 1..={}",
            scores.len()
        )));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps
        .iter()
        .enumerate()
        .map(|(k, e)| e / total - if k + 1 == label { 1.0 } else { 0.0 })
        .collect())
}

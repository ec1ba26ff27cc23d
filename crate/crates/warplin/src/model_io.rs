//! Versioned plain-text model persistence.
//!
//! The format is line-oriented UTF-8: a `warplin-model v1` header, `key: value`
//! lines, then one section per discriminant with its matrix written row-major
//! as comma-separated decimals (shortest round-trip rendering), closed by
//! `end`. All parameters, shapes, the constraint spec, and training metadata
//! survive the round trip losslessly.

use std::path::Path;

use crate::classifiers::{Augmentation, Classifier, ClassifierKind, TrainingMeta};
use crate::error::{Error, Result};
use crate::learning::LossKind;

const HEADER: &str = "warplin-model v1";

/// Render a classifier in the `warplin-model v1` text format.
pub fn model_to_string(c: &Classifier) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("kind: {}\n", c.kind().name()));
    out.push_str(&format!("classes: {}\n", c.num_classes()));
    out.push_str(&format!("d: {}\n", c.declared_length()));
    out.push_str(&format!("elasticity: {}\n", c.elasticity()));
    out.push_str(&format!("augmentation: {}\n", c.augmentation().name()));
    match c.band() {
        None => out.push_str("band: none\n"),
        Some(w) => out.push_str(&format!("band: {w}\n")),
    }
    if let Some(meta) = c.meta() {
        out.push_str(&format!("loss: {}\n", meta.loss));
        out.push_str(&format!("lambda: {}\n", meta.lambda));
        out.push_str(&format!("seed: {}\n", meta.seed));
        if let Some(lr) = meta.learning_rate {
            out.push_str(&format!("learning_rate: {lr}\n"));
        }
    }
    out.push_str(&format!("discriminants: {}\n", c.num_discriminants()));
    for k in 0..c.num_discriminants() {
        let (rows, cols) = block_shape(c);
        out.push_str(&format!("discriminant: {}\n", k + 1));
        out.push_str(&format!("rows: {rows}\n"));
        out.push_str(&format!("cols: {cols}\n"));
        for r in 0..rows {
            let row: Vec<String> = c.block(k)[r * cols..(r + 1) * cols]
                .iter()
                .map(f64::to_string)
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

fn block_shape(c: &Classifier) -> (usize, usize) {
    match c.kind() {
        ClassifierKind::Sm => (1, c.declared_length()),
        ClassifierKind::Wp => (1, c.elasticity()),
        ClassifierKind::Ep => (c.declared_length(), c.elasticity()),
        ClassifierKind::Ml => (c.elasticity(), c.declared_length()),
    }
}

/// Parse a classifier from the `warplin-model v1` text format.
pub fn model_from_str(text: &str) -> Result<Classifier> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, detail: String| Error::FormatVersionMismatch(format!("line {line}: {detail}"));

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::FormatVersionMismatch("empty model file".into()))?;
    if header.trim() != HEADER {
        return Err(Error::FormatVersionMismatch(format!(
            "expected header {HEADER:?}, found {header:?}"
        )));
    }

    let mut kind: Option<ClassifierKind> = None;
    let mut classes: Option<usize> = None;
    let mut d: Option<usize> = None;
    let mut elasticity: Option<usize> = None;
    let mut augmentation: Option<Augmentation> = None;
    let mut band: Option<Option<usize>> = None;
    let mut loss: Option<LossKind> = None;
    let mut lambda: Option<f64> = None;
    let mut seed: Option<u64> = None;
    let mut learning_rate: Option<f64> = None;
    let mut discriminants: Option<usize> = None;

    // Header fields run until the first discriminant section.
    let mut pending: Option<(usize, String)> = None;
    for (no, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = split_kv(line).ok_or_else(|| {
            bad(no + 1, format!("expected `key: value`, found {line:?}"))
        })?;
        if key == "discriminant" {
            pending = Some((no, raw.to_string()));
            break;
        }
        match key {
            "kind" => kind = Some(value.parse().map_err(|e: Error| bad(no + 1, e.to_string()))?),
            "classes" => classes = Some(parse_num(no + 1, value)?),
            "d" => d = Some(parse_num(no + 1, value)?),
            "elasticity" => elasticity = Some(parse_num(no + 1, value)?),
            "augmentation" => {
                augmentation =
                    Some(value.parse().map_err(|e: Error| bad(no + 1, e.to_string()))?)
            }
            "band" => {
                band = Some(if value == "none" {
                    None
                } else {
                    Some(parse_num(no + 1, value)?)
                })
            }
            "loss" => loss = Some(value.parse().map_err(|e: Error| bad(no + 1, e.to_string()))?),
            "lambda" => lambda = Some(parse_float(no + 1, value)?),
            "seed" => seed = Some(parse_num(no + 1, value)?),
            "learning_rate" => learning_rate = Some(parse_float(no + 1, value)?),
            "discriminants" => discriminants = Some(parse_num(no + 1, value)?),
            other => return Err(bad(no + 1, format!("unknown field {other:?}"))),
        }
    }

    let kind = kind.ok_or_else(|| Error::FormatVersionMismatch("missing kind".into()))?;
    let classes =
        classes.ok_or_else(|| Error::FormatVersionMismatch("missing classes".into()))?;
    let d = d.ok_or_else(|| Error::FormatVersionMismatch("missing d".into()))?;
    let elasticity =
        elasticity.ok_or_else(|| Error::FormatVersionMismatch("missing elasticity".into()))?;
    let augmentation = augmentation
        .ok_or_else(|| Error::FormatVersionMismatch("missing augmentation".into()))?;
    let band = band.ok_or_else(|| Error::FormatVersionMismatch("missing band".into()))?;
    let count = discriminants
        .ok_or_else(|| Error::FormatVersionMismatch("missing discriminants".into()))?;

    let mut blocks: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut rest: Vec<(usize, String)> = pending.into_iter().collect();
    rest.extend(lines.map(|(no, l)| (no, l.to_string())));
    let mut cursor = rest.into_iter().filter(|(_, l)| !l.trim().is_empty());

    for idx in 1..=count {
        expect_kv(&mut cursor, "discriminant", &idx.to_string())?;
        let rows: usize = expect_num(&mut cursor, "rows")?;
        let cols: usize = expect_num(&mut cursor, "cols")?;
        if rows == 0 || cols == 0 {
            return Err(Error::FormatVersionMismatch(format!(
                "discriminant {idx} declares an empty {rows}x{cols} matrix"
            )));
        }
        let mut block = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (no, line) = cursor.next().ok_or_else(|| {
                Error::FormatVersionMismatch("unexpected end of matrix data".into())
            })?;
            for tok in line.trim().split(',') {
                let v: f64 = tok.trim().parse().map_err(|_| {
                    bad(no + 1, format!("bad matrix value {tok:?}"))
                })?;
                block.push(v);
            }
            if block.len() % cols != 0 {
                return Err(bad(no + 1, format!("row is not {cols} values wide")));
            }
        }
        if block.len() != rows * cols {
            return Err(Error::FormatVersionMismatch(format!(
                "discriminant {idx} carries {} values, expected {}",
                block.len(),
                rows * cols
            )));
        }
        blocks.push(block);
    }
    match cursor.next() {
        Some((_, line)) if line.trim() == "end" => {}
        other => {
            return Err(Error::FormatVersionMismatch(format!(
                "expected `end`, found {other:?}"
            )))
        }
    }

    let meta = match (loss, lambda, seed) {
        (Some(loss), Some(lambda), Some(seed)) => Some(TrainingMeta {
            loss,
            lambda,
            seed,
            learning_rate,
        }),
        (None, None, None) => None,
        _ => {
            return Err(Error::FormatVersionMismatch(
                "training metadata must be complete or absent".into(),
            ))
        }
    };
    Classifier::from_parts(kind, classes, d, elasticity, augmentation, band, blocks, meta)
        .map_err(|e| Error::FormatVersionMismatch(e.to_string()))
}

fn split_kv(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once(':')?;
    Some((k.trim(), v.trim()))
}

fn parse_num<T: std::str::FromStr>(line: usize, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::FormatVersionMismatch(format!("line {line}: bad number {value:?}"))
    })
}

fn parse_float(line: usize, value: &str) -> Result<f64> {
    value.parse().map_err(|_| {
        Error::FormatVersionMismatch(format!("line {line}: bad number {value:?}"))
    })
}

fn expect_kv(
    cursor: &mut impl Iterator<Item = (usize, String)>,
    key: &str,
    value: &str,
) -> Result<()> {
    match cursor.next() {
        Some((no, line)) => {
            let (k, v) = split_kv(line.trim()).ok_or_else(|| {
                Error::FormatVersionMismatch(format!("line {}: expected `{key}: ...`", no + 1))
            })?;
            if k != key || v != value {
                return Err(Error::FormatVersionMismatch(format!(
                    "line {}: expected `{key}: {value}`, found {line:?}",
                    no + 1
                )));
            }
            Ok(())
        }
        None => Err(Error::FormatVersionMismatch(format!(
            "missing `{key}: {value}`"
        ))),
    }
}

fn expect_num(cursor: &mut impl Iterator<Item = (usize, String)>, key: &str) -> Result<usize> {
    match cursor.next() {
        Some((no, line)) => {
            let (k, v) = split_kv(line.trim()).ok_or_else(|| {
                Error::FormatVersionMismatch(format!("line {}: expected `{key}: ...`", no + 1))
            })?;
            if k != key {
                return Err(Error::FormatVersionMismatch(format!(
                    "line {}: expected `{key}`, found {k:?}",
                    no + 1
                )));
            }
            parse_num(no + 1, v)
        }
        None => Err(Error::FormatVersionMismatch(format!("missing `{key}`"))),
    }
}

/// Write a classifier to `path` in the v1 text format.
pub fn save_model(c: &Classifier, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_string(c))?;
    Ok(())
}

/// Read a classifier from a v1 text model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<Classifier> {
    let text = std::fs::read_to_string(path)?;
    model_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierSpec;
    use crate::data::{synth_generate, SynthKind};
    use crate::learning::{train, TrainConfig};
    use crate::products::TimeSeries;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trained_classifier() -> Classifier {
        let mut cfg = TrainConfig::new(3, LossKind::MultinomialLogistic);
        cfg.lr_override = Some(0.1);
        cfg.max_epochs = 3;
        cfg.band = Some(2);
        cfg.rng_seed = 99;
        let ds = synth_generate(SynthKind::Disk, 6, 2).unwrap();
        train(&cfg, &ds, ClassifierSpec::per_class(ClassifierKind::Ep))
            .unwrap()
            .classifier
    }

    #[test]
    fn round_trip_preserves_decisions() {
        let c = trained_classifier();
        let text = model_to_string(&c);
        assert!(text.starts_with("warplin-model v1\n"));
        let back = model_from_str(&text).unwrap();
        assert_eq!(back, c);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let x = TimeSeries::new(vec![
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ])
            .unwrap();
            assert_eq!(
                c.decision_values(&x).unwrap(),
                back.decision_values(&x).unwrap()
            );
        }
    }

    #[test]
    fn round_trip_through_files() {
        let c = trained_classifier();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        save_model(&c, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.band(), Some(2));
        assert_eq!(back.meta().unwrap().seed, 99);
    }

    #[test]
    fn corrupted_header_is_rejected() {
        let c = trained_classifier();
        let text = model_to_string(&c).replace("warplin-model v1", "warplin-model v9");
        assert!(matches!(
            model_from_str(&text),
            Err(Error::FormatVersionMismatch(_))
        ));
        assert!(matches!(
            model_from_str("not a model"),
            Err(Error::FormatVersionMismatch(_))
        ));
    }

    #[test]
    fn truncated_body_is_rejected() {
        let c = trained_classifier();
        let text = model_to_string(&c);
        let cut = &text[..text.len() / 2];
        assert!(matches!(
            model_from_str(cut),
            Err(Error::FormatVersionMismatch(_))
        ));
    }

    #[test]
    fn extreme_values_round_trip_exactly() {
        let values = vec![
            1.0 / 3.0,
            -0.0,
            1e-300,
            -123_456_789.123_456_79,
            f64::MIN_POSITIVE,
        ];
        let c = Classifier::with_parameters(
            ClassifierSpec::per_class(ClassifierKind::Sm),
            1,
            5,
            1,
            None,
            vec![values.clone()],
        )
        .unwrap();
        let back = model_from_str(&model_to_string(&c)).unwrap();
        for (a, b) in back.block(0).iter().zip(&values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn degenerate_shape_lines_are_rejected() {
        let c = Classifier::with_parameters(
            ClassifierSpec::per_class(ClassifierKind::Sm),
            1,
            2,
            1,
            None,
            vec![vec![1.0, 2.0]],
        )
        .unwrap();
        let text = model_to_string(&c);
        for broken in [
            text.replace("cols: 2", "cols: 0"),
            text.replace("rows: 1", "rows: 0"),
        ] {
            assert!(matches!(
                model_from_str(&broken),
                Err(Error::FormatVersionMismatch(_))
            ));
        }
    }

    #[test]
    fn missing_metadata_is_allowed_but_partial_is_not() {
        let c = Classifier::with_parameters(
            ClassifierSpec::per_class(ClassifierKind::Sm),
            1,
            2,
            1,
            None,
            vec![vec![1.0, 2.0]],
        )
        .unwrap();
        let text = model_to_string(&c);
        assert!(!text.contains("loss:"));
        assert!(model_from_str(&text).unwrap().meta().is_none());
        let broken = text.replace("discriminants: 1", "lambda: 0.5\ndiscriminants: 1");
        assert!(matches!(
            model_from_str(&broken),
            Err(Error::FormatVersionMismatch(_))
        ));
    }
}

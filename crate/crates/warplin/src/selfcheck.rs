//! Built-in property and oracle checks, exposed through the CLI `verify`
//! subcommand. Each check exercises one contract of the library against an
//! independent route (exhaustive enumeration, a recurrence, finite
//! differences, or hand-derived fixtures) and reports pass/fail.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifiers::{Classifier, ClassifierKind, ClassifierSpec};
use crate::error::Result;
use crate::eval::{mean_percentage_difference, winning_percentage};
use crate::learning::{per_example_objective, subgradient_step, LossKind, TrainConfig};
use crate::maxlinear::{ep_to_maxlinear, maxlinear_to_ep, maxlinear_to_wp_padded};
use crate::products::{
    elastic_product, path_score_elastic, path_score_warped, warped_product, TimeSeries,
    WeightMatrix, WeightSequence,
};
use crate::separability::{max_lin_separable, PointSet};
use crate::warping::{enumerate_paths, path_count, EmbeddingPair, WarpingMatrix};

/// Outcome of one self-check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed: false,
            detail: detail.into(),
        }
    }
}

/// Run the full suite with the given seed. Returns one result per check.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_path_counts()?,
        check_score_identities(seed)?,
        check_dp_against_enumeration(seed)?,
        check_constructions(seed)?,
        check_subgradients(seed)?,
        check_metric_identities(seed)?,
        check_separability_asymmetry()?,
    ])
}

fn delannoy(m: usize, n: usize) -> u128 {
    if m == 1 || n == 1 {
        1
    } else {
        delannoy(m - 1, n) + delannoy(m, n - 1) + delannoy(m - 1, n - 1)
    }
}

fn check_path_counts() -> Result<CheckResult> {
    const NAME: &str = "path counts match the three-step recurrence (m, n <= 7)";
    for m in 1..=7 {
        for n in 1..=7 {
            let counted = path_count(m, n, None)?;
            let expected = delannoy(m, n);
            if counted != expected {
                return Ok(CheckResult::fail(
                    NAME,
                    format!("{m}x{n}: counted {counted}, recurrence {expected}"),
                ));
            }
            if m * n <= 36 {
                let enumerated = enumerate_paths(m, n, None)?.len() as u128;
                if enumerated != expected {
                    return Ok(CheckResult::fail(
                        NAME,
                        format!("{m}x{n}: enumerated {enumerated}, recurrence {expected}"),
                    ));
                }
            }
        }
    }
    Ok(CheckResult::pass(NAME, "49 lattice shapes"))
}

fn check_score_identities(seed: u64) -> Result<CheckResult> {
    const NAME: &str = "path scores factor through warping and embedding matrices";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5);
    let mut checked = 0usize;
    for m in 1..=5 {
        for n in 1..=5 {
            let w: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let wmat = Array2::from_shape_fn((m, n), |_| rng.random_range(-2.0..2.0));
            let xm: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let ws = WeightSequence::new(w.clone())?;
            let ts = TimeSeries::new(x.clone())?;
            let weight = WeightMatrix::new(wmat)?;
            let series_m = TimeSeries::new(xm.clone())?;
            for p in enumerate_paths(m, n, None)? {
                checked += 1;
                let mp = WarpingMatrix::of(&p);
                let emb = EmbeddingPair::of(&p);
                if emb.product() != *mp.entries() {
                    return Ok(CheckResult::fail(NAME, format!("embedding product mismatch in {m}x{n}")));
                }
                let direct = path_score_warped(&ws, &ts, &p)?;
                let via: f64 = (0..m)
                    .map(|i| {
                        w[i] * (0..n).map(|j| mp.entries()[(i, j)] * x[j]).sum::<f64>()
                    })
                    .sum();
                if (direct - via).abs() > 1e-12 {
                    return Ok(CheckResult::fail(NAME, format!("warped score mismatch in {m}x{n}")));
                }
                let es = path_score_elastic(&weight, &series_m, &p)?;
                let xp = crate::products::p_matrix(&series_m, &p, m, n)?;
                let frob = xp.frobenius(&weight)?;
                let proj = crate::products::p_projection(&weight, &p)?;
                let via_proj: f64 = proj.iter().zip(&xm).map(|(a, b)| a * b).sum();
                if (es - frob).abs() > 1e-12 || (es - via_proj).abs() > 1e-12 {
                    return Ok(CheckResult::fail(NAME, format!("elastic score mismatch in {m}x{n}")));
                }
            }
        }
    }
    Ok(CheckResult::pass(NAME, format!("{checked} paths")))
}

fn check_dp_against_enumeration(seed: u64) -> Result<CheckResult> {
    const NAME: &str = "dynamic programs match brute-force maxima";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB6);
    for _ in 0..100 {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=6);
        let w = WeightSequence::new((0..m).map(|_| rng.random_range(-2.0..2.0)).collect())?;
        let x = TimeSeries::new((0..n).map(|_| rng.random_range(-2.0..2.0)).collect())?;
        let brute = enumerate_paths(m, n, None)?
            .iter()
            .map(|p| path_score_warped(&w, &x, p).expect("valid path"))
            .fold(f64::NEG_INFINITY, f64::max);
        let (dp, _) = warped_product(&w, &x, None)?;
        if (dp - brute).abs() > 1e-12 {
            return Ok(CheckResult::fail(NAME, format!("warped {m}x{n}: {dp} vs {brute}")));
        }
        let wm = WeightMatrix::new(Array2::from_shape_fn((m, n), |_| {
            rng.random_range(-2.0..2.0)
        }))?;
        let xe = TimeSeries::new((0..m).map(|_| rng.random_range(-2.0..2.0)).collect())?;
        let brute_e = enumerate_paths(m, n, None)?
            .iter()
            .map(|p| path_score_elastic(&wm, &xe, p).expect("valid path"))
            .fold(f64::NEG_INFINITY, f64::max);
        let (dp_e, _) = elastic_product(&wm, &xe, None)?;
        if (dp_e - brute_e).abs() > 1e-12 {
            return Ok(CheckResult::fail(NAME, format!("elastic {m}x{n}: {dp_e} vs {brute_e}")));
        }
    }
    Ok(CheckResult::pass(NAME, "100 random instances"))
}

fn check_constructions(seed: u64) -> Result<CheckResult> {
    const NAME: &str = "component stacks compile into warped-linear functions";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC7);
    for trial in 0..25 {
        let c = rng.random_range(1..=5);
        let d = rng.random_range(2..=6);
        let a = Array2::from_shape_fn((c, d), |_| rng.random_range(-2.0..2.0));
        let (w_ep, q_ep) = maxlinear_to_ep(&a)?;
        let (w_wp, q_wp) = maxlinear_to_wp_padded(&a)?;
        for _ in 0..40 {
            let mut x = vec![1.0];
            x.extend((1..d).map(|_| rng.random_range(-3.0..3.0)));
            let truth = (0..c)
                .map(|i| a.row(i).iter().zip(&x).map(|(w, v)| w * v).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            let ts = TimeSeries::new(x.clone())?;
            let (ep, _) = elastic_product(&w_ep, &ts, Some(&q_ep))?;
            if (ep - truth).abs() > 1e-9 {
                return Ok(CheckResult::fail(NAME, format!("trial {trial}: elastic {ep} vs {truth}")));
            }
            let mut padded = vec![0.0];
            padded.extend(&x);
            padded.push(0.0);
            let (wp, _) = warped_product(&w_wp, &TimeSeries::new(padded)?, Some(&q_wp))?;
            if (wp - truth).abs() > 1e-9 {
                return Ok(CheckResult::fail(NAME, format!("trial {trial}: warped {wp} vs {truth}")));
            }
        }
        let model = ep_to_maxlinear(&w_ep, Some(&q_ep), d)?;
        let mut x = vec![1.0];
        x.extend((1..d).map(|_| rng.random_range(-3.0..3.0)));
        let (back, _) = model.evaluate(&x)?;
        let (direct, _) = elastic_product(&w_ep, &TimeSeries::new(x)?, Some(&q_ep))?;
        if (back - direct).abs() > 1e-9 {
            return Ok(CheckResult::fail(NAME, "expansion disagrees with its own product"));
        }
    }
    Ok(CheckResult::pass(NAME, "25 random stacks, both directions"))
}

fn check_subgradients(seed: u64) -> Result<CheckResult> {
    const NAME: &str = "subgradients match finite differences at smooth points";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD8);
    let mut cfg = TrainConfig::new(2, LossKind::Logistic);
    cfg.lambda = 0.01;
    let mut checked = 0usize;
    while checked < 20 {
        let blocks: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let c = Classifier::with_parameters(
            ClassifierSpec::per_class(ClassifierKind::Ml),
            2,
            2,
            2,
            None,
            blocks.clone(),
        )?;
        let x = TimeSeries::new(vec![rng.random_range(-2.0..2.0)])?;
        let aug = crate::classifiers::augment(&x, crate::classifiers::Augmentation::LeadOne);
        let margins_ok = blocks.iter().all(|b| {
            let mut vals: Vec<f64> = b
                .chunks(2)
                .map(|w| w.iter().zip(aug.values()).map(|(a, v)| a * v).sum())
                .collect();
            vals.sort_by(|p, q| q.partial_cmp(p).expect("finite"));
            vals[0] - vals[1] > 1e-3
        });
        if !margins_ok {
            continue;
        }
        checked += 1;
        let y = rng.random_range(1..=2);
        let gs = subgradient_step(&c, &x, y, &cfg)?;
        let h = 1e-6;
        for k in 0..2 {
            for idx in 0..4 {
                let mut up = blocks.clone();
                up[k][idx] += h;
                let mut dn = blocks.clone();
                dn[k][idx] -= h;
                let cu = Classifier::with_parameters(
                    ClassifierSpec::per_class(ClassifierKind::Ml),
                    2,
                    2,
                    2,
                    None,
                    up,
                )?;
                let cd = Classifier::with_parameters(
                    ClassifierSpec::per_class(ClassifierKind::Ml),
                    2,
                    2,
                    2,
                    None,
                    dn,
                )?;
                let fd = (per_example_objective(&cu, &x, y, &cfg)?
                    - per_example_objective(&cd, &x, y, &cfg)?)
                    / (2.0 * h);
                let g = gs[k][idx];
                if (fd - g).abs() / 1.0f64.max(g.abs()) > 1e-5 {
                    return Ok(CheckResult::fail(NAME, format!("fd {fd} vs g {g}")));
                }
            }
        }
    }
    Ok(CheckResult::pass(NAME, "20 smooth points, all coordinates"))
}

fn check_metric_identities(seed: u64) -> Result<CheckResult> {
    const NAME: &str = "comparison metrics satisfy their identities";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xE9);
    for _ in 0..20 {
        let k = rng.random_range(2..=5);
        let d = rng.random_range(1..=8);
        let accs = Array2::from_shape_fn((k, d), |_| rng.random_range(1.0..100.0));
        let w = winning_percentage(&accs)?;
        let a = mean_percentage_difference(&accs)?;
        for i in 0..k {
            for j in 0..k {
                let eq = 100.0 - w[(i, j)] - w[(j, i)];
                if i != j && !(-1e-9..=100.0 + 1e-9).contains(&eq) {
                    return Ok(CheckResult::fail(NAME, "tie percentage out of range"));
                }
                if (a[(i, j)] + a[(j, i)]).abs() > 1e-9 {
                    return Ok(CheckResult::fail(NAME, "mean difference not antisymmetric"));
                }
            }
        }
    }
    let hand = mean_percentage_difference(&ndarray::arr2(&[[90.0], [85.0]]))?;
    if (hand[(0, 1)] - 1000.0 / 175.0).abs() > 1e-9 {
        return Ok(CheckResult::fail(NAME, format!("hand example gave {}", hand[(0, 1)])));
    }
    Ok(CheckResult::pass(NAME, "20 random tables plus the hand example"))
}

fn check_separability_asymmetry() -> Result<CheckResult> {
    const NAME: &str = "square-versus-frame separability is asymmetric";
    let square = PointSet::new(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
    ])?;
    let outside = PointSet::new(vec![
        vec![-1.0, -1.0],
        vec![2.0, -1.0],
        vec![2.0, 2.0],
        vec![-1.0, 2.0],
    ])?;
    let forward = max_lin_separable(&square, &outside)?;
    let backward = max_lin_separable(&outside, &square)?;
    if forward && !backward {
        Ok(CheckResult::pass(NAME, "forward separable, reverse not"))
    } else {
        Ok(CheckResult::fail(
            NAME,
            format!("forward {forward}, backward {backward}"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let results = run_all(7).unwrap();
        assert_eq!(results.len(), 7);
        for r in &results {
            assert!(r.passed, "{} failed: {}", r.name, r.detail);
        }
    }
}

//! Warped products and elastic products with max-plus dynamic programming,
//! their per-path scores, the p-matrix and p-projection representations, and
//! a squared-cost DTW distance used by the nearest-neighbor baseline.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::warping::{PathConstraint, WarpingPath};

/// A univariate time series: a non-empty sequence of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidShape("time series must be non-empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape(
                "time series values must be finite".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Weight sequence of a warped-product function. In augmented form the first
/// element is the elastic bias. Its length is the elasticity.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    values: Vec<f64>,
}

impl WeightSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidShape(
                "weight sequence must be non-empty".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape(
                "weight sequence values must be finite".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Elasticity `e`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Weight matrix of an elastic-product function, `d x e`. In augmented form
/// the first row is the elastic bias row.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    entries: Array2<f64>,
}

impl WeightMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        let (d, e) = entries.dim();
        if d == 0 || e == 0 {
            return Err(Error::InvalidShape(format!(
                "weight matrix must be at least 1x1, got {d}x{e}"
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape(
                "weight matrix entries must be finite".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let e = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != e) {
            return Err(Error::InvalidShape("ragged weight matrix rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let entries = Array2::from_shape_vec((d, e), flat)
            .map_err(|e| Error::InvalidShape(e.to_string()))?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// Row count `d` (maximum series length the matrix accepts).
    pub fn rows(&self) -> usize {
        self.entries.dim().0
    }

    /// Column count `e` (elasticity).
    pub fn cols(&self) -> usize {
        self.entries.dim().1
    }

    /// The sub-matrix of the first `l` rows, used for series shorter than
    /// the matrix.
    pub fn leading_rows(&self, l: usize) -> Result<WeightMatrix> {
        if l == 0 || l > self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot take {l} leading rows of a {}x{} matrix",
                self.rows(),
                self.cols()
            )));
        }
        Ok(WeightMatrix {
            entries: self.entries.slice(ndarray::s![..l, ..]).to_owned(),
        })
    }
}

/// A series scattered into a `d x e` zero matrix along a warping path:
/// `x_i` on path cells, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PMatrix {
    entries: Array2<f64>,
}

impl PMatrix {
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.dim().0
    }

    pub fn cols(&self) -> usize {
        self.entries.dim().1
    }

    /// Frobenius inner product with a weight matrix of the same shape.
    pub fn frobenius(&self, w: &WeightMatrix) -> Result<f64> {
        if w.entries().dim() != self.entries.dim() {
            return Err(Error::DimensionMismatch(format!(
                "p-matrix is {}x{}, weight matrix is {}x{}",
                self.rows(),
                self.cols(),
                w.rows(),
                w.cols()
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(w.entries().iter())
            .map(|(a, b)| a * b)
            .sum())
    }
}

/// Score of aligning weight sequence and series along a fixed path:
/// the sum of `w_i * x_j` over path points `(i, j)` in the
/// `len(w) x len(x)` lattice.
pub fn path_score_warped(w: &WeightSequence, x: &TimeSeries, p: &WarpingPath) -> Result<f64> {
    if p.rows() != w.len() || p.cols() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "path lattice is {}x{}, weights x series is {}x{}",
            p.rows(),
            p.cols(),
            w.len(),
            x.len()
        )));
    }
    Ok(p.points()
        .iter()
        .map(|&(i, j)| w.values()[i - 1] * x.values()[j - 1])
        .sum())
}

/// Score of warping a series into a weight matrix along a fixed path: the
/// sum of `w_ij * x_i` over path points in the `len(x) x e` lattice, using
/// the leading `len(x)` rows of the matrix.
pub fn path_score_elastic(w: &WeightMatrix, x: &TimeSeries, p: &WarpingPath) -> Result<f64> {
    if x.len() > w.rows() {
        return Err(Error::DimensionMismatch(format!(
            "series length {} exceeds weight matrix length {}",
            x.len(),
            w.rows()
        )));
    }
    if p.rows() != x.len() || p.cols() != w.cols() {
        return Err(Error::DimensionMismatch(format!(
            "path lattice is {}x{}, series x elasticity is {}x{}",
            p.rows(),
            p.cols(),
            x.len(),
            w.cols()
        )));
    }
    Ok(p.points()
        .iter()
        .map(|&(i, j)| w.entries()[(i - 1, j - 1)] * x.values()[i - 1])
        .sum())
}

// Backtracking preference at ties: diagonal, then (i-1, j), then (i, j-1).
#[derive(Clone, Copy, PartialEq)]
enum Step {
    Start,
    Diag,
    Up,
    Left,
}

/// Max-plus dynamic program over the lattice with per-cell gains. Returns the
/// maximum path sum and one optimal path (deterministic tie-breaking).
pub(crate) fn max_plus_dp(
    m: usize,
    n: usize,
    gain: impl Fn(usize, usize) -> f64,
    q: Option<&PathConstraint>,
) -> Result<(f64, WarpingPath)> {
    if let Some(q) = q {
        if q.rows() != m || q.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint is {}x{}, lattice is {m}x{n}",
                q.rows(),
                q.cols()
            )));
        }
    }
    let allowed = |i: usize, j: usize| q.is_none_or(|q| q.mask()[(i, j)]);
    let mut score = Array2::from_elem((m, n), f64::NEG_INFINITY);
    let mut step = Array2::from_elem((m, n), Step::Start);
    for i in 0..m {
        for j in 0..n {
            if !allowed(i, j) {
                continue;
            }
            if i == 0 && j == 0 {
                score[(0, 0)] = gain(0, 0);
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut dir = Step::Start;
            if i > 0 && j > 0 && score[(i - 1, j - 1)] > best {
                best = score[(i - 1, j - 1)];
                dir = Step::Diag;
            }
            if i > 0 && score[(i - 1, j)] > best {
                best = score[(i - 1, j)];
                dir = Step::Up;
            }
            if j > 0 && score[(i, j - 1)] > best {
                best = score[(i, j - 1)];
                dir = Step::Left;
            }
            if best > f64::NEG_INFINITY {
                score[(i, j)] = gain(i, j) + best;
                step[(i, j)] = dir;
            }
        }
    }
    let total = score[(m - 1, n - 1)];
    if !total.is_finite() {
        return Err(Error::InfeasibleConstraint);
    }
    let mut points = Vec::with_capacity(m + n);
    let (mut i, mut j) = (m - 1, n - 1);
    loop {
        points.push((i + 1, j + 1));
        match step[(i, j)] {
            Step::Start => break,
            Step::Diag => {
                i -= 1;
                j -= 1;
            }
            Step::Up => i -= 1,
            Step::Left => j -= 1,
        }
    }
    points.reverse();
    Ok((total, WarpingPath::new_unchecked(points, m, n)))
}

/// Warped product: the maximum of [`path_score_warped`] over admissible
/// paths in the `len(w) x len(x)` lattice, with an optimal path.
pub fn warped_product(
    w: &WeightSequence,
    x: &TimeSeries,
    q: Option<&PathConstraint>,
) -> Result<(f64, WarpingPath)> {
    let (m, n) = (w.len(), x.len());
    max_plus_dp(m, n, |i, j| w.values()[i] * x.values()[j], q)
}

/// Elastic product: the maximum of [`path_score_elastic`] over admissible
/// paths in the `len(x) x e` lattice, with an optimal path. Series shorter
/// than the matrix use the leading sub-matrix.
pub fn elastic_product(
    w: &WeightMatrix,
    x: &TimeSeries,
    q: Option<&PathConstraint>,
) -> Result<(f64, WarpingPath)> {
    if x.len() > w.rows() {
        return Err(Error::DimensionMismatch(format!(
            "series length {} exceeds weight matrix length {}",
            x.len(),
            w.rows()
        )));
    }
    let (m, n) = (x.len(), w.cols());
    max_plus_dp(m, n, |i, j| w.entries()[(i, j)] * x.values()[i], q)
}

/// Scatter `x` into a `d x e` zero matrix along `p`. The path lives in the
/// `len(x) x e` lattice; rows past `len(x)` stay zero.
pub fn p_matrix(x: &TimeSeries, p: &WarpingPath, d: usize, e: usize) -> Result<PMatrix> {
    if x.len() > d {
        return Err(Error::DimensionMismatch(format!(
            "series length {} exceeds target length {d}",
            x.len()
        )));
    }
    if p.rows() != x.len() || p.cols() != e {
        return Err(Error::DimensionMismatch(format!(
            "path lattice is {}x{}, expected {}x{e}",
            p.rows(),
            p.cols(),
            x.len()
        )));
    }
    let mut entries = Array2::zeros((d, e));
    for &(i, j) in p.points() {
        entries[(i - 1, j - 1)] = x.values()[i - 1];
    }
    Ok(PMatrix { entries })
}

/// Row-wise sums of the weight matrix over path cells; satisfies
/// `p_projection(W, p) . x = path_score_elastic(W, x, p)` for series of
/// length `d`.
pub fn p_projection(w: &WeightMatrix, p: &WarpingPath) -> Result<Vec<f64>> {
    if p.rows() != w.rows() || p.cols() != w.cols() {
        return Err(Error::DimensionMismatch(format!(
            "path lattice is {}x{}, weight matrix is {}x{}",
            p.rows(),
            p.cols(),
            w.rows(),
            w.cols()
        )));
    }
    let mut out = vec![0.0; w.rows()];
    for &(i, j) in p.points() {
        out[i - 1] += w.entries()[(i - 1, j - 1)];
    }
    Ok(out)
}

/// DTW distance with squared local cost, returned as the summed squared
/// cost over the best path (no square root).
pub fn dtw_distance(x: &TimeSeries, y: &TimeSeries) -> f64 {
    let (m, n) = (x.len(), y.len());
    let mut cost = Array2::from_elem((m, n), f64::INFINITY);
    for i in 0..m {
        for j in 0..n {
            let local = (x.values()[i] - y.values()[j]).powi(2);
            if i == 0 && j == 0 {
                cost[(0, 0)] = local;
                continue;
            }
            let mut best = f64::INFINITY;
            if i > 0 {
                best = best.min(cost[(i - 1, j)]);
            }
            if j > 0 {
                best = best.min(cost[(i, j - 1)]);
            }
            if i > 0 && j > 0 {
                best = best.min(cost[(i - 1, j - 1)]);
            }
            cost[(i, j)] = local + best;
        }
    }
    cost[(m - 1, n - 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warping::enumerate_paths;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn ws(v: &[f64]) -> WeightSequence {
        WeightSequence::new(v.to_vec()).unwrap()
    }

    fn wm(rows: &[&[f64]]) -> WeightMatrix {
        WeightMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite_series() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn warped_path_scores_by_hand() {
        let w = ws(&[1.0, 2.0]);
        let x = ts(&[3.0, 4.0]);
        let diag = WarpingPath::new(vec![(1, 1), (2, 2)], 2, 2).unwrap();
        assert_eq!(path_score_warped(&w, &x, &diag).unwrap(), 11.0); // 1*3 + 2*4
        let down = WarpingPath::new(vec![(1, 1), (2, 1), (2, 2)], 2, 2).unwrap();
        assert_eq!(path_score_warped(&w, &x, &down).unwrap(), 17.0); // 3 + 6 + 8
    }

    #[test]
    fn warped_score_of_zeros_is_zero() {
        let w = ws(&[0.0, 0.0]);
        let x = ts(&[0.0, 0.0, 0.0]);
        for p in enumerate_paths(2, 3, None).unwrap() {
            assert_eq!(path_score_warped(&w, &x, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn warped_product_picks_best_of_three_paths() {
        let w = ws(&[1.0, 2.0]);
        let x = ts(&[3.0, 4.0]);
        // Enumerated scores: 15 (right-down), 17 (down-right), 11 (diagonal).
        let (value, path) = warped_product(&w, &x, None).unwrap();
        assert_eq!(value, 17.0);
        assert_eq!(path.points(), &[(1, 1), (2, 1), (2, 2)]);
    }

    #[test]
    fn warped_product_of_all_ones_is_longest_path() {
        let w = ws(&[1.0; 4]);
        let x = ts(&[1.0; 6]);
        let (value, path) = warped_product(&w, &x, None).unwrap();
        assert_eq!(value, (4 + 6 - 1) as f64);
        assert_eq!(path.len(), 9);
    }

    #[test]
    fn warped_product_single_row_is_forced() {
        let w = ws(&[2.0]);
        let x = ts(&[1.0, 2.0, 3.0]);
        let (value, path) = warped_product(&w, &x, None).unwrap();
        assert_eq!(value, 12.0);
        assert_eq!(path.points(), &[(1, 1), (1, 2), (1, 3)]);
    }

    #[test]
    fn elastic_path_scores_by_hand() {
        let w = wm(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let x = ts(&[1.0, 1.0]);
        let p = WarpingPath::new(vec![(1, 1), (1, 2), (2, 2)], 2, 2).unwrap();
        assert_eq!(path_score_elastic(&w, &x, &p).unwrap(), 7.0); // 1 + 2 + 4
        let zeros = ts(&[0.0, 0.0]);
        assert_eq!(path_score_elastic(&w, &zeros, &p).unwrap(), 0.0);
    }

    #[test]
    fn elastic_score_uses_leading_sub_matrix() {
        let w = wm(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let x = ts(&[5.0]);
        let p = WarpingPath::new(vec![(1, 1), (1, 2)], 1, 2).unwrap();
        assert_eq!(path_score_elastic(&w, &x, &p).unwrap(), 15.0); // 5 + 10
    }

    #[test]
    fn elastic_rejects_too_long_series() {
        let w = wm(&[&[1.0, 2.0]]);
        let x = ts(&[1.0, 2.0]);
        assert!(matches!(
            elastic_product(&w, &x, None),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn elastic_product_matches_enumeration_by_hand() {
        let w = wm(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let x = ts(&[1.0, 1.0]);
        // Path scores: right-down 7, down-right 8, diagonal 5.
        let (value, path) = elastic_product(&w, &x, None).unwrap();
        assert_eq!(value, 8.0);
        assert_eq!(path.points(), &[(1, 1), (2, 1), (2, 2)]);
    }

    #[test]
    fn elastic_product_elasticity_one_is_inner_product() {
        let w = wm(&[&[2.0], &[-1.0], &[0.5]]);
        let x = ts(&[1.0, 2.0, 4.0]);
        let (value, path) = elastic_product(&w, &x, None).unwrap();
        assert_eq!(value, 2.0 - 2.0 + 2.0);
        assert_eq!(path.len(), 3);
    }

    #[test]
    fn elastic_product_single_row_sums_columns() {
        let w = wm(&[&[1.0, 2.0, 3.0]]);
        let x = ts(&[2.0]);
        let (value, _) = elastic_product(&w, &x, None).unwrap();
        assert_eq!(value, 12.0);
    }

    #[test]
    fn dp_matches_enumeration_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = rng.random_range(1..=6);
            let n = rng.random_range(1..=6);
            let w = ws(&(0..m)
                .map(|_| rng.random_range(-2.0..2.0))
                .collect::<Vec<_>>());
            let x = ts(&(0..n)
                .map(|_| rng.random_range(-2.0..2.0))
                .collect::<Vec<_>>());
            let brute = enumerate_paths(m, n, None)
                .unwrap()
                .iter()
                .map(|p| path_score_warped(&w, &x, p).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            let (value, path) = warped_product(&w, &x, None).unwrap();
            assert!((value - brute).abs() <= 1e-12);
            assert!((path_score_warped(&w, &x, &path).unwrap() - value).abs() <= 1e-12);
        }
    }

    #[test]
    fn constraint_tightening_never_improves() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = rng.random_range(2..=6);
            let n = rng.random_range(2..=6);
            let w = ws(&(0..m)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect::<Vec<_>>());
            let x = ts(&(0..n)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect::<Vec<_>>());
            let (unconstrained, _) = warped_product(&w, &x, None).unwrap();
            let wm = {
                let vals: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
                WeightMatrix::new(Array2::from_shape_vec((m, n), vals).unwrap()).unwrap()
            };
            let xe = ts(&(0..m)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect::<Vec<_>>());
            let (elastic_unconstrained, _) = elastic_product(&wm, &xe, None).unwrap();
            for width in (0..4).rev() {
                if let Ok(q) = PathConstraint::band(m, n, width) {
                    let (constrained, path) = warped_product(&w, &x, Some(&q)).unwrap();
                    assert!(constrained <= unconstrained + 1e-12);
                    assert!(path.admissible_under(&q));
                    let (elastic_constrained, _) =
                        elastic_product(&wm, &xe, Some(&q)).unwrap();
                    assert!(elastic_constrained <= elastic_unconstrained + 1e-12);
                }
            }
        }
    }

    #[test]
    fn p_matrix_by_hand() {
        let x = ts(&[5.0, 7.0]);
        let diag = WarpingPath::new(vec![(1, 1), (2, 2)], 2, 2).unwrap();
        let m = p_matrix(&x, &diag, 2, 2).unwrap();
        assert_eq!(
            m.entries().clone().into_raw_vec_and_offset().0,
            vec![5.0, 0.0, 0.0, 7.0]
        );
        let upper = WarpingPath::new(vec![(1, 1), (1, 2), (2, 2)], 2, 2).unwrap();
        let m = p_matrix(&x, &upper, 2, 2).unwrap();
        assert_eq!(
            m.entries().clone().into_raw_vec_and_offset().0,
            vec![5.0, 5.0, 0.0, 7.0]
        );
    }

    #[test]
    fn p_matrix_pads_unused_rows() {
        let x = ts(&[3.0]);
        let p = WarpingPath::new(vec![(1, 1), (1, 2)], 1, 2).unwrap();
        let m = p_matrix(&x, &p, 3, 2).unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(
            m.entries().clone().into_raw_vec_and_offset().0,
            vec![3.0, 3.0, 0.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn p_matrix_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for p in enumerate_paths(3, 4, None).unwrap() {
            let a: f64 = rng.random_range(-2.0..2.0);
            let b: f64 = rng.random_range(-2.0..2.0);
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let combined: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
            let lhs = p_matrix(&ts(&combined), &p, 3, 4).unwrap();
            let rx = p_matrix(&ts(&x), &p, 3, 4).unwrap();
            let ry = p_matrix(&ts(&y), &p, 3, 4).unwrap();
            for ((l, u), v) in lhs
                .entries()
                .iter()
                .zip(rx.entries().iter())
                .zip(ry.entries().iter())
            {
                assert!((l - (a * u + b * v)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn p_projection_by_hand() {
        let w = wm(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let upper = WarpingPath::new(vec![(1, 1), (1, 2), (2, 2)], 2, 2).unwrap();
        assert_eq!(p_projection(&w, &upper).unwrap(), vec![3.0, 4.0]);
        let diag = WarpingPath::new(vec![(1, 1), (2, 2)], 2, 2).unwrap();
        assert_eq!(p_projection(&w, &diag).unwrap(), vec![1.0, 4.0]);
    }

    // Score identities: w *_p x = w^T (M_p x) = (M_p^T w)^T x and
    // W (x)_p x = <W, X_p> = w_p^T x, checked exactly over all paths.
    #[test]
    fn score_identities_hold_on_all_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for m in 1..=5 {
            for n in 1..=5 {
                let wvals: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
                let xvals: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
                let w = ws(&wvals);
                let x = ts(&xvals);
                let wmat = {
                    let vals: Vec<f64> =
                        (0..m * n).map(|_| rng.random_range(-2.0..2.0)).collect();
                    WeightMatrix::new(Array2::from_shape_vec((m, n), vals).unwrap()).unwrap()
                };
                let xm = ts(&(0..m)
                    .map(|_| rng.random_range(-2.0..2.0))
                    .collect::<Vec<_>>());
                for p in enumerate_paths(m, n, None).unwrap() {
                    let mp = crate::warping::WarpingMatrix::of(&p);
                    let direct = path_score_warped(&w, &x, &p).unwrap();
                    let mpx: Vec<f64> = (0..m)
                        .map(|i| (0..n).map(|j| mp.entries()[(i, j)] * xvals[j]).sum())
                        .collect();
                    let via_weight: f64 = wvals.iter().zip(&mpx).map(|(a, b)| a * b).sum();
                    let mptw: Vec<f64> = (0..n)
                        .map(|j| (0..m).map(|i| mp.entries()[(i, j)] * wvals[i]).sum())
                        .collect();
                    let via_input: f64 = mptw.iter().zip(&xvals).map(|(a, b)| a * b).sum();
                    assert!((direct - via_weight).abs() <= 1e-12);
                    assert!((direct - via_input).abs() <= 1e-12);

                    let es = path_score_elastic(&wmat, &xm, &p).unwrap();
                    let xp = p_matrix(&xm, &p, m, n).unwrap();
                    assert!((es - xp.frobenius(&wmat).unwrap()).abs() <= 1e-12);
                    let proj = p_projection(&wmat, &p).unwrap();
                    let via_proj: f64 =
                        proj.iter().zip(xm.values()).map(|(a, b)| a * b).sum();
                    assert!((es - via_proj).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn dtw_of_identical_series_is_zero() {
        let x = ts(&[1.0, 2.0, 3.0]);
        assert_eq!(dtw_distance(&x, &x), 0.0);
    }

    #[test]
    fn dtw_by_hand() {
        // Unique path (1,1),(1,2): (0-1)^2 + (0-1)^2 = 2.
        assert_eq!(dtw_distance(&ts(&[0.0]), &ts(&[1.0, 1.0])), 2.0);
    }

    #[test]
    fn dtw_is_symmetric_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let m = rng.random_range(1..=8);
            let n = rng.random_range(1..=8);
            let x = ts(&(0..m)
                .map(|_| rng.random_range(-3.0..3.0))
                .collect::<Vec<_>>());
            let y = ts(&(0..n)
                .map(|_| rng.random_range(-3.0..3.0))
                .collect::<Vec<_>>());
            assert!((dtw_distance(&x, &y) - dtw_distance(&y, &x)).abs() <= 1e-12);
        }
    }
}

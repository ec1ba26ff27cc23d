//! Max-linear functions (pointwise maxima of linear components) and the
//! constructive equivalences between them and warped-linear functions.
//!
//! Conversions in both directions are provided at desk scale: elastic- and
//! warped-product functions expand into one component per admissible path,
//! and a stack of linear components compiles back into a weight matrix (or a
//! padded weight sequence) with an admissible-path mask.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::products::{p_projection, WeightMatrix, WeightSequence};
use crate::warping::{enumerate_paths, PathConstraint, WarpingMatrix};

/// Relative tolerance scale for active-set membership.
const ACTIVE_TOL: f64 = 1e-9;

/// A max-linear function: `f(x) = max_p w_p . x` over `c` component weight
/// vectors of common dimension `d`. Components are stored row-major in a
/// flat buffer.
///
/// By convention the first coordinate of every component is a bias and
/// inputs carry a leading one; the model itself only checks dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxLinearModel {
    dim: usize,
    weights: Vec<f64>,
}

impl MaxLinearModel {
    pub fn new(components: Vec<Vec<f64>>) -> Result<Self> {
        let c = components.len();
        if c == 0 {
            return Err(Error::InvalidShape(
                "max-linear model needs at least one component".into(),
            ));
        }
        let dim = components[0].len();
        if dim == 0 {
            return Err(Error::InvalidShape(
                "max-linear components must be non-empty".into(),
            ));
        }
        if components.iter().any(|w| w.len() != dim) {
            return Err(Error::InvalidShape(
                "max-linear components must share one dimension".into(),
            ));
        }
        let weights: Vec<f64> = components.into_iter().flatten().collect();
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape(
                "max-linear weights must be finite".into(),
            ));
        }
        Ok(Self { dim, weights })
    }

    pub(crate) fn from_flat(dim: usize, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || weights.is_empty() || !weights.len().is_multiple_of(dim) {
            return Err(Error::InvalidShape(format!(
                "flat weight buffer of {} does not split into dim-{dim} components",
                weights.len()
            )));
        }
        Ok(Self { dim, weights })
    }

    /// Number of components `c`.
    pub fn num_components(&self) -> usize {
        self.weights.len() / self.dim
    }

    /// Component dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `p`-th component weight vector (0-based).
    pub fn component(&self, p: usize) -> &[f64] {
        &self.weights[p * self.dim..(p + 1) * self.dim]
    }

    pub fn components(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks(self.dim)
    }

    /// Flat row-major component weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Maximum component value at `x` together with the smallest attaining
    /// index.
    pub fn evaluate(&self, x: &[f64]) -> Result<(f64, usize)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "input has dimension {}, model expects {}",
                x.len(),
                self.dim
            )));
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0;
        for (p, w) in self.components().enumerate() {
            let v: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            if v > best {
                best = v;
                best_idx = p;
            }
        }
        Ok((best, best_idx))
    }

    /// All component indices within `1e-9 * (1 + |f(x)|)` of the maximum.
    pub fn active_set(&self, x: &[f64]) -> Result<Vec<usize>> {
        let (value, _) = self.evaluate(x)?;
        let tol = ACTIVE_TOL * (1.0 + value.abs());
        let mut out = Vec::new();
        for (p, w) in self.components().enumerate() {
            let v: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            if value - v <= tol {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// Expand an elastic-product function into a max-linear model: one component
/// per admissible path of the `input_length x e` lattice, each being the
/// path projection of the leading sub-matrix.
pub fn ep_to_maxlinear(
    w: &WeightMatrix,
    q: Option<&PathConstraint>,
    input_length: usize,
) -> Result<MaxLinearModel> {
    if input_length == 0 || input_length > w.rows() {
        return Err(Error::DimensionMismatch(format!(
            "input length {input_length} incompatible with a {}-row weight matrix",
            w.rows()
        )));
    }
    let sub = w.leading_rows(input_length)?;
    let paths = enumerate_paths(input_length, w.cols(), q)?;
    let components = paths
        .iter()
        .map(|p| p_projection(&sub, p))
        .collect::<Result<Vec<_>>>()?;
    MaxLinearModel::new(components)
}

/// Expand a warped-product function into a max-linear model: one component
/// `M_p^T w` per admissible path of the `e x input_length` lattice.
pub fn wp_to_maxlinear(
    w: &WeightSequence,
    q: Option<&PathConstraint>,
    input_length: usize,
) -> Result<MaxLinearModel> {
    if input_length == 0 {
        return Err(Error::DimensionMismatch(
            "input length must be positive".into(),
        ));
    }
    let paths = enumerate_paths(w.len(), input_length, q)?;
    let mut components = Vec::with_capacity(paths.len());
    for p in &paths {
        let mp = WarpingMatrix::of(p);
        let mut comp = vec![0.0; input_length];
        for &(i, j) in p.points() {
            comp[j - 1] += mp.entries()[(i - 1, j - 1)] * w.values()[i - 1];
        }
        components.push(comp);
    }
    MaxLinearModel::new(components)
}

/// Compile a stack of `c` component vectors (the rows of `a`, dimension
/// `d >= 2`) into an elastic-product function: a `d x (2(c-1)+d)` weight
/// matrix and a mask whose admissible paths reproduce `max_i a_i . x`
/// exactly on the augmented input space (leading coordinate one).
///
/// The layout telescopes differences of consecutive rows into the first and
/// last input coordinates, interleaves pass-through zeros, and shifts row
/// `i` right by `i` cells. Don't-care cells are stored as zero and excluded
/// by the mask.
pub fn maxlinear_to_ep(a: &Array2<f64>) -> Result<(WeightMatrix, PathConstraint)> {
    let (c, d) = a.dim();
    if c == 0 {
        return Err(Error::InvalidShape("need at least one component".into()));
    }
    if d < 2 {
        return Err(Error::InvalidShape(
            "component dimension must be at least 2".into(),
        ));
    }
    if d == 2 && c > 1 {
        // A two-row lattice cannot isolate the interleaved layout's paths
        // (any mask admitting the intended paths also admits hybrids), so
        // this case uses an envelope staircase layout instead.
        return maxlinear_to_ep_two_rows(a);
    }
    let e = 2 * (c - 1) + d;
    let n = 2 * c - 1;

    // Difference adjustments in the first and last columns.
    let mut adjusted = a.clone();
    for i in 1..c {
        adjusted[(i, 0)] = a[(i, 0)] - a[(i - 1, 0)];
    }
    for i in 0..c - 1 {
        adjusted[(i, d - 1)] = a[(i, d - 1)] - a[(i + 1, d - 1)];
    }

    // Transposed, zero/don't-care interleaved, then row-shifted.
    let mut w = Array2::zeros((d, e));
    let mut mask = Array2::from_elem((d, e), false);
    for i in 0..d {
        for k in 0..n {
            let col = k + i;
            if k % 2 == 0 {
                w[(i, col)] = adjusted[(k / 2, i)];
                mask[(i, col)] = true;
            } else if i == 0 || i == d - 1 {
                // Pass-through zeros let paths travel along the boundary rows.
                mask[(i, col)] = true;
            }
        }
    }
    Ok((WeightMatrix::new(w)?, PathConstraint::new(mask)?))
}

/// Two-row layout for `maxlinear_to_ep`. Components are points
/// `(slope, intercept) = (a_{t2}, a_{t1})`; only the upper concave envelope
/// matters for the maximum. The intercept row realizes the envelope
/// intercepts as prefix sums and the slope row realizes the slopes as suffix
/// sums, with exit columns arranged so every realizable prefix/suffix pair is
/// an envelope point or lies below the envelope.
fn maxlinear_to_ep_two_rows(a: &Array2<f64>) -> Result<(WeightMatrix, PathConstraint)> {
    let (c, d) = a.dim();
    debug_assert!(d == 2 && c > 1);
    let e = 2 * (c - 1) + d; // = 2c

    // Hull points (slope ascending, intercept concave).
    let mut pts: Vec<(f64, f64)> = (0..c).map(|i| (a[(i, 1)], a[(i, 0)])).collect();
    pts.sort_by(|p, q| p.partial_cmp(q).expect("finite weights"));
    let mut dedup: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        match dedup.last() {
            Some(last) if last.0 == p.0 => {
                if p.1 > last.1 {
                    *dedup.last_mut().expect("non-empty") = p;
                }
            }
            _ => dedup.push(p),
        }
    }
    let cross = |o: (f64, f64), p: (f64, f64), q: (f64, f64)| {
        (p.0 - o.0) * (q.1 - o.1) - (p.1 - o.1) * (q.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in dedup {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let r = hull.len();

    // Intercept row: prefix sums hit b_t at odd cells and min(b_t, b_{t+1})
    // at even cells, so a descent one cell late still lands on or below the
    // envelope. Slope row: suffix sums hold w_t over the matching span.
    let mut targets = vec![0.0; 2 * r - 1];
    for t in 0..r {
        targets[2 * t] = hull[t].1;
        if t + 1 < r {
            targets[2 * t + 1] = hull[t].1.min(hull[t + 1].1);
        }
    }
    let mut suffix = vec![0.0; 2 * r + 1];
    for t in 0..r {
        suffix[2 * t] = hull[t].0;
        suffix[2 * t + 1] = hull[t].0;
    }

    let mut w = Array2::zeros((2, e));
    let mut mask = Array2::from_elem((2, e), false);
    let mut prev = 0.0;
    for (s, &u) in targets.iter().enumerate() {
        w[(0, s)] = u - prev;
        prev = u;
        mask[(0, s)] = true;
    }
    for q in 0..e {
        let here = if q < 2 * r { suffix[q] } else { 0.0 };
        let next = if q + 1 < 2 * r { suffix[q + 1] } else { 0.0 };
        w[(1, q)] = here - next;
        mask[(1, q)] = true;
    }
    Ok((WeightMatrix::new(w)?, PathConstraint::new(mask)?))
}

/// Compile a stack of `c` component vectors (rows of `a`, dimension
/// `d >= 2`) into a warped-product function over inputs padded with a
/// leading and trailing zero: a weight sequence of length `c*d` (the rows of
/// `a` concatenated) and a mask over the `(c*d) x (d+2)` lattice whose
/// admissible paths score `max_i a_i . x` on `(0, x, 0)` exactly.
pub fn maxlinear_to_wp_padded(a: &Array2<f64>) -> Result<(WeightSequence, PathConstraint)> {
    let (c, d) = a.dim();
    if c == 0 {
        return Err(Error::InvalidShape("need at least one component".into()));
    }
    if d < 2 {
        // With a single inner column the per-component diagonal lanes become
        // vertically adjacent and a mask cannot keep paths from straddling
        // two lanes.
        return Err(Error::InvalidShape(
            "component dimension must be at least 2".into(),
        ));
    }
    let e = c * d;
    let mut w = Vec::with_capacity(e);
    for i in 0..c {
        w.extend(a.row(i).iter().copied());
    }

    // Column 1 and column d+2 absorb the padding zeros; the inner columns
    // hold one diagonal lane per component.
    let mut mask = Array2::from_elem((e, d + 2), false);
    for i in 0..=(c - 1) * d {
        mask[(i, 0)] = true;
    }
    for i in (d - 1)..e {
        mask[(i, d + 1)] = true;
    }
    for j in 1..=d {
        for k in 0..c {
            mask[(j - 1 + k * d, j)] = true;
        }
    }
    Ok((WeightSequence::new(w)?, PathConstraint::new(mask)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{elastic_product, warped_product, TimeSeries};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn row_max(a: &Array2<f64>, x: &[f64]) -> f64 {
        (0..a.dim().0)
            .map(|i| a.row(i).iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn augmented(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        let mut x = vec![1.0];
        x.extend((1..d).map(|_| rng.random_range(-3.0..3.0)));
        x
    }

    #[test]
    fn evaluate_picks_max_and_smallest_index() {
        let m = MaxLinearModel::new(vec![vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(m.evaluate(&[1.0, 2.0]).unwrap(), (2.0, 0));
        let single = MaxLinearModel::new(vec![vec![0.5, -2.0]]).unwrap();
        assert_eq!(single.evaluate(&[1.0, 3.0]).unwrap(), (0.5 - 6.0, 0));
        let tied = MaxLinearModel::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(tied.evaluate(&[1.0, 2.0]).unwrap().1, 0);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let m = MaxLinearModel::new(vec![vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            m.evaluate(&[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn active_set_contains_duplicates_and_winner() {
        let m = MaxLinearModel::new(vec![vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(m.active_set(&[1.0, 2.0]).unwrap(), vec![0]);
        let dup = MaxLinearModel::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(dup.active_set(&[1.0, 2.0]).unwrap(), vec![0, 1]);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let comps: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let m = MaxLinearModel::new(comps).unwrap();
            let x = augmented(&mut rng, 3);
            let (_, idx) = m.evaluate(&x).unwrap();
            assert!(m.active_set(&x).unwrap().contains(&idx));
        }
    }

    #[test]
    fn ep_expansion_components_by_hand() {
        let w = WeightMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let m = ep_to_maxlinear(&w, None, 2).unwrap();
        // Lexicographic path order: right-down, down-right, diagonal.
        let comps: Vec<Vec<f64>> = m.components().map(<[f64]>::to_vec).collect();
        assert_eq!(comps, vec![vec![3.0, 4.0], vec![1.0, 7.0], vec![1.0, 4.0]]);
    }

    #[test]
    fn ep_expansion_matches_dp_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = WeightMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let m = ep_to_maxlinear(&w, None, 2).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let ts = TimeSeries::new(x.clone()).unwrap();
            let (dp, _) = elastic_product(&w, &ts, None).unwrap();
            let (ml, _) = m.evaluate(&x).unwrap();
            assert!((dp - ml).abs() <= 1e-12);
        }
    }

    #[test]
    fn ep_expansion_elasticity_one_is_single_column() {
        let w = WeightMatrix::from_rows(&[vec![2.0], vec![-1.0], vec![0.5]]).unwrap();
        let m = ep_to_maxlinear(&w, None, 3).unwrap();
        assert_eq!(m.num_components(), 1);
        assert_eq!(m.component(0), &[2.0, -1.0, 0.5]);
    }

    #[test]
    fn ep_expansion_zero_band_is_diagonal_projection() {
        let w = WeightMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![
            7.0, 8.0, 9.0,
        ]])
        .unwrap();
        let q = PathConstraint::band(3, 3, 0).unwrap();
        let m = ep_to_maxlinear(&w, Some(&q), 3).unwrap();
        assert_eq!(m.num_components(), 1);
        assert_eq!(m.component(0), &[1.0, 5.0, 9.0]);
    }

    #[test]
    fn wp_expansion_components_by_hand() {
        let w = WeightSequence::new(vec![1.0, 2.0]).unwrap();
        let m = wp_to_maxlinear(&w, None, 2).unwrap();
        let comps: Vec<Vec<f64>> = m.components().map(<[f64]>::to_vec).collect();
        assert_eq!(comps, vec![vec![1.0, 3.0], vec![3.0, 2.0], vec![1.0, 2.0]]);
    }

    #[test]
    fn wp_expansion_matches_dp_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let e = rng.random_range(1..=5);
            let d = rng.random_range(1..=5);
            let w = WeightSequence::new(
                (0..e).map(|_| rng.random_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let m = wp_to_maxlinear(&w, None, d).unwrap();
            for _ in 0..20 {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
                let ts = TimeSeries::new(x.clone()).unwrap();
                let (dp, _) = warped_product(&w, &ts, None).unwrap();
                let (ml, _) = m.evaluate(&x).unwrap();
                assert!((dp - ml).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn wp_expansion_single_row_lattice() {
        let w = WeightSequence::new(vec![2.0]).unwrap();
        let m = wp_to_maxlinear(&w, None, 4).unwrap();
        assert_eq!(m.num_components(), 1);
        assert_eq!(m.component(0), &[2.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn wp_expansion_zero_weights_give_zero_components() {
        let w = WeightSequence::new(vec![0.0, 0.0]).unwrap();
        let m = wp_to_maxlinear(&w, None, 2).unwrap();
        assert!(m.weights().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn compile_to_ep_matches_interleaved_layout() {
        // c = 3 components of dimension 4, entries 10i + j.
        let a = Array2::from_shape_fn((3, 4), |(i, j)| (10 * (i + 1) + (j + 1)) as f64);
        let (w, q) = maxlinear_to_ep(&a).unwrap();
        assert_eq!(w.rows(), 4);
        assert_eq!(w.cols(), 8);
        let expect_rows: Vec<Vec<f64>> = vec![
            vec![11.0, 0.0, 10.0, 0.0, 10.0, 0.0, 0.0, 0.0],
            vec![0.0, 12.0, 0.0, 22.0, 0.0, 32.0, 0.0, 0.0],
            vec![0.0, 0.0, 13.0, 0.0, 23.0, 0.0, 33.0, 0.0],
            vec![0.0, 0.0, 0.0, -10.0, 0.0, -10.0, 0.0, 34.0],
        ];
        let expect_mask: Vec<Vec<bool>> = vec![
            vec![true, true, true, true, true, false, false, false],
            vec![false, true, false, true, false, true, false, false],
            vec![false, false, true, false, true, false, true, false],
            vec![false, false, false, true, true, true, true, true],
        ];
        for i in 0..4 {
            for j in 0..8 {
                assert_eq!(w.entries()[(i, j)], expect_rows[i][j], "value at ({i},{j})");
                assert_eq!(q.mask()[(i, j)], expect_mask[i][j], "mask at ({i},{j})");
            }
        }
    }

    #[test]
    fn compile_to_ep_single_component_is_diagonal() {
        let a = Array2::from_shape_vec((1, 3), vec![5.0, -1.0, 2.0]).unwrap();
        let (w, q) = maxlinear_to_ep(&a).unwrap();
        assert_eq!((w.rows(), w.cols()), (3, 3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w.entries()[(i, j)], if i == j { a[(0, i)] } else { 0.0 });
                assert_eq!(q.mask()[(i, j)], i == j);
            }
        }
    }

    #[test]
    fn compile_to_ep_rejects_scalar_components() {
        let a = Array2::from_shape_vec((2, 1), vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            maxlinear_to_ep(&a),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn compile_to_ep_reproduces_row_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..60 {
            let c = rng.random_range(1..=5);
            let d = rng.random_range(2..=6);
            let a = Array2::from_shape_fn((c, d), |_| rng.random_range(-2.0..2.0));
            let (w, q) = maxlinear_to_ep(&a).unwrap();
            assert_eq!((w.rows(), w.cols()), (d, 2 * (c - 1) + d));
            for _ in 0..40 {
                let x = augmented(&mut rng, d);
                let ts = TimeSeries::new(x.clone()).unwrap();
                let (value, _) = elastic_product(&w, &ts, Some(&q)).unwrap();
                assert!(
                    (value - row_max(&a, &x)).abs() <= 1e-9,
                    "c={c} d={d}: {value} vs {}",
                    row_max(&a, &x)
                );
            }
        }
    }

    #[test]
    fn compile_to_ep_two_rows_handles_duplicate_slopes() {
        let a = Array2::from_shape_vec(
            (4, 2),
            vec![10.0, 0.0, 3.0, 0.0, 0.0, 10.0, -5.0, 10.0],
        )
        .unwrap();
        let (w, q) = maxlinear_to_ep(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let x = augmented(&mut rng, 2);
            let ts = TimeSeries::new(x.clone()).unwrap();
            let (value, _) = elastic_product(&w, &ts, Some(&q)).unwrap();
            assert!((value - row_max(&a, &x)).abs() <= 1e-9);
        }
    }

    #[test]
    fn compile_to_wp_reproduces_row_max_on_padded_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..60 {
            let c = rng.random_range(1..=5);
            let d = rng.random_range(2..=6);
            let a = Array2::from_shape_fn((c, d), |_| rng.random_range(-2.0..2.0));
            let (w, q) = maxlinear_to_wp_padded(&a).unwrap();
            assert_eq!(w.len(), c * d);
            assert_eq!((q.rows(), q.cols()), (c * d, d + 2));
            for _ in 0..40 {
                let x = augmented(&mut rng, d);
                let mut padded = vec![0.0];
                padded.extend(&x);
                padded.push(0.0);
                let ts = TimeSeries::new(padded).unwrap();
                let (value, _) = warped_product(&w, &ts, Some(&q)).unwrap();
                assert!(
                    (value - row_max(&a, &x)).abs() <= 1e-9,
                    "c={c} d={d}: {value} vs {}",
                    row_max(&a, &x)
                );
            }
        }
    }

    #[test]
    fn compile_to_wp_single_component() {
        let a = Array2::from_shape_vec((1, 3), vec![2.0, -1.0, 4.0]).unwrap();
        let (w, q) = maxlinear_to_wp_padded(&a).unwrap();
        assert_eq!(w.values(), &[2.0, -1.0, 4.0]);
        let paths = enumerate_paths(3, 5, Some(&q)).unwrap();
        assert_eq!(paths.len(), 1);
    }

    #[test]
    fn compile_to_wp_rejects_scalar_components() {
        let a = Array2::from_shape_vec((2, 1), vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            maxlinear_to_wp_padded(&a),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn round_trip_preserves_elastic_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let d = rng.random_range(2..=5);
            let e = rng.random_range(1..=5);
            let w = WeightMatrix::new(Array2::from_shape_fn((d, e), |_| {
                rng.random_range(-1.5..1.5)
            }))
            .unwrap();
            let model = ep_to_maxlinear(&w, None, d).unwrap();
            let stacked = Array2::from_shape_fn((model.num_components(), d), |(p, i)| {
                model.component(p)[i]
            });
            let (w2, q2) = maxlinear_to_ep(&stacked).unwrap();
            for _ in 0..100 {
                let x = augmented(&mut rng, d);
                let ts = TimeSeries::new(x.clone()).unwrap();
                let (orig, _) = elastic_product(&w, &ts, None).unwrap();
                let (back, _) = elastic_product(&w2, &ts, Some(&q2)).unwrap();
                assert!((orig - back).abs() <= 1e-9, "d={d} e={e}: {orig} vs {back}");
            }
        }
    }

    #[test]
    fn max_linear_functions_are_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let comps: Vec<Vec<f64>> = (0..rng.random_range(1..=5))
                .map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let m = MaxLinearModel::new(comps).unwrap();
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let t: f64 = rng.random_range(0.0..=1.0);
            let mix: Vec<f64> = x
                .iter()
                .zip(&y)
                .map(|(a, b)| t * a + (1.0 - t) * b)
                .collect();
            let fx = m.evaluate(&x).unwrap().0;
            let fy = m.evaluate(&y).unwrap().0;
            let fm = m.evaluate(&mix).unwrap().0;
            assert!(fm <= t * fx + (1.0 - t) * fy + 1e-9);
        }
    }

    #[test]
    fn negative_region_means_every_component_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..100 {
            let comps: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let m = MaxLinearModel::new(comps).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let (value, _) = m.evaluate(&x).unwrap();
            let all_nonpositive = m
                .components()
                .all(|w| w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= 0.0);
            assert_eq!(value <= 0.0, all_nonpositive);
        }
    }
}

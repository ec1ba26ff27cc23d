//! Desk-scale separability oracles: convex-hull membership via linear
//! feasibility, max-lin separability of finite point sets, and class-region
//! membership of max-linear discriminants.

use crate::error::{Error, Result};
use crate::maxlinear::MaxLinearModel;

/// Residual tolerance for the feasibility test. Points within tolerance of
/// the hull boundary count as inside.
const HULL_TOL: f64 = 1e-9;

/// Pivot cap for the simplex; generous for the intended scale
/// (dimension <= ~10, a few thousand points).
const MAX_PIVOTS: usize = 100_000;

/// A finite set of real vectors of common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidShape("point set must be non-empty".into()));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidShape(
                "points must share one positive dimension".into(),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("points must be finite".into()));
        }
        Ok(Self { points, dim })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Class region of a discriminant: positive is open, negative is closed
/// (the decision surface belongs to the negative class).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Positive,
    Negative,
}

/// Whether `v` lies in the convex hull of `u`: feasibility of
/// `sum lambda_i u_i = v`, `sum lambda_i = 1`, `lambda >= 0`, decided by a
/// phase-one simplex with Bland's rule and residual tolerance `1e-9`.
pub fn in_convex_hull(v: &[f64], u: &PointSet) -> Result<bool> {
    if v.len() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "query has dimension {}, point set has {}",
            v.len(),
            u.dim()
        )));
    }
    // Equality system rows: one per coordinate plus the affine row of ones.
    let rows = u.dim() + 1;
    let cols: Vec<Vec<f64>> = u
        .points()
        .iter()
        .map(|p| {
            let mut c = p.clone();
            c.push(1.0);
            c
        })
        .collect();
    let mut rhs: Vec<f64> = v.to_vec();
    rhs.push(1.0);
    let scale = 1.0
        + rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()))
        + cols
            .iter()
            .flatten()
            .fold(0.0f64, |a, b| a.max(b.abs()));
    Ok(phase_one_residual(&cols, &rhs, rows) <= HULL_TOL * scale)
}

/// Minimal achievable sum of artificial variables for `A lambda = b`,
/// `lambda >= 0`, where `A` is given column-wise.
fn phase_one_residual(columns: &[Vec<f64>], rhs: &[f64], rows: usize) -> f64 {
    let n = columns.len();
    // Tableau over structural columns, artificial columns, and the rhs.
    let width = n + rows + 1;
    let mut t = vec![vec![0.0f64; width]; rows + 1];
    for r in 0..rows {
        let flip = if rhs[r] < 0.0 { -1.0 } else { 1.0 };
        for (c, col) in columns.iter().enumerate() {
            t[r][c] = flip * col[r];
        }
        t[r][n + r] = 1.0;
        t[r][width - 1] = flip * rhs[r];
    }
    // Objective row: minimize the artificial sum, expressed in reduced form.
    for c in 0..width {
        let s: f64 = t[..rows].iter().map(|row| row[c]).sum();
        t[rows][c] = if c >= n && c < n + rows { 0.0 } else { -s };
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();

    for _ in 0..MAX_PIVOTS {
        // Bland's rule: smallest-index entering column with negative reduced
        // cost, smallest-index leaving row at the minimum ratio.
        let entering = (0..n + rows).find(|&c| t[rows][c] < -1e-12);
        let Some(col) = entering else { break };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..rows {
            if t[r][col] > 1e-12 {
                let ratio = t[r][width - 1] / t[r][col];
                if ratio < best_ratio - 1e-15
                    || (ratio <= best_ratio + 1e-15
                        && leave.is_some_and(|l| basis[r] < basis[l]))
                {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(row) = leave else { break };
        let pivot = t[row][col];
        for v in &mut t[row] {
            *v /= pivot;
        }
        let pivot_row = t[row].clone();
        for (r, other) in t.iter_mut().enumerate() {
            if r != row {
                let f = other[col];
                if f != 0.0 {
                    for (v, p) in other.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        basis[row] = col;
    }
    // Remaining artificial mass is the infeasibility residual.
    let mut residual = 0.0;
    for r in 0..rows {
        if basis[r] >= n {
            residual += t[r][width - 1].max(0.0);
        }
    }
    residual
}

/// Whether `u` is max-lin separable from `v`: no point of `v` lies in the
/// convex hull of `u`. The relation is asymmetric.
pub fn max_lin_separable(u: &PointSet, v: &PointSet) -> Result<bool> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point sets have dimensions {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    for p in v.points() {
        if in_convex_hull(p, u)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Side of the decision surface `x` falls on: negative iff `f(x) <= 0`.
pub fn region_membership(m: &MaxLinearModel, x: &[f64]) -> Result<Region> {
    let (value, _) = m.evaluate(x)?;
    Ok(if value > 0.0 {
        Region::Positive
    } else {
        Region::Negative
    })
}

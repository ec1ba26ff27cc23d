//! Warping paths on an `m x n` lattice, admissible-path constraints, and the
//! matrix representations (warping matrices, embedding matrices) used by the
//! max-linear constructions.
//!
//! Lattice points are 1-based in the public model: a path departs at `(1, 1)`
//! and ends at `(m, n)`, moving only by `(1, 0)`, `(0, 1)` or `(1, 1)`.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Default cap on the number of paths an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// A warping path in an `m x n` lattice, stored as an explicit list of
/// 1-based points. Immutable after construction; construction validates the
/// boundary and step conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpingPath {
    points: Vec<(usize, usize)>,
    rows: usize,
    cols: usize,
}

impl WarpingPath {
    /// Validate `points` as a warping path in the `m x n` lattice.
    ///
    /// Fails with [`Error::BoundaryViolation`] when an endpoint is wrong or a
    /// point leaves the lattice, and with [`Error::StepViolation`] when a
    /// point is not reachable from its predecessor by a legal step. The
    /// reported index identifies the offending point.
    pub fn new(points: Vec<(usize, usize)>, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape(format!(
                "lattice must be at least 1x1, got {m}x{n}"
            )));
        }
        if points.first() != Some(&(1, 1)) {
            return Err(Error::BoundaryViolation { index: 0 });
        }
        for (idx, &(i, j)) in points.iter().enumerate() {
            if i < 1 || i > m || j < 1 || j > n {
                return Err(Error::BoundaryViolation { index: idx });
            }
        }
        for idx in 1..points.len() {
            let (pi, pj) = points[idx - 1];
            let (i, j) = points[idx];
            let di = i.wrapping_sub(pi);
            let dj = j.wrapping_sub(pj);
            let legal = matches!((di, dj), (1, 0) | (0, 1) | (1, 1));
            if !legal {
                return Err(Error::StepViolation { index: idx });
            }
        }
        if points.last() != Some(&(m, n)) {
            return Err(Error::BoundaryViolation {
                index: points.len().saturating_sub(1),
            });
        }
        Ok(Self {
            points,
            rows: m,
            cols: n,
        })
    }

    /// Build a path from points already known to satisfy the invariants
    /// (used by the dynamic programs and the enumerator).
    pub(crate) fn new_unchecked(points: Vec<(usize, usize)>, m: usize, n: usize) -> Self {
        debug_assert!(Self::new(points.clone(), m, n).is_ok());
        Self {
            points,
            rows: m,
            cols: n,
        }
    }

    /// The 1-based lattice points of the path, in traversal order.
    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    /// Number of points `L`; satisfies `max(m, n) <= L <= m + n - 1`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lattice row count `m`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Lattice column count `n`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether every point of the path lies on an allowed cell of `q`.
    pub fn admissible_under(&self, q: &PathConstraint) -> bool {
        self.rows == q.rows()
            && self.cols == q.cols()
            && self.points.iter().all(|&(i, j)| q.is_allowed(i, j))
    }
}

/// Validate a point list as a warping path (free-function form of
/// [`WarpingPath::new`]).
pub fn validate_path(points: Vec<(usize, usize)>, m: usize, n: usize) -> Result<WarpingPath> {
    WarpingPath::new(points, m, n)
}

/// An admissible-cell mask over an `m x n` lattice. A path is admissible iff
/// every point lies on an allowed cell.
///
/// Construction guarantees the corners are allowed and that at least one
/// admissible path exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathConstraint {
    mask: Array2<bool>,
}

impl PathConstraint {
    /// Wrap an arbitrary mask, checking the corner and reachability
    /// invariants.
    pub fn new(mask: Array2<bool>) -> Result<Self> {
        let (m, n) = mask.dim();
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape(format!(
                "constraint mask must be at least 1x1, got {m}x{n}"
            )));
        }
        if !mask[(0, 0)] || !mask[(m - 1, n - 1)] {
            return Err(Error::InfeasibleConstraint);
        }
        let c = Self { mask };
        if !c.has_admissible_path() {
            return Err(Error::InfeasibleConstraint);
        }
        Ok(c)
    }

    /// The all-allowed constraint (no restriction).
    pub fn full(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape(format!(
                "constraint mask must be at least 1x1, got {m}x{n}"
            )));
        }
        Ok(Self {
            mask: Array2::from_elem((m, n), true),
        })
    }

    /// Slope-corrected band of the given half-width around the corner-to-
    /// corner diagonal: cell `(i, j)` (1-based) is allowed iff
    /// `|(i-1)(n-1)/(m-1) - (j-1)| <= width`. Corners are always allowed; a
    /// degenerate single-row or single-column lattice is unrestricted.
    pub fn band(m: usize, n: usize, width: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape(format!(
                "lattice must be at least 1x1, got {m}x{n}"
            )));
        }
        let mut mask = Array2::from_elem((m, n), false);
        for i in 0..m {
            for j in 0..n {
                let allowed = if m == 1 || n == 1 {
                    true
                } else {
                    let center = i as f64 * (n as f64 - 1.0) / (m as f64 - 1.0);
                    (center - j as f64).abs() <= width as f64
                };
                mask[(i, j)] = allowed;
            }
        }
        mask[(0, 0)] = true;
        mask[(m - 1, n - 1)] = true;
        Self::new(mask)
    }

    /// Lattice row count.
    pub fn rows(&self) -> usize {
        self.mask.dim().0
    }

    /// Lattice column count.
    pub fn cols(&self) -> usize {
        self.mask.dim().1
    }

    /// Whether the 1-based cell `(i, j)` is allowed.
    pub fn is_allowed(&self, i: usize, j: usize) -> bool {
        self.mask[(i - 1, j - 1)]
    }

    /// The underlying mask (0-based indexing).
    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    /// Restrict to the first `l` rows. The sub-mask must itself admit a path
    /// ending at `(l, n)`.
    pub fn leading_rows(&self, l: usize) -> Result<Self> {
        if l == 0 || l > self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot take {l} leading rows of a {}-row constraint",
                self.rows()
            )));
        }
        let sub = self
            .mask
            .slice(ndarray::s![..l, ..])
            .to_owned();
        Self::new(sub)
    }

    /// Whether at least one admissible path from `(1,1)` to `(m,n)` exists.
    fn has_admissible_path(&self) -> bool {
        let (m, n) = self.mask.dim();
        let mut reach = Array2::from_elem((m, n), false);
        for i in 0..m {
            for j in 0..n {
                if !self.mask[(i, j)] {
                    continue;
                }
                reach[(i, j)] = (i == 0 && j == 0)
                    || (i > 0 && reach[(i - 1, j)])
                    || (j > 0 && reach[(i, j - 1)])
                    || (i > 0 && j > 0 && reach[(i - 1, j - 1)]);
            }
        }
        reach[(m - 1, n - 1)]
    }
}

/// Slope-corrected band constructor (free-function form of
/// [`PathConstraint::band`]).
pub fn band_constraint(m: usize, n: usize, width: usize) -> Result<PathConstraint> {
    PathConstraint::band(m, n, width)
}

/// Number of admissible paths in the `m x n` lattice, saturating at
/// `u128::MAX`. Without a constraint this follows the three-step lattice-path
/// recurrence `D(m, n) = D(m-1, n) + D(m, n-1) + D(m-1, n-1)`.
pub fn path_count(m: usize, n: usize, q: Option<&PathConstraint>) -> Result<u128> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidShape(format!(
            "lattice must be at least 1x1, got {m}x{n}"
        )));
    }
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
    let mut counts = Array2::<u128>::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            if !allowed(i, j) {
                continue;
            }
            if i == 0 && j == 0 {
                counts[(i, j)] = 1;
                continue;
            }
            let mut c: u128 = 0;
            if i > 0 {
                c = c.saturating_add(counts[(i - 1, j)]);
            }
            if j > 0 {
                c = c.saturating_add(counts[(i, j - 1)]);
            }
            if i > 0 && j > 0 {
                c = c.saturating_add(counts[(i - 1, j - 1)]);
            }
            counts[(i, j)] = c;
        }
    }
    Ok(counts[(m - 1, n - 1)])
}

/// Enumerate every admissible path in the `m x n` lattice in lexicographic
/// order of point sequences, refusing when the count exceeds
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_paths(
    m: usize,
    n: usize,
    q: Option<&PathConstraint>,
) -> Result<Vec<WarpingPath>> {
    enumerate_paths_capped(m, n, q, DEFAULT_ENUMERATION_CAP)
}

/// [`enumerate_paths`] with an explicit cap.
pub fn enumerate_paths_capped(
    m: usize,
    n: usize,
    q: Option<&PathConstraint>,
    cap: u128,
) -> Result<Vec<WarpingPath>> {
    let count = path_count(m, n, q)?;
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let allowed = |i: usize, j: usize| q.is_none_or(|q| q.is_allowed(i, j));
    let mut out = Vec::with_capacity(count as usize);
    let mut prefix: Vec<(usize, usize)> = Vec::with_capacity(m + n);
    if allowed(1, 1) {
        prefix.push((1, 1));
        extend_paths(m, n, &allowed, &mut prefix, &mut out);
    }
    Ok(out)
}

fn extend_paths(
    m: usize,
    n: usize,
    allowed: &impl Fn(usize, usize) -> bool,
    prefix: &mut Vec<(usize, usize)>,
    out: &mut Vec<WarpingPath>,
) {
    let &(i, j) = prefix.last().expect("non-empty prefix");
    if i == m && j == n {
        out.push(WarpingPath::new_unchecked(prefix.clone(), m, n));
        return;
    }
    // Successor order (i, j+1) < (i+1, j) < (i+1, j+1) yields lexicographic
    // output on point sequences.
    let steps = [(i, j + 1), (i + 1, j), (i + 1, j + 1)];
    for (si, sj) in steps {
        if si <= m && sj <= n && allowed(si, sj) {
            prefix.push((si, sj));
            extend_paths(m, n, allowed, prefix, out);
            prefix.pop();
        }
    }
}

/// Binary matrix with ones exactly on the points of an inducing path.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpingMatrix {
    entries: Array2<f64>,
}

impl WarpingMatrix {
    /// The warping matrix of `p`: `entries[(i-1, j-1)] = 1` iff `(i, j)` is a
    /// point of `p`.
    pub fn of(p: &WarpingPath) -> Self {
        let mut entries = Array2::zeros((p.rows(), p.cols()));
        for &(i, j) in p.points() {
            entries[(i - 1, j - 1)] = 1.0;
        }
        Self { entries }
    }

    /// The 0/1 entries as a real matrix.
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.dim().0
    }

    pub fn cols(&self) -> usize {
        self.entries.dim().1
    }

    /// Recover the inducing path. The nonzero cells of a warping matrix in
    /// lexicographic order are exactly the path's traversal order.
    pub fn to_path(&self) -> Result<WarpingPath> {
        let (m, n) = self.entries.dim();
        let mut points = Vec::new();
        for i in 0..m {
            for j in 0..n {
                if self.entries[(i, j)] != 0.0 {
                    points.push((i + 1, j + 1));
                }
            }
        }
        WarpingPath::new(points, m, n)
    }
}

/// Free-function form of [`WarpingMatrix::of`].
pub fn warping_matrix(p: &WarpingPath) -> WarpingMatrix {
    WarpingMatrix::of(p)
}

/// The pair of embedding matrices induced by a path of length `L`: `phi` is
/// `L x m` and `psi` is `L x n`; row `l` holds the standard basis vectors
/// selecting the path's row and column indices at step `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPair {
    phi: Array2<f64>,
    psi: Array2<f64>,
}

impl EmbeddingPair {
    pub fn of(p: &WarpingPath) -> Self {
        let l = p.len();
        let mut phi = Array2::zeros((l, p.rows()));
        let mut psi = Array2::zeros((l, p.cols()));
        for (step, &(i, j)) in p.points().iter().enumerate() {
            phi[(step, i - 1)] = 1.0;
            psi[(step, j - 1)] = 1.0;
        }
        Self { phi, psi }
    }

    /// `L x m` row-selector matrix.
    pub fn phi(&self) -> &Array2<f64> {
        &self.phi
    }

    /// `L x n` column-selector matrix.
    pub fn psi(&self) -> &Array2<f64> {
        &self.psi
    }

    /// `phi^T psi`, which equals the warping matrix of the inducing path.
    pub fn product(&self) -> Array2<f64> {
        self.phi.t().dot(&self.psi)
    }
}

/// Free-function form of [`EmbeddingPair::of`].
pub fn embedding_matrices(p: &WarpingPath) -> EmbeddingPair {
    EmbeddingPair::of(p)
}

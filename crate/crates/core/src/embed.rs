//! Complete-matrix machinery: Cayley-Menger determinants, embeddability,
//! realizations and metric bases.
//!
//! Two independent routes decide embeddability. Realizations come from the
//! eigenvalues of the anchored Gram matrix; independence and metric bases come
//! from the sign pattern of Cayley-Menger determinants. [`embedding_dimension`]
//! runs both and reports a [`EdmError::RouteDisagreement`] when they differ,
//! which can only mean the tolerances are miscalibrated for the input.
//!
//! Every function accepts an index list into a larger matrix so that
//! principal submatrices never need to be materialised.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{determinant, symmetric_eigen};
use crate::matrix::{squared_distance, PartialMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EdmError {
    #[error("entry ({i}, {j}) is unspecified")]
    UnspecifiedEntry { i: usize, j: usize },
    #[error("matrix is not a Euclidean distance matrix")]
    NotEdm,
    #[error("index set is not independent")]
    NotIndependent,
    #[error("Gram route gives dimension {gram} but Cayley-Menger route gives {cm}")]
    RouteDisagreement { gram: usize, cm: usize },
    #[error("not embeddable: {0:?}")]
    NotEmbeddable(NotEmbeddable),
    #[error("realization residual {residual} exceeds the bound")]
    Residual { residual: f64 },
}

/// Certificate that a complete matrix is not d-embeddable.
#[derive(Debug, Clone, PartialEq)]
pub enum NotEmbeddable {
    /// The anchored Gram matrix has an eigenvalue below `-τ_eig`.
    NegativeEigenvalue { value: f64 },
    /// More than `d` Gram eigenvalues exceed `τ_eig`; the first `d + 1` are listed.
    Rank { eigenvalues: Vec<f64> },
}

/// Ordered points in `R^dim`, one per index of the realized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl Realization {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Complete squared-distance matrix of the points.
    pub fn distance_matrix(&self) -> PartialMatrix {
        PartialMatrix::from_points(&self.points)
    }

    /// Largest `|‖p_i − p_j‖² − m_ij|` over the specified entries of `m`.
    pub fn max_residual(&self, m: &PartialMatrix) -> f64 {
        let n = m.order();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                if let Some(v) = m.get(i, j) {
                    let r = libm::fabs(squared_distance(&self.points[i], &self.points[j]) - v);
                    worst = worst.max(r);
                }
            }
        }
        worst
    }

    /// True when the points reproduce every specified entry of `m` within
    /// `tol.real` (relative to the largest entry).
    pub fn realizes(&self, m: &PartialMatrix, tol: &Tolerances) -> bool {
        self.points.len() == m.order()
            && self.points.iter().all(|p| p.len() == self.dim)
            && self.max_residual(m) <= tol.real_abs(m.max_entry())
    }
}

/// Index subset whose embedding pins down the embedding of every other index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricBasis {
    pub indices: Vec<usize>,
}

impl MetricBasis {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Strong embedding dimension of the basis, `|indices| − 1`.
    pub fn rank(&self) -> usize {
        self.indices.len().saturating_sub(1)
    }
}

fn entry(m: &PartialMatrix, i: usize, j: usize) -> Result<f64, EdmError> {
    m.get(i, j).ok_or(EdmError::UnspecifiedEntry { i, j })
}

/// Bordered Cayley-Menger matrix of `idx`, row-major `(k+1) x (k+1)`.
fn cm_matrix(m: &PartialMatrix, idx: &[usize]) -> Result<Vec<f64>, EdmError> {
    let k = idx.len() + 1;
    let mut a = vec![0.0; k * k];
    for r in 1..k {
        a[r] = 1.0;
        a[r * k] = 1.0;
    }
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            if r != c {
                a[(r + 1) * k + c + 1] = entry(m, i, j)?;
            }
        }
    }
    Ok(a)
}

/// Cayley-Menger determinant of the points `idx` of `m`.
pub fn cm_determinant(m: &PartialMatrix, idx: &[usize]) -> Result<f64, EdmError> {
    let a = cm_matrix(m, idx)?;
    Ok(determinant(idx.len() + 1, &a))
}

/// `(−1)^{j+1} CM(x_0..x_j)` for `j = idx.len() − 1`, positive exactly when
/// the simplex on `idx` is non-degenerate.
fn signed_cm(m: &PartialMatrix, idx: &[usize]) -> Result<f64, EdmError> {
    let j = idx.len() - 1;
    let cm = cm_determinant(m, idx)?;
    Ok(if j % 2 == 1 { cm } else { -cm })
}

/// Whether `m[idx]` is strongly `(|idx| − 1)`-embeddable, i.e. `idx` is an
/// independent set. Singletons and the empty set are independent.
pub fn is_independent(
    m: &PartialMatrix,
    idx: &[usize],
    tol: &Tolerances,
) -> Result<bool, EdmError> {
    let scale = m.max_entry_on(idx);
    for end in 2..=idx.len() {
        if signed_cm(m, &idx[..end])? <= tol.cm_abs(scale, end) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy matroid scan over `universe` in the given order, starting from `seed`
/// (assumed independent). No check that the matrix is an EDM.
pub(crate) fn greedy_extend(
    m: &PartialMatrix,
    seed: &[usize],
    universe: &[usize],
    scale: f64,
    tol: &Tolerances,
) -> Result<Vec<usize>, EdmError> {
    let mut basis: Vec<usize> = seed.to_vec();
    for &x in universe {
        if basis.contains(&x) {
            continue;
        }
        if basis.is_empty() {
            basis.push(x);
            continue;
        }
        basis.push(x);
        if signed_cm(m, &basis)? <= tol.cm_abs(scale, basis.len()) {
            basis.pop();
        }
    }
    Ok(basis)
}

/// Smallest-index greedy maximal independent subset of `idx`, without the
/// Cayley-Menger vanishing checks. Callers must already know `m[idx]` is an EDM.
pub fn greedy_basis(
    m: &PartialMatrix,
    idx: &[usize],
    tol: &Tolerances,
) -> Result<MetricBasis, EdmError> {
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    let scale = m.max_entry_on(&sorted);
    Ok(MetricBasis {
        indices: greedy_extend(m, &[], &sorted, scale, tol)?,
    })
}

/// Checks the vanishing half of the Cayley-Menger characterisation: every
/// extra point and every extra pair has zero determinant against `basis`.
fn dependents_vanish(
    m: &PartialMatrix,
    basis: &[usize],
    idx: &[usize],
    scale: f64,
    tol: &Tolerances,
) -> Result<bool, EdmError> {
    let rest: Vec<usize> = idx.iter().copied().filter(|x| !basis.contains(x)).collect();
    let mut set = basis.to_vec();
    for (a, &x) in rest.iter().enumerate() {
        set.push(x);
        if libm::fabs(cm_determinant(m, &set)?) > tol.cm_abs(scale, set.len()) {
            return Ok(false);
        }
        for &y in &rest[a + 1..] {
            set.push(y);
            let v = cm_determinant(m, &set)?;
            set.pop();
            if libm::fabs(v) > tol.cm_abs(scale, set.len() + 1) {
                return Ok(false);
            }
        }
        set.pop();
    }
    Ok(true)
}

/// Metric basis of `m[idx]` via the smallest-index greedy scan, verified
/// against the full Cayley-Menger characterisation.
pub fn metric_basis_on(
    m: &PartialMatrix,
    idx: &[usize],
    tol: &Tolerances,
) -> Result<MetricBasis, EdmError> {
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    let scale = m.max_entry_on(&sorted);
    let basis = greedy_extend(m, &[], &sorted, scale, tol)?;
    if !dependents_vanish(m, &basis, &sorted, scale, tol)? {
        return Err(EdmError::NotEdm);
    }
    Ok(MetricBasis { indices: basis })
}

/// Metric basis of the whole (complete) matrix.
pub fn metric_basis(m: &PartialMatrix, tol: &Tolerances) -> Result<MetricBasis, EdmError> {
    let all: Vec<usize> = (0..m.order()).collect();
    metric_basis_on(m, &all, tol)
}

/// Maximal independent superset of `seed` inside `universe` (scanned in
/// ascending order). The seed keeps its order at the front of the result.
pub fn extend_basis(
    m: &PartialMatrix,
    seed: &[usize],
    universe: &[usize],
    tol: &Tolerances,
) -> Result<MetricBasis, EdmError> {
    if !is_independent(m, seed, tol)? {
        return Err(EdmError::NotIndependent);
    }
    let mut sorted = universe.to_vec();
    sorted.sort_unstable();
    let mut scope = sorted.clone();
    scope.extend(seed.iter().copied().filter(|x| !sorted.contains(x)));
    let scale = m.max_entry_on(&scope);
    Ok(MetricBasis {
        indices: greedy_extend(m, seed, &sorted, scale, tol)?,
    })
}

/// Strong embedding dimension of `m[idx]` by the Cayley-Menger route.
fn cm_dimension(m: &PartialMatrix, idx: &[usize], tol: &Tolerances) -> Result<usize, EdmError> {
    Ok(metric_basis_on(m, idx, tol)?.rank())
}

/// `m` (complete) is r-embeddable and not (r−1)-embeddable.
pub fn is_strongly_embeddable(
    m: &PartialMatrix,
    r: usize,
    tol: &Tolerances,
) -> Result<bool, EdmError> {
    let all: Vec<usize> = (0..m.order()).collect();
    match cm_dimension(m, &all, tol) {
        Ok(dim) => Ok(dim == r),
        Err(EdmError::NotEdm) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Anchored Gram matrix `G_ab = (m_{0a} + m_{0b} − m_{ab}) / 2` over `idx[1..]`.
fn anchored_gram(m: &PartialMatrix, idx: &[usize]) -> Result<Vec<f64>, EdmError> {
    let k = idx.len().saturating_sub(1);
    let anchor = idx[0];
    let mut g = vec![0.0; k * k];
    for a in 0..k {
        let ia = idx[a + 1];
        let ma = entry(m, anchor, ia)?;
        for b in a..k {
            let ib = idx[b + 1];
            let v = if a == b {
                ma
            } else {
                (ma + entry(m, anchor, ib)? - entry(m, ia, ib)?) / 2.0
            };
            g[a * k + b] = v;
            g[b * k + a] = v;
        }
    }
    Ok(g)
}

/// Realization of the complete matrix `m[idx]` in `R^d` (points in `idx` order).
pub fn realize_on(
    m: &PartialMatrix,
    idx: &[usize],
    d: usize,
    tol: &Tolerances,
) -> Result<Realization, EdmError> {
    if idx.is_empty() {
        return Ok(Realization {
            dim: d,
            points: Vec::new(),
        });
    }
    let scale = m.max_entry_on(idx);
    let thresh = tol.eig_abs(scale);
    let g = anchored_gram(m, idx)?;
    let k = idx.len() - 1;
    let eig = symmetric_eigen(k, &g);
    if let Some(&low) = eig.values.last() {
        if low < -thresh {
            return Err(EdmError::NotEmbeddable(NotEmbeddable::NegativeEigenvalue {
                value: low,
            }));
        }
    }
    let rank = eig.values.iter().filter(|&&v| v > thresh).count();
    if rank > d {
        return Err(EdmError::NotEmbeddable(NotEmbeddable::Rank {
            eigenvalues: eig.values[..=d].to_vec(),
        }));
    }
    let mut points = vec![vec![0.0; d]; idx.len()];
    for a in 0..k {
        for (c, x) in points[a + 1].iter_mut().enumerate().take(rank) {
            *x = libm::sqrt(eig.values[c]) * eig.vector_entry(a, c);
        }
    }
    let real = Realization { dim: d, points };
    let residual = real.max_residual(&m.principal(idx));
    if residual > tol.real_abs(scale) {
        return Err(EdmError::Residual { residual });
    }
    Ok(real)
}

/// Realization of the complete matrix `m` in `R^d`.
pub fn realize(m: &PartialMatrix, d: usize, tol: &Tolerances) -> Result<Realization, EdmError> {
    let all: Vec<usize> = (0..m.order()).collect();
    realize_on(m, &all, d, tol)
}

/// Double-centred variant of [`realize`]: points are centred at their
/// centroid. Better conditioned when the first point is an outlier.
pub fn realize_centered(
    m: &PartialMatrix,
    d: usize,
    tol: &Tolerances,
) -> Result<Realization, EdmError> {
    let n = m.order();
    if n == 0 {
        return Ok(Realization {
            dim: d,
            points: Vec::new(),
        });
    }
    let mut dsq = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dsq[i * n + j] = entry(m, i, j)?;
        }
    }
    let nf = n as f64;
    let row: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| dsq[i * n + j]).sum::<f64>() / nf)
        .collect();
    let all = row.iter().sum::<f64>() / nf;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (dsq[i * n + j] - row[i] - row[j] + all);
        }
    }
    let scale = m.max_entry();
    let thresh = tol.eig_abs(scale);
    let eig = symmetric_eigen(n, &b);
    let low = eig.values[n - 1];
    if low < -thresh {
        return Err(EdmError::NotEmbeddable(NotEmbeddable::NegativeEigenvalue {
            value: low,
        }));
    }
    let rank = eig.values.iter().filter(|&&v| v > thresh).count();
    if rank > d {
        return Err(EdmError::NotEmbeddable(NotEmbeddable::Rank {
            eigenvalues: eig.values[..=d].to_vec(),
        }));
    }
    let mut points = vec![vec![0.0; d]; n];
    for (i, p) in points.iter_mut().enumerate() {
        for (c, x) in p.iter_mut().enumerate().take(rank) {
            *x = libm::sqrt(eig.values[c]) * eig.vector_entry(i, c);
        }
    }
    let real = Realization { dim: d, points };
    let residual = real.max_residual(m);
    if residual > tol.real_abs(scale) {
        return Err(EdmError::Residual { residual });
    }
    Ok(real)
}

/// Number of Gram eigenvalues above threshold, or `NotEdm` on a negative one.
fn gram_dimension(m: &PartialMatrix, idx: &[usize], tol: &Tolerances) -> Result<usize, EdmError> {
    if idx.len() <= 1 {
        return Ok(0);
    }
    let thresh = tol.eig_abs(m.max_entry_on(idx));
    let g = anchored_gram(m, idx)?;
    let eig = symmetric_eigen(idx.len() - 1, &g);
    if eig.values.iter().any(|&v| v < -thresh) {
        return Err(EdmError::NotEdm);
    }
    Ok(eig.values.iter().filter(|&&v| v > thresh).count())
}

/// Smallest `d` with `m` d-embeddable. Both decision routes must agree.
pub fn embedding_dimension(m: &PartialMatrix, tol: &Tolerances) -> Result<usize, EdmError> {
    let all: Vec<usize> = (0..m.order()).collect();
    let gram = gram_dimension(m, &all, tol)?;
    let cm = match cm_dimension(m, &all, tol) {
        Ok(c) => c,
        Err(EdmError::NotEdm) => {
            return Err(EdmError::RouteDisagreement {
                gram,
                cm: usize::MAX,
            })
        }
        Err(e) => return Err(e),
    };
    if gram != cm {
        return Err(EdmError::RouteDisagreement { gram, cm });
    }
    Ok(gram)
}

/// Whether the complete matrix `m[idx]` is d-embeddable (Gram route).
pub fn is_embeddable_on(
    m: &PartialMatrix,
    idx: &[usize],
    d: usize,
    tol: &Tolerances,
) -> Result<bool, EdmError> {
    match gram_dimension(m, idx, tol) {
        Ok(r) => Ok(r <= d),
        Err(EdmError::NotEdm) => Ok(false),
        Err(e) => Err(e),
    }
}

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::UnderlyingGraph;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("entry ({i}, {j}) differs from ({j}, {i})")]
    Asymmetric { i: usize, j: usize },
    #[error("entry ({i}, {j}) is negative or not finite")]
    NegativeEntry { i: usize, j: usize },
    #[error("diagonal entry ({i}, {i}) is not zero")]
    NonzeroDiagonal { i: usize },
    #[error("index {index} out of range for order {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
}

/// Symmetric hollow matrix of squared distances with optional entries.
///
/// Entries are stored row-major; `None` marks an unspecified entry. The
/// diagonal is always specified and zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMatrix {
    n: usize,
    entries: Vec<Option<f64>>,
}

impl PartialMatrix {
    /// Order-`n` matrix with every off-diagonal entry unspecified.
    pub fn unspecified(n: usize) -> Self {
        let mut entries = vec![None; n * n];
        for i in 0..n {
            entries[i * n + i] = Some(0.0);
        }
        PartialMatrix { n, entries }
    }

    /// Builds from a row-major grid, checking hollowness, symmetry and signs.
    pub fn from_grid(n: usize, grid: Vec<Option<f64>>) -> Result<Self, MatrixError> {
        if grid.len() != n * n {
            return Err(MatrixError::Shape {
                expected: n * n,
                got: grid.len(),
            });
        }
        for i in 0..n {
            if grid[i * n + i] != Some(0.0) {
                return Err(MatrixError::NonzeroDiagonal { i });
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let a = grid[i * n + j];
                if let Some(v) = a {
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(MatrixError::NegativeEntry { i, j });
                    }
                }
                if j > i && a != grid[j * n + i] {
                    return Err(MatrixError::Asymmetric { i, j });
                }
            }
        }
        Ok(PartialMatrix { n, entries: grid })
    }

    /// Fully specified matrix from rows of squared distances.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut grid = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MatrixError::Shape {
                    expected: n,
                    got: row.len(),
                });
            }
            grid.extend(row.iter().map(|&v| Some(v)));
        }
        Self::from_grid(n, grid)
    }

    /// Squared-distance matrix of a point set (every entry specified).
    pub fn from_points(points: &[Vec<f64>]) -> Self {
        let n = points.len();
        let mut m = Self::unspecified(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set(i, j, squared_distance(&points[i], &points[j]));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.n + j]
    }

    pub fn is_specified(&self, i: usize, j: usize) -> bool {
        self.get(i, j).is_some()
    }

    /// Sets the symmetric pair `(i, j)`. Panics on the diagonal or a negative value.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "diagonal entries are fixed at zero");
        assert!(value >= 0.0 && value.is_finite(), "entries are nonnegative");
        self.entries[i * self.n + j] = Some(value);
        self.entries[j * self.n + i] = Some(value);
    }

    pub fn unset(&mut self, i: usize, j: usize) {
        if i != j {
            self.entries[i * self.n + j] = None;
            self.entries[j * self.n + i] = None;
        }
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    /// Number of unspecified off-diagonal entries in row `i`.
    pub fn unspecified_in_row(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.get(i, j).is_none()).count()
    }

    /// Unordered unspecified pairs `(i, j)` with `i < j`, in row-major order.
    pub fn unspecified_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j).is_none() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Largest specified entry (0 for an empty or all-zero matrix).
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().flatten().fold(0.0, |a, &b| a.max(b))
    }

    /// Largest specified entry among the pairs of `idx`.
    pub fn max_entry_on(&self, idx: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                if let Some(v) = self.get(i, j) {
                    best = best.max(v);
                }
            }
        }
        best
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> PartialMatrix {
        let k = idx.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j));
            }
        }
        PartialMatrix { n: k, entries }
    }

    /// Matrix with row and column `w` removed.
    pub fn without(&self, w: usize) -> PartialMatrix {
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != w).collect();
        self.principal(&keep)
    }

    /// True if every pair within `idx` is specified.
    pub fn is_fully_specified_on(&self, idx: &[usize]) -> bool {
        idx.iter()
            .enumerate()
            .all(|(a, &i)| idx[a + 1..].iter().all(|&j| self.is_specified(i, j)))
    }

    pub fn graph(&self) -> UnderlyingGraph {
        let mut g = UnderlyingGraph::empty(self.n);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.is_specified(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Row-major view of the raw entries.
    pub fn grid(&self) -> &[Option<f64>] {
        &self.entries
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

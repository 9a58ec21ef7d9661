use alloc::vec::Vec;

use super::CompressError;
use crate::graph::UnderlyingGraph;
use crate::matrix::PartialMatrix;

/// Cliques of specified entries covering every specified off-diagonal pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCover {
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueCover {
    pub fn new(mut cliques: Vec<Vec<usize>>) -> Self {
        for c in &mut cliques {
            c.sort_unstable();
            c.dedup();
        }
        CliqueCover { cliques }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Checks both cover invariants against `m`.
    pub fn validate(&self, m: &PartialMatrix) -> Result<(), CompressError> {
        let n = m.order();
        for (k, c) in self.cliques.iter().enumerate() {
            if let Some(&bad) = c.iter().find(|&&v| v >= n) {
                return Err(CompressError::InvalidCover(alloc::format!(
                    "clique {} mentions index {} but the matrix has order {}",
                    k,
                    bad,
                    n
                )));
            }
            if !m.is_fully_specified_on(c) {
                return Err(CompressError::InvalidCover(alloc::format!(
                    "clique {} ({:?}) contains an unspecified entry",
                    k,
                    c
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if m.is_specified(i, j)
                    && !self
                        .cliques
                        .iter()
                        .any(|c| c.contains(&i) && c.contains(&j))
                {
                    return Err(CompressError::InvalidCover(alloc::format!(
                        "specified entry ({}, {}) is not covered",
                        i,
                        j
                    )));
                }
            }
        }
        Ok(())
    }

    /// Cover of `m.without(w)`: `w` dropped and larger indices shifted down.
    pub fn without(&self, w: usize) -> CliqueCover {
        CliqueCover {
            cliques: self
                .cliques
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|&&v| v != w)
                        .map(|&v| if v > w { v - 1 } else { v })
                        .collect()
                })
                .collect(),
        }
    }
}

pub const MAX_COVER_SEARCH_K: usize = 6;

/// Smallest edge clique cover of `g` with at most `kmax` cliques, or `None`.
/// Iterative deepening over k; each level branches over the maximal cliques
/// containing the first uncovered edge.
pub fn edge_clique_cover_search(
    g: &UnderlyingGraph,
    kmax: usize,
    node_budget: u64,
) -> Result<Option<CliqueCover>, CompressError> {
    if kmax > MAX_COVER_SEARCH_K {
        return Err(CompressError::KTooLarge {
            k: kmax,
            max: MAX_COVER_SEARCH_K,
        });
    }
    let edges = g.edges();
    if edges.is_empty() {
        return Ok(Some(CliqueCover {
            cliques: Vec::new(),
        }));
    }
    // restricting to maximal cliques loses nothing: any cover can be enlarged
    // clique by clique to maximal ones
    let maximal: Vec<Vec<usize>> = g
        .maximal_cliques()
        .into_iter()
        .filter(|c| c.len() >= 2)
        .collect();
    let mut nodes = 0u64;
    for k in 1..=kmax {
        let mut chosen = Vec::new();
        if cover_dfs(&edges, &maximal, k, &mut chosen, &mut nodes, node_budget)? {
            return Ok(Some(CliqueCover::new(
                chosen.iter().map(|&i| maximal[i].clone()).collect(),
            )));
        }
    }
    Ok(None)
}

fn cover_dfs(
    edges: &[(usize, usize)],
    maximal: &[Vec<usize>],
    k: usize,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, CompressError> {
    *nodes += 1;
    if *nodes > budget {
        return Err(CompressError::BudgetExceeded);
    }
    let covered = |u: usize, v: usize, chosen: &[usize]| {
        chosen
            .iter()
            .any(|&c| maximal[c].binary_search(&u).is_ok() && maximal[c].binary_search(&v).is_ok())
    };
    let first = edges.iter().find(|&&(u, v)| !covered(u, v, chosen));
    let Some(&(u, v)) = first else {
        return Ok(true);
    };
    if chosen.len() == k {
        return Ok(false);
    }
    for (ci, c) in maximal.iter().enumerate() {
        if c.binary_search(&u).is_ok() && c.binary_search(&v).is_ok() {
            chosen.push(ci);
            if cover_dfs(edges, maximal, k, chosen, nodes, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn small_covers() {
        let tri = UnderlyingGraph::complete(3);
        assert_eq!(
            edge_clique_cover_search(&tri, 3, 10_000)
                .unwrap()
                .unwrap()
                .cliques,
            vec![vec![0, 1, 2]]
        );
        let two = UnderlyingGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(
            edge_clique_cover_search(&two, 3, 10_000)
                .unwrap()
                .unwrap()
                .len(),
            2
        );
        let c5 = UnderlyingGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(
            edge_clique_cover_search(&c5, 5, 10_000)
                .unwrap()
                .unwrap()
                .len(),
            5
        );
        assert_eq!(edge_clique_cover_search(&c5, 4, 10_000).unwrap(), None);
    }

    #[test]
    fn limits() {
        let g = UnderlyingGraph::complete(3);
        assert!(matches!(
            edge_clique_cover_search(&g, 7, 10),
            Err(CompressError::KTooLarge { .. })
        ));
    }

    #[test]
    fn validation() {
        let pts = [vec![0.0], vec![1.0], vec![2.0]];
        let mut m = PartialMatrix::from_points(&pts);
        m.unset(0, 2);
        assert!(CliqueCover::new(vec![vec![0, 1], vec![1, 2]])
            .validate(&m)
            .is_ok());
        assert!(CliqueCover::new(vec![vec![0, 1]]).validate(&m).is_err());
        assert!(CliqueCover::new(vec![vec![0, 1, 2]]).validate(&m).is_err());
        let c = CliqueCover::new(vec![vec![0, 1], vec![1, 2]]).without(0);
        assert_eq!(c.cliques, vec![vec![0], vec![0, 1]]);
    }
}

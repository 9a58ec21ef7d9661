//! Chordal graphs and the clique-wise completion route.
//!
//! A partial matrix whose graph is chordal is d-completable exactly when each
//! maximal clique is d-embeddable. [`chordal_complete`] builds the completion
//! explicitly by placing vertices one at a time in maximum-cardinality-search
//! order: the already placed neighbours of each new vertex form a clique, so
//! its position is pinned by them up to the free orthogonal directions.

use alloc::vec;
use alloc::vec::Vec;

use crate::embed::{is_embeddable_on, EdmError, Realization};
use crate::graph::UnderlyingGraph;
use crate::linalg::{dot, norm};
use crate::matrix::{squared_distance, PartialMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChordalError {
    #[error("graph is not chordal; chordless cycle {cycle:?}")]
    NotChordal { cycle: Vec<usize> },
    #[error("supplied ordering is not a perfect elimination ordering")]
    BadOrdering,
    #[error("search exceeded its node budget")]
    BudgetExceeded,
    #[error("k = {k} exceeds the supported maximum {max}")]
    KTooLarge { k: usize, max: usize },
    #[error("separator alignment residual {residual} exceeds the bound")]
    InternalGlue { residual: f64 },
    #[error(transparent)]
    Edm(#[from] EdmError),
}

/// Perfect elimination ordering: `order[0]` is eliminated first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrdering {
    pub order: Vec<usize>,
}

impl EliminationOrdering {
    /// True if every vertex's later neighbours form a clique of `g`.
    pub fn is_perfect_for(&self, g: &UnderlyingGraph) -> bool {
        let n = g.order();
        if self.order.len() != n {
            return false;
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in self.order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return false;
            }
            pos[v] = i;
        }
        for &v in &self.order {
            let later: Vec<usize> = g.neighbors(v).filter(|&u| pos[u] > pos[v]).collect();
            if let Some(&parent) = later.iter().min_by_key(|&&u| pos[u]) {
                if !later.iter().all(|&u| u == parent || g.has_edge(u, parent)) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chordality {
    Chordal(EliminationOrdering),
    /// Chordless cycle of length at least four, in cyclic order.
    NotChordal(Vec<usize>),
}

/// Maximum cardinality search visit order, ties to the smallest index. Each
/// component is started at its smallest vertex.
pub fn mcs_order(g: &UnderlyingGraph) -> Vec<usize> {
    let n = g.order();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !done[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .unwrap();
        done[v] = true;
        out.push(v);
        for u in g.neighbors(v) {
            if !done[u] {
                weight[u] += 1;
            }
        }
    }
    out
}

/// Shortest chordless cycle of length at least four, if any. Found as a
/// vertex `b` with non-adjacent neighbours `a`, `c` joined by a shortest path
/// that avoids the rest of `N[b]`.
pub fn chordless_cycle(g: &UnderlyingGraph) -> Option<Vec<usize>> {
    let n = g.order();
    let mut best: Option<Vec<usize>> = None;
    for b in 0..n {
        let nb: Vec<usize> = g.neighbors(b).collect();
        let mut blocked = vec![false; n];
        blocked[b] = true;
        for &u in &nb {
            blocked[u] = true;
        }
        for (i, &a) in nb.iter().enumerate() {
            for &c in &nb[i + 1..] {
                if g.has_edge(a, c) {
                    continue;
                }
                blocked[a] = false;
                blocked[c] = false;
                if let Some(path) = g.shortest_path_avoiding(a, c, &blocked) {
                    if best.as_ref().is_none_or(|cyc| path.len() + 1 < cyc.len()) {
                        let mut cyc = vec![b];
                        cyc.extend(path);
                        best = Some(cyc);
                    }
                }
                blocked[a] = true;
                blocked[c] = true;
                if best.as_ref().is_some_and(|cyc| cyc.len() == 4) {
                    return best;
                }
            }
        }
    }
    best
}

/// Chordality test: MCS ordering checked as a perfect elimination ordering,
/// with a chordless cycle as the failure witness.
pub fn is_chordal(g: &UnderlyingGraph) -> Chordality {
    let mut order = mcs_order(g);
    order.reverse();
    let peo = EliminationOrdering { order };
    if peo.is_perfect_for(g) {
        Chordality::Chordal(peo)
    } else {
        Chordality::NotChordal(
            chordless_cycle(g).expect("graph without a perfect elimination ordering has a hole"),
        )
    }
}

/// Maximal cliques of a chordal graph from a perfect elimination ordering,
/// each sorted, the list sorted lexicographically.
pub fn maximal_cliques_chordal(
    g: &UnderlyingGraph,
    ordering: &EliminationOrdering,
) -> Result<Vec<Vec<usize>>, ChordalError> {
    if !ordering.is_perfect_for(g) {
        return Err(ChordalError::BadOrdering);
    }
    let n = g.order();
    let mut pos = vec![0; n];
    for (i, &v) in ordering.order.iter().enumerate() {
        pos[v] = i;
    }
    let mut cands: Vec<Vec<usize>> = ordering
        .order
        .iter()
        .map(|&v| {
            let mut c: Vec<usize> = g.neighbors(v).filter(|&u| pos[u] > pos[v]).collect();
            c.push(v);
            c.sort_unstable();
            c
        })
        .collect();
    cands.sort_by_key(|c| core::cmp::Reverse(c.len()));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for c in cands {
        if !out
            .iter()
            .any(|big| c.iter().all(|v| big.binary_search(v).is_ok()))
        {
            out.push(c);
        }
    }
    out.sort();
    Ok(out)
}

/// Added edges making a graph chordal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillIn {
    pub edges: Vec<(usize, usize)>,
}

pub const MAX_FILL_IN_K: usize = 8;

/// Minimum fill-in of size at most `kmax`, by iterative deepening over the
/// chords of a chordless cycle. A hole of length `L` needs at least `L − 3`
/// fill edges, which prunes the search.
pub fn min_fill_in(
    g: &UnderlyingGraph,
    kmax: usize,
    node_budget: u64,
) -> Result<Option<FillIn>, ChordalError> {
    if kmax > MAX_FILL_IN_K {
        return Err(ChordalError::KTooLarge {
            k: kmax,
            max: MAX_FILL_IN_K,
        });
    }
    let mut nodes = 0u64;
    for k in 0..=kmax {
        let mut work = g.clone();
        let mut added = Vec::new();
        if fill_dfs(&mut work, k, &mut added, &mut nodes, node_budget)? {
            added.sort_unstable();
            return Ok(Some(FillIn { edges: added }));
        }
    }
    Ok(None)
}

fn fill_dfs(
    g: &mut UnderlyingGraph,
    k: usize,
    added: &mut Vec<(usize, usize)>,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, ChordalError> {
    *nodes += 1;
    if *nodes > budget {
        return Err(ChordalError::BudgetExceeded);
    }
    let Some(cycle) = chordless_cycle(g) else {
        return Ok(true);
    };
    if cycle.len() - 3 > k {
        return Ok(false);
    }
    let l = cycle.len();
    for i in 0..l {
        for j in (i + 2)..l {
            if i == 0 && j == l - 1 {
                continue;
            }
            let (u, v) = (cycle[i].min(cycle[j]), cycle[i].max(cycle[j]));
            g.add_edge(u, v);
            added.push((u, v));
            if fill_dfs(g, k - 1, added, nodes, budget)? {
                return Ok(true);
            }
            added.pop();
            g.remove_edge(u, v);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueCheck {
    Yes,
    /// A maximal clique whose principal submatrix is not d-embeddable.
    No {
        clique: Vec<usize>,
    },
}

/// Decides a partial matrix with chordal graph: every maximal clique must be
/// d-embeddable.
pub fn chordal_edm_check(
    m: &PartialMatrix,
    d: usize,
    tol: &Tolerances,
) -> Result<CliqueCheck, ChordalError> {
    let g = m.graph();
    let peo = match is_chordal(&g) {
        Chordality::Chordal(p) => p,
        Chordality::NotChordal(cycle) => return Err(ChordalError::NotChordal { cycle }),
    };
    for c in maximal_cliques_chordal(&g, &peo)? {
        if !is_embeddable_on(m, &c, d, tol)? {
            return Ok(CliqueCheck::No { clique: c });
        }
    }
    Ok(CliqueCheck::Yes)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Completion {
    /// Complete matrix agreeing bit-for-bit with every specified input
    /// entry, and the points it was read from.
    Complete {
        matrix: PartialMatrix,
        realization: Realization,
    },
    No {
        clique: Vec<usize>,
    },
}

/// Explicit completion of a partial matrix with chordal graph.
///
/// Under-determined points take the new orthogonal direction pointing from
/// the centroid of the already placed points towards the separator's affine
/// hull (so the new point lands on the far side), falling back to the first
/// usable standard axis, always with positive sign. Components are realized
/// separately and shifted apart along the first axis by multiples of the sum
/// of their diameters.
pub fn chordal_complete(
    m: &PartialMatrix,
    d: usize,
    tol: &Tolerances,
) -> Result<Completion, ChordalError> {
    if let CliqueCheck::No { clique } = chordal_edm_check(m, d, tol)? {
        return Ok(Completion::No { clique });
    }
    let n = m.order();
    let g = m.graph();
    let order = mcs_order(&g);
    let scale = m.max_entry();
    let mut points: Vec<Option<Vec<f64>>> = vec![None; n];
    let comps = g.components();
    let mut comp_of = vec![0; n];
    for (ci, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = ci;
        }
    }
    for &v in &order {
        let placed: Vec<usize> = g.neighbors(v).filter(|&u| points[u].is_some()).collect();
        let mut sorted_placed = placed.clone();
        sorted_placed.sort_by_key(|&u| order.iter().position(|&x| x == u));
        let component_points: Vec<&Vec<f64>> = comps[comp_of[v]]
            .iter()
            .filter_map(|&u| points[u].as_ref())
            .collect();
        let p = place(
            m,
            v,
            &sorted_placed,
            &points,
            &component_points,
            d,
            scale,
            tol,
        )?;
        points[v] = Some(p);
    }
    let mut points: Vec<Vec<f64>> = points.into_iter().map(|p| p.unwrap()).collect();
    if d > 0 && comps.len() > 1 {
        let diam: f64 = comps
            .iter()
            .map(|c| {
                let mut r = 0.0f64;
                for (a, &u) in c.iter().enumerate() {
                    for &w in &c[a + 1..] {
                        r = r.max(squared_distance(&points[u], &points[w]));
                    }
                }
                libm::sqrt(r)
            })
            .sum();
        let step = if diam > 0.0 { diam } else { 1.0 };
        for (ci, c) in comps.iter().enumerate() {
            for &u in c {
                points[u][0] += ci as f64 * step;
            }
        }
    }
    let mut matrix = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            if !matrix.is_specified(i, j) {
                matrix.set(i, j, squared_distance(&points[i], &points[j]));
            }
        }
    }
    Ok(Completion::Complete {
        matrix,
        realization: Realization { dim: d, points },
    })
}

/// Position of `v` given the placed clique `sep` of its neighbours.
#[allow(clippy::too_many_arguments)]
fn place(
    m: &PartialMatrix,
    v: usize,
    sep: &[usize],
    points: &[Option<Vec<f64>>],
    component_points: &[&Vec<f64>],
    d: usize,
    scale: f64,
    tol: &Tolerances,
) -> Result<Vec<f64>, ChordalError> {
    let small = tol.eig_abs(scale);
    let Some(&anchor) = sep.first() else {
        return Ok(vec![0.0; d]);
    };
    let p0 = points[anchor].as_ref().unwrap();
    let mv0 = m.get(v, anchor).unwrap();
    // orthonormal frame of the separator's affine hull and, per frame vector,
    // the separator vertex that produced it
    let mut frame: Vec<Vec<f64>> = Vec::new();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for &s in &sep[1..] {
        let ps = points[s].as_ref().unwrap();
        let diff: Vec<f64> = ps.iter().zip(p0).map(|(a, b)| a - b).collect();
        let coords: Vec<f64> = frame.iter().map(|e| dot(e, &diff)).collect();
        let mut resid = diff.clone();
        for (e, c) in frame.iter().zip(&coords) {
            for (r, x) in resid.iter_mut().zip(e) {
                *r -= c * x;
            }
        }
        let rn = norm(&resid);
        if rn * rn > small {
            let rhs = (mv0 + dot(&diff, &diff) - m.get(v, s).unwrap()) / 2.0;
            let mut c = coords;
            c.push(rn);
            frame.push(resid.iter().map(|x| x / rn).collect());
            rows.push((c, rhs));
        }
    }
    // lower-triangular solve for the in-hull coordinates
    let mut alpha: Vec<f64> = Vec::with_capacity(rows.len());
    for (c, rhs) in &rows {
        let k = alpha.len();
        let partial: f64 = (0..k).map(|i| c[i] * alpha[i]).sum();
        alpha.push((rhs - partial) / c[k]);
    }
    let in_hull: f64 = alpha.iter().map(|a| a * a).sum();
    let beta2 = mv0 - in_hull;
    let mut p = p0.clone();
    for (a, e) in alpha.iter().zip(&frame) {
        for (x, y) in p.iter_mut().zip(e) {
            *x += a * y;
        }
    }
    if beta2 > small {
        let dir = free_direction(p0, &frame, component_points, d, small)
            .ok_or(ChordalError::InternalGlue { residual: beta2 })?;
        let beta = libm::sqrt(beta2);
        for (x, y) in p.iter_mut().zip(&dir) {
            *x += beta * y;
        }
    }
    let mut worst = 0.0f64;
    for &s in sep {
        let r =
            libm::fabs(squared_distance(&p, points[s].as_ref().unwrap()) - m.get(v, s).unwrap());
        worst = worst.max(r);
    }
    if worst > tol.real_abs(scale) {
        return Err(ChordalError::InternalGlue { residual: worst });
    }
    Ok(p)
}

/// Unit vector orthogonal to the hull `p0 + span(frame)`.
fn free_direction(
    p0: &[f64],
    frame: &[Vec<f64>],
    component_points: &[&Vec<f64>],
    d: usize,
    small: f64,
) -> Option<Vec<f64>> {
    let orth = |mut w: Vec<f64>| -> Vec<f64> {
        for e in frame {
            let c = dot(e, &w);
            for (x, y) in w.iter_mut().zip(e) {
                *x -= c * y;
            }
        }
        w
    };
    if !component_points.is_empty() {
        let k = component_points.len() as f64;
        let centroid: Vec<f64> = (0..d)
            .map(|i| component_points.iter().map(|p| p[i]).sum::<f64>() / k)
            .collect();
        // (projection of centroid onto hull) − centroid = −orth(centroid − p0)
        let rel: Vec<f64> = centroid.iter().zip(p0).map(|(c, a)| a - c).collect();
        let w = orth(rel);
        let wn = norm(&w);
        if wn * wn > small {
            return Some(w.iter().map(|x| x / wn).collect());
        }
    }
    for axis in 0..d {
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        let w = orth(e);
        let wn = norm(&w);
        if wn > 1e-6 {
            return Some(w.iter().map(|x| x / wn).collect());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> UnderlyingGraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        UnderlyingGraph::from_edges(n, &edges)
    }

    #[test]
    fn chordality_basics() {
        match is_chordal(&cycle(4)) {
            Chordality::NotChordal(c) => {
                assert_eq!(c.len(), 4);
                let mut s = c.clone();
                s.sort_unstable();
                assert_eq!(s, vec![0, 1, 2, 3]);
            }
            other => panic!("{:?}", other),
        }
        assert!(matches!(
            is_chordal(&UnderlyingGraph::complete(5)),
            Chordality::Chordal(_)
        ));
    }

    #[test]
    fn cliques_from_ordering() {
        let k4 = UnderlyingGraph::complete(4);
        let Chordality::Chordal(p) = is_chordal(&k4) else {
            panic!()
        };
        assert_eq!(
            maximal_cliques_chordal(&k4, &p).unwrap(),
            vec![vec![0, 1, 2, 3]]
        );
        let path = UnderlyingGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let Chordality::Chordal(p) = is_chordal(&path) else {
            panic!()
        };
        assert_eq!(
            maximal_cliques_chordal(&path, &p).unwrap(),
            vec![vec![0, 1], vec![1, 2]]
        );
        let bad = EliminationOrdering {
            order: vec![1, 0, 2],
        };
        assert_eq!(
            maximal_cliques_chordal(&path, &bad),
            Err(ChordalError::BadOrdering)
        );
    }

    #[test]
    fn fill_in_small() {
        assert_eq!(
            min_fill_in(&cycle(4), 3, 10_000)
                .unwrap()
                .unwrap()
                .edges
                .len(),
            1
        );
        assert_eq!(
            min_fill_in(&cycle(5), 3, 10_000)
                .unwrap()
                .unwrap()
                .edges
                .len(),
            2
        );
        assert_eq!(min_fill_in(&cycle(6), 2, 10_000).unwrap(), None);
        assert!(min_fill_in(&UnderlyingGraph::complete(4), 3, 10)
            .unwrap()
            .unwrap()
            .edges
            .is_empty());
    }

    #[test]
    fn path_completion_takes_far_side() {
        let mut m = PartialMatrix::unspecified(3);
        m.set(0, 1, 1.0);
        m.set(1, 2, 1.0);
        let Completion::Complete { matrix, .. } =
            chordal_complete(&m, 1, &Tolerances::default()).unwrap()
        else {
            panic!()
        };
        assert_eq!(matrix.get(0, 2), Some(4.0));
    }

    #[test]
    fn disconnected_components_are_separated() {
        let mut m = PartialMatrix::unspecified(4);
        m.set(0, 1, 1.0);
        m.set(2, 3, 1.0);
        let Completion::Complete {
            matrix,
            realization,
        } = chordal_complete(&m, 2, &Tolerances::default()).unwrap()
        else {
            panic!()
        };
        assert!(matrix.is_complete());
        assert!(realization.realizes(&matrix, &Tolerances::default()));
        assert_eq!(matrix.get(0, 2), Some(4.0));
    }
}

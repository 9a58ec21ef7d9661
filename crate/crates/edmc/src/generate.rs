//! Seeded instance generators. Every generator samples a planted point set,
//! so its output is a yes-instance, and records the points as metadata.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use edmc_core::chordal::{is_chordal, Chordality};
use edmc_core::compress::{detect_block_pattern, CliqueCover};
use edmc_core::{PartialMatrix, UnderlyingGraph};

use crate::format::{Instance, Metadata};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskModel {
    /// At most `Δ` unspecified entries per row.
    PerRowBudget(usize),
    /// No `t`-block pattern.
    BlockFree(usize),
    /// Chordal graph of specified entries.
    ChordalGraph,
    /// Specified entries are the union of `k` cliques.
    CliqueCover(usize),
    /// Specified entries are exactly these pairs (0-based).
    ExplicitGraph(Vec<(usize, usize)>),
}

impl MaskModel {
    pub fn label(&self) -> String {
        match self {
            MaskModel::PerRowBudget(k) => format!("perrow:{k}"),
            MaskModel::BlockFree(t) => format!("blockfree:{t}"),
            MaskModel::ChordalGraph => "chordal".into(),
            MaskModel::CliqueCover(k) => format!("cover:{k}"),
            MaskModel::ExplicitGraph(e) => format!("explicit:{}", e.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("mask cannot be generated: {0}")]
    InfeasibleMask(String),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points uniform in `[0, 1]^d`.
pub fn sample_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

fn shuffled_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(rng);
    pairs
}

/// Hidden pairs with at most `delta` per row, chosen greedily in random order.
fn per_row_mask(rng: &mut ChaCha8Rng, n: usize, delta: usize) -> UnderlyingGraph {
    let mut hidden = UnderlyingGraph::empty(n);
    for (u, v) in shuffled_pairs(rng, n) {
        if hidden.degree(u) < delta && hidden.degree(v) < delta {
            hidden.add_edge(u, v);
        }
    }
    hidden
}

/// Adding `(u, v)` to `h` would close a 4-cycle.
fn closes_four_cycle(h: &UnderlyingGraph, u: usize, v: usize) -> bool {
    h.neighbors(u)
        .filter(|&a| a != v)
        .any(|a| h.neighbors(v).any(|b| b != u && b != a && h.has_edge(a, b)))
}

/// Hidden-pair graph without `K_{t,t}`: 4-cycle-free for `t = 2`, maximum
/// degree `t − 1` otherwise.
fn block_free_mask(rng: &mut ChaCha8Rng, n: usize, t: usize) -> UnderlyingGraph {
    if t <= 1 {
        return UnderlyingGraph::empty(n);
    }
    if t > 2 {
        return per_row_mask(rng, n, t - 1);
    }
    let mut hidden = UnderlyingGraph::empty(n);
    for (u, v) in shuffled_pairs(rng, n) {
        if !closes_four_cycle(&hidden, u, v) {
            hidden.add_edge(u, v);
        }
    }
    hidden
}

/// Random chordal graph: each new vertex joins a random subset of an existing
/// clique, so its earlier neighbourhood is a clique. Labels are permuted.
pub fn random_chordal_graph(rng: &mut ChaCha8Rng, n: usize) -> UnderlyingGraph {
    let mut g = UnderlyingGraph::empty(n);
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let mut members = Vec::new();
        if !cliques.is_empty() && rng.random::<f64>() > 0.05 {
            let base = &cliques[rng.random_range(0..cliques.len())];
            members = base
                .iter()
                .copied()
                .filter(|_| rng.random::<f64>() < 0.7)
                .collect();
            if members.is_empty() {
                members.push(base[rng.random_range(0..base.len())]);
            }
        }
        for &u in &members {
            g.add_edge(u, v);
        }
        members.push(v);
        cliques.push(members);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out = UnderlyingGraph::empty(n);
    for (u, v) in g.edges() {
        out.add_edge(perm[u], perm[v]);
    }
    out
}

/// `k` random cliques whose union covers every vertex.
fn random_cover(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut cliques = vec![Vec::new(); k];
    for v in 0..n {
        let first = rng.random_range(0..k);
        cliques[first].push(v);
        if k > 1 && rng.random::<f64>() < 0.3 {
            let second = rng.random_range(0..k);
            if second != first {
                cliques[second].push(v);
            }
        }
    }
    for c in &mut cliques {
        c.sort_unstable();
    }
    cliques
}

/// Masked copy of a random point cloud; the mask's property is verified
/// before returning.
pub fn gen_masked_pointcloud(
    n: usize,
    d: usize,
    mask: &MaskModel,
    seed: u64,
) -> Result<Instance, GenError> {
    let mut rng = rng(seed);
    let points = sample_points(&mut rng, n, d);
    let full = PartialMatrix::from_points(&points);
    let mut cliques = Vec::new();
    let specified = match mask {
        MaskModel::PerRowBudget(delta) => per_row_mask(&mut rng, n, *delta).complement(),
        MaskModel::BlockFree(t) => {
            if *t == 0 {
                return Err(GenError::InfeasibleMask(
                    "block size must be positive".into(),
                ));
            }
            block_free_mask(&mut rng, n, *t).complement()
        }
        MaskModel::ChordalGraph => random_chordal_graph(&mut rng, n),
        MaskModel::CliqueCover(k) => {
            if *k == 0 && n > 0 {
                return Err(GenError::InfeasibleMask(
                    "a cover needs at least one clique".into(),
                ));
            }
            cliques = random_cover(&mut rng, n, *k);
            let mut g = UnderlyingGraph::empty(n);
            for c in &cliques {
                for (a, &u) in c.iter().enumerate() {
                    for &v in &c[a + 1..] {
                        g.add_edge(u, v);
                    }
                }
            }
            g
        }
        MaskModel::ExplicitGraph(edges) => {
            if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n || u == v) {
                return Err(GenError::InfeasibleMask(format!(
                    "edge ({u}, {v}) is not a pair of 0..{n}"
                )));
            }
            UnderlyingGraph::from_edges(n, edges)
        }
    };
    let mut m = full.clone();
    for (u, v) in specified.non_edges() {
        m.unset(u, v);
    }
    verify_mask(&m, mask, &cliques)?;
    let meta = Metadata {
        generator: Some(format!("masked n={n} d={d} mask={}", mask.label())),
        seed: Some(seed),
        points,
        cliques,
        extra: Vec::new(),
    };
    Ok(Instance { matrix: m, d, meta })
}

fn verify_mask(
    m: &PartialMatrix,
    mask: &MaskModel,
    cliques: &[Vec<usize>],
) -> Result<(), GenError> {
    let fail = |msg: String| Err(GenError::InfeasibleMask(msg));
    match mask {
        MaskModel::PerRowBudget(delta) => {
            if let Some(i) = (0..m.order()).find(|&i| m.unspecified_in_row(i) > *delta) {
                return fail(format!("row {i} exceeds the budget"));
            }
        }
        MaskModel::BlockFree(t) if *t <= 3 => match detect_block_pattern(m, *t, 50_000_000) {
            Ok(None) => {}
            Ok(Some(w)) => return fail(format!("block pattern {:?} x {:?}", w.rows, w.cols)),
            Err(e) => return fail(e.to_string()),
        },
        MaskModel::ChordalGraph => {
            if let Chordality::NotChordal(c) = is_chordal(&m.graph()) {
                return fail(format!("chordless cycle {c:?}"));
            }
        }
        MaskModel::CliqueCover(_) => {
            if let Err(e) = CliqueCover::new(cliques.to_vec()).validate(m) {
                return fail(e.to_string());
            }
        }
        _ => {}
    }
    Ok(())
}

/// Sets every pair inside `idx` to 1, planting a unit simplex: a clique that
/// needs `|idx| − 1` dimensions.
pub fn plant_unit_simplex(m: &mut PartialMatrix, idx: &[usize]) {
    for (a, &u) in idx.iter().enumerate() {
        for &v in &idx[a + 1..] {
            m.set(u, v, 1.0);
        }
    }
}

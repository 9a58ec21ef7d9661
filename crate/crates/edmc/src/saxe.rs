//! Reduction from weighted-graph embedding on the line to 2-dimensional
//! completion with few unspecified entries.
//!
//! Vertices of the weighted graph sit on a circle of radius `r = 16n⁴`
//! around a cluster of `s` coincident anchors. An edge of weight `w` becomes
//! a chord subtending `w·α` with `α = 2·arcsin(1/(2n))`; its squared length
//! `4r²·sin²(wα/2)` is an integer because `sin(α/2) = 1/(2n)`.

use edmc_core::{PartialMatrix, UnderlyingGraph};

use crate::format::{Instance, Metadata};

pub const MAX_SAXE_N: usize = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SaxeError {
    #[error("edge weight {0} is outside 1..=4")]
    WeightOutOfRange(u8),
    #[error("edge ({0}, {1}) is not a pair of distinct vertices")]
    BadEdge(usize, usize),
    #[error("weighted graph is not connected")]
    NotConnected,
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    BadEpsilon(f64),
    #[error("n = {n} exceeds the cap {max}")]
    TooLarge { n: usize, max: usize },
}

/// `16n⁴`.
pub fn radius(n: usize) -> u128 {
    16 * (n as u128).pow(4)
}

/// `4r²·sin²(wα/2)` in exact integer arithmetic, from the multiple-angle
/// expansions of `sin(wθ)` at `sin θ = 1/(2n)`.
pub fn chord_squared(n: usize, w: u8) -> Result<u128, SaxeError> {
    let n = n as u128;
    let n2 = n * n;
    Ok(match w {
        1 => 256 * n2 * n2 * n2,
        2 => 1024 * n2 * n2 * n2 - 256 * n2 * n2,
        3 => 256 * n2 * (3 * n2 - 1) * (3 * n2 - 1),
        4 => 256 * (4 * n2 - 1) * (2 * n2 - 1) * (2 * n2 - 1),
        _ => return Err(SaxeError::WeightOutOfRange(w)),
    })
}

/// The same chord in floating point, straight from the trigonometric form.
pub fn chord_squared_trig(n: usize, w: u8) -> f64 {
    let alpha = 2.0 * (1.0 / (2.0 * n as f64)).asin();
    let r = radius(n) as f64;
    let s = (w as f64 * alpha / 2.0).sin();
    4.0 * r * r * s * s
}

/// `⌈n²/(2ε)⌉`.
pub fn anchor_count(n: usize, eps: f64) -> usize {
    ((n * n) as f64 / (2.0 * eps)).ceil() as usize
}

/// Cycle weights used when none are given: all ones. A signed sum of `n`
/// ones vanishes only for even `n`, so odd cycles give no-instances.
pub fn default_cycle_weights(n: usize) -> Vec<u8> {
    vec![1; n]
}

/// Edges `(i, i+1 mod n)` carrying the given weights.
pub fn cycle_edges(weights: &[u8]) -> Vec<(usize, usize, u8)> {
    let n = weights.len();
    (0..n).map(|i| (i, (i + 1) % n, weights[i])).collect()
}

/// Builds the completion instance for a connected weighted graph on
/// `0..n` and returns it with `d = 2`. Indices `n..n+s` are the anchors.
pub fn gen_saxe(n: usize, edges: &[(usize, usize, u8)], eps: f64) -> Result<Instance, SaxeError> {
    if n > MAX_SAXE_N {
        return Err(SaxeError::TooLarge { n, max: MAX_SAXE_N });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SaxeError::BadEpsilon(eps));
    }
    let mut g = UnderlyingGraph::empty(n);
    for &(u, v, w) in edges {
        if u >= n || v >= n || u == v {
            return Err(SaxeError::BadEdge(u, v));
        }
        chord_squared(n, w)?;
        g.add_edge(u, v);
    }
    if n == 0 || g.components().len() != 1 {
        return Err(SaxeError::NotConnected);
    }
    let s = anchor_count(n, eps);
    let total = n + s;
    let r = radius(n);
    let mut m = PartialMatrix::unspecified(total);
    for &(u, v, w) in edges {
        m.set(u, v, chord_squared(n, w)? as f64);
    }
    for a in n..total {
        for b in (a + 1)..total {
            m.set(a, b, 0.0);
        }
        for v in 0..n {
            m.set(a, v, (r * r) as f64);
        }
    }
    let weights: Vec<String> = edges
        .iter()
        .map(|&(u, v, w)| format!("{u}-{v}:{w}"))
        .collect();
    let meta = Metadata {
        generator: Some(format!(
            "saxe n={n} eps={eps} anchors={s} edges={}",
            weights.join(",")
        )),
        ..Metadata::default()
    };
    Ok(Instance {
        matrix: m,
        d: 2,
        meta,
    })
}

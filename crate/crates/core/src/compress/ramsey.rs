use alloc::vec::Vec;

use super::CompressError;
use crate::graph::UnderlyingGraph;

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul(n - i) {
            Some(v) => acc = v / (i + 1),
            None => {
                // exact division keeps the intermediate integral; fall back to
                // a gcd split before giving up
                let g = gcd(acc, i + 1);
                let reduced = acc / g;
                let div = (i + 1) / g;
                match reduced.checked_mul((n - i) / div) {
                    Some(v) if (n - i).is_multiple_of(div) => acc = v,
                    _ => return u128::MAX,
                }
            }
        }
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Clique size `η(d, t) = (d+1)t + (t−1)(d+1)^{t+1} + 1` guaranteed to hold an
/// irrelevant vertex for t-block-free matrices.
pub fn eta(d: usize, t: usize) -> u128 {
    let base = d as u128 + 1;
    let t128 = t as u128;
    let pow = base.saturating_pow(t as u32 + 1);
    (base * t128)
        .saturating_add(t128.saturating_sub(1).saturating_mul(pow))
        .saturating_add(1)
}

/// Size gate `ρ(d, t) = C(2t + η − 2, 2t − 1)`.
pub fn rho(d: usize, t: usize) -> u128 {
    let e = eta(d, t);
    if e == u128::MAX {
        return u128::MAX;
    }
    binomial(2 * t as u128 + e - 2, 2 * t as u128 - 1)
}

/// Ramsey bound `R(a, b) ≤ C(a + b − 2, a − 1)`.
fn ramsey_bound(a: usize, b: usize) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    binomial((a + b - 2) as u128, (a - 1) as u128)
}

enum Found {
    Clique(Vec<usize>),
    Independent(Vec<usize>),
}

/// Independent set of `complement` of size `target`, found by the
/// constructive Ramsey recursion. `clique_bound` is the clique size the caller
/// guarantees is absent (`2t` for t-block-free inputs).
pub fn ramsey_independent_set(
    complement: &UnderlyingGraph,
    clique_bound: usize,
    target: usize,
) -> Result<Vec<usize>, CompressError> {
    let verts: Vec<usize> = (0..complement.order()).collect();
    let mut nodes = 0u64;
    match ramsey(complement, &verts, clique_bound, target, &mut nodes)? {
        Some(Found::Independent(mut s)) => {
            s.sort_unstable();
            Ok(s)
        }
        Some(Found::Clique(c)) => Err(CompressError::PreconditionViolated(alloc::format!(
            "complement graph contains a clique of size {} ({:?})",
            c.len(),
            c
        ))),
        None => Err(CompressError::TargetUnreachable),
    }
}

const RAMSEY_NODE_BUDGET: u64 = 1_000_000;

fn ramsey(
    g: &UnderlyingGraph,
    verts: &[usize],
    a: usize,
    b: usize,
    nodes: &mut u64,
) -> Result<Option<Found>, CompressError> {
    if b == 0 {
        return Ok(Some(Found::Independent(Vec::new())));
    }
    if a == 0 {
        return Ok(Some(Found::Clique(Vec::new())));
    }
    if verts.is_empty() {
        return Ok(None);
    }
    *nodes += 1;
    if *nodes > RAMSEY_NODE_BUDGET {
        return Err(CompressError::TargetUnreachable);
    }
    let v = verts[0];
    let (nb, nn): (Vec<usize>, Vec<usize>) = verts[1..].iter().partition(|&&u| g.has_edge(v, u));
    let indep_first =
        nn.len() as u128 >= ramsey_bound(a, b - 1) || (nb.len() as u128) < ramsey_bound(a - 1, b);
    for pass in 0..2 {
        let take_indep = (pass == 0) == indep_first;
        if take_indep {
            match ramsey(g, &nn, a, b - 1, nodes)? {
                Some(Found::Independent(mut s)) => {
                    s.push(v);
                    return Ok(Some(Found::Independent(s)));
                }
                Some(clique) => return Ok(Some(clique)),
                None => {}
            }
        } else {
            match ramsey(g, &nb, a - 1, b, nodes)? {
                Some(Found::Clique(mut c)) => {
                    c.push(v);
                    return Ok(Some(Found::Clique(c)));
                }
                Some(indep) => return Ok(Some(indep)),
                None => {}
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn parameter_formulas() {
        assert_eq!(eta(2, 2), 34);
        assert_eq!(rho(2, 2), 7140);
        assert_eq!(eta(1, 2), 13);
        assert_eq!(rho(1, 2), 455);
        assert_eq!(binomial(36, 3), 7140);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(rho(8, 30), u128::MAX);
    }

    #[test]
    fn edgeless_complement() {
        let g = UnderlyingGraph::empty(8);
        assert_eq!(
            ramsey_independent_set(&g, 4, 5).unwrap(),
            vec![0, 1, 2, 3, 4]
        );
    }

    #[test]
    fn perfect_matching() {
        let edges: Vec<(usize, usize)> = (0..5).map(|i| (2 * i, 2 * i + 1)).collect();
        let g = UnderlyingGraph::from_edges(10, &edges);
        let s = ramsey_independent_set(&g, 4, 5).unwrap();
        assert_eq!(s.len(), 5);
        for i in 0..5 {
            assert_eq!(s.iter().filter(|&&v| v / 2 == i).count(), 1);
        }
        assert_eq!(
            ramsey_independent_set(&g, 4, 6),
            Err(CompressError::TargetUnreachable)
        );
    }

    #[test]
    fn clique_signals_violation() {
        let g = UnderlyingGraph::complete(6);
        assert!(matches!(
            ramsey_independent_set(&g, 4, 3),
            Err(CompressError::PreconditionViolated(_))
        ));
    }
}

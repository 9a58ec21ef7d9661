use alloc::vec::Vec;

use super::CompressError;
use crate::embed::{is_embeddable_on, metric_basis_on};
use crate::matrix::PartialMatrix;
use crate::tolerance::Tolerances;

/// Which compression's argument is used to certify the removed vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// `t` disjoint bases plus the bases `Z_y` of every vertex with a
    /// non-neighbour in each of them.
    Ktt { t: usize },
    /// `Δ + 1` disjoint bases; every outside vertex must miss at most `Δ` of them.
    MaxDeg { delta: usize },
    /// `X` is one clique of the cover and the bases are taken over its
    /// intersections with every cover clique.
    Cover { cliques: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Irrelevant {
    /// Deleting this index preserves the answer.
    Vertex(usize),
    /// This clique of specified entries is not d-embeddable.
    Infeasible(Vec<usize>),
    /// Every vertex of the clique is used by some basis.
    None,
}

/// Looks for an index of the clique `x` whose deletion leaves an equivalent
/// instance. `x` must be fully specified in `m`.
pub fn find_irrelevant_in_clique(
    m: &PartialMatrix,
    x: &[usize],
    d: usize,
    schedule: &Schedule,
    tol: &Tolerances,
) -> Result<Irrelevant, CompressError> {
    let mut x = x.to_vec();
    x.sort_unstable();
    x.dedup();
    if !m.is_fully_specified_on(&x) {
        return Err(CompressError::PreconditionViolated(alloc::format!(
            "index set {:?} is not fully specified",
            x
        )));
    }
    if !is_embeddable_on(m, &x, d, tol)? {
        return Ok(Irrelevant::Infeasible(x));
    }
    let n = m.order();
    let outside: Vec<usize> = (0..n).filter(|v| x.binary_search(v).is_err()).collect();
    let neighbours_in_x = |v: usize| -> Vec<usize> {
        x.iter()
            .copied()
            .filter(|&u| m.is_specified(u, v))
            .collect()
    };

    let mut used: Vec<usize> = Vec::new();
    match schedule {
        Schedule::Ktt { .. } | Schedule::MaxDeg { .. } => {
            for &v in &outside {
                let mut c = neighbours_in_x(v);
                c.push(v);
                c.sort_unstable();
                if !is_embeddable_on(m, &c, d, tol)? {
                    return Ok(Irrelevant::Infeasible(c));
                }
            }
            let rounds = match schedule {
                Schedule::Ktt { t } => *t,
                Schedule::MaxDeg { delta } => delta + 1,
                Schedule::Cover { .. } => unreachable!(),
            };
            let bases = disjoint_bases(m, &x, rounds, tol)?;
            for b in &bases {
                used.extend_from_slice(b);
            }
            match schedule {
                Schedule::Ktt { .. } => {
                    for &y in &outside {
                        let misses_all = bases
                            .iter()
                            .all(|b| b.iter().any(|&u| !m.is_specified(u, y)));
                        if misses_all {
                            let k = neighbours_in_x(y);
                            used.extend(metric_basis_on(m, &k, tol)?.indices);
                        }
                    }
                }
                _ => {
                    for &v in &outside {
                        let covered = bases
                            .iter()
                            .any(|b| b.iter().all(|&u| m.is_specified(u, v)));
                        if !covered {
                            return Err(CompressError::PreconditionViolated(alloc::format!(
                                "index {} has a non-neighbour in every basis",
                                v
                            )));
                        }
                    }
                }
            }
        }
        Schedule::Cover { cliques } => {
            for c in cliques {
                let inter: Vec<usize> = c
                    .iter()
                    .copied()
                    .filter(|u| x.binary_search(u).is_ok())
                    .collect();
                if inter.is_empty() {
                    continue;
                }
                used.extend(metric_basis_on(m, &inter, tol)?.indices);
            }
        }
    }
    Ok(match x.iter().copied().find(|u| !used.contains(u)) {
        Some(w) => Irrelevant::Vertex(w),
        None => Irrelevant::None,
    })
}

/// `X_1, ..., X_rounds`: each a metric basis of what remains of `x` after
/// removing the earlier ones. Trailing bases may be empty.
fn disjoint_bases(
    m: &PartialMatrix,
    x: &[usize],
    rounds: usize,
    tol: &Tolerances,
) -> Result<Vec<Vec<usize>>, CompressError> {
    let mut rest = x.to_vec();
    let mut out = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let b = if rest.is_empty() {
            Vec::new()
        } else {
            metric_basis_on(m, &rest, tol)?.indices
        };
        rest.retain(|u| !b.contains(u));
        out.push(b);
    }
    Ok(out)
}

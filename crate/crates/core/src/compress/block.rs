use alloc::vec::Vec;

use super::CompressError;
use crate::matrix::PartialMatrix;

/// Disjoint row set and column set of equal size whose every cross entry is
/// unspecified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPatternWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl BlockPatternWitness {
    /// True if this really is a `t`-block pattern of `m`.
    pub fn is_valid_for(&self, m: &PartialMatrix) -> bool {
        self.rows.len() == self.cols.len()
            && self.rows.iter().all(|r| !self.cols.contains(r))
            && self
                .rows
                .iter()
                .all(|&r| self.cols.iter().all(|&c| !m.is_specified(r, c)))
    }
}

/// Exhaustive search for a `t`-block pattern. Rows are chosen in increasing
/// order and the candidate column set is the common unspecified set of the
/// chosen rows; branches die as soon as fewer than `t` candidates remain.
pub fn detect_block_pattern(
    m: &PartialMatrix,
    t: usize,
    node_budget: u64,
) -> Result<Option<BlockPatternWitness>, CompressError> {
    assert!(t >= 1, "block size must be positive");
    let n = m.order();
    let unspec: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| !m.is_specified(i, j)).collect())
        .collect();
    let eligible: Vec<usize> = (0..n).filter(|&i| unspec[i].len() >= t).collect();
    let all: Vec<usize> = (0..n).collect();
    let mut rows = Vec::with_capacity(t);
    let mut nodes = 0u64;
    let found = search(
        &unspec,
        &eligible,
        0,
        t,
        &all,
        &mut rows,
        &mut nodes,
        node_budget,
    )?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn search(
    unspec: &[Vec<usize>],
    eligible: &[usize],
    start: usize,
    t: usize,
    cand: &[usize],
    rows: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<BlockPatternWitness>, CompressError> {
    if rows.len() == t {
        return Ok(Some(BlockPatternWitness {
            rows: rows.clone(),
            cols: cand[..t].to_vec(),
        }));
    }
    for (pos, &r) in eligible.iter().enumerate().skip(start) {
        if eligible.len() - pos < t - rows.len() {
            break;
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(CompressError::BudgetExceeded);
        }
        let next: Vec<usize> = cand
            .iter()
            .copied()
            .filter(|&c| c != r && unspec[r].binary_search(&c).is_ok())
            .filter(|c| !rows.contains(c))
            .collect();
        if next.len() < t {
            continue;
        }
        rows.push(r);
        if let Some(w) = search(unspec, eligible, pos + 1, t, &next, rows, nodes, budget)? {
            return Ok(Some(w));
        }
        rows.pop();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn complete_matrices_have_no_block() {
        let m = PartialMatrix::from_points(&[vec![0.0], vec![1.0], vec![5.0]]);
        assert_eq!(detect_block_pattern(&m, 1, 1000).unwrap(), None);
    }

    #[test]
    fn single_hole_is_a_one_block() {
        let mut m = PartialMatrix::from_points(&[vec![0.0], vec![1.0], vec![5.0]]);
        m.unset(0, 2);
        let w = detect_block_pattern(&m, 1, 1000).unwrap().unwrap();
        assert!(w.is_valid_for(&m));
        assert_eq!(detect_block_pattern(&m, 2, 1000).unwrap(), None);
    }

    #[test]
    fn budget_is_enforced() {
        let m = PartialMatrix::unspecified(12);
        assert_eq!(
            detect_block_pattern(&m, 7, 5),
            Err(CompressError::BudgetExceeded)
        );
    }
}

//! Irrelevant-vertex compressions.
//!
//! Each compression repeatedly finds a fully specified clique `X`, proves
//! some `w ∈ X` irrelevant (deleting it cannot turn a no-instance into a
//! yes-instance) and deletes it, until the instance is below the size bound
//! for its parameter. Along the way a non-embeddable clique ends the run with
//! a certified no.

pub mod block;
pub mod cover;
pub mod irrelevant;
pub mod ramsey;

use alloc::string::String;
use alloc::vec::Vec;

use crate::embed::{is_embeddable_on, realize, EdmError, Realization};
use crate::matrix::PartialMatrix;
use crate::tolerance::Tolerances;

pub use block::{detect_block_pattern, BlockPatternWitness};
pub use cover::{edge_clique_cover_search, CliqueCover};
pub use irrelevant::{find_irrelevant_in_clique, Irrelevant, Schedule};
pub use ramsey::{binomial, eta, ramsey_independent_set, rho};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompressError {
    #[error("search exceeded its node budget")]
    BudgetExceeded,
    #[error("independent set of the requested size not found")]
    TargetUnreachable,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid clique cover: {0}")]
    InvalidCover(String),
    #[error("k = {k} exceeds the supported maximum {max}")]
    KTooLarge { k: usize, max: usize },
    #[error(transparent)]
    Edm(#[from] EdmError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Realization of the kept principal submatrix, which was fully specified.
    Yes(Realization),
    /// Original indices of a clique of specified entries that is not
    /// d-embeddable.
    No { clique: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompressOutcome {
    Solved {
        verdict: Verdict,
        kept: Vec<usize>,
        removed: Vec<usize>,
    },
    /// `instance` is the principal submatrix on `kept` (original indices,
    /// ascending); `removed` lists deletions in the order they happened.
    Reduced {
        instance: PartialMatrix,
        kept: Vec<usize>,
        removed: Vec<usize>,
    },
}

impl CompressOutcome {
    pub fn removed(&self) -> &[usize] {
        match self {
            CompressOutcome::Solved { removed, .. } | CompressOutcome::Reduced { removed, .. } => {
                removed
            }
        }
    }

    pub fn kept(&self) -> &[usize] {
        match self {
            CompressOutcome::Solved { kept, .. } | CompressOutcome::Reduced { kept, .. } => kept,
        }
    }
}

/// Order-preserving bookkeeping between the shrinking matrix and the input.
struct Shrinking {
    m: PartialMatrix,
    kept: Vec<usize>,
    removed: Vec<usize>,
}

impl Shrinking {
    fn new(m: &PartialMatrix) -> Self {
        Shrinking {
            m: m.clone(),
            kept: (0..m.order()).collect(),
            removed: Vec::new(),
        }
    }

    fn delete(&mut self, w: usize) {
        self.m = self.m.without(w);
        self.removed.push(self.kept.remove(w));
    }

    fn original(&self, local: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = local.iter().map(|&v| self.kept[v]).collect();
        out.sort_unstable();
        out
    }

    fn no(self, local_clique: &[usize]) -> CompressOutcome {
        let clique = self.original(local_clique);
        CompressOutcome::Solved {
            verdict: Verdict::No { clique },
            kept: self.kept,
            removed: self.removed,
        }
    }

    fn reduced(self) -> CompressOutcome {
        CompressOutcome::Reduced {
            instance: self.m,
            kept: self.kept,
            removed: self.removed,
        }
    }

    /// Decides a fully specified current matrix.
    fn solve_complete(self, d: usize, tol: &Tolerances) -> Result<CompressOutcome, CompressError> {
        match realize(&self.m, d, tol) {
            Ok(r) => Ok(CompressOutcome::Solved {
                verdict: Verdict::Yes(r),
                kept: self.kept,
                removed: self.removed,
            }),
            Err(EdmError::NotEmbeddable(_)) | Err(EdmError::NotEdm) => {
                let all: Vec<usize> = (0..self.m.order()).collect();
                Ok(self.no(&all))
            }
            Err(e) => Err(e.into()),
        }
    }
}

fn to_usize_saturating(v: u128) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

/// Compression for matrices excluding a `t`-block pattern. Output order is
/// below `ρ(d, t)`.
pub fn compress_ktt(
    m: &PartialMatrix,
    d: usize,
    t: usize,
    tol: &Tolerances,
) -> Result<CompressOutcome, CompressError> {
    if t == 0 {
        return Err(CompressError::PreconditionViolated(
            "t must be positive".into(),
        ));
    }
    let gate = rho(d, t);
    let target = to_usize_saturating(eta(d, t));
    let mut s = Shrinking::new(m);
    loop {
        if s.m.is_complete() {
            return s.solve_complete(d, tol);
        }
        if (s.m.order() as u128) < gate {
            return Ok(s.reduced());
        }
        let x = ramsey_independent_set(&s.m.graph().complement(), 2 * t, target)?;
        match find_irrelevant_in_clique(&s.m, &x, d, &Schedule::Ktt { t }, tol)? {
            Irrelevant::Vertex(w) => s.delete(w),
            Irrelevant::Infeasible(c) => return Ok(s.no(&c)),
            Irrelevant::None => {
                return Err(CompressError::PreconditionViolated(
                    "clique of the guaranteed size has no irrelevant vertex".into(),
                ))
            }
        }
    }
}

/// Smallest-index greedy independent set of the complement graph of `m`,
/// i.e. a clique of specified entries, stopped at `target`.
fn greedy_clique(m: &PartialMatrix, target: usize) -> Vec<usize> {
    let mut x: Vec<usize> = Vec::with_capacity(target);
    for v in 0..m.order() {
        if x.len() == target {
            break;
        }
        if x.iter().all(|&u| m.is_specified(u, v)) {
            x.push(v);
        }
    }
    x
}

/// Compression for matrices with at most `delta` unspecified entries per row.
/// Output order is at most `(d+1)(Δ+1)²`.
pub fn compress_maxdeg(
    m: &PartialMatrix,
    d: usize,
    delta: usize,
    tol: &Tolerances,
) -> Result<CompressOutcome, CompressError> {
    for i in 0..m.order() {
        let miss = m.unspecified_in_row(i);
        if miss > delta {
            return Err(CompressError::PreconditionViolated(alloc::format!(
                "row {} has {} unspecified entries, more than {}",
                i,
                miss,
                delta
            )));
        }
    }
    let bound = (d + 1) * (delta + 1) * (delta + 1);
    let target = (d + 1) * (delta + 1) + 1;
    let mut s = Shrinking::new(m);
    loop {
        if s.m.is_complete() {
            return s.solve_complete(d, tol);
        }
        if s.m.order() <= bound {
            return Ok(s.reduced());
        }
        let x = greedy_clique(&s.m, target);
        if x.len() < target {
            return Err(CompressError::TargetUnreachable);
        }
        match find_irrelevant_in_clique(&s.m, &x, d, &Schedule::MaxDeg { delta }, tol)? {
            Irrelevant::Vertex(w) => s.delete(w),
            Irrelevant::Infeasible(c) => return Ok(s.no(&c)),
            Irrelevant::None => {
                return Err(CompressError::PreconditionViolated(
                    "greedy clique has no irrelevant vertex".into(),
                ))
            }
        }
    }
}

/// Compression given an edge clique cover with `k` cliques. Output order is
/// at most `(d+1)k²`.
pub fn compress_cliquecover(
    m: &PartialMatrix,
    d: usize,
    cover: &CliqueCover,
    tol: &Tolerances,
) -> Result<CompressOutcome, CompressError> {
    cover.validate(m)?;
    let k = cover.len();
    let bound = (d + 1) * k * k;
    let mut s = Shrinking::new(m);
    let mut cover = cover.clone();
    if s.m.is_complete() {
        return s.solve_complete(d, tol);
    }
    for c in &cover.cliques {
        if !is_embeddable_on(&s.m, c, d, tol)? {
            let c = c.clone();
            return Ok(s.no(&c));
        }
    }
    loop {
        // isolated vertices can be placed anywhere
        while let Some(w) = (0..s.m.order()).find(|&v| s.m.unspecified_in_row(v) + 1 == s.m.order())
        {
            if s.m.order() <= 1 {
                break;
            }
            s.delete(w);
            cover = cover.without(w);
        }
        if s.m.is_complete() {
            return s.solve_complete(d, tol);
        }
        if s.m.order() <= bound {
            return Ok(s.reduced());
        }
        let big = cover.cliques.iter().find(|c| c.len() > (d + 1) * k);
        let Some(x) = big.cloned() else {
            return Err(CompressError::InvalidCover(
                "no clique exceeds the size forced by the vertex count".into(),
            ));
        };
        let schedule = Schedule::Cover {
            cliques: cover.cliques.clone(),
        };
        match find_irrelevant_in_clique(&s.m, &x, d, &schedule, tol)? {
            Irrelevant::Vertex(w) => {
                s.delete(w);
                cover = cover.without(w);
            }
            Irrelevant::Infeasible(c) => return Ok(s.no(&c)),
            Irrelevant::None => {
                return Err(CompressError::PreconditionViolated(
                    "large cover clique has no irrelevant vertex".into(),
                ))
            }
        }
    }
}

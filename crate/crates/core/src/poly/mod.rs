//! Augmented Cayley-Menger polynomials and the existential formulas built
//! from them.
//!
//! Unspecified entries become nonnegative indeterminates. A formula states
//! that some index set is a metric basis of the completed matrix (or of each
//! clique of a chordal supergraph); [`backend::decide_exists`] searches for a
//! satisfying assignment.

pub mod backend;
pub mod formula;
pub mod polynomial;
pub mod solve;

use alloc::vec::Vec;

use crate::chordal::ChordalError;
use crate::embed::EdmError;

pub use backend::{decide_exists, BackendOptions, Decision};
pub use formula::{
    build_augmented_cm, build_basis_guess_formula, build_fillin_formula, Atom, Formula,
    Indeterminates, Problem, Relation,
};
pub use polynomial::{Interval, Polynomial};
pub use solve::{solve_exact, solve_fillin, NoCertificate, SolveOptions, SolveOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("pair ({i}, {j}) is neither specified nor a variable")]
    UnhousedPair { i: usize, j: usize },
    #[error("fill edge ({i}, {j}) is already specified")]
    FillOnSpecified { i: usize, j: usize },
    #[error("graph plus fill edges is not chordal; chordless cycle {cycle:?}")]
    NotChordal { cycle: Vec<usize> },
    #[error("minimum fill-in exceeds {kmax}")]
    FillInTooLarge { kmax: usize },
    #[error("search exceeded its node budget")]
    BudgetExceeded,
    #[error(transparent)]
    Chordal(#[from] ChordalError),
    #[error(transparent)]
    Edm(#[from] EdmError),
}

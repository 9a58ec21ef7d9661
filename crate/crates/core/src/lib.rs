//! Exact-style decision machinery for Euclidean distance matrix completion.
//!
//! A partial matrix of squared distances is *d-completable* when its missing
//! entries can be filled so that the result is the distance matrix of points
//! in `R^d`. This crate carries the pieces needed to decide that question:
//!
//! * [`embed`]: Cayley-Menger determinants, embeddability, realizations and
//!   metric bases of complete matrices.
//! * [`compress`]: irrelevant-vertex compressions that shrink an instance to
//!   parameter-bounded size.
//! * [`chordal`]: chordality, fill-in, and the clique-wise completion route.
//! * [`poly`]: augmented Cayley-Menger polynomials, existential formulas and
//!   a numerical existential backend.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chordal;
pub mod compress;
pub mod embed;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod tolerance;

pub use embed::{EdmError, MetricBasis, NotEmbeddable, Realization};
pub use graph::UnderlyingGraph;
pub use matrix::{MatrixError, PartialMatrix};
pub use tolerance::Tolerances;

#![forbid(unsafe_code)]
//! Calculus for non-linear spectral gaps.
//!
//! This crate implements, at desk scale, a toolkit for reasoning about
//! spectral gaps of regular multigraphs with respect to *non-linear*
//! (kernel-valued) Poincaré inequalities:
//!
//! * [`multigraph`] — regular multigraphs with loops and parallel edges,
//!   stored as involutive rotation maps, plus exact-rational normalized
//!   adjacency matrices.
//! * [`graph_ops`] — zigzag and replacement products, tensor products,
//!   graph powers, Cesàro averages, edge completion, cycles with loops,
//!   and matrix doubling.
//! * [`spectral`] — a dense symmetric eigensolver and the classical
//!   (Euclidean) gap quantities λ₂, λ, γ, γ₊.
//! * [`poincare`] — exact and heuristic Poincaré constants γ(A,K), γ₊(A,K)
//!   for arbitrary finite kernels, Fréchet-embedding lower bounds, and
//!   coarse embedding obstructions.
//! * [`cotype`] — metric Markov cotype checks: Cesàro points, martingale
//!   decompositions of Markov chains, and the associated decay estimates.
//! * [`hypercube`] — Fourier–Walsh analysis on {0,1}^n: transforms,
//!   Laplacian, heat semigroup, tail projections.
//! * [`codes`] — binary linear codes: duals, minimum distance, random
//!   good codes, cosets.
//! * [`basegraph`] — heat-semigroup Cayley graphs on the hypercube,
//!   truncation to bounded degree, and quotients by code duals.
//! * [`construction`] — iterative expander pipelines: the classical
//!   zigzag iteration, the Cesàro-average variant, diagonalization
//!   across families, and the degree-9 finishing step.
//! * [`suites`] — pinned-seed verification sweeps over all of the above.
//! * [`cli`] — the `nlsg` command-line front end.
//!
//! Floating point enters only through eigensolving and kernel evaluation;
//! all graph and adjacency bookkeeping is exact.

pub mod basegraph;
pub mod cli;
pub mod codes;
pub mod construction;
pub mod cotype;
pub mod error;
pub mod extreal;
pub mod graph_ops;
pub mod hypercube;
pub mod matrix;
pub mod multigraph;
pub mod poincare;
pub mod rng;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use matrix::{FloatMatrix, StochasticMatrix};
pub use multigraph::Multigraph;

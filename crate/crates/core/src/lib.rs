//! Deterministic partial Fourier compressed-sensing matrices built from
//! discrete logarithms in finite fields.
//!
//! Rows of the N-point Fourier matrix are selected by
//! `M = {log_g(t − α) : t ∈ GF(q)}` for a primitive root `g` of GF(q^n) and an
//! `α` generating GF(q^n) over GF(q). The modules cover field arithmetic,
//! baby-step/giant-step logarithms, the index constructions, character-sum
//! certification, coherence computation, sparse recovery (OMP and basis
//! pursuit) and Gram eigenvalue statistics.

pub mod charsum;
pub mod dlog;
pub mod error;
pub mod field;
pub mod index;
pub mod matrix;
pub mod record;
pub mod recovery;
pub mod seed;
pub mod spectral;

pub use error::{Error, Result};

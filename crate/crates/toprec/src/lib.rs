//! Exact-arithmetic engine for the topological recursion on genus-zero
//! spectral curves.
//!
//! Given a rational (or log-type) spectral curve `(x(z), y(z))` on the
//! Riemann sphere, the engine computes the correlator forms `ω_n^(g)` by
//! residue recursion at the branchpoints, the symplectic invariants `F_g`,
//! and the enumerative data they generate: map counts, intersection
//! numbers, Weil-Petersson volume polynomials and kernel corrections.
//! All arithmetic is exact — rationals, rational functions in one formal
//! parameter, or polynomials in a formal symbol standing for π².
//!
//! The crate is organised around the pipeline:
//!
//! * [`field`] — coefficient fields (ℚ, ℚ(u), ℚ\[p\]) and dense polynomials,
//! * [`ratfunc`] — univariate rational functions of the uniformizer,
//! * [`series`] — truncated Laurent series with tracked validity windows,
//! * [`curve`] — spectral-curve validation and per-branchpoint local data,
//! * [`forms`] — the pole-basis representation of correlators,
//! * [`engine`] — the residue recursion, free energies and loop equations,
//! * [`diagrams`] — the trivalent-graph evaluator used as a cross-oracle,
//! * [`catalog`] — constructors for the application curves,
//! * [`suites`] — the built-in verification suites driven by `toprec verify`.
//!
//! The sign convention implemented here takes `ω_1^(0) = -y dx` and the
//! recursion kernel with the -1/2 prefactor. Printed tables of
//! intersection-number correlators often use the opposite y-orientation;
//! those differ by `(-1)^n` per form (`F_g` is unaffected). The CLI and the
//! comparison helpers expose both conventions.

pub mod catalog;
pub mod cli;
pub mod curve;
pub mod diagrams;
pub mod engine;
pub mod error;
pub mod field;
pub mod forms;
pub mod ratfunc;
pub mod series;
pub mod suites;

pub use error::{Error, Result};
pub use field::{FieldElem, FieldTag, Rational};

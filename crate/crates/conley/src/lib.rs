//! Conley complexes and connection matrices of poset-graded chain complexes
//! over prime fields.
//!
//! Given a chain complex whose generators are graded by a finite poset and
//! whose differential respects that grading, this crate computes the minimal
//! strict chain-homotopy-equivalent complex (the Conley complex), together
//! with a matrix representation of its differential (the connection matrix),
//! by clearing-optimised column reduction. An independent verification path
//! rebuilds the same answer through a homological-perturbation contraction
//! and a zigzag-path formula, and checks the contraction identities exactly.
//!
//! The pipeline is a pure function of its input: the generator order, the
//! reduction schedule, and all output bytes are deterministic, including
//! under per-grade parallel reduction.

pub mod bench;
pub mod complex;
pub mod connect;
pub mod dense;
pub mod field;
pub mod io;
pub mod oracle;
pub mod poset;
pub mod reduction;

pub use complex::{Generator, GradedComplex, SparseColumn, ValidationReport, Violation};
pub use connect::{compute_connection_matrix, ConleyComplex, PipelineOptions};
pub use dense::DenseMatrix;
pub use field::{FieldElement, PrimeField};
pub use poset::Poset;
pub use reduction::{clearing_reduce, ReduceOptions, ReducedState, SeparatingBasis};

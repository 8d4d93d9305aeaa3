//! Desk-scale numerical gauge theory.
//!
//! The crate computes, at small sizes and full floating-point rigor, the
//! standard objects of gauge theory: discrete connections on lattice tori
//! and their curvature, Chern numbers, the Chern–Simons functional on S³,
//! holonomy and representation varieties, magnetic Dirac spectra and index
//! counts, the Seiberg–Witten map with its deformation complex, and the
//! Brouwer degree of proper maps.
//!
//! Data-parallel sums use rayon when the default `parallel` feature is
//! enabled and fall back to sequential loops without it; either way every
//! reduction is chunk-ordered, so results are bit-identical across worker
//! counts.

pub mod chern;
pub mod cs;
pub mod degree;
pub mod dirac;
pub mod field;
pub mod flow;
pub mod group;
pub mod holonomy;
pub mod lattice;
pub mod par;
pub mod sw;

pub use field::{GaugeTransform, LinkField};
pub use group::{GaugeGroup, GroupTag, Su2, Su2Alg, U1};
pub use lattice::{LatticePath, TorusLattice};

//! Exact symbolic workbench for the structure equations of rank-2 Bäcklund
//! transformations between hyperbolic Monge-Ampère systems.
//!
//! The crate is layered bottom-up:
//!
//! * [`coeff_ring`]: rational functions over arbitrary-precision rationals;
//! * [`exterior`]: graded exterior algebra with opaque 2-form symbols;
//! * [`structure`]: structure models, the exterior derivative and the
//!   builtin model catalog;
//! * [`invariants`]: the h-matrix, cohomogeneity classification and the
//!   Type B constraint pipeline;
//! * [`numerics`]: Lambert W, PDE residuals and finite-difference checks;
//! * [`dsl`]: the `.eds` model-file language;
//! * [`cli`]: the `eds` command-line front end.

pub mod coeff_ring;
pub mod linalg;
pub mod exterior;
pub mod structure;
pub mod invariants;
pub mod numerics;
pub mod dsl;
pub mod report;
pub mod cli;

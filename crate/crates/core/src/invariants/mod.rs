//! The h-matrix of the Type A1 model, its minors and the cohomogeneity
//! classification, the discrete symmetry, and the Type B1 constraint
//! pipeline.

mod classify;
mod hmatrix;
mod rank2;
mod symmetry;
mod typeb;

pub use classify::{classify, Branch, ClassificationInput, ClassificationResult};
pub use hmatrix::{
    chi, chi_at, column_minor, h_matrix, minor_det, minor_identities, verify_minor_identities,
    HMatrix, MinorIdentity, COLUMNS, H_NAMES,
};
pub use rank2::{rank2_locus_check, Rank2Report, Witness, WitnessMinor};
pub use typeb::{
    dphi_recipe, dvarpi_recipe, orbit_criterion, pair_difference, plain_recipes, reduced_identity,
    typeb_extract, ConstraintSet, Equation, Isolation, OrbitReport, PairResult, Recipe, Shear,
    TypeBPipeline, DPHI_RELATIONS, ORBIT_FUNCTIONS, RELATION_BLOCK,
};
pub use symmetry::{symmetry_coframing, symmetry_point, verify_discrete_symmetry};

use crate::coeff_ring::CoeffError;
use crate::exterior::FormError;
use crate::linalg::LinalgError;
use crate::structure::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("no entry h[{row}][{col}]")]
    Index { row: usize, col: usize },
    #[error("{0}")]
    Size(String),
    #[error("{0}")]
    NotTypeA(String),
    #[error("invalid input: {0}")]
    Input(String),
}

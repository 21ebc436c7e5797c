//! Graded exterior algebra over an ordered basis of named 1-forms.

mod basis;
mod form;

pub use basis::Basis;
pub use form::{Form, Isolated, MultiIndex};

use crate::coeff_ring::CoeffError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("forms live over different bases")]
    BasisMismatch,
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("unknown basis name `{0}`")]
    UnknownName(String),
    #[error("duplicate basis name `{0}`")]
    DuplicateName(String),
    #[error("wedge of two opaque 2-forms is not supported")]
    OpaqueProduct,
    #[error("change of basis is not invertible: {0}")]
    NotInvertible(String),
    #[error("opaque `{opaque}` occurs with a companion other than `{partner}`")]
    WrongPartner { opaque: String, partner: String },
    #[error("opaque term `{0}` survives the reduction")]
    SurvivingOpaque(String),
}

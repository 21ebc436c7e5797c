//! Structure models: coframings with exterior-derivative rules, the `d`
//! operator, closure verification, sub-models, charts and the builtin
//! catalog.

mod catalog;
mod chart;
mod coframing;
mod model;

pub use catalog::{
    builtin, builtin_names, builtin_source, chart_coframing, sigma_coframing, tau_coframing,
    verify_goursat_identities, Builtin,
};
pub use chart::ChartModel;
pub use coframing::{verify_derived_coframing, Coframing};
pub use model::{
    Constraint, Differential, FunctionSymbol, ParamDecl, Relation, StructureModel,
};

use crate::coeff_ring::CoeffError;
use crate::exterior::FormError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("`{0}` has no declared differential")]
    UndeclaredSymbol(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("no d-rule for `{0}`")]
    MissingRule(String),
    #[error("duplicate rule for `{0}`")]
    DuplicateRule(String),
    #[error("rule for `{name}` has degree {found}, expected {expected}")]
    WrongDegree {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is a free function symbol; its second derivative is not determined")]
    FreeSymbol(String),
    #[error("inconsistent binding for `{symbol}`: residual {residual}")]
    Inconsistent { symbol: String, residual: String },
    #[error("constraint {0} is violated")]
    ConstraintViolated(String),
    #[error("definitions are not invertible: {0}")]
    NotInvertible(String),
    #[error("{0}")]
    Invalid(String),
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{w_factor, NumericError};

/// A point (x, y) with the derivatives p = z_x, q = z_y and z_xy of a
/// candidate solution. `residual` is filled in by [`evaluate_batch`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub q: f64,
    pub zxy: f64,
    #[serde(default)]
    pub residual: f64,
}

impl ResidualSample {
    pub fn new(x: f64, y: f64, p: f64, q: f64, zxy: f64) -> ResidualSample {
        ResidualSample { x, y, p, q, zxy, residual: 0.0 }
    }

    /// The sample with the roles of x and y exchanged.
    pub fn swapped(&self) -> ResidualSample {
        ResidualSample { x: self.y, y: self.x, p: self.q, q: self.p, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    /// (x+y) z_xy + 2 sqrt(z_x z_y) = 0
    Goursat,
    /// (x+y) z_xy − 𝒲(z_x, z_y) = 0
    Lambertw,
}

/// (x+y)·z_xy + 2√(pq); needs pq ≥ 0.
pub fn residual_goursat(s: &ResidualSample) -> Result<f64, NumericError> {
    let pq = s.p * s.q;
    if pq.is_nan() || pq < 0.0 {
        return Err(NumericError::Domain(format!("Goursat residual needs pq >= 0, got {pq}")));
    }
    Ok((s.x + s.y) * s.zxy + 2.0 * pq.sqrt())
}

/// (x+y)·z_xy − 𝒲(p, q); needs q ≤ −1.
pub fn residual_lambertw(s: &ResidualSample) -> Result<f64, NumericError> {
    Ok((s.x + s.y) * s.zxy - w_factor(s.p, s.q)?)
}

pub fn residual(eq: Equation, s: &ResidualSample) -> Result<f64, NumericError> {
    match eq {
        Equation::Goursat => residual_goursat(s),
        Equation::Lambertw => residual_lambertw(s),
    }
}

/// Evaluates a batch concurrently, keeping input order. Any domain error
/// fails the whole batch.
pub fn evaluate_batch(
    eq: Equation,
    samples: &[ResidualSample],
) -> Result<Vec<ResidualSample>, NumericError> {
    samples
        .par_iter()
        .map(|s| residual(eq, s).map(|r| ResidualSample { residual: r, ..*s }))
        .collect()
}

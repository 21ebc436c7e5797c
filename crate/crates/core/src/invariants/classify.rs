use serde::Serialize;

use crate::coeff_ring::{render_rational, Rational};

use super::{chi_at, InvariantError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationInput {
    pub eps: i64,
    pub h: [Rational; 4],
}

/// Which condition decided the cohomogeneity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// H₂ = 1 and H₃ = −1.
    ChiOneLocus,
    /// H₂ = ε(H₁)² and H₄ = −ε.
    ChiTwoLocus,
    /// χ₃ = 0 off the two loci above.
    ChiThreeZero,
    Generic,
}

impl Branch {
    pub fn cohomogeneity(self) -> u8 {
        match self {
            Branch::ChiOneLocus | Branch::ChiTwoLocus => 2,
            Branch::ChiThreeZero => 3,
            Branch::Generic => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub cohomogeneity: u8,
    pub branch: Branch,
}

impl ClassificationInput {
    pub fn new(eps: i64, h: [Rational; 4]) -> ClassificationInput {
        ClassificationInput { eps, h }
    }

    /// Rejects points outside h₁ > 0, (h₁)² ≠ ε, h₂ ≠ 0.
    pub fn validate(&self) -> Result<(), InvariantError> {
        if self.eps != 1 && self.eps != -1 {
            return Err(InvariantError::Input(format!("eps must be 1 or -1, got {}", self.eps)));
        }
        let [h1, h2, _, _] = &self.h;
        let e = Rational::from_integer(self.eps.into());
        let zero = Rational::from_integer(0.into());
        if *h1 <= zero {
            return Err(InvariantError::Input(format!(
                "H1 > 0 is violated (H1 = {})",
                render_rational(h1)
            )));
        }
        if h1 * h1 == e {
            return Err(InvariantError::Input(format!(
                "H1^2 != eps is violated (H1^2 = eps = {})",
                self.eps
            )));
        }
        if *h2 == zero {
            return Err(InvariantError::Input("H2 != 0 is violated".to_string()));
        }
        Ok(())
    }
}

/// Cohomogeneity of the point, decided exactly.
pub fn classify(input: &ClassificationInput) -> Result<ClassificationResult, InvariantError> {
    input.validate()?;
    let [h1, h2, h3, h4] = &input.h;
    let e = Rational::from_integer(input.eps.into());
    let one = Rational::from_integer(1.into());
    let branch = if *h2 == one && *h3 == -one.clone() {
        Branch::ChiOneLocus
    } else if *h2 == &e * h1 * h1 && *h4 == -e.clone() {
        Branch::ChiTwoLocus
    } else if chi_at(input.eps, &input.h)[2] == Rational::from_integer(0.into()) {
        Branch::ChiThreeZero
    } else {
        Branch::Generic
    };
    Ok(ClassificationResult {
        cohomogeneity: branch.cohomogeneity(),
        branch,
    })
}

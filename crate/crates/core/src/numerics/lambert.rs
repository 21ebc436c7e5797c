use serde::{Deserialize, Serialize};

use super::NumericError;

const INV_E: f64 = 1.0 / std::f64::consts::E;
const MAX_ITER: usize = 50;

/// One of the two real branches of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchId {
    /// W₀, with W ≥ −1.
    Principal,
    /// W₋₁, with W ≤ −1.
    Lower,
}

impl BranchId {
    pub fn value(self) -> i8 {
        match self {
            BranchId::Principal => 0,
            BranchId::Lower => -1,
        }
    }
}

impl TryFrom<i64> for BranchId {
    type Error = NumericError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        match v {
            0 => Ok(BranchId::Principal),
            -1 => Ok(BranchId::Lower),
            _ => Err(NumericError::Domain(format!("no real Lambert W branch {v}"))),
        }
    }
}

impl std::str::FromStr for BranchId {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: i64 = s
            .trim()
            .parse()
            .map_err(|_| NumericError::Domain(format!("bad branch `{s}`")))?;
        BranchId::try_from(v)
    }
}

// Points within a few ulps below -1/e are taken as the branch point itself.
fn near_branch_point(x: f64) -> bool {
    (x + INV_E).abs() <= 4.0 * f64::EPSILON * INV_E
}

/// Series in p = ±sqrt(2(ex + 1)) about the branch point.
fn branch_series(p: f64) -> f64 {
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
}

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Real Lambert W: the solution of W·e^W = x on the chosen branch.
pub fn lambert_w(branch: BranchId, x: f64) -> Result<f64, NumericError> {
    if !x.is_finite() {
        return Err(NumericError::Domain(format!("W({x}) is not finite")));
    }
    if near_branch_point(x) {
        return Ok(-1.0);
    }
    if x < -INV_E {
        return Err(NumericError::Domain(format!("W({x}) needs x >= -1/e")));
    }
    let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
    let w = match branch {
        BranchId::Principal => {
            if x == 0.0 {
                return Ok(0.0);
            }
            let guess = if x < -0.25 {
                branch_series(p)
            } else if x < 3.0 {
                x.ln_1p() * (1.0 - x.ln_1p() / (2.0 + x.ln_1p()))
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            };
            halley(x, guess).max(-1.0)
        }
        BranchId::Lower => {
            if x >= 0.0 {
                return Err(NumericError::Domain(format!(
                    "W_-1({x}) needs -1/e <= x < 0"
                )));
            }
            let guess = if x < -0.25 {
                branch_series(-p)
            } else {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            };
            halley(x, guess).min(-1.0)
        }
    };
    Ok(w)
}

/// 𝒲(p, q) = (W₀(e^p) + 1)(W₋₁(−e^q) + 1), defined for q ≤ −1.
pub fn w_factor(p: f64, q: f64) -> Result<f64, NumericError> {
    if q.is_nan() || q > -1.0 {
        return Err(NumericError::Domain(format!("W-factor needs q <= -1, got {q}")));
    }
    if q == -1.0 {
        return Ok(0.0);
    }
    let a = w0_of_exp(p)?;
    let b = wm1_of_negexp(q)?;
    Ok((a + 1.0) * (b + 1.0))
}

/// W₀(e^p), solving w + ln w = p directly once e^p would overflow.
pub fn w0_of_exp(p: f64) -> Result<f64, NumericError> {
    if p < 700.0 {
        return lambert_w(BranchId::Principal, p.exp());
    }
    let mut w = p - p.ln();
    for _ in 0..MAX_ITER {
        let step = (w + w.ln() - p) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    Ok(w)
}

/// W₋₁(−e^q) for q ≤ −1, solving w + ln(−w) = q directly once e^q
/// underflows.
pub fn wm1_of_negexp(q: f64) -> Result<f64, NumericError> {
    if q > -1.0 {
        return Err(NumericError::Domain(format!("W_-1(-e^q) needs q <= -1, got {q}")));
    }
    if q > -700.0 {
        return lambert_w(BranchId::Lower, -q.exp());
    }
    let mut w = q - (-q).ln();
    for _ in 0..MAX_ITER {
        let step = (w + (-w).ln() - q) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    Ok(w)
}

//! Exact arithmetic in fields of multivariate rational functions over the
//! arbitrary-precision rationals.

mod poly;
mod ring;
mod scalar;

pub use poly::{render_rational, Monomial, Polynomial};
pub use ring::Ring;
pub use scalar::Scalar;

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("scalars belong to different rings")]
    RingMismatch,
    #[error("division by the zero scalar")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate ring name `{0}`")]
    DuplicateName(String),
    #[error("no value supplied for variable `{0}`")]
    MissingValue(String),
    #[error("pole: denominator `{denominator}` vanishes at the evaluation point")]
    Pole { denominator: String },
}

/// Parses `"3"`, `"-3/4"`, `"0.25"` and similar into a [`Rational`].
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().ok()?;
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if num_traits::Zero::is_zero(&d) {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => match text.split_once('.') {
            Some((int, frac)) if !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit()) => {
                let negative = int.starts_with('-');
                let int = int.trim_start_matches(['-', '+']);
                let digits: num_bigint::BigInt = format!("{}{frac}", if int.is_empty() { "0" } else { int })
                    .parse()
                    .ok()?;
                let scale = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
                let r = Rational::new(digits, scale);
                Some(if negative { -r } else { r })
            }
            _ => Some(Rational::from_integer(text.parse().ok()?)),
        },
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

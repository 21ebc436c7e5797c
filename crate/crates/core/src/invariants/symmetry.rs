use crate::coeff_ring::Rational;
use crate::dsl;
use crate::report::Outcome;
use crate::structure::{verify_derived_coframing, Coframing, StructureModel};

use super::InvariantError;

const FORMS: [(&str, &str); 7] = [
    ("w0", "(eps*H2/H1)*wb0"),
    ("wb0", "(H2/H1)*w0"),
    ("g", "-g"),
    ("w1", "-(H2/H1)*w3"),
    ("w2", "-w4"),
    ("w3", "-(eps*H2/H1)*w1"),
    ("w4", "-w2"),
];

const FUNCTIONS: [(&str, &str); 4] = [
    ("H1", "H1"),
    ("H2", "eps*H1^2/H2"),
    ("H3", "eps*H4"),
    ("H4", "eps*H3"),
];

/// The replacement that exchanges the two underlying Monge-Ampère systems,
/// as a coframing of the model over itself.
pub fn symmetry_coframing(model: &StructureModel) -> Result<Coframing, InvariantError> {
    let err = |e: dsl::DslError| InvariantError::Input(e.to_string());
    Ok(Coframing {
        oneforms: FORMS
            .iter()
            .map(|(n, t)| {
                Ok((
                    n.to_string(),
                    dsl::parse_form(t, model.basis(), model.ring(), 1).map_err(err)?,
                ))
            })
            .collect::<Result<_, InvariantError>>()?,
        functions: FUNCTIONS
            .iter()
            .map(|(n, t)| Ok((n.to_string(), dsl::parse_scalar(t, model.ring()).map_err(err)?)))
            .collect::<Result<_, InvariantError>>()?,
    })
}

/// Whether all structure equations still hold after the replacement.
pub fn verify_discrete_symmetry(model: &StructureModel) -> Result<Vec<Outcome>, InvariantError> {
    let defs = symmetry_coframing(model)?;
    Ok(verify_derived_coframing(model, &defs, model)?)
}

/// The replacement on the values of H.
pub fn symmetry_point(eps: i64, h: &[Rational; 4]) -> Result<[Rational; 4], InvariantError> {
    let e = Rational::from_integer(eps.into());
    let [h1, h2, h3, h4] = h;
    if *h2 == Rational::from_integer(0.into()) {
        return Err(InvariantError::Input("H2 != 0 is violated".to_string()));
    }
    Ok([h1.clone(), &e * h1 * h1 / h2, &e * h4, &e * h3])
}

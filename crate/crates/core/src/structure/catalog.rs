use std::collections::BTreeMap;

use crate::dsl;
use crate::exterior::Form;
use crate::report::Outcome;

use super::{ChartModel, Coframing, Constraint, ModelError, Relation, StructureModel};

const TYPE_A1: &str = include_str!("../../models/type_a1.eds");
const SIGMA: &str = include_str!("../../models/sigma.eds");
const TAU: &str = include_str!("../../models/tau.eds");
const TYPE_B1: &str = include_str!("../../models/type_b1.eds");

#[derive(Debug, Clone)]
pub enum Builtin {
    Structure(StructureModel),
    Chart(ChartModel),
}

impl Builtin {
    pub fn structure(self) -> Result<StructureModel, ModelError> {
        match self {
            Builtin::Structure(m) => Ok(m),
            Builtin::Chart(c) => Ok(c.model().clone()),
        }
    }

    pub fn chart(self) -> Result<ChartModel, ModelError> {
        match self {
            Builtin::Chart(c) => Ok(c),
            Builtin::Structure(m) => Err(ModelError::Invalid(format!(
                "`{}` is not a chart",
                m.name()
            ))),
        }
    }
}

pub fn builtin_names() -> &'static [&'static str] {
    &["TYPE_A1", "SIGMA", "TAU", "CHART_GOURSAT", "TYPE_B1"]
}

fn canonical(name: &str) -> String {
    name.chars()
        .filter(|c| *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

/// Model-file source of a builtin, if it has one.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    match canonical(name).as_str() {
        "typea1" => Some(TYPE_A1),
        "sigma" => Some(SIGMA),
        "tau" => Some(TAU),
        "typeb1" => Some(TYPE_B1),
        _ => None,
    }
}

fn dsl_err(e: dsl::DslError) -> ModelError {
    ModelError::Invalid(e.to_string())
}

/// A builtin model by name (case, `_` and `-` are ignored). Models with the
/// parameter `eps` need it bound; the others ignore it.
pub fn builtin(name: &str, eps: Option<i64>) -> Result<Builtin, ModelError> {
    if canonical(name) == "chartgoursat" {
        return Ok(Builtin::Chart(goursat_chart()?));
    }
    let src = builtin_source(name).ok_or_else(|| ModelError::UnknownName(name.to_string()))?;
    let file = dsl::parse(src).map_err(dsl_err)?;
    if !file.params.is_empty() && eps.is_none() {
        return Err(ModelError::Invalid(format!(
            "builtin `{name}` needs a value for eps"
        )));
    }
    Ok(Builtin::Structure(file.instantiate_eps(eps).map_err(dsl_err)?))
}

fn forms(model: &StructureModel, defs: &[(&str, &str)]) -> Result<Vec<(String, Form)>, ModelError> {
    defs.iter()
        .map(|(n, text)| {
            let f = dsl::parse_form(text, model.basis(), model.ring(), 1).map_err(dsl_err)?;
            Ok((n.to_string(), f))
        })
        .collect()
}

/// σ = (ω⁰/H₁, ω¹/H₄, H₄ω², ω³/(H₁H₄), H₄(ω⁴+γ)) over the sub-model
/// {H₂ = 1, H₃ = -1}; valid where H₄ ≠ 0.
pub fn sigma_coframing(sub: &StructureModel) -> Result<Coframing, ModelError> {
    Ok(Coframing {
        oneforms: forms(
            sub,
            &[
                ("s0", "(1/H1)*w0"),
                ("s1", "(1/H4)*w1"),
                ("s2", "H4*w2"),
                ("s3", "(1/(H1*H4))*w3"),
                ("s4", "H4*w4 + H4*g"),
            ],
        )?,
        functions: Vec::new(),
    })
}

/// τ and the invariants R = εH₁², S = H₄/(3H₄+4ε) over the sub-model
/// {H₂ = 1, H₃ = -1}; valid where H₄ ≠ 0 and 3H₄+4ε ≠ 0.
pub fn tau_coframing(sub: &StructureModel) -> Result<Coframing, ModelError> {
    let s_over_r = "(H4/((3*H4 + 4*eps)*eps*H1^2))";
    let t2 = format!("eps*H4*w2 + eps*H4*g - {s_over_r}*wb0");
    let t4 = format!("eps*H4*w4 + {s_over_r}*wb0");
    Ok(Coframing {
        oneforms: forms(
            sub,
            &[
                ("t0", "wb0"),
                ("t1", "(eps/H4)*w1"),
                ("t2", &t2),
                ("t3", "(eps/(H1*H4))*w3"),
                ("t4", &t4),
            ],
        )?,
        functions: vec![
            (
                "R".to_string(),
                dsl::parse_scalar("eps*H1^2", sub.ring()).map_err(dsl_err)?,
            ),
            (
                "S".to_string(),
                dsl::parse_scalar("H4/(3*H4 + 4*eps)", sub.ring()).map_err(dsl_err)?,
            ),
        ],
    })
}

/// The chart (x, y, u, v, s) for the σ coframing with ε = 1, where u and v
/// stand for the exponentials e^f and e^h, restricted to x > y, u, v > 0.
fn goursat_chart() -> Result<ChartModel, ModelError> {
    let mut chart = ChartModel::new("chart_goursat", &["x", "y", "u", "v", "s"], &BTreeMap::new())?;
    let ring = chart.ring().clone();
    let var = |n: &str| ring.var(n).expect("chart coordinate");
    chart = chart.with_constraints(vec![
        Constraint::new(var("x") - var("y"), Relation::Positive),
        Constraint::new(var("u"), Relation::Positive),
        Constraint::new(var("v"), Relation::Positive),
    ])?;
    let f = |text: &str| dsl::parse_form(text, chart.basis(), chart.ring(), 1).map_err(dsl_err);
    let plus = f("-(1/u)*du - (2/(x - y))*dx - u*dx - (1/(u*(x - y)^2))*dy")?;
    let minus = f("v*ds")?;
    let half = ring.ratio(1, 2);
    let s2 = plus.add(&minus)?.scale(&half)?;
    let s4 = plus.sub(&minus)?.scale(&half)?;
    let defs = [
        (
            "s0",
            f("(1/(2*v))*dv + (u/2)*dx - (1/(2*u*(x - y)^2))*dy - (v/2)*ds")?,
        ),
        ("s1", f("u*dx")?),
        ("s2", s2),
        ("s3", f("(1/(u*(x - y)^2))*dy")?),
        ("s4", s4),
    ];
    for (n, form) in defs {
        chart.define(n, form)?;
    }
    Ok(chart)
}

/// The chart's σ definitions as a coframing over the chart model.
pub fn chart_coframing(chart: &ChartModel) -> Coframing {
    Coframing {
        oneforms: chart.definitions().to_vec(),
        functions: Vec::new(),
    }
}

/// The contact identity −(2/v)σ⁰ = dz − p dx − q dy and the 2-form identity
/// (2/(uv)) σ¹∧σ² = (1/u) dp∧dx + dx∧dz + q dx∧dy, with z = s + 1/v,
/// p = u/v and q = −1/(uv(x−y)²).
pub fn verify_goursat_identities(chart: &ChartModel) -> Result<Vec<Outcome>, ModelError> {
    let ring = chart.ring();
    let sc = |t: &str| dsl::parse_scalar(t, ring).map_err(dsl_err);
    let def = |n: &str| {
        chart
            .definition(n)
            .cloned()
            .ok_or_else(|| ModelError::UnknownName(n.to_string()))
    };
    let z = sc("s + 1/v")?;
    let p = sc("u/v")?;
    let q = sc("-1/(u*v*(x - y)^2)")?;
    let dx = chart.d_scalar(&sc("x")?)?;
    let dy = chart.d_scalar(&sc("y")?)?;
    let dz = chart.d_scalar(&z)?;
    let dp = chart.d_scalar(&p)?;

    let contact_lhs = def("s0")?.scale(&sc("-2/v")?)?;
    let contact_rhs = dz.sub(&dx.scale(&p)?)?.sub(&dy.scale(&q)?)?;
    let two_lhs = def("s1")?.wedge(&def("s2")?)?.scale(&sc("2/(u*v)")?)?;
    let two_rhs = dp
        .wedge(&dx)?
        .scale(&sc("1/u")?)?
        .add(&dx.wedge(&dz)?)?
        .add(&dx.wedge(&dy)?.scale(&q)?)?;
    Ok(vec![
        Outcome::from_form("contact 1-form", &contact_lhs.sub(&contact_rhs)?),
        Outcome::from_form("s1/\\s2 2-form", &two_lhs.sub(&two_rhs)?),
    ])
}

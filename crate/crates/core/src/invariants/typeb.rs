use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::coeff_ring::{Rational, Ring, Scalar};
use crate::dsl;
use crate::exterior::{Form, FormError};
use crate::report::Outcome;
use crate::structure::StructureModel;

use super::InvariantError;

/// A scalar equation `expr = 0` with the reduction it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub expr: Scalar,
    pub provenance: String,
}

#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub ring: Ring,
    pub equations: Vec<Equation>,
}

impl ConstraintSet {
    /// The equations as canonical texts, each normalized up to sign.
    pub fn canonical(&self) -> BTreeSet<String> {
        self.equations
            .iter()
            .map(|e| {
                let a = e.expr.render();
                let b = (-e.expr.clone()).render();
                a.min(b)
            })
            .collect()
    }

    pub fn nonzero(&self) -> Vec<&Equation> {
        self.equations.iter().filter(|e| !e.expr.is_zero()).collect()
    }

    pub fn all_zero(&self) -> bool {
        self.equations.iter().all(|e| e.expr.is_zero())
    }
}

/// Solving one d² identity for an opaque 2-form: `d(d identity)` reduced
/// modulo `drop`, with `opaque` occurring only against `partner`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isolation {
    pub identity: String,
    pub opaque: String,
    pub partner: String,
    pub drop: Vec<String>,
}

impl Isolation {
    pub fn new(identity: &str, opaque: &str, partner: &str, drop: &[&str]) -> Isolation {
        Isolation {
            identity: identity.to_string(),
            opaque: opaque.to_string(),
            partner: partner.to_string(),
            drop: drop.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn label(&self) -> String {
        format!("d(d {}) mod {}", self.identity, self.drop.join(", "))
    }
}

/// The coframe change `name = new_name + plus`, applied before reducing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shear {
    pub name: String,
    pub new_name: String,
    pub plus: String,
}

impl Shear {
    pub fn new(name: &str, new_name: &str, plus: &str) -> Shear {
        Shear {
            name: name.to_string(),
            new_name: new_name.to_string(),
            plus: plus.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recipe {
    /// `d(d identity)` modulo `drop`; no opaque term may survive.
    Plain { identity: String, drop: Vec<String> },
    /// Two solutions for the same opaque 2-form; their difference and the
    /// residues give the equations.
    Pair {
        first: Isolation,
        second: Isolation,
        shear: Option<Shear>,
    },
}

impl Recipe {
    pub fn plain(identity: &str, drop: &[&str]) -> Recipe {
        Recipe::Plain {
            identity: identity.to_string(),
            drop: drop.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn pair(first: Isolation, second: Isolation) -> Recipe {
        Recipe::Pair {
            first,
            second,
            shear: None,
        }
    }
}

/// Outcome of a paired recipe.
#[derive(Debug, Clone)]
pub struct PairResult {
    /// First class minus second, reduced modulo both drop sets and partners.
    pub difference: Form,
    pub residues: [Form; 2],
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn push_equations(out: &mut Vec<Equation>, form: &Form, label: &str) {
    let basis = form.basis();
    for (mi, c) in form.terms() {
        out.push(Equation {
            expr: c.clone(),
            provenance: format!("{label} [{}]", mi.render(basis)),
        });
    }
    for (o, mi, c) in form.opaque_terms() {
        out.push(Equation {
            expr: c.clone(),
            provenance: format!("{label} [{}/\\{}]", basis.opaque_name(o), mi.render(basis)),
        });
    }
}

/// `d(d identity)` reduced modulo `drop`.
pub fn reduced_identity(
    model: &StructureModel,
    identity: &str,
    drop: &[&str],
) -> Result<Form, InvariantError> {
    Ok(model.d_squared(identity)?.reduce_mod(drop)?)
}

fn sheared(model: &StructureModel, identity: &str, shear: &Option<Shear>) -> Result<Form, InvariantError> {
    let dd = model.d_squared(identity)?;
    let Some(s) = shear else {
        return Ok(dd);
    };
    let target = model.basis().renamed(&[(&s.name, &s.new_name)])?;
    let image = Form::oneform(&target, model.ring(), &s.new_name)?
        .add(&Form::oneform(&target, model.ring(), &s.plus)?)?;
    let replacements = BTreeMap::from([(s.name.clone(), image)]);
    Ok(dd.change_basis(&target, &replacements)?)
}

/// Runs a paired recipe.
pub fn pair_difference(
    model: &StructureModel,
    first: &Isolation,
    second: &Isolation,
    shear: &Option<Shear>,
) -> Result<PairResult, InvariantError> {
    let iso = |i: &Isolation| -> Result<_, InvariantError> {
        let dd = sheared(model, &i.identity, shear)?;
        let r = dd.isolate_opaque(&i.opaque, &i.partner, &refs(&i.drop))?;
        if !r.found {
            return Err(FormError::UnknownName(format!(
                "{} does not occur in {}",
                i.opaque,
                i.label()
            ))
            .into());
        }
        Ok(r)
    };
    let a = iso(first)?;
    let b = iso(second)?;
    let mut common: Vec<&str> = refs(&first.drop);
    common.extend(refs(&second.drop));
    common.push(&first.partner);
    common.push(&second.partner);
    common.sort_unstable();
    common.dedup();
    let difference = a.class.sub(&b.class)?.reduce_mod(&common)?;
    Ok(PairResult {
        difference,
        residues: [a.residue, b.residue],
    })
}

/// Scalar equations extracted from the recipes, in recipe order.
pub fn typeb_extract(model: &StructureModel, recipes: &[Recipe]) -> Result<ConstraintSet, InvariantError> {
    let mut equations = Vec::new();
    for r in recipes {
        match r {
            Recipe::Plain { identity, drop } => {
                let f = reduced_identity(model, identity, &refs(drop))?;
                if let Some((o, _, _)) = f.opaque_terms().next() {
                    return Err(FormError::SurvivingOpaque(f.basis().opaque_name(o).to_string()).into());
                }
                push_equations(&mut equations, &f, &format!("d(d {identity}) mod {}", drop.join(", ")));
            }
            Recipe::Pair { first, second, shear } => {
                let p = pair_difference(model, first, second, shear)?;
                let label = format!("[{}] - [{}]", first.label(), second.label());
                push_equations(&mut equations, &p.difference, &label);
                push_equations(&mut equations, &p.residues[0], &format!("residue of {}", first.label()));
                push_equations(&mut equations, &p.residues[1], &format!("residue of {}", second.label()));
            }
        }
    }
    Ok(ConstraintSet {
        ring: model.ring().clone(),
        equations,
    })
}

/// The relations read off the three plain recipes.
pub const RELATION_BLOCK: [(&str, &str); 20] = [
    ("T2_2", "P0 - T1_1 + C2"),
    ("T4_4", "P0 - T3_3"),
    ("Tb2_2", "P0 - Tb1_1"),
    ("Tb4_4", "P0 - Tb3_3 + C4"),
    ("T1_12", "-2*K - P2 - C4 + P4/2"),
    ("T3_34", "2*K - P4 + C2 + P2/2"),
    ("T1_13", "-C3 - C1 - (P1 + P3 + 1)/2"),
    ("T3_13", "-C1 - C3 + (P1 + P3 + 1)/2"),
    ("T1_14", "-C4 - P4/2"),
    ("T3_23", "-C2 + P2/2"),
    ("Q1", "P1 + 1"),
    ("Q2", "P2"),
    ("Q3", "P3 + 1"),
    ("Q4", "P4"),
    ("S1", "C2 + P2/2"),
    ("S2", "-C1 - P1/2"),
    ("S3", "-C4 + P4/2"),
    ("S4", "C3 - (P3 + 1)/2"),
    ("R2_2", "K + C4 - R1_1 - P4/2"),
    ("R4_4", "-K - C2 - R3_3 - P2/2"),
];

/// Relations that follow from comparing the two expressions for dφ
/// modulo ω⁰, ω̄⁰, γ, ωⁱ, ωʲ.
pub const DPHI_RELATIONS: [(&str, &str); 3] = [("C2", "0"), ("C3", "-C1"), ("K", "(P4 - P2)/4")];

pub fn plain_recipes() -> Vec<Recipe> {
    vec![
        Recipe::plain("w0", &["w0"]),
        Recipe::plain("wb0", &["wb0"]),
        Recipe::plain("g", &["w0", "wb0", "g"]),
    ]
}

fn dphi_isolations(i: &str, j: &str) -> (Isolation, Isolation) {
    (
        Isolation::new("w0", "dphi", "w0", &["wb0", "g", i, j]),
        Isolation::new("wb0", "dphi", "wb0", &["w0", "g", i, j]),
    )
}

/// The dφ pair modulo ω⁰, ω̄⁰, γ, ωⁱ, ωʲ.
pub fn dphi_recipe(i: &str, j: &str) -> Recipe {
    let (a, b) = dphi_isolations(i, j);
    Recipe::pair(a, b)
}

/// The dϖ pair modulo ω⁰ (resp. ω̄⁰), γ and ω¹ − ω³, taken in the coframe
/// where `w1p` stands for ω¹ − ω³.
pub fn dvarpi_recipe() -> Recipe {
    Recipe::Pair {
        first: Isolation::new("g", "dvarpi", "wb0", &["w0", "g", "w1p"]),
        second: Isolation::new("g", "dvarpi", "w0", &["wb0", "g", "w1p"]),
        shear: Some(Shear::new("w1", "w1p", "w3")),
    }
}

fn bind(model: &StructureModel, pairs: &[(&str, &str)]) -> Result<StructureModel, InvariantError> {
    let b = pairs
        .iter()
        .map(|(k, v)| {
            let s = dsl::parse_scalar(v, model.ring()).map_err(|e| InvariantError::Input(e.to_string()))?;
            Ok((k.to_string(), s))
        })
        .collect::<Result<BTreeMap<_, _>, InvariantError>>()?;
    Ok(model.derive_submodel(&b)?)
}

fn form(model: &StructureModel, text: &str, degree: usize) -> Result<Form, InvariantError> {
    let basis = model.basis();
    dsl::parse_form(text, basis, model.ring(), degree).map_err(|e| InvariantError::Input(e.to_string()))
}

fn sheared_form(model: &StructureModel, text: &str, degree: usize) -> Result<Form, InvariantError> {
    let basis = model.basis().renamed(&[("w1", "w1p")])?;
    dsl::parse_form(text, &basis, model.ring(), degree).map_err(|e| InvariantError::Input(e.to_string()))
}

/// The Type B1 reduction, stage by stage.
#[derive(Debug, Clone)]
pub struct TypeBPipeline {
    /// All torsion functions free.
    pub base: StructureModel,
    /// After the relation block.
    pub relations: StructureModel,
    /// After C₄ = 0.
    pub c4: StructureModel,
    /// After C₂ = 0, C₃ = −C₁, K = (P₄ − P₂)/4.
    pub dphi: StructureModel,
    /// After P₀ = 0.
    pub reduced: StructureModel,
    /// Equations of the plain recipes on the base model.
    pub base_equations: ConstraintSet,
    pub outcomes: Vec<Outcome>,
}

impl TypeBPipeline {
    pub fn run(base: &StructureModel) -> Result<TypeBPipeline, InvariantError> {
        let mut outcomes = Vec::new();
        let plain = plain_recipes();
        let base_equations = typeb_extract(base, &plain)?;

        let relations = bind(base, &RELATION_BLOCK)?;
        for r in &plain {
            let Recipe::Plain { identity, drop } = r else { unreachable!() };
            let f = reduced_identity(&relations, identity, &refs(drop))?;
            outcomes.push(Outcome::from_form(
                format!("relation block: d(d {identity}) mod {}", drop.join(", ")),
                &f,
            ));
        }

        let (a, b) = dphi_isolations("w2", "w3");
        let p = pair_difference(&relations, &a, &b, &None)?;
        let expected = form(&relations, "4*C4*w1/\\w4", 2)?;
        outcomes.push(Outcome::from_form("dphi pair: difference - 4*C4 w1/\\w4", &p.difference.sub(&expected)?));
        outcomes.push(Outcome::from_form("dphi pair: residue mod wb0, g, w2, w3", &p.residues[0]));
        outcomes.push(Outcome::from_form("dphi pair: residue mod w0, g, w2, w3", &p.residues[1]));

        let c4 = bind(&relations, &[("C4", "0")])?;
        let ij: Vec<Recipe> = [("w1", "w4"), ("w2", "w4"), ("w3", "w4")]
            .iter()
            .map(|(i, j)| dphi_recipe(i, j))
            .collect();
        let found = typeb_extract(&c4, &ij)?;
        outcomes.push(Outcome::verdict(
            "(i,j) recipes: nonzero before the relations",
            !found.all_zero(),
            found.nonzero().iter().map(|e| e.expr.render()).collect::<Vec<_>>().join("; "),
        ));
        let dphi = bind(&c4, &DPHI_RELATIONS)?;
        let mut all_ij = ij.clone();
        all_ij.push(dphi_recipe("w1", "w2"));
        all_ij.push(dphi_recipe("w1", "w3"));
        let after = typeb_extract(&dphi, &all_ij)?;
        outcomes.push(Outcome::verdict(
            "(i,j) recipes: C2 = 0, C3 = -C1, K = (P4 - P2)/4 clear them",
            after.all_zero(),
            after.nonzero().iter().map(|e| format!("{}: {}", e.provenance, e.expr.render())).collect::<Vec<_>>().join("; "),
        ));
        for (k, (name, value)) in DPHI_RELATIONS.iter().enumerate() {
            let others: Vec<(&str, &str)> = DPHI_RELATIONS
                .iter()
                .enumerate()
                .filter(|(m, _)| *m != k)
                .map(|(_, r)| *r)
                .collect();
            let partial = typeb_extract(&bind(&c4, &others)?, &ij)?;
            outcomes.push(Outcome::verdict(
                format!("(i,j) recipes: {name} = {value} is needed"),
                !partial.all_zero(),
                partial.nonzero().iter().map(|e| e.expr.render()).collect::<Vec<_>>().join("; "),
            ));
        }

        let Recipe::Pair { first, second, shear } = dvarpi_recipe() else { unreachable!() };
        let p = pair_difference(&dphi, &first, &second, &shear)?;
        let zeta = sheared_form(
            &dphi,
            "(2*P0 + C1*(P2 - P4))*w2/\\w3 + (2*P0 - C1*(P2 - P4))*w3/\\w4",
            2,
        )?;
        outcomes.push(Outcome::from_form("dvarpi pair: difference - zeta", &p.difference.sub(&zeta)?));
        outcomes.push(Outcome::from_form("dvarpi pair: residue mod w0, g, w1 - w3", &p.residues[0]));
        outcomes.push(Outcome::from_form("dvarpi pair: residue mod wb0, g, w1 - w3", &p.residues[1]));

        let reduced = bind(&dphi, &[("P0", "0")])?;
        let p = pair_difference(&reduced, &first, &second, &shear)?;
        let c1k = sheared_form(&reduced, "(-4*C1*(P4 - P2)/4)*w2/\\w3 + (4*C1*(P4 - P2)/4)*w3/\\w4", 2)?;
        outcomes.push(Outcome::from_form(
            "dvarpi pair at P0 = 0: difference - 4*C1*K (-w2/\\w3 + w3/\\w4)",
            &p.difference.sub(&c1k)?,
        ));

        Ok(TypeBPipeline {
            base: base.clone(),
            relations,
            c4,
            dphi,
            reduced,
            base_equations,
            outcomes,
        })
    }

    /// Runs the pipeline on the builtin TYPE_B1 model.
    pub fn builtin() -> Result<TypeBPipeline, InvariantError> {
        let base = crate::structure::builtin("TYPE_B1", None)?.structure()?;
        TypeBPipeline::run(&base)
    }
}

/// The ten functions whose vanishing decides the orbit dimension.
pub const ORBIT_FUNCTIONS: [&str; 10] = [
    "P2", "P4", "R1_2", "R3_4", "T1_2", "Tb1_2", "T3_4", "Tb3_4", "T1_0", "T3_0",
];

const DW1_DISPLAY: &str = "T1_0*w0/\\wb0 + T1_2*w0/\\g + T1_2*w0/\\w2 + Tb1_2*wb0/\\w2 \
    + R1_2*g/\\w2 - (P2/2)*g/\\w3 + (P2/2)*w3/\\w2 + (P2/2)*w3/\\w4";
const DW3_DISPLAY: &str = "T3_0*wb0/\\w0 + Tb3_4*wb0/\\g + Tb3_4*wb0/\\w4 + T3_4*w0/\\w4 \
    + R3_4*g/\\w4 - (P4/2)*g/\\w1 + (P4/2)*w1/\\w2 + (P4/2)*w1/\\w4";

#[derive(Debug, Clone)]
pub struct OrbitReport {
    /// All ten functions vanish: every orbit is at most 2-dimensional.
    pub small_orbits: bool,
    /// dω¹ ≡ 0 mod ω¹ and dω³ ≡ 0 mod ω³ at the values.
    pub integrable: bool,
    pub dw1: Form,
    pub dw3: Form,
    pub outcomes: Vec<Outcome>,
}

/// Decides the orbit criterion at the given values of the ten functions and
/// cross-checks it against integrability of ω¹ and ω³ in the fully reduced
/// model.
pub fn orbit_criterion(
    reduced: &StructureModel,
    values: &BTreeMap<String, Rational>,
) -> Result<OrbitReport, InvariantError> {
    for k in values.keys() {
        if !ORBIT_FUNCTIONS.contains(&k.as_str()) {
            return Err(InvariantError::Input(format!("`{k}` is not one of the ten functions")));
        }
    }
    let ring = reduced.ring();
    let mut subst = BTreeMap::new();
    for n in ORBIT_FUNCTIONS {
        let v = values
            .get(n)
            .ok_or_else(|| InvariantError::Input(format!("missing value for `{n}`")))?;
        let idx = ring
            .var_index(n)
            .ok_or_else(|| InvariantError::Input(format!("`{n}` is not a variable of the model")))?;
        subst.insert(idx, ring.constant(v.clone()));
    }
    let small_orbits = values.values().all(|v| v.is_zero());

    let mut outcomes = Vec::new();
    let mut at_values = Vec::new();
    for (name, display) in [("w1", DW1_DISPLAY), ("w3", DW3_DISPLAY)] {
        let derived = reduced
            .drule(name)
            .ok_or_else(|| InvariantError::Input(format!("no rule for `{name}`")))?
            .reduce_mod(&[name])?;
        let shown = form(reduced, display, 2)?;
        outcomes.push(Outcome::from_form(
            format!("d {name} mod {name} matches the displayed congruence"),
            &derived.sub(&shown)?,
        ));
        let extra: Vec<&str> = derived
            .coefficients()
            .flat_map(|c| c.variables())
            .map(|v| ring.variables()[v].as_str())
            .filter(|n| !ORBIT_FUNCTIONS.contains(n))
            .collect();
        outcomes.push(Outcome::verdict(
            format!("d {name} mod {name} depends only on the ten functions"),
            extra.is_empty(),
            extra.join(", "),
        ));
        at_values.push(shown.map_coefficients(ring, |c| c.substitute(&subst))?);
    }
    let dw3 = at_values.pop().expect("two forms");
    let dw1 = at_values.pop().expect("two forms");
    let integrable = dw1.is_zero() && dw3.is_zero();
    outcomes.push(Outcome::verdict(
        "orbit criterion agrees with integrability",
        small_orbits == integrable,
        format!("small orbits: {small_orbits}, integrable: {integrable}"),
    ));
    Ok(OrbitReport {
        small_orbits,
        integrable,
        dw1,
        dw3,
        outcomes,
    })
}

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::coeff_ring::{Rational, Ring, Scalar};
use crate::exterior::{Basis, Form, MultiIndex};
use crate::report::Outcome;

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    NonZero,
    Positive,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::NonZero => "!=",
            Relation::Positive => ">",
        }
    }
}

/// Domain condition `expr != 0` or `expr > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub expr: Scalar,
    pub relation: Relation,
}

impl Constraint {
    pub fn new(expr: Scalar, relation: Relation) -> Constraint {
        Constraint { expr, relation }
    }

    pub fn render(&self) -> String {
        format!("{} {} 0", self.expr.render(), self.relation.symbol())
    }

    fn holds_for(&self, v: &Rational) -> bool {
        match self.relation {
            Relation::NonZero => !v.is_zero(),
            Relation::Positive => v.is_positive(),
        }
    }

    /// Verdict when the expression is constant.
    pub fn constant_verdict(&self) -> Option<bool> {
        self.expr.as_constant().map(|v| self.holds_for(&v))
    }

    /// Evaluates the condition at a point given by variable name; a pole
    /// counts as a violation.
    pub fn holds_at(&self, point: &BTreeMap<String, Rational>) -> bool {
        match self.expr.eval(point) {
            Ok(v) => self.holds_for(&v),
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Differential {
    Declared(Form),
    /// Unknown differential: `d f = Σ f_b · b` over all basis 1-forms `b`,
    /// with one generated ring variable `f_b` per basis 1-form.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSymbol {
    pub name: String,
    pub var: usize,
    pub differential: Differential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub allowed: Vec<Rational>,
}

/// A coframing (plus optional connection forms) together with the exterior
/// derivatives of its 1-forms and of its function symbols.
///
/// d of a connection form is the opaque 2-form at the same position in the
/// basis' opaque list; d of an opaque 2-form is zero.
#[derive(Debug, Clone)]
pub struct StructureModel {
    name: String,
    params: Vec<ParamDecl>,
    ring: Ring,
    basis: Basis,
    drules: Vec<Form>,
    functions: Vec<FunctionSymbol>,
    constraints: Vec<Constraint>,
    var_d: Vec<Option<Form>>,
    basis_d: Vec<Form>,
}

/// Names of the derivative variables generated for a free symbol.
pub(crate) fn derivative_names(f: &str, basis: &Basis) -> Vec<String> {
    basis.oneforms().iter().map(|b| format!("{f}_{b}")).collect()
}

impl StructureModel {
    /// The ring for a model whose function symbols are `vars`, of which
    /// `free` have undetermined differentials.
    pub fn build_ring(
        vars: &[String],
        free: &[String],
        basis: &Basis,
        parameters: &BTreeMap<String, Rational>,
    ) -> Result<Ring, ModelError> {
        let mut all: Vec<String> = vars.to_vec();
        for f in free {
            all.extend(derivative_names(f, basis));
        }
        Ok(Ring::new(all, parameters.clone())?)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        params: Vec<ParamDecl>,
        ring: Ring,
        basis: Basis,
        drules: Vec<(String, Form)>,
        functions: Vec<(String, Option<Form>)>,
        constraints: Vec<Constraint>,
    ) -> Result<StructureModel, ModelError> {
        if basis.opaque_names().len() != basis.connection_names().len() {
            return Err(ModelError::Invalid(
                "every connection form needs exactly one opaque 2-form".to_string(),
            ));
        }
        let check_form = |owner: &str, f: &Form, degree: usize| -> Result<(), ModelError> {
            if !f.basis().same(&basis) || !f.ring().same(&ring) {
                return Err(ModelError::Invalid(format!(
                    "rule for `{owner}` is not over the model basis and ring"
                )));
            }
            if f.degree() != degree && !f.is_zero() {
                return Err(ModelError::WrongDegree {
                    name: owner.to_string(),
                    expected: degree,
                    found: f.degree(),
                });
            }
            Ok(())
        };

        let ncof = basis.coframe_names().len();
        let mut slots: Vec<Option<Form>> = vec![None; ncof];
        for (n, f) in drules {
            let i = basis.index(&n).ok_or_else(|| ModelError::UnknownName(n.clone()))?;
            if basis.is_connection(i) {
                return Err(ModelError::Invalid(format!(
                    "`{n}` is a connection form; its derivative is opaque"
                )));
            }
            check_form(&n, &f, 2)?;
            if slots[i].is_some() {
                return Err(ModelError::DuplicateRule(n));
            }
            slots[i] = Some(if f.is_zero() {
                Form::zero(&basis, &ring, 2)
            } else {
                f
            });
        }
        let mut rules = Vec::with_capacity(ncof);
        for (i, s) in slots.into_iter().enumerate() {
            rules.push(s.ok_or_else(|| ModelError::MissingRule(basis.name(i).to_string()))?);
        }

        let mut var_d: Vec<Option<Form>> = vec![None; ring.num_variables()];
        let mut owned = vec![false; ring.num_variables()];
        let mut symbols = Vec::with_capacity(functions.len());
        for (n, diff) in functions {
            let v = ring
                .var_index(&n)
                .ok_or_else(|| ModelError::UnknownName(n.clone()))?;
            if owned[v] {
                return Err(ModelError::DuplicateRule(n));
            }
            owned[v] = true;
            let differential = match diff {
                Some(f) => {
                    check_form(&n, &f, 1)?;
                    if f.has_opaque() {
                        return Err(ModelError::Invalid(format!(
                            "differential of `{n}` contains an opaque term"
                        )));
                    }
                    let f = if f.is_zero() {
                        Form::zero(&basis, &ring, 1)
                    } else {
                        f
                    };
                    var_d[v] = Some(f.clone());
                    Differential::Declared(f)
                }
                None => {
                    let mut terms = Vec::new();
                    for (b, dn) in derivative_names(&n, &basis).iter().enumerate() {
                        let dv = ring
                            .var_index(dn)
                            .ok_or_else(|| ModelError::UnknownName(dn.clone()))?;
                        if owned[dv] {
                            return Err(ModelError::DuplicateRule(dn.clone()));
                        }
                        owned[dv] = true;
                        let (_, mi) = MultiIndex::sorted(&[b]).expect("single index");
                        terms.push((mi, ring.var_at(dv)));
                    }
                    var_d[v] = Some(Form::from_terms(&basis, &ring, 1, terms, []));
                    Differential::Free
                }
            };
            symbols.push(FunctionSymbol {
                name: n,
                var: v,
                differential,
            });
        }
        if let Some(i) = owned.iter().position(|o| !o) {
            return Err(ModelError::Invalid(format!(
                "ring variable `{}` is neither a function symbol nor a generated derivative",
                ring.variables()[i]
            )));
        }
        for c in &constraints {
            if !c.expr.ring().same(&ring) {
                return Err(ModelError::Invalid(format!(
                    "constraint {} is not over the model ring",
                    c.render()
                )));
            }
        }

        let mut basis_d = Vec::with_capacity(basis.len());
        basis_d.extend(rules.iter().cloned());
        for k in 0..basis.connection_names().len() {
            basis_d.push(Form::opaque_symbol(&basis, &ring, basis.opaque_name(k))?);
        }
        Ok(StructureModel {
            name: name.into(),
            params,
            ring,
            basis,
            drules: rules,
            functions: symbols,
            constraints,
            var_d,
            basis_d,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> StructureModel {
        self.name = name.into();
        self
    }

    pub fn params(&self) -> &[ParamDecl] {
        &self.params
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Value bound to the parameter `eps`, when it is an integer.
    pub fn eps(&self) -> Option<i64> {
        let e = self.ring.parameter("eps")?;
        if !e.is_integer() {
            return None;
        }
        e.to_integer().try_into().ok()
    }

    /// The d-rules in coframe order.
    pub fn drules(&self) -> impl Iterator<Item = (&str, &Form)> {
        self.basis
            .coframe_names()
            .iter()
            .map(String::as_str)
            .zip(self.drules.iter())
    }

    pub fn drule(&self, name: &str) -> Option<&Form> {
        let i = self.basis.index(name)?;
        self.drules.get(i)
    }

    pub fn functions(&self) -> &[FunctionSymbol] {
        &self.functions
    }

    pub fn function(&self, name: &str) -> Option<&FunctionSymbol> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn oneform(&self, name: &str) -> Result<Form, ModelError> {
        Ok(Form::oneform(&self.basis, &self.ring, name)?)
    }

    pub fn var(&self, name: &str) -> Result<Scalar, ModelError> {
        Ok(self.ring.var(name)?)
    }

    /// Checks every domain constraint at a point given by variable name.
    pub fn admissible(&self, point: &BTreeMap<String, Rational>) -> Result<(), ModelError> {
        for c in &self.constraints {
            if !c.holds_at(point) {
                return Err(ModelError::ConstraintViolated(c.render()));
            }
        }
        Ok(())
    }

    fn check(&self, f: &Form) -> Result<(), ModelError> {
        if !f.basis().same(&self.basis) || !f.ring().same(&self.ring) {
            return Err(ModelError::Invalid(
                "form is not over the model basis and ring".to_string(),
            ));
        }
        Ok(())
    }

    /// d of a coefficient by the chain rule.
    pub fn d_scalar(&self, s: &Scalar) -> Result<Form, ModelError> {
        if !s.ring().same(&self.ring) {
            return Err(ModelError::Invalid(
                "scalar is not over the model ring".to_string(),
            ));
        }
        let mut out = Form::zero(&self.basis, &self.ring, 1);
        for v in s.variables() {
            let dv = self.var_d[v]
                .as_ref()
                .ok_or_else(|| ModelError::UndeclaredSymbol(self.ring.variables()[v].clone()))?;
            out = out.add(&dv.scale(&s.partial_at(v))?)?;
        }
        Ok(out)
    }

    /// d(e_I) = Σ_j (-1)^j d(e_{i_j}) ∧ e_{I without i_j}; the 2-forms
    /// d(e_i) are even, so they move to the front without a sign.
    fn d_monomial(&self, mi: &MultiIndex) -> Result<Form, ModelError> {
        let mut out = Form::zero(&self.basis, &self.ring, mi.len() + 1);
        for (j, i) in mi.indices().enumerate() {
            let rest = Form::from_terms(
                &self.basis,
                &self.ring,
                mi.len() - 1,
                [(mi.without(j), self.ring.one())],
                [],
            );
            let t = self.basis_d[i].wedge(&rest)?;
            out = if j % 2 == 0 { out.add(&t)? } else { out.sub(&t)? };
        }
        Ok(out)
    }

    /// The exterior derivative, by the Leibniz and chain rules.
    pub fn d(&self, f: &Form) -> Result<Form, ModelError> {
        self.check(f)?;
        let mut out = Form::zero(&self.basis, &self.ring, f.degree() + 1);
        let one = self.ring.one();
        for (mi, c) in f.terms() {
            let e = Form::from_terms(&self.basis, &self.ring, mi.len(), [(mi.clone(), one.clone())], []);
            if !c.variables().is_empty() {
                out = out.add(&self.d_scalar(c)?.wedge(&e)?)?;
            }
            if !mi.is_empty() {
                out = out.add(&self.d_monomial(mi)?.scale(c)?)?;
            }
        }
        for (o, mi, c) in f.opaque_terms() {
            // d(c·O∧e_I) = dc∧O∧e_I + c·O∧d(e_I), since dO = 0 and O is even
            let oe = Form::from_terms(
                &self.basis,
                &self.ring,
                mi.len() + 2,
                [],
                [(o, mi.clone(), one.clone())],
            );
            if !c.variables().is_empty() {
                out = out.add(&self.d_scalar(c)?.wedge(&oe)?)?;
            }
            if !mi.is_empty() {
                let sym = Form::opaque_symbol(&self.basis, &self.ring, self.basis.opaque_name(o))?;
                out = out.add(&sym.wedge(&self.d_monomial(mi)?)?.scale(c)?)?;
            }
        }
        Ok(out)
    }

    /// d of a basis 1-form or of a function symbol.
    pub fn d_name(&self, name: &str) -> Result<Form, ModelError> {
        if let Some(i) = self.basis.index(name) {
            return Ok(self.basis_d[i].clone());
        }
        if let Some(f) = self.function(name) {
            return Ok(self.var_d[f.var].clone().expect("function symbols have differentials"));
        }
        Err(ModelError::UnknownName(name.to_string()))
    }

    /// d(d(name)), fully expanded. Free function symbols are refused: their
    /// second derivatives involve symbols the model does not determine.
    pub fn d_squared(&self, name: &str) -> Result<Form, ModelError> {
        if let Some(f) = self.function(name) {
            if f.differential == Differential::Free {
                return Err(ModelError::FreeSymbol(name.to_string()));
            }
        }
        self.d(&self.d_name(name)?)
    }

    /// Coframe names followed by the function symbols with declared
    /// differentials: the identities checked by [`Self::verify_closure`].
    pub fn closure_identities(&self) -> Vec<String> {
        self.basis
            .coframe_names()
            .iter()
            .cloned()
            .chain(
                self.functions
                    .iter()
                    .filter(|f| matches!(f.differential, Differential::Declared(_)))
                    .map(|f| f.name.clone()),
            )
            .collect()
    }

    /// Checks d(d x) = 0 for every identity, in parallel, reported in
    /// declaration order.
    pub fn verify_closure(&self) -> Vec<Outcome> {
        self.closure_identities()
            .par_iter()
            .map(|n| {
                let id = format!("d(d {n})");
                match self.d_squared(n) {
                    Ok(r) => Outcome::from_form(id, &r),
                    Err(e) => Outcome::verdict(id, false, e.to_string()),
                }
            })
            .collect()
    }

    /// Substitutes function symbols by expressions in the remaining ones.
    ///
    /// The bound symbols leave the ring. For a symbol with a declared
    /// differential, `d` of the binding must equal the substituted declared
    /// differential; otherwise the binding is rejected with the residual.
    /// A free symbol's derivative variables are bound to the coefficients
    /// of `d` of its binding.
    pub fn derive_submodel(
        &self,
        bindings: &BTreeMap<String, Scalar>,
    ) -> Result<StructureModel, ModelError> {
        let mut bound_vars: BTreeSet<usize> = BTreeSet::new();
        let mut dropped: BTreeSet<usize> = BTreeSet::new();
        for name in bindings.keys() {
            let f = self
                .function(name)
                .ok_or_else(|| ModelError::UnknownName(name.clone()))?;
            bound_vars.insert(f.var);
            dropped.insert(f.var);
            if f.differential == Differential::Free {
                for dn in derivative_names(name, &self.basis) {
                    dropped.insert(self.ring.var_index(&dn).expect("generated"));
                }
            }
        }
        for (name, e) in bindings {
            if !e.ring().same(&self.ring) {
                return Err(ModelError::Invalid(format!(
                    "binding for `{name}` is not over the model ring"
                )));
            }
            if let Some(v) = e.variables().iter().find(|v| dropped.contains(v)) {
                return Err(ModelError::Invalid(format!(
                    "binding for `{name}` refers to bound symbol `{}`",
                    self.ring.variables()[*v]
                )));
            }
        }

        let kept: Vec<String> = (0..self.ring.num_variables())
            .filter(|v| !dropped.contains(v))
            .map(|v| self.ring.variables()[v].clone())
            .collect();
        let ring = Ring::new(kept, self.ring.parameters().clone())?;
        let mut images: Vec<Option<Scalar>> = (0..self.ring.num_variables())
            .map(|v| {
                if dropped.contains(&v) {
                    None
                } else {
                    Some(ring.var(&self.ring.variables()[v]).expect("kept"))
                }
            })
            .collect();
        let mut binding_d: BTreeMap<&str, Form> = BTreeMap::new();
        for (name, e) in bindings {
            let f = self.function(name).expect("checked");
            images[f.var] = Some(e.compose(&self.identity_images_partial(&images, &ring)?, &ring)?);
            binding_d.insert(name, self.d_scalar(e)?);
        }
        // Derivative variables of bound free symbols: only now are all plain
        // images known.
        let plain = self.identity_images_partial(&images, &ring)?;
        for (name, de) in &binding_d {
            let f = self.function(name).expect("checked");
            if f.differential != Differential::Free {
                continue;
            }
            for (b, dn) in derivative_names(name, &self.basis).iter().enumerate() {
                let (_, mi) = MultiIndex::sorted(&[b]).expect("single index");
                let c = de.coefficient(&mi);
                if c.variables().iter().any(|v| images[*v].is_none()) {
                    return Err(ModelError::Invalid(format!(
                        "d of the binding for `{name}` involves derivatives of another bound free symbol"
                    )));
                }
                let v = self.ring.var_index(dn).expect("generated");
                images[v] = Some(c.compose(&plain, &ring)?);
            }
        }
        let images: Vec<Scalar> = images
            .into_iter()
            .map(|i| i.unwrap_or_else(|| ring.zero()))
            .collect();
        let push = |f: &Form| -> Result<Form, ModelError> {
            Ok(f.map_coefficients(&ring, |c| c.compose(&images, &ring))?)
        };

        for (name, de) in &binding_d {
            let f = self.function(name).expect("checked");
            if let Differential::Declared(df) = &f.differential {
                let residual = push(df)?.sub(&push(de)?)?;
                if !residual.is_zero() {
                    return Err(ModelError::Inconsistent {
                        symbol: name.to_string(),
                        residual: residual.render(),
                    });
                }
            }
        }

        let drules = self
            .drules()
            .map(|(n, f)| Ok((n.to_string(), push(f)?)))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let functions = self
            .functions
            .iter()
            .filter(|f| !bound_vars.contains(&f.var))
            .map(|f| {
                let d = match &f.differential {
                    Differential::Declared(df) => Some(push(df)?),
                    Differential::Free => None,
                };
                Ok((f.name.clone(), d))
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        let mut constraints = Vec::new();
        for c in &self.constraints {
            let expr = c.expr.compose(&images, &ring)?;
            let nc = Constraint::new(expr, c.relation);
            match nc.constant_verdict() {
                Some(true) => {}
                Some(false) => return Err(ModelError::ConstraintViolated(c.render())),
                None => constraints.push(nc),
            }
        }
        StructureModel::new(
            self.name.clone(),
            self.params.clone(),
            ring,
            self.basis.clone(),
            drules,
            functions,
            constraints,
        )
    }

    /// Images with unknown entries (derivative variables of bound free
    /// symbols) mapped to zero; only used where those cannot occur.
    fn identity_images_partial(
        &self,
        images: &[Option<Scalar>],
        ring: &Ring,
    ) -> Result<Vec<Scalar>, ModelError> {
        Ok(images
            .iter()
            .map(|i| i.clone().unwrap_or_else(|| ring.zero()))
            .collect())
    }
}

impl PartialEq for StructureModel {
    /// Structural equality: same names, declarations and rules, and the same
    /// constraints in any order.
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.ring.same(&other.ring)
            && self.basis.same(&other.basis)
            && self.drules == other.drules
            && self.functions == other.functions
            && self.constraints.len() == other.constraints.len()
            && self.constraints.iter().all(|c| other.constraints.contains(c))
    }
}

use rayon::prelude::*;

use crate::coeff_ring::Scalar;
use crate::exterior::{Form, MultiIndex};
use crate::linalg;
use crate::report::Outcome;

use super::{Differential, ModelError, StructureModel};

/// New 1-forms and functions expressed over a base model.
#[derive(Debug, Clone, Default)]
pub struct Coframing {
    pub oneforms: Vec<(String, Form)>,
    pub functions: Vec<(String, Scalar)>,
}

impl Coframing {
    pub fn oneform(&self, name: &str) -> Option<&Form> {
        self.oneforms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn function(&self, name: &str) -> Option<&Scalar> {
        self.functions.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    /// The identity coframing of a model: every basis 1-form and function
    /// symbol defined as itself.
    pub fn identity(model: &StructureModel) -> Result<Coframing, ModelError> {
        Ok(Coframing {
            oneforms: model
                .basis()
                .coframe_names()
                .iter()
                .map(|n| Ok((n.clone(), model.oneform(n)?)))
                .collect::<Result<_, ModelError>>()?,
            functions: model
                .functions()
                .iter()
                .map(|f| (f.name.clone(), model.ring().var_at(f.var)))
                .collect(),
        })
    }
}

/// Checks that `defs`, computed in `base`, satisfy the structure equations
/// of `target`: for each target 1-form, d of its definition equals the
/// target right side with every target name replaced by its definition;
/// likewise for each target function with a declared differential.
pub fn verify_derived_coframing(
    base: &StructureModel,
    defs: &Coframing,
    target: &StructureModel,
) -> Result<Vec<Outcome>, ModelError> {
    if !target.basis().connection_names().is_empty() {
        return Err(ModelError::Invalid(
            "target models with connection forms are not supported".to_string(),
        ));
    }
    for (n, _) in &defs.oneforms {
        if target.basis().index(n).is_none() {
            return Err(ModelError::UnknownName(n.clone()));
        }
    }
    let mut images = Vec::new();
    for n in target.basis().coframe_names() {
        let f = defs
            .oneform(n)
            .ok_or_else(|| ModelError::MissingRule(n.clone()))?;
        if !f.basis().same(base.basis()) || !f.ring().same(base.ring()) {
            return Err(ModelError::Invalid(format!(
                "definition of `{n}` is not over the base model"
            )));
        }
        if f.degree() != 1 || f.has_opaque() {
            return Err(ModelError::WrongDegree {
                name: n.clone(),
                expected: 1,
                found: f.degree(),
            });
        }
        images.push(f.clone());
    }
    let matrix: Vec<Vec<Scalar>> = images
        .iter()
        .map(|f| {
            (0..base.basis().len())
                .map(|j| f.coefficient(&MultiIndex::sorted(&[j]).expect("single").1))
                .collect()
        })
        .collect();
    let rank = linalg::rank(&matrix).map_err(|e| ModelError::NotInvertible(e.to_string()))?;
    if rank < images.len() {
        return Err(ModelError::NotInvertible(format!(
            "{} definitions span only rank {rank}",
            images.len()
        )));
    }

    let mut scalar_images = Vec::new();
    for v in target.ring().variables() {
        let s = defs
            .function(v)
            .ok_or_else(|| ModelError::MissingRule(v.clone()))?;
        if !s.ring().same(base.ring()) {
            return Err(ModelError::Invalid(format!(
                "definition of `{v}` is not over the base ring"
            )));
        }
        scalar_images.push(s.clone());
    }

    let pull = |f: &Form| -> Result<Form, ModelError> {
        if f.has_opaque() {
            return Err(ModelError::Invalid("cannot pull back opaque terms".to_string()));
        }
        let mut out = Form::zero(base.basis(), base.ring(), f.degree());
        for (mi, c) in f.terms() {
            let mut acc = Form::scalar(base.basis(), c.compose(&scalar_images, base.ring())?);
            for i in mi.indices() {
                acc = acc.wedge(&images[i])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    };

    enum Item<'a> {
        Oneform(usize, &'a str),
        Function(&'a str, &'a Form),
    }
    let mut items: Vec<Item> = target
        .basis()
        .coframe_names()
        .iter()
        .enumerate()
        .map(|(i, n)| Item::Oneform(i, n.as_str()))
        .collect();
    for f in target.functions() {
        match &f.differential {
            Differential::Declared(df) => items.push(Item::Function(&f.name, df)),
            Differential::Free => return Err(ModelError::FreeSymbol(f.name.clone())),
        }
    }
    items
        .par_iter()
        .map(|item| match item {
            Item::Oneform(i, n) => {
                let lhs = base.d(&images[*i])?;
                let rhs = pull(target.drule(n).expect("coframe rule"))?;
                Ok(Outcome::from_form(format!("d {n}"), &lhs.sub(&rhs)?))
            }
            Item::Function(n, df) => {
                let lhs = base.d_scalar(defs.function(n).expect("checked"))?;
                let rhs = pull(df)?;
                Ok(Outcome::from_form(format!("d {n}"), &lhs.sub(&rhs)?))
            }
        })
        .collect()
}

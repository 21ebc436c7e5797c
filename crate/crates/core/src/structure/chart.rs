use std::collections::BTreeMap;

use crate::coeff_ring::{Rational, Ring, Scalar};
use crate::exterior::{Basis, Form};

use super::{Constraint, ModelError, StructureModel};

/// A coordinate chart: the coordinate differentials form a closed coframe,
/// and named 1-forms are defined over it with rational coefficients.
#[derive(Debug, Clone)]
pub struct ChartModel {
    coordinates: Vec<String>,
    model: StructureModel,
    definitions: Vec<(String, Form)>,
}

impl ChartModel {
    /// A chart on `coordinates`; the differential of `x` is named `dx`.
    pub fn new(
        name: impl Into<String>,
        coordinates: &[&str],
        parameters: &BTreeMap<String, Rational>,
    ) -> Result<ChartModel, ModelError> {
        let coordinates: Vec<String> = coordinates.iter().map(|c| c.to_string()).collect();
        let diffs: Vec<String> = coordinates.iter().map(|c| format!("d{c}")).collect();
        let basis = Basis::coframe(diffs.clone())?;
        let ring = Ring::new(coordinates.clone(), parameters.clone())?;
        let drules = diffs
            .iter()
            .map(|n| (n.clone(), Form::zero(&basis, &ring, 2)))
            .collect();
        let functions = coordinates
            .iter()
            .zip(&diffs)
            .map(|(c, dc)| Ok((c.clone(), Some(Form::oneform(&basis, &ring, dc)?))))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let model = StructureModel::new(name, Vec::new(), ring, basis, drules, functions, Vec::new())?;
        Ok(ChartModel {
            coordinates,
            model,
            definitions: Vec::new(),
        })
    }

    /// Adds domain conditions such as `x - y > 0`.
    pub fn with_constraints(mut self, constraints: Vec<Constraint>) -> Result<ChartModel, ModelError> {
        let m = &self.model;
        let functions = m
            .functions()
            .iter()
            .map(|f| {
                let d = match &f.differential {
                    super::Differential::Declared(d) => Some(d.clone()),
                    super::Differential::Free => None,
                };
                (f.name.clone(), d)
            })
            .collect();
        let drules = m.drules().map(|(n, f)| (n.to_string(), f.clone())).collect();
        self.model = StructureModel::new(
            m.name(),
            Vec::new(),
            m.ring().clone(),
            m.basis().clone(),
            drules,
            functions,
            constraints,
        )?;
        Ok(self)
    }

    /// Defines a named 1-form over the coordinate differentials.
    pub fn define(&mut self, name: impl Into<String>, form: Form) -> Result<(), ModelError> {
        let name = name.into();
        if form.degree() != 1 && !form.is_zero() {
            return Err(ModelError::WrongDegree {
                name,
                expected: 1,
                found: form.degree(),
            });
        }
        if !form.basis().same(self.model.basis()) || !form.ring().same(self.model.ring()) {
            return Err(ModelError::Invalid(format!(
                "definition of `{name}` is not over the chart"
            )));
        }
        if self.definitions.iter().any(|(n, _)| *n == name) {
            return Err(ModelError::DuplicateRule(name));
        }
        self.definitions.push((name, form));
        Ok(())
    }

    pub fn name(&self) -> &str {
        self.model.name()
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    /// The chart as a structure model with `d(dx) = 0`.
    pub fn model(&self) -> &StructureModel {
        &self.model
    }

    pub fn ring(&self) -> &Ring {
        self.model.ring()
    }

    pub fn basis(&self) -> &Basis {
        self.model.basis()
    }

    pub fn definitions(&self) -> &[(String, Form)] {
        &self.definitions
    }

    pub fn definition(&self, name: &str) -> Option<&Form> {
        self.definitions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
    }

    pub fn coordinate(&self, name: &str) -> Result<Scalar, ModelError> {
        self.model.var(name)
    }

    pub fn d(&self, f: &Form) -> Result<Form, ModelError> {
        self.model.d(f)
    }

    pub fn d_scalar(&self, s: &Scalar) -> Result<Form, ModelError> {
        self.model.d_scalar(s)
    }
}

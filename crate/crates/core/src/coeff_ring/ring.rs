use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use super::{CoeffError, Polynomial, Rational, Scalar};

#[derive(Debug, PartialEq)]
struct RingData {
    variables: Vec<String>,
    index: HashMap<String, usize>,
    parameters: BTreeMap<String, Rational>,
}

/// The field of rational functions in an ordered list of variables, with a
/// set of numerically bound parameters (such as `eps = ±1`).
///
/// Cloning is cheap; all clones share the same variable table.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl Ring {
    pub fn new<S: Into<String>>(
        variables: impl IntoIterator<Item = S>,
        parameters: impl IntoIterator<Item = (String, Rational)>,
    ) -> Result<Ring, CoeffError> {
        let variables: Vec<String> = variables.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(variables.len());
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(CoeffError::DuplicateName(v.clone()));
            }
        }
        let mut params = BTreeMap::new();
        for (name, value) in parameters {
            if index.contains_key(&name) || params.contains_key(&name) {
                return Err(CoeffError::DuplicateName(name));
            }
            params.insert(name, value);
        }
        Ok(Ring(Arc::new(RingData {
            variables,
            index,
            parameters: params,
        })))
    }

    pub fn variables(&self) -> &[String] {
        &self.0.variables
    }

    pub fn num_variables(&self) -> usize {
        self.0.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn parameters(&self) -> &BTreeMap<String, Rational> {
        &self.0.parameters
    }

    pub fn parameter(&self, name: &str) -> Option<&Rational> {
        self.0.parameters.get(name)
    }

    /// Same ring: either shared or structurally identical.
    pub fn same(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    /// A ring with `extra` variables appended after the existing ones.
    /// Existing variable indices are preserved, so polynomials over `self`
    /// are valid over the result unchanged.
    pub fn extended<S: Into<String>>(
        &self,
        extra: impl IntoIterator<Item = S>,
    ) -> Result<Ring, CoeffError> {
        let vars = self
            .0
            .variables
            .iter()
            .cloned()
            .chain(extra.into_iter().map(Into::into));
        Ring::new(vars, self.0.parameters.clone())
    }

    pub fn zero(&self) -> Scalar {
        Scalar::from_parts_unchecked(self.clone(), Polynomial::zero(), Polynomial::one())
    }

    pub fn one(&self) -> Scalar {
        self.constant(Rational::from_integer(1.into()))
    }

    pub fn constant(&self, c: Rational) -> Scalar {
        Scalar::from_parts_unchecked(self.clone(), Polynomial::constant(c), Polynomial::one())
    }

    pub fn int(&self, n: i64) -> Scalar {
        self.constant(Rational::from_integer(n.into()))
    }

    pub fn ratio(&self, n: i64, d: i64) -> Scalar {
        self.constant(Rational::new(n.into(), d.into()))
    }

    pub fn var(&self, name: &str) -> Result<Scalar, CoeffError> {
        let i = self
            .var_index(name)
            .ok_or_else(|| CoeffError::UnknownVariable(name.to_string()))?;
        Ok(self.var_at(i))
    }

    pub fn var_at(&self, i: usize) -> Scalar {
        Scalar::from_parts_unchecked(self.clone(), Polynomial::var(i), Polynomial::one())
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring")
            .field("variables", &self.0.variables)
            .field("parameters", &self.0.parameters)
            .finish()
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

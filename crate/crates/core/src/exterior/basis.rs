use std::collections::HashMap;
use std::sync::Arc;

use super::FormError;

#[derive(Debug, PartialEq, Eq)]
struct BasisData {
    oneforms: Vec<String>,
    coframe_len: usize,
    opaque: Vec<String>,
    index: HashMap<String, usize>,
    opaque_index: HashMap<String, usize>,
}

/// Ordered basis of 1-form names: the coframe first, then connection forms,
/// plus a list of opaque 2-form symbols that are never expanded.
#[derive(Debug, Clone)]
pub struct Basis(Arc<BasisData>);

impl Basis {
    pub fn new(
        coframe: impl IntoIterator<Item = impl Into<String>>,
        connection: impl IntoIterator<Item = impl Into<String>>,
        opaque: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Basis, FormError> {
        let mut oneforms: Vec<String> = coframe.into_iter().map(Into::into).collect();
        let coframe_len = oneforms.len();
        oneforms.extend(connection.into_iter().map(Into::into));
        let opaque: Vec<String> = opaque.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, n) in oneforms.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(FormError::DuplicateName(n.clone()));
            }
        }
        let mut opaque_index = HashMap::new();
        for (i, n) in opaque.iter().enumerate() {
            if index.contains_key(n) || opaque_index.insert(n.clone(), i).is_some() {
                return Err(FormError::DuplicateName(n.clone()));
            }
        }
        Ok(Basis(Arc::new(BasisData {
            oneforms,
            coframe_len,
            opaque,
            index,
            opaque_index,
        })))
    }

    /// A basis without connection forms or opaque symbols.
    pub fn coframe(names: impl IntoIterator<Item = impl Into<String>>) -> Result<Basis, FormError> {
        Basis::new(names, Vec::<String>::new(), Vec::<String>::new())
    }

    pub fn oneforms(&self) -> &[String] {
        &self.0.oneforms
    }

    pub fn len(&self) -> usize {
        self.0.oneforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.oneforms.is_empty()
    }

    pub fn coframe_names(&self) -> &[String] {
        &self.0.oneforms[..self.0.coframe_len]
    }

    pub fn connection_names(&self) -> &[String] {
        &self.0.oneforms[self.0.coframe_len..]
    }

    pub fn is_connection(&self, i: usize) -> bool {
        i >= self.0.coframe_len
    }

    pub fn opaque_names(&self) -> &[String] {
        &self.0.opaque
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize, FormError> {
        self.index(name)
            .ok_or_else(|| FormError::UnknownName(name.to_string()))
    }

    pub fn opaque_index(&self, name: &str) -> Option<usize> {
        self.0.opaque_index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.oneforms[i]
    }

    pub fn opaque_name(&self, i: usize) -> &str {
        &self.0.opaque[i]
    }

    pub fn same(&self, other: &Basis) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    /// The same basis with some 1-form names replaced, positions unchanged.
    pub fn renamed(&self, renames: &[(&str, &str)]) -> Result<Basis, FormError> {
        let mut names = self.0.oneforms.clone();
        for (old, new) in renames {
            let i = self.require(old)?;
            names[i] = (*new).to_string();
        }
        let (cof, conn) = names.split_at(self.0.coframe_len);
        Basis::new(cof.to_vec(), conn.to_vec(), self.0.opaque.clone())
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

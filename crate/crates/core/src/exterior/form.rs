use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::coeff_ring::{CoeffError, Ring, Scalar};
use crate::linalg;

use super::{Basis, FormError};

/// Strictly increasing tuple of basis positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<u16>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    /// Sorts `indices`, returning the permutation sign, or `None` when an
    /// index repeats.
    pub fn sorted(indices: &[usize]) -> Option<(i8, MultiIndex)> {
        let mut v: Vec<u16> = indices.iter().map(|&i| i as u16).collect();
        let mut sign = 1i8;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((sign, MultiIndex(v)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&(i as u16)).is_ok()
    }

    /// `e_self ∧ e_other` as a signed index, or `None` if they share an index.
    pub fn merge(&self, other: &MultiIndex) -> Option<(i8, MultiIndex)> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut swaps = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] < b[j] {
                out.push(a[i]);
                i += 1;
            } else if a[i] > b[j] {
                // b[j] jumps over the remaining elements of a
                swaps += a.len() - i;
                out.push(b[j]);
                j += 1;
            } else {
                return None;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Some((if swaps % 2 == 0 { 1 } else { -1 }, MultiIndex(out)))
    }

    /// The index with the entry at `position` removed.
    pub fn without(&self, position: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v.remove(position);
        MultiIndex(v)
    }

    pub fn render(&self, basis: &Basis) -> String {
        self.indices()
            .map(|i| basis.name(i).to_string())
            .collect::<Vec<_>>()
            .join("/\\")
    }
}

/// Key of an opaque term `O ∧ e_I`.
type OpaqueKey = (usize, MultiIndex);

/// Homogeneous element of the exterior algebra over a [`Basis`], with
/// rational-function coefficients. Opaque 2-form symbols may appear as
/// `O ∧ e_I`; they have even degree, so they commute with everything.
#[derive(Clone)]
pub struct Form {
    basis: Basis,
    ring: Ring,
    degree: usize,
    terms: BTreeMap<MultiIndex, Scalar>,
    opaque: BTreeMap<OpaqueKey, Scalar>,
}

impl Form {
    pub fn zero(basis: &Basis, ring: &Ring, degree: usize) -> Form {
        Form {
            basis: basis.clone(),
            ring: ring.clone(),
            degree,
            terms: BTreeMap::new(),
            opaque: BTreeMap::new(),
        }
    }

    pub fn scalar(basis: &Basis, s: Scalar) -> Form {
        let mut f = Form::zero(basis, s.ring(), 0);
        if !s.is_zero() {
            f.terms.insert(MultiIndex::empty(), s);
        }
        f
    }

    /// The basis 1-form called `name`.
    pub fn oneform(basis: &Basis, ring: &Ring, name: &str) -> Result<Form, FormError> {
        let i = basis.require(name)?;
        Ok(Form::basis_element(basis, ring, i))
    }

    pub fn basis_element(basis: &Basis, ring: &Ring, i: usize) -> Form {
        let mut f = Form::zero(basis, ring, 1);
        f.terms.insert(MultiIndex(vec![i as u16]), ring.one());
        f
    }

    /// `coeff · e_{names[0]} ∧ e_{names[1]} ∧ ...` with the sign of sorting.
    pub fn monomial(
        basis: &Basis,
        coeff: Scalar,
        names: &[&str],
    ) -> Result<Form, FormError> {
        let idx = names
            .iter()
            .map(|n| basis.require(n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut f = Form::zero(basis, coeff.ring(), idx.len());
        if let Some((sign, mi)) = MultiIndex::sorted(&idx) {
            let c = if sign < 0 { -coeff } else { coeff };
            f.insert(mi, c);
        }
        Ok(f)
    }

    /// Builds a form from plain terms `c·e_I` and opaque terms `c·O∧e_I`;
    /// repeated keys are summed.
    pub fn from_terms(
        basis: &Basis,
        ring: &Ring,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Scalar)>,
        opaque: impl IntoIterator<Item = (usize, MultiIndex, Scalar)>,
    ) -> Form {
        let mut f = Form::zero(basis, ring, degree);
        for (mi, c) in terms {
            debug_assert_eq!(mi.len(), degree);
            f.insert(mi, c);
        }
        for (o, mi, c) in opaque {
            debug_assert_eq!(mi.len() + 2, degree);
            f.insert_opaque((o, mi), c);
        }
        f
    }

    /// The opaque 2-form called `name`.
    pub fn opaque_symbol(basis: &Basis, ring: &Ring, name: &str) -> Result<Form, FormError> {
        let o = basis
            .opaque_index(name)
            .ok_or_else(|| FormError::UnknownName(name.to_string()))?;
        let mut f = Form::zero(basis, ring, 2);
        f.opaque.insert((o, MultiIndex::empty()), ring.one());
        Ok(f)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.opaque.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len() + self.opaque.len()
    }

    pub fn has_opaque(&self) -> bool {
        !self.opaque.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    /// Opaque terms as `(opaque position, wedge companions, coefficient)`.
    pub fn opaque_terms(&self) -> impl Iterator<Item = (usize, &MultiIndex, &Scalar)> {
        self.opaque.iter().map(|((o, mi), c)| (*o, mi, c))
    }

    fn insert(&mut self, mi: MultiIndex, c: Scalar) {
        accumulate(&mut self.terms, mi, c);
    }

    fn insert_opaque(&mut self, key: OpaqueKey, c: Scalar) {
        accumulate(&mut self.opaque, key, c);
    }

    fn compatible(&self, other: &Form) -> Result<(), FormError> {
        if !self.basis.same(&other.basis) {
            return Err(FormError::BasisMismatch);
        }
        if !self.ring.same(&other.ring) {
            return Err(CoeffError::RingMismatch.into());
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form, FormError> {
        self.compatible(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (mi, c) in &other.terms {
            out.insert(mi.clone(), c.clone());
        }
        for (k, c) in &other.opaque {
            out.insert_opaque(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.map_unchecked(|c| -c)
    }

    pub fn scale(&self, s: &Scalar) -> Result<Form, FormError> {
        if !self.ring.same(s.ring()) {
            return Err(CoeffError::RingMismatch.into());
        }
        if s.is_zero() {
            return Ok(Form::zero(&self.basis, &self.ring, self.degree));
        }
        Ok(self.map_unchecked(|c| c * s))
    }

    fn map_unchecked(&self, f: impl Fn(&Scalar) -> Scalar) -> Form {
        let mut out = Form::zero(&self.basis, &self.ring, self.degree);
        for (mi, c) in &self.terms {
            out.insert(mi.clone(), f(c));
        }
        for (k, c) in &self.opaque {
            out.insert_opaque(k.clone(), f(c));
        }
        out
    }

    /// Applies `f` to every coefficient, producing a form over `ring`.
    pub fn map_coefficients<E>(
        &self,
        ring: &Ring,
        f: impl Fn(&Scalar) -> Result<Scalar, E>,
    ) -> Result<Form, E> {
        let mut out = Form::zero(&self.basis, ring, self.degree);
        for (mi, c) in &self.terms {
            out.insert(mi.clone(), f(c)?);
        }
        for (k, c) in &self.opaque {
            out.insert_opaque(k.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, FormError> {
        self.compatible(other)?;
        let mut out = Form::zero(&self.basis, &self.ring, self.degree + other.degree);
        if !self.opaque.is_empty() && !other.opaque.is_empty() {
            return Err(FormError::OpaqueProduct);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, mi)) = ma.merge(mb) {
                    let c = ca * cb;
                    out.insert(mi, if sign < 0 { -c } else { c });
                }
            }
            // e_A ∧ (O ∧ e_B) = O ∧ e_A ∧ e_B since O is even
            for ((o, mb), cb) in &other.opaque {
                if let Some((sign, mi)) = ma.merge(mb) {
                    let c = ca * cb;
                    out.insert_opaque((*o, mi), if sign < 0 { -c } else { c });
                }
            }
        }
        for ((o, ma), ca) in &self.opaque {
            for (mb, cb) in &other.terms {
                if let Some((sign, mi)) = ma.merge(mb) {
                    let c = ca * cb;
                    out.insert_opaque((*o, mi), if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn coefficient(&self, mi: &MultiIndex) -> Scalar {
        self.terms
            .get(mi)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Coefficient of `e_{names[0]} ∧ ...`, signed by the order of `names`.
    pub fn coefficient_of(&self, names: &[&str]) -> Result<Scalar, FormError> {
        let idx = names
            .iter()
            .map(|n| self.basis.require(n))
            .collect::<Result<Vec<_>, _>>()?;
        if idx.len() != self.degree {
            return Err(FormError::DegreeMismatch {
                left: self.degree,
                right: idx.len(),
            });
        }
        Ok(match MultiIndex::sorted(&idx) {
            None => self.ring.zero(),
            Some((sign, mi)) => {
                let c = self.coefficient(&mi);
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
        })
    }

    /// Coefficient of the opaque term `O ∧ e_I`.
    pub fn opaque_coefficient(&self, opaque: &str, mi: &MultiIndex) -> Scalar {
        self.basis
            .opaque_index(opaque)
            .and_then(|o| self.opaque.get(&(o, mi.clone())).cloned())
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Deletes every term whose wedge factors meet `drop`: the representative
    /// in the quotient by the ideal generated by those 1-forms.
    pub fn reduce_mod(&self, drop: &[&str]) -> Result<Form, FormError> {
        let idx: BTreeSet<usize> = drop
            .iter()
            .map(|n| self.basis.require(n))
            .collect::<Result<_, _>>()?;
        Ok(self.reduce_mod_indices(&idx))
    }

    pub fn reduce_mod_indices(&self, drop: &BTreeSet<usize>) -> Form {
        let keep = |mi: &MultiIndex| mi.indices().all(|i| !drop.contains(&i));
        Form {
            basis: self.basis.clone(),
            ring: self.ring.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(mi, _)| keep(mi))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            opaque: self
                .opaque
                .iter()
                .filter(|((_, mi), _)| keep(mi))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Pulls the form back along a linear change of coframe.
    ///
    /// Every 1-form of `self.basis()` named in `replacements` is replaced by
    /// the given degree-1 form over `target`; every other name maps to the
    /// `target` 1-form of the same name. Opaque symbols map by name. The
    /// change must be invertible.
    pub fn change_basis(
        &self,
        target: &Basis,
        replacements: &BTreeMap<String, Form>,
    ) -> Result<Form, FormError> {
        let images = basis_images(&self.basis, &self.ring, target, replacements)?;
        self.apply_images(target, &images)
    }

    pub(crate) fn apply_images(&self, target: &Basis, images: &[Form]) -> Result<Form, FormError> {
        let mut out = Form::zero(target, &self.ring, self.degree);
        for (mi, c) in &self.terms {
            let mut acc = Form::scalar(target, c.clone());
            for i in mi.indices() {
                acc = acc.wedge(&images[i])?;
            }
            out = out.add(&acc)?;
        }
        for ((o, mi), c) in &self.opaque {
            let name = self.basis.opaque_name(*o);
            let sym = Form::opaque_symbol(target, &self.ring, name)?;
            let mut acc = sym.scale(c)?;
            for i in mi.indices() {
                acc = acc.wedge(&images[i])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Solves `0 = identity` for an opaque 2-form that appears only as
    /// `opaque ∧ partner`.
    ///
    /// The identity is first reduced modulo `drop`. Writing what remains as
    /// `c·opaque∧partner + Y∧partner + Z` with `Z` free of `partner`, the
    /// returned class is `-Y/c` reduced modulo `drop ∪ {partner}`, and `Z`
    /// is returned as the residue the identity leaves on its own.
    pub fn isolate_opaque(
        &self,
        opaque: &str,
        partner: &str,
        drop: &[&str],
    ) -> Result<Isolated, FormError> {
        if self.degree != 3 {
            return Err(FormError::DegreeMismatch {
                left: self.degree,
                right: 3,
            });
        }
        let o = self
            .basis
            .opaque_index(opaque)
            .ok_or_else(|| FormError::UnknownName(opaque.to_string()))?;
        let p = self.basis.require(partner)?;
        let reduced = self.reduce_mod(drop)?;
        let mut drop_all: BTreeSet<usize> = drop
            .iter()
            .map(|n| self.basis.require(n))
            .collect::<Result<_, _>>()?;
        drop_all.insert(p);

        let mut coeff: Option<Scalar> = None;
        for ((oo, mi), c) in &reduced.opaque {
            if *oo != o {
                return Err(FormError::SurvivingOpaque(
                    self.basis.opaque_name(*oo).to_string(),
                ));
            }
            if mi.len() != 1 || !mi.contains(p) {
                return Err(FormError::WrongPartner {
                    opaque: opaque.to_string(),
                    partner: partner.to_string(),
                });
            }
            coeff = Some(c.clone());
        }

        // Split the ordinary part: Y∧partner collects the terms containing
        // the partner, with the partner moved to the right.
        let mut y = Form::zero(&self.basis, &self.ring, 2);
        let mut z = Form::zero(&self.basis, &self.ring, 3);
        for (mi, c) in &reduced.terms {
            if mi.contains(p) {
                let rest: Vec<usize> = mi.indices().filter(|&i| i != p).collect();
                let pos = mi.indices().position(|i| i == p).expect("contains");
                // moving e_p from position `pos` to the end of a 3-index
                let sign = if (mi.len() - 1 - pos) % 2 == 0 { 1 } else { -1 };
                let (_, rest_mi) = MultiIndex::sorted(&rest).expect("distinct");
                y.insert(rest_mi, if sign < 0 { -c.clone() } else { c.clone() });
            } else {
                z.insert(mi.clone(), c.clone());
            }
        }
        let class = match coeff {
            Some(c) => y.scale(&(-(self.ring.one() / c)))?.reduce_mod_indices(&drop_all),
            None => Form::zero(&self.basis, &self.ring, 2),
        };
        Ok(Isolated {
            class,
            residue: z,
            found: reduced.has_opaque(),
        })
    }

    /// Canonical text, e.g. `(H1) w1/\w2 + (-1) w3/\w4`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (mi, c) in &self.terms {
            if mi.is_empty() {
                parts.push(format!("({})", c.render()));
            } else {
                parts.push(format!("({}) {}", c.render(), mi.render(&self.basis)));
            }
        }
        for ((o, mi), c) in &self.opaque {
            let name = self.basis.opaque_name(*o);
            if mi.is_empty() {
                parts.push(format!("({}) {}", c.render(), name));
            } else {
                parts.push(format!("({}) {}/\\{}", c.render(), name, mi.render(&self.basis)));
            }
        }
        parts.join(" + ")
    }

    /// The coefficients as plain scalars, for equation extraction.
    pub fn coefficients(&self) -> impl Iterator<Item = &Scalar> {
        self.terms.values().chain(self.opaque.values())
    }

    /// Moves the form onto a ring that extends its own variable list.
    pub fn lift(&self, ring: &Ring) -> Form {
        self.map_coefficients(ring, |c| Ok::<_, FormError>(c.lift(ring)))
            .expect("infallible")
    }

    /// Reinterprets the form over another basis with the same names at the
    /// same positions, such as a renamed copy.
    pub fn rebase(&self, basis: &Basis) -> Result<Form, FormError> {
        if basis.len() != self.basis.len() {
            return Err(FormError::BasisMismatch);
        }
        let mut f = self.clone();
        f.basis = basis.clone();
        Ok(f)
    }
}

/// Result of [`Form::isolate_opaque`].
#[derive(Clone, Debug)]
pub struct Isolated {
    pub class: Form,
    pub residue: Form,
    /// Whether the opaque symbol survived the reduction at all.
    pub found: bool,
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Scalar>, k: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Images of all source basis 1-forms under a replacement map; checks
/// that the resulting square coefficient matrix is invertible.
pub(crate) fn basis_images(
    source: &Basis,
    ring: &Ring,
    target: &Basis,
    replacements: &BTreeMap<String, Form>,
) -> Result<Vec<Form>, FormError> {
    for name in replacements.keys() {
        source.require(name)?;
    }
    if source.opaque_names() != target.opaque_names() {
        return Err(FormError::BasisMismatch);
    }
    let mut images = Vec::with_capacity(source.len());
    for name in source.oneforms() {
        let img = match replacements.get(name) {
            Some(f) => {
                if f.degree != 1 || !f.basis.same(target) || f.has_opaque() {
                    return Err(FormError::NotInvertible(format!(
                        "replacement for `{name}` is not a 1-form over the target basis"
                    )));
                }
                f.clone()
            }
            None => Form::oneform(target, ring, name)?,
        };
        images.push(img);
    }
    if source.len() != target.len() {
        return Err(FormError::NotInvertible(format!(
            "source has {} 1-forms, target has {}",
            source.len(),
            target.len()
        )));
    }
    let matrix: Vec<Vec<Scalar>> = images
        .iter()
        .map(|f| {
            (0..target.len())
                .map(|j| f.coefficient(&MultiIndex(vec![j as u16])))
                .collect()
        })
        .collect();
    if matrix.is_empty() {
        return Ok(images);
    }
    let det = linalg::determinant(&matrix).map_err(|e| FormError::NotInvertible(e.to_string()))?;
    if det.is_zero() {
        return Err(FormError::NotInvertible(
            "the replacement matrix is singular".to_string(),
        ));
    }
    Ok(images)
}

impl PartialEq for Form {
    /// Exact equality: the difference has no nonzero coefficient.
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.degree == other.degree && self.sub(other).is_ok_and(|d| d.is_zero())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.degree, self.render())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

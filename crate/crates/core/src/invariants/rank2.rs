use std::collections::BTreeMap;

use crate::coeff_ring::{Monomial, Polynomial, Rational, Ring, Scalar};
use crate::linalg;
use crate::report::Outcome;
use crate::structure::StructureModel;

use super::{h_matrix, minor_det, HMatrix, InvariantError};

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessMinor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub minor: Scalar,
}

/// Proof that the 2×2 minors of h never vanish together on the domain.
///
/// Either one minor, or the resultant in `eliminated` of two minors
/// (after their constraint factors are split off), equals
/// `unit · Π factorᵏ` with every factor the numerator of a domain
/// constraint. The resultant lies in the ideal of the two minors, so both
/// vanishing at an admissible point would force it to vanish there.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub minors: Vec<WitnessMinor>,
    pub eliminated: Option<String>,
    pub certificate: Scalar,
    pub unit: Rational,
    pub factors: Vec<(String, u32)>,
}

impl Witness {
    pub fn describe(&self) -> String {
        let names: Vec<String> = self
            .minors
            .iter()
            .map(|m| format!("det h^{}_{} = {}", join(&m.rows), join(&m.cols), m.minor.render()))
            .collect();
        let factors: Vec<String> = self
            .factors
            .iter()
            .map(|(f, k)| format!("({f})^{k}"))
            .collect();
        let cert = match &self.eliminated {
            Some(x) => format!("resultant in {x}"),
            None => "minor".to_string(),
        };
        format!(
            "{}; {cert} = {} * {}",
            names.join("; "),
            crate::coeff_ring::render_rational(&self.unit),
            if factors.is_empty() { "1".to_string() } else { factors.join(" * ") }
        )
    }
}

#[derive(Debug, Clone)]
pub struct Rank2Report {
    pub submodel: StructureModel,
    pub h: HMatrix,
    pub outcomes: Vec<Outcome>,
    pub witness: Option<Witness>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Images of the variables of `model`'s ring in the sub-model ring: bound
/// symbols go to their bindings, the rest to themselves.
fn restriction(
    model: &StructureModel,
    bindings: &BTreeMap<String, Scalar>,
    target: &Ring,
) -> Result<Vec<Scalar>, InvariantError> {
    let names = model.ring().variables();
    let plain: Vec<Scalar> = names
        .iter()
        .map(|n| target.var(n).unwrap_or_else(|_| target.zero()))
        .collect();
    names
        .iter()
        .enumerate()
        .map(|(v, n)| match bindings.get(n) {
            Some(e) => Ok(e.compose(&plain, target)?),
            None => Ok(plain[v].clone()),
        })
        .collect()
}

/// Splits off the constraint factors of `p`; returns the leftover and the
/// multiplicities.
fn peel(p: &Polynomial, factors: &[(String, Polynomial)]) -> (Polynomial, Vec<(String, u32)>) {
    let mut rest = p.clone();
    let mut found = Vec::new();
    for (name, f) in factors {
        let mut k = 0;
        while let Some(q) = rest.div_exact(f) {
            rest = q;
            k += 1;
        }
        if k > 0 {
            found.push((name.clone(), k));
        }
    }
    (rest, found)
}

/// On the sub-model cut out by `bindings`, checks that every 3×3 minor of h
/// vanishes identically and finds a 2×2 minor that the domain constraints
/// keep away from zero.
pub fn rank2_locus_check(
    model: &StructureModel,
    bindings: &BTreeMap<String, Scalar>,
) -> Result<Rank2Report, InvariantError> {
    let sub = model.derive_submodel(bindings)?;
    let images = restriction(model, bindings, sub.ring())?;
    let h = h_matrix(model)?.compose(&images, sub.ring())?;

    let mut outcomes = Vec::new();
    for rows in subsets(4, 3) {
        for cols in subsets(7, 3) {
            let det = minor_det(&h, &rows, &cols)?;
            outcomes.push(Outcome::from_scalar(
                format!("det h^{}_{}", join(&rows), join(&cols)),
                &det,
            ));
        }
    }

    let factors: Vec<(String, Polynomial)> = sub
        .constraints()
        .iter()
        .filter(|c| c.expr.numerator().total_degree() > 0)
        .map(|c| (c.expr.render(), c.expr.numerator().clone()))
        .collect();
    let witness = find_witness(&h, &factors)?;
    outcomes.push(match &witness {
        Some(w) => Outcome::verdict("rank 2 witness", true, w.describe()),
        None => Outcome::verdict("rank 2 witness", false, "no certificate that rank >= 2"),
    });
    Ok(Rank2Report {
        submodel: sub,
        h,
        outcomes,
        witness,
    })
}

fn find_witness(
    h: &HMatrix,
    factors: &[(String, Polynomial)],
) -> Result<Option<Witness>, InvariantError> {
    let ring = h.ring();
    let mut minors = Vec::new();
    for rows in subsets(4, 2) {
        for cols in subsets(7, 2) {
            let det = minor_det(h, &rows, &cols)?;
            if det.is_zero() {
                continue;
            }
            let (rest, found) = peel(det.numerator(), factors);
            let m = WitnessMinor { rows: rows.clone(), cols, minor: det };
            if let Some(unit) = rest.as_constant() {
                return Ok(Some(Witness {
                    certificate: m.minor.clone(),
                    minors: vec![m],
                    eliminated: None,
                    unit,
                    factors: found,
                }));
            }
            minors.push((m, rest));
        }
    }
    for (i, (a, ra)) in minors.iter().enumerate() {
        for (b, rb) in &minors[i + 1..] {
            for x in ra.variables() {
                if !rb.variables().contains(&x) {
                    continue;
                }
                let res = resultant(ra, rb, x, ring)?;
                if res.is_zero() {
                    continue;
                }
                let (rest, found) = peel(&res, factors);
                if let Some(unit) = rest.as_constant() {
                    return Ok(Some(Witness {
                        minors: vec![a.clone(), b.clone()],
                        eliminated: Some(ring.variables()[x].clone()),
                        certificate: Scalar::from_polynomial(ring.clone(), res),
                        unit,
                        factors: found,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Coefficients of `p` as a polynomial in variable `x`, lowest degree first.
fn coefficients_in(p: &Polynomial, x: usize) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::zero(); p.degree_in(x) as usize + 1];
    for (m, c) in p.terms() {
        let k = m.exponent(x);
        let rest = Monomial::from_pairs(m.pairs().filter(|(v, _)| *v != x));
        out[k as usize].add_term(rest, c.clone());
    }
    out
}

/// Sylvester resultant of `p` and `q` with respect to `x`.
fn resultant(p: &Polynomial, q: &Polynomial, x: usize, ring: &Ring) -> Result<Polynomial, InvariantError> {
    let a = coefficients_in(p, x);
    let b = coefficients_in(q, x);
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (coeffs, shifts) in [(&a, n), (&b, m)] {
        for s in 0..shifts {
            let mut row = vec![ring.zero(); size];
            for (k, c) in coeffs.iter().rev().enumerate() {
                row[s + k] = Scalar::from_polynomial(ring.clone(), c.clone());
            }
            rows.push(row);
        }
    }
    let det = linalg::determinant(&rows)?;
    Ok(det.numerator().scale(&det.denominator().as_constant().expect("polynomial entries").recip()))
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(|i| i.to_string()).collect()
}

use std::collections::BTreeMap;

use crate::coeff_ring::{Rational, Ring, Scalar};
use crate::dsl;
use crate::linalg;
use crate::report::Outcome;
use crate::structure::{Differential, StructureModel};

use super::InvariantError;

/// The functions whose differentials make up the rows of h.
pub const H_NAMES: [&str; 4] = ["H1", "H2", "H3", "H4"];

/// Column order of h: the coefficients of ω⁰, ω̄⁰, γ, ω¹, ω², ω³, ω⁴.
pub const COLUMNS: [&str; 7] = ["w0", "wb0", "g", "w1", "w2", "w3", "w4"];

/// The 4×7 matrix of dH-coefficients, `dH_i = Σ h_{iλ} e_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HMatrix {
    ring: Ring,
    entries: Vec<Vec<Scalar>>,
}

impl HMatrix {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.entries
    }

    /// Entry h_{ij}, 1-based as in the usual notation.
    pub fn entry(&self, i: usize, j: usize) -> Result<&Scalar, InvariantError> {
        self.entries
            .get(i.wrapping_sub(1))
            .and_then(|r| r.get(j.wrapping_sub(1)))
            .ok_or(InvariantError::Index { row: i, col: j })
    }

    /// Every entry composed with `images` (one per ring variable).
    pub fn compose(&self, images: &[Scalar], target: &Ring) -> Result<HMatrix, InvariantError> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|c| c.compose(images, target)).collect())
            .collect::<Result<_, _>>()?;
        Ok(HMatrix {
            ring: target.clone(),
            entries,
        })
    }

    /// The matrix evaluated at a point of its ring.
    pub fn eval(&self, point: &BTreeMap<String, Rational>) -> Result<Vec<Vec<Rational>>, InvariantError> {
        Ok(self
            .entries
            .iter()
            .map(|r| r.iter().map(|c| c.eval(point)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?)
    }
}

/// Reads h off the dH rules of a model with functions H1..H4 and the
/// coframe ω⁰, ω̄⁰, γ, ω¹..ω⁴.
pub fn h_matrix(model: &StructureModel) -> Result<HMatrix, InvariantError> {
    let entries = H_NAMES
        .iter()
        .map(|h| {
            let f = model
                .function(h)
                .ok_or_else(|| InvariantError::NotTypeA(format!("`{h}` is not a function of the model")))?;
            let Differential::Declared(dh) = &f.differential else {
                return Err(InvariantError::NotTypeA(format!("`{h}` has no declared differential")));
            };
            COLUMNS
                .iter()
                .map(|c| Ok(dh.coefficient_of(&[c])?))
                .collect::<Result<Vec<_>, InvariantError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HMatrix {
        ring: model.ring().clone(),
        entries,
    })
}

fn check_indices(idx: &[usize], bound: usize, what: &str) -> Result<Vec<usize>, InvariantError> {
    let mut seen = Vec::new();
    for &i in idx {
        if i == 0 || i > bound {
            return Err(InvariantError::Size(format!("{what} index {i} is outside 1..={bound}")));
        }
        seen.push(i - 1);
    }
    Ok(seen)
}

/// Determinant of the minor on the given rows and columns (1-based).
/// Repeated indices are allowed and give 0.
pub fn minor_det(h: &HMatrix, rows: &[usize], cols: &[usize]) -> Result<Scalar, InvariantError> {
    if rows.len() != cols.len() || rows.is_empty() || rows.len() > 4 {
        return Err(InvariantError::Size(format!(
            "minor needs equally many rows and columns (at most 4), got {} and {}",
            rows.len(),
            cols.len()
        )));
    }
    let r = check_indices(rows, 4, "row")?;
    let c = check_indices(cols, 7, "column")?;
    Ok(linalg::determinant(&linalg::submatrix(&h.entries, &r, &c))?)
}

/// The square minor on columns `cols` and all four rows.
pub fn column_minor(h: &HMatrix, cols: &[usize]) -> Result<Scalar, InvariantError> {
    minor_det(h, &[1, 2, 3, 4], cols)
}

fn scalar(ring: &Ring, text: &str) -> Scalar {
    dsl::parse_scalar(text, ring).expect("well-formed builtin expression")
}

/// χ₁, χ₂, χ₃ over a ring with variables H1..H4 and the parameter eps.
pub fn chi(ring: &Ring) -> Result<[Scalar; 3], InvariantError> {
    for h in H_NAMES {
        ring.var(h)?;
    }
    if ring.parameter("eps").is_none() {
        return Err(InvariantError::NotTypeA("eps is not bound".to_string()));
    }
    let c1 = scalar(ring, "H2 - 1");
    let c2 = scalar(ring, "H1^2 - eps*H2");
    let c3 = scalar(ring, "-eps*(3*H2*H3 + H3 + 4*H2)") * &c2
        - scalar(ring, "(eps*H2 + 3*H1^2)*(H4 + eps)") * &c1;
    Ok([c1, c2, c3])
}

/// χ₁, χ₂, χ₃ at a point, in plain rational arithmetic.
pub fn chi_at(eps: i64, h: &[Rational; 4]) -> [Rational; 3] {
    let e = Rational::from_integer(eps.into());
    let one = Rational::from_integer(1.into());
    let k = |n: i64| Rational::from_integer(n.into());
    let [h1, h2, h3, h4] = h;
    let c1 = h2 - &one;
    let c2 = h1 * h1 - &e * h2;
    let c3 = -(&e * (k(3) * h2 * h3 + h3 + k(4) * h2)) * &c2
        - (&e * h2 + k(3) * h1 * h1) * (h4 + &e) * &c1;
    [c1, c2, c3]
}

/// A displayed determinant identity: the minor on `rows`×`cols` equals
/// `closed`, on the locus where `locus` holds (empty means everywhere).
#[derive(Debug, Clone)]
pub struct MinorIdentity {
    pub label: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub closed: String,
    pub locus: Vec<(&'static str, &'static str)>,
}

/// The determinant identities for h.
pub fn minor_identities() -> Vec<MinorIdentity> {
    let all = vec![1, 2, 3, 4];
    let chi1 = "(H2 - 1)";
    let chi2 = "(H1^2 - eps*H2)";
    let chi3 = format!(
        "(-eps*(3*H2*H3 + H3 + 4*H2)*{chi2} - (eps*H2 + 3*H1^2)*(H4 + eps)*{chi1})"
    );
    let mk = |label: &str, rows: &[usize], cols: &[usize], closed: String, locus| MinorIdentity {
        label: label.to_string(),
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        closed,
        locus,
    };
    vec![
        mk(
            "det h_1246",
            &all,
            &[1, 2, 4, 6],
            format!("H2*{chi1}*{chi2}*{chi3}/(32*H1^5)"),
            vec![],
        ),
        mk(
            "det h_2346",
            &all,
            &[2, 3, 4, 6],
            "-eps*(H3 + 1)^2*(H1^2 - eps)^2/(2*H1^4)".to_string(),
            vec![("H2", "1")],
        ),
        mk(
            "det h_1346",
            &all,
            &[1, 3, 4, 6],
            "-(H1^2 - eps)^2*H1*(H4 + eps)^2/2".to_string(),
            vec![("H2", "eps*H1^2")],
        ),
        mk(
            "det h^124_236",
            &[1, 2, 4],
            &[2, 3, 6],
            format!("-{chi2}*H2*(3*H2 + 1)*(H3 + 1)*(H4 + eps)/(2*H1^2)"),
            vec![],
        ),
        mk(
            "det h^123_126",
            &[1, 2, 3],
            &[1, 2, 6],
            format!("-{chi1}*{chi2}*H2*((3*H2 + 1)*(H3 + 1) + {chi1})/(8*H1^3)"),
            vec![],
        ),
        mk(
            "det h^124_234",
            &[1, 2, 4],
            &[2, 3, 4],
            format!("eps*{chi2}*H2*(H3 + 1)*((3*eps*H1^2 + H2)*(H4 + eps) + {chi2})/(2*H1^3)"),
            vec![],
        ),
    ]
}

/// Substitutes `name ↦ expr` pairs (texts over the same ring) into `s`.
pub(crate) fn on_locus(s: &Scalar, locus: &[(&str, &str)]) -> Result<Scalar, InvariantError> {
    let ring = s.ring();
    let mut b = BTreeMap::new();
    for (n, e) in locus {
        let v = ring
            .var_index(n)
            .ok_or_else(|| InvariantError::NotTypeA(format!("no variable `{n}`")))?;
        b.insert(v, dsl::parse_scalar(e, ring).map_err(|e| InvariantError::Input(e.to_string()))?);
    }
    Ok(s.substitute(&b)?)
}

/// Checks every identity of [`minor_identities`] against the minors of h.
pub fn verify_minor_identities(model: &StructureModel) -> Result<Vec<Outcome>, InvariantError> {
    let h = h_matrix(model)?;
    minor_identities()
        .into_iter()
        .map(|id| {
            let det = minor_det(&h, &id.rows, &id.cols)?;
            let closed = dsl::parse_scalar(&id.closed, model.ring())
                .map_err(|e| InvariantError::Input(e.to_string()))?;
            let residual = on_locus(&(det - closed), &id.locus)?;
            Ok(Outcome::from_scalar(id.label, &residual))
        })
        .collect()
}

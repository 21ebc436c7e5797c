//! The `.eds` model-file language.
//!
//! ```text
//! model NAME {
//!   param eps in {1, -1};
//!   vars H1 > 0, H2 != 0, H3;
//!   require H1^2 - eps != 0;
//!   coframe w0, w1, w2;
//!   connection phi;
//!   d w0 = H1*w1/\w2 - phi/\w0;
//!   d H1 = (H2 - 1)*w0;
//! }
//! ```
//!
//! Scalars are rational expressions in the declared variables and
//! parameters. A variable without a `d` rule is a free function symbol.
//! Each connection form `phi` comes with an opaque 2-form `dphi`. A
//! `require` item states a domain condition on an arbitrary expression,
//! and a right side may be the literal `0`.

mod lexer;
mod parser;
mod printer;

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff_ring::{Rational, Ring, Scalar};
use crate::exterior::{Basis, Form};
use crate::structure::{Constraint, ParamDecl, Relation, StructureModel};

pub use parser::parse;
pub use printer::print;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntax,
    Undeclared,
    DuplicateRule,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical error",
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Undeclared => "undeclared name",
            ErrorKind::DuplicateRule => "duplicate rule",
            ErrorKind::Semantic => "invalid model",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}:{}: {kind}: {message}", span.line, span.column)]
pub struct DslError {
    pub kind: ErrorKind,
    pub span: Span,
    pub message: String,
}

impl DslError {
    pub(crate) fn new(kind: ErrorKind, span: Span, message: impl Into<String>) -> DslError {
        DslError {
            kind,
            span,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermExpr {
    pub negative: bool,
    pub coeff: Option<Expr>,
    pub wedge: Vec<String>,
    pub span: Span,
}

/// A form right side; no terms means the literal `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormExpr {
    pub terms: Vec<TermExpr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub relation: Option<(Relation, Rational)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Requirement {
    pub expr: Expr,
    pub relation: Relation,
    pub bound: Rational,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub name: String,
    pub form: FormExpr,
    pub span: Span,
}

/// Parsed model file, before parameters are bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub name: String,
    pub params: Vec<ParamDecl>,
    pub vars: Vec<VarDecl>,
    pub requires: Vec<Requirement>,
    pub coframe: Vec<String>,
    pub connection: Vec<String>,
    pub rules: Vec<Rule>,
    pub(crate) end: Span,
}

/// Name of the opaque 2-form standing for d of connection form `c`.
pub fn opaque_name(connection: &str) -> String {
    format!("d{connection}")
}

fn semantic(span: Span, e: impl fmt::Display) -> DslError {
    DslError::new(ErrorKind::Semantic, span, e.to_string())
}

impl ModelFile {
    /// Binds `eps` (when given) and builds the model.
    pub fn instantiate_eps(&self, eps: Option<i64>) -> Result<StructureModel, DslError> {
        let mut b = BTreeMap::new();
        if let Some(e) = eps {
            b.insert("eps".to_string(), Rational::from_integer(e.into()));
        }
        self.instantiate(&b)
    }

    /// Builds the model with every declared parameter bound to an allowed
    /// value. Bindings for undeclared parameters are ignored.
    pub fn instantiate(
        &self,
        bindings: &BTreeMap<String, Rational>,
    ) -> Result<StructureModel, DslError> {
        let mut params = BTreeMap::new();
        for p in &self.params {
            let v = bindings.get(&p.name).ok_or_else(|| {
                semantic(self.end, format!("parameter `{}` needs a value", p.name))
            })?;
            if !p.allowed.contains(v) {
                return Err(semantic(
                    self.end,
                    format!("value {v} is not allowed for parameter `{}`", p.name),
                ));
            }
            params.insert(p.name.clone(), v.clone());
        }
        let opaque: Vec<String> = self.connection.iter().map(|c| opaque_name(c)).collect();
        let basis = Basis::new(self.coframe.clone(), self.connection.clone(), opaque)
            .map_err(|e| semantic(self.end, e))?;
        let vars: Vec<String> = self.vars.iter().map(|v| v.name.clone()).collect();
        let free: Vec<String> = vars
            .iter()
            .filter(|v| !self.rules.iter().any(|r| &r.name == *v))
            .cloned()
            .collect();
        let ring = StructureModel::build_ring(&vars, &free, &basis, &params)
            .map_err(|e| semantic(self.end, e))?;

        let mut drules = Vec::new();
        let mut fdiffs: BTreeMap<&str, Form> = BTreeMap::new();
        for r in &self.rules {
            let degree = if basis.index(&r.name).is_some() { 2 } else { 1 };
            let f = eval_form(&r.form, &basis, &ring, degree)?;
            if degree == 2 {
                drules.push((r.name.clone(), f));
            } else {
                fdiffs.insert(&r.name, f);
            }
        }
        let functions = vars
            .iter()
            .map(|v| (v.clone(), fdiffs.get(v.as_str()).cloned()))
            .collect();
        let mut constraints = Vec::new();
        for v in &self.vars {
            if let Some((rel, bound)) = &v.relation {
                let e = ring.var(&v.name).expect("declared") - ring.constant(bound.clone());
                constraints.push(Constraint::new(e, *rel));
            }
        }
        for r in &self.requires {
            let e = eval_expr(&r.expr, &ring).map_err(|e| semantic(r.span, e))?;
            constraints.push(Constraint::new(e - ring.constant(r.bound.clone()), r.relation));
        }
        StructureModel::new(
            self.name.clone(),
            self.params.clone(),
            ring,
            basis,
            drules,
            functions,
            constraints,
        )
        .map_err(|e| semantic(self.end, e))
    }
}

pub(crate) fn eval_expr(e: &Expr, ring: &Ring) -> Result<Scalar, String> {
    Ok(match e {
        Expr::Num(n) => ring.constant(n.clone()),
        Expr::Ident(n) => match ring.parameter(n) {
            Some(v) => ring.constant(v.clone()),
            None => ring.var(n).map_err(|e| e.to_string())?,
        },
        Expr::Neg(a) => -eval_expr(a, ring)?,
        Expr::Add(a, b) => eval_expr(a, ring)? + eval_expr(b, ring)?,
        Expr::Sub(a, b) => eval_expr(a, ring)? - eval_expr(b, ring)?,
        Expr::Mul(a, b) => eval_expr(a, ring)? * eval_expr(b, ring)?,
        Expr::Div(a, b) => eval_expr(a, ring)?
            .checked_div(&eval_expr(b, ring)?)
            .map_err(|e| e.to_string())?,
        Expr::Pow(a, k) => eval_expr(a, ring)?.pow(*k).map_err(|e| e.to_string())?,
    })
}

pub(crate) fn eval_form(
    f: &FormExpr,
    basis: &Basis,
    ring: &Ring,
    degree: usize,
) -> Result<Form, DslError> {
    let mut out = Form::zero(basis, ring, degree);
    for t in &f.terms {
        let mut c = match &t.coeff {
            Some(e) => eval_expr(e, ring).map_err(|e| semantic(t.span, e))?,
            None => ring.one(),
        };
        if t.negative {
            c = -c;
        }
        let mut plain = Vec::new();
        let mut sym: Option<Form> = None;
        let mut term_degree = 0;
        for n in &t.wedge {
            if basis.index(n).is_some() {
                plain.push(n.as_str());
                term_degree += 1;
            } else {
                if sym.is_some() {
                    return Err(semantic(t.span, "a term may hold at most one opaque 2-form"));
                }
                sym = Some(Form::opaque_symbol(basis, ring, n).map_err(|e| semantic(t.span, e))?);
                term_degree += 2;
            }
        }
        if term_degree != degree {
            return Err(semantic(
                t.span,
                format!("term has degree {term_degree}, expected {degree}"),
            ));
        }
        let mut term = Form::monomial(basis, c, &plain).map_err(|e| semantic(t.span, e))?;
        if let Some(s) = sym {
            term = s.wedge(&term).map_err(|e| semantic(t.span, e))?;
        }
        out = out.add(&term).map_err(|e| semantic(t.span, e))?;
    }
    Ok(out)
}

/// Parses a scalar expression over `ring`; identifiers are its variables
/// and parameters.
pub fn parse_scalar(text: &str, ring: &Ring) -> Result<Scalar, DslError> {
    let names = parser::Names::for_ring(ring, None);
    let expr = parser::parse_standalone_scalar(text, &names)?;
    eval_expr(&expr, ring).map_err(|e| semantic(Span { line: 1, column: 1 }, e))
}

/// Parses a form of the given degree over `basis` and `ring`.
pub fn parse_form(text: &str, basis: &Basis, ring: &Ring, degree: usize) -> Result<Form, DslError> {
    let names = parser::Names::for_ring(ring, Some(basis));
    let f = parser::parse_standalone_form(text, &names)?;
    eval_form(&f, basis, ring, degree)
}

/// Parses and instantiates a model file in one step.
pub fn load(text: &str, eps: Option<i64>) -> Result<StructureModel, DslError> {
    parse(text)?.instantiate_eps(eps)
}

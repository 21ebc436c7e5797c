use std::collections::HashSet;

use num_traits::ToPrimitive;

use crate::coeff_ring::{Rational, Ring};
use crate::exterior::Basis;
use crate::structure::{ParamDecl, Relation};

use super::lexer::{lex, Tok};
use super::{
    opaque_name, DslError, ErrorKind, Expr, FormExpr, ModelFile, Requirement, Rule, Span,
    TermExpr, VarDecl,
};

/// Names visible to expressions: scalar identifiers and wedge factors.
#[derive(Default)]
pub(crate) struct Names {
    scalars: HashSet<String>,
    vars: HashSet<String>,
    oneforms: HashSet<String>,
    opaque: HashSet<String>,
}

impl Names {
    pub(crate) fn for_ring(ring: &Ring, basis: Option<&Basis>) -> Names {
        let mut n = Names::default();
        n.scalars.extend(ring.variables().iter().cloned());
        n.scalars.extend(ring.parameters().keys().cloned());
        if let Some(b) = basis {
            n.oneforms.extend(b.oneforms().iter().cloned());
            n.opaque.extend(b.opaque_names().iter().cloned());
        }
        n
    }

    fn is_wedge_factor(&self, s: &str) -> bool {
        self.oneforms.contains(s) || self.opaque.contains(s)
    }

    /// Declared scalars, plus derivative symbols `f_b` of a declared
    /// variable `f` and a declared 1-form `b`.
    fn is_scalar(&self, s: &str) -> bool {
        self.scalars.contains(s)
            || s.match_indices('_').any(|(i, _)| {
                self.vars.contains(&s[..i]) && self.oneforms.contains(&s[i + 1..])
            })
    }

    fn declared(&self, s: &str) -> bool {
        self.scalars.contains(s) || self.is_wedge_factor(s)
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

fn syntax(span: Span, msg: impl Into<String>) -> DslError {
    DslError::new(ErrorKind::Syntax, span, msg)
}

impl Parser {
    fn new(text: &str) -> Result<Parser, DslError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Span, DslError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(syntax(
                self.span(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), DslError> {
        match self.bump() {
            (Tok::Ident(s), sp) => Ok((s, sp)),
            (t, sp) => Err(syntax(sp, format!("expected a name, found {}", t.describe()))),
        }
    }

    fn signed_number(&mut self) -> Result<Rational, DslError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Num(n), _) => Ok(if neg { -n } else { n }),
            (t, sp) => Err(syntax(sp, format!("expected a number, found {}", t.describe()))),
        }
    }

    fn relation(&mut self) -> Result<Relation, DslError> {
        match self.bump() {
            (Tok::NotEq, _) => Ok(Relation::NonZero),
            (Tok::Greater, _) => Ok(Relation::Positive),
            (t, sp) => Err(syntax(sp, format!("expected `!=` or `>`, found {}", t.describe()))),
        }
    }

    fn sum(&mut self, names: &Names) -> Result<Expr, DslError> {
        let mut e = self.product(names)?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    e = Expr::Add(Box::new(e), Box::new(self.product(names)?));
                }
                Tok::Minus => {
                    self.bump();
                    e = Expr::Sub(Box::new(e), Box::new(self.product(names)?));
                }
                _ => return Ok(e),
            }
        }
    }

    /// A product; stops before a `*` that attaches the scalar to a wedge.
    fn product(&mut self, names: &Names) -> Result<Expr, DslError> {
        let mut e = self.unary(names)?;
        loop {
            match self.peek() {
                Tok::Star => {
                    if let Tok::Ident(n) = self.peek2() {
                        if names.is_wedge_factor(n) {
                            return Ok(e);
                        }
                    }
                    self.bump();
                    e = Expr::Mul(Box::new(e), Box::new(self.unary(names)?));
                }
                Tok::Slash => {
                    self.bump();
                    e = Expr::Div(Box::new(e), Box::new(self.unary(names)?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self, names: &Names) -> Result<Expr, DslError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary(names)?)));
        }
        self.power(names)
    }

    fn power(&mut self, names: &Names) -> Result<Expr, DslError> {
        let base = self.atom(names)?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let sp = self.span();
        let k = self.signed_number()?;
        let k = if k.is_integer() { k.to_integer().to_i32() } else { None }
            .ok_or_else(|| syntax(sp, "exponent must be a small integer"))?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn atom(&mut self, names: &Names) -> Result<Expr, DslError> {
        match self.bump() {
            (Tok::Num(n), _) => Ok(Expr::Num(n)),
            (Tok::Ident(s), sp) => {
                if names.is_scalar(&s) {
                    Ok(Expr::Ident(s))
                } else if names.is_wedge_factor(&s) {
                    Err(syntax(sp, format!("1-form `{s}` cannot appear inside a scalar")))
                } else {
                    Err(DslError::new(
                        ErrorKind::Undeclared,
                        sp,
                        format!("`{s}` is not declared"),
                    ))
                }
            }
            (Tok::LParen, _) => {
                let e = self.sum(names)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            (t, sp) => Err(syntax(sp, format!("expected a scalar, found {}", t.describe()))),
        }
    }

    fn wedge(&mut self, names: &Names) -> Result<Vec<String>, DslError> {
        let mut out = Vec::new();
        loop {
            let (n, sp) = self.ident()?;
            if !names.is_wedge_factor(&n) {
                let kind = if names.declared(&n) || names.is_scalar(&n) {
                    ErrorKind::Syntax
                } else {
                    ErrorKind::Undeclared
                };
                let msg = if kind == ErrorKind::Undeclared {
                    format!("`{n}` is not declared")
                } else {
                    format!("`{n}` is not a 1-form")
                };
                return Err(DslError::new(kind, sp, msg));
            }
            out.push(n);
            if *self.peek() != Tok::Wedge {
                return Ok(out);
            }
            self.bump();
        }
    }

    fn term(&mut self, names: &Names, negative: bool) -> Result<TermExpr, DslError> {
        let span = self.span();
        if let Tok::Ident(n) = self.peek() {
            if names.is_wedge_factor(n) {
                return Ok(TermExpr {
                    negative,
                    coeff: None,
                    wedge: self.wedge(names)?,
                    span,
                });
            }
        }
        let coeff = self.product(names)?;
        if *self.peek() != Tok::Star {
            return Err(syntax(
                self.span(),
                format!("expected `*` and a wedge product, found {}", self.peek().describe()),
            ));
        }
        self.bump();
        Ok(TermExpr {
            negative,
            coeff: Some(coeff),
            wedge: self.wedge(names)?,
            span,
        })
    }

    /// A form up to (not including) the terminating token.
    fn form(&mut self, names: &Names) -> Result<FormExpr, DslError> {
        if let (Tok::Num(n), Tok::Semi | Tok::Eof) = (self.peek(), self.peek2()) {
            if num_traits::Zero::is_zero(n) {
                self.bump();
                return Ok(FormExpr { terms: Vec::new() });
            }
        }
        let mut terms = Vec::new();
        let mut negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            terms.push(self.term(names, negative)?);
            negative = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(FormExpr { terms }),
            };
            self.bump();
        }
    }
}

fn check_new_name(names: &Names, name: &str, sp: Span) -> Result<(), DslError> {
    if names.declared(name) || names.vars.contains(name) {
        return Err(DslError::new(
            ErrorKind::Semantic,
            sp,
            format!("`{name}` is declared twice"),
        ));
    }
    if ["model", "param", "in", "vars", "coframe", "connection", "require", "d"].contains(&name) {
        return Err(syntax(sp, format!("`{name}` is a reserved word")));
    }
    Ok(())
}

/// Parses a model file. Diagnostics carry 1-based line and column.
pub fn parse(text: &str) -> Result<ModelFile, DslError> {
    let mut p = Parser::new(text)?;
    let (kw, sp) = p.ident()?;
    if kw != "model" {
        return Err(syntax(sp, format!("expected `model`, found `{kw}`")));
    }
    let (name, _) = p.ident()?;
    p.expect(Tok::LBrace)?;
    let mut names = Names::default();
    let mut file = ModelFile {
        name,
        params: Vec::new(),
        vars: Vec::new(),
        requires: Vec::new(),
        coframe: Vec::new(),
        connection: Vec::new(),
        rules: Vec::new(),
        end: sp,
    };
    loop {
        let (tok, sp) = p.bump();
        let item = match tok {
            Tok::RBrace => {
                file.end = sp;
                break;
            }
            Tok::Ident(s) => s,
            t => return Err(syntax(sp, format!("expected an item, found {}", t.describe()))),
        };
        match item.as_str() {
            "param" => {
                let (n, nsp) = p.ident()?;
                check_new_name(&names, &n, nsp)?;
                let (kw, ksp) = p.ident()?;
                if kw != "in" {
                    return Err(syntax(ksp, format!("expected `in`, found `{kw}`")));
                }
                p.expect(Tok::LBrace)?;
                let mut allowed = vec![p.signed_number()?];
                while *p.peek() == Tok::Comma {
                    p.bump();
                    allowed.push(p.signed_number()?);
                }
                p.expect(Tok::RBrace)?;
                p.expect(Tok::Semi)?;
                names.scalars.insert(n.clone());
                file.params.push(ParamDecl { name: n, allowed });
            }
            "vars" => loop {
                let (n, nsp) = p.ident()?;
                check_new_name(&names, &n, nsp)?;
                let relation = if matches!(p.peek(), Tok::NotEq | Tok::Greater) {
                    let r = p.relation()?;
                    Some((r, p.signed_number()?))
                } else {
                    None
                };
                names.scalars.insert(n.clone());
                names.vars.insert(n.clone());
                file.vars.push(VarDecl {
                    name: n,
                    relation,
                    span: nsp,
                });
                match p.bump() {
                    (Tok::Comma, _) => continue,
                    (Tok::Semi, _) => break,
                    (t, sp) => {
                        return Err(syntax(sp, format!("expected `,` or `;`, found {}", t.describe())))
                    }
                }
            },
            "require" => {
                let rsp = p.span();
                let expr = p.sum(&names)?;
                let relation = p.relation()?;
                let bound = p.signed_number()?;
                p.expect(Tok::Semi)?;
                file.requires.push(Requirement {
                    expr,
                    relation,
                    bound,
                    span: rsp,
                });
            }
            "coframe" | "connection" => {
                let connection = item == "connection";
                loop {
                    let (n, nsp) = p.ident()?;
                    check_new_name(&names, &n, nsp)?;
                    names.oneforms.insert(n.clone());
                    if connection {
                        let o = opaque_name(&n);
                        check_new_name(&names, &o, nsp)?;
                        names.opaque.insert(o);
                        file.connection.push(n);
                    } else {
                        file.coframe.push(n);
                    }
                    match p.bump() {
                        (Tok::Comma, _) => continue,
                        (Tok::Semi, _) => break,
                        (t, sp) => {
                            return Err(syntax(
                                sp,
                                format!("expected `,` or `;`, found {}", t.describe()),
                            ))
                        }
                    }
                }
            }
            "d" => {
                let (n, nsp) = p.ident()?;
                let target_ok = file.coframe.contains(&n) || names.vars.contains(&n);
                if !target_ok {
                    if file.connection.contains(&n) {
                        return Err(DslError::new(
                            ErrorKind::Semantic,
                            nsp,
                            format!("`{n}` is a connection form; its derivative is opaque"),
                        ));
                    }
                    return Err(DslError::new(
                        ErrorKind::Undeclared,
                        nsp,
                        format!("`{n}` is not declared"),
                    ));
                }
                if file.rules.iter().any(|r| r.name == n) {
                    return Err(DslError::new(
                        ErrorKind::DuplicateRule,
                        nsp,
                        format!("second rule for `{n}`"),
                    ));
                }
                p.expect(Tok::Eq)?;
                let form = p.form(&names)?;
                p.expect(Tok::Semi)?;
                file.rules.push(Rule {
                    name: n,
                    form,
                    span: sp,
                });
            }
            other => return Err(syntax(sp, format!("unknown item `{other}`"))),
        }
    }
    p.expect(Tok::Eof)?;
    for c in &file.coframe {
        if !file.rules.iter().any(|r| &r.name == c) {
            return Err(DslError::new(
                ErrorKind::Semantic,
                file.end,
                format!("no d-rule for coframe form `{c}`"),
            ));
        }
    }
    Ok(file)
}

pub(crate) fn parse_standalone_scalar(text: &str, names: &Names) -> Result<Expr, DslError> {
    let mut p = Parser::new(text)?;
    let e = p.sum(names)?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

pub(crate) fn parse_standalone_form(text: &str, names: &Names) -> Result<FormExpr, DslError> {
    let mut p = Parser::new(text)?;
    let f = p.form(names)?;
    p.expect(Tok::Eof)?;
    Ok(f)
}

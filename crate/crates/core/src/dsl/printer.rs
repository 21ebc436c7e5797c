use crate::coeff_ring::render_rational;
use crate::exterior::Form;
use crate::structure::{Constraint, Differential, StructureModel};

fn render_form(f: &Form) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let basis = f.basis();
    let mut parts: Vec<(bool, String)> = Vec::new();
    let mut push = |c: &crate::coeff_ring::Scalar, wedge: String| {
        let (neg, coeff) = if c.is_one() {
            (false, String::new())
        } else if (-c).is_one() {
            (true, String::new())
        } else {
            (false, format!("({})*", c.render()))
        };
        parts.push((neg, format!("{coeff}{wedge}")));
    };
    for (mi, c) in f.terms() {
        let w: Vec<&str> = mi.indices().map(|i| basis.name(i)).collect();
        push(c, w.join("/\\"));
    }
    for (o, mi, c) in f.opaque_terms() {
        let mut w = vec![basis.opaque_name(o)];
        w.extend(mi.indices().map(|i| basis.name(i)));
        push(c, w.join("/\\"));
    }
    let mut out = String::new();
    for (k, (neg, t)) in parts.iter().enumerate() {
        match (k, neg) {
            (0, false) => {}
            (0, true) => out.push_str("- "),
            (_, false) => out.push_str("\n      + "),
            (_, true) => out.push_str("\n      - "),
        }
        out.push_str(t);
    }
    out
}

/// The variable and bound of a constraint of the form `v - c`.
fn as_var_bound(c: &Constraint, model: &StructureModel) -> Option<(String, String)> {
    for f in model.functions() {
        let v = model.ring().var_at(f.var);
        if let Some(k) = (&c.expr - &v).as_constant().filter(|k| k.is_integer()) {
            return Some((f.name.clone(), render_rational(&(-k))));
        }
    }
    None
}

/// Model-file text for `model`; parsing it and binding the same
/// parameters gives back an equal model.
pub fn print(model: &StructureModel) -> String {
    let mut out = format!("model {} {{\n", model.name());
    for p in model.params() {
        let vals: Vec<String> = p.allowed.iter().map(render_rational).collect();
        out.push_str(&format!("  param {} in {{{}}};\n", p.name, vals.join(", ")));
    }
    let mut var_rel: Vec<Option<String>> = vec![None; model.functions().len()];
    let mut requires = Vec::new();
    for c in model.constraints() {
        let slot = as_var_bound(c, model).and_then(|(v, bound)| {
            let i = model.functions().iter().position(|f| f.name == v)?;
            var_rel[i].is_none().then_some((i, bound))
        });
        match slot {
            Some((i, bound)) => {
                var_rel[i] = Some(format!(" {} {bound}", c.relation.symbol()));
            }
            None => requires.push(format!(
                "  require {} {} 0;\n",
                c.expr.render(),
                c.relation.symbol()
            )),
        }
    }
    if !model.functions().is_empty() {
        let decls: Vec<String> = model
            .functions()
            .iter()
            .zip(&var_rel)
            .map(|(f, r)| format!("{}{}", f.name, r.clone().unwrap_or_default()))
            .collect();
        out.push_str(&format!("  vars {};\n", decls.join(", ")));
    }
    for r in requires {
        out.push_str(&r);
    }
    let basis = model.basis();
    out.push_str(&format!("  coframe {};\n", basis.coframe_names().join(", ")));
    if !basis.connection_names().is_empty() {
        out.push_str(&format!(
            "  connection {};\n",
            basis.connection_names().join(", ")
        ));
    }
    out.push('\n');
    for (n, f) in model.drules() {
        out.push_str(&format!("  d {n} = {};\n", render_form(f)));
    }
    for f in model.functions() {
        if let Differential::Declared(df) = &f.differential {
            out.push_str(&format!("  d {} = {};\n", f.name, render_form(df)));
        }
    }
    out.push_str("}\n");
    out
}

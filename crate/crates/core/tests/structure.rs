use std::collections::BTreeMap;

use eds_core::coeff_ring::Scalar;
use eds_core::dsl::{self, ErrorKind};
use eds_core::exterior::MultiIndex;
use eds_core::report::{all_passed, Status};
use eds_core::structure::{
    builtin, builtin_names, builtin_source, chart_coframing, sigma_coframing, tau_coframing,
    verify_derived_coframing, verify_goursat_identities, Coframing, ModelError, StructureModel,
};

fn model(name: &str, eps: i64) -> StructureModel {
    builtin(name, Some(eps)).unwrap().structure().unwrap()
}

fn bind(m: &StructureModel, pairs: &[(&str, &str)]) -> BTreeMap<String, Scalar> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), dsl::parse_scalar(v, m.ring()).unwrap()))
        .collect()
}

fn branch_one(eps: i64) -> StructureModel {
    let m = model("TYPE_A1", eps);
    m.derive_submodel(&bind(&m, &[("H2", "1"), ("H3", "-1")])).unwrap()
}

#[test]
fn type_a1_is_closed_for_both_signs() {
    for eps in [1, -1] {
        let report = model("TYPE_A1", eps).verify_closure();
        assert_eq!(report.len(), 11);
        for o in &report {
            assert!(o.passed(), "eps={eps} {}: {}", o.identity, o.residual);
        }
    }
}

#[test]
fn sign_flip_breaks_closure() {
    let src = builtin_source("TYPE_A1")
        .unwrap()
        .replacen("+ H1*w1/\\w2", "- H1*w1/\\w2", 1);
    assert_ne!(src, builtin_source("TYPE_A1").unwrap());
    let m = dsl::load(&src, Some(1)).unwrap();
    let report = m.verify_closure();
    assert!(!all_passed(&report));
    assert!(report.iter().any(|o| o.status == Status::Nonzero && o.residual_terms > 0));
}

#[test]
fn cohomogeneity_two_bindings() {
    for eps in [1, -1] {
        let m = model("TYPE_A1", eps);
        m.derive_submodel(&bind(&m, &[("H2", "1"), ("H3", "-1")])).unwrap();
        m.derive_submodel(&bind(&m, &[("H2", "eps*H1^2"), ("H4", "-eps")]))
            .unwrap();
        match m.derive_submodel(&bind(&m, &[("H2", "2"), ("H3", "-1")])) {
            Err(ModelError::Inconsistent { residual, .. }) => assert_ne!(residual, "0"),
            other => panic!("expected an inconsistent binding, got {other:?}"),
        }
    }
}

#[test]
fn submodels_are_closed() {
    for eps in [1, -1] {
        assert!(all_passed(&branch_one(eps).verify_closure()));
    }
}

#[test]
fn sigma_and_tau_coframings() {
    for eps in [1, -1] {
        let sub = branch_one(eps);
        let sigma = model("SIGMA", eps);
        let out = verify_derived_coframing(&sub, &sigma_coframing(&sub).unwrap(), &sigma).unwrap();
        assert_eq!(out.len(), 5);
        assert!(all_passed(&out), "{out:?}");

        let tau = builtin("TAU", None).unwrap().structure().unwrap();
        let out = verify_derived_coframing(&sub, &tau_coframing(&sub).unwrap(), &tau).unwrap();
        assert_eq!(out.len(), 7);
        assert!(all_passed(&out), "{out:?}");
    }
}

#[test]
fn wrong_sigma_definition_fails() {
    let sub = branch_one(1);
    let sigma = model("SIGMA", 1);
    let mut defs = sigma_coframing(&sub).unwrap();
    defs.oneforms[2].1 = dsl::parse_form("2*H4*w2", sub.basis(), sub.ring(), 1).unwrap();
    let out = verify_derived_coframing(&sub, &defs, &sigma).unwrap();
    assert!(!all_passed(&out));
}

#[test]
fn sigma_and_tau_are_closed() {
    for eps in [1, -1] {
        assert!(all_passed(&model("SIGMA", eps).verify_closure()));
    }
    let tau = builtin("TAU", None).unwrap().structure().unwrap();
    assert!(all_passed(&tau.verify_closure()));
}

#[test]
fn identity_coframing_is_a_solution() {
    let m = model("TYPE_A1", -1);
    let out = verify_derived_coframing(&m, &Coframing::identity(&m).unwrap(), &m).unwrap();
    assert_eq!(out.len(), 11);
    assert!(all_passed(&out));
}

#[test]
fn goursat_chart() {
    let chart = builtin("CHART_GOURSAT", None).unwrap().chart().unwrap();
    let sigma = model("SIGMA", 1);
    let out = verify_derived_coframing(chart.model(), &chart_coframing(&chart), &sigma).unwrap();
    assert_eq!(out.len(), 5);
    assert!(all_passed(&out), "{out:?}");
    let ids = verify_goursat_identities(&chart).unwrap();
    assert_eq!(ids.len(), 2);
    assert!(all_passed(&ids));
    assert!(all_passed(&chart.model().verify_closure()));
    // the chart does not model the other sign
    let out = verify_derived_coframing(chart.model(), &chart_coframing(&chart), &model("SIGMA", -1)).unwrap();
    assert!(!all_passed(&out));
}

#[test]
fn round_trip_all_builtins() {
    for name in builtin_names() {
        let epss: &[Option<i64>] = match builtin_source(name) {
            Some(src) if src.contains("param eps") => &[Some(1), Some(-1)],
            _ => &[None],
        };
        for &eps in epss {
            let m = builtin(name, eps).unwrap().structure().unwrap();
            let text = dsl::print(&m);
            let back = dsl::parse(&text)
                .unwrap_or_else(|e| panic!("{name}: {e}\n{text}"))
                .instantiate_eps(eps)
                .unwrap();
            assert_eq!(back, m, "{name} eps={eps:?}");
            assert_eq!(dsl::print(&back), text);
        }
    }
}

#[test]
fn round_trip_submodel() {
    let sub = branch_one(-1);
    let back = dsl::load(&dsl::print(&sub), Some(-1)).unwrap();
    assert_eq!(back, sub);
}

const SMALL: &str = "model small {\n  coframe w0, w1, w2;\n  d w0 = w1 /\\ w2 + w1 /\\ w2;\n  d w1 = 0;\n  d w2 = 0;\n}\n";

#[test]
fn terms_merge() {
    let m = dsl::load(SMALL, None).unwrap();
    let dw0 = m.drule("w0").unwrap();
    assert_eq!(dw0.term_count(), 1);
    assert_eq!(
        dw0.coefficient_of(&["w1", "w2"]).unwrap().as_constant(),
        Some(eds_core::coeff_ring::rational(2, 1))
    );
    let (_, mi) = MultiIndex::sorted(&[1, 2]).unwrap();
    assert_eq!(dw0.coefficient(&mi), m.ring().int(2));
}

#[test]
fn undeclared_name_is_located() {
    let src = SMALL.replace("w1 /\\ w2 + w1 /\\ w2", "w1 /\\ w9");
    let e = dsl::parse(&src).unwrap_err();
    assert_eq!(e.kind, ErrorKind::Undeclared);
    assert_eq!((e.span.line, e.span.column), (3, 16));
    assert!(e.to_string().starts_with("3:16:"), "{e}");
    assert!(e.message.contains("w9"));
}

#[test]
fn duplicate_rule_is_located() {
    let src = SMALL.replace("  d w2 = 0;\n", "  d w2 = 0;\n  d w1 = w0/\\w2;\n");
    let e = dsl::parse(&src).unwrap_err();
    assert_eq!(e.kind, ErrorKind::DuplicateRule);
    assert_eq!(e.span.line, 6);
    assert!(e.span.column >= 1);
}

#[test]
fn lexical_and_syntax_errors_are_located() {
    let e = dsl::parse(&SMALL.replace("d w1 = 0", "d w1 = 0 $")).unwrap_err();
    assert_eq!(e.kind, ErrorKind::Lexical);
    assert_eq!((e.span.line, e.span.column), (4, 12));
    let e = dsl::parse(&SMALL.replace("d w1 = 0", "d w1 = w0 /\\")).unwrap_err();
    assert_eq!(e.kind, ErrorKind::Syntax);
    assert_eq!(e.span.line, 4);
    let e = dsl::parse(&SMALL.replace("  d w2 = 0;\n", "")).unwrap_err();
    assert_eq!(e.kind, ErrorKind::Semantic);
}

#[test]
fn builtin_names_normalize() {
    assert!(builtin("typeA1", Some(1)).is_ok());
    assert!(builtin("type-a1", Some(-1)).is_ok());
    assert!(builtin("TYPE_A1", None).is_err());
    assert!(builtin("TYPE_A2", Some(1)).is_err());
}

#[test]
fn free_symbols_have_no_second_derivative() {
    let b1 = builtin("TYPE_B1", None).unwrap().structure().unwrap();
    assert!(matches!(b1.d_squared("P0"), Err(ModelError::FreeSymbol(_))));
    assert!(b1.d_squared("w0").is_ok());
}

#[test]
fn reports_are_deterministic() {
    let m = model("TYPE_A1", 1);
    let a = serde_json::to_string(&m.verify_closure()).unwrap();
    let b = serde_json::to_string(&m.verify_closure()).unwrap();
    assert_eq!(a, b);
    let names: Vec<String> = m.verify_closure().into_iter().map(|o| o.identity).collect();
    assert_eq!(names[0], "d(d w0)");
    assert_eq!(names[10], "d(d H4)");
}

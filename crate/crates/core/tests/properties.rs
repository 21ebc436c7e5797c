mod common;

fn check(name: &str) {
    if let Err(e) = common::check(name, 1000) {
        panic!("{name}: {e}");
    }
}

#[test]
fn wedge_is_graded_commutative() {
    check("wedge is graded-commutative");
}

#[test]
fn wedge_is_associative() {
    check("wedge is associative");
}

#[test]
fn wedge_is_bilinear() {
    check("wedge is bilinear");
}

#[test]
fn d_obeys_leibniz() {
    check("d obeys Leibniz and d^2 = 0");
}

#[test]
fn field_axioms() {
    check("field axioms");
}

#[test]
fn derivative_rules() {
    check("derivative rules");
}

#[test]
fn reduce_mod_is_a_homomorphism() {
    check("reduce_mod is a homomorphism");
}

#[test]
fn change_basis_is_a_homomorphism() {
    check("change_basis is a homomorphism");
}

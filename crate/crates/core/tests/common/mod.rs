//! Algebraic laws checked on randomized inputs, shared by the property
//! tests and the acceptance run.

use std::collections::BTreeMap;

use eds_core::coeff_ring::{Monomial, Polynomial, Rational, Ring, Scalar};
use eds_core::exterior::Form;
use eds_core::structure::{builtin, StructureModel};
use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{Config, TestRunner};

// Everything lives over the TAU model: five coframe 1-forms and two
// functions R, S with rational-function derivatives.
fn model() -> StructureModel {
    builtin("TAU", None).unwrap().structure().unwrap()
}

type RawPoly = Vec<(i64, u32, u32)>;

#[derive(Debug, Clone)]
pub struct RawScalar {
    num: RawPoly,
    // denominator 1 + Σ c R^a S^b with c ≥ 0, never the zero polynomial
    den: RawPoly,
}

fn raw_scalar() -> impl Strategy<Value = RawScalar> {
    (
        prop::collection::vec((-6i64..=6, 0u32..3, 0u32..3), 1..=3),
        prop::collection::vec((0i64..=3, 0u32..2, 0u32..2), 0..=1),
    )
        .prop_map(|(num, den)| RawScalar { num, den })
}

fn poly(r: &Ring, raw: &RawPoly) -> Polynomial {
    let (iv, is) = (r.var_index("R").unwrap(), r.var_index("S").unwrap());
    Polynomial::from_terms(raw.iter().map(|&(c, a, b)| {
        (Monomial::from_pairs([(iv, a), (is, b)]), Rational::from_integer(c.into()))
    }))
}

fn scalar(r: &Ring, raw: &RawScalar) -> Scalar {
    let num = Scalar::from_polynomial(r.clone(), poly(r, &raw.num));
    let den: RawPoly = std::iter::once((1, 0, 0)).chain(raw.den.iter().copied()).collect();
    num / Scalar::from_polynomial(r.clone(), poly(r, &den))
}

type RawForm = Vec<(RawScalar, Vec<usize>)>;

fn raw_form(degree: usize) -> impl Strategy<Value = RawForm> {
    prop::collection::vec((raw_scalar(), subsequence((0..5).collect::<Vec<usize>>(), degree)), 0..=3)
}

fn degrees_and_forms(p: usize, q: usize) -> impl Strategy<Value = (usize, usize, RawForm, RawForm)> {
    (0..=p, 0..=q).prop_flat_map(|(p, q)| (Just(p), Just(q), raw_form(p), raw_form(q)))
}

fn form(m: &StructureModel, raw: &RawForm, degree: usize) -> Form {
    let basis = m.basis();
    let mut f = Form::zero(basis, m.ring(), degree);
    for (c, idx) in raw {
        let names: Vec<&str> = idx.iter().map(|&i| basis.name(i)).collect();
        f = f
            .add(&Form::monomial(basis, scalar(m.ring(), c), &names).unwrap())
            .unwrap();
    }
    f
}

fn sign(m: &StructureModel, p: usize, q: usize) -> Scalar {
    m.ring().int(if p * q % 2 == 0 { 1 } else { -1 })
}

type Law = fn(&mut TestRunner) -> Result<(), String>;

fn text<T: std::fmt::Display>(r: Result<(), T>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn graded_commutative(runner: &mut TestRunner) -> Result<(), String> {
    let m = model();
    text(runner.run(&degrees_and_forms(3, 2), |(p, q, a, b)| {
        let (a, b) = (form(&m, &a, p), form(&m, &b, q));
        let rhs = b.wedge(&a).unwrap().scale(&sign(&m, p, q)).unwrap();
        prop_assert_eq!(a.wedge(&b).unwrap(), rhs);
        Ok(())
    }))
}

fn associative(runner: &mut TestRunner) -> Result<(), String> {
    let m = model();
    text(runner.run(&(raw_form(1), raw_form(2), raw_form(1)), |(a, b, c)| {
        let (a, b, c) = (form(&m, &a, 1), form(&m, &b, 2), form(&m, &c, 1));
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        prop_assert_eq!(left, a.wedge(&b.wedge(&c).unwrap()).unwrap());
        Ok(())
    }))
}

fn bilinear(runner: &mut TestRunner) -> Result<(), String> {
    let m = model();
    text(runner.run(&(raw_form(1), raw_form(1), raw_form(2), raw_scalar()), |(a, b, c, k)| {
        let (a, b, c) = (form(&m, &a, 1), form(&m, &b, 1), form(&m, &c, 2));
        let k = scalar(m.ring(), &k);
        prop_assert_eq!(
            a.add(&b).unwrap().wedge(&c).unwrap(),
            a.wedge(&c).unwrap().add(&b.wedge(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            c.wedge(&a.add(&b).unwrap()).unwrap(),
            c.wedge(&a).unwrap().add(&c.wedge(&b).unwrap()).unwrap()
        );
        prop_assert_eq!(a.scale(&k).unwrap().wedge(&c).unwrap(), a.wedge(&c).unwrap().scale(&k).unwrap());
        Ok(())
    }))
}

fn leibniz(runner: &mut TestRunner) -> Result<(), String> {
    let m = model();
    text(runner.run(&degrees_and_forms(2, 1), |(p, q, a, b)| {
        let (a, b) = (form(&m, &a, p), form(&m, &b, q));
        let lhs = m.d(&a.wedge(&b).unwrap()).unwrap();
        let da = m.d(&a).unwrap().wedge(&b).unwrap();
        let db = a.wedge(&m.d(&b).unwrap()).unwrap();
        let rhs = if p % 2 == 0 { da.add(&db) } else { da.sub(&db) }.unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(m.d(&m.d(&a).unwrap()).unwrap().is_zero());
        Ok(())
    }))
}

fn field(runner: &mut TestRunner) -> Result<(), String> {
    let r = model().ring().clone();
    text(runner.run(&(raw_scalar(), raw_scalar(), raw_scalar()), |(a, b, c)| {
        let (a, b, c) = (scalar(&r, &a), scalar(&r, &b), scalar(&r, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert_eq!(&a - &a, r.zero());
        prop_assert_eq!(&a + r.zero(), a.clone());
        prop_assert_eq!(&a * r.one(), a.clone());
        if a.is_zero() {
            prop_assert!(a.inv().is_err());
        } else {
            prop_assert_eq!(&a * a.inv().unwrap(), r.one());
        }
        Ok(())
    }))
}

fn derivatives(runner: &mut TestRunner) -> Result<(), String> {
    let m = model();
    let r = m.ring().clone();
    text(runner.run(&(raw_scalar(), raw_scalar()), |(a, b)| {
        let (a, b) = (scalar(&r, &a), scalar(&r, &b));
        for v in ["R", "S"] {
            let da = a.partial(v).unwrap();
            let db = b.partial(v).unwrap();
            prop_assert_eq!((&a + &b).partial(v).unwrap(), &da + &db);
            prop_assert_eq!((&a * &b).partial(v).unwrap(), &da * &b + &a * &db);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).partial(v).unwrap(), (&da * &b - &a * &db) / (&b * &b));
            }
        }
        let (da, db) = (m.d_scalar(&a).unwrap(), m.d_scalar(&b).unwrap());
        prop_assert_eq!(m.d_scalar(&(&a + &b)).unwrap(), da.add(&db).unwrap());
        prop_assert_eq!(
            m.d_scalar(&(&a * &b)).unwrap(),
            da.scale(&b).unwrap().add(&db.scale(&a).unwrap()).unwrap()
        );
        Ok(())
    }))
}

fn reduce_mod(runner: &mut TestRunner) -> Result<(), String> {
    let m = model();
    let drops = subsequence((0..5).collect::<Vec<usize>>(), 0..=3);
    text(runner.run(&(raw_form(1), raw_form(1), raw_form(2), drops), |(a, b, c, drop)| {
        let (a, b, c) = (form(&m, &a, 1), form(&m, &b, 1), form(&m, &c, 2));
        let names: Vec<&str> = drop.iter().map(|&i| m.basis().name(i)).collect();
        let red = |f: &Form| f.reduce_mod(&names).unwrap();
        prop_assert_eq!(red(&a.add(&b).unwrap()), red(&a).add(&red(&b)).unwrap());
        prop_assert_eq!(red(&a.wedge(&c).unwrap()), red(&a).wedge(&red(&c)).unwrap());
        prop_assert_eq!(red(&red(&c)), red(&c));
        Ok(())
    }))
}

fn change_basis(runner: &mut TestRunner) -> Result<(), String> {
    let m = model();
    let pairs = subsequence((0..5).collect::<Vec<usize>>(), 2).prop_shuffle();
    text(runner.run(&(raw_form(1), raw_form(2), raw_scalar(), pairs), |(a, b, k, pair)| {
        let basis = m.basis();
        let (a, b) = (form(&m, &a, 1), form(&m, &b, 2));
        let k = scalar(m.ring(), &k);
        // the unipotent shear t_i -> t_i' + k t_j
        let (i, j) = (pair[0], pair[1]);
        let fresh = format!("{}n", basis.name(i));
        let target = basis.renamed(&[(basis.name(i), &fresh)]).unwrap();
        let ti = Form::oneform(&target, m.ring(), &fresh).unwrap();
        let tj = Form::oneform(&target, m.ring(), basis.name(j)).unwrap();
        let repl = BTreeMap::from([(basis.name(i).to_string(), ti.add(&tj.scale(&k).unwrap()).unwrap())]);
        let cb = |f: &Form| f.change_basis(&target, &repl).unwrap();
        prop_assert_eq!(cb(&a.wedge(&b).unwrap()), cb(&a).wedge(&cb(&b)).unwrap());
        prop_assert_eq!(cb(&a.add(&a).unwrap()), cb(&a).add(&cb(&a)).unwrap());
        prop_assert_eq!(cb(&a.scale(&k).unwrap()), cb(&a).scale(&k).unwrap());
        Ok(())
    }))
}

pub const LAWS: [(&str, Law); 8] = [
    ("wedge is graded-commutative", graded_commutative),
    ("wedge is associative", associative),
    ("wedge is bilinear", bilinear),
    ("d obeys Leibniz and d^2 = 0", leibniz),
    ("field axioms", field),
    ("derivative rules", derivatives),
    ("reduce_mod is a homomorphism", reduce_mod),
    ("change_basis is a homomorphism", change_basis),
];

/// Runs one law on `cases` random inputs from a fixed seed.
pub fn check(name: &str, cases: u32) -> Result<(), String> {
    let (_, law) = LAWS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| format!("no law named `{name}`"))?;
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(
        proptest::test_runner::RngAlgorithm::ChaCha,
    ));
    law(&mut runner)
}

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{CoeffError, Polynomial, Rational, Ring};

/// An element of the rational-function field of a [`Ring`].
///
/// Stored as `num / den` with `den` nonzero and monic in its grlex-leading
/// term, no monomial factor common to `num` and `den`, and `den = 1`
/// whenever the quotient is a polynomial that the normalizer can detect.
/// The zero scalar is `0 / 1`. Zero testing only inspects `num`, so it is
/// exact and independent of how far the fraction was simplified.
#[derive(Clone)]
pub struct Scalar {
    ring: Ring,
    num: Polynomial,
    den: Polynomial,
}

impl Scalar {
    pub(crate) fn from_parts_unchecked(ring: Ring, num: Polynomial, den: Polynomial) -> Scalar {
        Scalar { ring, num, den }
    }

    /// `num / den`, normalized.
    pub fn from_parts(ring: Ring, num: Polynomial, den: Polynomial) -> Result<Scalar, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Self::normalized(ring, num, den))
    }

    pub fn from_polynomial(ring: Ring, num: Polynomial) -> Scalar {
        Scalar {
            ring,
            num,
            den: Polynomial::one(),
        }
    }

    fn normalized(ring: Ring, num: Polynomial, den: Polynomial) -> Scalar {
        let (num, den) = normalize(num, den);
        Scalar { ring, num, den }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Number of terms in numerator and denominator, a rough size measure.
    pub fn term_count(&self) -> usize {
        self.num.len() + if self.den.is_one() { 0 } else { self.den.len() }
    }

    /// Variables occurring in the numerator or denominator, ascending.
    pub fn variables(&self) -> Vec<usize> {
        let mut vs = self.num.variables();
        vs.extend(self.den.variables());
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn check(&self, other: &Scalar) -> Result<(), CoeffError> {
        if self.ring.same(&other.ring) {
            Ok(())
        } else {
            Err(CoeffError::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg_ref()))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        let inv = other.inv()?;
        Ok(self.mul_unchecked(&inv))
    }

    pub fn inv(&self) -> Result<Scalar, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Self::normalized(
            self.ring.clone(),
            self.den.clone(),
            self.num.clone(),
        ))
    }

    fn neg_ref(&self) -> Scalar {
        Scalar {
            ring: self.ring.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn add_unchecked(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let ring = self.ring.clone();
        if self.den == other.den {
            return Self::normalized(ring, self.num.add(&other.num), self.den.clone());
        }
        if let (Some((ma, _)), Some((mb, _))) = (self.den.as_monomial(), other.den.as_monomial()) {
            // monic monomial denominators: bring both over their lcm
            let l = ma.lcm(mb);
            let one = Rational::one();
            let fa = l.div(ma).expect("lcm");
            let fb = l.div(mb).expect("lcm");
            let num = self
                .num
                .mul_term(&fa, &one)
                .add(&other.num.mul_term(&fb, &one));
            return Self::normalized(ring, num, Polynomial::term(one, l));
        }
        if let Some(k) = other.den.div_exact(&self.den) {
            let num = self.num.mul(&k).add(&other.num);
            return Self::normalized(ring, num, other.den.clone());
        }
        if let Some(k) = self.den.div_exact(&other.den) {
            let num = other.num.mul(&k).add(&self.num);
            return Self::normalized(ring, num, self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::normalized(ring, num, self.den.mul(&other.den))
    }

    fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        let ring = self.ring.clone();
        if self.is_zero() || other.is_zero() {
            return ring.zero();
        }
        let (mut an, mut ad) = (self.num.clone(), self.den.clone());
        let (mut bn, mut bd) = (other.num.clone(), other.den.clone());
        // cross cancellation of whole denominators, cheap and frequent
        if bd.as_monomial().is_none() {
            if let Some(q) = an.div_exact(&bd) {
                an = q;
                bd = Polynomial::one();
            }
        }
        if ad.as_monomial().is_none() {
            if let Some(q) = bn.div_exact(&ad) {
                bn = q;
                ad = Polynomial::one();
            }
        }
        Self::normalized(ring, an.mul(&bn), ad.mul(&bd))
    }

    pub fn scale(&self, k: &Rational) -> Scalar {
        if k.is_zero() {
            return self.ring.zero();
        }
        Scalar {
            ring: self.ring.clone(),
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i32) -> Result<Scalar, CoeffError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        Ok(Self::normalized(
            self.ring.clone(),
            self.num.pow(e),
            self.den.pow(e),
        ))
    }

    /// Partial derivative with respect to variable index `v`.
    pub fn partial_at(&self, v: usize) -> Scalar {
        let dn = self.num.partial(v);
        if self.den.is_one() {
            return Scalar::from_polynomial(self.ring.clone(), dn);
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Self::normalized(self.ring.clone(), dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Self::normalized(self.ring.clone(), num, self.den.mul(&self.den))
    }

    pub fn partial(&self, var: &str) -> Result<Scalar, CoeffError> {
        let v = self
            .ring
            .var_index(var)
            .ok_or_else(|| CoeffError::UnknownVariable(var.to_string()))?;
        Ok(self.partial_at(v))
    }

    /// Exact value at a point given by variable name.
    pub fn eval(&self, point: &BTreeMap<String, Rational>) -> Result<Rational, CoeffError> {
        let mut values = Vec::with_capacity(self.ring.num_variables());
        let used = self.variables();
        for (i, name) in self.ring.variables().iter().enumerate() {
            match point.get(name) {
                Some(v) => values.push(v.clone()),
                None if used.binary_search(&i).is_err() => values.push(Rational::zero()),
                None => return Err(CoeffError::MissingValue(name.clone())),
            }
        }
        self.eval_at(&values)
    }

    /// Exact value at a point given positionally, one value per ring variable.
    pub fn eval_at(&self, values: &[Rational]) -> Result<Rational, CoeffError> {
        let d = self.den.eval(values);
        if d.is_zero() {
            return Err(CoeffError::Pole {
                denominator: self.den.render(self.ring.variables()),
            });
        }
        Ok(self.num.eval(values) / d)
    }

    /// Floating-point value at a point, one value per ring variable.
    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.num.eval_f64(values) / self.den.eval_f64(values)
    }

    /// Ring homomorphism into `target`: variable `i` is sent to `images[i]`.
    pub fn compose(&self, images: &[Scalar], target: &Ring) -> Result<Scalar, CoeffError> {
        let n = compose_poly(&self.num, images, target)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = compose_poly(&self.den, images, target)?;
        if d.is_zero() {
            return Err(CoeffError::Pole {
                denominator: self.den.render(self.ring.variables()),
            });
        }
        n.checked_div(&d)
    }

    /// Simultaneous substitution of some variables within the same ring.
    pub fn substitute(&self, bindings: &BTreeMap<usize, Scalar>) -> Result<Scalar, CoeffError> {
        if bindings.is_empty() || self.variables().iter().all(|v| !bindings.contains_key(v)) {
            return Ok(self.clone());
        }
        let images: Vec<Scalar> = (0..self.ring.num_variables())
            .map(|i| {
                bindings
                    .get(&i)
                    .cloned()
                    .unwrap_or_else(|| self.ring.var_at(i))
            })
            .collect();
        self.compose(&images, &self.ring)
    }

    /// The same value over another ring whose variable list extends this one.
    pub fn lift(&self, target: &Ring) -> Scalar {
        Scalar {
            ring: target.clone(),
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    /// Canonical text, e.g. `(-2*H2)/(H1^3)`.
    pub fn render(&self) -> String {
        let names = self.ring.variables();
        if self.den.is_one() {
            self.num.render(names)
        } else {
            format!("({})/({})", self.num.render(names), self.den.render(names))
        }
    }
}

fn compose_poly(p: &Polynomial, images: &[Scalar], target: &Ring) -> Result<Scalar, CoeffError> {
    let mut acc = target.zero();
    let mut powers: BTreeMap<(usize, u32), Scalar> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut t = target.constant(c.clone());
        for (v, e) in m.pairs() {
            let img = images.get(v).ok_or(CoeffError::RingMismatch)?;
            if !img.ring.same(target) {
                return Err(CoeffError::RingMismatch);
            }
            let pw = match powers.get(&(v, e)) {
                Some(s) => s.clone(),
                None => {
                    let s = img.pow(e as i32)?;
                    powers.insert((v, e), s.clone());
                    s
                }
            };
            t = t.mul_unchecked(&pw);
        }
        acc = acc.add_unchecked(&t);
    }
    Ok(acc)
}

/// Content-level normalization; see the type-level docs of [`Scalar`].
pub(crate) fn normalize(num: Polynomial, den: Polynomial) -> (Polynomial, Polynomial) {
    if num.is_zero() {
        return (Polynomial::zero(), Polynomial::one());
    }
    let g = num.monomial_content().gcd(&den.monomial_content());
    let (mut num, mut den) = if g.is_one() {
        (num, den)
    } else {
        (num.div_monomial(&g), den.div_monomial(&g))
    };
    if let Some(c) = den.as_constant() {
        return (num.scale(&c.recip()), Polynomial::one());
    }
    let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero");
    if !lc.is_one() {
        let inv = lc.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    if den.as_monomial().is_none() {
        if let Some(q) = num.div_exact(&den) {
            return (q, Polynomial::one());
        }
    }
    (num, den)
}

impl PartialEq for Scalar {
    /// Mathematical equality of rational functions.
    fn eq(&self, other: &Self) -> bool {
        if !self.ring.same(&other.ring) {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.render())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// Operator forms panic on ring mismatch; the `checked_*` methods report it.
macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs).expect(concat!("Scalar ", stringify!($m)))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &Scalar, b: &Scalar| a.checked_add(b));
binop!(Sub, sub, |a: &Scalar, b: &Scalar| a.checked_sub(b));
binop!(Mul, mul, |a: &Scalar, b: &Scalar| a.checked_mul(b));
binop!(Div, div, |a: &Scalar, b: &Scalar| a.checked_div(b));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::new(["H1", "H2", "H3", "H4"], [("eps".to_string(), Rational::one())]).unwrap()
    }

    fn v(r: &Ring, n: &str) -> Scalar {
        r.var(n).unwrap()
    }

    #[test]
    fn rational_addition() {
        let r = ring();
        assert_eq!((r.ratio(1, 2) + r.ratio(1, 3)).render(), "5/6");
    }

    #[test]
    fn additive_identity() {
        let r = ring();
        let a = v(&r, "H1") / v(&r, "H2");
        let s = &a + &r.zero();
        assert_eq!(s.render(), a.render());
        assert_eq!(s.render(), "(H1)/(H2)");
    }

    #[test]
    fn factorization_identity_cancels() {
        let r = ring();
        let h1 = v(&r, "H1");
        let a = (&h1 * &h1 - r.one()) / (&h1 - r.one());
        let s = a + (-&h1 - r.one());
        assert!(s.is_zero());
        assert_eq!(s.render(), "0");
    }

    #[test]
    fn cancellation_and_absorption() {
        let r = ring();
        let (h1, h2) = (v(&r, "H1"), v(&r, "H2"));
        assert_eq!(((&h2 / &h1) * &h1).render(), "H2");
        assert!((&h1 * &r.zero()).is_zero());
        let p = r.one() / (&h1 * &h1) * h1.pow(5).unwrap();
        assert_eq!(p.render(), "H1^3");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let r = ring();
        assert_eq!(r.one().checked_div(&r.zero()), Err(CoeffError::DivisionByZero));
    }

    #[test]
    fn partial_derivatives() {
        let r = ring();
        let (h1, h2) = (v(&r, "H1"), v(&r, "H2"));
        let a = &h2 / &(&h1 * &h1);
        assert_eq!(a.partial("H1").unwrap().render(), "(-2*H2)/(H1^3)");
        assert!((&h1 * &h2).partial("H3").unwrap().is_zero());
        assert!(matches!(a.partial("Z"), Err(CoeffError::UnknownVariable(_))));

        let q = Ring::new(["x", "y"], []).unwrap();
        let (x, y) = (v(&q, "x"), v(&q, "y"));
        let f = q.one() / (&x - &y);
        let expect = -(q.one() / ((&x - &y) * (&x - &y)));
        assert_eq!(f.partial("x").unwrap(), expect);
    }

    #[test]
    fn zero_tests() {
        let r = ring();
        let h1 = v(&r, "H1");
        let a = (&h1 * &h1 - r.one()) / (&h1 - r.one()) - (&h1 + r.one());
        assert!(a.is_zero());
        assert!(!(v(&r, "H1") - v(&r, "H2")).is_zero());
        assert!((r.zero() / h1.pow(5).unwrap()).is_zero());
    }

    #[test]
    fn evaluation_and_poles() {
        let r = ring();
        let (h1, h2) = (v(&r, "H1"), v(&r, "H2"));
        let eps = r.one();
        let a = (&h1 * &h1 - &eps * &h2) / (&h1 * &h1);
        let pt: BTreeMap<String, Rational> = [("H1", 2), ("H2", 2)]
            .into_iter()
            .map(|(k, x)| (k.to_string(), Rational::from_integer(x.into())))
            .collect();
        assert_eq!(a.eval(&pt).unwrap(), Rational::new(1.into(), 2.into()));

        let b = &h2 / &(&h2 - r.one());
        let pt1: BTreeMap<String, Rational> =
            [("H2".to_string(), Rational::one())].into_iter().collect();
        match b.eval(&pt1) {
            Err(CoeffError::Pole { denominator }) => assert_eq!(denominator, "H2 - 1"),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = ring().one();
        let b = Ring::new(["x"], []).unwrap().one();
        assert_eq!(a.checked_add(&b), Err(CoeffError::RingMismatch));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let r = ring();
        let (h3, h4) = (v(&r, "H3"), v(&r, "H4"));
        let e = &h3 - &h4 * &h4;
        let swap: BTreeMap<usize, Scalar> = [(2, h4.clone()), (3, h3.clone())].into_iter().collect();
        assert_eq!(e.substitute(&swap).unwrap(), &h4 - &h3 * &h3);
    }

    #[test]
    fn non_monomial_denominators_collapse() {
        let r = ring();
        let h4 = v(&r, "H4");
        let d = &h4 * r.int(3) + r.int(4);
        let s = &h4 / &d;
        let t = s.pow(3).unwrap() * d.pow(3).unwrap();
        assert_eq!(t.render(), "H4^3");
        // (3H4+4)^2 divides the other denominator exactly, so no cross product
        let u = &s + &(r.one() / d.pow(2).unwrap());
        let monic = (&d / &r.int(3)).pow(2).unwrap();
        assert_eq!(u.denominator(), monic.numerator());
    }

    #[test]
    fn normalization_is_idempotent() {
        let r = ring();
        let (h1, h2) = (v(&r, "H1"), v(&r, "H2"));
        let a = (&h1 * &h2 + r.ratio(3, 4) * &h2) / (&h2 * &h1 * r.int(6) - r.int(2) * &h2);
        let (n, d) = normalize(a.numerator().clone(), a.denominator().clone());
        assert_eq!(&n, a.numerator());
        assert_eq!(&d, a.denominator());
        // the common H2 factor is gone and the denominator is monic
        assert_eq!(a.render(), "(1/6*H1 + 1/8)/(H1 - 1/3)");
    }
}

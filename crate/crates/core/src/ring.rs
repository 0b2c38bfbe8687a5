//! Exact sparse multivariate polynomials over the rationals.
//!
//! `Poly` is the coefficient algebra for everything downstream: multivector
//! fields, differential forms and the operator matrices all carry `Poly`
//! entries. Coefficients are arbitrary-precision rationals and every value is
//! kept in canonical form (no zero coefficients, fixed monomial order), so
//! equality is syntactic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rational {
    BigRational::from(BigInt::from(num))
}

/// Exponent tuple of a monomial, one entry per variable.
///
/// Ordered graded-lexicographically: lower total degree first, ties broken so
/// that earlier variables sort first (`x` before `y`, `x^2` before `x*y`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0) {
            match b.cmp(a) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A rational point of the ambient coordinate space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point {
            coords: coords.iter().map(|&c| rat_int(c)).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.coords.len()
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(num_vars: usize) -> Self {
        Poly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(num_vars), c);
        }
        p
    }

    pub fn one(num_vars: usize) -> Self {
        Poly::constant(num_vars, Rational::one())
    }

    pub fn var(num_vars: usize, index: usize) -> Result<Self> {
        if index >= num_vars {
            return Err(Error::IndexOutOfRange { index, num_vars });
        }
        let mut p = Poly::zero(num_vars);
        p.terms
            .insert(Monomial::var(num_vars, index), Rational::one());
        Ok(p)
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Poly::zero(num_vars);
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), num_vars);
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero polynomial reports `None`.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Coefficient of the given monomial (zero when absent).
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term, i.e. the coefficient of the empty monomial.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::constant(self.num_vars))
    }

    /// Extract the rational value of a constant polynomial.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.total_degree() {
            None => Some(Rational::zero()),
            Some(0) => Some(self.constant_term()),
            Some(_) => None,
        }
    }

    fn check_dims(&self, other: &Poly) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.num_vars);
        }
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_dims(other)?;
        let mut out = Poly::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(self.num_vars);
        for _ in 0..n {
            out = out.mul(self).expect("same ring");
        }
        out
    }

    /// Formal partial derivative with respect to variable `index`.
    pub fn partial(&self, index: usize) -> Result<Poly> {
        if index >= self.num_vars {
            return Err(Error::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        let mut out = Poly::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] -= 1;
            out.add_term(Monomial(exps), c * Rational::from(BigInt::from(e)));
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &Point) -> Result<Rational> {
        if x.num_vars() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: x.num_vars(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term *= &x.coords[i];
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Floating-point evaluation, used only by the numeric layer.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = rational_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                term *= x[i].powi(e as i32);
            }
            acc += term;
        }
        acc
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn fmt_coefficient(c: &Rational) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Renders one term against the variable names; `None` when the coefficient
/// alone should be printed (constant term).
fn fmt_term(m: &Monomial, c: &Rational, names: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let abs = c.abs();
    if m.total_degree() == 0 || !abs.is_one() {
        parts.push(fmt_coefficient(&abs));
    }
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if e == 1 {
            parts.push(names[i].clone());
        } else {
            parts.push(format!("{}^{}", names[i], e));
        }
    }
    parts.join("*")
}

impl Poly {
    /// Canonical text form against explicit variable names, highest-order
    /// terms first.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let body = fmt_term(m, c, names);
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
                out.push_str(&body);
            } else if c.is_negative() {
                out.push_str(" - ");
                out.push_str(&body);
            } else {
                out.push_str(" + ");
                out.push_str(&body);
            }
        }
        out
    }
}

pub fn default_names(num_vars: usize) -> Vec<String> {
    (1..=num_vars).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&default_names(self.num_vars)))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn vars2() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn vars3() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn p2(s: &str) -> Poly {
        parse_poly(s, &vars2()).unwrap()
    }

    fn p3(s: &str) -> Poly {
        parse_poly(s, &vars3()).unwrap()
    }

    #[test]
    fn add_inverse_cancels() {
        let x = p2("x");
        assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn add_disjoint_monomials() {
        assert_eq!(p2("x^2+1").add(&p2("y")).unwrap(), p2("x^2+y+1"));
    }

    #[test]
    fn add_rational_coefficients() {
        assert_eq!(p2("1/2*x").add(&p2("1/3*x")).unwrap(), p2("5/6*x"));
    }

    #[test]
    fn mul_difference_of_squares() {
        assert_eq!(p2("x+y").mul(&p2("x-y")).unwrap(), p2("x^2-y^2"));
    }

    #[test]
    fn mul_by_zero() {
        let p = p2("3*x^2*y - 7");
        assert!(p.mul(&Poly::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn mul_hand_expansion() {
        assert_eq!(p2("x^2+y^2").mul(&p2("x*y")).unwrap(), p2("x^3*y + x*y^3"));
    }

    #[test]
    fn partial_basics() {
        assert_eq!(p2("x^2*y").partial(0).unwrap(), p2("2*x*y"));
        assert!(p2("x^2").partial(1).unwrap().is_zero());
        assert_eq!(p3("x*y*z + z^3").partial(2).unwrap(), p3("x*y + 3*z^2"));
    }

    #[test]
    fn partial_index_out_of_range() {
        assert!(matches!(
            p2("x").partial(5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn eval_basics() {
        let s = p3("x^2+y^2+z^2");
        assert_eq!(s.eval(&Point::from_ints(&[1, 0, 0])).unwrap(), rat_int(1));
        assert_eq!(
            Poly::zero(3).eval(&Point::from_ints(&[4, 5, 6])).unwrap(),
            rat_int(0)
        );
        let q = p2("x^3 - 2*y");
        let pt = Point::new(vec![rat_int(2), rat(1, 2)]);
        assert_eq!(q.eval(&pt).unwrap(), rat_int(7));
    }

    #[test]
    fn eval_dimension_mismatch() {
        assert!(p2("x").eval(&Point::from_ints(&[1, 2, 3])).is_err());
    }

    #[test]
    fn ring_axioms_random() {
        use crate::sampling::SampleConfig;
        let mut rng = crate::sampling::rng(7);
        let cfg = SampleConfig {
            num_vars: 3,
            max_poly_degree: 3,
            ..Default::default()
        };
        for _ in 0..50 {
            let a = crate::sampling::poly(&mut rng, &cfg);
            let b = crate::sampling::poly(&mut rng, &cfg);
            let c = crate::sampling::poly(&mut rng, &cfg);
            // associativity and commutativity
            assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            // distributivity
            assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn leibniz_rule_random() {
        use crate::sampling::SampleConfig;
        let mut rng = crate::sampling::rng(11);
        let cfg = SampleConfig {
            num_vars: 3,
            max_poly_degree: 3,
            ..Default::default()
        };
        for _ in 0..50 {
            let a = crate::sampling::poly(&mut rng, &cfg);
            let b = crate::sampling::poly(&mut rng, &cfg);
            for i in 0..3 {
                let lhs = a.mul(&b).unwrap().partial(i).unwrap();
                let rhs = a
                    .partial(i)
                    .unwrap()
                    .mul(&b)
                    .unwrap()
                    .add(&a.mul(&b.partial(i).unwrap()).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn eval_is_ring_homomorphism() {
        use crate::sampling::SampleConfig;
        let mut rng = crate::sampling::rng(13);
        let cfg = SampleConfig {
            num_vars: 2,
            max_poly_degree: 3,
            ..Default::default()
        };
        for _ in 0..50 {
            let a = crate::sampling::poly(&mut rng, &cfg);
            let b = crate::sampling::poly(&mut rng, &cfg);
            let x = crate::sampling::point(&mut rng, 2);
            assert_eq!(
                a.mul(&b).unwrap().eval(&x).unwrap(),
                a.eval(&x).unwrap() * b.eval(&x).unwrap()
            );
        }
    }

    #[test]
    fn display_round_trip() {
        let names = vars2();
        for s in ["3/2*x^2*y - y", "x^2 - y^2", "0", "-x - 1/2"] {
            let p = parse_poly(s, &names).unwrap();
            let q = parse_poly(&p.display_with(&names), &names).unwrap();
            assert_eq!(p, q);
        }
    }
}

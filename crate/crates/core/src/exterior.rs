//! The graded exterior algebra kernel: multivector fields (`e(i,j,...)`,
//! wedges of coordinate derivations) and differential forms (`dx(i,j,...)`)
//! with polynomial coefficients.
//!
//! Terms are stored against strictly increasing index tuples; the sign of any
//! rearrangement is absorbed at insertion. Values may be inhomogeneous sums;
//! every operation distributes over graded components.
//!
//! Normalization convention: the pairing satisfies `<dx_I, e_J> = 1` iff
//! `I = J` on increasing tuples, with no factorial factors. The interior
//! product is fixed by the adjunction `(i_u w)(v) = w(u ∧ v)` and
//! multiderivation evaluation by the coefficient-determinant formula; all
//! downstream sign conventions are anchored to these.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::ring::{Poly, Rational};

/// Marker for the derivation flavor (`e(...)` basis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Der {}

/// Marker for the differential-form flavor (`dx(...)` basis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {}

pub trait Flavor {
    const BASIS_SYMBOL: &'static str;
}

impl Flavor for Der {
    const BASIS_SYMBOL: &'static str = "e";
}

impl Flavor for Form {
    const BASIS_SYMBOL: &'static str = "dx";
}

/// Strictly increasing tuple of 0-based variable indices.
pub type IndexTuple = Vec<usize>;

/// Sign of sorting the concatenation of two increasing tuples; `None` when
/// they share an index.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(IndexTuple, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining entries of a
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Some((out, sign))
}

/// Graded element with `Poly` coefficients over either basis flavor.
pub struct Exterior<B: Flavor> {
    num_vars: usize,
    terms: BTreeMap<IndexTuple, Poly>,
    _marker: PhantomData<B>,
}

impl<B: Flavor> Clone for Exterior<B> {
    fn clone(&self) -> Self {
        Exterior {
            num_vars: self.num_vars,
            terms: self.terms.clone(),
            _marker: PhantomData,
        }
    }
}

impl<B: Flavor> PartialEq for Exterior<B> {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.terms == other.terms
    }
}

impl<B: Flavor> Eq for Exterior<B> {}

pub type MultiVector = Exterior<Der>;
pub type DiffForm = Exterior<Form>;

impl<B: Flavor> Exterior<B> {
    pub fn zero(num_vars: usize) -> Self {
        Exterior {
            num_vars,
            terms: BTreeMap::new(),
            _marker: PhantomData,
        }
    }

    /// The coordinate basis element for a (not necessarily sorted) index
    /// tuple; repeated indices yield zero, odd rearrangements a sign.
    pub fn basis(num_vars: usize, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= num_vars {
                return Err(Error::IndexOutOfRange { index: i, num_vars });
            }
        }
        let mut out = Self::zero(num_vars);
        let mut sorted: Vec<usize> = Vec::new();
        let mut sign = 1i32;
        for &i in indices {
            match merge_sign(&sorted, &[i]) {
                Some((merged, s)) => {
                    sorted = merged;
                    sign *= s;
                }
                None => return Ok(out),
            }
        }
        let coeff = if sign == 1 {
            Poly::one(num_vars)
        } else {
            Poly::one(num_vars).neg()
        };
        out.terms.insert(sorted, coeff);
        Ok(out)
    }

    pub fn from_poly(p: Poly) -> Self {
        let mut out = Self::zero(p.num_vars());
        if !p.is_zero() {
            out.terms.insert(Vec::new(), p);
        }
        out
    }

    pub fn from_term(num_vars: usize, indices: &[usize], coeff: Poly) -> Result<Self> {
        Self::basis(num_vars, indices)?.scale_poly(&coeff)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexTuple, &Poly)> {
        self.terms.iter()
    }

    /// Degree of a homogeneous element; `None` for zero, error when mixed.
    pub fn degree(&self) -> Result<Option<usize>> {
        let mut deg = None;
        for k in self.terms.keys() {
            match deg {
                None => deg = Some(k.len()),
                Some(d) if d == k.len() => {}
                Some(d) => {
                    return Err(Error::DegreeMismatch(format!(
                        "inhomogeneous element mixes degrees {d} and {}",
                        k.len()
                    )))
                }
            }
        }
        Ok(deg)
    }

    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|k| k.len() == degree)
    }

    /// Split into homogeneous graded components, lowest degree first.
    pub fn components(&self) -> Vec<(usize, Self)> {
        let mut by_degree: BTreeMap<usize, Self> = BTreeMap::new();
        for (k, c) in &self.terms {
            by_degree
                .entry(k.len())
                .or_insert_with(|| Self::zero(self.num_vars))
                .terms
                .insert(k.clone(), c.clone());
        }
        by_degree.into_iter().collect()
    }

    /// The homogeneous component of the given degree.
    pub fn component(&self, degree: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (k, c) in &self.terms {
            if k.len() == degree {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    pub fn coefficient(&self, indices: &[usize]) -> Poly {
        self.terms
            .get(indices)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.num_vars))
    }

    /// Degree-0 part as a polynomial.
    pub fn scalar_part(&self) -> Poly {
        self.coefficient(&[])
    }

    pub fn max_coeff_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(|p| p.total_degree()).max()
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn add_term(&mut self, indices: IndexTuple, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        match self.terms.entry(indices) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff).expect("same ring");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Exterior {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
            _marker: PhantomData,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (k, p) in &self.terms {
            out.add_term(k.clone(), p.scale(c));
        }
        out
    }

    pub fn scale_poly(&self, p: &Poly) -> Result<Self> {
        let mut out = Self::zero(self.num_vars);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.mul(p)?);
        }
        Ok(out)
    }

    /// Associative graded product: index merge with the permutation sign,
    /// zero on repeated indices.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = Self::zero(self.num_vars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if let Some((merged, sign)) = merge_sign(ka, kb) {
                    let mut c = ca.mul(cb)?;
                    if sign < 0 {
                        c = c.neg();
                    }
                    out.add_term(merged, c);
                }
            }
        }
        Ok(out)
    }

    pub fn wedge_all(factors: &[Self]) -> Result<Self> {
        let num_vars = factors
            .first()
            .map(|f| f.num_vars)
            .expect("at least one factor");
        let mut acc = Self::from_poly(Poly::one(num_vars));
        for f in factors {
            acc = acc.wedge(f)?;
        }
        Ok(acc)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            if k.is_empty() {
                if c.num_terms() == 1 {
                    parts.push(c.display_with(names));
                } else {
                    parts.push(format!("({})", c.display_with(names)));
                }
                continue;
            }
            let basis = format!(
                "{}({})",
                B::BASIS_SYMBOL,
                k.iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            if c.num_terms() == 1 {
                let rendered = c.display_with(names);
                if rendered == "1" {
                    parts.push(basis);
                } else if rendered == "-1" {
                    parts.push(format!("-{basis}"));
                } else {
                    parts.push(format!("{rendered}*{basis}"));
                }
            } else {
                parts.push(format!("({})*{}", c.display_with(names), basis));
            }
        }
        let mut out = String::new();
        for (i, part) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(part);
            } else if let Some(rest) = part.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(part);
            }
        }
        out
    }
}

impl<B: Flavor> fmt::Display for Exterior<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            self.display_with(&crate::ring::default_names(self.num_vars))
        )
    }
}

impl<B: Flavor> fmt::Debug for Exterior<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{self}]", B::BASIS_SYMBOL)
    }
}

/// Bilinear pairing of a form and a multivector of equal degree:
/// `<dx_I, e_J> = 1` iff `I = J`, extended with coefficient products.
pub fn pair(omega: &DiffForm, u: &MultiVector) -> Result<Poly> {
    if omega.num_vars != u.num_vars {
        return Err(Error::DimensionMismatch {
            expected: omega.num_vars,
            got: u.num_vars,
        });
    }
    if !(omega.is_zero() || u.is_zero()) {
        let dw = omega.degree()?;
        let du = u.degree()?;
        if dw != du {
            return Err(Error::DegreeMismatch(format!(
                "pairing a degree-{dw:?} form with a degree-{du:?} multivector"
            )));
        }
    }
    let mut acc = Poly::zero(omega.num_vars);
    for (k, c) in &omega.terms {
        if let Some(d) = u.terms.get(k) {
            acc = acc.add(&c.mul(d)?)?;
        }
    }
    Ok(acc)
}

/// Interior product fixed by the adjunction `(i_u w)(v) = w(u ∧ v)`.
///
/// Total: components of `w` with degree lower than `u` contribute zero.
pub fn interior(u: &MultiVector, omega: &DiffForm) -> Result<DiffForm> {
    if omega.num_vars != u.num_vars {
        return Err(Error::DimensionMismatch {
            expected: u.num_vars,
            got: omega.num_vars,
        });
    }
    let mut out = DiffForm::zero(omega.num_vars);
    for (j, b) in &u.terms {
        for (i, c) in &omega.terms {
            if j.iter().any(|idx| !i.contains(idx)) {
                continue;
            }
            let k: IndexTuple = i.iter().copied().filter(|idx| !j.contains(idx)).collect();
            let (merged, sign) = merge_sign(j, &k).expect("disjoint by construction");
            debug_assert_eq!(&merged, i);
            let mut coeff = b.mul(c)?;
            if sign < 0 {
                coeff = coeff.neg();
            }
            out.add_term(k, coeff);
        }
    }
    Ok(out)
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
fn poly_det(num_vars: usize, m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(num_vars);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(num_vars);
    for r in 0..n {
        let c = &m[r][0];
        if c.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, row)| row[1..].to_vec())
            .collect();
        let mut term = c.mul(&poly_det(num_vars, &minor)).expect("same ring");
        if r % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term).expect("same ring");
    }
    acc
}

/// Evaluate a homogeneous multivector as a multiderivation on `k` arguments:
/// each term contributes `coeff * det[d_{i_r} a_s]`.
pub fn eval_multiderivation(u: &MultiVector, args: &[Poly]) -> Result<Poly> {
    let num_vars = u.num_vars;
    for a in args {
        if a.num_vars() != num_vars {
            return Err(Error::DimensionMismatch {
                expected: num_vars,
                got: a.num_vars(),
            });
        }
    }
    if let Some(deg) = u.degree()? {
        if deg != args.len() {
            return Err(Error::ArgCount {
                expected: deg,
                got: args.len(),
            });
        }
    } else {
        return Ok(Poly::zero(num_vars));
    }
    let mut partials: BTreeMap<usize, Vec<Poly>> = BTreeMap::new();
    let mut acc = Poly::zero(num_vars);
    for (indices, c) in &u.terms {
        let matrix: Vec<Vec<Poly>> = indices
            .iter()
            .map(|&i| {
                partials
                    .entry(i)
                    .or_insert_with(|| {
                        args.iter()
                            .map(|a| a.partial(i).expect("index checked"))
                            .collect()
                    })
                    .clone()
            })
            .collect();
        acc = acc.add(&c.mul(&poly_det(num_vars, &matrix))?)?;
    }
    Ok(acc)
}

/// `u(f)` for a degree-1 multivector, i.e. the derivation applied to `f`.
pub fn apply_derivation(u: &MultiVector, f: &Poly) -> Result<Poly> {
    let mut acc = Poly::zero(f.num_vars());
    for (k, c) in &u.terms {
        debug_assert_eq!(k.len(), 1);
        acc = acc.add(&c.mul(&f.partial(k[0])?)?)?;
    }
    Ok(acc)
}

pub fn wedge_sign(a: &[usize], b: &[usize]) -> Option<(IndexTuple, i32)> {
    merge_sign(a, b)
}

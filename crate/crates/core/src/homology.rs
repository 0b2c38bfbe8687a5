//! Finite-dimensional truncations of the three differential complexes and
//! the exact-rational computations on them: operator matrices, Casimir
//! functions, canonical zero-homology, Casimir distributions and the
//! star-conjugation matrix identity.
//!
//! The three complex operators (exterior derivative, canonical boundary,
//! Lichnerowicz coboundary) sit behind the [`GradedOperator`] trait and are
//! selected by name through [`operator_by_name`]; everything downstream
//! (matrix assembly, the CLI) is written against the trait.
//!
//! Truncations are closed by construction: the codomain bound is computed
//! from the operator's degree bookkeeping, and any image term that would
//! escape the codomain is a hard error rather than a silent cut.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::calculus::{exterior_derivative, koszul_delta, lichnerowicz, star_on_form};
use crate::error::{Error, Result};
use crate::exterior::{interior, DiffForm, IndexTuple, MultiVector};
use crate::linalg::{self, QMatrix};
use crate::poisson::{bracket, hamiltonian_field_raw, PoissonStructure};
use crate::ring::{Monomial, Point, Poly, Rational};

/// Which graded world a truncation slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Form,
    Multivector,
    /// Degree-0 slice of either world: plain polynomials.
    Function,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Form => "form",
            Flavor::Multivector => "multivector",
            Flavor::Function => "function",
        }
    }

    pub fn parse(s: &str) -> Result<Flavor> {
        match s {
            "form" => Ok(Flavor::Form),
            "multivector" => Ok(Flavor::Multivector),
            "function" => Ok(Flavor::Function),
            other => Err(Error::Invalid(format!("unknown flavor '{other}'"))),
        }
    }
}

/// A finite graded slice: elements of one object degree whose polynomial
/// coefficients stay within a total-degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationSpec {
    pub flavor: Flavor,
    /// Object degree; may leave `0..=num_vars` for derived codomains, in
    /// which case the slice is empty.
    pub degree: i64,
    /// Coefficient total-degree bound; negative means the empty slice.
    pub coeff_bound: i64,
    pub num_vars: usize,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn monomials_up_to(num_vars: usize, bound: u32) -> Vec<Monomial> {
    fn rec(exps: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Monomial>) {
        if pos == exps.len() {
            out.push(Monomial(exps.clone()));
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(exps, pos + 1, left - e, out);
        }
        exps[pos] = 0;
    }
    let mut out = Vec::new();
    let mut exps = vec![0u32; num_vars];
    rec(&mut exps, 0, bound, &mut out);
    out.sort();
    out
}

fn index_tuples(num_vars: usize, k: usize) -> Vec<IndexTuple> {
    if k > num_vars {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k == 0 {
        return vec![Vec::new()];
    }
    loop {
        out.push(current.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + num_vars - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

impl TruncationSpec {
    pub fn new(flavor: Flavor, degree: usize, coeff_bound: usize, num_vars: usize) -> Self {
        TruncationSpec {
            flavor,
            degree: degree as i64,
            coeff_bound: coeff_bound as i64,
            num_vars,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.degree < 0
            || self.degree > self.num_vars as i64
            || self.coeff_bound < 0
            || (self.flavor == Flavor::Function && self.degree != 0)
    }

    /// Deterministic basis: monomial-major (graded-lex), index tuples in
    /// lexicographic order within each monomial.
    pub fn basis(&self) -> Vec<(Monomial, IndexTuple)> {
        if self.is_empty() {
            return Vec::new();
        }
        let monos = monomials_up_to(self.num_vars, self.coeff_bound as u32);
        let tuples = index_tuples(self.num_vars, self.degree as usize);
        let mut out = Vec::with_capacity(monos.len() * tuples.len());
        for m in &monos {
            for t in &tuples {
                out.push((m.clone(), t.clone()));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        let polys = binomial(self.num_vars + self.coeff_bound as usize, self.num_vars);
        binomial(self.num_vars, self.degree as usize) * polys
    }

    fn shifted(&self, flavor: Flavor, degree_shift: i64, coeff_shift: i64) -> TruncationSpec {
        TruncationSpec {
            flavor,
            degree: self.degree + degree_shift,
            coeff_bound: self.coeff_bound + coeff_shift,
            num_vars: self.num_vars,
        }
    }

    /// The flavor with `Function` resolved to the given concrete world.
    fn normalized(&self, concrete: Flavor) -> TruncationSpec {
        let mut out = self.clone();
        if out.flavor == Flavor::Function {
            out.flavor = concrete;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "flavor": self.flavor.as_str(),
            "degree": self.degree,
            "coeff_degree": self.coeff_bound,
            "vars": self.num_vars,
        })
    }
}

/// A graded element of either world, the common currency of the operator
/// trait.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Vector(MultiVector),
    Form(DiffForm),
}

impl Element {
    pub fn num_vars(&self) -> usize {
        match self {
            Element::Vector(v) => v.num_vars(),
            Element::Form(f) => f.num_vars(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Vector(v) => v.is_zero(),
            Element::Form(f) => f.is_zero(),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        match self {
            Element::Vector(v) => v.display_with(names),
            Element::Form(f) => f.display_with(names),
        }
    }
}

/// One operator of a differential complex, materializable as an exact
/// matrix between closed truncations. Implementations register by name in
/// [`operator_by_name`].
pub trait GradedOperator {
    fn name(&self) -> &'static str;
    /// The world the operator acts on.
    fn flavor(&self) -> Flavor;
    /// Shift of the object degree.
    fn degree_shift(&self) -> i64;
    /// Shift of the coefficient degree bound.
    fn coeff_shift(&self) -> i64;
    fn apply(&self, elem: &Element) -> Result<Element>;
}

/// The exterior derivative `d` on forms.
pub struct ExteriorDerivativeOp;

impl GradedOperator for ExteriorDerivativeOp {
    fn name(&self) -> &'static str {
        "d"
    }
    fn flavor(&self) -> Flavor {
        Flavor::Form
    }
    fn degree_shift(&self) -> i64 {
        1
    }
    fn coeff_shift(&self) -> i64 {
        -1
    }
    fn apply(&self, elem: &Element) -> Result<Element> {
        match elem {
            Element::Form(w) => Ok(Element::Form(exterior_derivative(w))),
            Element::Vector(_) => Err(Error::Invalid(
                "the exterior derivative acts on forms".into(),
            )),
        }
    }
}

/// The canonical boundary `delta = i_p d - d i_p` on forms.
pub struct KoszulBoundaryOp {
    p: PoissonStructure,
}

impl GradedOperator for KoszulBoundaryOp {
    fn name(&self) -> &'static str {
        "delta"
    }
    fn flavor(&self) -> Flavor {
        Flavor::Form
    }
    fn degree_shift(&self) -> i64 {
        -1
    }
    fn coeff_shift(&self) -> i64 {
        self.p.coeff_degree() as i64 - 1
    }
    fn apply(&self, elem: &Element) -> Result<Element> {
        match elem {
            Element::Form(w) => Ok(Element::Form(koszul_delta(&self.p, w)?)),
            Element::Vector(_) => Err(Error::Invalid(
                "the canonical boundary acts on forms".into(),
            )),
        }
    }
}

/// The Lichnerowicz coboundary `[p, .]` on multivectors.
pub struct LichnerowiczOp {
    p: PoissonStructure,
}

impl GradedOperator for LichnerowiczOp {
    fn name(&self) -> &'static str {
        "dp"
    }
    fn flavor(&self) -> Flavor {
        Flavor::Multivector
    }
    fn degree_shift(&self) -> i64 {
        1
    }
    fn coeff_shift(&self) -> i64 {
        self.p.coeff_degree() as i64 - 1
    }
    fn apply(&self, elem: &Element) -> Result<Element> {
        match elem {
            Element::Vector(u) => Ok(Element::Vector(lichnerowicz(&self.p, u)?)),
            Element::Form(_) => Err(Error::Invalid(
                "the Lichnerowicz coboundary acts on multivectors".into(),
            )),
        }
    }
}

pub const OPERATOR_NAMES: [&str; 3] = ["d", "delta", "dp"];

/// Runtime selection of a complex operator by name. `delta` and `dp`
/// capture the Poisson structure; `d` ignores it.
pub fn operator_by_name(
    name: &str,
    p: Option<&PoissonStructure>,
) -> Result<Box<dyn GradedOperator>> {
    match name {
        "d" => Ok(Box::new(ExteriorDerivativeOp)),
        "delta" | "koszul" => {
            let p = p.ok_or_else(|| {
                Error::Invalid("operator 'delta' needs a Poisson structure".into())
            })?;
            Ok(Box::new(KoszulBoundaryOp { p: p.clone() }))
        }
        "dp" | "lichnerowicz" => {
            let p =
                p.ok_or_else(|| Error::Invalid("operator 'dp' needs a Poisson structure".into()))?;
            Ok(Box::new(LichnerowiczOp { p: p.clone() }))
        }
        other => Err(Error::Invalid(format!(
            "unknown operator '{other}' (expected one of {OPERATOR_NAMES:?})"
        ))),
    }
}

struct BasisIndex {
    spec: TruncationSpec,
    mono_pos: BTreeMap<Monomial, usize>,
    tuple_pos: BTreeMap<IndexTuple, usize>,
    n_tuples: usize,
}

impl BasisIndex {
    fn new(spec: &TruncationSpec) -> Self {
        let monos = if spec.is_empty() {
            Vec::new()
        } else {
            monomials_up_to(spec.num_vars, spec.coeff_bound as u32)
        };
        let tuples = if spec.is_empty() {
            Vec::new()
        } else {
            index_tuples(spec.num_vars, spec.degree as usize)
        };
        BasisIndex {
            spec: spec.clone(),
            n_tuples: tuples.len(),
            mono_pos: monos.into_iter().enumerate().map(|(i, m)| (m, i)).collect(),
            tuple_pos: tuples
                .into_iter()
                .enumerate()
                .map(|(i, t)| (t, i))
                .collect(),
        }
    }

    fn position(&self, m: &Monomial, t: &IndexTuple) -> Result<usize> {
        let mp = self.mono_pos.get(m).ok_or_else(|| {
            Error::NonClosedTruncation(format!(
                "coefficient degree {} escapes the bound {} of the codomain",
                m.total_degree(),
                self.spec.coeff_bound
            ))
        })?;
        let tp = self.tuple_pos.get(t).ok_or_else(|| {
            Error::NonClosedTruncation(format!(
                "object degree {} escapes the codomain degree {}",
                t.len(),
                self.spec.degree
            ))
        })?;
        Ok(mp * self.n_tuples + tp)
    }

    fn expand_terms<'a>(
        &self,
        terms: impl Iterator<Item = (&'a IndexTuple, &'a Poly)>,
    ) -> Result<Vec<(usize, Rational)>> {
        let mut out = Vec::new();
        for (t, c) in terms {
            for (m, v) in c.terms() {
                out.push((self.position(m, t)?, v.clone()));
            }
        }
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    fn element_to_sparse(&self, elem: &Element) -> Result<Vec<(usize, Rational)>> {
        match elem {
            Element::Vector(v) => self.expand_terms(v.terms()),
            Element::Form(f) => self.expand_terms(f.terms()),
        }
    }
}

/// Exact sparse matrix of a graded operator between two closed truncations;
/// columns are the expanded images of the domain basis.
pub struct OperatorMatrix {
    pub name: String,
    pub domain: TruncationSpec,
    pub codomain: TruncationSpec,
    columns: Vec<Vec<(usize, Rational)>>,
}

impl OperatorMatrix {
    pub fn columns(&self) -> &[Vec<(usize, Rational)>] {
        &self.columns
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        let mut m = QMatrix::zero(self.codomain.dim(), self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                m[(*i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.to_qmatrix())
    }

    pub fn kernel_dim(&self) -> usize {
        self.domain.dim() - self.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// `self ∘ other`: apply `other` first. Domains must chain exactly.
    pub fn compose(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.domain != other.codomain {
            return Err(Error::NonClosedTruncation(format!(
                "cannot compose: {:?} does not chain onto {:?}",
                other.codomain, self.domain
            )));
        }
        let mut dense_cols: Vec<Vec<Rational>> = Vec::with_capacity(other.columns.len());
        for col in &other.columns {
            let mut acc = vec![Rational::zero(); self.codomain.dim()];
            for (mid, v) in col {
                for (out_row, w) in &self.columns[*mid] {
                    acc[*out_row] += v * w;
                }
            }
            dense_cols.push(acc);
        }
        let columns = dense_cols
            .into_iter()
            .map(|dense| {
                dense
                    .into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Ok(OperatorMatrix {
            name: format!("{} ∘ {}", self.name, other.name),
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            columns,
        })
    }
}

fn basis_element(spec: &TruncationSpec, m: &Monomial, t: &IndexTuple) -> Element {
    let coeff = Poly::from_terms(spec.num_vars, [(m.clone(), Rational::one())]);
    match spec.flavor {
        Flavor::Multivector => Element::Vector(
            MultiVector::from_term(spec.num_vars, t, coeff).expect("valid basis tuple"),
        ),
        _ => Element::Form(DiffForm::from_term(spec.num_vars, t, coeff).expect("valid tuple")),
    }
}

/// Materialize an operator as an exact matrix; the codomain is derived from
/// the operator's degree bookkeeping, and any image escaping it is an error.
pub fn operator_matrix(op: &dyn GradedOperator, domain: &TruncationSpec) -> Result<OperatorMatrix> {
    if domain.flavor != Flavor::Function && domain.flavor != op.flavor() {
        return Err(Error::Invalid(format!(
            "operator '{}' acts on {} truncations, got {}",
            op.name(),
            op.flavor().as_str(),
            domain.flavor.as_str()
        )));
    }
    if domain.flavor == Flavor::Function && domain.degree != 0 {
        return Err(Error::Invalid(
            "function-flavor truncations have object degree 0".into(),
        ));
    }
    let domain = domain.normalized(op.flavor());
    let codomain = domain.shifted(op.flavor(), op.degree_shift(), op.coeff_shift());
    let codomain_index = BasisIndex::new(&codomain);
    let mut columns = Vec::with_capacity(domain.dim());
    for (m, t) in domain.basis() {
        let image = op.apply(&basis_element(&domain, &m, &t))?;
        columns.push(codomain_index.element_to_sparse(&image)?);
    }
    Ok(OperatorMatrix {
        name: op.name().to_string(),
        domain,
        codomain,
        columns,
    })
}

fn vec_to_poly(num_vars: usize, basis: &[Monomial], v: &[Rational]) -> Poly {
    Poly::from_terms(
        num_vars,
        basis
            .iter()
            .zip(v.iter())
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Clear denominators, divide by the content, make the leading coefficient
/// positive. Purely cosmetic normalization for reported bases.
fn normalize_poly(p: &Poly) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    let mut denom_lcm = num_bigint::BigInt::one();
    for (_, c) in p.terms() {
        let d = c.denom();
        let g = num_integer::Integer::gcd(&denom_lcm, d);
        denom_lcm = denom_lcm / g * d;
    }
    let scaled = p.scale(&Rational::from(denom_lcm));
    let mut content = num_bigint::BigInt::zero();
    for (_, c) in scaled.terms() {
        content = num_integer::Integer::gcd(&content, c.numer());
    }
    let mut out = scaled.scale(&Rational::new(num_bigint::BigInt::one(), content));
    let leading = out
        .terms()
        .last()
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    if leading {
        out = out.neg();
    }
    out
}

/// Exact kernel of the Lichnerowicz coboundary on functions of degree
/// `<= bound`: the truncated Casimir space. Always contains the constants.
pub fn casimir_space(p: &PoissonStructure, bound: usize) -> Result<Vec<Poly>> {
    p.require_verified()?;
    let n = p.num_vars();
    let domain = TruncationSpec::new(Flavor::Multivector, 0, bound, n);
    let op = LichnerowiczOp { p: p.clone() };
    let matrix = operator_matrix(&op, &domain)?;
    let kernel = linalg::kernel_basis(&matrix.to_qmatrix());
    let monos = monomials_up_to(n, bound as u32);
    Ok(kernel
        .iter()
        .map(|v| normalize_poly(&vec_to_poly(n, &monos, v)))
        .collect())
}

/// Largest coefficient bound for 1-forms whose canonical-boundary image
/// stays within function degree `<= bound`.
fn omega1_bound_for(p: &PoissonStructure, bound: usize) -> i64 {
    bound as i64 - (p.coeff_degree() as i64 - 1)
}

#[derive(Debug)]
pub struct CanonicalH0 {
    pub dimension: usize,
    pub representatives: Vec<Poly>,
    pub image_rank: usize,
    /// The 1-form truncation whose image was used.
    pub omega1: TruncationSpec,
    /// The ambient function truncation.
    pub functions: TruncationSpec,
}

/// Truncated canonical zero-homology: functions of degree `<= bound` modulo
/// the image of the canonical boundary on the largest closed 1-form slice.
pub fn h0_canonical(p: &PoissonStructure, bound: usize) -> Result<CanonicalH0> {
    p.require_verified()?;
    let n = p.num_vars();
    let functions = TruncationSpec::new(Flavor::Form, 0, bound, n);
    let omega1 = TruncationSpec {
        flavor: Flavor::Form,
        degree: 1,
        coeff_bound: omega1_bound_for(p, bound),
        num_vars: n,
    };
    let monos = monomials_up_to(n, bound as u32);
    if omega1.is_empty() {
        return Ok(CanonicalH0 {
            dimension: functions.dim(),
            representatives: monos
                .iter()
                .map(|m| Poly::from_terms(n, [(m.clone(), Rational::one())]))
                .collect(),
            image_rank: 0,
            omega1,
            functions,
        });
    }
    let op = KoszulBoundaryOp { p: p.clone() };
    let matrix = operator_matrix(&op, &omega1)?;
    debug_assert_eq!(matrix.codomain.coeff_bound, bound as i64);
    let image_rows: Vec<Vec<Rational>> = (0..matrix.columns().len())
        .map(|j| {
            let mut dense = vec![Rational::zero(); functions.dim()];
            for (i, v) in &matrix.columns()[j] {
                dense[*i] = v.clone();
            }
            dense
        })
        .collect();
    let free = linalg::cokernel_representatives(&image_rows, functions.dim());
    let image_rank = functions.dim() - free.len();
    Ok(CanonicalH0 {
        dimension: free.len(),
        representatives: free
            .iter()
            .map(|&i| Poly::from_terms(n, [(monos[i].clone(), Rational::one())]))
            .collect(),
        image_rank,
        omega1,
        functions,
    })
}

/// A linear functional on a truncated function space, or a symplectic-leaf
/// integral functional.
#[derive(Debug, Clone)]
pub enum DistributionFunctional {
    TruncatedDual {
        /// Function truncation the coefficients index (flavor Function).
        spec: TruncationSpec,
        /// One coefficient per basis monomial of the spec.
        coeffs: Vec<Rational>,
    },
    Leaf {
        chart: crate::numeric::LeafChart,
    },
}

impl DistributionFunctional {
    pub fn from_coeffs(num_vars: usize, bound: usize, coeffs: Vec<Rational>) -> Self {
        let spec = TruncationSpec::new(Flavor::Function, 0, bound, num_vars);
        assert_eq!(spec.dim(), coeffs.len());
        DistributionFunctional::TruncatedDual { spec, coeffs }
    }

    /// The Dirac evaluation functional at a rational point.
    pub fn evaluation_at(num_vars: usize, bound: usize, point: &Point) -> Result<Self> {
        let monos = monomials_up_to(num_vars, bound as u32);
        let coeffs = monos
            .iter()
            .map(|m| Poly::from_terms(num_vars, [(m.clone(), Rational::one())]).eval(point))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(num_vars, bound, coeffs))
    }

    pub fn bound(&self) -> Option<i64> {
        match self {
            DistributionFunctional::TruncatedDual { spec, .. } => Some(spec.coeff_bound),
            DistributionFunctional::Leaf { .. } => None,
        }
    }

    /// Exact pairing with a polynomial inside the truncation.
    pub fn pair(&self, f: &Poly) -> Result<Rational> {
        match self {
            DistributionFunctional::TruncatedDual { spec, coeffs } => {
                if f.total_degree().map(|d| d as i64 > spec.coeff_bound) == Some(true) {
                    return Err(Error::NonClosedTruncation(format!(
                        "degree {} exceeds the functional's domain bound {}",
                        f.total_degree().unwrap(),
                        spec.coeff_bound
                    )));
                }
                let monos = monomials_up_to(spec.num_vars, spec.coeff_bound as u32);
                let mut acc = Rational::zero();
                for (m, c) in monos.iter().zip(coeffs.iter()) {
                    let v = f.coefficient(m);
                    if !v.is_zero() {
                        acc += c * v;
                    }
                }
                Ok(acc)
            }
            DistributionFunctional::Leaf { .. } => Err(Error::Invalid(
                "leaf functionals pair numerically; use pair_numeric".into(),
            )),
        }
    }

    /// Floating-point pairing: exact-then-rounded for truncated duals, the
    /// quadrature leaf integral for leaf functionals.
    pub fn pair_numeric(&self, p: &PoissonStructure, f: &Poly) -> Result<f64> {
        match self {
            DistributionFunctional::TruncatedDual { .. } => {
                Ok(crate::ring::rational_to_f64(&self.pair(f)?))
            }
            DistributionFunctional::Leaf { chart } => {
                crate::numeric::leaf_integrate(p, chart, f)
            }
        }
    }

    /// Module action `<g Phi, f> = <Phi, g f>`; the domain shrinks by the
    /// degree of `g`.
    pub fn scale_by_function(&self, g: &Poly) -> Result<DistributionFunctional> {
        match self {
            DistributionFunctional::TruncatedDual { spec, .. } => {
                let dg = g.total_degree().unwrap_or(0) as i64;
                let new_bound = spec.coeff_bound - dg;
                if new_bound < 0 {
                    return Err(Error::NonClosedTruncation(
                        "multiplier degree exhausts the functional's domain".into(),
                    ));
                }
                let monos = monomials_up_to(spec.num_vars, new_bound as u32);
                let coeffs = monos
                    .iter()
                    .map(|m| {
                        let phi = Poly::from_terms(spec.num_vars, [(m.clone(), Rational::one())]);
                        self.pair(&g.mul(&phi)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DistributionFunctional::from_coeffs(
                    spec.num_vars,
                    new_bound as usize,
                    coeffs,
                ))
            }
            DistributionFunctional::Leaf { .. } => Err(Error::Invalid(
                "leaf functionals are paired numerically".into(),
            )),
        }
    }
}

/// Bracket of a function with a truncated distribution:
/// `<{f, Phi}, phi> = <Phi, {phi, f}>`. The result lives on the largest
/// function slice whose brackets with `f` stay inside `Phi`'s domain.
pub fn distribution_bracket(
    p: &PoissonStructure,
    phi: &DistributionFunctional,
    f: &Poly,
) -> Result<DistributionFunctional> {
    p.require_verified()?;
    let DistributionFunctional::TruncatedDual { spec, .. } = phi else {
        return Err(Error::Invalid(
            "distribution_bracket acts on truncated duals".into(),
        ));
    };
    let shift = (f.total_degree().unwrap_or(0) as i64 + p.coeff_degree() as i64 - 2).max(0);
    let new_bound = spec.coeff_bound - shift;
    if new_bound < 0 {
        return Err(Error::NonClosedTruncation(format!(
            "bracket with a degree-{} function leaves no closed domain",
            f.total_degree().unwrap_or(0)
        )));
    }
    let monos = monomials_up_to(spec.num_vars, new_bound as u32);
    let coeffs = monos
        .iter()
        .map(|m| {
            let test = Poly::from_terms(spec.num_vars, [(m.clone(), Rational::one())]);
            phi.pair(&bracket(p, &test, f)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionFunctional::from_coeffs(
        spec.num_vars,
        new_bound as usize,
        coeffs,
    ))
}

/// Exact annihilator of the truncated bracket space: the basis of
/// functionals killing every `delta`-image of the closed 1-form slice.
/// Its dimension equals the canonical zero-homology dimension.
pub fn casimir_distributions(
    p: &PoissonStructure,
    bound: usize,
) -> Result<Vec<DistributionFunctional>> {
    p.require_verified()?;
    let n = p.num_vars();
    let functions = TruncationSpec::new(Flavor::Form, 0, bound, n);
    let omega1 = TruncationSpec {
        flavor: Flavor::Form,
        degree: 1,
        coeff_bound: omega1_bound_for(p, bound),
        num_vars: n,
    };
    let image_matrix = if omega1.is_empty() {
        QMatrix::zero(functions.dim(), 0)
    } else {
        let op = KoszulBoundaryOp { p: p.clone() };
        operator_matrix(&op, &omega1)?.to_qmatrix()
    };
    // annihilator of the column space = kernel of the transpose
    let kernel = linalg::kernel_basis(&image_matrix.transpose());
    Ok(kernel
        .into_iter()
        .map(|coeffs| DistributionFunctional::from_coeffs(n, bound, coeffs))
        .collect())
}

#[derive(Debug)]
pub struct StarIdentityReport {
    pub holds: bool,
    pub degree: usize,
    pub domain: TruncationSpec,
    /// First domain basis element where the matrices differ, if any.
    pub counterexample: Option<String>,
}

/// Verify the matrix identity `star ∘ delta = (-1)^k d ∘ star` on the
/// degree-`k` form truncation, after checking the three hypotheses on the
/// top form exactly: `d w = 0`, `dx_i ∧ w = 0` and `d i_{U_{x_i}} w = 0`
/// for every coordinate.
pub fn star_matrix_identity(
    p: &PoissonStructure,
    omega_top: &DiffForm,
    k: usize,
    bound: usize,
) -> Result<StarIdentityReport> {
    p.require_verified()?;
    let n = p.num_vars();
    if !omega_top.is_homogeneous(n) || omega_top.is_zero() {
        return Err(Error::HypothesisViolated(format!(
            "the reference form must be a nonzero top ({n}) form"
        )));
    }
    if !exterior_derivative(omega_top).is_zero() {
        return Err(Error::HypothesisViolated("d(w_top) != 0".into()));
    }
    for i in 0..n {
        let dxi = DiffForm::basis(n, &[i])?;
        if !dxi.wedge(omega_top)?.is_zero() {
            return Err(Error::HypothesisViolated(format!(
                "dx{} ∧ w_top != 0",
                i + 1
            )));
        }
        let u = hamiltonian_field_raw(p.bivector(), &Poly::var(n, i)?)?;
        if !exterior_derivative(&interior(&u, omega_top)?).is_zero() {
            return Err(Error::HypothesisViolated(format!(
                "d i_(U_x{}) w_top != 0",
                i + 1
            )));
        }
    }
    let domain = TruncationSpec::new(Flavor::Form, k, bound, n);
    // both routes land in (n-k+1)-forms with the same derived bound
    let coeff_growth =
        k as i64 * p.coeff_degree() as i64 + omega_top.max_coeff_degree().unwrap_or(0) as i64;
    let codomain = TruncationSpec {
        flavor: Flavor::Form,
        degree: n as i64 - k as i64 + 1,
        coeff_bound: bound as i64 + coeff_growth - 1,
        num_vars: n,
    };
    let index = BasisIndex::new(&codomain);
    let names = crate::ring::default_names(n);
    let mut counterexample = None;
    for (m, t) in domain.basis() {
        let Element::Form(b) = basis_element(&domain, &m, &t) else {
            unreachable!("form flavor")
        };
        let lhs = star_on_form(p, omega_top, &koszul_delta(p, &b)?)?;
        let mut rhs = exterior_derivative(&star_on_form(p, omega_top, &b)?);
        if k % 2 == 1 {
            rhs = rhs.neg();
        }
        // expanding both in the shared codomain enforces closure
        let lhs_vec = index.element_to_sparse(&Element::Form(lhs.clone()))?;
        let rhs_vec = index.element_to_sparse(&Element::Form(rhs.clone()))?;
        if lhs_vec != rhs_vec && counterexample.is_none() {
            counterexample = Some(b.display_with(&names));
        }
    }
    Ok(StarIdentityReport {
        holds: counterexample.is_none(),
        degree: k,
        domain,
        counterexample,
    })
}

/// The JSON report emitted for a materialized operator.
pub fn operator_report(matrix: &OperatorMatrix, names: &[String]) -> serde_json::Value {
    let qm = matrix.to_qmatrix();
    let rank = linalg::rank(&qm);
    let kernel = linalg::kernel_basis(&qm);
    let spec = &matrix.domain;
    let basis = spec.basis();
    let representatives: Vec<String> = kernel
        .iter()
        .map(|v| {
            let mut mv = MultiVector::zero(spec.num_vars);
            let mut form = DiffForm::zero(spec.num_vars);
            for ((m, t), c) in basis.iter().zip(v.iter()) {
                if c.is_zero() {
                    continue;
                }
                let coeff = Poly::from_terms(spec.num_vars, [(m.clone(), c.clone())]);
                match spec.flavor {
                    Flavor::Multivector => {
                        mv = mv
                            .add(&MultiVector::from_term(spec.num_vars, t, coeff).unwrap())
                            .unwrap()
                    }
                    _ => {
                        form = form
                            .add(&DiffForm::from_term(spec.num_vars, t, coeff).unwrap())
                            .unwrap()
                    }
                }
            }
            match spec.flavor {
                Flavor::Multivector => mv.display_with(names),
                _ => form.display_with(names),
            }
        })
        .collect();
    json!({
        "schema": 1,
        "operator": matrix.name,
        "domain": matrix.domain.to_json(),
        "codomain": matrix.codomain.to_json(),
        "rank": rank,
        "kernel_dim": kernel.len(),
        "representatives": representatives,
    })
}

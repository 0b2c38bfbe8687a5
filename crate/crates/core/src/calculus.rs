//! The graded differential operators: exterior derivative, Schouten bracket
//! with two independent oracles, Lichnerowicz coboundary, the canonical
//! boundary operator (two routes), form-level brackets, anchor map and star
//! operator.
//!
//! Sign conventions are anchored to the compositional-product supercommutator
//! `[a, b] = (-1)^((m+1)n) a∘b + (-1)^m b∘a`, which `schouten_oracle`
//! expands literally. The derived global sign is `s = +1`: `[p, f]` equals
//! the Hamiltonian field `X_f`, and `[e(1,2), f] = d1(f)*e(2) - d2(f)*e(1)`.
//! The bracket satisfies `[u, v] = (-1)^(|u||v|) [v, u]` with plain degrees.

use crate::error::{Error, Result};
use crate::exterior::{
    apply_derivation, eval_multiderivation, interior, pair, wedge_sign, DiffForm, MultiVector,
};
use crate::poisson::{hamiltonian_field_raw, PoissonStructure};
use crate::ring::Poly;

fn neg_if<T>(cond: bool, value: T, neg: impl Fn(&T) -> T) -> T {
    if cond {
        neg(&value)
    } else {
        value
    }
}

/// Coordinate exterior derivative: `d(c dx_I) = sum_i d_i(c) dx_i ∧ dx_I`.
pub fn exterior_derivative(omega: &DiffForm) -> DiffForm {
    let n = omega.num_vars();
    let mut out = DiffForm::zero(n);
    for (k, c) in omega.terms() {
        for i in 0..n {
            let dc = c.partial(i).expect("index in range");
            if dc.is_zero() {
                continue;
            }
            if let Some((merged, sign)) = wedge_sign(&[i], k) {
                out.add_term(merged, neg_if(sign < 0, dc, Poly::neg));
            }
        }
    }
    out
}

pub fn d_of_poly(a: &Poly) -> DiffForm {
    exterior_derivative(&DiffForm::from_poly(a.clone()))
}

/// One decomposable factor of a multivector term: `coeff * d_index`.
struct Factor {
    coeff: Option<Poly>,
    index: usize,
}

/// `[f d_i, g d_j] = f d_i(g) d_j - g d_j(f) d_i` with missing coefficients
/// treated as 1.
fn factor_bracket(n: usize, a: &Factor, b: &Factor) -> Result<MultiVector> {
    let mut out = MultiVector::zero(n);
    let one = Poly::one(n);
    let fa = a.coeff.as_ref().unwrap_or(&one);
    let fb = b.coeff.as_ref().unwrap_or(&one);
    let dg = fb.partial(a.index)?;
    if !dg.is_zero() {
        out.add_term(vec![b.index], fa.mul(&dg)?);
    }
    let df = fa.partial(b.index)?;
    if !df.is_zero() {
        out.add_term(vec![a.index], fb.mul(&df)?.neg());
    }
    Ok(out)
}

fn factor_to_multivector(n: usize, f: &Factor) -> MultiVector {
    MultiVector::from_term(
        n,
        &[f.index],
        f.coeff.clone().unwrap_or_else(|| Poly::one(n)),
    )
    .expect("index in range")
}

/// Bracket of a decomposable term with a function: `[c e_I, g]` is the
/// insertion of `g` into the first slot, expanded along the first column of
/// the defining determinant.
fn term_function_bracket(n: usize, c: &Poly, indices: &[usize], g: &Poly) -> Result<MultiVector> {
    let mut out = MultiVector::zero(n);
    for (r, &i) in indices.iter().enumerate() {
        let dg = g.partial(i)?;
        if dg.is_zero() {
            continue;
        }
        let rest: Vec<usize> = indices.iter().copied().filter(|&idx| idx != i).collect();
        let coeff = c.mul(&dg)?;
        out.add_term(rest, neg_if(r % 2 == 1, coeff, Poly::neg));
    }
    Ok(out)
}

/// Bracket of two decomposable terms via the explicit wedge-expansion
/// formula, with the coefficient absorbed into the first factor.
fn term_bracket(n: usize, ci: &Poly, ki: &[usize], cj: &Poly, kj: &[usize]) -> Result<MultiVector> {
    let m = ki.len();
    let k = kj.len();
    if m == 0 && k == 0 {
        return Ok(MultiVector::zero(n));
    }
    if k == 0 {
        return term_function_bracket(n, ci, ki, cj);
    }
    if m == 0 {
        // [f, u] = [u, f] under the compositional-product expansion
        return term_bracket(n, cj, kj, ci, ki);
    }
    let us: Vec<Factor> = ki
        .iter()
        .enumerate()
        .map(|(idx, &i)| Factor {
            coeff: if idx == 0 { Some(ci.clone()) } else { None },
            index: i,
        })
        .collect();
    let vs: Vec<Factor> = kj
        .iter()
        .enumerate()
        .map(|(idx, &j)| Factor {
            coeff: if idx == 0 { Some(cj.clone()) } else { None },
            index: j,
        })
        .collect();
    let mut out = MultiVector::zero(n);
    for (a, ua) in us.iter().enumerate() {
        for (b, vb) in vs.iter().enumerate() {
            let head = factor_bracket(n, ua, vb)?;
            if head.is_zero() {
                continue;
            }
            let mut factors = vec![head];
            for (idx, u) in us.iter().enumerate() {
                if idx != a {
                    factors.push(factor_to_multivector(n, u));
                }
            }
            for (idx, v) in vs.iter().enumerate() {
                if idx != b {
                    factors.push(factor_to_multivector(n, v));
                }
            }
            let wedge = MultiVector::wedge_all(&factors)?;
            // (-1)^(m + a + b - 1) with 1-based positions
            let sign_neg = (m + (a + 1) + (b + 1) - 1) % 2 == 1;
            out = out.add(&neg_if(sign_neg, wedge, MultiVector::neg))?;
        }
    }
    Ok(out)
}

/// Schouten bracket of two (possibly inhomogeneous) multivectors.
///
/// Decomposable terms go through the explicit wedge-expansion formula;
/// agreement with the compositional-product oracle is a standing test, not
/// an assumption.
pub fn schouten(u: &MultiVector, v: &MultiVector) -> Result<MultiVector> {
    if u.num_vars() != v.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: u.num_vars(),
            got: v.num_vars(),
        });
    }
    let n = u.num_vars();
    let mut out = MultiVector::zero(n);
    for (ki, ci) in u.terms() {
        for (kj, cj) in v.terms() {
            out = out.add(&term_bracket(n, ci, ki, cj, kj)?)?;
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + n - k {
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

fn shuffle_sign(selected: &[usize], rest: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for &s in selected {
        for &r in rest {
            if s > r {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The compositional product `(alpha ∘ beta)(args)`: shuffle-sum insertion of
/// `beta`'s value into the first slot of `alpha`.
fn compositional_product(alpha: &MultiVector, beta: &MultiVector, args: &[Poly]) -> Result<Poly> {
    let n = alpha.num_vars();
    let a = alpha.degree()?.unwrap_or(0);
    let b = beta.degree()?.unwrap_or(0);
    if a == 0 {
        // a degree-0 element has no slot to insert into
        return Ok(Poly::zero(n));
    }
    let expected = a + b - 1;
    if args.len() != expected {
        return Err(Error::ArgCount {
            expected,
            got: args.len(),
        });
    }
    let mut acc = Poly::zero(n);
    for sel in combinations(expected, b) {
        let rest: Vec<usize> = (0..expected).filter(|i| !sel.contains(i)).collect();
        let sign = shuffle_sign(&sel, &rest);
        let inner_args: Vec<Poly> = sel.iter().map(|&i| args[i].clone()).collect();
        let inner = eval_multiderivation(beta, &inner_args)?;
        let mut outer_args = Vec::with_capacity(a);
        outer_args.push(inner);
        outer_args.extend(rest.iter().map(|&i| args[i].clone()));
        let term = eval_multiderivation(alpha, &outer_args)?;
        acc = acc.add(&neg_if(sign < 0, term, Poly::neg))?;
    }
    Ok(acc)
}

/// Evaluates `[u, v](args)` by literally expanding the supercommutator of
/// compositional products. Structurally independent of `schouten`.
pub fn schouten_oracle(u: &MultiVector, v: &MultiVector, args: &[Poly]) -> Result<Poly> {
    let n = u.num_vars();
    if u.is_zero() || v.is_zero() {
        return Ok(Poly::zero(n));
    }
    let m = u.degree()?.expect("nonzero");
    let k = v.degree()?.expect("nonzero");
    let uv = compositional_product(u, v, args)?;
    let vu = compositional_product(v, u, args)?;
    let t1 = neg_if(((m + 1) * k) % 2 == 1, uv, Poly::neg);
    let t2 = neg_if(m % 2 == 1, vu, Poly::neg);
    t1.add(&t2)
}

/// The dual-route oracle: evaluates the bracket through `d`, the interior
/// product and the pairing. Must equal `pair(omega, schouten(u, v))`.
pub fn schouten_dual_oracle(u: &MultiVector, v: &MultiVector, omega: &DiffForm) -> Result<Poly> {
    let n = u.num_vars();
    if u.is_zero() || v.is_zero() || omega.is_zero() {
        return Ok(Poly::zero(n));
    }
    let m = u.degree()?.expect("nonzero");
    let k = v.degree()?.expect("nonzero");
    let dw = omega.degree()?.expect("nonzero");
    if m + k == 0 || dw != m + k - 1 {
        return Err(Error::DegreeMismatch(format!(
            "dual oracle needs a degree-{} form, got degree {dw}",
            m + k - 1
        )));
    }
    let t1 = {
        let val = pair(&exterior_derivative(&interior(v, omega)?), u)?;
        neg_if(((m + 1) * k) % 2 == 1, val, Poly::neg)
    };
    let t2 = {
        let val = pair(&exterior_derivative(&interior(u, omega)?), v)?;
        neg_if(m % 2 == 1, val, Poly::neg)
    };
    let t3 = pair(&exterior_derivative(omega), &u.wedge(v)?)?.neg();
    t1.add(&t2)?.add(&t3)
}

/// Lichnerowicz coboundary `[p, u]`, degree +1 on multivectors.
pub fn lichnerowicz(p: &PoissonStructure, u: &MultiVector) -> Result<MultiVector> {
    p.require_verified()?;
    schouten(p.bivector(), u)
}

pub(crate) fn koszul_delta_raw(bivector: &MultiVector, omega: &DiffForm) -> Result<DiffForm> {
    let d_omega = exterior_derivative(omega);
    let t1 = interior(bivector, &d_omega)?;
    let t2 = exterior_derivative(&interior(bivector, omega)?);
    t1.sub(&t2)
}

/// Canonical boundary operator `delta = i_p ∘ d - d ∘ i_p`, degree -1.
pub fn koszul_delta(p: &PoissonStructure, omega: &DiffForm) -> Result<DiffForm> {
    p.require_verified()?;
    koszul_delta_raw(p.bivector(), omega)
}

/// The explicit bracket-expansion route for `delta(a0 da1 ∧ ... ∧ dan)`.
/// Must agree with `koszul_delta` on the corresponding form.
pub fn koszul_delta_explicit(p: &PoissonStructure, a0: &Poly, rest: &[Poly]) -> Result<DiffForm> {
    p.require_verified()?;
    let n_vars = a0.num_vars();
    let n = rest.len();
    let mut out = DiffForm::zero(n_vars);
    if n == 0 {
        return Ok(out);
    }
    for i in 0..n {
        let br = crate::poisson::bracket(p, a0, &rest[i])?;
        if br.is_zero() {
            continue;
        }
        let others: Vec<DiffForm> = rest
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != i)
            .map(|(_, a)| d_of_poly(a))
            .collect();
        let mut wedge = DiffForm::from_poly(br);
        for w in &others {
            wedge = wedge.wedge(w)?;
        }
        // (-1)^(i+1) with 1-based i
        out = out.add(&neg_if(i % 2 == 1, wedge, DiffForm::neg))?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let br = crate::poisson::bracket(p, &rest[i], &rest[j])?;
            let lead = d_of_poly(&br).scale_poly(a0)?;
            if lead.is_zero() {
                continue;
            }
            let mut wedge = lead;
            for (l, a) in rest.iter().enumerate() {
                if l != i && l != j {
                    wedge = wedge.wedge(&d_of_poly(a))?;
                }
            }
            // (-1)^(i+j) with 1-based indices
            out = out.add(&neg_if((i + j) % 2 == 1, wedge, DiffForm::neg))?;
        }
    }
    Ok(out)
}

/// The bilinear pairing `p(alpha, beta) = i_p(a∧b) - i_p a ∧ b - a ∧ i_p b`,
/// degree `|a|+|b|-2`.
pub fn form_pairing_p(p: &PoissonStructure, alpha: &DiffForm, beta: &DiffForm) -> Result<DiffForm> {
    let bv = p.bivector();
    let t1 = interior(bv, &alpha.wedge(beta)?)?;
    let t2 = interior(bv, alpha)?.wedge(beta)?;
    let t3 = alpha.wedge(&interior(bv, beta)?)?;
    t1.sub(&t2)?.sub(&t3)
}

/// The form-level Schouten bracket
/// `[a, b] = d p(a,b) - p(da, b) - (-1)^|a| p(a, db)`.
pub fn form_schouten_bracket(
    p: &PoissonStructure,
    alpha: &DiffForm,
    beta: &DiffForm,
) -> Result<DiffForm> {
    let deg_a = alpha.degree()?.unwrap_or(0);
    let t1 = exterior_derivative(&form_pairing_p(p, alpha, beta)?);
    let t2 = form_pairing_p(p, &exterior_derivative(alpha), beta)?;
    let t3 = form_pairing_p(p, alpha, &exterior_derivative(beta))?;
    t1.sub(&t2)?.sub(&neg_if(deg_a % 2 == 1, t3, DiffForm::neg))
}

/// Deviation of an operator from the antiderivation law:
/// `op(a)∧b + (-1)^|a| a∧op(b) - op(a∧b)`. Vanishes identically when `op`
/// is an antiderivation (e.g. the exterior derivative).
pub fn deviation_bracket<F>(op: F, alpha: &DiffForm, beta: &DiffForm) -> Result<DiffForm>
where
    F: Fn(&DiffForm) -> Result<DiffForm>,
{
    let deg_a = alpha.degree()?.unwrap_or(0);
    let t1 = op(alpha)?.wedge(beta)?;
    let t2 = alpha.wedge(&op(beta)?)?;
    let t3 = op(&alpha.wedge(beta)?)?;
    t1.add(&neg_if(deg_a % 2 == 1, t2, DiffForm::neg))?.sub(&t3)
}

/// A first-order differential operator `f -> X(f) + a*f`, the evaluation
/// scaffolding for the supercommutator expansion of the differential.
#[derive(Debug, Clone)]
pub struct FirstOrderOp {
    pub field: MultiVector,
    pub scalar: Poly,
}

impl FirstOrderOp {
    pub fn multiplication(a: Poly) -> Self {
        FirstOrderOp {
            field: MultiVector::zero(a.num_vars()),
            scalar: a,
        }
    }

    pub fn from_field(x: MultiVector) -> Self {
        let n = x.num_vars();
        FirstOrderOp {
            field: x,
            scalar: Poly::zero(n),
        }
    }

    /// Componentwise commutator of vector-field parts, plus the cross action
    /// on the multiplier parts.
    pub fn commutator(&self, other: &FirstOrderOp) -> Result<FirstOrderOp> {
        let n = self.scalar.num_vars();
        let mut field = MultiVector::zero(n);
        for k in 0..n {
            let yk = other.field.coefficient(&[k]);
            let xk = self.field.coefficient(&[k]);
            let c =
                apply_derivation(&self.field, &yk)?.sub(&apply_derivation(&other.field, &xk)?)?;
            field.add_term(vec![k], c);
        }
        let scalar = apply_derivation(&self.field, &other.scalar)?
            .sub(&apply_derivation(&other.field, &self.scalar)?)?;
        Ok(FirstOrderOp { field, scalar })
    }
}

/// Both sides of the supercommutator expansion of the differential: the
/// first-order-operator expansion on `n+1` vector fields against
/// `-(d omega)(u_1 ∧ ... ∧ u_{n+1})`. The contract is that they are equal.
pub fn supercommutator_differential_check(
    omega: &DiffForm,
    fields: &[MultiVector],
) -> Result<(Poly, Poly)> {
    let n_vars = omega.num_vars();
    let deg = omega.degree()?.unwrap_or(0);
    if fields.len() != deg + 1 {
        return Err(Error::ArgCount {
            expected: deg + 1,
            got: fields.len(),
        });
    }
    for f in fields {
        if !f.is_homogeneous(1) {
            return Err(Error::WrongDegree(1));
        }
    }
    let mut lhs = Poly::zero(n_vars);
    for i in 0..fields.len() {
        let rest: Vec<&MultiVector> = fields
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != i)
            .map(|(_, f)| f)
            .collect();
        let mut wedge = MultiVector::from_poly(Poly::one(n_vars));
        for f in &rest {
            wedge = wedge.wedge(f)?;
        }
        let value = pair(omega, &wedge)?;
        let comm = FirstOrderOp::multiplication(value)
            .commutator(&FirstOrderOp::from_field(fields[i].clone()))?;
        debug_assert!(comm.field.is_zero());
        // (-1)^(i-1) with 1-based i
        lhs = lhs.add(&neg_if(i % 2 == 1, comm.scalar, Poly::neg))?;
    }
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            let br = FirstOrderOp::from_field(fields[i].clone())
                .commutator(&FirstOrderOp::from_field(fields[j].clone()))?
                .field;
            let mut wedge = br;
            for (l, f) in fields.iter().enumerate() {
                if l != i && l != j {
                    wedge = wedge.wedge(f)?;
                }
            }
            let term = pair(omega, &wedge)?;
            // (-1)^(i+j-1) with 1-based indices
            lhs = lhs.add(&neg_if((i + j) % 2 == 0, term, Poly::neg))?;
        }
    }
    let mut all = MultiVector::from_poly(Poly::one(n_vars));
    for f in fields {
        all = all.wedge(f)?;
    }
    let rhs = pair(&exterior_derivative(omega), &all)?.neg();
    Ok((lhs, rhs))
}

/// Anchor lift `a0 da1 ∧ ... ∧ dak -> a0 U_{a1} ∧ ... ∧ U_{ak}` where
/// `U_a` is the Hamiltonian field of `a`.
pub fn anchor_lift(p: &PoissonStructure, a0: &Poly, rest: &[Poly]) -> Result<MultiVector> {
    let mut out = MultiVector::from_poly(a0.clone());
    for a in rest {
        out = out.wedge(&hamiltonian_field_raw(p.bivector(), a)?)?;
    }
    Ok(out)
}

/// Contraction of a bivector with a one-form: the vector field
/// `X~(alpha)` with `beta(X~(alpha)) = (alpha ∧ beta)(X)`.
pub fn anchor_one_form(bivector: &MultiVector, alpha: &DiffForm) -> Result<MultiVector> {
    let n = bivector.num_vars();
    let mut out = MultiVector::zero(n);
    for (k, c) in bivector.terms() {
        debug_assert_eq!(k.len(), 2);
        let (i, j) = (k[0], k[1]);
        let ai = alpha.coefficient(&[i]);
        let aj = alpha.coefficient(&[j]);
        if !ai.is_zero() {
            out.add_term(vec![j], c.mul(&ai)?);
        }
        if !aj.is_zero() {
            out.add_term(vec![i], c.mul(&aj)?.neg());
        }
    }
    Ok(out)
}

/// Star operator relative to a fixed top form:
/// `*(a0 da1 ∧ ... ∧ dak) = a0 (i_{U_ak} ∘ ... ∘ i_{U_a1}) w_top`.
pub fn star(
    p: &PoissonStructure,
    omega_top: &DiffForm,
    a0: &Poly,
    rest: &[Poly],
) -> Result<DiffForm> {
    let n = omega_top.num_vars();
    if !omega_top.is_homogeneous(n) {
        return Err(Error::DegreeMismatch(format!(
            "star operator needs a top-degree ({n}) form"
        )));
    }
    let mut acc = omega_top.clone();
    for a in rest {
        let field = hamiltonian_field_raw(p.bivector(), a)?;
        acc = interior(&field, &acc)?;
    }
    acc.scale_poly(a0)
}

/// Linear extension of the star operator over coordinate basis terms:
/// `c dx_I -> star(c, x_{i1}, ..., x_{ik})`.
pub fn star_on_form(
    p: &PoissonStructure,
    omega_top: &DiffForm,
    omega: &DiffForm,
) -> Result<DiffForm> {
    let n = omega.num_vars();
    let mut out = DiffForm::zero(n);
    for (k, c) in omega.terms() {
        let coords: Vec<Poly> = k
            .iter()
            .map(|&i| Poly::var(n, i).expect("index in range"))
            .collect();
        out = out.add(&star(p, omega_top, c, &coords)?)?;
    }
    Ok(out)
}

/// Both sides of the dual-boundary identity
/// `w([p,u]) = (d i_p - i_p d)(w)(u) + (-1)^|u| (d i_u w)(p)`.
///
/// The overall sign follows from the dual-route bracket formula (itself
/// pinned to the compositional-product oracle) by substituting the bivector
/// for one argument; it is opposite to a printed variant that circulates
/// with the canonical-boundary convention `delta = i_p d - d i_p`.
pub fn dual_boundary_check(
    p: &PoissonStructure,
    omega: &DiffForm,
    u: &MultiVector,
) -> Result<(Poly, Poly)> {
    let deg_u = u.degree()?.unwrap_or(0);
    let lhs = pair(omega, &schouten(p.bivector(), u)?)?;
    let t1 = pair(&koszul_delta_raw(p.bivector(), omega)?, u)?.neg();
    let t2 = pair(&exterior_derivative(&interior(u, omega)?), p.bivector())?;
    let rhs = t1.add(&neg_if(deg_u % 2 == 1, t2, Poly::neg))?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parse::{parse_form, parse_multivector, parse_poly};
    use crate::poisson::{bracket, hamiltonian_field, jacobi_check};

    fn names(n: usize) -> Vec<String> {
        match n {
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            _ => crate::ring::default_names(n),
        }
    }

    fn mv(s: &str, n: usize) -> MultiVector {
        parse_multivector(s, &names(n)).unwrap()
    }

    fn form(s: &str, n: usize) -> DiffForm {
        parse_form(s, &names(n)).unwrap()
    }

    fn poly(s: &str, n: usize) -> Poly {
        parse_poly(s, &names(n)).unwrap()
    }

    #[test]
    fn exterior_derivative_examples() {
        assert_eq!(exterior_derivative(&form("x*dx(2)", 2)), form("dx(1,2)", 2));
        assert!(exterior_derivative(&form("dx(1,2)", 2)).is_zero());
        assert_eq!(d_of_poly(&poly("x*y", 2)), form("y*dx(1) + x*dx(2)", 2));
    }

    #[test]
    fn d_squared_is_zero_random() {
        let mut rng = crate::sampling::rng(31);
        for _ in 0..60 {
            let (w, _) = crate::sampling::homogeneous_form(&mut rng, 3, 2, 3);
            assert!(exterior_derivative(&exterior_derivative(&w)).is_zero());
        }
    }

    #[test]
    fn schouten_vector_fields() {
        // [x d2, y d1] = x d1 - y d2
        let u = mv("x*e(2)", 2);
        let v = mv("y*e(1)", 2);
        assert_eq!(schouten(&u, &v).unwrap(), mv("x*e(1) - y*e(2)", 2));
    }

    #[test]
    fn schouten_so3_self_bracket_vanishes() {
        let p = corpus::so3_bivector();
        assert!(schouten(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn schouten_with_function_global_sign() {
        // [e(1,2), f] = d1(f) e(2) - d2(f) e(1); the global sign is +1,
        // pinned by the compositional-product oracle below.
        let u = mv("e(1,2)", 2);
        let f = poly("x^2*y", 2);
        let expected = mv("2*x*y*e(2) - x^2*e(1)", 2);
        assert_eq!(
            schouten(&u, &MultiVector::from_poly(f.clone())).unwrap(),
            expected
        );
        // agreement with the oracle on a test argument
        let g = poly("x+y^2", 2);
        let structural = eval_multiderivation(
            &schouten(&u, &MultiVector::from_poly(f.clone())).unwrap(),
            std::slice::from_ref(&g),
        )
        .unwrap();
        let oracle = schouten_oracle(&u, &MultiVector::from_poly(f), &[g]).unwrap();
        assert_eq!(structural, oracle);
    }

    #[test]
    fn schouten_oracle_examples() {
        // commuting coordinate fields
        assert!(
            schouten_oracle(&mv("e(1)", 2), &mv("e(2)", 2), &[poly("x*y", 2)])
                .unwrap()
                .is_zero()
        );
        // so(3) Jacobi sums vanish
        let p = corpus::so3_bivector();
        let args = [poly("x", 3), poly("y", 3), poly("z", 3)];
        assert!(schouten_oracle(&p, &p, &args).unwrap().is_zero());
        // cross-check against the structural path
        let u = mv("e(1,2)", 2);
        let v = mv("x*e(1)", 2);
        let args2 = [poly("x", 2), poly("y", 2)];
        assert_eq!(
            schouten_oracle(&u, &v, &args2).unwrap(),
            eval_multiderivation(&schouten(&u, &v).unwrap(), &args2).unwrap()
        );
    }

    #[test]
    fn schouten_dual_oracle_examples() {
        let w = form("dx(1)", 2);
        assert!(schouten_dual_oracle(&mv("e(1)", 2), &mv("e(2)", 2), &w)
            .unwrap()
            .is_zero());
        let u = mv("x*e(2)", 2);
        let v = mv("y*e(1)", 2);
        assert_eq!(schouten_dual_oracle(&u, &v, &w).unwrap(), poly("x", 2));
        assert_eq!(pair(&w, &schouten(&u, &v).unwrap()).unwrap(), poly("x", 2));
        // involutivity of the so(3) structure seen through any 3-form
        let p = corpus::so3_bivector();
        let w3 = form("x*y*dx(1,2,3)", 3);
        assert!(schouten_dual_oracle(&p, &p, &w3).unwrap().is_zero());
    }

    #[test]
    fn lichnerowicz_examples() {
        let p = corpus::so3();
        let casimir = poly("x^2+y^2+z^2", 3);
        assert!(lichnerowicz(&p, &MultiVector::from_poly(casimir))
            .unwrap()
            .is_zero());
        assert!(lichnerowicz(&p, &p.bivector().clone()).unwrap().is_zero());
        // on the symplectic plane [p, x] is the Hamiltonian field X_x = e(2)
        let sp = corpus::symplectic_r2();
        assert_eq!(
            lichnerowicz(&sp, &MultiVector::from_poly(poly("x", 2))).unwrap(),
            mv("e(2)", 2)
        );
        assert_eq!(
            hamiltonian_field(&sp, &poly("x", 2)).unwrap(),
            mv("e(2)", 2)
        );
    }

    #[test]
    fn lichnerowicz_rejects_unverified() {
        let raw = mv("e(1,2) - y*e(2,3)", 3);
        let p = jacobi_check(&raw).unwrap();
        assert!(lichnerowicz(&p, &mv("e(1)", 3)).is_err());
    }

    #[test]
    fn koszul_delta_examples() {
        let sp = corpus::symplectic_r2();
        assert!(koszul_delta(&sp, &form("x^2 - y", 2)).unwrap().is_zero());
        assert_eq!(
            koszul_delta(&sp, &form("x*dx(2)", 2)).unwrap(),
            DiffForm::from_poly(poly("1", 2))
        );
        assert!(koszul_delta(&sp, &form("dx(1,2)", 2)).unwrap().is_zero());
    }

    #[test]
    fn koszul_delta_explicit_examples() {
        let sp = corpus::symplectic_r2();
        assert_eq!(
            koszul_delta_explicit(&sp, &poly("x", 2), &[poly("y", 2)]).unwrap(),
            DiffForm::from_poly(poly("1", 2))
        );
        assert!(koszul_delta_explicit(&sp, &poly("x", 2), &[])
            .unwrap()
            .is_zero());
        // dual-route agreement on so(3): delta(1 dx ∧ dy) = -dz
        let p = corpus::so3();
        let explicit =
            koszul_delta_explicit(&p, &poly("1", 3), &[poly("x", 3), poly("y", 3)]).unwrap();
        assert_eq!(explicit, form("-dx(3)", 3));
        assert_eq!(explicit, koszul_delta(&p, &form("dx(1,2)", 3)).unwrap());
    }

    #[test]
    fn form_pairing_examples() {
        let sp = corpus::symplectic_r2();
        // consistency with the bracket pairing i_p(da ∧ db)
        let res = form_pairing_p(&sp, &form("dx(1)", 2), &form("dx(2)", 2)).unwrap();
        assert_eq!(res, DiffForm::from_poly(poly("1", 2)));
        assert_eq!(
            res.scalar_part(),
            bracket(&sp, &poly("x", 2), &poly("y", 2)).unwrap()
        );
        // degree-0 first argument cancels
        let zero = form_pairing_p(&sp, &form("x^2", 2), &form("y*dx(1,2)", 2)).unwrap();
        assert!(zero.is_zero());
        // bilinearity over coefficients
        let r = form_pairing_p(&sp, &form("x*dx(1)", 2), &form("y*dx(2)", 2)).unwrap();
        assert_eq!(r, DiffForm::from_poly(poly("x*y", 2)));
    }

    #[test]
    fn form_bracket_matches_deviation_of_delta() {
        let sp = corpus::symplectic_r2();
        // constants
        assert!(
            form_schouten_bracket(&sp, &form("dx(1)", 2), &form("dx(2)", 2))
                .unwrap()
                .is_zero()
        );
        // 0-forms bracket to zero
        assert!(form_schouten_bracket(&sp, &form("x^2", 2), &form("y", 2))
            .unwrap()
            .is_zero());
        // the stated pair
        let alpha = form("x*dx(2)", 2);
        let beta = form("y*dx(1)", 2);
        let lhs = form_schouten_bracket(&sp, &alpha, &beta).unwrap();
        let rhs = deviation_bracket(|w| koszul_delta(&sp, w), &alpha, &beta).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn deviation_of_exterior_derivative_vanishes() {
        let mut rng = crate::sampling::rng(37);
        for _ in 0..40 {
            let (a, _) = crate::sampling::homogeneous_form(&mut rng, 3, 2, 2);
            let (b, _) = crate::sampling::homogeneous_form(&mut rng, 3, 2, 2);
            let dev = deviation_bracket(|w| Ok(exterior_derivative(w)), &a, &b).unwrap();
            assert!(dev.is_zero(), "d must be an antiderivation");
        }
    }

    #[test]
    fn deviation_on_closed_constants_vanishes() {
        let sp = corpus::symplectic_r2();
        let dev = deviation_bracket(
            |w| koszul_delta(&sp, w),
            &form("dx(1)", 2),
            &form("dx(2)", 2),
        )
        .unwrap();
        assert!(dev.is_zero());
    }

    #[test]
    fn supercommutator_check_examples() {
        let (lhs, rhs) =
            supercommutator_differential_check(&form("dx(1)", 2), &[mv("e(1)", 2), mv("e(2)", 2)])
                .unwrap();
        assert!(lhs.is_zero() && rhs.is_zero());
        let (lhs, rhs) = supercommutator_differential_check(
            &form("x*dx(2)", 2),
            &[mv("e(1)", 2), mv("e(2)", 2)],
        )
        .unwrap();
        assert_eq!(lhs, poly("-1", 2));
        assert_eq!(rhs, poly("-1", 2));
        let (lhs, rhs) = supercommutator_differential_check(
            &form("dx(1,2)", 3),
            &[mv("x*e(1)", 3), mv("e(2)", 3), mv("e(1)", 3)],
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn anchor_lift_examples() {
        let sp = corpus::symplectic_r2();
        assert_eq!(
            anchor_lift(&sp, &poly("1", 2), &[poly("x", 2)]).unwrap(),
            mv("e(2)", 2)
        );
        assert_eq!(
            anchor_lift(&sp, &poly("x*y", 2), &[]).unwrap(),
            MultiVector::from_poly(poly("x*y", 2))
        );
        assert_eq!(
            anchor_lift(&sp, &poly("1", 2), &[poly("x", 2), poly("y", 2)]).unwrap(),
            mv("e(1,2)", 2)
        );
    }

    #[test]
    fn anchor_chain_map_on_corpus() {
        let mut rng = crate::sampling::rng(41);
        let cfg = crate::sampling::SampleConfig {
            num_vars: 3,
            max_poly_degree: 2,
            ..Default::default()
        };
        for p in [corpus::so3(), corpus::symplectic_r2()] {
            let n = p.bivector().num_vars();
            let cfg = crate::sampling::SampleConfig {
                num_vars: n,
                ..cfg.clone()
            };
            for _ in 0..25 {
                let k = (rng_range(&mut rng, 0..=(n - 1) as u64)) as usize;
                let a0 = crate::sampling::poly(&mut rng, &cfg);
                let rest: Vec<Poly> = (0..k)
                    .map(|_| crate::sampling::poly(&mut rng, &cfg))
                    .collect();
                // anchor_lift(d(a0 da1...)) = lichnerowicz(anchor_lift(a0 da1...))
                let mut gens = vec![a0.clone()];
                gens.extend(rest.iter().cloned());
                let lhs = anchor_lift(&p, &Poly::one(n), &gens).unwrap();
                let rhs = lichnerowicz(&p, &anchor_lift(&p, &a0, &rest).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    fn rng_range(rng: &mut rand_chacha::ChaCha8Rng, r: std::ops::RangeInclusive<u64>) -> u64 {
        use rand::Rng;
        rng.gen_range(r)
    }

    #[test]
    fn star_examples() {
        let sp = corpus::symplectic_r2();
        let top = form("dx(1,2)", 2);
        assert_eq!(star(&sp, &top, &poly("1", 2), &[]).unwrap(), top);
        assert_eq!(
            star(&sp, &top, &poly("x", 2), &[poly("y", 2)]).unwrap(),
            form("-x*dx(2)", 2)
        );
        assert_eq!(
            star(&sp, &top, &poly("1", 2), &[poly("x", 2), poly("y", 2)]).unwrap(),
            DiffForm::from_poly(poly("1", 2))
        );
    }

    #[test]
    fn star_rejects_non_top_form() {
        let sp = corpus::symplectic_r2();
        assert!(star(&sp, &form("dx(1)", 2), &poly("1", 2), &[]).is_err());
    }

    #[test]
    fn dual_boundary_examples() {
        let sp = corpus::symplectic_r2();
        let (lhs, rhs) = dual_boundary_check(
            &sp,
            &form("dx(1)", 2),
            &MultiVector::from_poly(poly("x", 2)),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
        let so3 = corpus::so3();
        let (lhs, rhs) =
            dual_boundary_check(&so3, &form("x*y*dx(1,2,3)", 3), &so3.bivector().clone()).unwrap();
        assert!(lhs.is_zero());
        assert!(rhs.is_zero());
        let (lhs, rhs) = dual_boundary_check(&sp, &form("dx(1,2)", 2), &mv("e(1)", 2)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lichnerowicz_is_an_antidifferential() {
        // [p, u ∧ v] = [p,u] ∧ v + (-1)^|u| u ∧ [p,v]
        let mut rng = crate::sampling::rng(151);
        for p in [corpus::so3(), corpus::singular_radial_r2()] {
            let n = p.bivector().num_vars();
            for _ in 0..25 {
                let (u, du) = crate::sampling::homogeneous_multivector(&mut rng, n, n, 2);
                let (v, _) = crate::sampling::homogeneous_multivector(&mut rng, n, n, 2);
                let lhs = lichnerowicz(&p, &u.wedge(&v).unwrap()).unwrap();
                let t1 = lichnerowicz(&p, &u).unwrap().wedge(&v).unwrap();
                let t2 = u.wedge(&lichnerowicz(&p, &v).unwrap()).unwrap();
                let rhs = t1.add(&if du % 2 == 1 { t2.neg() } else { t2 }).unwrap();
                assert_eq!(lhs, rhs, "u={u}, v={v}");
            }
        }
    }

    #[test]
    fn graded_antisymmetry_random() {
        let mut rng = crate::sampling::rng(43);
        for _ in 0..60 {
            let (u, du) = crate::sampling::homogeneous_multivector(&mut rng, 3, 3, 2);
            let (v, dv) = crate::sampling::homogeneous_multivector(&mut rng, 3, 3, 2);
            let lhs = schouten(&u, &v).unwrap();
            let mut rhs = schouten(&v, &u).unwrap();
            if (du * dv) % 2 == 1 {
                rhs = rhs.neg();
            }
            assert_eq!(lhs, rhs, "u={u}, v={v}");
        }
    }

    #[test]
    fn graded_jacobi_random() {
        let mut rng = crate::sampling::rng(47);
        for _ in 0..25 {
            let (u, m) = crate::sampling::homogeneous_multivector(&mut rng, 3, 3, 1);
            let (v, n) = crate::sampling::homogeneous_multivector(&mut rng, 3, 3, 1);
            let (w, k) = crate::sampling::homogeneous_multivector(&mut rng, 3, 3, 1);
            let t1 = schouten(&schouten(&u, &v).unwrap(), &w).unwrap();
            let t2 = schouten(&schouten(&v, &w).unwrap(), &u).unwrap();
            let t3 = schouten(&schouten(&w, &u).unwrap(), &v).unwrap();
            let mut acc = MultiVector::zero(3);
            for (t, s) in [(t1, m * k), (t2, m * n), (t3, n * k)] {
                acc = acc.add(&if s % 2 == 1 { t.neg() } else { t }).unwrap();
            }
            assert!(acc.is_zero(), "u={u}, v={v}, w={w}");
        }
    }

    #[test]
    fn leibniz_formula_random() {
        let mut rng = crate::sampling::rng(53);
        for _ in 0..40 {
            let (a, m) = crate::sampling::homogeneous_multivector(&mut rng, 3, 2, 1);
            let (b, n) = crate::sampling::homogeneous_multivector(&mut rng, 3, 2, 1);
            let (c, _) = crate::sampling::homogeneous_multivector(&mut rng, 3, 2, 1);
            let lhs = schouten(&a, &b.wedge(&c).unwrap()).unwrap();
            let t1 = schouten(&a, &b).unwrap().wedge(&c).unwrap();
            let t2 = b.wedge(&schouten(&a, &c).unwrap()).unwrap();
            let rhs = t1
                .add(&if ((m + 1) * n) % 2 == 1 { t2.neg() } else { t2 })
                .unwrap();
            assert_eq!(lhs, rhs, "a={a}, b={b}, c={c}");
        }
    }

    #[test]
    fn oracle_agreement_random() {
        let mut rng = crate::sampling::rng(59);
        let cfg = crate::sampling::SampleConfig {
            num_vars: 3,
            max_poly_degree: 1,
            ..Default::default()
        };
        for _ in 0..40 {
            let (u, m) = crate::sampling::homogeneous_multivector(&mut rng, 3, 2, 1);
            let (v, n) = crate::sampling::homogeneous_multivector(&mut rng, 3, 2, 1);
            if m + n == 0 {
                continue;
            }
            let br = schouten(&u, &v).unwrap();
            let args: Vec<Poly> = (0..m + n - 1)
                .map(|_| crate::sampling::poly(&mut rng, &cfg))
                .collect();
            assert_eq!(
                schouten_oracle(&u, &v, &args).unwrap(),
                eval_multiderivation(&br, &args).unwrap()
            );
            let (w, _) = crate::sampling::homogeneous_form_of_degree(&mut rng, 3, m + n - 1, 1);
            assert_eq!(
                schouten_dual_oracle(&u, &v, &w).unwrap(),
                pair(&w, &br).unwrap()
            );
        }
    }

    #[test]
    fn coboundary_squares_vanish_random() {
        let mut rng = crate::sampling::rng(61);
        for p in [
            corpus::so3(),
            corpus::symplectic_r2(),
            corpus::singular_radial_r2(),
        ] {
            let n = p.bivector().num_vars();
            for _ in 0..25 {
                let (u, _) = crate::sampling::homogeneous_multivector(&mut rng, n, n, 2);
                let ddu = lichnerowicz(&p, &lichnerowicz(&p, &u).unwrap()).unwrap();
                assert!(ddu.is_zero(), "lichnerowicz^2 != 0 on {u}");
                let (w, _) = crate::sampling::homogeneous_form(&mut rng, n, n, 2);
                let ddw = koszul_delta(&p, &koszul_delta(&p, &w).unwrap()).unwrap();
                assert!(ddw.is_zero(), "delta^2 != 0 on {w}");
            }
        }
    }

    #[test]
    fn koszul_two_routes_random() {
        let mut rng = crate::sampling::rng(67);
        let cfg = crate::sampling::SampleConfig {
            num_vars: 3,
            max_poly_degree: 2,
            ..Default::default()
        };
        for p in [corpus::so3(), corpus::symplectic_r2()] {
            let n = p.bivector().num_vars();
            let cfg = crate::sampling::SampleConfig {
                num_vars: n,
                ..cfg.clone()
            };
            for _ in 0..30 {
                use rand::Rng;
                let k = rng.gen_range(0..=n);
                let a0 = crate::sampling::poly(&mut rng, &cfg);
                let rest: Vec<Poly> = (0..k)
                    .map(|_| crate::sampling::poly(&mut rng, &cfg))
                    .collect();
                let explicit = koszul_delta_explicit(&p, &a0, &rest).unwrap();
                let mut generator = DiffForm::from_poly(a0.clone());
                for a in &rest {
                    generator = generator.wedge(&d_of_poly(a)).unwrap();
                }
                let structural = koszul_delta(&p, &generator).unwrap();
                assert_eq!(explicit, structural);
            }
        }
    }

    #[test]
    fn form_bracket_equals_deviation_random() {
        let mut rng = crate::sampling::rng(71);
        for p in [corpus::so3(), corpus::symplectic_r2()] {
            let n = p.bivector().num_vars();
            for _ in 0..30 {
                let (a, _) = crate::sampling::homogeneous_form(&mut rng, n, n, 2);
                let (b, _) = crate::sampling::homogeneous_form(&mut rng, n, n, 2);
                let lhs = form_schouten_bracket(&p, &a, &b).unwrap();
                let rhs = deviation_bracket(|w| koszul_delta(&p, w), &a, &b).unwrap();
                assert_eq!(lhs, rhs, "alpha={a}, beta={b}");
            }
        }
    }

    #[test]
    fn supercommutator_expansion_random() {
        let mut rng = crate::sampling::rng(73);
        for _ in 0..30 {
            use rand::Rng;
            let deg = rng.gen_range(0..=2usize);
            let (w, _) = crate::sampling::homogeneous_form_of_degree(&mut rng, 3, deg, 2);
            let fields: Vec<MultiVector> = (0..deg + 1)
                .map(|_| crate::sampling::vector_field(&mut rng, 3, 2))
                .collect();
            let (lhs, rhs) = supercommutator_differential_check(&w, &fields).unwrap();
            assert_eq!(lhs, rhs, "omega={w}");
        }
    }

    #[test]
    fn dual_boundary_random() {
        let mut rng = crate::sampling::rng(79);
        for p in [corpus::so3(), corpus::symplectic_r2()] {
            let n = p.bivector().num_vars();
            for _ in 0..30 {
                use rand::Rng;
                let k = rng.gen_range(1..=n);
                let (w, _) = crate::sampling::homogeneous_form_of_degree(&mut rng, n, k, 2);
                let (u, _) =
                    crate::sampling::homogeneous_multivector_of_degree(&mut rng, n, k - 1, 2);
                let (lhs, rhs) = dual_boundary_check(&p, &w, &u).unwrap();
                assert_eq!(lhs, rhs, "omega={w}, u={u}");
            }
        }
    }

    #[test]
    fn star_conjugation_pointwise_random() {
        // star ∘ delta = (-1)^k d ∘ star on generators, symplectic plane and
        // R^4 with the squared symplectic form as top form
        let mut rng = crate::sampling::rng(83);
        for (p, top) in [
            (corpus::symplectic_r2(), form("dx(1,2)", 2)),
            (corpus::symplectic_r4(), {
                let alpha =
                    parse_form("dx(1,2) + dx(3,4)", &crate::ring::default_names(4)).unwrap();
                alpha.wedge(&alpha).unwrap()
            }),
        ] {
            let n = p.bivector().num_vars();
            // hypotheses: d top = 0 and d i_{U_a} top = 0 for coordinates
            assert!(exterior_derivative(&top).is_zero());
            for i in 0..n {
                let xi = Poly::var(n, i).unwrap();
                let u = hamiltonian_field_raw(p.bivector(), &xi).unwrap();
                assert!(exterior_derivative(&interior(&u, &top).unwrap()).is_zero());
            }
            let cfg = crate::sampling::SampleConfig {
                num_vars: n,
                max_poly_degree: 2,
                ..Default::default()
            };
            for _ in 0..20 {
                use rand::Rng;
                let k = rng.gen_range(0..=n);
                let a0 = crate::sampling::poly(&mut rng, &cfg);
                let rest: Vec<Poly> = (0..k)
                    .map(|_| crate::sampling::poly(&mut rng, &cfg))
                    .collect();
                let mut generator = DiffForm::from_poly(a0.clone());
                for a in &rest {
                    generator = generator.wedge(&d_of_poly(a)).unwrap();
                }
                let lhs = star_on_form(&p, &top, &koszul_delta(&p, &generator).unwrap()).unwrap();
                let mut rhs = exterior_derivative(&star_on_form(&p, &top, &generator).unwrap());
                if k % 2 == 1 {
                    rhs = rhs.neg();
                }
                assert_eq!(lhs, rhs, "a0={a0}");
            }
        }
    }
}

//! Poisson-structure-level analysis: Jacobi verification with a finite
//! witness, the induced bracket, Hamiltonian fields, pointwise rank, the
//! singular-locus polynomials and the pointwise involutivity criterion for
//! the differential system spanned by the Hamiltonian directions.

use serde::Deserialize;

use crate::calculus::{anchor_one_form, schouten, schouten_oracle};
use crate::error::{Error, Result};
use crate::exterior::{eval_multiderivation, pair, DiffForm, MultiVector};
use crate::linalg::{reduce_against_rows, row_basis};
use crate::ring::{Point, Poly, Rational};

/// Outcome of Jacobi verification.
///
/// A failure carries a finite witness: the coordinate triple on which the
/// self-bracket, expanded through the compositional-product oracle, does not
/// vanish, together with that nonzero value.
#[derive(Debug, Clone, PartialEq)]
pub enum JacobiStatus {
    Verified,
    Failed {
        witness: (usize, usize, usize),
        value: Poly,
    },
    Unchecked,
}

/// A degree-2 multivector together with its Jacobi status.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonStructure {
    bivector: MultiVector,
    status: JacobiStatus,
}

impl PoissonStructure {
    /// Wrap a bivector without verification; gated operations will reject it.
    pub fn unchecked(bivector: MultiVector) -> Result<Self> {
        require_bivector(&bivector)?;
        Ok(PoissonStructure {
            bivector,
            status: JacobiStatus::Unchecked,
        })
    }

    pub fn bivector(&self) -> &MultiVector {
        &self.bivector
    }

    pub fn status(&self) -> &JacobiStatus {
        &self.status
    }

    pub fn num_vars(&self) -> usize {
        self.bivector.num_vars()
    }

    pub fn is_verified(&self) -> bool {
        matches!(self.status, JacobiStatus::Verified)
    }

    pub fn require_verified(&self) -> Result<()> {
        match &self.status {
            JacobiStatus::Verified => Ok(()),
            JacobiStatus::Failed { witness, value } => Err(Error::NotVerified(format!(
                "Jacobi fails on the coordinate triple ({},{},{}) with value {}",
                witness.0 + 1,
                witness.1 + 1,
                witness.2 + 1,
                value
            ))),
            JacobiStatus::Unchecked => {
                Err(Error::NotVerified("structure was never checked".into()))
            }
        }
    }

    /// Maximum total degree of the coefficient polynomials (0 for the zero
    /// structure). Drives the degree bookkeeping of truncated operators.
    pub fn coeff_degree(&self) -> u32 {
        self.bivector.max_coeff_degree().unwrap_or(0)
    }
}

fn require_bivector(p: &MultiVector) -> Result<()> {
    if !p.is_homogeneous(2) {
        return Err(Error::WrongDegree(2));
    }
    Ok(())
}

/// Verify the Jacobi identity two independent ways: structurally through the
/// Schouten self-bracket and by the compositional-product oracle on all
/// coordinate triples. The verdicts must agree; a failure stores the first
/// offending triple.
pub fn jacobi_check(p_raw: &MultiVector) -> Result<PoissonStructure> {
    require_bivector(p_raw)?;
    let n = p_raw.num_vars();
    let structural_zero = schouten(p_raw, p_raw)?.is_zero();
    let mut witness = None;
    'outer: for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let args = [Poly::var(n, i)?, Poly::var(n, j)?, Poly::var(n, k)?];
                let value = schouten_oracle(p_raw, p_raw, &args)?;
                if !value.is_zero() {
                    witness = Some(((i, j, k), value));
                    break 'outer;
                }
            }
        }
    }
    // The coordinate components determine [p,p]; the two routes cannot
    // disagree unless the bracket itself is wrong.
    assert_eq!(
        structural_zero,
        witness.is_none(),
        "structural and oracle Jacobi verdicts disagree"
    );
    let status = match witness {
        None => JacobiStatus::Verified,
        Some((witness, value)) => JacobiStatus::Failed { witness, value },
    };
    Ok(PoissonStructure {
        bivector: p_raw.clone(),
        status,
    })
}

/// The Poisson bracket `{f, g} = p(f, g)`.
pub fn bracket(p: &PoissonStructure, f: &Poly, g: &Poly) -> Result<Poly> {
    p.require_verified()?;
    eval_multiderivation(&p.bivector, &[f.clone(), g.clone()])
}

/// Hamiltonian field of `f` for a raw bivector, bypassing the Jacobi gate.
/// Used internally where the anchor is defined for any bivector.
pub(crate) fn hamiltonian_field_raw(bivector: &MultiVector, f: &Poly) -> Result<MultiVector> {
    let n = bivector.num_vars();
    let mut out = MultiVector::zero(n);
    for (k, c) in bivector.terms() {
        debug_assert_eq!(k.len(), 2);
        let (i, j) = (k[0], k[1]);
        let di = f.partial(i)?;
        if !di.is_zero() {
            out.add_term(vec![j], c.mul(&di)?);
        }
        let dj = f.partial(j)?;
        if !dj.is_zero() {
            out.add_term(vec![i], c.mul(&dj)?.neg());
        }
    }
    Ok(out)
}

/// The derivation `X_f = {f, .}`.
pub fn hamiltonian_field(p: &PoissonStructure, f: &Poly) -> Result<MultiVector> {
    p.require_verified()?;
    hamiltonian_field_raw(&p.bivector, f)
}

fn wedge_power(p: &MultiVector, k: usize) -> MultiVector {
    let mut acc = MultiVector::from_poly(Poly::one(p.num_vars()));
    for _ in 0..k {
        acc = acc.wedge(p).expect("same ring");
    }
    acc
}

/// The largest `2k` with `(∧^k p)(x) != 0`; zero when `p` vanishes at `x`.
pub fn rank_at(p: &PoissonStructure, x: &Point) -> Result<usize> {
    let n = p.num_vars();
    if x.num_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.num_vars(),
        });
    }
    let mut rank = 0usize;
    let mut power = MultiVector::from_poly(Poly::one(n));
    for k in 1..=n / 2 {
        power = power.wedge(&p.bivector).expect("same ring");
        if power.is_zero() {
            break;
        }
        let mut nonzero = false;
        for (_, c) in power.terms() {
            if !c.eval(x)?.eq(&Rational::from_integer(0.into())) {
                nonzero = true;
                break;
            }
        }
        if nonzero {
            rank = 2 * k;
        } else {
            break;
        }
    }
    Ok(rank)
}

/// For each `k >= 1`, the coefficient polynomials of `∧^k p` (in basis
/// order); the rank at `x` drops below `2k` exactly when all of them vanish
/// at `x`. Stops at the first identically-zero power.
pub fn singular_locus_polys(p: &PoissonStructure) -> Vec<(usize, Vec<Poly>)> {
    let n = p.num_vars();
    let mut out = Vec::new();
    for k in 1..=n / 2 {
        let power = wedge_power(&p.bivector, k);
        if power.is_zero() {
            break;
        }
        out.push((k, power.terms().map(|(_, c)| c.clone()).collect()));
    }
    out
}

/// Diagnostics of the pointwise involutivity test.
#[derive(Debug, Clone)]
pub struct InvolutivityReport {
    pub involutive: bool,
    /// Rank of the span of the coordinate Hamiltonian directions at `x`.
    pub rank_pi: usize,
    /// Component of `[p,p]|_x` outside the third wedge power of that span,
    /// indexed by increasing coordinate triples. Empty iff involutive.
    pub residual: Vec<((usize, usize, usize), Rational)>,
}

/// Pointwise involutivity criterion: `[p,p]|_x` must lie inside
/// `Λ³ π(x)` where `π(x)` is spanned by the coordinate Hamiltonian
/// directions. Exact rational linear algebra, no thresholds.
pub fn involutivity_criterion(p_raw: &MultiVector, x: &Point) -> Result<InvolutivityReport> {
    require_bivector(p_raw)?;
    let n = p_raw.num_vars();
    if x.num_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.num_vars(),
        });
    }
    // rows of B(x): the coordinate Hamiltonian directions X_{x_i}|_x
    let mut b = vec![vec![Rational::from_integer(0.into()); n]; n];
    for (k, c) in p_raw.terms() {
        let (i, j) = (k[0], k[1]);
        let v = c.eval(x)?;
        b[i][j] += &v;
        b[j][i] -= &v;
    }
    let basis = row_basis(&b);
    let rank_pi = basis.len();

    // triples (i<j<k) index the coordinates of degree-3 multivectors at x
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push((i, j, k));
            }
        }
    }
    let coord_of = |t: &(usize, usize, usize)| -> usize {
        triples.iter().position(|u| u == t).expect("triple indexed")
    };

    // span of Λ³ of the basis, coordinates over the triples
    let mut span: Vec<Vec<Rational>> = Vec::new();
    for a in 0..rank_pi {
        for b2 in a + 1..rank_pi {
            for c in b2 + 1..rank_pi {
                let mut vec = vec![Rational::from_integer(0.into()); triples.len()];
                for (t_idx, (i, j, k)) in triples.iter().enumerate() {
                    let rows = [&basis[a], &basis[b2], &basis[c]];
                    let det = det3(
                        [&rows[0][*i], &rows[0][*j], &rows[0][*k]],
                        [&rows[1][*i], &rows[1][*j], &rows[1][*k]],
                        [&rows[2][*i], &rows[2][*j], &rows[2][*k]],
                    );
                    vec[t_idx] = det;
                }
                span.push(vec);
            }
        }
    }

    // target: [p,p] evaluated at x
    let self_bracket = schouten(p_raw, p_raw)?;
    let mut target = vec![Rational::from_integer(0.into()); triples.len()];
    for (k, c) in self_bracket.terms() {
        debug_assert_eq!(k.len(), 3);
        target[coord_of(&(k[0], k[1], k[2]))] = c.eval(x)?;
    }

    let residual_vec = reduce_against_rows(&span, &target);
    let residual: Vec<((usize, usize, usize), Rational)> = triples
        .iter()
        .cloned()
        .zip(residual_vec.iter().cloned())
        .filter(|(_, v)| !v.eq(&Rational::from_integer(0.into())))
        .collect();
    Ok(InvolutivityReport {
        involutive: residual.is_empty(),
        rank_pi,
        residual,
    })
}

fn det3(r0: [&Rational; 3], r1: [&Rational; 3], r2: [&Rational; 3]) -> Rational {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

/// Both sides of the four-term contraction identity for a 2-form, two
/// 1-forms and two bivectors. The contract is that they are equal.
pub fn contraction_identity_check(
    omega: &DiffForm,
    alpha: &DiffForm,
    beta: &DiffForm,
    x: &MultiVector,
    y: &MultiVector,
) -> Result<(Poly, Poly)> {
    for (deg, form) in [(2usize, omega), (1, alpha), (1, beta)] {
        if !form.is_homogeneous(deg) {
            return Err(Error::WrongDegree(deg));
        }
    }
    for mv in [x, y] {
        if !mv.is_homogeneous(2) {
            return Err(Error::WrongDegree(2));
        }
    }
    let lhs = pair(&omega.wedge(alpha)?.wedge(beta)?, &x.wedge(y)?)?;
    let ab = alpha.wedge(beta)?;
    let t1 = pair(omega, x)?.mul(&pair(&ab, y)?)?;
    let t2 = pair(omega, y)?.mul(&pair(&ab, x)?)?;
    let xa = anchor_one_form(x, alpha)?;
    let xb = anchor_one_form(x, beta)?;
    let ya = anchor_one_form(y, alpha)?;
    let yb = anchor_one_form(y, beta)?;
    let t3 = pair(omega, &xa.wedge(&yb)?)?;
    let t4 = pair(omega, &xb.wedge(&ya)?)?;
    let rhs = t1.add(&t2)?.sub(&t3)?.add(&t4)?;
    Ok((lhs, rhs))
}

#[derive(Debug, Deserialize)]
struct StructureFile {
    vars: Vec<String>,
    poisson: Vec<(String, [usize; 2])>,
}

/// Parse the structure-definition document
/// `{"vars": [names], "poisson": [[coeff, [i, j]], ...]}` with 1-based
/// `i < j`. Returns the variable names and the raw bivector.
pub fn parse_structure(text: &str) -> Result<(Vec<String>, MultiVector)> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| Error::ParseFile {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.vars.is_empty() {
        return Err(Error::Invalid("structure declares no variables".into()));
    }
    for (i, name) in file.vars.iter().enumerate() {
        if name.is_empty()
            || !name.chars().next().unwrap().is_alphabetic()
            || !name.chars().all(|c| c.is_alphanumeric() || c == '_')
        {
            return Err(Error::Invalid(format!("invalid variable name '{name}'")));
        }
        if file.vars[..i].contains(name) {
            return Err(Error::Invalid(format!("duplicate variable name '{name}'")));
        }
    }
    let n = file.vars.len();
    let mut bivector = MultiVector::zero(n);
    for (coeff_text, [i, j]) in &file.poisson {
        if *i == 0 || *j == 0 || *i > n || *j > n {
            return Err(Error::Invalid(format!(
                "index pair [{i}, {j}] out of range 1..={n}"
            )));
        }
        if i >= j {
            return Err(Error::Invalid(format!(
                "index pair [{i}, {j}] must satisfy i < j"
            )));
        }
        let coeff = crate::parse::parse_poly(coeff_text, &file.vars)?;
        bivector = bivector.add(&MultiVector::from_term(n, &[i - 1, j - 1], coeff)?)?;
    }
    Ok((file.vars, bivector))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parse::{parse_multivector, parse_poly};
    use crate::ring::{rat_int, Point};

    fn names3() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn p3(s: &str) -> Poly {
        parse_poly(s, &names3()).unwrap()
    }

    #[test]
    fn jacobi_so3_verified() {
        let p = jacobi_check(&corpus::so3_bivector()).unwrap();
        assert!(p.is_verified());
    }

    #[test]
    fn jacobi_constant_verified() {
        let raw = parse_multivector("e(1,2)", &["x".into(), "y".into()]).unwrap();
        assert!(jacobi_check(&raw).unwrap().is_verified());
    }

    #[test]
    fn jacobi_failure_witness() {
        let raw = parse_multivector("e(1,2) - y*e(2,3)", &names3()).unwrap();
        let p = jacobi_check(&raw).unwrap();
        match p.status() {
            JacobiStatus::Failed { witness, value } => {
                assert_eq!(*witness, (0, 1, 2));
                // the oracle value is twice the cyclic Jacobi sum, which is 1
                assert_eq!(value, &p3("2"));
            }
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(bracket(&p, &p3("x"), &p3("y")).is_err());
    }

    #[test]
    fn jacobi_zero_structure() {
        let p = jacobi_check(&MultiVector::zero(3)).unwrap();
        assert!(p.is_verified());
    }

    #[test]
    fn jacobi_rejects_wrong_degree() {
        let raw = parse_multivector("e(1)", &names3()).unwrap();
        assert!(matches!(jacobi_check(&raw), Err(Error::WrongDegree(2))));
    }

    #[test]
    fn bracket_so3_table() {
        let p = corpus::so3();
        assert_eq!(bracket(&p, &p3("x"), &p3("y")).unwrap(), p3("z"));
        assert_eq!(bracket(&p, &p3("y"), &p3("z")).unwrap(), p3("x"));
        assert_eq!(bracket(&p, &p3("z"), &p3("x")).unwrap(), p3("y"));
        let f = p3("x*y + z^2");
        assert!(bracket(&p, &f, &f).unwrap().is_zero());
    }

    #[test]
    fn bracket_symplectic_leibniz() {
        let p = corpus::symplectic_r2();
        let names = vec!["x".to_string(), "y".to_string()];
        let x2 = parse_poly("x^2", &names).unwrap();
        let y = parse_poly("y", &names).unwrap();
        assert_eq!(
            bracket(&p, &x2, &y).unwrap(),
            parse_poly("2*x", &names).unwrap()
        );
    }

    #[test]
    fn hamiltonian_field_examples() {
        let p = corpus::so3();
        assert_eq!(
            hamiltonian_field(&p, &p3("z")).unwrap(),
            parse_multivector("y*e(1) - x*e(2)", &names3()).unwrap()
        );
        assert!(hamiltonian_field(&p, &p3("5/3")).unwrap().is_zero());
    }

    #[test]
    fn hamiltonian_field_product_rule() {
        let p = corpus::so3();
        let mut rng = crate::sampling::rng(89);
        let cfg = crate::sampling::SampleConfig {
            num_vars: 3,
            max_poly_degree: 2,
            ..Default::default()
        };
        for _ in 0..30 {
            let f = crate::sampling::poly(&mut rng, &cfg);
            let g = crate::sampling::poly(&mut rng, &cfg);
            let lhs = hamiltonian_field(&p, &f.mul(&g).unwrap()).unwrap();
            let rhs = hamiltonian_field(&p, &g)
                .unwrap()
                .scale_poly(&f)
                .unwrap()
                .add(&hamiltonian_field(&p, &f).unwrap().scale_poly(&g).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn lie_homomorphism_random() {
        // [X_f, X_g] = X_{{f,g}}
        let mut rng = crate::sampling::rng(97);
        for p in [corpus::so3(), corpus::symplectic_r2()] {
            let cfg = crate::sampling::SampleConfig {
                num_vars: p.num_vars(),
                max_poly_degree: 2,
                ..Default::default()
            };
            for _ in 0..25 {
                let f = crate::sampling::poly(&mut rng, &cfg);
                let g = crate::sampling::poly(&mut rng, &cfg);
                let lhs = crate::calculus::schouten(
                    &hamiltonian_field(&p, &f).unwrap(),
                    &hamiltonian_field(&p, &g).unwrap(),
                )
                .unwrap();
                let rhs = hamiltonian_field(&p, &bracket(&p, &f, &g).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn bracket_jacobi_random() {
        let mut rng = crate::sampling::rng(101);
        for p in [corpus::so3(), corpus::singular_radial_r2()] {
            let cfg = crate::sampling::SampleConfig {
                num_vars: p.num_vars(),
                max_poly_degree: 2,
                ..Default::default()
            };
            for _ in 0..20 {
                let f = crate::sampling::poly(&mut rng, &cfg);
                let g = crate::sampling::poly(&mut rng, &cfg);
                let h = crate::sampling::poly(&mut rng, &cfg);
                let sum = bracket(&p, &bracket(&p, &f, &g).unwrap(), &h)
                    .unwrap()
                    .add(&bracket(&p, &bracket(&p, &g, &h).unwrap(), &f).unwrap())
                    .unwrap()
                    .add(&bracket(&p, &bracket(&p, &h, &f).unwrap(), &g).unwrap())
                    .unwrap();
                assert!(sum.is_zero());
            }
        }
    }

    #[test]
    fn rank_examples() {
        let p = corpus::so3();
        assert_eq!(rank_at(&p, &Point::from_ints(&[0, 0, 0])).unwrap(), 0);
        assert_eq!(rank_at(&p, &Point::from_ints(&[1, 0, 0])).unwrap(), 2);
        let q = corpus::symplectic_r4();
        assert_eq!(rank_at(&q, &Point::from_ints(&[3, -1, 2, 7])).unwrap(), 4);
    }

    #[test]
    fn rank_bounds_random() {
        let mut rng = crate::sampling::rng(103);
        for p in [
            corpus::so3(),
            corpus::symplectic_r4(),
            corpus::singular_radial_r2(),
        ] {
            let n = p.num_vars();
            for _ in 0..15 {
                let x = crate::sampling::point(&mut rng, n);
                let r = rank_at(&p, &x).unwrap();
                assert_eq!(r % 2, 0);
                assert!(r <= 2 * (n / 2));
                // the rank equals the dimension of the span of the
                // coordinate Hamiltonian directions
                let report = involutivity_criterion(p.bivector(), &x).unwrap();
                assert_eq!(report.rank_pi, r);
            }
        }
    }

    #[test]
    fn singular_locus_examples() {
        let scaled = corpus::singular_radial_r2();
        let locus = singular_locus_polys(&scaled);
        assert_eq!(locus.len(), 1);
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(locus[0].1, vec![parse_poly("x^2+y^2", &names).unwrap()]);

        let so3 = corpus::so3();
        let locus = singular_locus_polys(&so3);
        assert_eq!(locus.len(), 1);
        assert_eq!(locus[0].1, vec![p3("z"), p3("-y"), p3("x")]);

        let flat = corpus::symplectic_r2();
        let locus = singular_locus_polys(&flat);
        assert_eq!(locus[0].1, vec![Poly::one(2)]);
    }

    #[test]
    fn involutivity_examples() {
        // verified structures are involutive everywhere
        let mut rng = crate::sampling::rng(107);
        for p in [
            corpus::so3(),
            corpus::symplectic_r2(),
            corpus::singular_radial_r2(),
        ] {
            for _ in 0..10 {
                let x = crate::sampling::point(&mut rng, p.num_vars());
                let report = involutivity_criterion(p.bivector(), &x).unwrap();
                assert!(report.involutive);
            }
        }
        // the contact-like plane field is nowhere involutive
        let raw = parse_multivector("e(1,2) - y*e(2,3)", &names3()).unwrap();
        let report = involutivity_criterion(&raw, &Point::from_ints(&[0, 0, 0])).unwrap();
        assert!(!report.involutive);
        assert_eq!(report.rank_pi, 2);
        assert!(!report.residual.is_empty());
        // a single decomposable term self-brackets to zero
        let raw = parse_multivector("z*e(1,2)", &names3()).unwrap();
        let report = involutivity_criterion(&raw, &Point::from_ints(&[0, 0, 1])).unwrap();
        assert!(report.involutive);
    }

    #[test]
    fn contraction_identity_examples() {
        let names4 = crate::ring::default_names(4);
        let form = |s: &str| crate::parse::parse_form(s, &names4).unwrap();
        let mv = |s: &str| parse_multivector(s, &names4).unwrap();
        let (lhs, rhs) = contraction_identity_check(
            &form("dx(1,2)"),
            &form("dx(3)"),
            &form("dx(4)"),
            &mv("e(1,2)"),
            &mv("e(3,4)"),
        )
        .unwrap();
        assert_eq!(lhs, Poly::one(4));
        assert_eq!(lhs, rhs);
        // degenerate alpha = beta
        let (lhs, rhs) = contraction_identity_check(
            &form("x1*dx(1,3)"),
            &form("dx(2)"),
            &form("dx(2)"),
            &mv("e(1,2)"),
            &mv("e(2,4)"),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_identity_random() {
        let mut rng = crate::sampling::rng(109);
        for _ in 0..40 {
            let (w, _) = crate::sampling::homogeneous_form_of_degree(&mut rng, 4, 2, 2);
            let (a, _) = crate::sampling::homogeneous_form_of_degree(&mut rng, 4, 1, 2);
            let (b, _) = crate::sampling::homogeneous_form_of_degree(&mut rng, 4, 1, 2);
            let (x, _) = crate::sampling::homogeneous_multivector_of_degree(&mut rng, 4, 2, 2);
            let (y, _) = crate::sampling::homogeneous_multivector_of_degree(&mut rng, 4, 2, 2);
            let (lhs, rhs) = contraction_identity_check(&w, &a, &b, &x, &y).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn structure_file_round_trip() {
        let text = r#"{
            "vars": ["x", "y", "z"],
            "poisson": [["z", [1, 2]], ["-y", [1, 3]], ["x", [2, 3]]]
        }"#;
        let (vars, bivector) = parse_structure(text).unwrap();
        assert_eq!(vars, names3());
        assert_eq!(bivector, corpus::so3_bivector());
    }

    #[test]
    fn structure_file_errors() {
        assert!(matches!(parse_structure("{"), Err(Error::ParseFile { .. })));
        let bad_index = r#"{"vars": ["x", "y"], "poisson": [["1", [2, 1]]]}"#;
        assert!(parse_structure(bad_index).is_err());
        let bad_var = r#"{"vars": ["x", "y"], "poisson": [["w", [1, 2]]]}"#;
        assert!(parse_structure(bad_var).is_err());
    }

    #[test]
    fn rank_at_origin_of_singular_structure() {
        let p = corpus::singular_radial_r2();
        assert_eq!(rank_at(&p, &Point::from_ints(&[0, 0])).unwrap(), 0);
        assert_eq!(rank_at(&p, &Point::from_ints(&[1, 0])).unwrap(), 2);
        let locus = singular_locus_polys(&p);
        let zero = Point::from_ints(&[0, 0]);
        assert!(locus[0]
            .1
            .iter()
            .all(|q| q.eval(&zero).unwrap() == rat_int(0)));
    }
}

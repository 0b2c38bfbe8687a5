//! The standard structures exercised by the property suites and the CLI
//! `verify` command.

use crate::exterior::MultiVector;
use crate::parse::parse_multivector;
use crate::poisson::{jacobi_check, PoissonStructure};

fn names(n: usize) -> Vec<String> {
    match n {
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => crate::ring::default_names(n),
    }
}

/// The so(3) Lie-Poisson bivector `x e(2,3) + y e(3,1) + z e(1,2)`.
pub fn so3_bivector() -> MultiVector {
    parse_multivector("z*e(1,2) - y*e(1,3) + x*e(2,3)", &names(3)).unwrap()
}

/// Lie-Poisson structure on so(3)*: `{x,y} = z`, `{y,z} = x`, `{z,x} = y`.
pub fn so3() -> PoissonStructure {
    jacobi_check(&so3_bivector()).expect("so(3) is Poisson")
}

/// The symplectic plane: `{x, y} = 1`.
pub fn symplectic_r2() -> PoissonStructure {
    jacobi_check(&parse_multivector("e(1,2)", &names(2)).unwrap()).expect("constant bivector")
}

/// Constant symplectic structure on R^4: `e(1,2) + e(3,4)`.
pub fn symplectic_r4() -> PoissonStructure {
    jacobi_check(&parse_multivector("e(1,2) + e(3,4)", &names(4)).unwrap())
        .expect("constant bivector")
}

/// The radially scaled plane `(x^2+y^2) e(1,2)`: Poisson, singular exactly
/// at the origin.
pub fn singular_radial_r2() -> PoissonStructure {
    jacobi_check(&parse_multivector("(x^2+y^2)*e(1,2)", &names(2)).unwrap())
        .expect("dimension 2 is always Poisson")
}

/// The zero structure on R^3; every operator of the complexes vanishes.
pub fn zero_r3() -> PoissonStructure {
    jacobi_check(&MultiVector::zero(3)).expect("zero bivector")
}

/// A bivector that is NOT Poisson: `e(1,2) - y e(2,3)` fails Jacobi on
/// the coordinate triple (1,2,3).
pub fn non_jacobi_r3() -> MultiVector {
    parse_multivector("e(1,2) - y*e(2,3)", &names(3)).unwrap()
}

/// Every Jacobi-verified structure of the corpus, with display names.
pub fn verified() -> Vec<(&'static str, PoissonStructure)> {
    vec![
        ("so3", so3()),
        ("symplectic_r2", symplectic_r2()),
        ("symplectic_r4", symplectic_r4()),
        ("singular_radial_r2", singular_radial_r2()),
        ("zero_r3", zero_r3()),
    ]
}

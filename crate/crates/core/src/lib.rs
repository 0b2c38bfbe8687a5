//! Exact graded calculus for polynomial Poisson structures.
//!
//! The symbolic core works over sparse rational polynomials: multivector
//! fields and differential forms with their wedge products and pairings
//! ([`exterior`]), the Schouten bracket with two independent evaluation
//! oracles and the operators of the three differential complexes
//! ([`calculus`]), structure-level analysis such as Jacobi verification,
//! pointwise rank and the involutivity criterion ([`poisson`]), and exact
//! finite-dimensional truncations of the complexes with rank/kernel
//! computations ([`homology`]). A small floating-point layer ([`numeric`])
//! integrates Hamiltonian flows and symplectic-leaf functionals.
//!
//! ```
//! use poisson_core::{corpus, parse::parse_poly};
//! use poisson_core::poisson::bracket;
//! use poisson_core::homology::casimir_space;
//!
//! let p = corpus::so3();
//! let vars: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
//! let casimir = parse_poly("x^2 + y^2 + z^2", &vars).unwrap();
//! let x = parse_poly("x", &vars).unwrap();
//! assert!(bracket(&p, &casimir, &x).unwrap().is_zero());
//! assert_eq!(casimir_space(&p, 4).unwrap().len(), 3); // 1, C, C^2
//! ```

pub mod calculus;
pub mod corpus;
pub mod error;
pub mod exterior;
pub mod homology;
pub mod linalg;
pub mod numeric;
pub mod parse;
pub mod poisson;
pub mod ring;
pub mod sampling;

pub use error::{Error, Result};
pub use exterior::{DiffForm, MultiVector};
pub use poisson::PoissonStructure;
pub use ring::{Point, Poly, Rational};

#[cfg(test)]
mod concurrency_contract {
    // values are immutable after construction and operations are pure, so
    // shared reads across threads must be allowed by the types themselves
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_values_are_send_and_sync() {
        assert_send_sync::<crate::Poly>();
        assert_send_sync::<crate::Point>();
        assert_send_sync::<crate::MultiVector>();
        assert_send_sync::<crate::DiffForm>();
        assert_send_sync::<crate::PoissonStructure>();
        assert_send_sync::<crate::homology::TruncationSpec>();
        assert_send_sync::<crate::homology::DistributionFunctional>();
        assert_send_sync::<crate::numeric::LeafChart>();
        assert_send_sync::<crate::numeric::FlowSpec>();
    }
}

//! Big-isotropic structures on coordinate space `R^m` and the dynamics they
//! carry: exact fiberwise linear algebra in `V + V*`, polynomial tensor
//! calculus with the Courant bracket, integrability tests, port-controlled
//! Hamiltonian systems, constrained mechanics and symmetry reduction.

pub mod bigvec;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod mechanics;
pub mod poly;
pub mod port_ham;
pub mod rational;
pub mod reduction;
pub mod sampling;
pub mod span;
pub mod structure;
pub mod tensor;

pub use error::{Error, Result};
pub use poly::Poly;
pub use rational::Rational;

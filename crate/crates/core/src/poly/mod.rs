//! Exact polynomial arithmetic over the rationals.

pub mod linalg;
pub mod matrix;
pub mod monomial;
pub mod polynomial;
pub mod ratfunc;
pub mod rational;

pub use matrix::{Echelon, Kernel, PolyMatrix};
pub use monomial::Monomial;
pub use polynomial::Polynomial;
pub use ratfunc::RatFunc;
pub use rational::{Rational, RationalPoint};

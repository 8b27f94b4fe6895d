pub mod adjoint;
pub mod artin;
pub mod invariants;
pub mod kuranishi;
pub mod error;
pub mod graded;
pub mod hitchin;
pub mod lie;
pub mod linalg;
pub mod polynomial;
pub mod rational;
pub mod report;
pub mod sampling;
pub mod suites;

pub use artin::{small_extension_pair, ArtinElement, ArtinRing, Monomial, SmallExtension};
pub use error::{Error, Result};
pub use lie::{LieAlgebra, LieElement};
pub use rational::Rational;

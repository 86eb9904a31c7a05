//! Exact computational core for exploded-manifold combinatorics: the
//! exploded semiring, integral-affine polytopes and complexes, exploded
//! charts, the explosion functor, tropical curves and the tropical gluing
//! formula for plane curves.

pub mod affine;
pub mod charts;
pub mod complex;
pub mod error;
pub mod explosion;
pub mod gluing;
pub mod linalg;
pub mod lp;
pub mod rational;
pub mod semiring;
pub mod tropcurve;

pub use error::{Error, Result};
pub use rational::{GaussianRational, Rational};
pub use semiring::ExplodedScalar;

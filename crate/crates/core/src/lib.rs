//! The generalized Lagrange top as an integrable system: Lax flow, first
//! integrals, hyperelliptic spectral curves and the monodromy of their
//! period lattices around loops in the space of level values.
//!
//! The modules build on each other roughly in this order:
//! [`poly`] → [`topsys`] / [`spectral`] → [`periods`] / [`homology`] →
//! [`tracking`], with [`discriminant`] analysing the real discriminant locus.

pub mod discriminant;
pub mod exec;
pub mod homology;
pub mod intmat;
pub mod periods;
pub mod poly;
pub mod spectral;
pub mod topsys;
pub mod tracking;

pub use num_complex::Complex64 as C64;

pub use exec::Exec;
pub use poly::ComplexPoly;

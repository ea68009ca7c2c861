//! Numerical laboratory for type I and type II Hermite-Pade polynomials of
//! Nikishin-type pairs, the scalar equilibrium problem on the two-sheeted
//! surface of `w^2 = z^2 - 1`, the classical vector equilibrium problem, and
//! the zero-distribution statements that tie them together.

pub mod cli;
pub mod config;
pub mod equilibrium;
pub mod error;
pub mod hermite_pade;
pub mod linalg;
pub mod maps;
pub mod markov;
pub mod measure;
pub mod poly;
pub mod potentials;
pub mod precision;
pub mod quadrature;
pub mod roots;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use precision::PrecisionContext;

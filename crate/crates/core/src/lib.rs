//! Exact-arithmetic toolkit for finite-dimensional Lie (super)algebras:
//! structure constants, invariant bilinear forms and their nondegeneracy
//! certificates, Cartan-matrix constructions, divided powers and vectorial
//! algebras, double extensions, queerification, and truncated loop algebras.

pub mod algebra;
pub mod cartan;
pub mod contact;
pub mod divided;
pub mod extensions;
pub mod forms;
pub mod linalg;
pub mod loops;
pub mod matrixalg;
pub mod scalar;
pub mod util;
pub mod vectorial;

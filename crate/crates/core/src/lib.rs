//! Łojasiewicz-type inequalities for the largest eigenvalue of a symmetric
//! polynomial matrix `F(x)`.
//!
//! The crate computes the explicit exponents `𝒭(n, d) = d(3d − 3)^{n−1}` and
//! the certificates derived from them, the Clarke subdifferential of
//! `f(x) = λ_max(F(x))` together with its minimum-norm element, Newton
//! polyhedra at infinity with the matrix non-degeneracy test, sampled
//! verification of the local and global error bounds, and a discrete
//! subgradient flow that drives `[f]₊` to zero.

pub mod cli;
pub mod error;
pub mod exponent;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod newton;
pub mod nondegen;
pub mod polynomial;
pub mod spectral;

pub use error::{Error, Result};
pub use exponent::{certificate, r_function, CertificateInputs, CertificateKind, ExponentCertificate};
pub use newton::{Face, FaceDecomposition, NewtonPolyhedron};
pub use polynomial::{ExponentVector, Polynomial, Rational};
pub use spectral::{SubdiffModel, SymPolyMatrix, TopEigenspace};

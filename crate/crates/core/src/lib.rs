//! Finite geometries over ℤ/dℤ (affine, dual affine and finite projective
//! planes), the mutually unbiased bases they label, line operators, the finite
//! Wigner function and Radon transform, and two-particle retrodiction games.

pub mod error;
pub mod incidence;
pub mod io;
pub mod linalg;
pub mod lineops;
pub mod modfield;
pub mod mub;
pub mod phasespace;
pub mod selftest;
pub mod twoparticle;

pub use error::{Error, Result};
pub use modfield::{Field, FieldElement, C64};

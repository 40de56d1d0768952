//! Exact computation of the Cartier operator on regular differentials of the
//! Suzuki curves `S_m : z^q + z = y^q0 (y^q + y)` over `F_{2^(2m+1)}`.
//!
//! The crate builds the matrix of the Cartier operator over GF(2) in two
//! independent ways, derives the a-number, the rank profile of its powers and
//! the resulting Ekedahl-Oort constraints, and counts points both from the
//! L-polynomial and by brute force.

pub mod eo;
pub mod error;
pub mod f2la;
pub mod gf2n;
pub mod params;
pub mod planepoly;
pub mod structured;

pub use error::{Error, Result};
pub use f2la::{BitMatrix, BitVector, RankProfile};
pub use params::SuzukiParams;
pub use planepoly::PlanePoly;
pub use structured::{Basis, CartierPath, Monomial, StructuredPoly};

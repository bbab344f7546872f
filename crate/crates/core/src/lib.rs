//! Forward and inverse scattering for the third-order operator
//! `(L_q y)(x) = i y'''(x) + q(x) y(x)` on the real line.
//!
//! The crate is organised bottom-up:
//!
//! - [`cubicexp`]: cube roots of unity, the generalized exponentials `s_p(z)`,
//!   their identity algebra, sector geometry and the free Cauchy solution.
//! - [`jost`]: potentials and the Jost solutions `v_k`, `u_k` (with their first
//!   two derivatives) computed by Picard iteration in reduced variables.
//! - [`scatter`]: Wronskians, the transition matrix, scattering coefficients,
//!   bound-state search and jump-relation diagnostics.
//! - [`invscatter`]: Nyström solvers for the inverse problem (reflectionless
//!   and `sc2 = 0` data) and recovery of the potential.
//!
//! Complex numbers are [`num_complex::Complex64`], re-exported as [`C64`].

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod cubicexp;
pub mod error;
pub mod invscatter;
pub mod jost;
pub mod linalg;
pub mod quad;
pub mod scatter;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

//! Potentials and Jost solutions.
//!
//! `v_k(λ, x)` behaves like `e^{iλζ_k x}` as `x → +∞` and `u_k(λ, x)` as
//! `x → -∞`. Both are computed in reduced variables (`ψ_k = v_k e^{-iλζ_k x}`,
//! `φ_k = u_k e^{-iλζ_k x}`) by Picard iteration of the Volterra equation
//! with kernel `s_2(iλ(x-t))/(iλ)²`.

mod asymptotic;
mod potential;
mod solver;

pub use asymptotic::{asymptotic_decomposition, AsymptoticReport};
pub use potential::{Potential, Profile};
pub use solver::{
    iteration_cap, kernel, solve, solve_u, solve_v, truncation_bound, JostConfig, JostFrame, JostSolution, Side,
};

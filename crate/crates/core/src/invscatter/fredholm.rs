use super::kernel_b;
use crate::cubicexp::{SQRT3, ZETA};
use crate::linalg::{condition_number, CMatrix};
use crate::quad::QuadratureGrid;
use crate::{Error, Result, C64};
use nalgebra::{Dyn, LU};
use std::f64::consts::PI;

/// Kernel of `M`: `(ζ₂-ζ₁)t/(2πi) b(τ, -ζ₁t)`.
pub(crate) fn m_kernel(t: f64, tau: f64) -> C64 {
    (ZETA[2] - ZETA[1]) * t / (2.0 * PI * super::I) * kernel_b(tau, -ZETA[1] * t)
}

/// `(Mf)(t)` by the grid quadrature.
pub fn apply_m(grid: &QuadratureGrid, f: &[C64], t: f64) -> C64 {
    grid.nodes.iter().zip(&grid.weights).zip(f).map(|((tau, w), v)| v * m_kernel(t, *tau) * *w).sum()
}

/// Nyström matrix `M_ij = w_j K(t_i, τ_j)`.
pub fn m_matrix(grid: &QuadratureGrid) -> CMatrix {
    let n = grid.len();
    CMatrix::from_fn(n, n, |i, j| m_kernel(grid.nodes[i], grid.nodes[j]) * grid.weights[j])
}

/// Mellin symbol of `M`: `M t^{-z} = μ(z) t^{-z}` with `μ(z) = -sin(πz/3)/sin(πz)`.
pub fn mellin_symbol(z: f64) -> f64 {
    if z == 0.0 {
        return -1.0 / 3.0;
    }
    -(PI * z / 3.0).sin() / (PI * z).sin()
}

/// Finite part of the second moment `-∫₀^∞ τΔ(τ)dτ` of `Δ = (I-M)^{-1}r`
/// when `r(t) ~ tail/t²`: `(2π/√3)·tail`.
///
/// The solution decays only like `t^{-3/2} log t` (double root of `1 - μ` at
/// `3/2`), so the moment is defined through the Mellin continuation to `z = 2`,
/// where `μ` has a pole.
pub fn regularized_second_moment(tail: C64) -> C64 {
    2.0 * PI / SQRT3 * tail
}

/// `I - M` on a grid, factorised once.
pub struct Fredholm {
    grid: QuadratureGrid,
    m: CMatrix,
    lu: LU<C64, Dyn, Dyn>,
    condition: f64,
}

impl std::fmt::Debug for Fredholm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fredholm").field("nodes", &self.grid.len()).field("condition", &self.condition).finish()
    }
}

/// Output of [`solve_fredholm`].
#[derive(Debug, Clone, PartialEq)]
pub struct FredholmSolution {
    pub values: Vec<C64>,
    pub condition: f64,
}

impl Fredholm {
    pub fn new(grid: QuadratureGrid, cond_limit: f64) -> Result<Self> {
        let m = m_matrix(&grid);
        let a = CMatrix::identity(grid.len(), grid.len()) - &m;
        let condition = condition_number(&a);
        if !(condition <= cond_limit) {
            return Err(Error::IllConditioned { cond: condition, limit: cond_limit });
        }
        let lu = a.lu();
        Ok(Fredholm { grid, m, lu, condition })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `(I - M)^{-1} rhs` on the nodes.
    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let b = CMatrix::from_column_slice(rhs.len(), 1, rhs);
        self.lu.solve(&b).expect("factorisation checked nonsingular").as_slice().to_vec()
    }

    /// `(I - M)^{-1} B` for a matrix of right-hand sides.
    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        self.lu.solve(b).expect("factorisation checked nonsingular")
    }

    /// `(I - M) f` on the nodes.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let v = CMatrix::from_column_slice(f.len(), 1, f);
        let r = &v - &self.m * &v;
        r.as_slice().to_vec()
    }

    /// Power-iteration estimate of the `L²(0, ∞)` norm of `M` on the grid.
    pub fn norm_estimate(&self) -> f64 {
        let n = self.grid.len();
        let sw: Vec<f64> = self.grid.weights.iter().map(|w| w.sqrt()).collect();
        let b = CMatrix::from_fn(n, n, |i, j| self.m[(i, j)] * sw[i] / sw[j]);
        let bh = b.adjoint();
        let mut v = CMatrix::from_element(n, 1, C64::new(1.0, 0.0));
        let mut est = 0.0;
        for _ in 0..200 {
            let nv = v.norm();
            if nv == 0.0 {
                return 0.0;
            }
            v /= C64::new(nv, 0.0);
            let w = &bh * (&b * &v);
            let next = w.norm().sqrt();
            let done = (next - est).abs() <= 1e-12 * next;
            est = next;
            v = w;
            if done {
                break;
            }
        }
        est
    }
}

/// One-shot solve of `(I - M)f = rhs` with the condition number reported.
pub fn solve_fredholm(grid: &QuadratureGrid, rhs: &[C64], cond_limit: f64) -> Result<FredholmSolution> {
    if rhs.len() != grid.len() {
        return Err(Error::Validation(format!("rhs has {} samples, grid has {}", rhs.len(), grid.len())));
    }
    let f = Fredholm::new(grid.clone(), cond_limit)?;
    Ok(FredholmSolution { values: f.solve(rhs), condition: f.condition })
}

use super::fredholm::{regularized_second_moment, Fredholm};
use super::recover::spacing;
use super::reflectionless::{norm1, reconstruct, PointValues, Rows};
use super::{kernel_a, kernel_b, InverseConfig, InverseSolution, RaySamples, SpectralData, I};
use crate::cubicexp::{SQRT3, ZETA};
use crate::linalg::CMatrix;
use crate::quad::QuadratureGrid;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `T̃ = [[σ, 0], [-σ/2, 1]]`.
pub fn transfer_matrix(sigma: C64) -> [[C64; 2]; 2] {
    [[sigma, ZERO], [-sigma / 2.0, ONE]]
}

/// `h̃ = T̃h`.
pub fn apply_transfer(sigma: C64, h: [C64; 2]) -> [C64; 2] {
    [sigma * h[0], h[1] - sigma * h[0] / 2.0]
}

/// `σ(τ, x) = ζ₂ e^{i√3τx} sc₁(iζ₁τ)`, the factor of `s₁` on `iζ₁τ`.
fn sigma(sc1: &RaySamples, tau: f64, x: f64) -> C64 {
    ZETA[2] * C64::from_polar(1.0, SQRT3 * tau * x) * sc1.eval(tau)
}

/// `(Pu)(t_i) = (1-ζ₂)t_i/(2πi) PV∫u(τ) b(τ, -ζ₂t_i) dτ`.
///
/// The singular factor is moved to the reference variable,
/// `dτ/(τ - t_i) = ρ_i(v) dv/(v - u_i)` with `ρ_i(v) = τ'(v)(v - u_i)/(τ(v) - t_i)`
/// smooth and `ρ_i(u_i) = 1`. The value at the singular node is subtracted,
/// the remainder is integrated by the Gauss rule (its value at the node taken
/// from the spectral derivative) and the subtracted term is integrated
/// exactly, `PV∫dv/(v - u_i) = ln((1-u_i)/(1+u_i))`.
pub(crate) fn pv_matrix(grid: &QuadratureGrid) -> CMatrix {
    let n = grid.len();
    let u = &grid.u;
    let ref_w: Vec<f64> = (0..n).map(|j| grid.weights[j] / grid.jacobian_at(j)).collect();
    CMatrix::from_fn(n, n, |i, k| {
        let t = grid.nodes[i];
        let pref = (1.0 - ZETA[2]) * t / (2.0 * PI * I);
        // ϕ_k = u_k · shape_k
        let rho = if k == i { 1.0 } else { grid.jacobian_at(k) * (u[k] - u[i]) / (grid.nodes[k] - t) };
        let shape = rho / (grid.nodes[k] - ZETA[2] * t);
        let coef = if k == i {
            let s: f64 = (0..n).filter(|&j| j != i).map(|j| ref_w[j] / (u[j] - u[i])).sum();
            -s + ref_w[i] * grid.diff(i, i) + ((1.0 - u[i]) / (1.0 + u[i])).ln()
        } else {
            ref_w[k] / (u[k] - u[i]) + ref_w[i] * grid.diff(i, k)
        };
        pref * coef * shape
    })
}

/// `(K Δ)(t_i) = -(1/2πi)∫Δ(τ)/(τ - ζ₁t_i) dτ`.
fn cauchy_matrix(grid: &QuadratureGrid) -> CMatrix {
    let n = grid.len();
    CMatrix::from_fn(n, n, |i, j| -grid.weights[j] / (2.0 * PI * I * (grid.nodes[j] - ZETA[1] * grid.nodes[i])))
}

/// The `sc₂ ≡ 0` system with its x-independent pieces precomputed.
///
/// Unknowns are `u = s₁ψ₂*` and `Δ` on the grid. With `σ` as above,
///
/// `u = σ(h₁ - Mu + KΔ)`,
/// `Δ = c - u/2 - Mu + Pu + MΔ`,
///
/// one right-hand side `(h₁, c)` per basis element (the constant and each
/// bound state). Eliminating `Δ = (I-M)^{-1}(c + (P - M - 1/2)u)` leaves a
/// system for `u` on the nodes where `sc₁` is nonzero.
#[derive(Debug)]
pub struct Sc2ZeroSystem {
    sc1: Option<RaySamples>,
    rows: Rows,
    fredholm: Fredholm,
    k: CMatrix,
    p: CMatrix,
    active: Vec<usize>,
    /// `(I-M)^{-1}(P - M - 1/2)` on active columns.
    g: CMatrix,
    /// `M - K g` on active rows and columns.
    b: CMatrix,
    h1: Vec<Vec<C64>>,
    c: Vec<Vec<C64>>,
    gc: Vec<Vec<C64>>,
    kgc: Vec<Vec<C64>>,
    rational: CMatrix,
    delta_w: Vec<Vec<C64>>,
    u_w: Vec<Vec<C64>>,
}

impl Sc2ZeroSystem {
    pub fn new(data: &SpectralData, cfg: &InverseConfig) -> Result<Self> {
        data.validate()?;
        if !data.sc2_vanishes() {
            return Err(Error::Validation("sc2 must vanish identically".into()));
        }
        let sc1 = data.sc1.clone().filter(|s| !s.is_zero());
        let fredholm = Fredholm::new(cfg.grid(data)?, cfg.cond_limit)?;
        let grid = fredholm.grid().clone();
        let n = grid.len();
        let rows = Rows::new(data);
        let nb = rows.len() + 1;
        let active: Vec<usize> = match &sc1 {
            Some(s) => (0..n).filter(|&j| s.eval(grid.nodes[j]) != ZERO).collect(),
            None => vec![],
        };
        let na = active.len();
        let mm = fredholm.matrix().clone();
        let k = cauchy_matrix(&grid);
        let p = pv_matrix(&grid);
        let rhs_g = CMatrix::from_fn(n, na, |i, a| {
            let j = active[a];
            p[(i, j)] - mm[(i, j)] - if i == j { C64::new(0.5, 0.0) } else { ZERO }
        });
        let g = fredholm.solve_matrix(&rhs_g);
        let kg = &k * &g;
        let b = CMatrix::from_fn(na, na, |a, c| mm[(active[a], active[c])] - kg[(active[a], c)]);
        let mut h1 = vec![vec![ONE; n]];
        let mut c = vec![vec![ZERO; n]];
        for r in 0..rows.len() {
            let kap = rows.kappa[r];
            h1.push(
                grid.nodes
                    .iter()
                    .map(|t| {
                        if rows.hat[r] {
                            -kernel_a(*t, I * ZETA[2] * kap)
                        } else {
                            ZETA[2] * kernel_a(*t, I * ZETA[1] * kap)
                        }
                    })
                    .collect(),
            );
            c.push(grid.nodes.iter().map(|t| rows.a(r, *t)).collect());
        }
        let gc: Vec<Vec<C64>> = c.iter().map(|v| fredholm.solve(v)).collect();
        let kgc = gc
            .iter()
            .map(|v| {
                let col = CMatrix::from_column_slice(n, 1, v);
                (&k * col).as_slice().to_vec()
            })
            .collect();
        debug_assert_eq!(gc.len(), nb);
        let rational = rows.rational();
        let delta_w = (0..rows.len()).map(|r| rows.delta_weights(&grid, r)).collect();
        let u_w = (0..rows.len())
            .map(|r| {
                let kap = rows.kappa[r];
                let (pre, lam) = if rows.hat[r] {
                    ((ZETA[1] - ZETA[2]) * kap / (2.0 * PI), -I * ZETA[1] * kap)
                } else {
                    ((1.0 - ZETA[2]) * kap / (2.0 * PI), I * ZETA[2] * kap)
                };
                grid.nodes.iter().zip(&grid.weights).map(|(t, w)| pre * *w * kernel_b(*t, lam)).collect()
            })
            .collect();
        Ok(Sc2ZeroSystem { sc1, rows, fredholm, k, p, active, g, b, h1, c, gc, kgc, rational, delta_w, u_w })
    }

    pub fn fredholm(&self) -> &Fredholm {
        &self.fredholm
    }

    /// Nodes where `sc₁` is nonzero.
    pub fn active_nodes(&self) -> &[usize] {
        &self.active
    }

    fn grid(&self) -> &QuadratureGrid {
        self.fredholm.grid()
    }

    fn sigmas(&self, x: f64) -> Vec<C64> {
        let g = self.grid();
        match &self.sc1 {
            Some(s) => g.nodes.iter().map(|t| sigma(s, *t, x)).collect(),
            None => vec![ZERO; g.len()],
        }
    }

    /// `(u_r, Δ_r)` on all nodes for every basis element by elimination of `Δ`.
    fn basis_solutions(&self, x: f64) -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>, f64)> {
        let n = self.grid().len();
        let na = self.active.len();
        let nb = self.h1.len();
        if na == 0 {
            return Ok((vec![vec![ZERO; n]; nb], self.gc.clone(), 1.0));
        }
        let sig = self.sigmas(x);
        let sa: Vec<C64> = self.active.iter().map(|&j| sig[j]).collect();
        let a = CMatrix::from_fn(na, na, |i, j| (if i == j { ONE } else { ZERO }) + sa[i] * self.b[(i, j)]);
        let rhs = CMatrix::from_fn(na, nb, |i, r| {
            let j = self.active[i];
            sa[i] * (self.h1[r][j] + self.kgc[r][j])
        });
        let inv = a
            .clone()
            .lu()
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
            .ok_or_else(|| Error::Singular(format!("reflection block is singular at x = {x}")))?;
        let cond = norm1(&a) * norm1(&inv);
        let ua = &inv * rhs;
        let delta = &self.g * &ua;
        let mut us = Vec::with_capacity(nb);
        let mut ds = Vec::with_capacity(nb);
        for r in 0..nb {
            let mut u = vec![ZERO; n];
            for (i, &j) in self.active.iter().enumerate() {
                u[j] = ua[(i, r)];
            }
            us.push(u);
            ds.push((0..n).map(|i| self.gc[r][i] + delta[(i, r)]).collect());
        }
        Ok((us, ds, cond))
    }

    /// The same basis solutions from the full block system `(I - M̃)Φ = T̃h`.
    pub fn block_basis_solutions(&self, x: f64) -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>)> {
        let n = self.grid().len();
        let nb = self.h1.len();
        let sig = self.sigmas(x);
        let mm = self.fredholm.matrix();
        let eye = |i: usize, j: usize| if i == j { ONE } else { ZERO };
        let a = CMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, ii) = (i / n, i % n);
            let (bj, jj) = (j / n, j % n);
            let s = sig[ii];
            match (bi, bj) {
                (0, 0) => eye(ii, jj) + s * mm[(ii, jj)],
                (0, _) => -s * self.k[(ii, jj)],
                (_, 0) => (1.0 - s / 2.0) * mm[(ii, jj)] - self.p[(ii, jj)],
                _ => eye(ii, jj) - mm[(ii, jj)] + s / 2.0 * self.k[(ii, jj)],
            }
        });
        let rhs = CMatrix::from_fn(2 * n, nb, |i, r| {
            let ii = i % n;
            apply_transfer(sig[ii], [self.h1[r][ii], self.c[r][ii]])[i / n]
        });
        let sol = crate::linalg::lu_solve(&a, &rhs)?;
        let us = (0..nb).map(|r| (0..n).map(|i| sol[(i, r)]).collect()).collect();
        let ds = (0..nb).map(|r| (0..n).map(|i| sol[(n + i, r)]).collect()).collect();
        Ok((us, ds))
    }

    fn assemble(&self, x: f64, us: &[Vec<C64>], ds: &[Vec<C64>], cond: f64) -> Result<PointValues> {
        let nr = self.rows.len();
        let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<C64>();
        let (xv, cond) = if nr == 0 {
            (vec![], cond)
        } else {
            let mut coupling = self.rational.clone();
            let mut rhs = CMatrix::from_element(nr, 1, ONE);
            for r in 0..nr {
                rhs[(r, 0)] += dot(&self.delta_w[r], &ds[0]) + dot(&self.u_w[r], &us[0]);
                for p in 0..nr {
                    coupling[(r, p)] += dot(&self.delta_w[r], &ds[p + 1]) + dot(&self.u_w[r], &us[p + 1]);
                }
            }
            let (sol, c2) = self.rows.solve(x, &coupling, &[rhs])?;
            (sol[0].as_slice().to_vec(), cond.max(c2))
        };
        let g = self.grid();
        let moment =
            |u: &[C64]| -> C64 { g.nodes.iter().zip(&g.weights).zip(u).map(|((t, w), v)| v * (*t * *w)).sum() };
        let mut s = moment(&us[0]);
        let mut tail = ZERO;
        let mut pole = ZERO;
        for r in 0..nr {
            s += xv[r] * moment(&us[r + 1]);
            tail += xv[r] * self.rows.tail(r);
            pole += xv[r] * if self.rows.hat[r] { ZETA[2] } else { -ZETA[1] };
        }
        let r2 = tail - ((ZETA[1] - ZETA[2]) + (1.0 - ZETA[2])) / (2.0 * PI * I) * s;
        let f = 3.0 * I * (pole + ((ZETA[1] - 1.0) * -s - regularized_second_moment(r2)) / (2.0 * PI * I));
        Ok((xv, f, cond))
    }

    /// `(κ_l R_l, κ̂_s R̂_s)`, `F(x)` and the largest condition estimate.
    pub fn at(&self, x: f64) -> Result<PointValues> {
        let (us, ds, cond) = self.basis_solutions(x)?;
        self.assemble(x, &us, &ds, cond)
    }

    /// [`Self::at`] through the full block system.
    pub fn block_at(&self, x: f64) -> Result<PointValues> {
        let (us, ds) = self.block_basis_solutions(x)?;
        self.assemble(x, &us, &ds, 1.0)
    }
}

/// Reconstructs `F` and `q` from data with `sc₂ ≡ 0` on a uniform x-grid.
///
/// When `sc₁ ≡ 0` the working grid is extended to the right until `F` has
/// decayed, as for reflectionless data; otherwise `F` decays only
/// algebraically and the grid is padded by two points, with `|F|` at the right
/// edge reported.
pub fn solve_sc2zero(data: &SpectralData, x: &[f64], cfg: &InverseConfig) -> Result<InverseSolution> {
    data.validate()?;
    if !data.sc2_vanishes() {
        return Err(Error::Validation("sc2 must vanish identically".into()));
    }
    if data.m() + data.m_hat() == 0 && data.is_reflectionless() {
        spacing(x)?;
        return Ok(InverseSolution::empty(x));
    }
    let sys = Sc2ZeroSystem::new(data, cfg)?;
    let extend = sys.active.is_empty();
    let (mut sol, _) = reconstruct(x, data.m(), cfg, extend, |xv| sys.at(xv))?;
    sol.m_norm = sys.fredholm.norm_estimate();
    sol.condition = sys.fredholm.condition();
    Ok(sol)
}

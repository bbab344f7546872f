//! Forward scattering: Wronskians, the transition matrix `T(λ)` relating the
//! Jost families (`u_k = Σ_l t_{k,l} v_l`), its algebraic structure, scattering
//! coefficients, bound states and jump-relation diagnostics.
//!
//! For a function `f(λ)` the starred function is `f*(λ) = conj(f(conj λ))`.

mod bound;
mod jump;

pub use bound::{find_bound_states, BoundState, BoundStateConfig, BoundStateScan, RayKind};
pub use jump::{boundary_system_residual, f01, f02, jump_residual, BoundaryConfig, JumpResidual, JumpSides};

use crate::cubicexp::{SQRT3, ZETA};
use crate::jost::{solve, JostConfig, JostFrame, Potential, Side};
use crate::linalg::{lu_solve, CMatrix};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `{f, g} = f g' - f' g`.
pub fn wronskian(f: &JostFrame, g: &JostFrame) -> Result<C64> {
    if f.lambda != g.lambda || f.x != g.x {
        return Err(Error::Validation(format!(
            "Wronskian of frames at different points: (λ={}, x={}) vs (λ={}, x={})",
            f.lambda, f.x, g.lambda, g.x
        )));
    }
    let (a, b) = (f.raw(), g.raw());
    Ok(a[0] * b[1] - a[1] * b[0])
}

/// Jost frames at one point, computed together.
fn frames(pot: &Potential, lambda: C64, side: Side, x: f64) -> Result<[JostFrame; 3]> {
    let cfg = JostConfig::default();
    let mut out = [JostFrame::free(side, 0, lambda, x); 3];
    for (k, f) in out.iter_mut().enumerate() {
        *f = solve(pot, lambda, k, side, &[x], &cfg)?.frames[0];
    }
    Ok(out)
}

/// `(v*_k, v*_k', v*_k'')` at `(λ, x)`, i.e. the conjugated `v_k(conj λ, x)`.
pub fn star_v(pot: &Potential, lambda: C64, k: usize, x: f64) -> Result<[C64; 3]> {
    let f = solve(pot, lambda.conj(), k, Side::Right, &[x], &JostConfig::default())?.frames[0];
    Ok(f.raw().map(|v| v.conj()))
}

fn row0_from(lambda: C64, u0: &[C64; 3], vstar: &[[C64; 3]; 3]) -> [C64; 3] {
    const N: [usize; 3] = [0, 2, 1];
    let mut row = [ZERO; 3];
    for k in 0..3 {
        let w = &vstar[N[k]];
        row[k] = -ZETA[k] / (3.0 * lambda * lambda) * (u0[0] * w[2] - u0[1] * w[1] + u0[2] * w[0]);
    }
    row
}

/// `(t_{0,0}, t_{0,1}, t_{0,2})` from the Wronskian representation at `x = 0`.
pub fn transition_row0(pot: &Potential, lambda: C64) -> Result<[C64; 3]> {
    transition_row0_at(pot, lambda, 0.0)
}

/// Same as [`transition_row0`] with the (x-independent) bracket evaluated at
/// `x`.
pub fn transition_row0_at(pot: &Potential, lambda: C64, x: f64) -> Result<[C64; 3]> {
    if lambda.norm() == 0.0 {
        return Err(Error::Degenerate("transition coefficients are singular at lambda = 0".into()));
    }
    if pot.is_zero() {
        return Ok([ONE, ZERO, ZERO]);
    }
    let u0 = solve(pot, lambda, 0, Side::Left, &[x], &JostConfig::default())?.frames[0].raw();
    let vstar = [star_v(pot, lambda, 0, x)?, star_v(pot, lambda, 1, x)?, star_v(pot, lambda, 2, x)?];
    Ok(row0_from(lambda, &u0, &vstar))
}

/// `t_{0,0}` alone (two Jost solves).
pub fn t00(pot: &Potential, lambda: C64) -> Result<C64> {
    if lambda.norm() == 0.0 {
        return Err(Error::Degenerate("transition coefficients are singular at lambda = 0".into()));
    }
    if pot.is_zero() {
        return Ok(ONE);
    }
    let u0 = solve(pot, lambda, 0, Side::Left, &[0.0], &JostConfig::default())?.frames[0].raw();
    let w = star_v(pot, lambda, 0, 0.0)?;
    Ok(-(u0[0] * w[2] - u0[1] * w[1] + u0[2] * w[0]) / (3.0 * lambda * lambda))
}

/// The signature matrix `J` (`J² = I`, `J^H = J`).
pub fn signature() -> [[C64; 3]; 3] {
    [[ONE, ZERO, ZERO], [ZERO, ZERO, ZETA[2]], [ZERO, ZETA[1], ZERO]]
}

/// Transition matrix at one `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix {
    pub lambda: C64,
    pub t: [[C64; 3]; 3],
}

impl TransitionMatrix {
    pub fn identity(lambda: C64) -> Self {
        TransitionMatrix { lambda, t: [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]] }
    }

    pub fn det(&self) -> C64 {
        let t = &self.t;
        t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) - t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0])
            + t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])
    }

    /// Signed cofactor `T_{i,j}` of entry `t_{i,j}`.
    pub fn cofactor(&self, i: usize, j: usize) -> C64 {
        let r: Vec<usize> = (0..3).filter(|&a| a != i).collect();
        let c: Vec<usize> = (0..3).filter(|&b| b != j).collect();
        let m = self.t[r[0]][c[0]] * self.t[r[1]][c[1]] - self.t[r[0]][c[1]] * self.t[r[1]][c[0]];
        if (i + j).is_multiple_of(2) {
            m
        } else {
            -m
        }
    }

    /// `max |J - T(λ) J T(conj λ)^H|` given the matrix at `conj λ`.
    pub fn j_unitarity_residual(&self, at_conj: &TransitionMatrix) -> f64 {
        let j = signature();
        let mut res = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                let mut s = ZERO;
                for p in 0..3 {
                    for q in 0..3 {
                        s += self.t[a][p] * j[p][q] * at_conj.t[b][q].conj();
                    }
                }
                res = res.max((s - j[a][b]).norm());
            }
        }
        res
    }
}

/// Full transition matrix; rows 1 and 2 are row 0 at `λζ₁`, `λζ₂` with the
/// column permutations `t_{1,(l+1)%3}(λ) = t_{0,l}(λζ₁)` and
/// `t_{2,(l+2)%3}(λ) = t_{0,l}(λζ₂)`.
pub fn transition_full(pot: &Potential, lambda: C64) -> Result<TransitionMatrix> {
    if pot.is_zero() {
        if lambda.norm() == 0.0 {
            return Err(Error::Degenerate("transition coefficients are singular at lambda = 0".into()));
        }
        return Ok(TransitionMatrix::identity(lambda));
    }
    let mut t = [[ZERO; 3]; 3];
    for r in 0..3 {
        let row = transition_row0(pot, lambda * ZETA[r])?;
        for l in 0..3 {
            t[r][(l + r) % 3] = row[l];
        }
    }
    Ok(TransitionMatrix { lambda, t })
}

/// Independent route to `T(λ)`: solves the 3×3 system
/// `u_k^{(n)}(x) = Σ_l t_{k,l} v_l^{(n)}(x)` for each `k`.
pub fn transition_direct(pot: &Potential, lambda: C64, x: f64) -> Result<TransitionMatrix> {
    let u = frames(pot, lambda, Side::Left, x)?;
    let v = frames(pot, lambda, Side::Right, x)?;
    let mut a = CMatrix::zeros(3, 3);
    let mut b = CMatrix::zeros(3, 3);
    for n in 0..3 {
        for l in 0..3 {
            a[(n, l)] = v[l].raw()[n];
            b[(n, l)] = u[l].raw()[n];
        }
    }
    let sol = lu_solve(&a, &b)?;
    let mut t = [[ZERO; 3]; 3];
    for (k, row) in t.iter_mut().enumerate() {
        for (l, e) in row.iter_mut().enumerate() {
            *e = sol[(l, k)];
        }
    }
    Ok(TransitionMatrix { lambda, t })
}

/// `det[v_l^{(n)}(λ, x)]`, equal to `-3√3 λ³` for every `x`.
pub fn fundamental_determinant(pot: &Potential, lambda: C64, x: f64) -> Result<C64> {
    let v = frames(pot, lambda, Side::Right, x)?;
    let m: Vec<[C64; 3]> = v.iter().map(|f| f.raw()).collect();
    let tm = TransitionMatrix {
        lambda,
        t: [[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]],
    };
    Ok(tm.det())
}

/// Residuals of the Wronskian representation
/// `W_{0,1} = √3λζ₂ v₁*`, `W_{1,2} = √3λ v₀*`, `W_{2,0} = √3λζ₁ v₂*`,
/// each relative to `|√3 λ v*|`.
pub fn wronskian_duality_residual(pot: &Potential, lambda: C64, x: f64) -> Result<[f64; 3]> {
    let v = frames(pot, lambda, Side::Right, x)?;
    let pairs = [(0usize, 1usize, 1usize, ZETA[2]), (1, 2, 0, ONE), (2, 0, 2, ZETA[1])];
    let mut out = [0.0; 3];
    for (i, &(k, s, m, z)) in pairs.iter().enumerate() {
        let w = wronskian(&v[k], &v[s])?;
        let rhs = SQRT3 * lambda * z * star_v(pot, lambda, m, x)?[0];
        out[i] = (w - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    }
    Ok(out)
}

/// Residuals of the algebraic structure of `T(λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport {
    pub lambda: C64,
    pub det: C64,
    /// `|det T - 1|`.
    pub det_residual: f64,
    /// `max |J - T(λ) J T(conj λ)^H|`.
    pub j_unitarity: f64,
    /// Residual of `r₀r₀* = 1 + ζ₁ sc₂ sc₁* + ζ₂ sc₁ sc₂*`.
    pub unitarity: f64,
    /// `|t₀₀* - T₀₀|`.
    pub cofactor: f64,
}

/// Computes `T(λ)` and `T(conj λ)` and checks unimodularity, J-unitarity, the
/// unitarity condition and the cofactor relation.
pub fn structure_residuals(pot: &Potential, lambda: C64) -> Result<StructureReport> {
    let t = transition_full(pot, lambda)?;
    let tc = if lambda.im == 0.0 { t } else { transition_full(pot, lambda.conj())? };
    structure_report(&t, &tc)
}

/// [`structure_residuals`] from `T(λ)` and `T(conj λ)` already computed.
pub fn structure_report(t: &TransitionMatrix, tc: &TransitionMatrix) -> Result<StructureReport> {
    let lambda = t.lambda;
    let det = t.det();
    let sc = ScatteringCoefficients::from_rows(lambda, t.t[0], tc.t[0])?;
    Ok(StructureReport {
        lambda,
        det,
        det_residual: (det - 1.0).norm(),
        j_unitarity: t.j_unitarity_residual(tc),
        unitarity: sc.unitarity_residual,
        cofactor: (tc.t[0][0].conj() - t.cofactor(0, 0)).norm(),
    })
}

/// `r₀ = 1/t₀₀`, `sc₁ = t₀₁/t₀₀`, `sc₂ = t₀₂/t₀₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub lambda: C64,
    pub r0: C64,
    pub sc1: C64,
    pub sc2: C64,
    /// `|r₀r₀* - 1 - ζ₁ sc₂ sc₁* - ζ₂ sc₁ sc₂*| / max(1, |r₀r₀*|)`.
    pub unitarity_residual: f64,
}

/// Below this `|t₀₀|` the coefficients are not formed.
pub const T00_FLOOR: f64 = 1e-10;

impl ScatteringCoefficients {
    /// From row 0 of `T(λ)` and of `T(conj λ)`.
    pub fn from_rows(lambda: C64, row: [C64; 3], row_conj: [C64; 3]) -> Result<Self> {
        if row[0].norm() < T00_FLOOR || row_conj[0].norm() < T00_FLOOR {
            return Err(Error::Degenerate(format!("t00 vanishes at lambda = {lambda} (bound state)")));
        }
        let (r0, sc1, sc2) = (1.0 / row[0], row[1] / row[0], row[2] / row[0]);
        let (r0s, sc1s, sc2s) =
            ((1.0 / row_conj[0]).conj(), (row_conj[1] / row_conj[0]).conj(), (row_conj[2] / row_conj[0]).conj());
        let lhs = r0 * r0s;
        let rhs = 1.0 + ZETA[1] * sc2 * sc1s + ZETA[2] * sc1 * sc2s;
        Ok(ScatteringCoefficients {
            lambda,
            r0,
            sc1,
            sc2,
            unitarity_residual: (lhs - rhs).norm() / lhs.norm().max(1.0),
        })
    }
}

/// Scattering coefficients at `λ` (row 0 is also computed at `conj λ` for the
/// unitarity residual).
pub fn scattering_coefficients(pot: &Potential, lambda: C64) -> Result<ScatteringCoefficients> {
    let row = transition_row0(pot, lambda)?;
    let row_conj = if lambda.im == 0.0 { row } else { transition_row0(pot, lambda.conj())? };
    ScatteringCoefficients::from_rows(lambda, row, row_conj)
}

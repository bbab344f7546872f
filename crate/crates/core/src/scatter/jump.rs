use super::{transition_row0, BoundState, ScatteringCoefficients};
use crate::cubicexp::{SQRT3, ZETA};
use crate::jost::{solve, JostConfig, Potential, Side};
use crate::quad::GaussLegendre;
use crate::{Error, Result, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

fn reduced(pot: &Potential, lambda: C64, k: usize, side: Side, x: f64) -> Result<[C64; 3]> {
    Ok(solve(pot, lambda, k, side, &[x], &JostConfig::default())?.frames[0].reduced)
}

/// `ψ_k*(λ, x) = conj(ψ_k(conj λ, x))`.
fn psi_star(pot: &Potential, lambda: C64, k: usize, x: f64) -> Result<C64> {
    Ok(reduced(pot, lambda.conj(), k, Side::Right, x)?[0].conj())
}

/// `f_{0,2}(λ, x) = -ζ₂/(√3λ) e^{iλζ₁x} {u₀, v₂}`.
pub fn f02(pot: &Potential, lambda: C64, x: f64) -> Result<C64> {
    let phi = reduced(pot, lambda, 0, Side::Left, x)?;
    let psi = reduced(pot, lambda, 2, Side::Right, x)?;
    Ok(-ZETA[2] / (SQRT3 * lambda) * (phi[0] * psi[1] - phi[1] * psi[0]))
}

/// `f_{0,1}(λ, x) = ζ₁/(√3λ) e^{iλζ₂x} {u₀, v₁}`.
pub fn f01(pot: &Potential, lambda: C64, x: f64) -> Result<C64> {
    let phi = reduced(pot, lambda, 0, Side::Left, x)?;
    let psi = reduced(pot, lambda, 1, Side::Right, x)?;
    Ok(ZETA[1] / (SQRT3 * lambda) * (phi[0] * psi[1] - phi[1] * psi[0]))
}

/// Both sides of one jump relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSides {
    pub lambda: C64,
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
}

/// Jump relations at `λ = iζ₁t` and `λ = iζ₂t`, plus the optional
/// boundary-value system residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpResidual {
    pub t: f64,
    pub x: f64,
    /// `ψ₂* - r₀ f₀₂ = s₁ ψ₀*` on `i l_{ζ₁}`.
    pub ray1: JumpSides,
    /// `ψ₁* - r₀ f₀₁ = s₂ ψ₀*` on `i l_{ζ₂}`.
    pub ray2: JumpSides,
    /// Residuals of the two boundary-value equations for `ψ₂*(it)`,
    /// `ψ₁*(it)` (no bound states).
    pub boundary_system: Option<[f64; 2]>,
}

fn sides(lhs: C64, rhs: C64, lambda: C64) -> JumpSides {
    JumpSides { lambda, lhs, rhs, residual: (lhs - rhs).norm() }
}

/// `s₁(λ, x) = ζ₂ e^{iλ(ζ₁-1)x} sc₁(λ)` and `s₂(λ, x) = ζ₁ e^{iλ(ζ₂-1)x} sc₂(λ)`.
fn s_coeffs(pot: &Potential, lambda: C64, x: f64) -> Result<(C64, C64)> {
    let row = transition_row0(pot, lambda)?;
    let row_c = if lambda.im == 0.0 { row } else { transition_row0(pot, lambda.conj())? };
    let sc = ScatteringCoefficients::from_rows(lambda, row, row_c)?;
    let s1 = ZETA[2] * (I * lambda * (ZETA[1] - 1.0) * x).exp() * sc.sc1;
    let s2 = ZETA[1] * (I * lambda * (ZETA[2] - 1.0) * x).exp() * sc.sc2;
    Ok((s1, s2))
}

fn ray_relation(pot: &Potential, lambda: C64, x: f64, which: usize) -> Result<JumpSides> {
    let row = transition_row0(pot, lambda)?;
    let row_c = transition_row0(pot, lambda.conj())?;
    let sc = ScatteringCoefficients::from_rows(lambda, row, row_c)?;
    let psi0 = psi_star(pot, lambda, 0, x)?;
    Ok(if which == 1 {
        let s1 = ZETA[2] * (I * lambda * (ZETA[1] - 1.0) * x).exp() * sc.sc1;
        sides(psi_star(pot, lambda, 2, x)? - sc.r0 * f02(pot, lambda, x)?, s1 * psi0, lambda)
    } else {
        let s2 = ZETA[1] * (I * lambda * (ZETA[2] - 1.0) * x).exp() * sc.sc2;
        sides(psi_star(pot, lambda, 1, x)? - sc.r0 * f01(pot, lambda, x)?, s2 * psi0, lambda)
    })
}

/// Settings for the boundary-value system diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConfig {
    /// Gauss–Legendre points per panel.
    pub points: usize,
    /// Panel breakpoints on `(0, τ_max]` (the evaluation point is added).
    pub breaks: Vec<f64>,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig { points: 12, breaks: vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] }
    }
}

/// Samples `(ψ₁*(iτ), ψ₂*(iτ), s₁(iζ₁τ), s₂(iζ₂τ))`.
fn boundary_samples(pot: &Potential, tau: f64, x: f64) -> Result<[C64; 4]> {
    let l = I * tau;
    let p1 = psi_star(pot, l, 1, x)?;
    let p2 = psi_star(pot, l, 2, x)?;
    let (s1, _) = s_coeffs(pot, l * ZETA[1], x)?;
    let (_, s2) = s_coeffs(pot, l * ZETA[2], x)?;
    Ok([p1, p2, s1, s2])
}

/// Residuals of the boundary-value equations for `ψ₂*(it, x)` and
/// `ψ₁*(it, x)` in the absence of bound states:
///
/// `ψ₂*(it) = 1 + U₂(t)/2 + (1/2πi)[PV∫U₂/(τ-t) - ∫U₁/(τ-ζ₂t) + ∫D/(τ-ζ₁t)]`,
/// `ψ₁*(it) = 1 + U₁(t)/2 + (1/2πi)[∫U₂/(τ-ζ₁t) - PV∫U₁/(τ-t) + ∫D/(τ-ζ₂t)]`,
///
/// with `U₁ = s₁(iζ₁τ)ψ₂*(iτ)`, `U₂ = s₂(iζ₂τ)ψ₁*(iτ)`,
/// `D = U₁ - U₂ - (ψ₂* - ψ₁*)`. Integrals run over `(0, ∞)`; past the last
/// breakpoint `U₁, U₂` are neglected and `D` is continued as `D(T)(T/τ)²`.
pub fn boundary_system_residual(pot: &Potential, t: f64, x: f64, cfg: &BoundaryConfig) -> Result<[f64; 2]> {
    if !(t > 0.0) {
        return Err(Error::Range("boundary point t must be positive".into()));
    }
    let mut breaks = cfg.breaks.clone();
    breaks.push(t);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let tmax = *breaks.last().expect("nonempty breaks");
    let gl = GaussLegendre::new(cfg.points);
    let mut nodes = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (u, wt) in gl.nodes.iter().zip(&gl.weights) {
            nodes.push((0.5 * (a + b) + 0.5 * (b - a) * u, 0.5 * (b - a) * wt));
        }
    }
    let samples: Vec<[C64; 4]> =
        nodes.par_iter().map(|(tau, _)| boundary_samples(pot, *tau, x)).collect::<Result<Vec<_>>>()?;
    let at_t = boundary_samples(pot, t, x)?;
    let at_max = boundary_samples(pot, tmax, x)?;
    let u = |s: &[C64; 4]| (s[2] * s[1], s[3] * s[0]);
    let d = |s: &[C64; 4]| {
        let (u1, u2) = u(s);
        u1 - u2 - (s[1] - s[0])
    };
    let (u1t, u2t) = u(&at_t);
    let (z1t, z2t) = (ZETA[1] * t, ZETA[2] * t);
    let mut acc = [C64::new(0.0, 0.0); 6];
    for ((tau, w), s) in nodes.iter().zip(&samples) {
        let (u1, u2) = u(s);
        let dd = d(s);
        acc[0] += (u2 - u2t) / (tau - t) * *w;
        acc[1] += u1 / (tau - z2t) * *w;
        acc[2] += dd / (tau - z1t) * *w;
        acc[3] += u2 / (tau - z1t) * *w;
        acc[4] += (u1 - u1t) / (tau - t) * *w;
        acc[5] += dd / (tau - z2t) * *w;
    }
    // PV subtraction remainder and D tail
    let log = ((tmax - t) / t).ln();
    acc[0] += u2t * log;
    acc[4] += u1t * log;
    let dmax = d(&at_max);
    let tail = |wz: C64| -> C64 { gl.integrate(0.0, 1.0, |s| dmax * tmax * s / (tmax - wz * s)) };
    acc[2] += tail(z1t);
    acc[5] += tail(z2t);
    let c = 1.0 / (2.0 * PI * I);
    let rhs2 = 1.0 + u2t / 2.0 + c * (acc[0] - acc[1] + acc[2]);
    let rhs1 = 1.0 + u1t / 2.0 + c * (acc[3] - acc[4] + acc[5]);
    Ok([(at_t[1] - rhs2).norm(), (at_t[0] - rhs1).norm()])
}

/// Evaluates the jump relations at `iζ₁t` and `iζ₂t`. With no bound states and
/// `boundary = Some(cfg)` the boundary-value system residuals are attached;
/// with bound states present the boundary system is not supported.
pub fn jump_residual(
    pot: &Potential,
    t: f64,
    x: f64,
    bound_states: &[BoundState],
    boundary: Option<&BoundaryConfig>,
) -> Result<JumpResidual> {
    if !bound_states.is_empty() {
        return Err(Error::Unsupported(format!(
            "{} bound state(s) present; pole terms of the boundary system are not handled",
            bound_states.len()
        )));
    }
    if !(t > 0.0) {
        return Err(Error::Range("ray parameter t must be positive".into()));
    }
    let i = C64::new(0.0, 1.0);
    if pot.is_zero() {
        let z = JumpSides { lambda: i * ZETA[1] * t, lhs: C64::new(0.0, 0.0), rhs: C64::new(0.0, 0.0), residual: 0.0 };
        return Ok(JumpResidual {
            t,
            x,
            ray1: z,
            ray2: JumpSides { lambda: i * ZETA[2] * t, ..z },
            boundary_system: boundary.map(|_| [0.0, 0.0]),
        });
    }
    let ray1 = ray_relation(pot, i * ZETA[1] * t, x, 1)?;
    let ray2 = ray_relation(pot, i * ZETA[2] * t, x, 2)?;
    let boundary_system = match boundary {
        Some(cfg) => Some(boundary_system_residual(pot, t, x, cfg)?),
        None => None,
    };
    Ok(JumpResidual { t, x, ray1, ray2, boundary_system })
}

use super::Potential;
use crate::cubicexp::{scaled_s, ZETA};
use crate::quad::GaussLegendre;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Which end of the line the boundary condition is imposed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `v_k`: `v_k - e^{iλζ_k x} → 0` as `x → +∞`.
    Right,
    /// `u_k`: `u_k - e^{iλζ_k x} → 0` as `x → -∞`.
    Left,
}

/// One Jost solution and its first two derivatives at `(λ, x)`.
///
/// Values are stored reduced: `reduced[n] = y^{(n)}(x) e^{-iλζ_k x}`, so
/// `reduced[0]` is `ψ_k` (right side) or `φ_k` (left side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostFrame {
    pub side: Side,
    pub k: usize,
    pub lambda: C64,
    pub x: f64,
    pub reduced: [C64; 3],
}

impl JostFrame {
    /// `iλζ_k`.
    pub fn exponent(&self) -> C64 {
        I * self.lambda * ZETA[self.k]
    }

    /// Reduced value `ψ_k` or `φ_k`.
    pub fn psi(&self) -> C64 {
        self.reduced[0]
    }

    /// `(y, y', y'')` without the exponential scaling removed.
    pub fn raw(&self) -> [C64; 3] {
        let e = (self.exponent() * self.x).exp();
        self.reduced.map(|r| r * e)
    }

    pub fn value(&self) -> C64 {
        self.raw()[0]
    }

    pub fn d1(&self) -> C64 {
        self.raw()[1]
    }

    pub fn d2(&self) -> C64 {
        self.raw()[2]
    }

    /// The free frame `e^{iλζ_k x}`.
    pub fn free(side: Side, k: usize, lambda: C64, x: f64) -> Self {
        let c = I * lambda * ZETA[k];
        JostFrame { side, k, lambda, x, reduced: [C64::new(1.0, 0.0), c, c * c] }
    }
}

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct JostConfig {
    /// Stop when successive Picard iterates differ by at most this much
    /// in the max-component norm (derivatives scaled by `max(1, |λ|)^n`).
    pub tol: f64,
    /// Number of mesh intervals across the support of `q`.
    pub intervals: usize,
    /// Gauss–Legendre points per mesh interval.
    pub gauss_points: usize,
    /// Upper bound on `|λ| h` for the mesh spacing `h`.
    pub max_phase_step: f64,
    /// Overrides the a-priori iteration cap.
    pub max_iter: Option<usize>,
}

impl Default for JostConfig {
    fn default() -> Self {
        JostConfig { tol: 1e-12, intervals: 500, gauss_points: 5, max_phase_step: 0.3, max_iter: None }
    }
}

/// Frames on the requested grid plus the Picard history.
#[derive(Debug, Clone, PartialEq)]
pub struct JostSolution {
    pub frames: Vec<JostFrame>,
    pub iterations: usize,
    /// Sup-norm difference of successive iterates, one entry per iteration.
    pub updates: Vec<f64>,
}

/// Volterra kernel `K₁(λ, x, t) = s_2(iλ(x-t))/(iλ)²` (equal to `(t-x)²/2` at
/// `λ = 0`).
pub fn kernel(lambda: C64, x: f64, t: f64) -> C64 {
    scaled_s(2, lambda, x - t)
}

/// `d(λ) = e^{|β|} cosh(α√3/2)` for `λ = α + iβ`.
fn growth(l: C64) -> f64 {
    l.im.abs().exp() * (l.re * crate::cubicexp::SQRT3 / 2.0).cosh()
}

/// A-priori bound on the `n`-th iterated kernel over a span `t - x = span`,
/// with `σ = ‖q‖_{L¹}`:
/// `d(λ·span)/|λ|^{2n} · σ^{n-1}/(n-1)!` for `λ ≠ 0` and
/// `(span²/2)^n σ^{n-1}/(n^{2n} (n-1)!)` for `λ = 0`.
pub fn truncation_bound(pot: &Potential, lambda: C64, n: usize, span: f64) -> f64 {
    assert!(n >= 1, "iteration count starts at 1");
    let sigma = pot.q1();
    let lfact: f64 = (1..n).map(|j| (j as f64).ln()).sum();
    let lsig = if n == 1 { 0.0 } else { (n - 1) as f64 * sigma.ln() };
    if lambda.norm() == 0.0 {
        let base = (n as f64) * (span * span / 2.0).ln() + lsig - 2.0 * n as f64 * (n as f64).ln() - lfact;
        base.exp()
    } else {
        (growth(lambda * span).ln() - 2.0 * n as f64 * lambda.norm().ln() + lsig - lfact).exp()
    }
}

/// Smallest `n` with `truncation_bound < 1e-15`, clamped to `[4, 60]`.
pub fn iteration_cap(pot: &Potential, lambda: C64) -> usize {
    let (lo, hi) = pot.support();
    let span = (hi - lo).max(1e-300);
    (1..=60).find(|&n| truncation_bound(pot, lambda, n, span) < 1e-15).unwrap_or(60).clamp(4, 60)
}

/// `v_k(λ, ·)` on `grid` with default settings.
pub fn solve_v(pot: &Potential, lambda: C64, k: usize, grid: &[f64]) -> Result<Vec<JostFrame>> {
    Ok(solve(pot, lambda, k, Side::Right, grid, &JostConfig::default())?.frames)
}

/// `u_k(λ, ·)` on `grid` with default settings.
pub fn solve_u(pot: &Potential, lambda: C64, k: usize, grid: &[f64]) -> Result<Vec<JostFrame>> {
    Ok(solve(pot, lambda, k, Side::Left, grid, &JostConfig::default())?.frames)
}

/// `(e^{-cδ} T(δ))`: propagates the reduced moment vector `(P_0, P_1, P_2)`
/// across a gap `δ` where `q` vanishes.
fn transfer(lambda: C64, c: C64, delta: f64) -> [[C64; 3]; 3] {
    let s = [scaled_s(0, lambda, delta), scaled_s(1, lambda, delta), scaled_s(2, lambda, delta)];
    let l3 = (I * lambda).powu(3);
    let e = (-c * delta).exp();
    [[s[0] * e, l3 * s[2] * e, l3 * s[1] * e], [s[1] * e, s[0] * e, l3 * s[2] * e], [s[2] * e, s[1] * e, s[0] * e]]
}

fn apply(m: &[[C64; 3]; 3], p: &[C64; 3]) -> [C64; 3] {
    [
        m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
        m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
        m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
    ]
}

/// Quintic Hermite basis on `[0, 1]`: values, slopes, curvatures at 0 then 1.
fn hermite_basis(s: f64) -> [f64; 6] {
    let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));
    [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        0.5 * (s3 - 2.0 * s4 + s5),
    ]
}

fn reduce(rho: [C64; 3], p: [C64; 3], c: C64, sign: f64) -> [C64; 3] {
    let _ = rho;
    let si = I * sign;
    [C64::new(1.0, 0.0) + si * p[2], c + si * p[1], c * c + si * p[0]]
}

/// Picard iteration for one Jost solution.
///
/// The reduced moments `P_n(x) = ∫ S_n(iλ(x-t)) e^{iλζ_k(t-x)} q(t) ψ(t) dt`
/// (with `S_n(z) = s_n(z)/(iλ)^n`) are swept across a mesh covering the support
/// of `q`; each interval contributes a Gauss–Legendre integral of a quintic
/// Hermite interpolant of the previous iterate, and moments are carried between
/// nodes exactly through the addition formulas. Points of `grid` outside the
/// support are reached by the exact free propagation.
pub fn solve(
    pot: &Potential,
    lambda: C64,
    k: usize,
    side: Side,
    grid: &[f64],
    cfg: &JostConfig,
) -> Result<JostSolution> {
    if k > 2 {
        return Err(Error::Range(format!("wave index {k} must lie in 0..=2")));
    }
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::Range("lambda must be finite".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("grid must be finite and ascending".into()));
    }
    let c = I * lambda * ZETA[k];
    if pot.is_zero() {
        let frames = grid.iter().map(|&x| JostFrame::free(side, k, lambda, x)).collect();
        return Ok(JostSolution { frames, iterations: 0, updates: vec![] });
    }
    let sign = match side {
        Side::Right => -1.0,
        Side::Left => 1.0,
    };
    let (lo, hi) = pot.support();

    // mesh
    let mut h = (hi - lo) / cfg.intervals.max(1) as f64;
    if lambda.norm() > 0.0 {
        h = h.min(cfg.max_phase_step / lambda.norm());
    }
    let n_int = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / n_int as f64;
    let mut nodes: Vec<f64> = (0..=n_int).map(|i| if i == n_int { hi } else { lo + i as f64 * h }).collect();
    let inside: Vec<f64> = grid.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    if !inside.is_empty() {
        nodes.extend(inside);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
    let m = nodes.len();

    // per-interval quadrature weights and transfers
    let gl = GaussLegendre::new(cfg.gauss_points);
    let basis: Vec<[f64; 6]> = gl.nodes.iter().map(|u| hermite_basis(0.5 * (1.0 + u))).collect();
    let ng = gl.nodes.len();
    let mut weights = vec![[C64::new(0.0, 0.0); 3]; (m - 1) * ng];
    let mut transfers = Vec::with_capacity(m - 1);
    let mut widths = Vec::with_capacity(m - 1);
    // kernel factors depend only on the interval width, which is constant
    // away from inserted grid points
    let mut cached: Option<(f64, Vec<[C64; 3]>, [[C64; 3]; 3])> = None;
    for i in 0..m - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let hw = b - a;
        widths.push(hw);
        let stale = cached.as_ref().is_none_or(|(w, _, _)| (w - hw).abs() > 1e-13 * (1.0 + hw));
        if stale {
            let mut kern = Vec::with_capacity(ng);
            for u in &gl.nodes {
                let off = 0.5 * hw * (1.0 + u);
                // d = anchor - t, e^{c(t - anchor)}
                let d = if side == Side::Right { -off } else { hw - off };
                let e = (-c * d).exp();
                kern.push([scaled_s(0, lambda, d) * e, scaled_s(1, lambda, d) * e, scaled_s(2, lambda, d) * e]);
            }
            let delta = if side == Side::Right { -hw } else { hw };
            cached = Some((hw, kern, transfer(lambda, c, delta)));
        }
        let (_, kern, tr) = cached.as_ref().expect("filled above");
        for (g, (u, w)) in gl.nodes.iter().zip(&gl.weights).enumerate() {
            let t = a + 0.5 * hw * (1.0 + u);
            let qw = 0.5 * hw * w * pot.eval(t);
            weights[i * ng + g] = kern[g].map(|k| k * qw);
        }
        transfers.push(*tr);
    }

    let cap = cfg.max_iter.unwrap_or_else(|| iteration_cap(pot, lambda));
    let scale = [1.0, lambda.norm().max(1.0), lambda.norm().max(1.0).powi(2)];
    let free = [C64::new(1.0, 0.0), c, c * c];
    let mut rho = vec![free; m];
    let mut moments = vec![[C64::new(0.0, 0.0); 3]; m];
    let mut updates = Vec::new();
    let mut converged = false;
    for _ in 0..cap {
        // Hermite data (ψ, ψ', ψ'') from the reduced derivatives
        let herm: Vec<[C64; 3]> =
            rho.iter().map(|r| [r[0], r[1] - c * r[0], r[2] - 2.0 * c * r[1] + c * c * r[0]]).collect();
        let local = |i: usize| -> [C64; 3] {
            let (ha, hb, hw) = (&herm[i], &herm[i + 1], widths[i]);
            let mut acc = [C64::new(0.0, 0.0); 3];
            for g in 0..ng {
                let b = &basis[g];
                let psi = ha[0] * b[0]
                    + ha[1] * (b[1] * hw)
                    + ha[2] * (b[2] * hw * hw)
                    + hb[0] * b[3]
                    + hb[1] * (b[4] * hw)
                    + hb[2] * (b[5] * hw * hw);
                let w = &weights[i * ng + g];
                for n in 0..3 {
                    acc[n] += w[n] * psi;
                }
            }
            acc
        };
        match side {
            Side::Right => {
                moments[m - 1] = [C64::new(0.0, 0.0); 3];
                for i in (0..m - 1).rev() {
                    let mut p = apply(&transfers[i], &moments[i + 1]);
                    let l = local(i);
                    for n in 0..3 {
                        p[n] += l[n];
                    }
                    moments[i] = p;
                }
            }
            Side::Left => {
                moments[0] = [C64::new(0.0, 0.0); 3];
                for i in 0..m - 1 {
                    let mut p = apply(&transfers[i], &moments[i]);
                    let l = local(i);
                    for n in 0..3 {
                        p[n] += l[n];
                    }
                    moments[i + 1] = p;
                }
            }
        }
        let mut upd = 0.0f64;
        for (r, p) in rho.iter_mut().zip(&moments) {
            let new = reduce(*r, *p, c, sign);
            for n in 0..3 {
                let d = new[n] - r[n];
                upd = upd.max(d.re.abs().max(d.im.abs()) / scale[n]);
            }
            *r = new;
        }
        updates.push(upd);
        if !upd.is_finite() {
            break;
        }
        if upd <= cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence { iterations: updates.len(), residual: *updates.last().unwrap_or(&f64::NAN) });
    }

    let mut frames = Vec::with_capacity(grid.len());
    for &x in grid {
        let reduced = if x <= lo || x >= hi {
            let (edge, idx) = if x <= lo { (lo, 0) } else { (hi, m - 1) };
            let outer = (side == Side::Right && x >= hi) || (side == Side::Left && x <= lo);
            if outer {
                free
            } else {
                let p = apply(&transfer(lambda, c, x - edge), &moments[idx]);
                reduce(free, p, c, sign)
            }
        } else {
            let idx = nodes.partition_point(|v| *v < x - 1e-12 * (1.0 + x.abs()));
            rho[idx.min(m - 1)]
        };
        frames.push(JostFrame { side, k, lambda, x, reduced });
    }
    Ok(JostSolution { frames, iterations: updates.len(), updates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_basis_reproduces_quintics() {
        let p = |s: f64| 1.0 - 2.0 * s + 0.5 * s.powi(3) + 3.0 * s.powi(5);
        let dp = |s: f64| -2.0 + 1.5 * s * s + 15.0 * s.powi(4);
        let d2p = |s: f64| 3.0 * s + 60.0 * s.powi(3);
        for &s in &[0.1, 0.37, 0.8] {
            let b = hermite_basis(s);
            let v = b[0] * p(0.0) + b[1] * dp(0.0) + b[2] * d2p(0.0) + b[3] * p(1.0) + b[4] * dp(1.0) + b[5] * d2p(1.0);
            assert!((v - p(s)).abs() < 1e-13);
        }
    }

    #[test]
    fn transfer_matches_free_propagation() {
        // moments of a point source at t0 propagate like the kernel itself
        let l = C64::new(0.7, 0.4);
        let c = I * l * ZETA[1];
        let (x0, t0, x1) = (0.3, 0.9, -0.4);
        let p0 = [0usize, 1, 2].map(|n| scaled_s(n, l, x0 - t0) * (c * (t0 - x0)).exp());
        let p1 = apply(&transfer(l, c, x1 - x0), &p0);
        for n in 0..3 {
            let want = scaled_s(n, l, x1 - t0) * (c * (t0 - x1)).exp();
            assert!((p1[n] - want).norm() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn kernel_branches() {
        assert_eq!(kernel(C64::new(0.0, 0.0), 1.0, 3.0), C64::new(2.0, 0.0));
        let l = C64::new(0.3, -0.2);
        let (x, t) = (0.2, 1.7);
        assert!((kernel(l * ZETA[1], x, t) - kernel(l, x, t)).norm() < 1e-15);
    }

    #[test]
    fn truncation_bound_examples() {
        let p = Potential::gaussian(0.1, 1.0, 3.0).unwrap();
        let e = truncation_bound(&p, C64::new(0.0, 1.0), 1, 1.0);
        assert!((e - std::f64::consts::E).abs() < 1e-14);
        let z = truncation_bound(&p, C64::new(0.0, 0.0), 1, 2.0);
        assert!((z - 2.0).abs() < 1e-14);
    }
}

use super::fredholm::{regularized_second_moment, Fredholm};
use super::recover::{recover_q, spacing};
use super::{
    a_hat, a_l, kernel_a, log_e, log_e_hat, InverseConfig, InverseSolution, SpectralData, I, TAIL_A, TAIL_A_HAT,
};
use crate::cubicexp::ZETA;
use crate::linalg::CMatrix;
use crate::quad::QuadratureGrid;
use crate::{Error, Result, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Row data of the bound-state system: one row per `κ_l`, then one per `κ̂_s`.
#[derive(Debug, Clone)]
pub(crate) struct Rows {
    pub kappa: Vec<f64>,
    pub hat: Vec<bool>,
    pub c: Vec<C64>,
}

impl Rows {
    pub fn new(data: &SpectralData) -> Self {
        let mut r = Rows { kappa: vec![], hat: vec![], c: vec![] };
        for (family, hat) in [(&data.bound, false), (&data.bound_hat, true)] {
            for d in family {
                r.kappa.push(d.kappa);
                r.hat.push(hat);
                r.c.push(d.c());
            }
        }
        r
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    /// `log E_r(x)`.
    pub fn log_e(&self, r: usize, x: f64) -> C64 {
        if self.hat[r] {
            log_e_hat(self.kappa[r], x)
        } else {
            log_e(self.kappa[r], x)
        }
    }

    /// Basis right-hand side `A_r(t)` of the `Δ` equation.
    pub fn a(&self, r: usize, t: f64) -> C64 {
        if self.hat[r] {
            a_hat(self.kappa[r], t)
        } else {
            a_l(self.kappa[r], t)
        }
    }

    pub fn tail(&self, r: usize) -> C64 {
        if self.hat[r] {
            TAIL_A_HAT
        } else {
            TAIL_A
        }
    }

    /// Rational part of the coupling: entry `(r, p)` multiplies `X_p` on the
    /// right of row `r`.
    pub fn rational(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |r, p| {
            let (kr, kp) = (self.kappa[r], self.kappa[p]);
            match (self.hat[r], self.hat[p]) {
                (false, false) => ZETA[2] * kernel_a(kp, ZETA[2] * kr),
                (false, true) => -ZETA[1] * kernel_a(kp, ZETA[1] * kr),
                (true, false) => ZETA[2] * kernel_a(kp, -ZETA[1] * kr),
                (true, true) => -ZETA[1] / ((kp - ZETA[1] * kr) * (kp + kr)),
            }
        })
    }

    /// Quadrature weights of the `Δ` functional of row `r`:
    /// `-(1/2πi)∫Δ/(τ + iζ₂κ_l)` or `-(1/2πi)∫Δ/(τ - iζ₁κ̂_s)`.
    pub fn delta_weights(&self, grid: &QuadratureGrid, r: usize) -> Vec<C64> {
        let pole = if self.hat[r] { I * ZETA[1] * self.kappa[r] } else { -I * ZETA[2] * self.kappa[r] };
        grid.nodes.iter().zip(&grid.weights).map(|(t, w)| -*w / (2.0 * PI * I * (*t - pole))).collect()
    }

    /// Solves the per-x system `diag(c_r E_r) X - C X = rhs`. Columns are
    /// rescaled by `max(1, |E_r|)` so that growing exponentials never overflow.
    /// Returns `X` and a 1-norm condition estimate of the scaled matrix.
    pub fn solve(&self, x: f64, coupling: &CMatrix, rhs: &[CMatrix]) -> Result<(Vec<CMatrix>, f64)> {
        let n = self.len();
        let mut diag = vec![ZERO; n];
        let mut dinv = vec![C64::new(1.0, 0.0); n];
        for r in 0..n {
            let le = self.log_e(r, x);
            if le.re > 0.0 {
                dinv[r] = (-le).exp();
                diag[r] = self.c[r];
            } else {
                diag[r] = self.c[r] * le.exp();
            }
        }
        let s = CMatrix::from_fn(n, n, |r, p| {
            let d = if r == p { diag[r] } else { ZERO };
            d - coupling[(r, p)] * dinv[p]
        });
        let lu = s.clone().lu();
        let inv = lu
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
            .ok_or_else(|| Error::Singular(format!("bound-state system is singular at x = {x}")))?;
        let cond = norm1(&s) * norm1(&inv);
        let out = rhs
            .iter()
            .map(|b| {
                let mut y = &inv * b;
                for r in 0..n {
                    for k in 0..y.ncols() {
                        y[(r, k)] *= dinv[r];
                    }
                }
                y
            })
            .collect();
        Ok((out, cond))
    }
}

pub(crate) fn norm1(a: &CMatrix) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Values at one `x`: unknowns `X`, `F(x)` and the system condition estimate.
pub(crate) type PointValues = (Vec<C64>, C64, f64);

/// Evaluates `eval` on the requested grid padded by two points on each side,
/// extends the padding to the right until `|F| < decay_tol` when `extend`
/// is set, and differentiates.
pub(crate) fn reconstruct(
    x: &[f64],
    m: usize,
    cfg: &InverseConfig,
    extend: bool,
    eval: impl Fn(f64) -> Result<PointValues> + Sync,
) -> Result<(InverseSolution, Vec<C64>)> {
    let h = spacing(x)?;
    let n = x.len();
    let at = |i: usize| x[0] + (i as f64 - 2.0) * h;
    let run =
        |lo: usize, hi: usize| -> Result<Vec<PointValues>> { (lo..hi).into_par_iter().map(|i| eval(at(i))).collect() };
    let mut vals = run(0, n + 4)?;
    if extend {
        let limit = ((cfg.max_extension / h).ceil() as usize).max(1);
        let mut added = 0;
        while !(vals.last().expect("nonempty").1.norm() < cfg.decay_tol) {
            if added >= limit {
                return Err(Error::DomainTooSmall(format!(
                    "|F| did not fall below {:.1e} within {} of the right edge",
                    cfg.decay_tol, cfg.max_extension
                )));
            }
            let chunk = (vals.len() / 2).max(64).min(limit - added);
            let len = vals.len();
            vals.extend(run(len, len + chunk)?);
            added += chunk;
        }
    }
    let xs: Vec<f64> = (0..vals.len()).map(at).collect();
    let f: Vec<C64> = vals.iter().map(|v| v.1).collect();
    let rec = recover_q(&xs, &f, if extend { Some(cfg.decay_tol) } else { None })?;
    let mut sol = InverseSolution::empty(x);
    for i in 0..n {
        let (xv, fv, _) = &vals[i + 2];
        sol.kr[i] = xv[..m].to_vec();
        sol.kr_hat[i] = xv[m..].to_vec();
        sol.f[i] = *fv;
        sol.q[i] = rec.q[i + 2];
    }
    sol.max_im_q = sol.q.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    sol.max_system_condition = vals.iter().map(|v| v.2).fold(0.0, f64::max);
    sol.right_edge_f = f[f.len() - 1].norm();
    Ok((sol, f))
}

/// Coefficient of `X_r` in `F`: `3i(-ζ₁ - J_l/2πi)` or `3i(ζ₂ - Ĵ_s/2πi)` with
/// `J` the regularised second moment of `(I - M)^{-1}A_r`.
pub(crate) fn amplitude(rows: &Rows, r: usize) -> C64 {
    let pole = if rows.hat[r] { ZETA[2] } else { -ZETA[1] };
    3.0 * I * (pole - regularized_second_moment(rows.tail(r)) / (2.0 * PI * I))
}

/// The reflectionless system with its x-independent pieces precomputed.
#[derive(Debug)]
pub struct ReflectionlessSystem {
    rows: Rows,
    fredholm: Fredholm,
    basis: Vec<Vec<C64>>,
    coupling: CMatrix,
    amplitude: Vec<C64>,
}

impl ReflectionlessSystem {
    pub fn new(data: &SpectralData, cfg: &InverseConfig) -> Result<Self> {
        data.validate()?;
        if !data.is_reflectionless() {
            return Err(Error::Validation("reflection coefficients present; data are not reflectionless".into()));
        }
        let fredholm = Fredholm::new(cfg.grid(data)?, cfg.cond_limit)?;
        let rows = Rows::new(data);
        let n = rows.len();
        let grid = fredholm.grid();
        let basis: Vec<Vec<C64>> =
            (0..n).map(|r| fredholm.solve(&grid.nodes.iter().map(|t| rows.a(r, *t)).collect::<Vec<_>>())).collect();
        let mut coupling = rows.rational();
        for r in 0..n {
            let w = rows.delta_weights(grid, r);
            for p in 0..n {
                coupling[(r, p)] += w.iter().zip(&basis[p]).map(|(a, b)| a * b).sum::<C64>();
            }
        }
        let amplitude = (0..n).map(|r| amplitude(&rows, r)).collect();
        Ok(ReflectionlessSystem { rows, fredholm, basis, coupling, amplitude })
    }

    /// The x-independent Fredholm solutions `(I - M)^{-1}A_r` on the grid.
    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn fredholm(&self) -> &Fredholm {
        &self.fredholm
    }

    /// Coupling matrix of the bound-state system (x-independent).
    pub fn coupling(&self) -> &CMatrix {
        &self.coupling
    }

    /// Coefficients of `κ_l R_l`, `κ̂_s R̂_s` in `F`.
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitude
    }

    /// `(κ_l R_l(x), κ̂_s R̂_s(x))` stacked, `F(x)` and the condition estimate.
    pub fn at(&self, x: f64) -> Result<PointValues> {
        let n = self.rows.len();
        let ones = CMatrix::from_element(n, 1, C64::new(1.0, 0.0));
        let (sol, cond) = self.rows.solve(x, &self.coupling, &[ones])?;
        let xv = sol[0].as_slice().to_vec();
        let f = xv.iter().zip(&self.amplitude).map(|(a, b)| a * b).sum();
        Ok((xv, f, cond))
    }
}

/// Reconstructs `q` from reflectionless data on a uniform x-grid.
pub fn solve_reflectionless(data: &SpectralData, x: &[f64], cfg: &InverseConfig) -> Result<InverseSolution> {
    data.validate()?;
    if !data.is_reflectionless() {
        return Err(Error::Validation("reflection coefficients present; data are not reflectionless".into()));
    }
    if data.m() + data.m_hat() == 0 {
        spacing(x)?;
        return Ok(InverseSolution::empty(x));
    }
    let sys = ReflectionlessSystem::new(data, cfg)?;
    let (mut sol, _) = reconstruct(x, data.m(), cfg, true, |xv| sys.at(xv))?;
    sol.m_norm = sys.fredholm.norm_estimate();
    sol.condition = sys.fredholm.condition();
    Ok(sol)
}

/// One bound state on `κζ₂`: `F = a/(c₁E + c)`, `q = a c₁ iκ(ζ₂-1)E/(c₁E + c)²`
/// with `E = e^{iκ(ζ₂-1)x}`, `c₁ = b/κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Soliton {
    pub kappa: f64,
    pub b: C64,
    /// `a(κ)`.
    pub a: C64,
    /// `c(κ)`.
    pub c: C64,
}

/// Relative size of the denominator treated as a pole.
const POLE_TOL: f64 = 1e-13;

impl Soliton {
    /// `(den/d, 1/d)` with `d = E` when `|E| > 1` and `d = 1` otherwise.
    fn parts(&self, x: f64) -> Result<(C64, C64)> {
        let le = log_e(self.kappa, x);
        let c1 = self.b / self.kappa;
        let (den, scale) = if le.re > 0.0 {
            let inv = (-le).exp();
            (c1 + self.c * inv, inv)
        } else {
            (c1 * le.exp() + self.c, C64::new(1.0, 0.0))
        };
        let size =
            if le.re > 0.0 { c1.norm() + (self.c * scale).norm() } else { (c1 * le.exp()).norm() + self.c.norm() };
        if !(den.norm() > POLE_TOL * size) {
            return Err(Error::Degenerate(format!("closed-form denominator vanishes at x = {x}")));
        }
        Ok((den, scale))
    }

    /// `F(x) = ∫_x^∞ q`.
    pub fn f(&self, x: f64) -> Result<C64> {
        let (den, scale) = self.parts(x)?;
        Ok(self.a * scale / den)
    }

    pub fn q(&self, x: f64) -> Result<C64> {
        let le = log_e(self.kappa, x);
        let (den, scale) = self.parts(x)?;
        let c1 = self.b / self.kappa;
        let e_over = if le.re > 0.0 { C64::new(1.0, 0.0) } else { le.exp() };
        // E/den² = (E/d)·(1/d)/(den/d)² with d = E or 1
        Ok(self.a * c1 * I * self.kappa * (ZETA[2] - 1.0) * e_over * scale / (den * den))
    }

    /// Decay rate `κ√3/2` of `|q|` as `x → ±∞`.
    pub fn decay_rate(&self) -> f64 {
        (I * self.kappa * (ZETA[2] - 1.0)).re.abs()
    }
}

/// Closed-form one-bound-state potential with `a(κ)`, `c(κ)` computed from the
/// same Fredholm solution `(I - M)^{-1}A₁` as the numerical pipeline.
pub fn closed_form_soliton(kappa: f64, b1: C64, cfg: &InverseConfig) -> Result<Soliton> {
    let data = SpectralData::reflectionless(vec![super::BoundDatum::new(kappa, b1)], vec![])?;
    let fredholm = Fredholm::new(cfg.grid(&data)?, cfg.cond_limit)?;
    let rows = Rows::new(&data);
    let grid = fredholm.grid();
    let g = fredholm.solve(&grid.nodes.iter().map(|t| a_l(kappa, *t)).collect::<Vec<_>>());
    let integral: C64 =
        grid.nodes.iter().zip(&grid.weights).zip(&g).map(|((t, w), v)| v * *w / (*t + I * ZETA[2] * kappa)).sum();
    let rational = ZETA[2] / (2.0 * (1.0 - ZETA[2]) * kappa * kappa);
    let c = -(rational - integral / (2.0 * PI * I));
    Ok(Soliton { kappa, b: b1, a: amplitude(&rows, 0), c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invscatter::{uniform_grid, BoundDatum};

    fn one(kappa: f64, b: C64) -> SpectralData {
        SpectralData::reflectionless(vec![BoundDatum::new(kappa, b)], vec![]).unwrap()
    }

    #[test]
    fn amplitudes_reduce_to_rotated_constants() {
        let rows = Rows::new(
            &SpectralData::reflectionless(
                vec![BoundDatum::new(1.0, C64::new(1.0, 0.0))],
                vec![BoundDatum::new(2.0, C64::new(1.0, 0.0))],
            )
            .unwrap(),
        );
        assert!((amplitude(&rows, 0) + 6.0 * I * ZETA[1]).norm() < 1e-14);
        assert!((amplitude(&rows, 1) - 6.0 * I * ZETA[2]).norm() < 1e-14);
    }

    #[test]
    fn rational_diagonal_matches_closed_form() {
        let rows = Rows::new(&one(1.7, C64::new(1.0, 0.0)));
        let expect = ZETA[2] / (2.0 * (1.0 - ZETA[2]) * 1.7 * 1.7);
        assert!((rows.rational()[(0, 0)] - expect).norm() < 1e-15);
    }

    #[test]
    fn closed_form_matches_system_pointwise() {
        let cfg = InverseConfig::default();
        let d = one(1.0, C64::new(1.0, 0.0));
        let sys = ReflectionlessSystem::new(&d, &cfg).unwrap();
        let sol = closed_form_soliton(1.0, C64::new(1.0, 0.0), &cfg).unwrap();
        assert!((sys.coupling()[(0, 0)] + sol.c).norm() < 1e-14);
        for x in [-30.0, -2.0, 0.0, 1.5, 40.0, 400.0] {
            let (_, f, _) = sys.at(x).unwrap();
            let fc = sol.f(x).unwrap();
            assert!((f - fc).norm() <= 1e-13 * fc.norm().max(1e-300), "x={x}: {f} vs {fc}");
        }
    }

    #[test]
    fn x_independent_pieces_are_reused() {
        let cfg = InverseConfig::default();
        let d = SpectralData::reflectionless(
            vec![BoundDatum::new(1.0, C64::new(1.0, 0.5))],
            vec![BoundDatum::new(0.7, C64::new(2.0, 0.0))],
        )
        .unwrap();
        let sys = ReflectionlessSystem::new(&d, &cfg).unwrap();
        let basis = sys.basis().to_vec();
        let c = sys.coupling().clone();
        sys.at(-1.0).unwrap();
        sys.at(3.0).unwrap();
        assert_eq!(sys.basis(), &basis[..]);
        assert_eq!(sys.coupling(), &c);
        // direct re-assembly at a different x agrees with the cached system
        let again = ReflectionlessSystem::new(&d, &cfg).unwrap();
        for x in [-1.0, 3.0] {
            let (a, _, _) = sys.at(x).unwrap();
            let (b, _, _) = again.at(x).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn empty_data_give_zero() {
        let x = uniform_grid(-1.0, 1.0, 0.1).unwrap();
        let s = solve_reflectionless(&SpectralData::default(), &x, &InverseConfig::default()).unwrap();
        assert!(s.q.iter().chain(&s.f).all(|v| *v == ZERO));
    }
}

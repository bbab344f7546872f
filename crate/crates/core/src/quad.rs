//! Quadrature rules: Gauss–Legendre nodes, the rational map of `(-1, 1)` onto
//! `(0, ∞)`, and an adaptive Gauss–Kronrod integrator.

use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `P_n'(x_j)` at each node (used for spectral differentiation).
    pub dp: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes in ascending order.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut dp = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut d = 0.0;
            for _ in 0..100 {
                let (p, pd) = legendre(n, x);
                d = pd;
                let dx = p / pd;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, pd) = legendre(n, x);
            d = if pd != 0.0 { pd } else { d };
            let w = 2.0 / ((1.0 - x * x) * d * d);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
            dp[n - 1 - i] = d;
            dp[i] = if n.is_multiple_of(2) { -d } else { d };
        }
        GaussLegendre { nodes, weights, dp }
    }

    /// `∫_a^b f`.
    pub fn integrate<T>(&self, a: f64, b: f64, f: impl Fn(f64) -> T) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s = s + f(c + h * x) * (w * h);
        }
        s
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `(0, ∞)` by `τ = L((1+u)/(1-u))^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub scale: f64,
    /// Grading exponent `p`.
    pub power: f64,
    /// Reference Gauss–Legendre nodes `u_j`.
    pub u: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Legendre differentiation matrix on the reference nodes, row-major.
    dmat: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(n: usize, scale: f64) -> Self {
        Self::graded(n, scale, 1.0)
    }

    /// Grid with grading exponent `p ≥ 1`; larger `p` clusters nodes towards
    /// both ends of `(0, ∞)`.
    pub fn graded(n: usize, scale: f64, power: f64) -> Self {
        let gl = GaussLegendre::new(n);
        let nodes = gl.nodes.iter().map(|u| scale * ((1.0 + u) / (1.0 - u)).powf(power)).collect();
        let weights = gl.nodes.iter().zip(&gl.weights).map(|(u, w)| w * Self::jacobian(scale, power, *u)).collect();
        let mut dmat = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dmat[i * n + j] = if i == j {
                    gl.nodes[i] / (1.0 - gl.nodes[i] * gl.nodes[i])
                } else {
                    gl.dp[i] / (gl.dp[j] * (gl.nodes[i] - gl.nodes[j]))
                };
            }
        }
        QuadratureGrid { scale, power, u: gl.nodes, nodes, weights, dmat }
    }

    /// `dτ/du`.
    fn jacobian(scale: f64, power: f64, u: f64) -> f64 {
        let s = (1.0 + u) / (1.0 - u);
        scale * power * s.powf(power - 1.0) * 2.0 / ((1.0 - u) * (1.0 - u))
    }

    /// `dτ/du` at reference node `j`.
    pub fn jacobian_at(&self, j: usize) -> f64 {
        Self::jacobian(self.scale, self.power, self.u[j])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> C64) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| f(*t) * *w).sum()
    }

    /// Entry `(i, j)` of the spectral differentiation matrix in the reference
    /// variable `u`.
    pub fn diff(&self, i: usize, j: usize) -> f64 {
        self.dmat[i * self.len() + j]
    }

    /// Maps `τ > 0` to the reference variable `u`.
    pub fn to_reference(&self, tau: f64) -> f64 {
        let s = (tau / self.scale).powf(1.0 / self.power);
        (s - 1.0) / (s + 1.0)
    }

    /// Barycentric weights for Lagrange interpolation in `u` on the nodes.
    pub fn barycentric_weights(&self) -> Vec<f64> {
        let n = self.len();
        // for Gauss–Legendre nodes w_j ∝ (-1)^j sqrt((1-u_j²) ω_j)
        let gl = GaussLegendre::new(n);
        (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * ((1.0 - gl.nodes[j] * gl.nodes[j]) * gl.weights[j]).sqrt()
            })
            .collect()
    }

    /// Polynomial (in `u`) interpolant of nodal values `f` evaluated at `τ`.
    pub fn interpolate(&self, f: &[C64], bary: &[f64], tau: f64) -> C64 {
        let x = self.to_reference(tau);
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..self.len() {
            let d = x - self.u[j];
            if d == 0.0 {
                return f[j];
            }
            let c = bary[j] / d;
            num += f[j] * c;
            den += c;
        }
        num / den
    }
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let (f1, f2) = (f(c - h * GK_X[i]), f(c + h * GK_X[i]));
        k += (f1 + f2) * GK_WK[i];
        if i % 2 == 1 {
            g += (f1 + f2) * GK_WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss–Kronrod (7/15) integration of a complex integrand on a
/// finite interval. Fails when the requested tolerance is not met within the
/// subdivision budget.
pub fn integrate_adaptive(f: impl Fn(f64) -> C64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut intervals = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..5000 {
        let total: C64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        let (idx, _) = intervals.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let err: f64 = intervals.iter().map(|iv| iv.3).sum();
    Err(Error::Integration(format!("adaptive quadrature on [{a}, {b}] stalled with error estimate {err:.3e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_exactness() {
        let gl = GaussLegendre::new(7);
        for d in 0..14 {
            let got = gl.integrate(-1.0, 1.0, |x| x.powi(d));
            let want = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "degree {d}");
        }
        let wsum: f64 = GaussLegendre::new(200).weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-13);
    }

    #[test]
    fn mapped_grid_reproduces_arctan_integral() {
        let g = QuadratureGrid::new(200, 5.0);
        assert!(g.weights.iter().all(|w| *w > 0.0));
        let v = g.integrate(|t| C64::new(1.0 / (1.0 + t * t), 0.0));
        assert!((v.re - PI / 2.0).abs() < 1e-10, "{}", v.re - PI / 2.0);
    }

    #[test]
    fn differentiation_matrix_is_exact_on_polynomials() {
        let g = QuadratureGrid::new(12, 1.0);
        let n = g.len();
        for i in 0..n {
            let d: f64 = (0..n).map(|j| g.diff(i, j) * g.u[j].powi(5)).sum();
            assert!((d - 5.0 * g.u[i].powi(4)).abs() < 1e-11);
        }
    }

    #[test]
    fn interpolation_reproduces_nodes_and_smooth_functions() {
        let g = QuadratureGrid::new(40, 2.0);
        let bary = g.barycentric_weights();
        let f: Vec<C64> = g.nodes.iter().map(|t| C64::new(1.0 / (1.0 + t), 0.0)).collect();
        for &t in &[0.05, 0.7, 3.0, 50.0] {
            let v = g.interpolate(&f, &bary, t);
            assert!((v.re - 1.0 / (1.0 + t)).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn adaptive_gauss_kronrod() {
        let v = integrate_adaptive(|x| C64::new(x.sqrt(), 0.0), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-12);
        let v = integrate_adaptive(|x| C64::new(0.0, 1.0) * (3.0 * x).cos(), 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((v.im - (6.0f64).sin() / 3.0).abs() < 1e-13);
    }
}

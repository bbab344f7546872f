//! Reconstruction of the potential from spectral data: the reflectionless
//! system, the one-sided case `sc₂ ≡ 0`, the one-soliton closed form and the
//! recovery `q = -F'`.
//!
//! All Fredholm operators act on functions of `t ∈ (0, ∞)` sampled on a
//! mapped Gauss–Legendre grid.

mod fredholm;
mod recover;
mod reflectionless;
mod sc2zero;

pub use fredholm::{
    apply_m, m_matrix, mellin_symbol, regularized_second_moment, solve_fredholm, Fredholm, FredholmSolution,
};
pub use recover::{recover_q, uniform_grid, Recovered};
pub use reflectionless::{closed_form_soliton, solve_reflectionless, ReflectionlessSystem, Soliton};
pub use sc2zero::{apply_transfer, solve_sc2zero, transfer_matrix, Sc2ZeroSystem};

use crate::cubicexp::ZETA;
use crate::quad::QuadratureGrid;
use crate::{Error, Result, C64};

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// `a(t, λ) = 1/((t - λ)(t + ζ₁λ))`.
pub fn kernel_a(t: f64, lambda: C64) -> C64 {
    1.0 / ((t - lambda) * (t + ZETA[1] * lambda))
}

/// `b(t, λ) = 1/((t + λ)(t + ζ₁λ))`.
pub fn kernel_b(t: f64, lambda: C64) -> C64 {
    1.0 / ((t + lambda) * (t + ZETA[1] * lambda))
}

/// One bound-state datum `(κ, b)`; `c = b/κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundDatum {
    pub kappa: f64,
    pub b: C64,
}

impl BoundDatum {
    pub fn new(kappa: f64, b: C64) -> Self {
        BoundDatum { kappa, b }
    }

    pub fn c(&self) -> C64 {
        self.b / self.kappa
    }
}

/// A coefficient sampled along its ray at parameters `t_0 < t_1 < … `,
/// linearly interpolated in between and zero past the last sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySamples {
    t: Vec<f64>,
    values: Vec<C64>,
}

/// Relative size of the last sample below which a sampled coefficient counts
/// as decayed.
pub const DECAY_FRACTION: f64 = 1e-6;

impl RaySamples {
    pub fn new(t: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if t.len() != values.len() || t.len() < 2 {
            return Err(Error::Validation("ray samples need >= 2 points and matching lengths".into()));
        }
        if !(t[0] >= 0.0) || t.windows(2).any(|w| !(w[1] > w[0])) || !t.iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("ray sample parameters must be finite, >= 0 and increasing".into()));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Validation("ray sample values must be finite".into()));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let last = values.last().map_or(0.0, |v| v.norm());
        if last > DECAY_FRACTION * peak {
            return Err(Error::Validation(format!(
                "sampled coefficient does not decay: last |value| = {last:.3e}, peak {peak:.3e}"
            )));
        }
        Ok(RaySamples { t, values })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Last sample parameter; the coefficient vanishes beyond it.
    pub fn support(&self) -> f64 {
        *self.t.last().expect("nonempty samples")
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    /// Linear interpolation; constant below the first sample, zero past the last.
    pub fn eval(&self, tau: f64) -> C64 {
        let t = &self.t;
        if tau <= t[0] {
            return self.values[0];
        }
        if tau >= self.support() {
            return C64::new(0.0, 0.0);
        }
        let k = t.partition_point(|v| *v <= tau);
        let (t0, t1) = (t[k - 1], t[k]);
        let s = (tau - t0) / (t1 - t0);
        self.values[k - 1] * (1.0 - s) + self.values[k] * s
    }

    /// Scales all values by `factor`.
    pub fn scaled(&self, factor: C64) -> RaySamples {
        RaySamples { t: self.t.clone(), values: self.values.iter().map(|v| v * factor).collect() }
    }
}

/// Spectral data: the ray coefficients `sc₁` (on `iζ₁t`) and `sc₂`
/// (on `iζ₂t`) and the two bound-state families `{κ_l, b_l}`, `{κ̂_s, b̂_s}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralData {
    pub sc1: Option<RaySamples>,
    pub sc2: Option<RaySamples>,
    pub bound: Vec<BoundDatum>,
    pub bound_hat: Vec<BoundDatum>,
}

fn check_family(name: &str, family: &[BoundDatum]) -> Result<()> {
    for d in family {
        if !(d.kappa > 0.0 && d.kappa.is_finite()) {
            return Err(Error::Validation(format!("{name}: kappa must be positive and finite, got {}", d.kappa)));
        }
        if !(d.b.re.is_finite() && d.b.im.is_finite()) {
            return Err(Error::Validation(format!("{name}: norming constant must be finite")));
        }
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if (a.kappa - b.kappa).abs() <= 1e-12 * a.kappa.max(b.kappa) {
                return Err(Error::Validation(format!("{name}: repeated kappa {}", a.kappa)));
            }
        }
    }
    Ok(())
}

impl SpectralData {
    pub fn new(
        sc1: Option<RaySamples>,
        sc2: Option<RaySamples>,
        bound: Vec<BoundDatum>,
        bound_hat: Vec<BoundDatum>,
    ) -> Result<Self> {
        let d = SpectralData { sc1, sc2, bound, bound_hat };
        d.validate()?;
        Ok(d)
    }

    pub fn reflectionless(bound: Vec<BoundDatum>, bound_hat: Vec<BoundDatum>) -> Result<Self> {
        Self::new(None, None, bound, bound_hat)
    }

    pub fn validate(&self) -> Result<()> {
        check_family("bound", &self.bound)?;
        check_family("bound_hat", &self.bound_hat)
    }

    pub fn m(&self) -> usize {
        self.bound.len()
    }

    pub fn m_hat(&self) -> usize {
        self.bound_hat.len()
    }

    fn zero_or_absent(s: &Option<RaySamples>) -> bool {
        s.as_ref().is_none_or(RaySamples::is_zero)
    }

    /// `sc₁ ≡ 0` and `sc₂ ≡ 0`.
    pub fn is_reflectionless(&self) -> bool {
        Self::zero_or_absent(&self.sc1) && Self::zero_or_absent(&self.sc2)
    }

    pub fn sc2_vanishes(&self) -> bool {
        Self::zero_or_absent(&self.sc2)
    }

    pub fn kappa_max(&self) -> f64 {
        self.bound.iter().chain(&self.bound_hat).map(|d| d.kappa).fold(0.0, f64::max)
    }
}

/// `A_l(t) = ζ₂a(t, iζ₁κ_l) - a(t, iκ_l)` and `Â_s(t) = ζ₁a(t, iζ₁κ̂_s) - a(t, iζ₂κ̂_s)`.
pub fn build_a(data: &SpectralData, t: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Range(format!("t must be positive, got {t}")));
    }
    Ok((
        data.bound.iter().map(|d| a_l(d.kappa, t)).collect(),
        data.bound_hat.iter().map(|d| a_hat(d.kappa, t)).collect(),
    ))
}

pub(crate) fn a_l(kappa: f64, t: f64) -> C64 {
    ZETA[2] * kernel_a(t, I * ZETA[1] * kappa) - kernel_a(t, I * kappa)
}

pub(crate) fn a_hat(kappa: f64, t: f64) -> C64 {
    ZETA[1] * kernel_a(t, I * ZETA[1] * kappa) - kernel_a(t, I * ZETA[2] * kappa)
}

/// Limits `t²A_l(t) → ζ₂ - 1` and `t²Â_s(t) → ζ₁ - 1`.
pub(crate) const TAIL_A: C64 = C64::new(-1.5, -0.866_025_403_784_438_6);
pub(crate) const TAIL_A_HAT: C64 = C64::new(-1.5, 0.866_025_403_784_438_6);

/// Discretisation and acceptance settings for the inverse solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseConfig {
    /// Nodes of the mapped Gauss–Legendre grid on `(0, ∞)`.
    pub nodes: usize,
    /// Map scale `L`; defaults to `5·max(1, max κ)`.
    pub scale: Option<f64>,
    /// Grading exponent `p` of the map `τ = L((1+u)/(1-u))^p`.
    pub grading: f64,
    /// Largest admissible condition number of the Fredholm matrix.
    pub cond_limit: f64,
    /// `|F|` at the right edge of the working grid must fall below this.
    pub decay_tol: f64,
    /// Largest distance the working grid may be extended to the right.
    pub max_extension: f64,
}

impl Default for InverseConfig {
    fn default() -> Self {
        InverseConfig {
            nodes: 200,
            scale: None,
            grading: 2.0,
            cond_limit: 1e12,
            decay_tol: 1e-10,
            max_extension: 1000.0,
        }
    }
}

impl InverseConfig {
    pub fn grid(&self, data: &SpectralData) -> Result<QuadratureGrid> {
        if self.nodes < 4 {
            return Err(Error::Validation("the quadrature grid needs >= 4 nodes".into()));
        }
        let scale = self.scale.unwrap_or(5.0 * data.kappa_max().max(1.0));
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Validation(format!("grid scale must be positive, got {scale}")));
        }
        if !(self.grading >= 1.0 && self.grading.is_finite()) {
            return Err(Error::Validation(format!("grading exponent must be >= 1, got {}", self.grading)));
        }
        Ok(QuadratureGrid::graded(self.nodes, scale, self.grading))
    }
}

/// Reconstruction on an x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSolution {
    pub x: Vec<f64>,
    /// `κ_l R_l(x)` per grid point.
    pub kr: Vec<Vec<C64>>,
    /// `κ̂_s R̂_s(x)` per grid point.
    pub kr_hat: Vec<Vec<C64>>,
    /// `F(x) = ∫_x^∞ q`.
    pub f: Vec<C64>,
    pub q: Vec<C64>,
    pub max_im_q: f64,
    /// Power-iteration estimate of `‖M‖` on the grid.
    pub m_norm: f64,
    /// Condition number of the Fredholm matrix `I - M`.
    pub condition: f64,
    /// Largest 1-norm condition estimate of the per-x systems.
    pub max_system_condition: f64,
    /// `|F|` at the right edge of the working grid.
    pub right_edge_f: f64,
}

impl InverseSolution {
    pub(crate) fn empty(x: &[f64]) -> Self {
        let n = x.len();
        InverseSolution {
            x: x.to_vec(),
            kr: vec![vec![]; n],
            kr_hat: vec![vec![]; n],
            f: vec![C64::new(0.0, 0.0); n],
            q: vec![C64::new(0.0, 0.0); n],
            max_im_q: 0.0,
            m_norm: 0.0,
            condition: 1.0,
            max_system_condition: 1.0,
            right_edge_f: 0.0,
        }
    }
}

/// `E_l(x) = e^{iκ(ζ₂-1)x}` as a logarithm.
pub(crate) fn log_e(kappa: f64, x: f64) -> C64 {
    I * kappa * (ZETA[2] - 1.0) * x
}

/// `Ê_s(x) = e^{-iκ̂(ζ₁-1)x}` as a logarithm.
pub(crate) fn log_e_hat(kappa: f64, x: f64) -> C64 {
    -I * kappa * (ZETA[1] - 1.0) * x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernels_at_zero_spectral_parameter() {
        for t in [0.3, 1.0, 7.0] {
            let z = C64::new(0.0, 0.0);
            assert_relative_eq!((kernel_a(t, z) - 1.0 / (t * t)).norm(), 0.0, epsilon = 1e-15);
            assert_relative_eq!((kernel_b(t, z) - 1.0 / (t * t)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn a_one_at_unit_arguments() {
        let d = SpectralData::reflectionless(vec![BoundDatum::new(1.0, C64::new(1.0, 0.0))], vec![]).unwrap();
        let (a, ah) = build_a(&d, 1.0).unwrap();
        assert!(ah.is_empty());
        let expect = ZETA[2] / ((1.0 - I * ZETA[1]) * (1.0 + I * ZETA[2])) - 1.0 / ((1.0 - I) * (1.0 + I * ZETA[1]));
        assert!((a[0] - expect).norm() < 1e-15);
        // partial fractions of 1/((t-p)(t-r)) = (1/(t-p) - 1/(t-r))/(p-r)
        let pf = |p: C64, r: C64| (1.0 / (1.0 - p) - 1.0 / (1.0 - r)) / (p - r);
        let oracle = ZETA[2] * pf(I * ZETA[1], -I * ZETA[2]) - pf(I, -I * ZETA[1]);
        assert!((a[0] - oracle).norm() < 1e-14);
        assert!(build_a(&SpectralData::default(), 1.0).unwrap().0.is_empty());
        assert!(matches!(build_a(&d, 0.0), Err(Error::Range(_))));
    }

    #[test]
    fn a_tails_decay_as_inverse_square() {
        for k in [0.5, 2.0] {
            for t in [1e4, 1e5] {
                assert!((t * t * a_l(k, t) - TAIL_A).norm() < 20.0 * k / t);
                assert!((t * t * a_hat(k, t) - TAIL_A_HAT).norm() < 20.0 * k / t);
            }
        }
        assert!((TAIL_A - (ZETA[2] - 1.0)).norm() < 1e-16);
        assert!((TAIL_A_HAT - (ZETA[1] - 1.0)).norm() < 1e-16);
    }

    #[test]
    fn kernel_b_regular_on_positive_axis() {
        let g = QuadratureGrid::new(60, 5.0);
        let mut worst = f64::INFINITY;
        for &t in &g.nodes {
            for &tau in &g.nodes {
                let l = -ZETA[1] * t;
                let den = ((tau + l) * (tau + ZETA[1] * l)).norm() / (tau * tau + t * t);
                worst = worst.min(den);
            }
        }
        // |τ² + τt + t²| ≥ (τ² + t²)/2
        assert!(worst >= 0.5 - 1e-12);
    }

    #[test]
    fn samples_validate_and_interpolate() {
        let s = RaySamples::new(vec![0.0, 1.0, 2.0], vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(0.0, 0.0)])
            .unwrap();
        assert_eq!(s.eval(0.5), C64::new(0.5, 1.0));
        assert_eq!(s.eval(3.0), C64::new(0.0, 0.0));
        assert!(RaySamples::new(vec![0.0, 1.0], vec![C64::new(1.0, 0.0); 2]).is_err());
        assert!(RaySamples::new(vec![1.0, 0.5], vec![C64::new(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn spectral_data_checks() {
        let b = C64::new(1.0, 0.0);
        assert!(SpectralData::reflectionless(vec![BoundDatum::new(1.0, b), BoundDatum::new(1.0, b)], vec![]).is_err());
        assert!(SpectralData::reflectionless(vec![BoundDatum::new(-1.0, b)], vec![]).is_err());
        let d = SpectralData::reflectionless(vec![BoundDatum::new(1.0, b)], vec![BoundDatum::new(1.0, b)]).unwrap();
        assert!(d.is_reflectionless());
        assert_eq!((d.m(), d.m_hat()), (1, 1));
    }
}

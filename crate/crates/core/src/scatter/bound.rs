use super::{t00, transition_row0};
use crate::cubicexp::ZETA;
use crate::jost::Potential;
use crate::{Error, Result, C64};
use rayon::prelude::*;

/// The two rays carrying zeros of `t₀₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RayKind {
    /// `z = κζ₂` (`z³ = κ³ > 0`).
    Positive,
    /// `z = -κ̂ζ₁` (`z³ = -κ̂³ < 0`).
    Negative,
}

impl RayKind {
    pub fn direction(self) -> C64 {
        match self {
            RayKind::Positive => ZETA[2],
            RayKind::Negative => -ZETA[1],
        }
    }

    pub fn point(self, kappa: f64) -> C64 {
        self.direction() * kappa
    }

    pub fn name(self) -> &'static str {
        match self {
            RayKind::Positive => "l_zeta2",
            RayKind::Negative => "lhat_zeta1",
        }
    }
}

/// Search settings.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateConfig {
    /// Log-spaced scan points per ray.
    pub points: usize,
    /// Lower end of the scan as a fraction of the upper end.
    pub min_fraction: f64,
    /// Upper end of the scan; defaults to `a/3`.
    pub kappa_max: Option<f64>,
    /// Sampled local minima of `|t₀₀|` below this are refined.
    pub bracket_threshold: f64,
    /// A refined minimum counts as a zero when `|t₀₀|` is below this.
    pub zero_tol: f64,
    /// Zeros with `|t₀₀'|` below this are flagged as possibly multiple.
    pub simplicity_floor: f64,
    /// Relative finite-difference step for `t₀₀'`.
    pub fd_step: f64,
}

impl Default for BoundStateConfig {
    fn default() -> Self {
        BoundStateConfig {
            points: 400,
            min_fraction: 1e-3,
            kappa_max: None,
            bracket_threshold: 0.5,
            zero_tol: 1e-10,
            simplicity_floor: 1e-6,
            fd_step: 1e-5,
        }
    }
}

/// A zero of `t₀₀` on one of the rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub ray: RayKind,
    pub kappa: f64,
    pub z: C64,
    /// `z³` (real up to rounding).
    pub eigenvalue: C64,
    pub t00_abs: f64,
    /// Complex derivative `t₀₀'(z)`.
    pub t00_prime: C64,
    pub t01: C64,
    pub t02: C64,
    /// `b = -ζ₁ t₀₀'/t₀₁` on the positive ray, `b̂ = -ζ₂ t₀₀'/t₀₂` on the
    /// negative ray; `None` when the denominator vanishes numerically.
    pub norming: Option<C64>,
    /// `|t₀₀'|` fell below the simplicity floor.
    pub multiplicity_warning: bool,
}

/// Result of [`find_bound_states`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateScan {
    /// Sorted by ray (positive first) and then by `κ`.
    pub states: Vec<BoundState>,
    /// `3·max{2√q₁, 2√q₂, 9}`.
    pub condition_threshold: f64,
    /// Whether the threshold is below the decay rate `a`.
    pub condition_holds: bool,
    pub kappa_range: (f64, f64),
    /// Smallest sampled `|t₀₀|` on each ray (positive, negative).
    pub min_abs_t00: [f64; 2],
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
/// Denominators below this leave the norming constant undefined.
const NORMING_FLOOR: f64 = 1e-8;

fn t00_on(pot: &Potential, ray: RayKind, kappa: f64) -> Result<C64> {
    t00(pot, ray.point(kappa))
}

/// Derivative of `κ ↦ t₀₀(κ·d)` by central differences with one Richardson
/// step, converted to the complex derivative `t₀₀'(z)`.
fn t00_derivative(pot: &Potential, ray: RayKind, kappa: f64, rel_step: f64) -> Result<C64> {
    let h = rel_step * kappa;
    let d = |h: f64| -> Result<C64> { Ok((t00_on(pot, ray, kappa + h)? - t00_on(pot, ray, kappa - h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Ok((4.0 * d2 - d1) / 3.0 / ray.direction())
}

fn refine(pot: &Potential, ray: RayKind, lo: f64, hi: f64, cfg: &BoundStateConfig) -> Result<(f64, f64)> {
    let f = |k: f64| -> Result<f64> { Ok(t00_on(pot, ray, k)?.norm()) };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if (b - a) < 1e-6 * (a + b) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    let mut k = if fc < fd { c } else { d };
    let mut val = t00_on(pot, ray, k)?;
    // Newton along the ray
    for _ in 0..20 {
        if val.norm() < 0.1 * cfg.zero_tol {
            break;
        }
        let g = t00_derivative(pot, ray, k, cfg.fd_step)? * ray.direction();
        if g.norm() == 0.0 {
            break;
        }
        let step = -(val / g).re;
        let next = k + step;
        if !(next > lo && next < hi) {
            break;
        }
        let nv = t00_on(pot, ray, next)?;
        if nv.norm() >= val.norm() {
            break;
        }
        k = next;
        val = nv;
    }
    Ok((k, val.norm()))
}

/// Scans `|t₀₀|` along `κζ₂` and `-κ̂ζ₁` for `κ` in `(0, a/3)`, refines
/// sampled minima (golden section, then Newton along the ray) and keeps those
/// with `|t₀₀| < zero_tol`.
pub fn find_bound_states(pot: &Potential, cfg: &BoundStateConfig) -> Result<BoundStateScan> {
    if cfg.points < 3 || !(cfg.min_fraction > 0.0 && cfg.min_fraction < 1.0) {
        return Err(Error::Validation("bound-state scan needs >= 3 points and 0 < min_fraction < 1".into()));
    }
    let (condition_threshold, condition_holds) = pot.bound_state_condition();
    let kmax = cfg.kappa_max.unwrap_or(pot.decay_rate() / 3.0);
    let kmin = kmax * cfg.min_fraction;
    let mut scan = BoundStateScan {
        states: vec![],
        condition_threshold,
        condition_holds,
        kappa_range: (kmin, kmax),
        min_abs_t00: [1.0, 1.0],
    };
    if pot.is_zero() {
        return Ok(scan);
    }
    let n = cfg.points;
    let kappas: Vec<f64> = (0..n).map(|i| kmin * (kmax / kmin).powf(i as f64 / (n - 1) as f64)).collect();
    for (ri, ray) in [RayKind::Positive, RayKind::Negative].into_iter().enumerate() {
        let vals: Vec<f64> =
            kappas.par_iter().map(|&k| t00_on(pot, ray, k).map(|v| v.norm())).collect::<Result<Vec<_>>>()?;
        scan.min_abs_t00[ri] = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let candidates: Vec<usize> = (0..n)
            .filter(|&i| {
                let left = i == 0 || vals[i] <= vals[i - 1];
                let right = i == n - 1 || vals[i] <= vals[i + 1];
                left && right && vals[i] < cfg.bracket_threshold
            })
            .collect();
        let found = candidates
            .par_iter()
            .map(|&i| -> Result<Option<BoundState>> {
                let lo = kappas[i.saturating_sub(1)];
                let hi = kappas[(i + 1).min(n - 1)];
                let (k, v) = refine(pot, ray, lo, hi, cfg)?;
                if v >= cfg.zero_tol {
                    return Ok(None);
                }
                let z = ray.point(k);
                let dp = t00_derivative(pot, ray, k, cfg.fd_step)?;
                let row = transition_row0(pot, z)?;
                let (den, pre) = match ray {
                    RayKind::Positive => (row[1], -ZETA[1]),
                    RayKind::Negative => (row[2], -ZETA[2]),
                };
                let norming = if den.norm() < NORMING_FLOOR { None } else { Some(pre * dp / den) };
                Ok(Some(BoundState {
                    ray,
                    kappa: k,
                    z,
                    eigenvalue: z.powu(3),
                    t00_abs: v,
                    t00_prime: dp,
                    t01: row[1],
                    t02: row[2],
                    norming,
                    multiplicity_warning: dp.norm() < cfg.simplicity_floor,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut states: Vec<BoundState> = found.into_iter().flatten().collect();
        states.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
        states.dedup_by(|a, b| (a.kappa - b.kappa).abs() < 1e-8 * b.kappa);
        scan.states.extend(states);
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rays_have_real_cubes() {
        for ray in [RayKind::Positive, RayKind::Negative] {
            let z = ray.point(0.7);
            assert!(z.powu(3).im.abs() < 1e-15);
        }
        assert!(RayKind::Positive.point(1.0).powu(3).re > 0.0);
        assert!(RayKind::Negative.point(1.0).powu(3).re < 0.0);
    }

    #[test]
    fn zero_potential_has_no_bound_states() {
        let s = find_bound_states(&Potential::zero(), &BoundStateConfig::default()).unwrap();
        assert!(s.states.is_empty());
        assert!(s.condition_threshold >= 27.0);
    }
}

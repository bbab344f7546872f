use super::{solve, JostConfig, Potential, Side};
use crate::cubicexp::{Sector, SQRT3};
use crate::{Error, Result, C64};

/// Large-`λ` decomposition of `v_0` and its derivatives in `Ω_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub lambda: C64,
    pub x: f64,
    /// Reduced values `(ψ_0, v_0' e^{-iλx}, v_0'' e^{-iλx})`.
    pub reduced: [C64; 3],
    /// Leading terms `1 + i/(3λ²)∫_x^∞ q`, `iλ - 1/(3λ)∫_x^∞ q`,
    /// `(iλ)² - (i/3)∫_x^∞ q`.
    pub leading: [C64; 3],
    /// `reduced - leading`.
    pub remainder: [C64; 3],
    /// `|λ|^k r²/(1-r) + q₂|λ|^{k-2} δ` with `r = q₁/|λ|²`,
    /// `δ = (β√3 - |α|)^{-1/2}`.
    pub bound: [f64; 3],
}

impl AsymptoticReport {
    pub fn within_bound(&self) -> bool {
        self.remainder.iter().zip(&self.bound).all(|(r, b)| r.norm() <= *b)
    }
}

/// Splits `v_0(λ, x)` (and two derivatives) into its leading large-`λ` part and
/// a remainder, and evaluates the a-priori remainder bound.
pub fn asymptotic_decomposition(pot: &Potential, lambda: C64, x: f64) -> Result<AsymptoticReport> {
    if !Sector::Omega(0).contains(lambda) {
        return Err(Error::Range(format!("lambda = {lambda} is not interior to Omega0")));
    }
    let l = lambda.norm();
    let r = pot.q1() / (l * l);
    if r >= 1.0 {
        return Err(Error::OutOfRegime(format!("q1/|lambda|^2 = {r:.3} is not below 1")));
    }
    let i = C64::new(0.0, 1.0);
    let tail = pot.integral_from(x);
    let leading = [
        1.0 + i * tail / (3.0 * lambda * lambda),
        i * lambda - tail / (3.0 * lambda),
        (i * lambda).powu(2) - i * tail / 3.0,
    ];
    let reduced = solve(pot, lambda, 0, Side::Right, &[x], &JostConfig::default())?.frames[0].reduced;
    let delta = (lambda.im * SQRT3 - lambda.re.abs()).powf(-0.5);
    let mut bound = [0.0; 3];
    for (k, b) in bound.iter_mut().enumerate() {
        *b = l.powi(k as i32) * r * r / (1.0 - r) + pot.q2() * l.powi(k as i32 - 2) * delta;
    }
    let remainder = [reduced[0] - leading[0], reduced[1] - leading[1], reduced[2] - leading[2]];
    Ok(AsymptoticReport { lambda, x, reduced, leading, remainder, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_has_no_remainder() {
        let rep = asymptotic_decomposition(&Potential::zero(), C64::new(0.5, 4.0), 0.3).unwrap();
        assert!(rep.remainder.iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn regime_and_sector_checks() {
        let p = Potential::gaussian(3.0, 1.0, 30.0).unwrap();
        assert!(matches!(asymptotic_decomposition(&p, C64::new(0.0, 1.0), 0.0), Err(Error::OutOfRegime(_))));
        assert!(matches!(asymptotic_decomposition(&p, C64::new(5.0, 0.0), 0.0), Err(Error::Range(_))));
    }
}

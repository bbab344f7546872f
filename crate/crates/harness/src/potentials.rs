use crate::config::PotentialSpec;
use crate::error::{HarnessError, Result};
use cubic_ist::jost::{Potential, Profile};

/// Decay rate used for profiles that decay faster than any exponential.
pub const DEFAULT_DECAY_RATE: f64 = 3.0;
/// `sech` profiles get `a = SECH_MARGIN / width`.
pub const SECH_MARGIN: f64 = 0.9;

/// Builds a potential from its descriptor. Zero amplitude gives `q ≡ 0`.
pub fn builtin_potential(spec: &PotentialSpec) -> Result<Potential> {
    let (profile, decay) = match spec.clone() {
        PotentialSpec::Zero { decay_rate } => (Profile::Zero, decay_rate.unwrap_or(DEFAULT_DECAY_RATE)),
        PotentialSpec::Gaussian { amplitude, width, decay_rate } => {
            (Profile::Gaussian { amplitude, width }, decay_rate.unwrap_or(DEFAULT_DECAY_RATE))
        }
        PotentialSpec::Bump { amplitude, width, decay_rate } => {
            (Profile::Bump { amplitude, width }, decay_rate.unwrap_or(DEFAULT_DECAY_RATE))
        }
        PotentialSpec::Sech { amplitude, width, decay_rate } => {
            (Profile::Sech { amplitude, width }, decay_rate.unwrap_or(SECH_MARGIN / width))
        }
        PotentialSpec::Samples { x, q, decay_rate } => {
            (Profile::Samples { xs: x, qs: q }, decay_rate.unwrap_or(DEFAULT_DECAY_RATE))
        }
    };
    let profile = match profile {
        Profile::Gaussian { amplitude: 0.0, .. } | Profile::Bump { amplitude: 0.0, .. } => Profile::Zero,
        Profile::Sech { amplitude: 0.0, .. } => Profile::Zero,
        p => p,
    };
    let pot = Potential::new(profile, decay).map_err(|e| HarnessError::usage("potential", e.to_string()))?;
    if !pot.weighted_norm().is_finite() {
        return Err(HarnessError::usage("potential.decay_rate", "weighted norm of q is not finite"));
    }
    Ok(pot)
}

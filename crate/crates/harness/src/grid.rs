use crate::config::GridSpec;
use crate::error::{HarnessError, Result};
use cubic_ist::cubicexp::ZETA;
use cubic_ist::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Which part of the λ-plane a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Real `λ` in `(0, a/3)`.
    Segment,
    /// `λ = iζ₁t`.
    RayZeta1,
    /// `λ = iζ₂t`.
    RayZeta2,
    /// `λ = iω`, large `ω`.
    Asymptotic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Segment => "segment",
            Family::RayZeta1 => "ray_zeta1",
            Family::RayZeta2 => "ray_zeta2",
            Family::Asymptotic => "asymptotic",
        }
    }
}

/// One λ-sample with its real parameter (`λ`, `t` or `ω`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPoint {
    pub family: Family,
    pub param: f64,
    pub lambda: C64,
    /// Outside the disk `|λ| < a/3`.
    pub boundary: bool,
}

fn interior(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| lo + (hi - lo) * j as f64 / (n + 1) as f64).collect()
}

fn inclusive(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
}

/// The λ-grid for decay rate `a`, ordered segment, `i l_{ζ₁}`, `i l_{ζ₂}`,
/// asymptotic.
pub fn lambda_grid(spec: &GridSpec, a: f64) -> Result<Vec<LambdaPoint>> {
    let r = a / 3.0;
    if spec.segment_min >= r {
        return Err(HarnessError::usage("grid.segment_min", format!("must be below a/3 = {r}")));
    }
    if spec.ray_min >= r {
        return Err(HarnessError::usage("grid.ray_min", format!("must be below a/3 = {r}")));
    }
    let mut out = Vec::new();
    let mut push = |family, param: f64, lambda: C64| {
        out.push(LambdaPoint { family, param, lambda, boundary: lambda.norm() >= r });
    };
    for s in interior(spec.segment_min, r, spec.segment) {
        push(Family::Segment, s, C64::new(s, 0.0));
    }
    let rays = interior(spec.ray_min, r, spec.ray);
    for t in &rays {
        push(Family::RayZeta1, *t, I * ZETA[1] * *t);
    }
    for t in &rays {
        push(Family::RayZeta2, *t, I * ZETA[2] * *t);
    }
    let omegas = spec.omegas.clone().unwrap_or_else(|| inclusive(spec.omega_min, spec.omega_max, spec.asymptotic));
    for w in omegas {
        push(Family::Asymptotic, w, I * w);
    }
    Ok(out)
}

/// Ray parameters of the `i l_{ζ₁}` samples.
pub fn ray_params(points: &[LambdaPoint]) -> Vec<f64> {
    points.iter().filter(|p| p.family == Family::RayZeta1).map(|p| p.param).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout() {
        let g = lambda_grid(&GridSpec::default(), 3.0).unwrap();
        let count = |f| g.iter().filter(|p| p.family == f).count();
        assert_eq!(
            [count(Family::Segment), count(Family::RayZeta1), count(Family::RayZeta2), count(Family::Asymptotic)],
            [20, 10, 10, 10]
        );
        for p in &g {
            match p.family {
                Family::Asymptotic => assert!(p.boundary && p.param >= 5.0 && p.param <= 40.0),
                _ => assert!(!p.boundary && p.lambda.norm() > 0.02 && p.lambda.norm() < 1.0),
            }
        }
        let a: Vec<f64> = g.iter().filter(|p| p.family == Family::Asymptotic).map(|p| p.param).collect();
        assert_eq!((a[0], a[9]), (5.0, 40.0));
        for p in g.iter().filter(|p| p.family == Family::RayZeta1) {
            assert!((p.lambda - I * ZETA[1] * p.param).norm() < 1e-15);
        }
        assert_eq!(ray_params(&g).len(), 10);
    }

    #[test]
    fn explicit_omegas() {
        let s = GridSpec { omegas: Some(vec![5.0, 10.0, 20.0, 40.0]), ..Default::default() };
        let w: Vec<f64> =
            lambda_grid(&s, 3.0).unwrap().iter().filter(|p| p.family == Family::Asymptotic).map(|p| p.param).collect();
        assert_eq!(w, vec![5.0, 10.0, 20.0, 40.0]);
    }

    #[test]
    fn rejects_empty_segment() {
        let s = GridSpec { segment_min: 2.0, ..Default::default() };
        assert!(matches!(lambda_grid(&s, 3.0), Err(HarnessError::Usage { path, .. }) if path == "grid.segment_min"));
    }
}

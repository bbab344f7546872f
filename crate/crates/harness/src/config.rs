use crate::error::{HarnessError, Result};
use cubic_ist::invscatter::{BoundDatum, InverseConfig, RaySamples, SpectralData};
use cubic_ist::C64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Subcommands of the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyIdentities,
    Forward,
    BoundStates,
    Invert,
    Roundtrip,
    JumpResidual,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyIdentities => "verify-identities",
            Command::Forward => "forward",
            Command::BoundStates => "bound-states",
            Command::Invert => "invert",
            Command::Roundtrip => "roundtrip",
            Command::JumpResidual => "jump-residual",
        }
    }
}

/// Potential descriptor. `decay_rate` defaults per profile (see
/// [`crate::potentials::builtin_potential`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero {
        #[serde(default)]
        decay_rate: Option<f64>,
    },
    /// `amplitude · exp(-x²/width²)`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        decay_rate: Option<f64>,
    },
    /// Smooth bump supported on `[-width, width]`.
    Bump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        decay_rate: Option<f64>,
    },
    /// `amplitude / cosh(x/width)`.
    Sech {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        decay_rate: Option<f64>,
    },
    /// Real samples on an ascending grid.
    Samples {
        x: Vec<f64>,
        q: Vec<f64>,
        #[serde(default)]
        decay_rate: Option<f64>,
    },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Gaussian { amplitude: 0.1, width: 1.0, decay_rate: None }
    }
}

/// λ-sample layout: interior points of the real segment `(segment_min, a/3)`,
/// of `i l_{ζ₁}` and `i l_{ζ₂}` with parameter in `(ray_min, a/3)`, and
/// `iω` for `ω` evenly spaced in `[omega_min, omega_max]` (or the explicit
/// `omegas`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub segment: usize,
    pub segment_min: f64,
    pub ray: usize,
    pub ray_min: f64,
    pub asymptotic: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omegas: Option<Vec<f64>>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            segment: 20,
            segment_min: 0.02,
            ray: 10,
            ray_min: 0.02,
            asymptotic: 10,
            omega_min: 5.0,
            omega_max: 40.0,
            omegas: None,
        }
    }
}

/// Pass thresholds, one per check family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub identities: f64,
    pub free_jost: f64,
    pub free_transition: f64,
    pub structure: f64,
    pub rotation: f64,
    pub wronskian: f64,
    pub asymptotic: f64,
    pub jump: f64,
    pub bound_zero: f64,
    pub fredholm: f64,
    pub decay: f64,
    pub roundtrip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identities: 1e-11,
            free_jost: 1e-12,
            free_transition: 1e-10,
            structure: 1e-6,
            rotation: 1e-8,
            wronskian: 1e-6,
            asymptotic: 0.05,
            jump: 1e-4,
            bound_zero: 1e-10,
            fredholm: 1e-10,
            decay: 1e-10,
            roundtrip: 1e-2,
        }
    }
}

impl Tolerances {
    fn fields(&self) -> [(&'static str, f64); 12] {
        [
            ("identities", self.identities),
            ("free_jost", self.free_jost),
            ("free_transition", self.free_transition),
            ("structure", self.structure),
            ("rotation", self.rotation),
            ("wronskian", self.wronskian),
            ("asymptotic", self.asymptotic),
            ("jump", self.jump),
            ("bound_zero", self.bound_zero),
            ("fredholm", self.fredholm),
            ("decay", self.decay),
            ("roundtrip", self.roundtrip),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitySettings {
    pub samples: usize,
    pub radius: f64,
}

impl Default for IdentitySettings {
    fn default() -> Self {
        IdentitySettings { samples: 1000, radius: 5.0 }
    }
}

/// Check points of the forward suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForwardSettings {
    /// Points where the Wronskian relations and the x-independence of `t₀₀`
    /// are checked.
    pub wronskian_x: Vec<f64>,
    /// Points of the large-`ω` limit check.
    pub asymptotic_x: Vec<f64>,
    /// Rotation covariance: `rotation_points` evenly spaced on
    /// `[-rotation_span, rotation_span]`, at every `rotation_stride`-th segment sample.
    pub rotation_points: usize,
    pub rotation_span: f64,
    pub rotation_stride: usize,
}

impl Default for ForwardSettings {
    fn default() -> Self {
        ForwardSettings {
            wronskian_x: vec![-0.5, 0.0, 0.5],
            asymptotic_x: vec![-1.0, 0.0, 1.0],
            rotation_points: 50,
            rotation_span: 2.0,
            rotation_stride: 4,
        }
    }
}

/// Uniform reconstruction grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub dx: f64,
}

impl Default for XGrid {
    fn default() -> Self {
        XGrid { min: -5.0, max: 5.0, dx: 0.01 }
    }
}

/// Nyström settings of the inverse solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverseSettings {
    pub nodes: usize,
    pub grading: f64,
    pub scale: Option<f64>,
    pub cond_limit: f64,
    pub max_extension: f64,
}

impl Default for InverseSettings {
    fn default() -> Self {
        let d = InverseConfig::default();
        InverseSettings {
            nodes: d.nodes,
            grading: d.grading,
            scale: d.scale,
            cond_limit: d.cond_limit,
            max_extension: d.max_extension,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpSettings {
    pub x: f64,
    /// Ray parameters; the ray samples of the λ-grid when absent.
    pub t: Option<Vec<f64>>,
    /// Also evaluate the boundary-value system diagnostic.
    pub boundary: bool,
}

impl Default for JumpSettings {
    fn default() -> Self {
        JumpSettings { x: 0.2, t: None, boundary: true }
    }
}

/// Forward side of the roundtrip: the reconstructed `Re q` is sampled as a
/// potential with this decay rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoundtripSettings {
    pub decay_rate: f64,
}

impl Default for RoundtripSettings {
    fn default() -> Self {
        RoundtripSettings { decay_rate: 3.0 }
    }
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: u64,
    pub potential: PotentialSpec,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub identities: IdentitySettings,
    pub forward: ForwardSettings,
    pub x_grid: XGrid,
    pub inverse: InverseSettings,
    pub jump: JumpSettings,
    pub roundtrip: RoundtripSettings,
    /// Spectral data file for `invert` and `roundtrip`.
    pub data: Option<PathBuf>,
    /// Primary output table.
    pub out: Option<PathBuf>,
    /// Report records; standard output when absent.
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 7,
            potential: PotentialSpec::default(),
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
            identities: IdentitySettings::default(),
            forward: ForwardSettings::default(),
            x_grid: XGrid::default(),
            inverse: InverseSettings::default(),
            jump: JumpSettings::default(),
            roundtrip: RoundtripSettings::default(),
            data: None,
            out: None,
            report: None,
        }
    }
}

/// Deserializes JSON, reporting the path of the first offending field.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, root: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let p = e.path().to_string();
        let path = match (root.is_empty(), p.as_str()) {
            (true, _) => p.clone(),
            (false, ".") => root.to_string(),
            (false, _) => format!("{root}.{p}"),
        };
        HarnessError::usage(path, e.into_inner().to_string())
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(HarnessError::usage(path, format!("must be positive and finite, got {v}")))
    }
}

fn at_least(path: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(HarnessError::usage(path, format!("must be at least {min}, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text, "")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_text(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.tolerances.fields() {
            positive(&format!("tolerances.{name}"), v)?;
        }
        let g = &self.grid;
        at_least("grid.segment", g.segment, 1)?;
        at_least("grid.ray", g.ray, 1)?;
        at_least("grid.asymptotic", g.asymptotic, 1)?;
        positive("grid.segment_min", g.segment_min)?;
        positive("grid.ray_min", g.ray_min)?;
        positive("grid.omega_min", g.omega_min)?;
        if !(g.omega_max >= g.omega_min && g.omega_max.is_finite()) {
            return Err(HarnessError::usage("grid.omega_max", "must be finite and not below grid.omega_min"));
        }
        if let Some(ws) = &g.omegas {
            if ws.is_empty() {
                return Err(HarnessError::usage("grid.omegas", "must not be empty"));
            }
            for (i, w) in ws.iter().enumerate() {
                positive(&format!("grid.omegas[{i}]"), *w)?;
            }
        }
        at_least("identities.samples", self.identities.samples, 1)?;
        positive("identities.radius", self.identities.radius)?;
        let f = &self.forward;
        at_least("forward.rotation_points", f.rotation_points, 2)?;
        at_least("forward.rotation_stride", f.rotation_stride, 1)?;
        positive("forward.rotation_span", f.rotation_span)?;
        for (name, xs) in [("forward.wronskian_x", &f.wronskian_x), ("forward.asymptotic_x", &f.asymptotic_x)] {
            if let Some(i) = xs.iter().position(|v| !v.is_finite()) {
                return Err(HarnessError::usage(format!("{name}[{i}]"), "must be finite"));
            }
        }
        let x = &self.x_grid;
        positive("x_grid.dx", x.dx)?;
        if !(x.min.is_finite() && x.max.is_finite() && x.max > x.min) {
            return Err(HarnessError::usage("x_grid.max", "must be finite and above x_grid.min"));
        }
        if ((x.max - x.min) / x.dx) < 4.0 {
            return Err(HarnessError::usage("x_grid.dx", "the x-grid needs at least 5 points"));
        }
        let inv = &self.inverse;
        at_least("inverse.nodes", inv.nodes, 4)?;
        if !(inv.grading >= 1.0 && inv.grading.is_finite()) {
            return Err(HarnessError::usage("inverse.grading", "must be at least 1"));
        }
        if let Some(s) = inv.scale {
            positive("inverse.scale", s)?;
        }
        positive("inverse.cond_limit", inv.cond_limit)?;
        positive("inverse.max_extension", inv.max_extension)?;
        if !self.jump.x.is_finite() {
            return Err(HarnessError::usage("jump.x", "must be finite"));
        }
        if let Some(ts) = &self.jump.t {
            if ts.is_empty() {
                return Err(HarnessError::usage("jump.t", "must not be empty"));
            }
            for (i, t) in ts.iter().enumerate() {
                positive(&format!("jump.t[{i}]"), *t)?;
            }
        }
        positive("roundtrip.decay_rate", self.roundtrip.decay_rate)?;
        if matches!(self.command, Some(Command::Invert | Command::Roundtrip)) && self.data.is_none() {
            return Err(HarnessError::usage("data", "a spectral data file is required"));
        }
        Ok(())
    }

    pub fn inverse_config(&self) -> InverseConfig {
        let i = &self.inverse;
        InverseConfig {
            nodes: i.nodes,
            scale: i.scale,
            grading: i.grading,
            cond_limit: i.cond_limit,
            decay_tol: self.tolerances.decay,
            max_extension: i.max_extension,
        }
    }
}

/// One sample of a scattering coefficient on its ray, at parameter `t ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySample {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundEntry {
    pub kappa: f64,
    pub b_re: f64,
    pub b_im: f64,
}

/// Spectral data file: `sc1` on `i l_{ζ₁}`, `sc2` on `i l_{ζ₂}` (absent or
/// null means identically zero), bound states on `κζ₂` (`bound`) and on
/// `-κ̂ζ₁` (`boundHat`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseData {
    #[serde(default)]
    pub sc1: Option<Vec<RaySample>>,
    #[serde(default)]
    pub sc2: Option<Vec<RaySample>>,
    #[serde(default)]
    pub bound: Vec<BoundEntry>,
    #[serde(default, rename = "boundHat")]
    pub bound_hat: Vec<BoundEntry>,
}

impl InverseData {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text, "data")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_text(path)?)
    }

    pub fn to_spectral(&self) -> Result<SpectralData> {
        let rays = |name: &str, s: &Option<Vec<RaySample>>| -> Result<Option<RaySamples>> {
            let Some(v) = s else { return Ok(None) };
            for (i, r) in v.iter().enumerate() {
                if !(r.t.is_finite() && r.re.is_finite() && r.im.is_finite()) {
                    return Err(HarnessError::usage(format!("data.{name}[{i}]"), "values must be finite"));
                }
            }
            let t = v.iter().map(|r| r.t).collect();
            let vals = v.iter().map(|r| C64::new(r.re, r.im)).collect();
            RaySamples::new(t, vals).map(Some).map_err(|e| HarnessError::usage(format!("data.{name}"), e.to_string()))
        };
        let bound = |name: &str, v: &[BoundEntry]| -> Result<Vec<BoundDatum>> {
            v.iter()
                .enumerate()
                .map(|(i, b)| {
                    if !(b.kappa.is_finite() && b.kappa > 0.0) {
                        return Err(HarnessError::usage(format!("data.{name}[{i}].kappa"), "must be positive"));
                    }
                    if !(b.b_re.is_finite() && b.b_im.is_finite()) {
                        return Err(HarnessError::usage(format!("data.{name}[{i}].b_re"), "must be finite"));
                    }
                    Ok(BoundDatum::new(b.kappa, C64::new(b.b_re, b.b_im)))
                })
                .collect()
        };
        SpectralData::new(
            rays("sc1", &self.sc1)?,
            rays("sc2", &self.sc2)?,
            bound("bound", &self.bound)?,
            bound("boundHat", &self.bound_hat)?,
        )
        .map_err(|e| HarnessError::usage("data", e.to_string()))
    }
}

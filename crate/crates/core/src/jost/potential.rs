use crate::quad::GaussLegendre;
use crate::{Error, Result};

/// Shape of a real potential.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `q ≡ 0`.
    Zero,
    /// `amplitude · exp(-x²/width²)`.
    Gaussian { amplitude: f64, width: f64 },
    /// `amplitude · exp(1 - 1/(1 - (x/width)²))` on `|x| < width`, zero outside.
    Bump { amplitude: f64, width: f64 },
    /// `amplitude / cosh(x/width)`: decays like `e^{-|x|/width}` on both sides.
    Sech { amplitude: f64, width: f64 },
    /// Samples on an ascending grid, interpolated by cubic Hermite splines with
    /// finite-difference slopes, zero outside the sampled range.
    Samples { xs: Vec<f64>, qs: Vec<f64> },
}

impl Profile {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Gaussian { amplitude, width } => amplitude * (-(x / width).powi(2)).exp(),
            Profile::Bump { amplitude, width } => {
                let s = x / width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            Profile::Sech { amplitude, width } => amplitude / (x / width).cosh(),
            Profile::Samples { xs, qs } => hermite_samples(xs, qs, x),
        }
    }

    /// Interval outside of which `|q|` is below `1e-16` of its peak (or exactly
    /// zero).
    fn support(&self) -> (f64, f64) {
        // ln(1e16)
        const L16: f64 = 36.841_361_487_904_734;
        match self {
            Profile::Zero => (0.0, 0.0),
            Profile::Gaussian { width, .. } => {
                let h = width.abs() * L16.sqrt();
                (-h, h)
            }
            Profile::Bump { width, .. } => (-width.abs(), width.abs()),
            Profile::Sech { width, .. } => {
                let h = width.abs() * (L16 + std::f64::consts::LN_2);
                (-h, h)
            }
            Profile::Samples { xs, .. } => (xs[0], xs[xs.len() - 1]),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Gaussian { amplitude, .. } | Profile::Bump { amplitude, .. } | Profile::Sech { amplitude, .. } => {
                *amplitude == 0.0
            }
            Profile::Samples { qs, .. } => qs.iter().all(|q| *q == 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Validation(m.to_string()));
        match self {
            Profile::Zero => Ok(()),
            Profile::Gaussian { amplitude, width }
            | Profile::Bump { amplitude, width }
            | Profile::Sech { amplitude, width } => {
                if !amplitude.is_finite() {
                    return bad("amplitude must be finite");
                }
                if !(width.is_finite() && *width > 0.0) {
                    return bad("width must be positive");
                }
                Ok(())
            }
            Profile::Samples { xs, qs } => {
                if xs.len() != qs.len() || xs.len() < 4 {
                    return bad("samples need matching x and q columns with at least 4 rows");
                }
                if xs.iter().chain(qs).any(|v| !v.is_finite()) {
                    return bad("samples must be finite");
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("sample abscissae must be strictly ascending");
                }
                let peak = qs.iter().fold(0.0f64, |m, q| m.max(q.abs()));
                if qs[0].abs() > 1e-10 * peak || qs[qs.len() - 1].abs() > 1e-10 * peak {
                    return bad("sampled potential must decay to zero at both ends of the sample range");
                }
                Ok(())
            }
        }
    }
}

fn hermite_samples(xs: &[f64], qs: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let i = match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => return qs[i],
        Err(i) => i - 1,
    };
    let slope = |j: usize| -> f64 {
        if j == 0 {
            (qs[1] - qs[0]) / (xs[1] - xs[0])
        } else if j == n - 1 {
            (qs[n - 1] - qs[n - 2]) / (xs[n - 1] - xs[n - 2])
        } else {
            (qs[j + 1] - qs[j - 1]) / (xs[j + 1] - xs[j - 1])
        }
    };
    let h = xs[i + 1] - xs[i];
    let s = (x - xs[i]) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * qs[i]
        + (s3 - 2.0 * s2 + s) * h * slope(i)
        + (-2.0 * s3 + 3.0 * s2) * qs[i + 1]
        + (s3 - s2) * h * slope(i + 1)
}

const TABLE_CELLS: usize = 4000;

/// `∫ |q|² e^{2a|x|} dx` over an interval wide enough to contain the bulk of
/// the weighted integrand (which may lie well outside the support of `q`).
fn weighted_norm(profile: &Profile, a: f64, rule: &GaussLegendre) -> f64 {
    if profile.is_zero() {
        return 0.0;
    }
    let (lo, hi) = profile.support();
    let r = match profile {
        Profile::Gaussian { width, .. } => hi.max(a * width * width / 2.0 + 8.0 * width),
        Profile::Sech { width, .. } => hi + 40.0 / (2.0 * (1.0 / width - a)),
        _ => hi.max(-lo),
    };
    let (lo, hi) = (lo.min(-r), hi.max(r));
    let n = TABLE_CELLS;
    let h = (hi - lo) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let c = lo + (i as f64 + 0.5) * h;
        for (u, w) in rule.nodes.iter().zip(&rule.weights) {
            let x = c + 0.5 * h * u;
            let q = profile.eval(x);
            s += 0.5 * h * w * q * q * (2.0 * a * x.abs()).exp();
        }
    }
    s
}

/// A real potential with exponential decay rate `a`, together with its norms
/// and cumulative integrals.
#[derive(Debug, Clone)]
pub struct Potential {
    profile: Profile,
    decay_rate: f64,
    support: (f64, f64),
    q1: f64,
    q2: f64,
    weighted_norm: f64,
    cells: Vec<f64>,
    cum_abs: Vec<f64>,
    cum_signed: Vec<f64>,
    rule: GaussLegendre,
}

impl Potential {
    /// Builds and validates a potential. The decay hypothesis
    /// `∫ |q|² e^{2a|x|} dx < ∞` holds for every `a` for Gaussian, bump and
    /// sampled profiles and requires `a < 1/width` for `sech`.
    pub fn new(profile: Profile, decay_rate: f64) -> Result<Self> {
        profile.validate()?;
        if !(decay_rate.is_finite() && decay_rate > 0.0) {
            return Err(Error::Validation("decay_rate must be positive".into()));
        }
        if let Profile::Sech { amplitude, width } = profile {
            if amplitude != 0.0 && decay_rate >= 1.0 / width {
                return Err(Error::Validation(format!(
                    "decay_rate {decay_rate} too large for this profile: sech decays like exp(-|x|/{width})"
                )));
            }
        }
        let support = if profile.is_zero() { (0.0, 0.0) } else { profile.support() };
        let rule = GaussLegendre::new(6);
        let (lo, hi) = support;
        let n = if hi > lo { TABLE_CELLS } else { 0 };
        let h = if n > 0 { (hi - lo) / n as f64 } else { 0.0 };
        let mut cells = Vec::with_capacity(n + 1);
        let mut cum_abs = vec![0.0];
        let mut cum_signed = vec![0.0];
        let mut sq = 0.0;
        cells.push(lo);
        for i in 0..n {
            let (a, b) = (lo + i as f64 * h, if i + 1 == n { hi } else { lo + (i + 1) as f64 * h });
            let (mut ia, mut is) = (0.0, 0.0);
            for (u, w) in rule.nodes.iter().zip(&rule.weights) {
                let x = 0.5 * (a + b) + 0.5 * (b - a) * u;
                let q = profile.eval(x);
                let ww = 0.5 * (b - a) * w;
                ia += ww * q.abs();
                is += ww * q;
                sq += ww * q * q;
            }
            cells.push(b);
            cum_abs.push(cum_abs[i] + ia);
            cum_signed.push(cum_signed[i] + is);
        }
        let weighted_norm = weighted_norm(&profile, decay_rate, &rule);
        Ok(Potential {
            profile,
            decay_rate,
            support,
            q1: *cum_abs.last().unwrap_or(&0.0),
            q2: sq.sqrt(),
            weighted_norm,
            cells,
            cum_abs,
            cum_signed,
            rule,
        })
    }

    pub fn zero() -> Self {
        Potential::new(Profile::Zero, 1.0).expect("zero potential is valid")
    }

    pub fn gaussian(amplitude: f64, width: f64, decay_rate: f64) -> Result<Self> {
        Potential::new(Profile::Gaussian { amplitude, width }, decay_rate)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// `q(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.is_zero() || x < self.support.0 || x > self.support.1 {
            0.0
        } else {
            self.profile.eval(x)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support.1 <= self.support.0
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// Interval outside of which `q` is treated as zero.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Symmetric truncation half-width `X_cut`.
    pub fn x_cut(&self) -> f64 {
        self.support.0.abs().max(self.support.1.abs())
    }

    /// `‖q‖_{L¹}`.
    pub fn q1(&self) -> f64 {
        self.q1
    }

    /// `‖q‖_{L²}`.
    pub fn q2(&self) -> f64 {
        self.q2
    }

    /// `∫ |q|² e^{2a|x|} dx`.
    pub fn weighted_norm(&self) -> f64 {
        self.weighted_norm
    }

    fn cumulative(&self, table: &[f64], signed: bool, t: f64) -> f64 {
        if self.is_zero() || t <= self.support.0 {
            return 0.0;
        }
        if t >= self.support.1 {
            return table[table.len() - 1];
        }
        let h = (self.support.1 - self.support.0) / (self.cells.len() - 1) as f64;
        let i = (((t - self.support.0) / h).floor() as usize).min(self.cells.len() - 2);
        let a = self.cells[i];
        let part: f64 = self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(u, w)| {
                let x = 0.5 * (a + t) + 0.5 * (t - a) * u;
                let q = self.profile.eval(x);
                0.5 * (t - a) * w * if signed { q } else { q.abs() }
            })
            .sum();
        table[i] + part
    }

    /// `σ(t) = ∫_{-∞}^t |q|`.
    pub fn sigma(&self, t: f64) -> f64 {
        self.cumulative(&self.cum_abs, false, t)
    }

    /// `∫_x^∞ q(t) dt`.
    pub fn integral_from(&self, x: f64) -> f64 {
        let total = self.cum_signed.last().copied().unwrap_or(0.0);
        total - self.cumulative(&self.cum_signed, true, x)
    }

    /// Diagnostic threshold `3·max{2√q₁, 2√q₂, 9}` compared against `a` in the
    /// finiteness condition for bound states. Returns `(threshold, satisfied)`.
    pub fn bound_state_condition(&self) -> (f64, bool) {
        let th = 3.0 * (2.0 * self.q1.sqrt()).max(2.0 * self.q2.sqrt()).max(9.0);
        (th, th < self.decay_rate)
    }
}

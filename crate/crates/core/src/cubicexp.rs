//! Cube roots of unity, the generalized exponentials
//! `s_p(z) = (1/3) Σ_k ζ_k^{-p} e^{ζ_k z}`, their identity algebra, the sector
//! geometry of the spectral plane and the free Cauchy solution of
//! `i y''' = λ³ y + f`.

use crate::quad::integrate_adaptive;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// The cube roots of unity `ζ_0 = 1`, `ζ_1 = (-1 + i√3)/2`, `ζ_2 = conj(ζ_1)`.
pub const ZETA: [C64; 3] = [C64::new(1.0, 0.0), C64::new(-0.5, 0.5 * SQRT3), C64::new(-0.5, -0.5 * SQRT3)];

/// `ζ_k^n` for any integer `n` (exact table lookup).
pub fn zeta_pow(k: usize, n: i64) -> C64 {
    ZETA[((k as i64 * n).rem_euclid(3)) as usize]
}

/// Default overflow guard for [`gen_exp`].
pub const Z_MAX: f64 = 200.0;

/// Below this modulus the Taylor series is used instead of the exponential sum.
pub const TAYLOR_RADIUS: f64 = 1.0;

/// Values `(s_0(z), s_1(z), s_2(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenExpTriple {
    pub z: C64,
    pub s: [C64; 3],
}

impl GenExpTriple {
    pub fn s0(&self) -> C64 {
        self.s[0]
    }
    pub fn s1(&self) -> C64 {
        self.s[1]
    }
    pub fn s2(&self) -> C64 {
        self.s[2]
    }
}

/// Evaluates the generalized exponentials at `z`.
///
/// Uses the Taylor series for `|z| ≤ 1` and the exponential sum otherwise.
pub fn gen_exp(z: C64) -> Result<GenExpTriple> {
    if !(z.norm() <= Z_MAX) {
        return Err(Error::Range(format!("|z| = {} exceeds {}", z.norm(), Z_MAX)));
    }
    let s = if z.norm() <= TAYLOR_RADIUS { gen_exp_taylor(z) } else { gen_exp_direct(z) };
    Ok(GenExpTriple { z, s })
}

/// Direct summation of the three exponentials. No range check.
pub fn gen_exp_direct(z: C64) -> [C64; 3] {
    let e = [(ZETA[0] * z).exp(), (ZETA[1] * z).exp(), (ZETA[2] * z).exp()];
    let mut s = [C64::new(0.0, 0.0); 3];
    for (p, sp) in s.iter_mut().enumerate() {
        for (k, ek) in e.iter().enumerate() {
            *sp += zeta_pow(k, -(p as i64)) * ek;
        }
        *sp /= 3.0;
    }
    s
}

/// Power series `s_p(z) = Σ_m z^{3m+p}/(3m+p)!`, summed until the terms stop
/// contributing. Intended for moderate `|z|`.
pub fn gen_exp_taylor(z: C64) -> [C64; 3] {
    let mut s = [C64::new(0.0, 0.0); 3];
    let mut term = C64::new(1.0, 0.0);
    let mut n = 0usize;
    loop {
        s[n % 3] += term;
        n += 1;
        term *= z / n as f64;
        if term.norm() <= 1e-18 * (1.0 + s[n % 3].norm()) && n > 3 {
            let quiet = (1..3).all(|j| {
                let t = term * z.powu(j as u32) / ((n + 1)..=(n + j)).product::<usize>() as f64;
                t.norm() <= 1e-18 * (1.0 + s[(n + j) % 3].norm())
            });
            if quiet {
                break;
            }
        }
        if n > 400 {
            break;
        }
    }
    s
}

/// `s_n(iλu)/(iλ)^n` for `n ∈ {0,1,2}`, with the removable singularity at
/// `λ = 0` resolved (`u^n/n!`).
pub fn scaled_s(n: usize, lambda: C64, u: f64) -> C64 {
    let il = C64::new(-lambda.im, lambda.re);
    let z = il * u;
    if z.norm() <= TAYLOR_RADIUS {
        // u^n Σ_m z^{3m} / (3m+n)!
        let z3 = z * z * z;
        let mut term = C64::new(1.0 / factorial(n), 0.0);
        let mut sum = term;
        let mut m = 0usize;
        while term.norm() > 1e-18 * sum.norm() && m < 60 {
            let k = 3 * m + n;
            term *= z3 / (((k + 1) * (k + 2) * (k + 3)) as f64);
            sum += term;
            m += 1;
        }
        sum * u.powi(n as i32)
    } else {
        gen_exp_direct(z)[n] / il.powu(n as u32)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

/// The `p`-th derivative of `e^{zζ_k}` reconstructed from the generalized
/// exponentials, `Σ_j ζ_k^j s_{(j-p) mod 3}(z)`. For `p = 0` this is the Euler
/// formula `e^{zζ_k} = s_0 + ζ_k s_1 + ζ_k² s_2`.
pub fn gen_exp_shifted(p: usize, k: usize, z: C64) -> Result<C64> {
    if p > 2 || k > 2 {
        return Err(Error::Range(format!("indices (p, k) = ({p}, {k}) must lie in 0..=2")));
    }
    let g = gen_exp(z)?;
    Ok((0..3).map(|j| zeta_pow(k, j as i64) * g.s[(j + 3 - p) % 3]).sum())
}

/// Named residual of one identity instance.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    /// Identity family, e.g. `"addition"`.
    pub family: &'static str,
    /// Instance name within the family, e.g. `"addition/s1"`.
    pub name: String,
    /// `|lhs - rhs| / max(1, scale)` where `scale` is the sum of the moduli of
    /// the terms entering the identity.
    pub residual: f64,
}

/// Residuals of every identity family evaluated at `(z, w)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdentityReport {
    pub entries: Vec<IdentityResidual>,
}

impl IdentityReport {
    fn push(&mut self, family: &'static str, name: impl Into<String>, lhs: C64, rhs: C64, scale: f64) {
        let residual = (lhs - rhs).norm() / scale.max(1.0);
        self.entries.push(IdentityResidual { family, name: name.into(), residual });
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    /// Largest residual per family, in first-seen order.
    pub fn by_family(&self) -> Vec<(&'static str, f64)> {
        let mut out: Vec<(&'static str, f64)> = Vec::new();
        for e in &self.entries {
            match out.iter_mut().find(|(f, _)| *f == e.family) {
                Some((_, r)) => *r = r.max(e.residual),
                None => out.push((e.family, e.residual)),
            }
        }
        out
    }
}

/// Identity families reported by [`identity_residuals`], in report order.
pub const IDENTITY_FAMILIES: [&str; 11] = [
    "derivative-shift",
    "conjugation",
    "p-evenness",
    "euler",
    "initial-data",
    "main-identity",
    "addition",
    "product",
    "squaring",
    "reflection",
    "taylor",
];

/// Contour-integral derivative `f'(z) = (1/2πi)∮ f(ζ)/(ζ-z)² dζ` on a circle of
/// radius `r` with `n` trapezoid nodes (spectrally accurate for entire `f`).
fn contour_derivative(f: impl Fn(C64) -> [C64; 3], z: C64, r: f64, n: usize) -> [C64; 3] {
    let mut d = [C64::new(0.0, 0.0); 3];
    for j in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        let v = f(z + e * r);
        for p in 0..3 {
            d[p] += v[p] / e;
        }
    }
    d.map(|x| x / (n as f64 * r))
}

/// Evaluates every identity family at `(z, w)`:
/// derivative shift, conjugation, p-evenness, Euler formula, initial data, main
/// identity, addition, product, squaring, reflection and Taylor cross-check.
/// The Taylor cross-check uses `z` scaled into the unit disk when `|z| > 1`.
pub fn identity_residuals(z: C64, w: C64) -> Result<IdentityReport> {
    if z.norm() > 20.0 || w.norm() > 20.0 {
        return Err(Error::Range("identity checks require |z|, |w| <= 20".into()));
    }
    let s = |x: C64| -> Result<[C64; 3]> { Ok(gen_exp(x)?.s) };
    let sz = s(z)?;
    let sw = s(w)?;
    let szw = s(z + w)?;
    let mut rep = IdentityReport::default();
    let mag = |v: &[C64; 3]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);

    // (i) s_p' = s_{(p+2) mod 3}
    let d = contour_derivative(|x| gen_exp(x).map(|g| g.s).unwrap_or([C64::new(f64::NAN, 0.0); 3]), z, 1.0, 48);
    let dscale =
        (0..48).map(|j| mag(&gen_exp_direct(z + C64::from_polar(1.0, 2.0 * PI * j as f64 / 48.0)))).fold(0.0, f64::max);
    for p in 0..3 {
        rep.push("derivative-shift", format!("derivative-shift/s{p}"), d[p], sz[(p + 2) % 3], dscale);
    }

    // (ii) conj(s_p(z)) = s_p(conj z)
    let sc = s(z.conj())?;
    for p in 0..3 {
        rep.push("conjugation", format!("conjugation/s{p}"), sz[p].conj(), sc[p], sz[p].norm());
    }

    // (iii) s_p(z ζ_1) = ζ_1^p s_p(z)
    let sr = s(z * ZETA[1])?;
    for p in 0..3 {
        rep.push("p-evenness", format!("p-evenness/s{p}"), sr[p], zeta_pow(1, p as i64) * sz[p], sz[p].norm());
    }

    // (iv) e^{zζ_k} = s_0 + ζ_k s_1 + ζ_k² s_2
    for k in 0..3 {
        let lhs = (z * ZETA[k]).exp();
        let rhs = gen_exp_shifted(0, k, z)?;
        let scale = sz.iter().map(|x| x.norm()).sum::<f64>();
        rep.push("euler", format!("euler/k{k}"), lhs, rhs, scale);
    }

    // (v) initial data and y''' = y at z
    let s0 = s(C64::new(0.0, 0.0))?;
    let d0 = contour_derivative(gen_exp_direct, C64::new(0.0, 0.0), 1.0, 48);
    let d2 = contour_second_derivative(C64::new(0.0, 0.0));
    for p in 0..3 {
        let one = |q: usize| {
            if p == q {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        };
        rep.push("initial-data", format!("initial-data/s{p}"), s0[p], one(0), 1.0);
        rep.push("initial-data", format!("initial-data/s{p}'"), d0[p], one(1), 1.0);
        rep.push("initial-data", format!("initial-data/s{p}''"), d2[p], one(2), 1.0);
    }

    // (vi) main identity
    let [a, b, c] = sz;
    let lhs = a * a * a + b * b * b + c * c * c - 3.0 * a * b * c;
    let scale = a.norm().powi(3) + b.norm().powi(3) + c.norm().powi(3) + 3.0 * a.norm() * b.norm() * c.norm();
    rep.push("main-identity", "main-identity", lhs, C64::new(1.0, 0.0), scale);

    // (vii) addition formulas
    for p in 0..3 {
        let mut rhs = C64::new(0.0, 0.0);
        let mut scale = 0.0;
        for i in 0..3 {
            let j = (p + 3 - i) % 3;
            rhs += sz[i] * sw[j];
            scale += sz[i].norm() * sw[j].norm();
        }
        rep.push("addition", format!("addition/s{p}"), szw[p], rhs, scale + szw[p].norm());
    }

    // (viii) 3 s_p(z) s_q(w) = Σ_m ζ_m^{-q} s_{(p+q) mod 3}(z + ζ_m w)
    let shifted = [szw, s(z + ZETA[1] * w)?, s(z + ZETA[2] * w)?];
    for (p, q) in [(0, 0), (0, 2), (1, 0), (2, 2), (2, 0), (1, 1)] {
        let lhs = 3.0 * sz[p] * sw[q];
        let r = (p + q) % 3;
        let mut rhs = C64::new(0.0, 0.0);
        let mut scale = lhs.norm();
        for (m, sm) in shifted.iter().enumerate() {
            rhs += zeta_pow(m, -(q as i64)) * sm[r];
            scale += sm[r].norm();
        }
        rep.push("product", format!("product/s{p}s{q}"), lhs, rhs, scale);
    }

    // (ix) squaring: 3 s_p² (z) = s_{2p mod 3}(2z) + 2 s_{2p mod 3}(-z)
    let s2z = s(2.0 * z)?;
    let smz = s(-z)?;
    for p in 0..3 {
        let r = (2 * p) % 3;
        let lhs = 3.0 * sz[p] * sz[p];
        let rhs = s2z[r] + 2.0 * smz[r];
        rep.push("squaring", format!("squaring/s{p}"), lhs, rhs, lhs.norm() + s2z[r].norm() + 2.0 * smz[r].norm());
    }

    // (x) reflection: s_p² - s_{p+1} s_{p+2} = s_{-p mod 3}(-z)
    for p in 0..3 {
        let (i, j) = ((p + 1) % 3, (p + 2) % 3);
        let lhs = sz[p] * sz[p] - sz[i] * sz[j];
        let r = (3 - p) % 3;
        let scale = sz[p].norm().powi(2) + sz[i].norm() * sz[j].norm() + smz[r].norm();
        rep.push("reflection", format!("reflection/s{p}"), lhs, smz[r], scale);
    }

    // (xi) Taylor series against the exponential sum inside the unit disk
    let zt = if z.norm() > 1.0 { z / z.norm() } else { z };
    let st = gen_exp_taylor(zt);
    let sd = gen_exp_direct(zt);
    for p in 0..3 {
        let scale = (0..3).map(|k| (zt * ZETA[k]).exp().norm()).sum::<f64>();
        rep.push("taylor", format!("taylor/s{p}"), st[p], sd[p], scale);
    }
    Ok(rep)
}

fn contour_second_derivative(z: C64) -> [C64; 3] {
    let n = 48;
    let mut d = [C64::new(0.0, 0.0); 3];
    for j in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        let v = gen_exp_direct(z + e);
        for p in 0..3 {
            d[p] += v[p] / (e * e);
        }
    }
    d.map(|x| 2.0 * x / n as f64)
}

/// Sectors `Ω_k` (arguments `(30° + 120°·(1-k) ... )`) and their mirror images
/// `Ω_k⁻ = -Ω_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Omega(usize),
    OmegaMinus(usize),
}

/// Rays `l_{ζ_k}` (outgoing, direction `ζ_k`) and `l̂_{ζ_k}` (direction `-ζ_k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ray {
    Out(usize),
    In(usize),
}

/// Result of [`classify_sector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorLabel {
    Interior(Sector),
    Boundary(Ray),
}

impl std::fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SectorLabel::Interior(Sector::Omega(k)) => write!(f, "Omega{k}"),
            SectorLabel::Interior(Sector::OmegaMinus(k)) => write!(f, "Omega{k}-"),
            SectorLabel::Boundary(Ray::Out(k)) => write!(f, "ray l_zeta{k}"),
            SectorLabel::Boundary(Ray::In(k)) => write!(f, "ray lhat_zeta{k}"),
        }
    }
}

impl Sector {
    /// Central direction of the sector (`i` for `Ω_0`).
    pub fn center(self) -> C64 {
        let i = C64::new(0.0, 1.0);
        match self {
            Sector::Omega(k) => i * zeta_pow(k, -1),
            Sector::OmegaMinus(k) => -i * zeta_pow(k, -1),
        }
    }

    /// Open 120° sector membership. For `Ω_0` this is `α < β√3` and `-α < β√3`.
    pub fn contains(self, lambda: C64) -> bool {
        // rotate so the sector centre maps to i, then test the Ω_0 inequalities
        let r = lambda * C64::new(0.0, 1.0) / self.center();
        r.re < r.im * SQRT3 && -r.re < r.im * SQRT3
    }
}

const ANGLE_TOL: f64 = 1e-12;

/// Cells between consecutive lines `L_{ζ_k}`, listed counterclockwise from
/// `arg ∈ (0°, 60°)`. Each 60° cell is the central part of exactly one 120°
/// sector `Ω_k` or `Ω_k⁻`.
const CELLS: [Sector; 6] = [
    Sector::OmegaMinus(2),
    Sector::Omega(0),
    Sector::OmegaMinus(1),
    Sector::Omega(2),
    Sector::OmegaMinus(0),
    Sector::Omega(1),
];

/// Rays along the lines `L_{ζ_k}` at angles `0°, 60°, …, 300°`.
const RAYS: [Ray; 6] = [Ray::Out(0), Ray::In(2), Ray::Out(1), Ray::In(0), Ray::Out(2), Ray::In(1)];

/// Classifies `λ ≠ 0` into the 60° cell between the lines `L_{ζ_k}`, labelled
/// by the sector `Ω_k`/`Ω_k⁻` whose central cell it is. Points on the lines
/// receive an explicit ray label.
///
/// `classify_sector(i) = Ω_0`, `classify_sector(-i) = Ω_0⁻`,
/// `classify_sector(1) = l_{ζ_0}`.
pub fn classify_sector(lambda: C64) -> Result<SectorLabel> {
    let (j, frac) = cell_position(lambda)?;
    if frac < ANGLE_TOL {
        return Ok(SectorLabel::Boundary(RAYS[j]));
    }
    if 1.0 - frac < ANGLE_TOL {
        return Ok(SectorLabel::Boundary(RAYS[(j + 1) % 6]));
    }
    Ok(SectorLabel::Interior(CELLS[j]))
}

/// Half-open variant of [`classify_sector`]: a point on a ray belongs to the
/// counterclockwise-adjacent cell.
pub fn classify_sector_half_open(lambda: C64) -> Result<Sector> {
    let (j, frac) = cell_position(lambda)?;
    if 1.0 - frac < ANGLE_TOL {
        return Ok(CELLS[(j + 1) % 6]);
    }
    Ok(CELLS[j])
}

fn cell_position(lambda: C64) -> Result<(usize, f64)> {
    if lambda.norm() == 0.0 || !lambda.norm().is_finite() {
        return Err(Error::Degenerate("sector classification needs a finite nonzero lambda".into()));
    }
    let t = lambda.arg().rem_euclid(2.0 * PI) / (PI / 3.0);
    let j = (t.floor() as usize).min(5);
    Ok((j, t - j as f64))
}

/// Data of the Cauchy problem `i y''' = λ³ y + f`, `y^{(n)}(0) = y_n`.
pub struct FreeCauchyProblem<'a> {
    pub y0: C64,
    pub y1: C64,
    pub y2: C64,
    pub lambda: C64,
    pub forcing: Option<&'a (dyn Fn(f64) -> C64 + Sync)>,
}

/// Solution of the free Cauchy problem at `x`, by variation of constants.
pub fn free_solution(prob: &FreeCauchyProblem<'_>, x: f64) -> Result<C64> {
    let l = prob.lambda;
    let mut y = prob.y0 * scaled_s(0, l, x) + prob.y1 * scaled_s(1, l, x) + prob.y2 * scaled_s(2, l, x);
    if let Some(f) = prob.forcing {
        if x != 0.0 {
            let integral = integrate_adaptive(|t| scaled_s(2, l, x - t) * f(t), 0.0, x, 1e-13, 1e-13)?;
            y -= C64::new(0.0, 1.0) * integral;
        }
    }
    Ok(y)
}

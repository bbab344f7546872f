use crate::{Error, Result, C64};

/// `q = -F'` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovered {
    pub q: Vec<C64>,
    /// `max |Im q|`.
    pub max_im: f64,
}

/// Uniform grid `x_min, x_min + dx, …` up to `x_max` (inclusive within rounding).
pub fn uniform_grid(x_min: f64, x_max: f64, dx: f64) -> Result<Vec<f64>> {
    if !(dx > 0.0 && x_max > x_min && x_min.is_finite() && x_max.is_finite()) {
        return Err(Error::Validation(format!("bad grid [{x_min}, {x_max}] with dx = {dx}")));
    }
    let n = ((x_max - x_min) / dx + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| x_min + i as f64 * dx).collect())
}

pub(crate) fn spacing(x: &[f64]) -> Result<f64> {
    if x.len() < 5 {
        return Err(Error::Validation("differentiation needs >= 5 grid points".into()));
    }
    let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    if !(h > 0.0) || x.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::Validation("x-grid must be uniform and increasing".into()));
    }
    Ok(h)
}

/// Fourth-order differentiation: central five-point stencils inside, one-sided
/// stencils at the two points next to each edge. With `decay_tol = Some(ε)`
/// the grid is rejected unless `|F| < ε` at the right edge.
pub fn recover_q(x: &[f64], f: &[C64], decay_tol: Option<f64>) -> Result<Recovered> {
    if x.len() != f.len() {
        return Err(Error::Validation("x and F lengths differ".into()));
    }
    let h = spacing(x)?;
    if let Some(tol) = decay_tol {
        let last = f[f.len() - 1].norm();
        if !(last < tol) {
            return Err(Error::DomainTooSmall(format!(
                "|F({})| = {last:.3e} has not decayed below {tol:.1e}",
                x[x.len() - 1]
            )));
        }
    }
    let n = f.len();
    let d = |i: usize| -> C64 {
        let c = 12.0 * h;
        match i {
            0 => (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / c,
            1 => (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / c,
            _ if i == n - 2 => -(-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) / c,
            _ if i == n - 1 => {
                -(-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]) / c
            }
            _ => (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / c,
        }
    };
    let q: Vec<C64> = (0..n).map(|i| -d(i)).collect();
    let max_im = q.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    Ok(Recovered { q, max_im })
}

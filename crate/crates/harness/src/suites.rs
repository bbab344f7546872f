use crate::config::{Command, InverseData, RunConfig};
use crate::error::{Context, HarnessError, Result};
use crate::grid::{lambda_grid, ray_params, Family, LambdaPoint};
use crate::potentials::builtin_potential;
use crate::report::{num, Outcome, ReportRecord, Table};
use cubic_ist::cubicexp::{identity_residuals, IDENTITY_FAMILIES, SQRT3, ZETA};
use cubic_ist::invscatter::{
    build_a, solve_reflectionless, solve_sc2zero, uniform_grid, Fredholm, InverseSolution, RaySamples, SpectralData,
};
use cubic_ist::jost::{solve_u, solve_v, Potential, Profile};
use cubic_ist::scatter::{
    find_bound_states, fundamental_determinant, jump_residual, scattering_coefficients, structure_report,
    transition_full, transition_row0_at, wronskian_duality_residual, BoundStateConfig, BoundStateScan, BoundaryConfig,
    RayKind, ScatteringCoefficients, StructureReport, TransitionMatrix,
};
use cubic_ist::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

fn cnum(v: C64) -> [String; 2] {
    [num(v.re), num(v.im)]
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

/// Runs the suite selected by `cfg.command`.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.command.ok_or_else(|| HarnessError::usage("command", "no subcommand selected"))? {
        Command::VerifyIdentities => verify_identities(cfg),
        Command::Forward => forward(cfg),
        Command::BoundStates => bound_states(cfg),
        Command::Invert => invert(cfg),
        Command::Roundtrip => roundtrip(cfg),
        Command::JumpResidual => jump(cfg),
    }
}

/// Identity families at seeded random `(z, w)` in the disk `|·| ≤ radius`.
pub fn verify_identities(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.identities.samples;
    let r = cfg.identities.radius;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut disk = || C64::from_polar(r * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
    let pairs: Vec<(C64, C64)> = (0..n).map(|_| (disk(), disk())).collect();
    let per: Vec<Vec<f64>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (z, w))| {
            let rep =
                identity_residuals(*z, *w).context(|| format!("verify-identities: sample {i} (z = {z}, w = {w})"))?;
            let fam = rep.by_family();
            Ok(IDENTITY_FAMILIES
                .iter()
                .map(|f| fam.iter().find(|(g, _)| g == f).map_or(f64::NAN, |(_, v)| *v))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut header = vec!["sample", "z_re", "z_im", "w_re", "w_im"];
    header.extend(IDENTITY_FAMILIES);
    let mut table = Table::new("identities", &header);
    for (i, ((z, w), res)) in pairs.iter().zip(&per).enumerate() {
        let mut row = vec![i.to_string(), num(z.re), num(z.im), num(w.re), num(w.im)];
        row.extend(res.iter().map(|v| num(*v)));
        table.push(row);
    }
    let mut out = Outcome::default();
    for (j, f) in IDENTITY_FAMILIES.iter().enumerate() {
        let worst = max_of(per.iter().map(|r| r[j]));
        out.records.push(ReportRecord::new(
            format!("identity {f}"),
            "cubicexp::identity_residuals",
            worst,
            cfg.tolerances.identities,
        ));
    }
    out.tables.push(table);
    out.diag("samples", n);
    out.diag("radius", r);
    out.diag("seed", cfg.seed);
    Ok(out)
}

struct ForwardRow {
    point: LambdaPoint,
    t: TransitionMatrix,
    report: StructureReport,
    sc: ScatteringCoefficients,
    determinant: f64,
}

fn forward_point(pot: &Potential, p: &LambdaPoint) -> cubic_ist::Result<ForwardRow> {
    let l = p.lambda;
    let t = transition_full(pot, l)?;
    let tc = if l.im == 0.0 { t } else { transition_full(pot, l.conj())? };
    let report = structure_report(&t, &tc)?;
    let sc = ScatteringCoefficients::from_rows(l, t.t[0], tc.t[0])?;
    let free = -3.0 * SQRT3 * l.powu(3);
    let determinant = (fundamental_determinant(pot, l, 0.0)? - free).norm() / free.norm();
    Ok(ForwardRow { point: *p, t, report, sc, determinant })
}

fn potential_diagnostics(out: &mut Outcome, pot: &Potential) {
    let (th, holds) = pot.bound_state_condition();
    out.diag("decay_rate", num(pot.decay_rate()));
    out.diag("q1", num(pot.q1()));
    out.diag("q2", num(pot.q2()));
    out.diag("bound_state_condition_threshold", num(th));
    out.diag("bound_state_condition_holds", holds);
}

const DISK_FAMILIES: [Family; 3] = [Family::Segment, Family::RayZeta1, Family::RayZeta2];

/// Transition matrix, structure relations, free-operator checks, Wronskian
/// relations, rotation covariance and the large-`ω` limit.
pub fn forward(cfg: &RunConfig) -> Result<Outcome> {
    let pot = builtin_potential(&cfg.potential)?;
    let tol = &cfg.tolerances;
    let zero = pot.is_zero();
    let points = lambda_grid(&cfg.grid, pot.decay_rate())?;
    let disk: Vec<LambdaPoint> = points.iter().copied().filter(|p| p.family != Family::Asymptotic).collect();
    let rows: Vec<ForwardRow> = disk
        .par_iter()
        .map(|p| {
            forward_point(&pot, p).context(|| format!("forward: {} sample lambda = {}", p.family.name(), p.lambda))
        })
        .collect::<Result<_>>()?;

    let mut header = vec!["family", "boundary", "param", "lambda_re", "lambda_im"];
    const T_COLS: [&str; 18] = [
        "t00_re", "t00_im", "t01_re", "t01_im", "t02_re", "t02_im", "t10_re", "t10_im", "t11_re", "t11_im", "t12_re",
        "t12_im", "t20_re", "t20_im", "t21_re", "t21_im", "t22_re", "t22_im",
    ];
    header.extend(T_COLS);
    header.extend([
        "r0_re",
        "r0_im",
        "sc1_re",
        "sc1_im",
        "sc2_re",
        "sc2_im",
        "det_residual",
        "j_unitarity",
        "unitarity",
        "cofactor",
        "determinant_residual",
    ]);
    let mut table = Table::new("forward", &header);
    for r in &rows {
        let p = &r.point;
        let mut row = vec![p.family.name().to_string(), p.boundary.to_string(), num(p.param)];
        row.extend(cnum(p.lambda));
        for i in 0..3 {
            for j in 0..3 {
                row.extend(cnum(r.t.t[i][j]));
            }
        }
        row.extend(cnum(r.sc.r0));
        row.extend(cnum(r.sc.sc1));
        row.extend(cnum(r.sc.sc2));
        let s = &r.report;
        row.extend([s.det_residual, s.j_unitarity, s.unitarity, s.cofactor, r.determinant].map(num));
        table.push(row);
    }

    let mut out = Outcome::default();
    for fam in DISK_FAMILIES {
        let fr: Vec<&ForwardRow> = rows.iter().filter(|r| r.point.family == fam).collect();
        if fr.is_empty() {
            continue;
        }
        let f = fam.name();
        let worst = |g: fn(&ForwardRow) -> f64| max_of(fr.iter().map(|r| g(r)));
        let det_tol = if zero { tol.free_transition } else { tol.structure };
        out.records.extend([
            ReportRecord::new(
                format!("det T = 1 [{f}]"),
                "scatter::structure_report#det",
                worst(|r| r.report.det_residual),
                tol.structure,
            ),
            ReportRecord::new(
                format!("J-unitarity [{f}]"),
                "scatter::structure_report#j_unitarity",
                worst(|r| r.report.j_unitarity),
                tol.structure,
            ),
            ReportRecord::new(
                format!("unitarity condition [{f}]"),
                "scatter::structure_report#unitarity",
                worst(|r| r.report.unitarity),
                tol.structure,
            ),
            ReportRecord::new(
                format!("cofactor relation [{f}]"),
                "scatter::structure_report#cofactor",
                worst(|r| r.report.cofactor),
                tol.structure,
            ),
            ReportRecord::new(
                format!("fundamental determinant [{f}]"),
                "scatter::fundamental_determinant",
                worst(|r| r.determinant),
                det_tol,
            ),
        ]);
        if zero {
            let dev = max_of(fr.iter().map(|r| {
                max_of((0..9).map(|k| {
                    let (i, j) = (k / 3, k % 3);
                    (r.t.t[i][j] - if i == j { 1.0 } else { 0.0 }).norm()
                }))
            }));
            out.records.push(ReportRecord::new(
                format!("T = I [{f}]"),
                "scatter::transition_full#free",
                dev,
                tol.free_transition,
            ));
        }
    }

    let segment: Vec<LambdaPoint> = disk.iter().copied().filter(|p| p.family == Family::Segment).collect();
    let fw = &cfg.forward;
    let n = fw.rotation_points;
    let xs: Vec<f64> = (0..n).map(|i| -fw.rotation_span + 2.0 * fw.rotation_span * i as f64 / (n - 1) as f64).collect();
    if zero {
        let dev: Vec<[f64; 2]> = segment
            .par_iter()
            .map(|p| -> Result<[f64; 2]> {
                let l = p.lambda;
                let mut d = [0.0f64; 2];
                for k in 0..3 {
                    let ctx = || format!("forward: free Jost solutions at lambda = {l}");
                    let v = solve_v(&pot, l, k, &xs).context(ctx)?;
                    let u = solve_u(&pot, l, k, &xs).context(ctx)?;
                    for (side, fr) in [(0, &v), (1, &u)] {
                        for f in fr.iter() {
                            let e = (I * l * ZETA[k] * f.x).exp();
                            d[side] = d[side].max((f.value() - e).norm() / e.norm().max(1.0));
                        }
                    }
                }
                Ok(d)
            })
            .collect::<Result<_>>()?;
        out.records.push(ReportRecord::new(
            "free right Jost solutions",
            "jost::solve_v#free",
            max_of(dev.iter().map(|d| d[0])),
            tol.free_jost,
        ));
        out.records.push(ReportRecord::new(
            "free left Jost solutions",
            "jost::solve_u#free",
            max_of(dev.iter().map(|d| d[1])),
            tol.free_jost,
        ));
    }

    let wx = &fw.wronskian_x;
    if !wx.is_empty() {
        let w: Vec<[f64; 2]> = segment
            .par_iter()
            .map(|p| -> Result<[f64; 2]> {
                let l = p.lambda;
                let ctx = || format!("forward: Wronskian relations at lambda = {l}");
                let mut dual = 0.0f64;
                let mut spread = 0.0f64;
                let t0 = transition_row0_at(&pot, l, wx[0]).context(ctx)?[0];
                for &x in wx {
                    dual = dual.max(max_of(wronskian_duality_residual(&pot, l, x).context(ctx)?));
                    spread = spread.max((transition_row0_at(&pot, l, x).context(ctx)?[0] - t0).norm());
                }
                Ok([dual, spread])
            })
            .collect::<Result<_>>()?;
        out.records.push(ReportRecord::new(
            "Wronskian duality [segment]",
            "scatter::wronskian_duality_residual",
            max_of(w.iter().map(|d| d[0])),
            tol.wronskian,
        ));
        out.records.push(ReportRecord::new(
            "t00 independent of x [segment]",
            "scatter::transition_row0_at",
            max_of(w.iter().map(|d| d[1])),
            tol.wronskian,
        ));
    }

    let rot_pts: Vec<LambdaPoint> = segment.iter().step_by(fw.rotation_stride).copied().collect();
    let rot: Vec<[f64; 2]> = rot_pts
        .par_iter()
        .map(|p| -> Result<[f64; 2]> {
            let l = p.lambda;
            let ctx = || format!("forward: rotation covariance at lambda = {l}");
            let mut d = [0.0f64; 2];
            for k in 0..3 {
                let pairs = [
                    (
                        solve_v(&pot, l * ZETA[1], k, &xs).context(ctx)?,
                        solve_v(&pot, l, (k + 1) % 3, &xs).context(ctx)?,
                    ),
                    (
                        solve_u(&pot, l * ZETA[1], k, &xs).context(ctx)?,
                        solve_u(&pot, l, (k + 1) % 3, &xs).context(ctx)?,
                    ),
                ];
                for (side, (a, b)) in pairs.iter().enumerate() {
                    for (f, g) in a.iter().zip(b) {
                        d[side] = d[side].max((f.value() - g.value()).norm() / g.value().norm().max(1.0));
                    }
                }
            }
            Ok(d)
        })
        .collect::<Result<_>>()?;
    out.records.push(ReportRecord::new(
        "rotation covariance of v",
        "jost::solve_v#rotation",
        max_of(rot.iter().map(|d| d[0])),
        tol.rotation,
    ));
    out.records.push(ReportRecord::new(
        "rotation covariance of u",
        "jost::solve_u#rotation",
        max_of(rot.iter().map(|d| d[1])),
        tol.rotation,
    ));

    let asym: Vec<LambdaPoint> = points.iter().copied().filter(|p| p.family == Family::Asymptotic).collect();
    let ax = &fw.asymptotic_x;
    let cells: Vec<(f64, f64)> = asym.iter().flat_map(|p| ax.iter().map(move |x| (p.param, *x))).collect();
    let vals: Vec<(C64, C64, f64, f64)> = cells
        .par_iter()
        .map(|&(w, x)| -> Result<(C64, C64, f64, f64)> {
            let psi = solve_v(&pot, I * w, 0, &[x])
                .context(|| format!("forward: large-omega limit at omega = {w}, x = {x}"))?[0]
                .psi();
            let est = 3.0 * I * w * w * (psi - 1.0);
            let target = pot.integral_from(x);
            let err = (est - target).norm();
            Ok((psi, est, target, if target != 0.0 { err / target.abs() } else { err }))
        })
        .collect::<Result<_>>()?;
    let mut at = Table::new(
        "asymptotic",
        &["omega", "x", "psi_re", "psi_im", "estimate_re", "estimate_im", "target", "relative_error"],
    );
    for (&(w, x), (psi, est, target, rel)) in cells.iter().zip(&vals) {
        let mut row = vec![num(w), num(x)];
        row.extend(cnum(*psi));
        row.extend(cnum(*est));
        row.extend([num(*target), num(*rel)]);
        at.push(row);
    }
    if let Some(last) = asym.last() {
        for (j, x) in ax.iter().enumerate() {
            let series: Vec<f64> = (0..asym.len()).map(|i| vals[i * ax.len() + j].3).collect();
            out.records.push(ReportRecord::new(
                format!("large-omega limit at x = {x} (omega = {})", last.param),
                "jost::solve_v#asymptotic",
                series[series.len() - 1],
                tol.asymptotic,
            ));
            let growth = if zero { 0.0 } else { max_of(series.windows(2).map(|s| ((s[1] - s[0]) / s[0]).max(0.0))) };
            out.records.push(ReportRecord::new(
                format!("large-omega error decreasing at x = {x}"),
                "jost::solve_v#asymptotic",
                growth,
                0.0,
            ));
        }
    }

    out.tables.push(table);
    out.tables.push(at);
    potential_diagnostics(&mut out, &pot);
    Ok(out)
}

fn scan_table(scan: &BoundStateScan) -> Table {
    let mut t = Table::new(
        "bound_states",
        &[
            "ray",
            "kappa",
            "z_re",
            "z_im",
            "eigenvalue_re",
            "eigenvalue_im",
            "t00_abs",
            "t00_prime_re",
            "t00_prime_im",
            "norming_re",
            "norming_im",
            "multiplicity_warning",
        ],
    );
    for s in &scan.states {
        let mut row = vec![s.ray.name().to_string(), num(s.kappa)];
        row.extend(cnum(s.z));
        row.extend(cnum(s.eigenvalue));
        row.push(num(s.t00_abs));
        row.extend(cnum(s.t00_prime));
        match s.norming {
            Some(b) => row.extend(cnum(b)),
            None => row.extend([String::new(), String::new()]),
        }
        row.push(s.multiplicity_warning.to_string());
        t.push(row);
    }
    t
}

fn condition_table(pot: &Potential, scan: &BoundStateScan) -> Table {
    let mut t = Table::new(
        "condition",
        &[
            "threshold",
            "decay_rate",
            "holds",
            "q1",
            "q2",
            "kappa_min",
            "kappa_max",
            "min_t00_positive",
            "min_t00_negative",
        ],
    );
    t.push(vec![
        num(scan.condition_threshold),
        num(pot.decay_rate()),
        scan.condition_holds.to_string(),
        num(pot.q1()),
        num(pot.q2()),
        num(scan.kappa_range.0),
        num(scan.kappa_range.1),
        num(scan.min_abs_t00[0]),
        num(scan.min_abs_t00[1]),
    ]);
    t
}

/// Zeros of `t₀₀` on both rays with the finiteness-condition diagnostic.
pub fn bound_states(cfg: &RunConfig) -> Result<Outcome> {
    let pot = builtin_potential(&cfg.potential)?;
    let bcfg = BoundStateConfig { zero_tol: cfg.tolerances.bound_zero, ..Default::default() };
    let scan = find_bound_states(&pot, &bcfg).context(|| "bound-states: scan".into())?;
    let mut out = Outcome::default();
    out.records.push(ReportRecord::new(
        "bound-state zeros of t00",
        "scatter::find_bound_states",
        max_of(scan.states.iter().map(|s| s.t00_abs)),
        cfg.tolerances.bound_zero,
    ));
    out.tables.push(scan_table(&scan));
    out.tables.push(condition_table(&pot, &scan));
    out.diag("bound_states", scan.states.len());
    out.diag("condition_threshold", num(scan.condition_threshold));
    out.diag("condition_holds", scan.condition_holds);
    potential_diagnostics(&mut out, &pot);
    Ok(out)
}

fn load_data(cfg: &RunConfig) -> Result<SpectralData> {
    let path = cfg.data.as_ref().ok_or_else(|| HarnessError::usage("data", "a spectral data file is required"))?;
    let data = InverseData::load(path)?.to_spectral()?;
    if !data.sc2_vanishes() {
        return Err(HarnessError::usage("data.sc2", "only data with sc2 identically zero can be inverted"));
    }
    Ok(data)
}

/// Reconstruction on the configured x-grid plus Fredholm checks.
pub fn invert_data(cfg: &RunConfig, data: &SpectralData) -> Result<(Vec<f64>, InverseSolution, Outcome)> {
    let xg = &cfg.x_grid;
    let x = uniform_grid(xg.min, xg.max, xg.dx).context(|| "invert: x-grid".into())?;
    let icfg = cfg.inverse_config();
    let reflectionless = data.is_reflectionless();
    let sol = if reflectionless {
        solve_reflectionless(data, &x, &icfg).context(|| "invert: reflectionless solver".into())?
    } else {
        solve_sc2zero(data, &x, &icfg).context(|| "invert: sc2 = 0 solver".into())?
    };
    let mut out = Outcome::default();
    let m = data.m() + data.m_hat();
    if m > 0 {
        let fr = Fredholm::new(icfg.grid(data).context(|| "invert: quadrature grid".into())?, icfg.cond_limit)
            .context(|| "invert: Fredholm operator".into())?;
        let cols: Vec<(Vec<C64>, Vec<C64>)> = fr
            .grid()
            .nodes
            .iter()
            .map(|t| build_a(data, *t).context(|| format!("invert: right-hand side at t = {t}")))
            .collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        for r in 0..m {
            let rhs: Vec<C64> = cols.iter().map(|(a, ah)| if r < data.m() { a[r] } else { ah[r - data.m()] }).collect();
            let back = fr.apply(&fr.solve(&rhs));
            let scale = max_of(rhs.iter().map(|v| v.norm())).max(1.0);
            worst = worst.max(max_of(back.iter().zip(&rhs).map(|(p, q)| (p - q).norm())) / scale);
        }
        out.records.push(ReportRecord::new(
            "Fredholm solve-then-apply",
            "invscatter::Fredholm::apply",
            worst,
            cfg.tolerances.fredholm,
        ));
        out.records.push(ReportRecord::new(
            "norm of M below 1",
            "invscatter::Fredholm::norm_estimate",
            sol.m_norm,
            1.0,
        ));
        if reflectionless {
            out.records.push(ReportRecord::new(
                "F decayed at the right edge",
                "invscatter::recover_q#decay",
                sol.right_edge_f,
                cfg.tolerances.decay,
            ));
        }
    }
    let mut t = Table::new("q", &["x", "q_re", "q_im", "F_re", "F_im"]);
    for ((xv, q), f) in x.iter().zip(&sol.q).zip(&sol.f) {
        t.push(vec![num(*xv), num(q.re), num(q.im), num(f.re), num(f.im)]);
    }
    out.tables.push(t);
    out.diag("solver", if reflectionless { "reflectionless" } else { "sc2-zero" });
    out.diag("max_im_q", num(sol.max_im_q));
    out.diag("m_norm", num(sol.m_norm));
    out.diag("fredholm_condition", num(sol.condition));
    out.diag("max_system_condition", num(sol.max_system_condition));
    out.diag("right_edge_f", num(sol.right_edge_f));
    Ok((x, sol, out))
}

/// Reconstructs `F` and `q` from a spectral data file.
pub fn invert(cfg: &RunConfig) -> Result<Outcome> {
    let data = load_data(cfg)?;
    Ok(invert_data(cfg, &data)?.2)
}

/// Inverts the data, then runs the forward map on `Re q` and compares the
/// scattering coefficients on the rays and the bound states with the data.
pub fn roundtrip(cfg: &RunConfig) -> Result<Outcome> {
    let data = load_data(cfg)?;
    let (x, sol, mut out) = invert_data(cfg, &data)?;
    let a = cfg.roundtrip.decay_rate;
    let qs: Vec<f64> = sol.q.iter().map(|v| v.re).collect();
    let pot = Potential::new(Profile::Samples { xs: x, qs }, a)
        .context(|| "roundtrip: reconstructed potential (widen x_grid so that q decays)".into())?;
    let ts = ray_params(&lambda_grid(&cfg.grid, a)?);
    let vals: Vec<cubic_ist::Result<(C64, C64)>> = ts
        .par_iter()
        .map(|&t| {
            let s1 = scattering_coefficients(&pot, I * ZETA[1] * t)?.sc1;
            let s2 = scattering_coefficients(&pot, I * ZETA[2] * t)?.sc2;
            Ok((s1, s2))
        })
        .collect();
    let eval = |s: &Option<RaySamples>, t: f64| s.as_ref().map_or(C64::new(0.0, 0.0), |r| r.eval(t));
    let mut table = Table::new(
        "roundtrip",
        &["t", "sc1_re", "sc1_im", "data_sc1_re", "data_sc1_im", "sc2_re", "sc2_im", "data_sc2_re", "data_sc2_im"],
    );
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for (&t, v) in ts.iter().zip(&vals) {
        let (e1, e2) = (eval(&data.sc1, t), eval(&data.sc2, t));
        let (s1, s2) = match v {
            Ok(p) => *p,
            Err(e) => {
                failures.push(format!("t = {t}: {e}"));
                (C64::new(f64::NAN, f64::NAN), C64::new(f64::NAN, f64::NAN))
            }
        };
        d1 = if s1.is_nan() { f64::INFINITY } else { d1.max((s1 - e1).norm()) };
        d2 = if s2.is_nan() { f64::INFINITY } else { d2.max((s2 - e2).norm()) };
        let mut row = vec![num(t)];
        for v in [s1, e1, s2, e2] {
            row.extend(cnum(v));
        }
        table.push(row);
    }
    let bcfg = BoundStateConfig { zero_tol: cfg.tolerances.bound_zero, ..Default::default() };
    let mut want: Vec<f64> = data.bound.iter().map(|b| b.kappa).collect();
    let mut want_hat: Vec<f64> = data.bound_hat.iter().map(|b| b.kappa).collect();
    want.sort_by(f64::total_cmp);
    want_hat.sort_by(f64::total_cmp);
    let mismatch = |a: &[f64], b: &[f64]| {
        if a.len() != b.len() {
            f64::INFINITY
        } else {
            max_of(a.iter().zip(b).map(|(p, q)| (p - q).abs()))
        }
    };
    let list = |v: &[f64]| v.iter().map(|k| num(*k)).collect::<Vec<_>>().join(" ");
    let kappa_err = match find_bound_states(&pot, &bcfg) {
        Ok(scan) => {
            let found =
                |ray: RayKind| -> Vec<f64> { scan.states.iter().filter(|s| s.ray == ray).map(|s| s.kappa).collect() };
            let (got, got_hat) = (found(RayKind::Positive), found(RayKind::Negative));
            out.diag("recovered_kappa", list(&got));
            out.diag("recovered_kappa_hat", list(&got_hat));
            mismatch(&got, &want).max(mismatch(&got_hat, &want_hat))
        }
        Err(e) => {
            failures.push(format!("bound-state scan: {e}"));
            f64::INFINITY
        }
    };
    let tol = cfg.tolerances.roundtrip;
    out.records.extend([
        ReportRecord::new("roundtrip sc1 on i l_zeta1", "scatter::scattering_coefficients#sc1", d1, tol),
        ReportRecord::new("roundtrip sc2 on i l_zeta2", "scatter::scattering_coefficients#sc2", d2, tol),
        ReportRecord::new("roundtrip bound states", "scatter::find_bound_states#kappa", kappa_err, tol),
    ]);
    let ok = || vals.iter().filter_map(|v| v.as_ref().ok());
    out.diag("data_kappa", list(&want));
    out.diag("data_kappa_hat", list(&want_hat));
    out.diag("max_abs_sc1", num(max_of(ok().map(|v| v.0.norm()))));
    out.diag("max_abs_sc2", num(max_of(ok().map(|v| v.1.norm()))));
    out.diag("forward_decay_rate", num(a));
    out.diag("forward_failures", failures.len());
    for (i, f) in failures.iter().enumerate() {
        out.diag(format!("forward_failure[{i}]"), f);
    }
    out.tables.push(table);
    Ok(out)
}

/// Jump relations on `i l_{ζ₁}` and `i l_{ζ₂}` at `x`, with the
/// boundary-value system diagnostic.
pub fn jump(cfg: &RunConfig) -> Result<Outcome> {
    let pot = builtin_potential(&cfg.potential)?;
    let scan =
        find_bound_states(&pot, &BoundStateConfig::default()).context(|| "jump-residual: bound-state scan".into())?;
    let ts = match &cfg.jump.t {
        Some(t) => t.clone(),
        None => ray_params(&lambda_grid(&cfg.grid, pot.decay_rate())?),
    };
    let x = cfg.jump.x;
    let bc = BoundaryConfig::default();
    let boundary = cfg.jump.boundary.then_some(&bc);
    let res: Vec<_> = ts
        .par_iter()
        .map(|&t| jump_residual(&pot, t, x, &scan.states, boundary).context(|| format!("jump-residual: t = {t}")))
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        "jump",
        &[
            "t",
            "x",
            "ray1_lhs_re",
            "ray1_lhs_im",
            "ray1_rhs_re",
            "ray1_rhs_im",
            "ray1_residual",
            "ray2_lhs_re",
            "ray2_lhs_im",
            "ray2_rhs_re",
            "ray2_rhs_im",
            "ray2_residual",
            "boundary_psi2",
            "boundary_psi1",
        ],
    );
    for j in &res {
        let mut row = vec![num(j.t), num(j.x)];
        for s in [&j.ray1, &j.ray2] {
            row.extend(cnum(s.lhs));
            row.extend(cnum(s.rhs));
            row.push(num(s.residual));
        }
        match j.boundary_system {
            Some(b) => row.extend(b.map(num)),
            None => row.extend([String::new(), String::new()]),
        }
        table.push(row);
    }
    let mut out = Outcome::default();
    let tol = cfg.tolerances.jump;
    out.records.push(ReportRecord::new(
        "jump relation on i l_zeta1",
        "scatter::jump_residual#ray1",
        max_of(res.iter().map(|j| j.ray1.residual)),
        tol,
    ));
    out.records.push(ReportRecord::new(
        "jump relation on i l_zeta2",
        "scatter::jump_residual#ray2",
        max_of(res.iter().map(|j| j.ray2.residual)),
        tol,
    ));
    if boundary.is_some() {
        let b = max_of(res.iter().filter_map(|j| j.boundary_system).flatten());
        out.diag("boundary_system_max_residual", num(b));
    }
    out.diag("bound_states", scan.states.len());
    out.tables.push(table);
    potential_diagnostics(&mut out, &pot);
    Ok(out)
}

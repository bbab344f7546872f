use crate::error::{HarnessError, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Anchors of report records: each names the routine (and relation) whose
/// residual the record carries.
pub const ANCHORS: &[(&str, &str)] = &[
    ("cubicexp::identity_residuals", "generalized-exponential identity families"),
    ("jost::solve_v#free", "right Jost solutions equal e^{iλζ_k x} for q = 0"),
    ("jost::solve_u#free", "left Jost solutions equal e^{iλζ_k x} for q = 0"),
    ("jost::solve_v#rotation", "v_k(λζ₁, x) = v_{k+1}(λ, x)"),
    ("jost::solve_u#rotation", "u_k(λζ₁, x) = u_{k+1}(λ, x)"),
    ("jost::solve_v#asymptotic", "3iω²(ψ₀(iω, x) - 1) → ∫_x^∞ q"),
    ("scatter::transition_full#free", "T(λ) = I for q = 0"),
    ("scatter::fundamental_determinant", "det[v_l^{(n)}] = -3√3λ³"),
    ("scatter::structure_report#det", "det T = 1"),
    ("scatter::structure_report#j_unitarity", "J = T(λ) J T(conj λ)^H"),
    ("scatter::structure_report#unitarity", "r₀r₀* = 1 + ζ₁sc₂sc₁* + ζ₂sc₁sc₂*"),
    ("scatter::structure_report#cofactor", "t₀₀* = T₀₀"),
    ("scatter::wronskian_duality_residual", "Wronskians of v_k equal √3λ ζ v*"),
    ("scatter::transition_row0_at", "t₀₀ independent of x"),
    ("scatter::find_bound_states", "refined zeros of t₀₀"),
    ("scatter::jump_residual#ray1", "ψ₂* - r₀f₀₂ = s₁ψ₀* on i l_{ζ₁}"),
    ("scatter::jump_residual#ray2", "ψ₁* - r₀f₀₁ = s₂ψ₀* on i l_{ζ₂}"),
    ("invscatter::Fredholm::apply", "(I - M)(I - M)^{-1} rhs = rhs"),
    ("invscatter::Fredholm::norm_estimate", "‖M‖ < 1"),
    ("invscatter::recover_q#decay", "|F| decayed at the right edge"),
    ("scatter::scattering_coefficients#sc1", "forward sc₁ of the reconstruction against the data"),
    ("scatter::scattering_coefficients#sc2", "forward sc₂ of the reconstruction against the data"),
    ("scatter::find_bound_states#kappa", "forward bound states of the reconstruction against the data"),
];

pub fn anchor_known(anchor: &str) -> bool {
    ANCHORS.iter().any(|(a, _)| *a == anchor)
}

/// One named residual against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub check: String,
    pub anchor: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ReportRecord {
    /// `pass` is `residual <= tolerance` (false for NaN).
    pub fn new(check: impl Into<String>, anchor: &'static str, residual: f64, tolerance: f64) -> Self {
        debug_assert!(anchor_known(anchor), "unknown anchor {anchor}");
        ReportRecord { check: check.into(), anchor, residual, tolerance, pass: residual <= tolerance }
    }
}

/// Formats with 17 significant digits.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// A named CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table { name, header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(&self.header)?;
        for r in &self.rows {
            c.write_record(r)?;
        }
        c.flush().map_err(|source| HarnessError::Io { path: self.name.into(), source })?;
        Ok(())
    }

    /// Column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }
}

/// Free-form value reported alongside the records (not pass/fail).
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub name: String,
    pub value: String,
}

/// Result of one suite: records, the primary table first, then secondary
/// tables, and diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub records: Vec<ReportRecord>,
    pub tables: Vec<Table>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn record(&self, check: &str) -> Option<&ReportRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    pub fn diagnostic(&self, name: &str) -> Option<&str> {
        self.diagnostics.iter().find(|d| d.name == name).map(|d| d.value.as_str())
    }

    pub fn diag(&mut self, name: impl Into<String>, value: impl ToString) {
        self.diagnostics.push(Diagnostic { name: name.into(), value: value.to_string() });
    }

    pub fn records_table(&self) -> Table {
        let mut t = Table::new("report", &["check", "anchor", "residual", "tolerance", "pass"]);
        for r in &self.records {
            t.push(vec![r.check.clone(), r.anchor.into(), num(r.residual), num(r.tolerance), r.pass.to_string()]);
        }
        t
    }
}

/// Path of a secondary table next to the primary output: `dir/stem_name.csv`.
pub fn sibling(out: &Path, name: &str) -> std::path::PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_{name}.csv"))
}

pub fn write_file(path: &Path, table: &Table) -> Result<()> {
    let f =
        std::fs::File::create(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    table.write(std::io::BufWriter::new(f))
}

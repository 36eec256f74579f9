//! CLI commands: each computes a table, writes it as CSV and/or JSON under the
//! output directory and reports whether its check passed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cantrans::{
    ct_residual_table, flip_m, parse_phase_poly, rotshift_m, rotshift_m_translated, CtSpec, MatrixElementFn,
};
use crate::config::{CtCandidate, CtExample, ForceCfg, Format, RunConfig};
use crate::dynamics::{classical_forced_flow, forced_trajectory, interaction_forced_trajectory, kernel_pairing, p_mechanise, ForceSpec, OscParams};
use crate::kepler::{constants_discrepancy, spectrum_report, RadialGrid};
use crate::spaces::{kernel_coherent, CoherentLabel};
use crate::verify::{self, Report};

#[derive(Debug, Error)]
pub enum CommandError {
    /// Input rejected before any numerics ran.
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Numerics(#[from] crate::Error),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Rectangular output with named columns.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(k) => json!(k),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect::<Map<_, _>>()))
                .collect(),
        )
    }

    fn write_csv(&self, path: &Path) -> Result<(), CommandError> {
        let wrap = |source| CommandError::Csv { path: path.to_path_buf(), source };
        let mut w = csv::Writer::from_path(path).map_err(wrap)?;
        w.write_record(&self.columns).map_err(wrap)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).map_err(wrap)?;
        }
        w.flush().map_err(|source| CommandError::Io { path: path.to_path_buf(), source })
    }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn n(x: f64) -> Cell {
    Cell::Num(x)
}

struct Writer<'a> {
    dir: &'a Path,
    format: Format,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path, format: Format) -> Result<Self, CommandError> {
        fs::create_dir_all(dir).map_err(|source| CommandError::Io { path: dir.to_path_buf(), source })?;
        Ok(Writer { dir, format, files: Vec::new() })
    }

    /// `stem.csv` and/or `stem.json` according to the format.
    fn table(&mut self, stem: &str, t: &Table) -> Result<(), CommandError> {
        if self.format.csv() {
            let p = self.dir.join(format!("{stem}.csv"));
            t.write_csv(&p)?;
            self.files.push(p);
        }
        if self.format.json() {
            self.json(stem, &t.to_json())?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, stem: &str, v: &T) -> Result<(), CommandError> {
        let p = self.dir.join(format!("{stem}.json"));
        let text = serde_json::to_string_pretty(v).expect("serialisable output");
        fs::write(&p, text + "\n").map_err(|source| CommandError::Io { path: p.clone(), source })?;
        self.files.push(p);
        Ok(())
    }
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    use crate::config::Command::*;
    match cfg.command {
        Verify => verify_cmd(cfg, out),
        Oscillator => oscillator(cfg, out),
        ClassicalLimit => classical_limit(cfg, out),
        Cantrans => cantrans(cfg, out),
        Kepler => kepler(cfg, out),
    }
}

fn verify_cmd(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let reports: Vec<Report> = match &cfg.suite {
        Some(s) => vec![verify::run_suite(s, &cfg.tolerances, cfg.seed)?],
        None => verify::run_all(&cfg.tolerances, cfg.seed),
    };
    let mut t = Table::new(&["suite", "id", "status", "measured", "expected", "tolerance", "cite", "detail"]);
    let mut summary = String::new();
    for r in &reports {
        let failed = r.cases.iter().filter(|c| c.status == verify::Status::Fail).count();
        summary += &format!("{:<9} {} ({} cases, {failed} failed)\n", r.suite, if r.passed { "PASS" } else { "FAIL" }, r.cases.len());
        for c in &r.cases {
            if c.status == verify::Status::Fail {
                summary += &format!("    FAIL {} measured {:.3e} expected {:.3e} tol {:.1e}\n", c.id, c.measured, c.expected, c.tolerance);
            }
            t.push(vec![
                Cell::Text(r.suite.clone()),
                Cell::Text(c.id.clone()),
                Cell::Text(c.status.to_string()),
                n(c.measured),
                n(c.expected),
                n(c.tolerance),
                Cell::Text(c.cite.clone()),
                Cell::Text(c.detail.clone()),
            ]);
        }
    }
    let mut w = Writer::new(out, cfg.format)?;
    // The JSON report always carries the full structure.
    w.json("report", &reports)?;
    if cfg.format.csv() {
        let p = out.join("report.csv");
        t.write_csv(&p)?;
        w.files.push(p);
    }
    Ok(Outcome { passed: reports.iter().all(|r| r.passed), summary, files: w.files })
}

fn force_spec(f: ForceCfg) -> ForceSpec {
    match f {
        ForceCfg::Zero => ForceSpec::Zero,
        ForceCfg::Periodic { z0, big_omega } => ForceSpec::Periodic { z0, big_omega },
    }
}

/// Symbol flow (q, p), Hamilton trajectory (q_hamilton, p_hamilton) and the
/// coherent label with its phase. A row whose coherent columns cannot be
/// computed leaves them empty and says why in `status`.
fn oscillator(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let o = &cfg.oscillator;
    let pr = OscParams::new(o.m, o.omega)?;
    let force = force_spec(o.force);
    let mut t = Table::new(&["t", "q", "p", "a", "b", "phase_re", "phase_im", "q_hamilton", "p_hamilton", "status"]);
    let start = CoherentLabel::new(cfg.h, vec![o.a0], vec![o.b0])?;
    let mut bad_rows = 0;
    for time in cfg.grid("time").linear() {
        let (q, p) = classical_forced_flow(o.q0, o.p0, time, &pr, &force);
        let (qh, ph) = forced_trajectory(o.q0, o.p0, time, &pr, &force);
        let coherent = if o.m == 1.0 && o.omega == 1.0 {
            interaction_forced_trajectory(&start, &force, time).map_err(|e| e.to_string())
        } else {
            Err("coherent trajectory needs m = omega = 1".to_string())
        };
        let mut row = vec![n(time), n(q), n(p)];
        let status = match coherent {
            Ok(tr) if [tr.a, tr.b, tr.phase.re, tr.phase.im].iter().all(|x| x.is_finite()) => {
                row.extend([n(tr.a), n(tr.b), n(tr.phase.re), n(tr.phase.im)]);
                "ok".to_string()
            }
            Ok(_) => {
                row.extend(std::iter::repeat_n(Cell::Empty, 4));
                "non-finite coherent trajectory".to_string()
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(Cell::Empty, 4));
                e
            }
        };
        if status != "ok" {
            bad_rows += 1;
        }
        row.extend([n(qh), n(ph), Cell::Text(status)]);
        t.push(row);
    }
    let mut w = Writer::new(out, cfg.format)?;
    w.table("oscillator", &t)?;
    let mut summary = format!("oscillator: {} time points\n", t.rows.len());
    if bad_rows > 0 {
        summary += &format!("{bad_rows} rows without coherent columns (see status)\n");
    }
    Ok(Outcome { passed: true, summary, files: w.files })
}

/// ⟨B, l_(a,b)⟩ for shrinking h against the classical value B(a, b).
/// Passes when the error at the smallest h is within the classical-limit tolerance.
fn classical_limit(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let c = &cfg.classical;
    let obs = parse_phase_poly(&c.observable, cfg.n, true).map_err(|e| CommandError::Input(e.to_string()))?;
    let b = p_mechanise(&obs)?;
    let a = vec![c.a; cfg.n];
    let bb = vec![c.b; cfg.n];
    let point: Vec<f64> = a.iter().chain(&bb).copied().collect();
    let classical = obs.eval_real(&point);
    let mut t = Table::new(&["h", "k_re", "k_im", "classical", "error"]);
    let mut last = f64::NAN;
    for h in cfg.grid("planck").geometric_descending() {
        let k = kernel_pairing(&b, &kernel_coherent(h, &a, &bb))?;
        last = (k - classical).norm();
        t.push(vec![n(h), n(k.re), n(k.im), n(classical.re), n(last)]);
    }
    let mut w = Writer::new(out, cfg.format)?;
    w.table("classical_limit", &t)?;
    let tol = cfg.tolerances.get("classical_limit");
    let passed = last <= tol;
    let summary = format!("classical limit: error {last:.3e} at smallest h (tolerance {tol:.1e})\n");
    Ok(Outcome { passed, summary, files: w.files })
}

fn cantrans(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let ct = &cfg.cantrans;
    let h = cfg.h;
    let spec = match ct.example {
        CtExample::Flip => CtSpec::flip(),
        CtExample::Rotshift => CtSpec::shifted_rotation(ct.t, ct.c),
        CtExample::Custom => {
            let spec = CtSpec::parse(cfg.n, &strs(&ct.f), &strs(&ct.big_f), &strs(&ct.g), &strs(&ct.big_g))
                .map_err(|e| CommandError::Input(e.to_string()))?;
            let tol = cfg.tolerances.get("bracket_identity");
            if !spec.is_canonical(tol) {
                return Err(CommandError::Input(format!(
                    "transformation is not canonical: bracket defect {:.3e} exceeds {tol:.1e}",
                    spec.bracket_defect()
                )));
            }
            spec
        }
    };
    let candidate = match ct.example {
        CtExample::Flip => CtCandidate::Flip,
        CtExample::Rotshift | CtExample::Custom => ct.candidate,
    };
    let m: MatrixElementFn = match candidate {
        CtCandidate::Flip => flip_m(h)?,
        CtCandidate::Rotshift => rotshift_m(h, ct.t, ct.c)?,
        CtCandidate::Translated => rotshift_m_translated(h, ct.t, ct.c)?,
    };
    let grid = cfg.grid("labels").linear();
    let rows = ct_residual_table(&spec, &m, &grid)?;
    let k = spec.n;
    let mut cols: Vec<String> = Vec::new();
    for prefix in ["a", "b", "ap", "bp"] {
        cols.extend((1..=k).map(|i| format!("{prefix}{i}")));
    }
    cols.extend(["equation", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"].map(String::from));
    let mut t = Table { columns: cols, rows: Vec::new() };
    let mut worst = 0.0f64;
    for r in &rows {
        let d = r.lhs - r.rhs;
        let rel = d.norm() / r.lhs.norm().max(r.rhs.norm()).max(1.0);
        worst = worst.max(rel);
        let mut row: Vec<Cell> = r.point.iter().map(|&x| n(x)).collect();
        row.push(Cell::Int(r.equation as i64 + 1));
        row.extend([n(r.lhs.re), n(r.lhs.im), n(r.rhs.re), n(r.rhs.im), n(d.norm())]);
        t.push(row);
    }
    let mut w = Writer::new(out, cfg.format)?;
    w.table("cantrans", &t)?;
    let tol = cfg.tolerances.get("ct_residual");
    let passed = worst <= tol;
    let summary = format!("cantrans: {} rows, worst relative residual {worst:.3e} (tolerance {tol:.1e})\n", t.rows.len());
    Ok(Outcome { passed, summary, files: w.files })
}

fn kepler(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let h = cfg.h;
    let grid = || RadialGrid::new(cfg.kepler_r_max(), cfg.kepler.points);
    let rows = spectrum_report(cfg.kepler.nmax, h, &grid()?)?;
    let mut t = Table::new(&["n", "l", "E_fd", "E_extrapolated", "E_paper_formula", "rel_discrepancy", "ratio"]);
    // E_n/E_1, which should follow 1/n²
    let ground = rows.first().map(|r| r.e_extrapolated).unwrap_or(f64::NAN);
    for r in &rows {
        t.push(vec![
            Cell::Int(i64::from(r.n)),
            Cell::Int(i64::from(r.l)),
            n(r.e_fd),
            n(r.e_extrapolated),
            n(r.e_formula),
            n(r.rel_discrepancy),
            n(r.e_extrapolated / ground),
        ]);
    }
    let constants = constants_discrepancy(h, &grid()?)?;
    let mut w = Writer::new(out, cfg.format)?;
    w.table("kepler_spectrum", &t)?;
    w.json("kepler_constants", &constants)?;
    let worst = rows.iter().map(|r| (r.e_extrapolated / ground * f64::from(r.n * r.n) - 1.0).abs()).fold(0.0, f64::max);
    let scale = rows.first().map(|r| r.e_extrapolated / r.e_formula).unwrap_or(f64::NAN);
    let summary = format!(
        "kepler: {} rows, worst deviation of E_n/E_1 from 1/n^2 {worst:.2e}, E_1 measured/quoted {scale:.6}\n",
        rows.len()
    );
    Ok(Outcome { passed: true, summary, files: w.files })
}

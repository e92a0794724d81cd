//! CSV and plain-text report writers.
//!
//! Numbers are written with 12 significant digits; nothing time-dependent
//! goes into a file, so identical specs give identical bytes.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use holobus_core::protocols::ProtocolConfig;
use holobus_core::state::Qubit;

use crate::runner::{FluxOutcome, PointOutcome, SweepOutcome};
use crate::spec::{InputSource, ProtocolKind, SweepPlan};

/// 12 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn qubit_cells(q: &Qubit) -> [String; 4] {
    let [a, b] = q.amplitudes();
    [num(a.re), num(a.im), num(b.re), num(b.im)]
}

fn key_header(kind: ProtocolKind) -> [&'static str; 2] {
    match kind {
        ProtocolKind::Cnot => ["h", "t_fin"],
        _ => ["n_sites", "t_fin"],
    }
}

fn key_cells(kind: ProtocolKind, p: &PointOutcome) -> [String; 2] {
    match kind {
        ProtocolKind::Cnot => [num(p.point.h), num(p.point.t_fin)],
        _ => [p.point.n_sites.to_string(), num(p.point.t_fin)],
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>, OutputError> {
    csv::Writer::from_path(path).map_err(|source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows<I>(path: &Path, header: Vec<String>, rows: I) -> Result<(), OutputError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let err = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(&header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), OutputError> {
    std::fs::write(path, text).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One row per grid point, in grid order.
pub fn write_sweep_csv(path: &Path, plan: &SweepPlan, out: &SweepOutcome) -> Result<(), OutputError> {
    let kind = plan.kind;
    let random_input = plan.input == InputSource::Random;
    let random_control = plan.control == InputSource::Random && kind == ProtocolKind::Cnot;
    let mut header: Vec<String> = key_header(kind).iter().map(|s| s.to_string()).collect();
    let amps = ["alpha_re", "alpha_im", "beta_re", "beta_im"];
    if random_input {
        header.extend(amps.iter().map(|a| format!("input_{a}")));
    }
    if random_control {
        header.extend(amps.iter().map(|a| format!("control_{a}")));
    }
    header.extend(
        ["fidelity", "one_minus_fidelity", "sz_out", "min_gap", "dt_halving_delta", "error"]
            .iter()
            .map(|s| s.to_string()),
    );
    let rows = out.points.iter().map(|p| {
        let mut row: Vec<String> = key_cells(kind, p).into();
        if random_input {
            row.extend(qubit_cells(&p.input));
        }
        if random_control {
            row.extend(qubit_cells(&p.control.unwrap_or(Qubit::up())));
        }
        match &p.result {
            Ok(r) => {
                let min_gap = r.gap_trace.as_ref().and_then(|g| g.min_gap());
                row.extend([
                    num(r.fidelity),
                    num(r.one_minus_fidelity()),
                    num(r.sz_out),
                    opt(min_gap),
                    opt(r.dt_halving_delta),
                    String::new(),
                ]);
            }
            Err(e) => {
                row.extend((0..5).map(|_| String::new()));
                row.push(e.to_string());
            }
        }
        row
    });
    write_rows(path, header, rows)
}

/// Gap samples of every point that recorded a trace.
pub fn write_gap_csv(path: &Path, plan: &SweepPlan, out: &SweepOutcome) -> Result<(), OutputError> {
    let kind = plan.kind;
    let mut header: Vec<String> = key_header(kind).iter().map(|s| s.to_string()).collect();
    header.extend(
        ["s", "ground_energy", "degeneracy", "gap", "degeneracy_changed"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut rows = Vec::new();
    for p in &out.points {
        let Ok(r) = &p.result else { continue };
        let Some(trace) = &r.gap_trace else { continue };
        for s in &trace.samples {
            let mut row: Vec<String> = key_cells(kind, p).into();
            row.extend([
                num(s.s),
                num(s.ground_energy),
                s.degeneracy.to_string(),
                num(s.gap),
                s.degeneracy_changed.to_string(),
            ]);
            rows.push(row);
        }
    }
    write_rows(path, header, rows)
}

fn describe_qubit(q: &Qubit) -> String {
    let [a, b] = q.amplitudes();
    format!(
        "alpha = ({}, {}), beta = ({}, {})",
        num(a.re),
        num(a.im),
        num(b.re),
        num(b.im)
    )
}

fn describe_source(source: InputSource, seed: u64) -> String {
    match source {
        InputSource::Fixed(q) => describe_qubit(&q),
        InputSource::Random => format!("random (seed {seed})"),
    }
}

pub fn sweep_report(plan: &SweepPlan, out: &SweepOutcome) -> String {
    let kind = plan.kind;
    let evo = plan.base.evolution();
    let mut s = String::new();
    let _ = writeln!(s, "protocol: {}", kind.as_str());
    let _ = writeln!(
        s,
        "grid: t_fin x{}, n_sites x{}, h x{} = {} points",
        plan.grid.t_fin.len(),
        plan.grid.n_sites.len(),
        plan.grid.h.len(),
        plan.grid.len()
    );
    if let ProtocolConfig::Gate(g) = &plan.base {
        let m = g.frame.matrix();
        let _ = writeln!(s, "twist start: {}", g.twist_start);
        for (label, col) in ["x'", "y'", "z'"].iter().zip(0..3) {
            let _ = writeln!(
                s,
                "frame {label} = ({}, {}, {})",
                num(m[(0, col)]),
                num(m[(1, col)]),
                num(m[(2, col)])
            );
        }
    }
    let _ = writeln!(s, "input: {}", describe_source(plan.input, plan.seed));
    if kind == ProtocolKind::Cnot {
        let _ = writeln!(s, "control: {}", describe_source(plan.control, plan.seed));
    }
    let _ = writeln!(
        s,
        "dt: {}, propagator: {:?}, convergence_tol: {}",
        num(evo.dt),
        evo.propagator,
        evo.convergence_tol.map(num).unwrap_or_else(|| "none".into())
    );

    let ok: Vec<_> = out.points.iter().filter_map(|p| p.result.as_ref().ok().map(|r| (p, r))).collect();
    let failed = out.points.len() - ok.len();
    let _ = writeln!(s, "completed: {}, failed: {}", ok.len(), failed);
    let label = |p: &PointOutcome| match kind {
        ProtocolKind::Cnot => format!("h = {}, t_fin = {}", num(p.point.h), num(p.point.t_fin)),
        _ => format!("N = {}, t_fin = {}", p.point.n_sites, num(p.point.t_fin)),
    };
    if let Some((p, r)) = ok.iter().min_by(|a, b| a.1.fidelity.total_cmp(&b.1.fidelity)) {
        let _ = writeln!(s, "worst fidelity: {} at {}", num(r.fidelity), label(p));
    }
    if let Some((p, r)) = ok.iter().max_by(|a, b| a.1.fidelity.total_cmp(&b.1.fidelity)) {
        let _ = writeln!(s, "best fidelity: {} at {}", num(r.fidelity), label(p));
    }
    let gaps: Vec<f64> = ok
        .iter()
        .filter_map(|(_, r)| r.gap_trace.as_ref().and_then(|g| g.min_gap()))
        .collect();
    if let Some(g) = gaps.iter().copied().reduce(f64::min) {
        let _ = writeln!(s, "minimum gap: {}", num(g));
        let changes = ok
            .iter()
            .filter(|(_, r)| r.gap_trace.as_ref().is_some_and(|g| g.has_degeneracy_change()))
            .count();
        let _ = writeln!(s, "points with a ground degeneracy change: {changes}");
    }
    let deltas: Vec<f64> = ok.iter().filter_map(|(_, r)| r.dt_halving_delta).collect();
    if let Some(d) = deltas.iter().copied().reduce(f64::max) {
        let _ = writeln!(s, "largest dt-halving change: {}", num(d));
    }
    if failed > 0 {
        let _ = writeln!(s, "errors:");
        for p in &out.points {
            if let Err(e) = &p.result {
                let _ = writeln!(s, "  row {} ({}): {}", p.index + 1, label(p), e);
            }
        }
    }
    s
}

pub fn flux_report(out: &FluxOutcome) -> String {
    let r = &out.report;
    let mut s = String::new();
    let _ = writeln!(s, "protocol: flux-verify");
    let _ = writeln!(s, "grid points (ccjj, y): {}", r.points);
    let _ = writeln!(s, "max beta_eff deviation: {}", num(r.max_beta_deviation));
    let _ = writeln!(s, "max potential deviation: {}", num(r.max_potential_deviation));
    let _ = writeln!(s, "max deviation: {}", num(r.max_deviation()));
    let _ = writeln!(s, "max |phi_q0|: {}", num(r.max_abs_phi_q0));
    let _ = writeln!(s, "tolerance: {}", num(out.tolerance));
    let status = if r.holds(out.tolerance) { "holds" } else { "does not hold" };
    let _ = writeln!(s, "simplification: {status}");
    for v in &r.violations {
        let _ = writeln!(s, "violation: {v}");
    }
    const SHOWN: usize = 20;
    for e in r.errors.iter().take(SHOWN) {
        let _ = writeln!(s, "error: {e}");
    }
    if r.errors.len() > SHOWN {
        let _ = writeln!(s, "... {} more errors", r.errors.len() - SHOWN);
    }
    s
}

pub fn write_profile_csv(path: &Path, profile: &[(f64, f64)]) -> Result<(), OutputError> {
    let header = vec!["phi_q".to_string(), "potential".to_string()];
    write_rows(path, header, profile.iter().map(|&(q, u)| vec![num(q), num(u)]))
}

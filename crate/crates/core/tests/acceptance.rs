//! Acceptance run: one PASS/FAIL line per criterion with the measured value,
//! the tolerance and the runtime. Exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use holobus_core::dynamics::{EvolutionConfig, GapTrace};
use holobus_core::flux::{effective_params, verify_simplification, CircuitParams, FluxGrid};
use holobus_core::frame::{frame_from_gate, gate_table, Frame, SingleQubitGate};
use holobus_core::hamiltonians::{heisenberg_chain, twisted_chain};
use holobus_core::linalg::eigvalsh;
use holobus_core::protocols::{
    cnot_branch_spectra, run_bus, run_cnot, run_gate, BusConfig, CnotConfig, GateConfig, ProtocolResult,
};
use holobus_core::spin::Axis;
use holobus_core::state::Qubit;
use holobus_core::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{asymmetric_params, ccjj_transcription, random_gate};

/// Every protocol run reports the fidelity change under dt halving.
fn checked() -> EvolutionConfig {
    EvolutionConfig {
        convergence_tol: Some(1.0),
        ..Default::default()
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail }
    }
}

/// dt-halving deltas collected from every fidelity reported above it.
#[derive(Default)]
struct Deltas {
    worst: f64,
    worst_label: String,
    count: usize,
}

impl Deltas {
    fn record(&mut self, label: &str, r: &ProtocolResult) -> f64 {
        let d = r.dt_halving_delta.expect("convergence check requested");
        self.count += 1;
        if d >= self.worst {
            self.worst = d;
            self.worst_label = label.to_string();
        }
        r.fidelity
    }
}

fn twist_spectral_invariance() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for n in 3..=6 {
        let plain = eigvalsh(&heisenberg_chain(n)?.build_dense()?)?;
        for _ in 0..20 {
            let frame = Frame::from_gate(&random_gate(&mut rng))?;
            let start = rng.random_range(0..n);
            let twisted = eigvalsh(&twisted_chain(n, &frame, start)?.build_dense()?)?;
            for (a, b) in plain.iter().zip(&twisted) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(Outcome::new(
        worst < 1e-9,
        format!("N=3..6, 20 frames each: max |Δλ| = {worst:.2e} (tol 1e-9)"),
    ))
}

fn table_frames() -> Result<Outcome> {
    let r = FRAC_1_SQRT_2;
    // Rows as printed: primed x, y, z axes in (x, y, z) components.
    let rows: [(&str, SingleQubitGate, [[f64; 3]; 3]); 4] = [
        ("hadamard", SingleQubitGate::hadamard(), [[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]]),
        ("pi/8", SingleQubitGate::pi_over_8(), [[r, r, 0.0], [-r, r, 0.0], [0.0, 0.0, 1.0]]),
        ("phase (S† frame)", SingleQubitGate::phase_dagger(), [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),
        ("not", SingleQubitGate::not(), [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]),
    ];
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for (name, gate, expected) in rows {
        let frame = frame_from_gate(&gate)?;
        let mut dev = 0.0f64;
        for (axis, row) in Axis::ALL.iter().zip(expected) {
            for (got, want) in frame.primed(*axis).iter().zip(row) {
                dev = dev.max((got - want).abs());
            }
        }
        worst = worst.max(dev);
        let _ = write!(detail, "{name} {dev:.1e}; ");
    }
    Ok(Outcome::new(worst < 1e-12, format!("{detail}max {worst:.2e} (tol 1e-12)")))
}

fn bus_adiabatic_limit(deltas: &mut Deltas) -> Result<Outcome> {
    let mut infid = Vec::new();
    for t in [1.0, 10.0, 100.0] {
        let mut cfg = BusConfig::new(3, t, Qubit::up());
        cfg.evolution = checked();
        let r = run_bus(&cfg)?;
        infid.push(1.0 - deltas.record(&format!("bus t_fin={t}"), &r));
    }
    let pass = infid[2] < infid[1] && infid[1] < infid[0] && infid[2] < 1e-3;
    Ok(Outcome::new(
        pass,
        format!(
            "N=3: 1-F(1) = {:.4e}, 1-F(10) = {:.4e}, 1-F(100) = {:.4e} (need decreasing, last < 1e-3)",
            infid[0], infid[1], infid[2]
        ),
    ))
}

fn single_qubit_gates(deltas: &mut Deltas) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inputs: Vec<Qubit> = (0..5)
        .map(|_| Qubit::from_bloch(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)))
        .collect();
    let mut worst = 1.0f64;
    let mut detail = String::new();
    for row in gate_table() {
        let mut row_worst = 1.0f64;
        for input in &inputs {
            let mut bus = BusConfig::new(3, 100.0, *input);
            bus.evolution = checked();
            let cfg = GateConfig {
                bus,
                frame: row.frame,
                twist_start: 1,
            };
            let r = run_gate(&cfg)?;
            row_worst = row_worst.min(deltas.record(&format!("gate {}", row.name), &r));
        }
        worst = worst.min(row_worst);
        let _ = write!(detail, "{} {:.7}; ", row.name, row_worst);
    }
    Ok(Outcome::new(
        worst > 0.999,
        format!("N=3, t_fin=100, 5 inputs: min F per gate {detail}(need > 0.999)"),
    ))
}

fn cnot_truth_table(deltas: &mut Deltas) -> Result<Outcome> {
    let mut detail = String::new();
    let mut pass = true;
    for (cn, control) in [("↑", Qubit::up()), ("↓", Qubit::down())] {
        for (tn, target) in [("↑", Qubit::up()), ("↓", Qubit::down())] {
            let mut cfg = CnotConfig::new(10.0, 100.0, target, control);
            cfg.evolution = checked();
            let f = deltas.record(&format!("cnot c={cn} t={tn}"), &run_cnot(&cfg)?);
            pass &= f > 0.99;
            let _ = write!(detail, "c{cn}t{tn} {f:.6}; ");
        }
    }
    let r = FRAC_1_SQRT_2;
    let plus = Qubit::new(Complex64::new(r, 0.0), Complex64::new(r, 0.0))?;
    let mut cfg = CnotConfig::new(10.0, 100.0, Qubit::up(), plus);
    cfg.evolution = checked();
    let f = deltas.record("cnot superposed control", &run_cnot(&cfg)?);
    pass &= f > 0.99;
    let _ = write!(detail, "superposed control {f:.6}");
    Ok(Outcome::new(pass, format!("h=10, t_fin=100: {detail} (each > 0.99)")))
}

fn cnot_time_shape(deltas: &mut Deltas) -> Result<Outcome> {
    let mut infid = Vec::new();
    for t in [5.0, 10.0, 20.0, 40.0, 80.0] {
        let mut cfg = CnotConfig::new(10.0, t, Qubit::up(), Qubit::up());
        cfg.evolution = checked();
        infid.push(1.0 - deltas.record(&format!("cnot h=10 t_fin={t}"), &run_cnot(&cfg)?));
    }
    let ratio = infid[4] / infid[0];
    let values: Vec<String> = infid.iter().map(|v| format!("{v:.3e}")).collect();
    Ok(Outcome::new(
        ratio < 0.1,
        format!("h=10, 1-F at t_fin 5..80 = [{}]; ratio 80/5 = {ratio:.3e} (need < 0.1)", values.join(", ")),
    ))
}

fn cnot_h_saturation(deltas: &mut Deltas) -> Result<Outcome> {
    let mut f = Vec::new();
    for h in [1.0, 10.0, 20.0, 40.0] {
        let mut cfg = CnotConfig::new(h, 10.0, Qubit::up(), Qubit::up());
        cfg.evolution = checked();
        f.push(deltas.record(&format!("cnot t_fin=10 h={h}"), &run_cnot(&cfg)?));
    }
    let high = (f[3] - f[2]).abs();
    let low = (f[1] - f[0]).abs();
    Ok(Outcome::new(
        high < 0.1 * low,
        format!(
            "t_fin=10: F(1) = {:.6}, F(10) = {:.6}, F(20) = {:.6}, F(40) = {:.6}; |F40-F20| = {high:.3e} vs 0.1|F10-F1| = {:.3e}",
            f[0],
            f[1],
            f[2],
            f[3],
            0.1 * low
        ),
    ))
}

fn cnot_gaps() -> Result<Outcome> {
    let mut traces: Vec<(f64, GapTrace)> = Vec::new();
    for h in [5.0, 10.0, 20.0] {
        let mut cfg = CnotConfig::new(h, 10.0, Qubit::up(), Qubit::up());
        cfg.gap_trace = true;
        cfg.evolution.gap_samples = 21;
        let trace = run_cnot(&cfg)?.gap_trace.expect("gap trace requested");
        traces.push((h, trace));
    }
    let min_gap = traces
        .iter()
        .flat_map(|(_, t)| t.samples.iter().map(|s| s.gap))
        .fold(f64::INFINITY, f64::min);
    let mut violations = Vec::new();
    for pair in traces.windows(2) {
        let (h_lo, lo) = &pair[0];
        let (h_hi, hi) = &pair[1];
        for (a, b) in lo.samples.iter().zip(&hi.samples) {
            if b.gap < a.gap {
                violations.push(format!(
                    "s={:.2}: gap(h={h_hi}) = {:.4} < gap(h={h_lo}) = {:.4}",
                    a.s, b.gap, a.gap
                ));
            }
        }
    }
    let pass = min_gap > 0.0 && violations.is_empty();
    let mut detail = format!(
        "h=5,10,20 at 21 samples: min gap {min_gap:.4}; {} monotonicity violations",
        violations.len()
    );
    if let Some(first) = violations.first() {
        let _ = write!(detail, " (first: {first})");
    }
    Ok(Outcome::new(pass, detail))
}

fn branch_spectra() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let (up, down) = cnot_branch_spectra(lambda, 10.0)?;
        for (a, b) in up.iter().zip(&down) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(Outcome::new(
        worst < 1e-9,
        format!("h=10, λ ∈ {{0, .25, .5, .75, 1}}: max |Δλ| = {worst:.2e} (tol 1e-9)"),
    ))
}

fn flux_identities() -> Result<Outcome> {
    let report = verify_simplification(&CircuitParams::symmetric(1.0, 1.0), &FluxGrid::uniform(50, 50, 50))?;
    let p = asymmetric_params();
    let mut oracle_dev = 0.0f64;
    let mut flux_points = vec![(0.2, 0.3, 0.3)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    flux_points.extend((0..500).map(|_| {
        (
            rng.random_range(-PI..PI),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        )
    }));
    for (c, l, r) in flux_points {
        let e = effective_params(&p, c, l, r)?;
        let (beta_eff, phi_q0) = ccjj_transcription(&p, c, l, r);
        oracle_dev = oracle_dev.max((e.beta_eff - beta_eff).abs()).max((e.phi_q0 - phi_q0).abs());
    }
    let pass = report.holds(1e-12) && oracle_dev < 1e-12;
    Ok(Outcome::new(
        pass,
        format!(
            "symmetric 50x50 grid: β_eff dev {:.2e}, potential dev {:.2e}; asymmetric vs transcription {oracle_dev:.2e} (tol 1e-12)",
            report.max_beta_deviation, report.max_potential_deviation
        ),
    ))
}

fn main() -> ExitCode {
    let mut deltas = Deltas::default();
    type Check<'a> = Box<dyn FnOnce(&mut Deltas) -> Result<Outcome> + 'a>;
    let checks: Vec<(&str, Duration, Check)> = vec![
        ("spectral twist invariance", Duration::from_secs(10), Box::new(|_| twist_spectral_invariance())),
        ("table frames", Duration::from_secs(1), Box::new(|_| table_frames())),
        ("bus adiabatic limit", Duration::from_secs(60), Box::new(bus_adiabatic_limit)),
        ("single-qubit gates", Duration::from_secs(300), Box::new(single_qubit_gates)),
        ("cnot truth table", Duration::from_secs(600), Box::new(cnot_truth_table)),
        ("fidelity vs t_fin shape", Duration::from_secs(600), Box::new(cnot_time_shape)),
        ("fidelity vs h saturation", Duration::from_secs(600), Box::new(cnot_h_saturation)),
        ("gap positivity and h-monotonicity", Duration::from_secs(600), Box::new(|_| cnot_gaps())),
        ("control-branch spectra", Duration::from_secs(60), Box::new(|_| branch_spectra())),
        ("flux-qubit identities", Duration::from_secs(5), Box::new(|_| flux_identities())),
    ];

    let mut failures = 0;
    for (name, limit, check) in checks {
        let start = Instant::now();
        let outcome = check(&mut deltas);
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && elapsed < limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        report(name, pass, &detail, elapsed, limit);
        failures += usize::from(!pass);
    }

    let pass = deltas.worst < 1e-6;
    report(
        "integrator dt-halving contract",
        pass,
        &format!(
            "{} fidelities: max |F(dt) - F(dt/2)| = {:.2e} at {} (dt = {}, tol 1e-6)",
            deltas.count,
            deltas.worst,
            deltas.worst_label,
            EvolutionConfig::default().dt
        ),
        Duration::ZERO,
        Duration::MAX,
    );
    failures += usize::from(!pass);

    println!("acceptance: {failures} failing criteria");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn report(name: &str, pass: bool, detail: &str, elapsed: Duration, limit: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let timing = if limit == Duration::MAX {
        String::new()
    } else {
        format!(" [{:.1} s, limit {} s]", elapsed.as_secs_f64(), limit.as_secs())
    };
    println!("{verdict} {name}: {detail}{timing}");
}

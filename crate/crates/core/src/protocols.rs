//! The bus, twisted-chain gate and CNOT protocols, run end to end.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use num_complex::Complex64;

use crate::dynamics::{evolve, gap_trace_with, ground_manifold, EvolutionConfig, GapTrace};
use crate::frame::{Frame, SingleQubitGate};
use crate::hamiltonians::{bus_hamiltonian, cnot_driven, cnot_site, twisted_chain, DrivenHamiltonian};
use crate::linalg::{eigvalsh, CMatrix, ZERO};
use crate::schedule::Schedule;
use crate::spin::{check_cap, DEFAULT_SITE_CAP};
use crate::state::{DensityMatrix, Qubit, StateVector};
use crate::{Error, Result};

/// Largest system whose dense spectrum is sampled for a gap trace.
pub const GAP_TRACE_SITE_CAP: usize = 12;

/// Adiabatic transport of `input` from site 0 to site `n_sites - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BusConfig {
    /// Total spins, odd and at least 3.
    pub n_sites: usize,
    pub t_fin: f64,
    pub input: Qubit,
    pub evolution: EvolutionConfig,
    /// Also sample the spectral gap along the schedule.
    pub gap_trace: bool,
}

impl BusConfig {
    pub fn new(n_sites: usize, t_fin: f64, input: Qubit) -> Self {
        BusConfig {
            n_sites,
            t_fin,
            input,
            evolution: EvolutionConfig::default(),
            gap_trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 3 || self.n_sites % 2 == 0 {
            return Err(Error::validation(format!(
                "N must be odd and at least 3 (got {})",
                self.n_sites
            )));
        }
        check_cap(self.n_sites, DEFAULT_SITE_CAP)?;
        if self.gap_trace {
            check_cap(self.n_sites, GAP_TRACE_SITE_CAP)?;
        }
        Schedule::linear(self.t_fin)?;
        self.evolution.validate()
    }
}

/// Transport across a chain whose sites `twist_start..n_sites` (0-based)
/// carry `frame`; the output is `U` applied to the input, with `U` the gate
/// of `frame`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateConfig {
    pub bus: BusConfig,
    pub frame: Frame,
    /// In `1..=n_sites - 1`.
    pub twist_start: usize,
}

impl GateConfig {
    pub fn new(bus: BusConfig, gate: &SingleQubitGate, twist_start: usize) -> Result<Self> {
        Ok(GateConfig {
            bus,
            frame: Frame::from_gate(gate)?,
            twist_start,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.bus.validate()?;
        if !(1..self.bus.n_sites).contains(&self.twist_start) {
            return Err(Error::validation(format!(
                "twist start must lie in 1..={} (got {})",
                self.bus.n_sites - 1,
                self.twist_start
            )));
        }
        Ok(())
    }
}

/// Ising-controlled NOT: `control` on site "c", `target` on site "in",
/// result on site "out".
#[derive(Debug, Clone, PartialEq)]
pub struct CnotConfig {
    pub h: f64,
    pub t_fin: f64,
    pub target: Qubit,
    pub control: Qubit,
    pub evolution: EvolutionConfig,
    pub gap_trace: bool,
}

impl CnotConfig {
    pub fn new(h: f64, t_fin: f64, target: Qubit, control: Qubit) -> Self {
        CnotConfig {
            h,
            t_fin,
            target,
            control,
            evolution: EvolutionConfig::default(),
            gap_trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h >= 0.0) {
            return Err(Error::validation(format!("h must be non-negative (got {})", self.h)));
        }
        Schedule::linear(self.t_fin)?;
        self.evolution.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolConfig {
    Bus(BusConfig),
    Gate(GateConfig),
    Cnot(CnotConfig),
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProtocolConfig::Bus(c) => c.validate(),
            ProtocolConfig::Gate(c) => c.validate(),
            ProtocolConfig::Cnot(c) => c.validate(),
        }
    }

    pub fn t_fin(&self) -> f64 {
        match self {
            ProtocolConfig::Bus(c) => c.t_fin,
            ProtocolConfig::Gate(c) => c.bus.t_fin,
            ProtocolConfig::Cnot(c) => c.t_fin,
        }
    }

    pub fn evolution(&self) -> &EvolutionConfig {
        match self {
            ProtocolConfig::Bus(c) => &c.evolution,
            ProtocolConfig::Gate(c) => &c.bus.evolution,
            ProtocolConfig::Cnot(c) => &c.evolution,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub config: ProtocolConfig,
    pub final_state: StateVector,
    /// Reduced state on the output site(s).
    pub reduced: DensityMatrix,
    /// Ideal pure output the fidelity is measured against.
    pub expected: Vec<Complex64>,
    /// `⟨expected|ρ|expected⟩`.
    pub fidelity: f64,
    /// `⟨σ^z⟩` on the output site of the final state.
    pub sz_out: f64,
    pub gap_trace: Option<GapTrace>,
    /// `|F(dt) - F(dt/2)|` when the configuration asks for a convergence
    /// check.
    pub dt_halving_delta: Option<f64>,
    /// Filled in by callers that have a clock.
    pub wall_time: Option<Duration>,
}

impl ProtocolResult {
    pub fn one_minus_fidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

pub fn run(config: &ProtocolConfig) -> Result<ProtocolResult> {
    match config {
        ProtocolConfig::Bus(c) => run_bus(c),
        ProtocolConfig::Gate(c) => run_gate(c),
        ProtocolConfig::Cnot(c) => run_cnot(c),
    }
}

pub fn run_bus(cfg: &BusConfig) -> Result<ProtocolResult> {
    cfg.validate()?;
    let n = cfg.n_sites;
    let mut result = transport(cfg, &Frame::identity(), n)?;
    result.config = ProtocolConfig::Bus(cfg.clone());
    Ok(result)
}

pub fn run_gate(cfg: &GateConfig) -> Result<ProtocolResult> {
    cfg.validate()?;
    let mut result = transport(&cfg.bus, &cfg.frame, cfg.twist_start)?;
    result.config = ProtocolConfig::Gate(cfg.clone());
    Ok(result)
}

/// Evolves under the (possibly twisted) bus and measures the last site.
fn transport(cfg: &BusConfig, frame: &Frame, twist_start: usize) -> Result<ProtocolResult> {
    let n = cfg.n_sites;
    // Sites 1..n form the initial chain; its twist starts one index earlier.
    let chain = twisted_chain(n - 1, frame, twist_start - 1)?.build_dense()?;
    let ground = ground_manifold(&chain, cfg.evolution.degeneracy_tol)?
        .unique_state("initial chain ground state")?;
    let ground = StateVector::new(n - 1, ground)?;
    let psi0 = StateVector::from_qubit(&cfg.input).tensor(&ground);

    let driven = bus_hamiltonian(n, frame, twist_start, Schedule::linear(cfg.t_fin)?)?;
    let expected = frame.to_gate().apply(cfg.input.amplitudes()).to_vec();
    let out = [n - 1];
    let measure = |evolution: &EvolutionConfig| -> Result<(StateVector, DensityMatrix, f64)> {
        let psi = evolve(&driven, &psi0, evolution)?;
        let reduced = psi.partial_trace(&out)?;
        let fidelity = reduced.fidelity_with_pure(&expected)?;
        Ok((psi, reduced, fidelity))
    };
    let gap = if cfg.gap_trace {
        Some(gap_trace_with(&cfg.evolution, |s| driven.dense_at_fraction(s))?)
    } else {
        None
    };
    finish(
        ProtocolConfig::Bus(cfg.clone()),
        &cfg.evolution,
        measure,
        expected.clone(),
        n - 1,
        gap,
    )
}

/// Runs `measure` at the configured step and, if a convergence tolerance is
/// set, again at half the step.
fn finish<M>(
    config: ProtocolConfig,
    evolution: &EvolutionConfig,
    measure: M,
    expected: Vec<Complex64>,
    out_site: usize,
    gap_trace: Option<GapTrace>,
) -> Result<ProtocolResult>
where
    M: Fn(&EvolutionConfig) -> Result<(StateVector, DensityMatrix, f64)>,
{
    let plain = EvolutionConfig {
        convergence_tol: None,
        ..*evolution
    };
    let (final_state, reduced, fidelity) = measure(&plain)?;
    let dt_halving_delta = match evolution.convergence_tol {
        Some(tolerance) => {
            let (_, _, fine) = measure(&plain.halved())?;
            let delta = (fidelity - fine).abs();
            if delta > tolerance {
                return Err(Error::Accuracy { delta, tolerance });
            }
            Some(delta)
        }
        None => None,
    };
    let sz_out = final_state.expectation_z(out_site)?;
    Ok(ProtocolResult {
        config,
        final_state,
        reduced,
        expected,
        fidelity,
        sz_out,
        gap_trace,
        dt_halving_delta,
        wall_time: None,
    })
}

/// Basis indices of `n_sites` spins whose `fixed` sites hold the given
/// values (`true` = spin down), in ascending order.
pub fn sector_indices(n_sites: usize, fixed: &[(usize, bool)]) -> Vec<usize> {
    let bit = |site: usize| 1usize << (n_sites - 1 - site);
    (0..1usize << n_sites)
        .filter(|&k| fixed.iter().all(|&(site, down)| (k & bit(site) != 0) == down))
        .collect()
}

/// Restriction of `m` to the rows and columns in `indices`.
pub fn restrict(m: &CMatrix, indices: &[usize]) -> CMatrix {
    let d = indices.len();
    CMatrix::from_fn(d, d, |i, j| m[(indices[i], indices[j])])
}

/// Spectra of the control-up and control-down blocks of the CNOT network
/// at coupling `lambda`.
pub fn cnot_branch_spectra(lambda: f64, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let full = crate::hamiltonians::cnot_hamiltonian(lambda, h)?.build_dense()?;
    let n = cnot_site::OUT + 1;
    let up = eigvalsh(&restrict(&full, &sector_indices(n, &[(cnot_site::CONTROL, false)])))?;
    let down = eigvalsh(&restrict(&full, &sector_indices(n, &[(cnot_site::CONTROL, true)])))?;
    Ok((up, down))
}

/// The ideal CNOT output on (c, out): `a|↑⟩⊗Xψ + b|↓⟩⊗ψ`.
pub fn cnot_expected(target: &Qubit, control: &Qubit) -> [Complex64; 4] {
    let (alpha, beta) = (target.alpha, target.beta);
    let (a, b) = (control.alpha, control.beta);
    [a * beta, a * alpha, b * alpha, b * beta]
}

/// Ground state of the λ = 0 network with "in" up and the control fixed,
/// over the remaining six sites (1, 2, 3, 4, a, out in basis order).
fn cnot_cluster_ground(h0: &CMatrix, control_down: bool, tol: f64) -> Result<Vec<Complex64>> {
    let n = cnot_site::OUT + 1;
    let idx = sector_indices(n, &[(cnot_site::IN, false), (cnot_site::CONTROL, control_down)]);
    let context = if control_down {
        "CNOT cluster ground state (control down)"
    } else {
        "CNOT cluster ground state (control up)"
    };
    ground_manifold(&restrict(h0, &idx), tol)?.unique_state(context)
}

pub fn run_cnot(cfg: &CnotConfig) -> Result<ProtocolResult> {
    use cnot_site::*;
    cfg.validate()?;
    let n = OUT + 1;
    let driven = cnot_driven(cfg.h, Schedule::linear(cfg.t_fin)?)?;
    let h0 = driven.dense_at_fraction(0.0)?;
    let tol = cfg.evolution.degeneracy_tol;
    let clusters = [
        cnot_cluster_ground(&h0, false, tol)?,
        cnot_cluster_ground(&h0, true, tol)?,
    ];

    let psi0 = cnot_initial_state(&cfg.target, &cfg.control, &clusters)?;
    let expected = cnot_expected(&cfg.target, &cfg.control).to_vec();
    let keep = [CONTROL, OUT];
    let measure = |evolution: &EvolutionConfig| -> Result<(StateVector, DensityMatrix, f64)> {
        let psi = evolve(&driven, &psi0, evolution)?;
        let reduced = psi.partial_trace(&keep)?;
        let fidelity = reduced.fidelity_with_pure(&expected)?;
        Ok((psi, reduced, fidelity))
    };
    // Both control branches share one spectrum; the up branch stands for both.
    let gap = if cfg.gap_trace {
        let idx = sector_indices(n, &[(CONTROL, false)]);
        Some(gap_trace_with(&cfg.evolution, |s| {
            Ok(restrict(&driven.dense_at_fraction(s)?, &idx))
        })?)
    } else {
        None
    };
    finish(
        ProtocolConfig::Cnot(cfg.clone()),
        &cfg.evolution,
        measure,
        expected.clone(),
        OUT,
        gap,
    )
}

/// `ψ_in ⊗ (a|g↑⟩|↑⟩_c + b|g↓⟩|↓⟩_c)` laid out in network site order.
fn cnot_initial_state(target: &Qubit, control: &Qubit, clusters: &[Vec<Complex64>; 2]) -> Result<StateVector> {
    use cnot_site::*;
    let n = OUT + 1;
    let bit = |site: usize| 1usize << (n - 1 - site);
    let cluster_sites = [S1, S2, S3, S4, ANCILLA, OUT];
    let target_amps = target.amplitudes();
    let control_amps = control.amplitudes();
    let mut amps = vec![ZERO; 1 << n];
    for (k, amp) in amps.iter_mut().enumerate() {
        let t = usize::from(k & bit(IN) != 0);
        let c = usize::from(k & bit(CONTROL) != 0);
        let mut j = 0;
        for &s in &cluster_sites {
            j = (j << 1) | usize::from(k & bit(s) != 0);
        }
        *amp = target_amps[t] * control_amps[c] * clusters[c][j];
    }
    StateVector::new(n, amps)
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub t_fin: f64,
    /// Chain length; ignored by the CNOT.
    pub n_sites: usize,
    /// Field strength; ignored by the bus and gate.
    pub h: f64,
}

/// Cartesian grid over `n_sites × h × t_fin`, enumerated in that nesting
/// order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub t_fin: Vec<f64>,
    pub n_sites: Vec<usize>,
    pub h: Vec<f64>,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &n_sites in &self.n_sites {
            for &h in &self.h {
                for &t_fin in &self.t_fin {
                    out.push(SweepPoint { t_fin, n_sites, h });
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.t_fin.len() * self.n_sites.len() * self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Summary of one sweep point; `error` is set instead of the numbers when
/// the point failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub fidelity: Option<f64>,
    pub one_minus_fidelity: Option<f64>,
    pub min_gap: Option<f64>,
    pub sz_out: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_result(point: SweepPoint, result: &Result<ProtocolResult>) -> Self {
        match result {
            Ok(r) => SweepRow {
                point,
                fidelity: Some(r.fidelity),
                one_minus_fidelity: Some(r.one_minus_fidelity()),
                min_gap: r.gap_trace.as_ref().and_then(GapTrace::min_gap),
                sz_out: Some(r.sz_out),
                error: None,
            },
            Err(e) => SweepRow {
                point,
                fidelity: None,
                one_minus_fidelity: None,
                min_gap: None,
                sz_out: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// `base` with the point's `t_fin`, `n_sites` and `h` substituted.
pub fn configure_point(base: &ProtocolConfig, point: &SweepPoint) -> ProtocolConfig {
    let mut cfg = base.clone();
    match &mut cfg {
        ProtocolConfig::Bus(c) => {
            c.t_fin = point.t_fin;
            c.n_sites = point.n_sites;
        }
        ProtocolConfig::Gate(c) => {
            c.bus.t_fin = point.t_fin;
            c.bus.n_sites = point.n_sites;
        }
        ProtocolConfig::Cnot(c) => {
            c.t_fin = point.t_fin;
            c.h = point.h;
        }
    }
    cfg
}

pub fn run_point(base: &ProtocolConfig, point: &SweepPoint) -> Result<ProtocolResult> {
    run(&configure_point(base, point))
}

/// Runs every grid point in order; failures are recorded per row.
pub fn sweep(base: &ProtocolConfig, grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::validation("sweep grid is empty"));
    }
    Ok(grid
        .points()
        .iter()
        .map(|p| SweepRow::from_result(*p, &run_point(base, p)))
        .collect())
}

/// Driven Hamiltonian of a transport configuration (for callers that want
/// to evolve or inspect it directly).
pub fn transport_hamiltonian(cfg: &BusConfig, frame: &Frame, twist_start: usize) -> Result<DrivenHamiltonian> {
    bus_hamiltonian(cfg.n_sites, frame, twist_start, Schedule::linear(cfg.t_fin)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::gate_table;
    use crate::linalg::ONE;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn fast(evolution: EvolutionConfig) -> EvolutionConfig {
        EvolutionConfig { dt: 0.01, ..evolution }
    }

    #[test]
    fn bus_rejects_even_or_short_chains() {
        for n in [1, 2, 4] {
            let cfg = BusConfig::new(n, 1.0, Qubit::up());
            assert!(matches!(run_bus(&cfg), Err(Error::Validation(_))), "N = {n}");
        }
        let cfg = BusConfig::new(15, 1.0, Qubit::up());
        assert!(matches!(run_bus(&cfg), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn gate_rejects_twist_outside_chain() {
        let bus = BusConfig::new(3, 1.0, Qubit::up());
        for l in [0, 3] {
            let cfg = GateConfig::new(bus.clone(), &SingleQubitGate::hadamard(), l).unwrap();
            assert!(run_gate(&cfg).is_err());
        }
    }

    #[test]
    fn identity_twist_is_the_bus() {
        let mut bus = BusConfig::new(3, 5.0, Qubit::from_bloch(1.0, 0.4));
        bus.evolution = fast(bus.evolution);
        let plain = run_bus(&bus).unwrap();
        for l in 1..3 {
            let gate = run_gate(&GateConfig::new(bus.clone(), &SingleQubitGate::identity(), l).unwrap()).unwrap();
            let diff = plain
                .final_state
                .amplitudes()
                .iter()
                .zip(gate.final_state.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "L = {l}: {diff}");
            assert!((plain.fidelity - gate.fidelity).abs() < 1e-10);
        }
    }

    #[test]
    fn slow_bus_transfers_the_qubit() {
        let mut cfg = BusConfig::new(3, 50.0, Qubit::up());
        cfg.evolution = fast(cfg.evolution);
        let r = run_bus(&cfg).unwrap();
        assert!(r.one_minus_fidelity() < 1e-2, "{}", r.one_minus_fidelity());
        assert!(r.reduced.is_physical(1e-10));
        assert!((r.final_state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sudden_bus_is_worse_than_adiabatic() {
        let sudden = run_bus(&BusConfig::new(3, 1e-6, Qubit::up())).unwrap();
        let mut slow = BusConfig::new(3, 50.0, Qubit::up());
        slow.evolution = fast(slow.evolution);
        let slow = run_bus(&slow).unwrap();
        assert!(sudden.fidelity < slow.fidelity);
    }

    #[test]
    fn gates_rotate_the_transported_qubit() {
        let mut bus = BusConfig::new(3, 50.0, Qubit::up());
        bus.evolution = fast(bus.evolution);
        for row in gate_table() {
            let cfg = GateConfig {
                bus: bus.clone(),
                frame: row.frame,
                twist_start: 1,
            };
            let r = run_gate(&cfg).unwrap();
            assert!(r.fidelity > 0.99, "{}: {}", row.name, r.fidelity);
        }
        // NOT sends up to down.
        let not = GateConfig::new(bus, &SingleQubitGate::not(), 2).unwrap();
        let r = run_gate(&not).unwrap();
        assert!(r.reduced.matrix()[(1, 1)].re > 0.99);
    }

    #[test]
    fn branch_spectra_agree() {
        for lambda in [0.0, 0.5, 1.0] {
            let (up, down) = cnot_branch_spectra(lambda, 10.0).unwrap();
            for (a, b) in up.iter().zip(&down) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sector_layout() {
        assert_eq!(sector_indices(3, &[(0, true)]), vec![4, 5, 6, 7]);
        assert_eq!(sector_indices(3, &[(2, false), (1, true)]), vec![2, 6]);
    }

    #[test]
    fn cnot_expected_output() {
        let r = FRAC_1_SQRT_2;
        let plus = Qubit::new(Complex64::new(r, 0.0), Complex64::new(r, 0.0)).unwrap();
        // Control up flips the target, control down leaves it.
        assert_eq!(cnot_expected(&Qubit::up(), &Qubit::up()), [ZERO, ONE, ZERO, ZERO]);
        assert_eq!(cnot_expected(&Qubit::up(), &Qubit::down()), [ZERO, ZERO, ONE, ZERO]);
        let e = cnot_expected(&Qubit::up(), &plus);
        assert!((e[0] - 0.0).norm() < 1e-15 && (e[1] - r).norm() < 1e-15);
        assert!((e[2] - r).norm() < 1e-15 && e[3].norm() < 1e-15);
    }

    #[test]
    fn cnot_flips_target_for_control_up() {
        let mut cfg = CnotConfig::new(10.0, 10.0, Qubit::up(), Qubit::up());
        cfg.evolution = fast(cfg.evolution);
        let r = run_cnot(&cfg).unwrap();
        assert!(r.one_minus_fidelity() < 1e-2, "{}", r.one_minus_fidelity());
        assert!(r.sz_out < -0.98);
        cfg.control = Qubit::down();
        let r = run_cnot(&cfg).unwrap();
        assert!(r.one_minus_fidelity() < 1e-2);
        assert!(r.sz_out > 0.98);
    }

    #[test]
    fn cnot_rejects_negative_field() {
        let cfg = CnotConfig::new(-1.0, 10.0, Qubit::up(), Qubit::up());
        assert!(matches!(run_cnot(&cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn sweep_records_failures_per_row() {
        let base = ProtocolConfig::Bus(BusConfig::new(3, 1.0, Qubit::up()));
        let grid = SweepGrid {
            t_fin: vec![0.5, 1.0],
            n_sites: vec![3, 4],
            h: vec![0.0],
        };
        let rows = sweep(&base, &grid).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[..2].iter().all(|r| r.error.is_none()));
        assert!(rows[2..].iter().all(|r| r.error.is_some() && r.fidelity.is_none()));
        assert_eq!(rows[1].point.t_fin, 1.0);
        assert!(sweep(&base, &SweepGrid::default()).is_err());
    }

    #[test]
    fn convergence_check_reports_delta() {
        let mut cfg = BusConfig::new(3, 2.0, Qubit::up());
        cfg.evolution.convergence_tol = Some(1.0);
        let r = run_bus(&cfg).unwrap();
        assert!(r.dt_halving_delta.unwrap() < 1e-4);
        cfg.evolution = EvolutionConfig {
            dt: 0.5,
            convergence_tol: Some(1e-12),
            ..cfg.evolution
        };
        assert!(matches!(run_bus(&cfg), Err(Error::Accuracy { .. })));
    }
}

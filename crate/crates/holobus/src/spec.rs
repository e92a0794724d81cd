//! JSON experiment specs and their validation.
//!
//! A spec is one flat JSON object. `protocol` picks the experiment; grid
//! fields are lists and every combination is run. Fields that do not apply
//! to the chosen protocol are rejected, so a typo or a misplaced field never
//! silently changes what runs. See the README for the full schema.

use std::fmt;
use std::path::{Path, PathBuf};

use holobus_core::dynamics::{EvolutionConfig, Propagator};
use holobus_core::flux::{CircuitParams, FluxGrid};
use holobus_core::frame::{lookup_gate, SingleQubitGate, GATE_NAMES};
use holobus_core::linalg::Matrix2c;
use holobus_core::protocols::{
    configure_point, BusConfig, CnotConfig, GateConfig, ProtocolConfig, SweepGrid,
};
use holobus_core::state::Qubit;
use holobus_core::{Complex64, Error as CoreError};
use serde::Deserialize;

/// Sites in the CNOT network; reported in the `n_sites` slot of its grid.
pub const CNOT_SITES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Bus,
    Gate,
    Cnot,
    FluxVerify,
}

impl ProtocolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Bus => "bus",
            ProtocolKind::Gate => "gate",
            ProtocolKind::Cnot => "cnot",
            ProtocolKind::FluxVerify => "flux-verify",
        }
    }
}

/// A single-qubit state: a name (`up`, `down`, `plus`, `minus`, `random`)
/// or explicit amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Amplitudes { alpha: [f64; 2], beta: [f64; 2] },
}

/// A gate by table name or as an explicit 2x2 unitary, rows of `[re, im]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Named(String),
    Matrix { matrix: [[[f64; 2]; 2]; 2] },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSpec {
    #[serde(default = "one")]
    pub l_q: f64,
    #[serde(default = "ones")]
    pub currents: [f64; 4],
    #[serde(default = "one")]
    pub phi0: f64,
    #[serde(default = "one")]
    pub u_q: f64,
    /// Applied fluxes for the q, ccjj, L and R loops.
    #[serde(default)]
    pub applied: [f64; 4],
    /// Points per axis (ccjj, y, q) on `[-π, π]`.
    #[serde(default = "default_flux_grid")]
    pub grid: [usize; 3],
    #[serde(default = "default_flux_tolerance")]
    pub tolerance: f64,
    /// Optional potential profile along `φ_q` at fixed `[ccjj, L, R]`.
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub fixed: [f64; 3],
    #[serde(default = "default_profile_range")]
    pub q_range: [f64; 2],
    #[serde(default = "default_profile_points")]
    pub points: usize,
}

fn one() -> f64 {
    1.0
}

fn ones() -> [f64; 4] {
    [1.0; 4]
}

fn default_flux_grid() -> [usize; 3] {
    [41, 41, 41]
}

fn default_flux_tolerance() -> f64 {
    1e-12
}

fn default_profile_range() -> [f64; 2] {
    [-std::f64::consts::PI, std::f64::consts::PI]
}

fn default_profile_points() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub protocol: ProtocolKind,
    /// Stem of the output files; defaults to the spec file stem.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub t_fin: Option<Vec<f64>>,
    #[serde(default)]
    pub n_sites: Option<Vec<usize>>,
    #[serde(default)]
    pub h: Option<Vec<f64>>,
    /// Transported qubit (bus, gate) or CNOT target.
    #[serde(default)]
    pub input: Option<StateSpec>,
    #[serde(default)]
    pub control: Option<StateSpec>,
    #[serde(default)]
    pub gate: Option<GateSpec>,
    #[serde(default)]
    pub twist_start: Option<usize>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub gap_samples: Option<usize>,
    #[serde(default)]
    pub degeneracy_tol: Option<f64>,
    /// Rerun each point at `dt/2`; a fidelity change above this fails the
    /// accuracy contract.
    #[serde(default)]
    pub convergence_tol: Option<f64>,
    #[serde(default)]
    pub propagator: Option<PropagatorSpec>,
    /// Also write the instantaneous gap along the schedule.
    #[serde(default)]
    pub gap_trace: bool,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, relative to the spec file; `--out` overrides it.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub flux: Option<FluxSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagatorSpec {
    Taylor,
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Malformed or inconsistent spec.
    Spec,
    /// Valid, but beyond what the dense simulator will realize.
    Resource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    fn spec(field: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            field: field.to_string(),
            message: message.into(),
            severity: Severity::Spec,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
}

/// Where an input qubit comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSource {
    Fixed(Qubit),
    /// Haar-random, drawn per grid point from the spec seed.
    Random,
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub kind: ProtocolKind,
    pub base: ProtocolConfig,
    pub grid: SweepGrid,
    pub input: InputSource,
    pub control: InputSource,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct FluxPlan {
    pub params: CircuitParams,
    pub grid: FluxGrid,
    pub tolerance: f64,
    pub profile: Option<ProfileSpec>,
}

#[derive(Debug, Clone)]
pub enum Plan {
    Sweep(SweepPlan),
    Flux(FluxPlan),
}

impl ExperimentSpec {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    /// Every violated invariant; empty when the spec is runnable.
    pub fn validate(&self) -> Vec<Diagnostic> {
        match self.plan() {
            Ok(_) => Vec::new(),
            Err(diags) => diags,
        }
    }

    /// Resolves names, defaults and grids into runnable configurations.
    pub fn plan(&self) -> Result<Plan, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        self.check_applicable(&mut diags);
        let plan = match self.protocol {
            ProtocolKind::FluxVerify => self.flux_plan(&mut diags).map(Plan::Flux),
            _ => self.sweep_plan(&mut diags).map(Plan::Sweep),
        };
        match plan {
            Some(plan) if diags.is_empty() => Ok(plan),
            _ => Err(diags),
        }
    }

    fn check_applicable(&self, diags: &mut Vec<Diagnostic>) {
        use ProtocolKind::*;
        let p = self.protocol;
        let present: [(&str, bool, &[ProtocolKind]); 13] = [
            ("t_fin", self.t_fin.is_some(), &[Bus, Gate, Cnot]),
            ("n_sites", self.n_sites.is_some(), &[Bus, Gate]),
            ("h", self.h.is_some(), &[Cnot]),
            ("input", self.input.is_some(), &[Bus, Gate, Cnot]),
            ("control", self.control.is_some(), &[Cnot]),
            ("gate", self.gate.is_some(), &[Gate]),
            ("twist_start", self.twist_start.is_some(), &[Gate]),
            ("dt", self.dt.is_some(), &[Bus, Gate, Cnot]),
            ("gap_samples", self.gap_samples.is_some(), &[Bus, Gate, Cnot]),
            ("degeneracy_tol", self.degeneracy_tol.is_some(), &[Bus, Gate, Cnot]),
            ("convergence_tol", self.convergence_tol.is_some(), &[Bus, Gate, Cnot]),
            ("propagator", self.propagator.is_some(), &[Bus, Gate, Cnot]),
            ("flux", self.flux.is_some(), &[FluxVerify]),
        ];
        for (field, set, allowed) in present {
            if set && !allowed.contains(&p) {
                diags.push(Diagnostic::spec(
                    field,
                    format!("not used by protocol `{}`", p.as_str()),
                ));
            }
        }
        if self.gap_trace && p == FluxVerify {
            diags.push(Diagnostic::spec("gap_trace", "not used by protocol `flux-verify`"));
        }
    }

    fn sweep_plan(&self, diags: &mut Vec<Diagnostic>) -> Option<SweepPlan> {
        let before = diags.len();
        let t_fin = match &self.t_fin {
            Some(v) => v.clone(),
            None => {
                diags.push(Diagnostic::spec("t_fin", "required"));
                Vec::new()
            }
        };
        if self.t_fin.as_ref().is_some_and(|v| v.is_empty()) {
            diags.push(Diagnostic::spec("t_fin", "grid is empty"));
        }
        let (n_sites, h) = match self.protocol {
            ProtocolKind::Cnot => (vec![CNOT_SITES], self.h.clone().unwrap_or_else(|| vec![10.0])),
            _ => (self.n_sites.clone().unwrap_or_else(|| vec![3]), vec![0.0]),
        };
        if self.n_sites.as_ref().is_some_and(|v| v.is_empty()) {
            diags.push(Diagnostic::spec("n_sites", "grid is empty"));
        }
        if self.h.as_ref().is_some_and(|v| v.is_empty()) {
            diags.push(Diagnostic::spec("h", "grid is empty"));
        }

        let input = resolve_state("input", self.input.as_ref(), diags);
        let control = resolve_state("control", self.control.as_ref(), diags);
        let evolution = EvolutionConfig {
            dt: self.dt.unwrap_or(holobus_core::dynamics::DEFAULT_DT),
            gap_samples: self
                .gap_samples
                .unwrap_or(holobus_core::dynamics::DEFAULT_GAP_SAMPLES),
            degeneracy_tol: self
                .degeneracy_tol
                .unwrap_or(holobus_core::dynamics::DEFAULT_DEGENERACY_TOL),
            propagator: match self.propagator {
                Some(PropagatorSpec::Eigen) => Propagator::Eigen,
                _ => Propagator::Taylor,
            },
            convergence_tol: self.convergence_tol,
        };
        if let Err(e) = evolution.validate() {
            diags.push(Diagnostic::spec("evolution", e.to_string()));
        }

        let placeholder = Qubit::up();
        let fixed = |source: &Option<InputSource>| match source {
            Some(InputSource::Fixed(q)) => *q,
            _ => placeholder,
        };
        let base = match self.protocol {
            ProtocolKind::Bus | ProtocolKind::Gate => {
                let mut bus = BusConfig::new(3, 1.0, fixed(&input));
                bus.evolution = evolution;
                bus.gap_trace = self.gap_trace;
                if self.protocol == ProtocolKind::Bus {
                    ProtocolConfig::Bus(bus)
                } else {
                    let gate = match &self.gate {
                        Some(g) => resolve_gate(g, diags),
                        None => {
                            diags.push(Diagnostic::spec(
                                "gate",
                                format!("required; known gates: {}", GATE_NAMES.join(", ")),
                            ));
                            None
                        }
                    };
                    let gate = gate.unwrap_or_else(SingleQubitGate::identity);
                    let cfg = GateConfig::new(bus, &gate, self.twist_start.unwrap_or(1))
                        .expect("resolved gates are unitary");
                    ProtocolConfig::Gate(cfg)
                }
            }
            ProtocolKind::Cnot => {
                let mut cfg = CnotConfig::new(0.0, 1.0, fixed(&input), fixed(&control));
                cfg.evolution = evolution;
                cfg.gap_trace = self.gap_trace;
                ProtocolConfig::Cnot(cfg)
            }
            ProtocolKind::FluxVerify => unreachable!("flux specs are planned separately"),
        };

        let grid = SweepGrid { t_fin, n_sites, h };
        // Evolution settings were reported above; per-point checks cover the
        // grid values and their combinations.
        for point in grid.points() {
            if let Err(e) = configure_point(&base, &point).validate() {
                let message = e.to_string();
                let Some(field) = point_field(self.protocol, &e, &message) else {
                    continue;
                };
                let severity = match e {
                    CoreError::ResourceCap { .. } => Severity::Resource,
                    _ => Severity::Spec,
                };
                let diag = Diagnostic {
                    field: field.to_string(),
                    message,
                    severity,
                };
                if !diags.contains(&diag) {
                    diags.push(diag);
                }
            }
        }

        if diags.len() > before {
            return None;
        }
        Some(SweepPlan {
            kind: self.protocol,
            base,
            grid,
            input: input?,
            control: control?,
            seed: self.seed,
        })
    }

    fn flux_plan(&self, diags: &mut Vec<Diagnostic>) -> Option<FluxPlan> {
        let Some(flux) = &self.flux else {
            diags.push(Diagnostic::spec("flux", "required"));
            return None;
        };
        let before = diags.len();
        let params = CircuitParams {
            l_q: flux.l_q,
            currents: flux.currents,
            phi0: flux.phi0,
            u_q: flux.u_q,
            applied: flux.applied,
            ..Default::default()
        };
        if let Err(e) = params.validate() {
            diags.push(Diagnostic::spec("flux", e.to_string()));
        }
        if flux.grid.contains(&0) {
            diags.push(Diagnostic::spec("flux.grid", "grid is empty"));
        }
        if !(flux.tolerance.is_finite() && flux.tolerance > 0.0) {
            diags.push(Diagnostic::spec("flux.tolerance", "must be positive"));
        }
        if let Some(profile) = &flux.profile {
            if profile.points == 0 {
                diags.push(Diagnostic::spec("flux.profile.points", "must be at least 1"));
            }
            let finite = profile.fixed.iter().chain(&profile.q_range).all(|x| x.is_finite());
            if !finite {
                diags.push(Diagnostic::spec("flux.profile", "fluxes must be finite"));
            }
        }
        if diags.len() > before {
            return None;
        }
        let [a, b, c] = flux.grid;
        Some(FluxPlan {
            params,
            grid: FluxGrid::uniform(a, b, c),
            tolerance: flux.tolerance,
            profile: flux.profile.clone(),
        })
    }

    /// File stem for outputs.
    pub fn stem(&self, spec_path: &Path) -> String {
        self.name.clone().unwrap_or_else(|| {
            spec_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "holobus".to_string())
        })
    }
}

/// Spec field a per-point validation error belongs to; `None` for the
/// evolution settings, which are reported once up front.
fn point_field(kind: ProtocolKind, e: &CoreError, message: &str) -> Option<&'static str> {
    if matches!(e, CoreError::ResourceCap { .. }) || message.starts_with("N must") {
        return Some("n_sites");
    }
    if message.starts_with("dt ") || message.starts_with("gap_samples") || message.contains("tol") {
        return None;
    }
    Some(match kind {
        ProtocolKind::Gate if message.starts_with("twist") => "twist_start",
        ProtocolKind::Cnot if message.starts_with("h ") => "h",
        _ => "t_fin",
    })
}

fn resolve_state(
    field: &str,
    spec: Option<&StateSpec>,
    diags: &mut Vec<Diagnostic>,
) -> Option<InputSource> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new;
    let spec = match spec {
        None => return Some(InputSource::Fixed(Qubit::up())),
        Some(s) => s,
    };
    let qubit = match spec {
        StateSpec::Named(name) => match name.trim().to_ascii_lowercase().as_str() {
            "up" => Qubit::up(),
            "down" => Qubit::down(),
            "plus" => Qubit::new(c(r, 0.0), c(r, 0.0)).expect("normalized"),
            "minus" => Qubit::new(c(r, 0.0), c(-r, 0.0)).expect("normalized"),
            "random" => return Some(InputSource::Random),
            _ => {
                diags.push(Diagnostic::spec(
                    field,
                    format!("unknown state `{name}`; expected up, down, plus, minus, random or {{alpha, beta}}"),
                ));
                return None;
            }
        },
        StateSpec::Amplitudes { alpha, beta } => {
            match Qubit::new(c(alpha[0], alpha[1]), c(beta[0], beta[1])) {
                Ok(q) => q,
                Err(e) => {
                    diags.push(Diagnostic::spec(field, e.to_string()));
                    return None;
                }
            }
        }
    };
    Some(InputSource::Fixed(qubit))
}

fn resolve_gate(spec: &GateSpec, diags: &mut Vec<Diagnostic>) -> Option<SingleQubitGate> {
    match spec {
        GateSpec::Named(name) => {
            let gate = lookup_gate(name);
            if gate.is_none() {
                diags.push(Diagnostic::spec(
                    "gate",
                    format!("unknown gate `{name}`; known gates: {}", GATE_NAMES.join(", ")),
                ));
            }
            gate
        }
        GateSpec::Matrix { matrix } => {
            let e = |i: usize, j: usize| Complex64::new(matrix[i][j][0], matrix[i][j][1]);
            let u = Matrix2c::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1));
            match SingleQubitGate::new(u, None) {
                Ok(g) => Some(g),
                Err(err) => {
                    diags.push(Diagnostic::spec("gate.matrix", err.to_string()));
                    None
                }
            }
        }
    }
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

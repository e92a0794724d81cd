//! Schrödinger propagation under driven Hamiltonians, ground manifolds and
//! gap traces.
//!
//! Each step of length `τ` applies `exp(-i H(t_mid) τ)` with `H` taken at
//! the step midpoint (second order in `τ`). The exponential itself is exact
//! to machine precision: either a Taylor series on the matrix-free operator
//! with norm-bounded substeps ([`Propagator::Taylor`], the default) or a
//! dense eigendecomposition per step ([`Propagator::Eigen`]).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Inherent float methods are unavailable on some no_std toolchains.
#[allow(unused_imports)]
use num_traits::Float;

use crate::hamiltonians::DrivenHamiltonian;
use crate::linalg::{eigh, unitary_propagator, CMatrix, CVector, ZERO};
use crate::spin::CompiledOperator;
use crate::state::StateVector;
use crate::{Error, Result};

/// Default time step (units of `1/J`).
pub const DEFAULT_DT: f64 = 0.002;
pub const DEFAULT_GAP_SAMPLES: usize = 21;
/// Ground degeneracy tolerance relative to the spectral width.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// Largest `‖H‖·τ` handled by one Taylor expansion.
const TAYLOR_MAX_ARG: f64 = 0.5;
const TAYLOR_MAX_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagator {
    #[default]
    Taylor,
    Eigen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub gap_samples: usize,
    pub degeneracy_tol: f64,
    pub propagator: Propagator,
    /// When set, every evolution is repeated at `dt/2` and must agree to
    /// this tolerance.
    pub convergence_tol: Option<f64>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt: DEFAULT_DT,
            gap_samples: DEFAULT_GAP_SAMPLES,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            propagator: Propagator::Taylor,
            convergence_tol: None,
        }
    }
}

impl EvolutionConfig {
    pub fn with_dt(dt: f64) -> Self {
        EvolutionConfig {
            dt,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::validation("dt must be positive and finite"));
        }
        if self.gap_samples < 2 {
            return Err(Error::validation("gap_samples must be at least 2"));
        }
        if !(self.degeneracy_tol.is_finite() && self.degeneracy_tol >= 0.0) {
            return Err(Error::validation("degeneracy_tol must be non-negative"));
        }
        if let Some(tol) = self.convergence_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::validation("convergence tolerance must be positive"));
            }
        }
        Ok(())
    }

    /// Same configuration at half the step, without a nested check.
    pub fn halved(&self) -> Self {
        EvolutionConfig {
            dt: self.dt / 2.0,
            convergence_tol: None,
            ..*self
        }
    }

    /// Number of equal steps covering `t_fin`; never longer than `dt`.
    pub fn steps_for(&self, t_fin: f64) -> usize {
        let n = Float::ceil(t_fin / self.dt - 1e-9);
        if n < 1.0 {
            1
        } else {
            n as usize
        }
    }
}

/// Lowest eigenspace of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct GroundManifold {
    /// All eigenvalues, ascending.
    pub energies: Vec<f64>,
    /// Orthonormal columns spanning the ground eigenspace.
    pub basis: CMatrix,
    pub degeneracy: usize,
}

impl GroundManifold {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Gap between the ground manifold and the next level (0 when the whole
    /// spectrum is degenerate).
    pub fn gap(&self) -> f64 {
        self.energies
            .get(self.degeneracy)
            .map_or(0.0, |e| e - self.energies[0])
    }

    /// The ground state when it is unique.
    pub fn unique_state(&self, context: &'static str) -> Result<Vec<Complex64>> {
        if self.degeneracy != 1 {
            return Err(Error::DegenerateGround {
                degeneracy: self.degeneracy,
                context,
            });
        }
        Ok(self.basis.column(0).iter().copied().collect())
    }
}

fn degeneracy(energies: &[f64], tol: f64) -> usize {
    let (Some(&lo), Some(&hi)) = (energies.first(), energies.last()) else {
        return 0;
    };
    let width = hi - lo;
    energies.iter().take_while(|&&e| e - lo <= tol * width).count()
}

/// Rotates `v` so its largest-magnitude entry (first one on ties) is real
/// and positive.
fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Eigenvalues and the ground eigenspace of `h`.
///
/// The degeneracy counts eigenvalues within `tol · (E_max - E_0)` of `E_0`.
/// A unique ground state is returned with its largest amplitude real and
/// positive so repeated runs agree on its phase.
pub fn ground_manifold(h: &CMatrix, tol: f64) -> Result<GroundManifold> {
    let eig = eigh(h)?;
    let d = degeneracy(&eig.values, tol);
    let mut basis = eig.vectors.columns(0, d).into_owned();
    if d == 1 {
        let mut col: Vec<Complex64> = basis.column(0).iter().copied().collect();
        fix_phase(&mut col);
        basis.set_column(0, &CVector::from_vec(col));
    }
    Ok(GroundManifold {
        energies: eig.values,
        basis,
        degeneracy: d,
    })
}

/// Propagates `psi0` from `t = 0` to `t_fin` under `h`.
///
/// With `cfg.convergence_tol` set, the run is repeated at `dt/2` and an
/// [`Error::Accuracy`] carries `1 - |⟨ψ_dt|ψ_dt/2⟩|` if it exceeds the
/// tolerance.
pub fn evolve(
    h: &DrivenHamiltonian,
    psi0: &StateVector,
    cfg: &EvolutionConfig,
) -> Result<StateVector> {
    cfg.validate()?;
    if psi0.dim() != h.system().dim() {
        return Err(Error::validation("state and Hamiltonian dimensions differ"));
    }
    if (psi0.norm() - 1.0).abs() > crate::state::NORM_TOL {
        return Err(Error::validation("initial state must be normalized"));
    }
    let psi = propagate(h, psi0, cfg)?;
    if let Some(tolerance) = cfg.convergence_tol {
        let fine = propagate(h, psi0, &cfg.halved())?;
        let delta = 1.0 - psi.inner(&fine).norm();
        if delta > tolerance {
            return Err(Error::Accuracy { delta, tolerance });
        }
    }
    Ok(psi)
}

fn propagate(h: &DrivenHamiltonian, psi0: &StateVector, cfg: &EvolutionConfig) -> Result<StateVector> {
    let t_fin = h.schedule.t_fin();
    let n_steps = cfg.steps_for(t_fin);
    let tau = t_fin / n_steps as f64;
    let mut psi = psi0.clone();
    match cfg.propagator {
        Propagator::Taylor => {
            let compiled = h.compile();
            let mut op = compiled.evaluate(0.0);
            let mut scratch = TaylorScratch::new(psi.dim());
            for k in 0..n_steps {
                let s = h.schedule.a((k as f64 + 0.5) * tau);
                compiled.evaluate_into(s, &mut op);
                taylor_step(&op, tau, psi.amplitudes_mut(), &mut scratch);
            }
        }
        Propagator::Eigen => {
            for k in 0..n_steps {
                let s = h.schedule.a((k as f64 + 0.5) * tau);
                let u = unitary_propagator(&h.dense_at_fraction(s)?, tau)?;
                let next = &u * CVector::from_column_slice(psi.amplitudes());
                psi.amplitudes_mut().copy_from_slice(next.as_slice());
            }
        }
    }
    Ok(psi)
}

struct TaylorScratch {
    term: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl TaylorScratch {
    fn new(dim: usize) -> Self {
        TaylorScratch {
            term: vec![ZERO; dim],
            next: vec![ZERO; dim],
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `psi ← exp(-i op τ) psi` by Taylor series, split into substeps with
/// `‖op‖·τ_sub ≤ 0.5` and truncated once terms drop below `f64` resolution.
fn taylor_step(op: &CompiledOperator, tau: f64, psi: &mut [Complex64], scratch: &mut TaylorScratch) {
    let bound = op.norm_bound();
    let substeps = Float::ceil(bound * tau / TAYLOR_MAX_ARG).max(1.0) as usize;
    let h = tau / substeps as f64;
    for _ in 0..substeps {
        scratch.term.copy_from_slice(psi);
        for j in 1..=TAYLOR_MAX_TERMS {
            op.apply(&scratch.term, &mut scratch.next);
            let factor = Complex64::new(0.0, -h / j as f64);
            for (t, n) in scratch.term.iter_mut().zip(&scratch.next) {
                *t = n * factor;
            }
            for (p, t) in psi.iter_mut().zip(&scratch.term) {
                *p += t;
            }
            if norm(&scratch.term) <= 1e-17 * norm(psi) {
                break;
            }
        }
    }
}

/// One sample of a gap trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSample {
    /// Schedule fraction `t / t_fin`.
    pub s: f64,
    pub ground_energy: f64,
    pub degeneracy: usize,
    /// `E_d - E_0` above the `d`-fold ground manifold.
    pub gap: f64,
    /// Degeneracy differs from the previous sample.
    pub degeneracy_changed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GapTrace {
    pub samples: Vec<GapSample>,
}

impl GapTrace {
    pub fn min_gap(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.gap).reduce(f64::min)
    }

    pub fn has_degeneracy_change(&self) -> bool {
        self.samples.iter().any(|s| s.degeneracy_changed)
    }
}

/// Diagonalizes `H(s)` at `cfg.gap_samples` equally spaced `s ∈ [0, 1]`.
pub fn gap_trace(h: &DrivenHamiltonian, cfg: &EvolutionConfig) -> Result<GapTrace> {
    gap_trace_with(cfg, |s| h.dense_at_fraction(s))
}

/// [`gap_trace`] over an arbitrary family of dense Hermitian matrices, e.g.
/// one symmetry sector of a driven Hamiltonian.
pub fn gap_trace_with<F>(cfg: &EvolutionConfig, mut matrix_at: F) -> Result<GapTrace>
where
    F: FnMut(f64) -> Result<CMatrix>,
{
    cfg.validate()?;
    let n = cfg.gap_samples;
    let mut samples: Vec<GapSample> = Vec::with_capacity(n);
    for j in 0..n {
        let s = j as f64 / (n - 1) as f64;
        let energies = crate::linalg::eigvalsh(&matrix_at(s)?)?;
        let d = degeneracy(&energies, cfg.degeneracy_tol);
        let gap = energies.get(d).map_or(0.0, |e| e - energies[0]);
        let degeneracy_changed = samples.last().is_some_and(|p| p.degeneracy != d);
        samples.push(GapSample {
            s,
            ground_energy: energies[0],
            degeneracy: d,
            gap,
            degeneracy_changed,
        });
    }
    Ok(GapTrace { samples })
}

//! Effective parameters and potentials of the compound-compound Josephson
//! junction (CCJJ) flux qubit and of the three-flux Heisenberg qubit.
//!
//! Loops are ordered `q, ccjj, l, r`. Fluxes are dimensionless phases
//! (`2πΦ/Φ0`).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Below this `|cos(φ/2)|` the tangent of a half flux is treated as
/// singular.
pub const TANGENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loop {
    Q,
    Ccjj,
    L,
    R,
}

impl Loop {
    pub const ALL: [Loop; 4] = [Loop::Q, Loop::Ccjj, Loop::L, Loop::R];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// Qubit loop inductance `L_q`.
    pub l_q: f64,
    /// Junction critical currents `I_1..I_4`; junctions 1, 2 sit in the
    /// left loop, 3, 4 in the right.
    pub currents: [f64; 4],
    /// Flux quantum `Φ0`.
    pub phi0: f64,
    /// Josephson energy scale `U_q`.
    pub u_q: f64,
    /// Harmonic energy scales `U_n`, per loop.
    pub loop_u: [f64; 4],
    /// Capacitances `C_n`, per loop.
    pub loop_c: [f64; 4],
    /// Applied fluxes `φ_n^x`, per loop.
    pub applied: [f64; 4],
    /// Flux scale factors of the three-flux potential.
    pub alpha: [f64; 3],
}

impl Default for CircuitParams {
    fn default() -> Self {
        CircuitParams {
            l_q: 1.0,
            currents: [1.0; 4],
            phi0: 1.0,
            u_q: 1.0,
            loop_u: [1.0; 4],
            loop_c: [1.0; 4],
            applied: [0.0; 4],
            alpha: [1.0; 3],
        }
    }
}

impl CircuitParams {
    /// Reduced units with all critical currents equal to `i_c`.
    pub fn symmetric(l_q: f64, i_c: f64) -> Self {
        CircuitParams {
            l_q,
            currents: [i_c; 4],
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.l_q) {
            return Err(Error::validation("L_q must be positive"));
        }
        if !positive(self.phi0) {
            return Err(Error::validation("Φ0 must be positive"));
        }
        if !self.currents.iter().all(|&i| positive(i)) {
            return Err(Error::validation("critical currents must be positive"));
        }
        if !self.loop_c.iter().all(|&c| positive(c)) {
            return Err(Error::validation("capacitances must be positive"));
        }
        let finite = [self.u_q]
            .iter()
            .chain(&self.loop_u)
            .chain(&self.applied)
            .chain(&self.alpha)
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::validation("circuit parameters must be finite"));
        }
        Ok(())
    }

    /// `2π L_q I / Φ0`.
    fn beta_of(&self, current: f64) -> f64 {
        2.0 * PI * self.l_q * current / self.phi0
    }

    /// `8π L_q I_c / Φ0` with `I_c = I_1`.
    pub fn symmetric_prefactor(&self) -> f64 {
        8.0 * PI * self.l_q * self.currents[0] / self.phi0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub beta_eff: f64,
    pub phi_q0: f64,
    pub gamma: f64,
    pub gamma0: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub beta_l: f64,
    pub beta_r: f64,
    /// `(β_{L,+}, β_{L,-})`.
    pub beta_l_pm: (f64, f64),
    /// `(β_{R,+}, β_{R,-})`.
    pub beta_r_pm: (f64, f64),
    pub phi_l0: f64,
    pub phi_r0: f64,
}

/// Combines two junction branches of strengths `plus ± minus` threaded by
/// `phi`: returns the effective strength and the offset phase
/// `atan((minus/plus) tan(phi/2))`.
///
/// With `minus = 0` this is exactly `(plus cos(phi/2), 0)` for every flux.
fn combine(plus: f64, minus: f64, phi: f64, flux: &'static str) -> Result<(f64, f64)> {
    if plus == 0.0 {
        return Err(Error::Domain(format!("β_+ vanishes while combining {flux}")));
    }
    let half = phi / 2.0;
    let c = half.cos();
    if minus == 0.0 {
        return Ok((plus * c, 0.0));
    }
    if c.abs() < TANGENT_EPS {
        return Err(Error::SingularTangent { flux });
    }
    let r = minus / plus * half.tan();
    Ok((plus * c * (1.0 + r * r).sqrt(), r.atan()))
}

/// `β_eff`, `φ_q^0` and the intermediate quantities for loop fluxes
/// `φ_ccjj`, `φ_L`, `φ_R`.
pub fn effective_params(p: &CircuitParams, phi_ccjj: f64, phi_l: f64, phi_r: f64) -> Result<EffectiveParams> {
    p.validate()?;
    let [i1, i2, i3, i4] = p.currents;
    let beta_l_pm = (p.beta_of(i1 + i2), p.beta_of(i1 - i2));
    let beta_r_pm = (p.beta_of(i3 + i4), p.beta_of(i3 - i4));
    let (beta_l, phi_l0) = combine(beta_l_pm.0, beta_l_pm.1, phi_l, "phi_l")?;
    let (beta_r, phi_r0) = combine(beta_r_pm.0, beta_r_pm.1, phi_r, "phi_r")?;
    let beta_plus = beta_l + beta_r;
    let beta_minus = beta_l - beta_r;
    let gamma = phi_ccjj - (phi_l0 - phi_r0);
    let (beta_eff, offset) = combine(beta_plus, beta_minus, gamma, "gamma")?;
    let gamma0 = -offset;
    Ok(EffectiveParams {
        beta_eff,
        phi_q0: (phi_l0 + phi_r0) / 2.0 + gamma0,
        gamma,
        gamma0,
        beta_plus,
        beta_minus,
        beta_l,
        beta_r,
        beta_l_pm,
        beta_r_pm,
        phi_l0,
        phi_r0,
    })
}

/// `Σ_n U_n (φ_n - φ_n^x)²/2 - U_q β_eff cos(φ_q - φ_q^0)` at loop fluxes
/// `phi` (ordered `q, ccjj, l, r`).
pub fn circuit_potential(p: &CircuitParams, phi: [f64; 4]) -> Result<f64> {
    let eff = effective_params(p, phi[1], phi[2], phi[3])?;
    let harmonic: f64 = (0..4)
        .map(|n| p.loop_u[n] * (phi[n] - p.applied[n]).powi(2) / 2.0)
        .sum();
    Ok(harmonic - p.u_q * eff.beta_eff * (phi[0] - eff.phi_q0).cos())
}

/// [`circuit_potential`] along `phi_q` with the other three loops held at
/// `fixed` (`ccjj, l, r`).
pub fn potential_grid(p: &CircuitParams, phi_q: &[f64], fixed: [f64; 3]) -> Result<Vec<f64>> {
    let [c, l, r] = fixed;
    phi_q
        .iter()
        .map(|&q| circuit_potential(p, [q, c, l, r]))
        .collect()
}

/// Three-flux potential
/// `Σ_n U_n (φ_n - φ_n^x)²/2 - U_q Π_n cos(α_n φ_n)` using the first three
/// loop scales and applied fluxes.
pub fn heisenberg_potential(p: &CircuitParams, phi: [f64; 3]) -> f64 {
    let harmonic: f64 = (0..3)
        .map(|n| p.loop_u[n] * (phi[n] - p.applied[n]).powi(2) / 2.0)
        .sum();
    let product: f64 = (0..3).map(|n| (p.alpha[n] * phi[n]).cos()).product();
    harmonic - p.u_q * product
}

/// Flux values checked by [`verify_simplification`]: every `(ccjj, y, q)`
/// combination, with `φ_L = φ_R = y`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FluxGrid {
    pub ccjj: Vec<f64>,
    pub y: Vec<f64>,
    pub q: Vec<f64>,
}

impl FluxGrid {
    /// `n` equally spaced values on `[-π, π]` for each axis.
    pub fn uniform(n_ccjj: usize, n_y: usize, n_q: usize) -> Self {
        FluxGrid {
            ccjj: linspace(-PI, PI, n_ccjj),
            y: linspace(-PI, PI, n_y),
            q: linspace(-PI, PI, n_q),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ccjj.is_empty() || self.y.is_empty() || self.q.is_empty()
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Outcome of comparing the full CCJJ algebra with its symmetric
/// simplification.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimplificationReport {
    /// `(ccjj, y)` pairs evaluated.
    pub points: usize,
    /// `max |β_eff - β_+ cos(φ_ccjj/2)|`, with `β_+ = (8π L_q I_c/Φ0) cos(φ_y/2)`.
    pub max_beta_deviation: f64,
    /// `max |U_q β_eff cos(φ_q - φ_q^0) - U_q (8π L_q I_c/Φ0) cos(φ_y/2) cos(φ_ccjj/2) cos(φ_q)|`.
    pub max_potential_deviation: f64,
    pub max_abs_phi_q0: f64,
    /// Simplifying assumptions the parameters violate.
    pub violations: Vec<String>,
    /// Grid points where the full algebra could not be evaluated.
    pub errors: Vec<String>,
}

impl SimplificationReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_beta_deviation.max(self.max_potential_deviation)
    }

    /// No violated assumptions, no failed points, deviations within `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.violations.is_empty() && self.errors.is_empty() && self.max_deviation() < tol
    }
}

/// Evaluates both forms of `β_eff` and of the Josephson potential term over
/// `grid` and reports the largest disagreements.
///
/// The simplified forms assume equal critical currents and `φ_L = φ_R`
/// (with equal applied fluxes); parameters violating the first or last are
/// listed in the report rather than rejected.
pub fn verify_simplification(p: &CircuitParams, grid: &FluxGrid) -> Result<SimplificationReport> {
    p.validate()?;
    if grid.is_empty() {
        return Err(Error::validation("flux grid is empty"));
    }
    let mut report = SimplificationReport::default();
    let i_c = p.currents[0];
    if p.currents.iter().any(|&i| i != i_c) {
        report.violations.push(format!(
            "critical currents are not all equal: {:?}",
            p.currents
        ));
    }
    if p.applied[Loop::L.index()] != p.applied[Loop::R.index()] {
        report.violations.push(format!(
            "applied left and right fluxes differ: {} vs {}",
            p.applied[Loop::L.index()],
            p.applied[Loop::R.index()]
        ));
    }
    let prefactor = p.symmetric_prefactor();
    for &ccjj in &grid.ccjj {
        for &y in &grid.y {
            report.points += 1;
            let eff = match effective_params(p, ccjj, y, y) {
                Ok(e) => e,
                Err(e) => {
                    report.errors.push(format!("φ_ccjj = {ccjj}, φ_y = {y}: {e}"));
                    continue;
                }
            };
            let simple = prefactor * (y / 2.0).cos() * (ccjj / 2.0).cos();
            report.max_beta_deviation = report.max_beta_deviation.max((eff.beta_eff - simple).abs());
            report.max_abs_phi_q0 = report.max_abs_phi_q0.max(eff.phi_q0.abs());
            for &q in &grid.q {
                let full = p.u_q * eff.beta_eff * (q - eff.phi_q0).cos();
                let reduced = p.u_q * simple * q.cos();
                report.max_potential_deviation = report.max_potential_deviation.max((full - reduced).abs());
            }
        }
    }
    Ok(report)
}

//! Pure states, reduced density matrices and fidelities.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Inherent float methods are unavailable on some no_std toolchains.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{eigvalsh, is_hermitian, CMatrix, ONE, ZERO};
use crate::{Error, Result};

/// Normalization tolerance for states handed to the simulator.
pub const NORM_TOL: f64 = 1e-10;

/// A normalized single-qubit state `α|↑⟩ + β|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Qubit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!(
                "qubit amplitudes must be normalized (|α|²+|β|² = {norm})"
            )));
        }
        Ok(Qubit { alpha, beta })
    }

    /// Normalizes `(alpha, beta)`; fails only for the zero vector.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::validation("qubit amplitudes cannot all vanish"));
        }
        Ok(Qubit {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    pub fn up() -> Self {
        Qubit {
            alpha: ONE,
            beta: ZERO,
        }
    }

    pub fn down() -> Self {
        Qubit {
            alpha: ZERO,
            beta: ONE,
        }
    }

    /// Point on the Bloch sphere at polar angle `theta`, azimuth `phi`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Qubit {
            alpha: Complex64::new((theta / 2.0).cos(), 0.0),
            beta: Complex64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.alpha, self.beta]
    }
}

/// Amplitudes over `2^n_sites` basis states, site 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        let state = Self::unchecked(n_sites, amps)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!(
                "state must be normalized (norm {norm})"
            )));
        }
        Ok(state)
    }

    /// Only checks the length; used for intermediate propagation buffers.
    pub(crate) fn unchecked(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_sites >= usize::BITS as usize || amps.len() != 1usize << n_sites {
            return Err(Error::validation(format!(
                "{} amplitudes do not describe {n_sites} sites",
                amps.len()
            )));
        }
        Ok(StateVector { n_sites, amps })
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n_sites];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::validation("basis index out of range"))? = ONE;
        Ok(StateVector { n_sites, amps })
    }

    pub fn from_qubit(q: &Qubit) -> Self {
        StateVector {
            n_sites: 1,
            amps: vec![q.alpha, q.beta],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `self ⊗ other`; `self`'s sites come first.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        StateVector {
            n_sites: self.n_sites + other.n_sites,
            amps,
        }
    }

    /// `⟨σ^z_site⟩` (site 0 most significant; a set bit is spin down).
    pub fn expectation_z(&self, site: usize) -> Result<f64> {
        self.check_site(site)?;
        let bit = 1 << (self.n_sites - 1 - site);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(k, a)| if k & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            })
        }
    }

    /// Reduced state on `keep`, traced over everything else.
    ///
    /// Kept sites are taken in ascending order; the first kept site is the
    /// most significant index of the result.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut sites: Vec<usize> = keep.to_vec();
        sites.sort_unstable();
        sites.dedup();
        if sites.is_empty() {
            return Err(Error::validation("partial trace needs at least one kept site"));
        }
        for &s in &sites {
            self.check_site(s)?;
        }
        let n = self.n_sites;
        let bits: Vec<usize> = sites.iter().map(|&s| 1 << (n - 1 - s)).collect();
        let d_keep = 1 << sites.len();
        let d_rest = self.dim() / d_keep;

        // Row `i` of `a` holds the amplitudes with kept bits equal to `i`,
        // ordered by the remaining bits.
        let mut a = CMatrix::zeros(d_keep, d_rest);
        let mut next_col = vec![0usize; d_keep];
        for (k, &amp) in self.amps.iter().enumerate() {
            let mut i = 0;
            for &bit in &bits {
                i = (i << 1) | usize::from(k & bit != 0);
            }
            a[(i, next_col[i])] = amp;
            next_col[i] += 1;
        }
        Ok(DensityMatrix {
            sites,
            rho: &a * a.adjoint(),
        })
    }
}

/// Reduced density matrix over an ascending list of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    sites: Vec<usize>,
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    /// `⟨φ|ρ|φ⟩` for a pure target, clamped to `[0, 1]`.
    pub fn fidelity_with_pure(&self, target: &[Complex64]) -> Result<f64> {
        if target.len() != self.rho.nrows() {
            return Err(Error::validation(format!(
                "target has {} amplitudes, reduced state has dimension {}",
                target.len(),
                self.rho.nrows()
            )));
        }
        let mut acc = ZERO;
        for (i, ti) in target.iter().enumerate() {
            for (j, tj) in target.iter().enumerate() {
                acc += ti.conj() * self.rho[(i, j)] * tj;
            }
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// Checks Hermiticity, unit trace and positivity to `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        if !is_hermitian(&self.rho, tol) || (self.trace() - ONE).norm() > tol {
            return false;
        }
        match eigvalsh(&self.rho) {
            Ok(ev) => ev.first().is_some_and(|&e| e >= -tol),
            Err(_) => false,
        }
    }
}

//! Pauli-product operators on labelled spin-½ systems.
//!
//! An [`OperatorSum`] is a real-weighted list of one- and two-site Pauli
//! products. It can be realized as a dense Hermitian matrix
//! ([`OperatorSum::build_dense`]) or compiled into a matrix-free form
//! ([`CompiledOperator`]) used by the propagator.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::frame::Frame;
use crate::linalg::{CMatrix, ZERO};
use crate::{Error, Result};

/// Largest system [`OperatorSum::build_dense`] accepts unless told otherwise.
pub const DEFAULT_SITE_CAP: usize = 14;

/// Frame products below this magnitude are dropped from twisted bonds.
const BOND_WEIGHT_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Ordered, uniquely labelled spin-½ sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSystem {
    labels: Vec<String>,
}

impl SpinSystem {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("a spin system needs at least one site"));
        }
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::validation(format!("duplicate site label {l:?}")));
            }
        }
        Ok(SpinSystem { labels })
    }

    /// Sites labelled `"1"..="n"`.
    pub fn chain(n: usize) -> Result<Self> {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        SpinSystem::new(&labels)
    }

    pub fn n_sites(&self) -> usize {
        self.labels.len()
    }

    /// Hilbert-space dimension, `2^n_sites`.
    pub fn dim(&self) -> usize {
        1usize << self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, site: usize) -> Option<&str> {
        self.labels.get(site).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Bit of `site` inside a basis index (site 0 is most significant).
    pub fn site_bit(&self, site: usize) -> usize {
        1 << (self.n_sites() - 1 - site)
    }

    fn check(&self, site: usize) -> Result<()> {
        if site < self.n_sites() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites(),
            })
        }
    }
}

/// A single Pauli factor `σ^axis` on `site`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Factor {
    pub site: usize,
    pub axis: Axis,
}

/// `weight · Π σ^axis_site` with at most two factors on distinct sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    weight: f64,
    factors: Vec<Factor>,
}

impl PauliTerm {
    pub fn constant(weight: f64) -> Self {
        PauliTerm {
            weight,
            factors: Vec::new(),
        }
    }

    pub fn single(weight: f64, site: usize, axis: Axis) -> Self {
        PauliTerm {
            weight,
            factors: vec![Factor { site, axis }],
        }
    }

    pub fn pair(weight: f64, (i, a): (usize, Axis), (j, b): (usize, Axis)) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidBond(i));
        }
        let mut factors = vec![Factor { site: i, axis: a }, Factor { site: j, axis: b }];
        factors.sort();
        Ok(PauliTerm { weight, factors })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn touches(&self, site: usize) -> bool {
        self.factors.iter().any(|f| f.site == site)
    }

    pub fn scaled(&self, by: f64) -> Self {
        PauliTerm {
            weight: self.weight * by,
            factors: self.factors.clone(),
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.weight)?;
        for factor in &self.factors {
            write!(f, " σ{}_{}", factor.axis, factor.site)?;
        }
        Ok(())
    }
}

/// Heisenberg coupling `weight · Σ_a (F_i σ)^a_i (F_j σ)^a_j`.
///
/// With frame matrices `M_i`, `M_j` the bond expands to
/// `Σ_bc (M_i M_jᵀ)_bc σ^b_i σ^c_j`, so untwisted bonds give exactly the
/// three terms `xx + yy + zz` and a twisted bond at most nine.
pub fn heisenberg_bond(
    i: usize,
    j: usize,
    frame_i: &Frame,
    frame_j: &Frame,
    weight: f64,
) -> Result<Vec<PauliTerm>> {
    if i == j {
        return Err(Error::InvalidBond(i));
    }
    let mi = frame_i.matrix();
    let mj = frame_j.matrix();
    let mut terms = Vec::new();
    for b in Axis::ALL {
        for c in Axis::ALL {
            let coupling: f64 = (0..3)
                .map(|a| mi[(b.index(), a)] * mj[(c.index(), a)])
                .sum();
            if coupling.abs() > BOND_WEIGHT_CUTOFF {
                terms.push(PauliTerm::pair(weight * coupling, (i, b), (j, c))?);
            }
        }
    }
    Ok(terms)
}

/// Hermitian operator as a sum of real-weighted Pauli products.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    system: SpinSystem,
    terms: Vec<PauliTerm>,
}

impl OperatorSum {
    pub fn new(system: SpinSystem) -> Self {
        OperatorSum {
            system,
            terms: Vec::new(),
        }
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn n_sites(&self) -> usize {
        self.system.n_sites()
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if !term.weight.is_finite() {
            return Err(Error::validation("Pauli term weight must be finite"));
        }
        for f in &term.factors {
            self.system.check(f.site)?;
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = PauliTerm>>(&mut self, terms: I) -> Result<()> {
        terms.into_iter().try_for_each(|t| self.push(t))
    }

    /// Adds a Heisenberg bond between `i` and `j` in the given frames.
    pub fn add_bond(
        &mut self,
        i: usize,
        j: usize,
        frame_i: &Frame,
        frame_j: &Frame,
        weight: f64,
    ) -> Result<()> {
        self.system.check(i)?;
        self.system.check(j)?;
        let bond = heisenberg_bond(i, j, frame_i, frame_j, weight)?;
        self.extend(bond)
    }

    /// True when some term has a factor on `site`.
    pub fn acts_on(&self, site: usize) -> bool {
        self.terms.iter().any(|t| t.touches(site))
    }

    pub fn scaled(&self, by: f64) -> Self {
        OperatorSum {
            system: self.system.clone(),
            terms: self.terms.iter().map(|t| t.scaled(by)).collect(),
        }
    }

    /// Sum of |weights|, an upper bound on the operator norm.
    pub fn weight_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.weight.abs()).sum()
    }

    /// Dense `2^N × 2^N` realization with the default site cap.
    pub fn build_dense(&self) -> Result<CMatrix> {
        self.build_dense_capped(DEFAULT_SITE_CAP)
    }

    pub fn build_dense_capped(&self, cap: usize) -> Result<CMatrix> {
        check_cap(self.n_sites(), cap)?;
        Ok(self.compile().to_dense())
    }

    pub fn compile(&self) -> CompiledOperator {
        CompiledOperator::from_terms(&self.system, &self.terms)
    }
}

pub(crate) fn check_cap(n_sites: usize, cap: usize) -> Result<()> {
    if n_sites > cap {
        Err(Error::ResourceCap { n_sites, cap })
    } else {
        Ok(())
    }
}

/// Matrix-free operator: `out[k ^ flip] += coeffs[k] · x[k]` per block.
///
/// A Pauli product maps basis state `k` to `k ^ flip` (bits flipped by its
/// `x`/`y` factors) with a phase, so all terms sharing a flip pattern fold
/// into one coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledOperator {
    dim: usize,
    blocks: Vec<FlipBlock>,
}

#[derive(Debug, Clone, PartialEq)]
struct FlipBlock {
    flip: usize,
    coeffs: Vec<Complex64>,
}

impl CompiledOperator {
    fn from_terms(system: &SpinSystem, terms: &[PauliTerm]) -> Self {
        let dim = system.dim();
        let mut blocks: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
        for term in terms {
            let mut flip = 0usize;
            let mut sign_mask = 0usize;
            let mut n_y = 0u32;
            for f in &term.factors {
                let bit = system.site_bit(f.site);
                match f.axis {
                    Axis::X => flip |= bit,
                    Axis::Y => {
                        flip |= bit;
                        sign_mask |= bit;
                        n_y += 1;
                    }
                    Axis::Z => sign_mask |= bit,
                }
            }
            // Y|b> = i(-1)^b |1-b>, Z|b> = (-1)^b |b>.
            let base = match n_y % 4 {
                0 => Complex64::new(term.weight, 0.0),
                1 => Complex64::new(0.0, term.weight),
                2 => Complex64::new(-term.weight, 0.0),
                _ => Complex64::new(0.0, -term.weight),
            };
            let coeffs = blocks.entry(flip).or_insert_with(|| vec![ZERO; dim]);
            for (k, c) in coeffs.iter_mut().enumerate() {
                if (k & sign_mask).count_ones() % 2 == 0 {
                    *c += base;
                } else {
                    *c -= base;
                }
            }
        }
        CompiledOperator {
            dim,
            blocks: blocks
                .into_iter()
                .map(|(flip, coeffs)| FlipBlock { flip, coeffs })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = self · x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        out.iter_mut().for_each(|o| *o = ZERO);
        for block in &self.blocks {
            let flip = block.flip;
            for (k, (&c, &xk)) in block.coeffs.iter().zip(x).enumerate() {
                out[k ^ flip] += c * xk;
            }
        }
    }

    /// Upper bound on the spectral norm: Σ_blocks max_k |coeff|.
    pub fn norm_bound(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm())))
            .sum()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for block in &self.blocks {
            for (k, &c) in block.coeffs.iter().enumerate() {
                m[(k ^ block.flip, k)] += c;
            }
        }
        m
    }

    /// `Σ weights[p] · parts[p]`, written into `out` (which is reshaped as
    /// needed). All parts must share a dimension.
    pub fn combine_into(parts: &[&CompiledOperator], weights: &[f64], out: &mut CompiledOperator) {
        debug_assert_eq!(parts.len(), weights.len());
        let dim = parts.first().map_or(out.dim, |p| p.dim);
        let mut flips: Vec<usize> = parts
            .iter()
            .flat_map(|p| p.blocks.iter().map(|b| b.flip))
            .collect();
        flips.sort_unstable();
        flips.dedup();
        let layout_matches = out.dim == dim
            && out.blocks.len() == flips.len()
            && out.blocks.iter().zip(&flips).all(|(b, &f)| b.flip == f);
        if !layout_matches {
            out.dim = dim;
            out.blocks = flips
                .iter()
                .map(|&flip| FlipBlock {
                    flip,
                    coeffs: vec![ZERO; dim],
                })
                .collect();
        } else {
            for b in &mut out.blocks {
                b.coeffs.iter_mut().for_each(|c| *c = ZERO);
            }
        }
        for (part, &w) in parts.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for block in &part.blocks {
                let target = out
                    .blocks
                    .binary_search_by_key(&block.flip, |b| b.flip)
                    .expect("flip collected above");
                for (o, &c) in out.blocks[target].coeffs.iter_mut().zip(&block.coeffs) {
                    *o += c * w;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{Frame, SingleQubitGate};
    use crate::linalg::{eigvalsh, is_hermitian, kron, max_abs};

    fn bond_terms(frame_j: &Frame) -> Vec<(Axis, Axis, f64)> {
        heisenberg_bond(0, 1, &Frame::identity(), frame_j, 1.0)
            .unwrap()
            .iter()
            .map(|t| (t.factors()[0].axis, t.factors()[1].axis, t.weight()))
            .collect()
    }

    #[test]
    fn untwisted_bond_is_three_terms() {
        let terms = bond_terms(&Frame::identity());
        assert_eq!(
            terms,
            vec![(Axis::X, Axis::X, 1.0), (Axis::Y, Axis::Y, 1.0), (Axis::Z, Axis::Z, 1.0)]
        );
    }

    #[test]
    fn hadamard_twisted_bond() {
        let had = Frame::from_gate(&SingleQubitGate::hadamard()).unwrap();
        let mut terms = bond_terms(&had);
        terms.iter_mut().for_each(|t| t.2 = (t.2 * 1e12).round() / 1e12);
        assert_eq!(
            terms,
            vec![(Axis::X, Axis::Z, 1.0), (Axis::Y, Axis::Y, -1.0), (Axis::Z, Axis::X, 1.0)]
        );
    }

    #[test]
    fn self_bond_rejected() {
        let id = Frame::identity();
        assert_eq!(heisenberg_bond(2, 2, &id, &id, 1.0), Err(Error::InvalidBond(2)));
        assert!(PauliTerm::pair(1.0, (1, Axis::X), (1, Axis::Z)).is_err());
    }

    #[test]
    fn sigma_z_on_site_zero_is_most_significant() {
        let mut op = OperatorSum::new(SpinSystem::chain(2).unwrap());
        op.push(PauliTerm::single(1.0, 0, Axis::Z)).unwrap();
        let m = op.build_dense().unwrap();
        let diag: Vec<f64> = (0..4).map(|k| m[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(max_abs(&(m.clone() - CMatrix::from_diagonal(&m.diagonal()))), 0.0);
    }

    #[test]
    fn two_site_heisenberg_spectrum() {
        let mut op = OperatorSum::new(SpinSystem::chain(2).unwrap());
        op.add_bond(0, 1, &Frame::identity(), &Frame::identity(), 1.0).unwrap();
        let m = op.build_dense().unwrap();
        assert!(is_hermitian(&m, 1e-12));
        let ev = eigvalsh(&m).unwrap();
        let expected = [-3.0, 1.0, 1.0, 1.0];
        for (e, x) in ev.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn site_out_of_range_rejected() {
        let mut op = OperatorSum::new(SpinSystem::chain(2).unwrap());
        let err = op.push(PauliTerm::single(1.0, 2, Axis::X)).unwrap_err();
        assert_eq!(err, Error::SiteOutOfRange { site: 2, n_sites: 2 });
    }

    #[test]
    fn dense_cap_enforced() {
        let op = OperatorSum::new(SpinSystem::chain(5).unwrap());
        assert_eq!(
            op.build_dense_capped(4),
            Err(Error::ResourceCap { n_sites: 5, cap: 4 })
        );
        assert!(op.build_dense_capped(5).is_ok());
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(SpinSystem::new(&["a", "b", "a"]).is_err());
        assert!(SpinSystem::new::<&str>(&[]).is_err());
    }

    #[test]
    fn compiled_apply_matches_dense() {
        let sys = SpinSystem::chain(3).unwrap();
        let mut op = OperatorSum::new(sys);
        op.push(PauliTerm::pair(0.7, (0, Axis::Y), (2, Axis::X)).unwrap()).unwrap();
        op.push(PauliTerm::pair(-1.3, (1, Axis::Y), (2, Axis::Y)).unwrap()).unwrap();
        op.push(PauliTerm::single(0.4, 1, Axis::Y)).unwrap();
        op.push(PauliTerm::constant(0.25)).unwrap();
        let compiled = op.compile();
        let dense = compiled.to_dense();
        let x: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let mut y = vec![ZERO; 8];
        compiled.apply(&x, &mut y);
        let xv = crate::linalg::CVector::from_vec(x);
        let expected = &dense * xv;
        for k in 0..8 {
            assert!((y[k] - expected[k]).norm() < 1e-12);
        }
        assert!(compiled.norm_bound() >= 0.7 + 1.3 + 0.4 + 0.25 - 1e-12);
    }

    #[test]
    fn y_on_single_site_matches_pauli_matrix() {
        let mut op = OperatorSum::new(SpinSystem::chain(1).unwrap());
        op.push(PauliTerm::single(1.0, 0, Axis::Y)).unwrap();
        let m = op.build_dense().unwrap();
        let y = CMatrix::from_row_slice(
            2,
            2,
            &[ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO],
        );
        assert_eq!(m, y);
        let k = kron(&y, &y);
        assert_eq!(k[(0, 3)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn combine_into_is_linear() {
        let sys = SpinSystem::chain(2).unwrap();
        let mut a = OperatorSum::new(sys.clone());
        a.push(PauliTerm::single(1.0, 0, Axis::X)).unwrap();
        let mut b = OperatorSum::new(sys);
        b.push(PauliTerm::pair(2.0, (0, Axis::Z), (1, Axis::Z)).unwrap()).unwrap();
        let (ca, cb) = (a.compile(), b.compile());
        let mut out = ca.clone();
        CompiledOperator::combine_into(&[&ca, &cb], &[0.5, -1.5], &mut out);
        let expected = a.build_dense().unwrap() * Complex64::new(0.5, 0.0)
            + b.build_dense().unwrap() * Complex64::new(-1.5, 0.0);
        assert!(max_abs(&(out.to_dense() - expected)) < 1e-15);
        // Reusing the buffer must not leak old coefficients.
        CompiledOperator::combine_into(&[&ca, &cb], &[1.0, 0.0], &mut out);
        assert!(max_abs(&(out.to_dense() - a.build_dense().unwrap())) < 1e-15);
    }
}

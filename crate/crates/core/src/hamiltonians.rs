//! The chain, bus and CNOT Hamiltonians (energies in units of the
//! Heisenberg bond, `J = 1`).

use alloc::vec::Vec;

use crate::frame::{Frame, SingleQubitGate};
use crate::linalg::CMatrix;
use crate::schedule::Schedule;
use crate::spin::{Axis, CompiledOperator, OperatorSum, PauliTerm, SpinSystem};
use crate::{Error, Result};

/// Site labels of the CNOT network, in basis order.
pub const CNOT_LABELS: [&str; 8] = ["in", "1", "2", "3", "4", "a", "c", "out"];

/// Site indices of the CNOT network.
pub mod cnot_site {
    pub const IN: usize = 0;
    pub const S1: usize = 1;
    pub const S2: usize = 2;
    pub const S3: usize = 3;
    pub const S4: usize = 4;
    pub const ANCILLA: usize = 5;
    pub const CONTROL: usize = 6;
    pub const OUT: usize = 7;
}

/// Open antiferromagnetic Heisenberg chain `Σ σ_i·σ_{i+1}` on sites `1..=n`.
pub fn heisenberg_chain(n: usize) -> Result<OperatorSum> {
    twisted_chain(n, &Frame::identity(), n)
}

/// Chain whose sites `twist_start..n` (0-based) have their Pauli axes
/// rotated by `frame`. Bond `(twist_start-1, twist_start)` is the mixed
/// bond `σ·σ'`; bonds inside the twisted segment are `σ'·σ'`.
///
/// `twist_start = n` leaves the chain untwisted.
pub fn twisted_chain(n: usize, frame: &Frame, twist_start: usize) -> Result<OperatorSum> {
    let mut op = OperatorSum::new(SpinSystem::chain(n)?);
    let frames = site_frames(n, frame, twist_start);
    for i in 0..n.saturating_sub(1) {
        op.add_bond(i, i + 1, &frames[i], &frames[i + 1], 1.0)?;
    }
    Ok(op)
}

fn site_frames(n: usize, frame: &Frame, twist_start: usize) -> Vec<Frame> {
    (0..n)
        .map(|s| if s >= twist_start { *frame } else { Frame::identity() })
        .collect()
}

/// `H(t) = fixed + A(t)·rising + B(t)·falling` for a schedule `A`, `B = 1-A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivenHamiltonian {
    pub fixed: OperatorSum,
    pub rising: OperatorSum,
    pub falling: OperatorSum,
    pub schedule: Schedule,
}

impl DrivenHamiltonian {
    pub fn new(
        fixed: OperatorSum,
        rising: OperatorSum,
        falling: OperatorSum,
        schedule: Schedule,
    ) -> Result<Self> {
        if fixed.system() != rising.system() || fixed.system() != falling.system() {
            return Err(Error::validation(
                "driven Hamiltonian parts must share one spin system",
            ));
        }
        Ok(DrivenHamiltonian {
            fixed,
            rising,
            falling,
            schedule,
        })
    }

    /// A time-independent Hamiltonian (useful for tests and quenches).
    pub fn constant(h: OperatorSum, schedule: Schedule) -> Self {
        let empty = OperatorSum::new(h.system().clone());
        DrivenHamiltonian {
            fixed: h,
            rising: empty.clone(),
            falling: empty,
            schedule,
        }
    }

    pub fn system(&self) -> &SpinSystem {
        self.fixed.system()
    }

    /// Part weights `(fixed, rising, falling)` at schedule fraction `s`.
    pub fn weights(s: f64) -> [f64; 3] {
        let a = s.clamp(0.0, 1.0);
        [1.0, a, 1.0 - a]
    }

    /// Operator at schedule fraction `s = A(t) ∈ [0, 1]`.
    pub fn at_fraction(&self, s: f64) -> OperatorSum {
        let [wf, wr, wl] = Self::weights(s);
        let mut op = self.fixed.scaled(wf);
        for (part, w) in [(&self.rising, wr), (&self.falling, wl)] {
            if w != 0.0 {
                op.extend(part.terms().iter().map(|t| t.scaled(w)))
                    .expect("parts share the system");
            }
        }
        op
    }

    pub fn at_time(&self, t: f64) -> OperatorSum {
        self.at_fraction(self.schedule.a(t))
    }

    pub fn dense_at_fraction(&self, s: f64) -> Result<CMatrix> {
        self.at_fraction(s).build_dense()
    }

    pub fn compile(&self) -> CompiledDriven {
        CompiledDriven {
            parts: [
                self.fixed.compile(),
                self.rising.compile(),
                self.falling.compile(),
            ],
        }
    }
}

/// Matrix-free parts of a [`DrivenHamiltonian`].
#[derive(Debug, Clone)]
pub struct CompiledDriven {
    parts: [CompiledOperator; 3],
}

impl CompiledDriven {
    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    /// Writes `H(s)` into `out`, reusing its storage.
    pub fn evaluate_into(&self, s: f64, out: &mut CompiledOperator) {
        let refs = [&self.parts[0], &self.parts[1], &self.parts[2]];
        CompiledOperator::combine_into(&refs, &DrivenHamiltonian::weights(s), out);
    }

    pub fn evaluate(&self, s: f64) -> CompiledOperator {
        let mut out = self.parts[0].clone();
        self.evaluate_into(s, &mut out);
        out
    }
}

/// Adiabatic bus on `n` spins with an optional twist.
///
/// Bond `(0, 1)` is switched on by `A(t)`, bond `(n-2, n-1)` switched off by
/// `B(t)`, the bonds in between are fixed. Sites `twist_start..n` carry
/// `frame`.
pub fn bus_hamiltonian(
    n: usize,
    frame: &Frame,
    twist_start: usize,
    schedule: Schedule,
) -> Result<DrivenHamiltonian> {
    if n < 3 {
        return Err(Error::validation("the bus needs at least three spins"));
    }
    let system = SpinSystem::chain(n)?;
    let frames = site_frames(n, frame, twist_start);
    let mut fixed = OperatorSum::new(system.clone());
    let mut rising = OperatorSum::new(system.clone());
    let mut falling = OperatorSum::new(system);
    for i in 0..n - 1 {
        let target = if i == 0 {
            &mut rising
        } else if i == n - 2 {
            &mut falling
        } else {
            &mut fixed
        };
        target.add_bond(i, i + 1, &frames[i], &frames[i + 1], 1.0)?;
    }
    DrivenHamiltonian::new(fixed, rising, falling, schedule)
}

fn cnot_parts(h: f64) -> Result<[OperatorSum; 3]> {
    use cnot_site::*;
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::validation("field strength h must be finite and non-negative"));
    }
    let system = SpinSystem::new(&CNOT_LABELS)?;
    let id = Frame::identity();
    let not = Frame::from_gate(&SingleQubitGate::not())?;
    let middle = [S1, S2, S3, S4];

    let mut rising = OperatorSum::new(system.clone());
    let mut fixed = OperatorSum::new(system.clone());
    let mut falling = OperatorSum::new(system);
    for &m in &middle {
        rising.add_bond(IN, m, &id, &id, 1.0)?;
        fixed.add_bond(ANCILLA, m, &id, &id, 1.0)?;
    }
    // h[(σ1z - σ2z)(1 - σcz) + (σ3z - σ4z)(1 + σcz)]
    for (site, sign, control_sign) in [(S1, 1.0, -1.0), (S2, -1.0, -1.0), (S3, 1.0, 1.0), (S4, -1.0, 1.0)] {
        if h != 0.0 {
            fixed.push(PauliTerm::single(sign * h, site, Axis::Z))?;
            fixed.push(PauliTerm::pair(
                sign * control_sign * h,
                (site, Axis::Z),
                (CONTROL, Axis::Z),
            )?)?;
        }
    }
    // NOT-twisted channel through 1, 2; plain channel through 3, 4.
    falling.add_bond(OUT, S1, &not, &id, 1.0)?;
    falling.add_bond(OUT, S2, &not, &id, 1.0)?;
    falling.add_bond(OUT, S3, &id, &id, 1.0)?;
    falling.add_bond(OUT, S4, &id, &id, 1.0)?;
    Ok([fixed, rising, falling])
}

/// CNOT network at coupling `λ` and field `h`.
///
/// `λ σ_in·Σσ_m + σ_a·Σσ_m + h[(σ1z-σ2z)(1-σcz) + (σ3z-σ4z)(1+σcz)] +
/// (1-λ)[σ'_out·(σ1+σ2) + σ_out·(σ3+σ4)]`, with `σ'` the NOT frame and
/// the sums over the four middle spins.
pub fn cnot_hamiltonian(lambda: f64, h: f64) -> Result<OperatorSum> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::validation("λ must lie in [0, 1]"));
    }
    let [fixed, rising, falling] = cnot_parts(h)?;
    let schedule = Schedule::linear(1.0)?;
    Ok(DrivenHamiltonian::new(fixed, rising, falling, schedule)?.at_fraction(lambda))
}

/// The CNOT network driven by `λ(t) = A(t)`.
pub fn cnot_driven(h: f64, schedule: Schedule) -> Result<DrivenHamiltonian> {
    let [fixed, rising, falling] = cnot_parts(h)?;
    DrivenHamiltonian::new(fixed, rising, falling, schedule)
}

//! Pauli-frame rotations ("twists") and the single-qubit gates they enact.
//!
//! A [`Frame`] stores the adjoint rotation `M` of a unitary `U`:
//! `U σ^b U† = Σ_a M_ab σ^a`, so column `b` of `M` is the primed axis
//! `σ^{b'}`. Composition follows gate products: the frame of `U1·U2` is
//! `M1·M2`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use nalgebra::Matrix3;
use num_complex::Complex64;
// Inherent float methods are unavailable on some no_std toolchains.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{max_abs, Matrix2c, I, ONE, ZERO};
use crate::spin::Axis;
use crate::{Error, Result};

/// Orthogonality/determinant tolerance for externally supplied rotations.
pub const FRAME_TOL: f64 = 1e-9;
/// Unitarity tolerance for externally supplied gates.
pub const UNITARY_TOL: f64 = 1e-10;

pub fn pauli(axis: Axis) -> Matrix2c {
    match axis {
        Axis::X => Matrix2c::new(ZERO, ONE, ONE, ZERO),
        Axis::Y => Matrix2c::new(ZERO, -I, I, ZERO),
        Axis::Z => Matrix2c::new(ONE, ZERO, ZERO, -ONE),
    }
}

/// Proper rotation of the Pauli axis triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    m: Matrix3<f64>,
}

impl Frame {
    pub fn identity() -> Self {
        Frame {
            m: Matrix3::identity(),
        }
    }

    /// Validates `M Mᵀ = I` and `det M = +1`.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("frame entries must be finite"));
        }
        let orth = (m * m.transpose() - Matrix3::identity()).amax();
        if orth > FRAME_TOL {
            return Err(Error::validation(format!(
                "frame is not orthogonal (|M Mᵀ - I| = {orth:.3e})"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > FRAME_TOL {
            return Err(Error::validation(format!(
                "frame is not a proper rotation (det = {det:.6})"
            )));
        }
        Ok(Frame { m })
    }

    /// Frame of `U`: `M_ab = ½ Re Tr(σ^a U σ^b U†)`.
    pub fn from_gate(gate: &SingleQubitGate) -> Result<Self> {
        let u = gate.matrix();
        let ud = u.adjoint();
        let mut m = Matrix3::zeros();
        for b in Axis::ALL {
            let conj = u * pauli(b) * ud;
            for a in Axis::ALL {
                m[(a.index(), b.index())] = 0.5 * (pauli(a) * conj).trace().re;
            }
        }
        Frame::new(m)
    }

    /// One of the two SU(2) preimages of this rotation.
    pub fn to_gate(&self) -> SingleQubitGate {
        let [w, x, y, z] = self.quaternion();
        let u = Matrix2c::new(
            Complex64::new(w, -z),
            Complex64::new(-y, -x),
            Complex64::new(y, -x),
            Complex64::new(w, z),
        );
        SingleQubitGate { u, name: None }
    }

    /// Unit quaternion `(w, x, y, z)` with `U = w - i(xσx + yσy + zσz)`.
    fn quaternion(&self) -> [f64; 4] {
        let r = &self.m;
        let trace = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
        let q = if trace > 0.0 {
            let s = 2.0 * (trace + 1.0).sqrt();
            [
                0.25 * s,
                (r[(2, 1)] - r[(1, 2)]) / s,
                (r[(0, 2)] - r[(2, 0)]) / s,
                (r[(1, 0)] - r[(0, 1)]) / s,
            ]
        } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
            let s = 2.0 * (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt();
            [
                (r[(2, 1)] - r[(1, 2)]) / s,
                0.25 * s,
                (r[(0, 1)] + r[(1, 0)]) / s,
                (r[(0, 2)] + r[(2, 0)]) / s,
            ]
        } else if r[(1, 1)] > r[(2, 2)] {
            let s = 2.0 * (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt();
            [
                (r[(0, 2)] - r[(2, 0)]) / s,
                (r[(0, 1)] + r[(1, 0)]) / s,
                0.25 * s,
                (r[(1, 2)] + r[(2, 1)]) / s,
            ]
        } else {
            let s = 2.0 * (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt();
            [
                (r[(1, 0)] - r[(0, 1)]) / s,
                (r[(0, 2)] + r[(2, 0)]) / s,
                (r[(1, 2)] + r[(2, 1)]) / s,
                0.25 * s,
            ]
        };
        let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        q.map(|c| c / norm)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    /// Coefficients of `σ^{axis'}` on `(σx, σy, σz)`.
    pub fn primed(&self, axis: Axis) -> [f64; 3] {
        let c = self.m.column(axis.index());
        [c[0], c[1], c[2]]
    }

    pub fn compose(&self, other: &Frame) -> Frame {
        Frame { m: self.m * other.m }
    }

    pub fn inverse(&self) -> Frame {
        Frame {
            m: self.m.transpose(),
        }
    }

    /// Largest entry of `|A - B|`.
    pub fn distance(&self, other: &Frame) -> f64 {
        (self.m - other.m).amax()
    }
}

/// Frame realizing `gate` under `σ' = U σ U†`.
pub fn frame_from_gate(gate: &SingleQubitGate) -> Result<Frame> {
    Frame::from_gate(gate)
}

pub fn gate_from_frame(frame: &Frame) -> SingleQubitGate {
    frame.to_gate()
}

pub fn compose(first: &Frame, second: &Frame) -> Frame {
    first.compose(second)
}

/// A 2×2 unitary with an optional display name.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitGate {
    u: Matrix2c,
    name: Option<String>,
}

impl SingleQubitGate {
    pub fn new(u: Matrix2c, name: Option<&str>) -> Result<Self> {
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("gate entries must be finite"));
        }
        let dev = max_abs(&(u.adjoint() * u - Matrix2c::identity()));
        if dev > UNITARY_TOL {
            return Err(Error::validation(format!(
                "gate is not unitary (|U†U - I| = {dev:.3e})"
            )));
        }
        Ok(SingleQubitGate {
            u,
            name: name.map(ToString::to_string),
        })
    }

    fn named(u: Matrix2c, name: &str) -> Self {
        SingleQubitGate {
            u,
            name: Some(name.to_string()),
        }
    }

    pub fn identity() -> Self {
        Self::named(Matrix2c::identity(), "identity")
    }

    pub fn hadamard() -> Self {
        let r = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::named(Matrix2c::new(r, r, r, -r), "hadamard")
    }

    /// `diag(1, e^{iπ/4})`.
    pub fn pi_over_8() -> Self {
        let p = Complex64::from_polar(1.0, core::f64::consts::FRAC_PI_4);
        Self::named(Matrix2c::new(ONE, ZERO, ZERO, p), "pi/8")
    }

    /// `diag(1, i)`.
    pub fn phase() -> Self {
        Self::named(Matrix2c::new(ONE, ZERO, ZERO, I), "phase")
    }

    /// `diag(1, -i)`.
    pub fn phase_dagger() -> Self {
        Self::named(Matrix2c::new(ONE, ZERO, ZERO, -I), "phase-dagger")
    }

    pub fn not() -> Self {
        Self::named(pauli(Axis::X), "not")
    }

    pub fn matrix(&self) -> &Matrix2c {
        &self.u
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn apply(&self, psi: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.u[(0, 0)] * psi[0] + self.u[(0, 1)] * psi[1],
            self.u[(1, 0)] * psi[0] + self.u[(1, 1)] * psi[1],
        ]
    }

    pub fn adjoint(&self) -> SingleQubitGate {
        SingleQubitGate {
            u: self.u.adjoint(),
            name: None,
        }
    }

    pub fn product(&self, other: &SingleQubitGate) -> SingleQubitGate {
        SingleQubitGate {
            u: self.u * other.u,
            name: None,
        }
    }

    /// `|Tr(A†B)| / 2`: 1 exactly when the gates agree up to global phase.
    pub fn phase_insensitive_overlap(&self, other: &SingleQubitGate) -> f64 {
        0.5 * (self.u.adjoint() * other.u).trace().norm()
    }
}

/// Named gate in the twist table.
#[derive(Debug, Clone)]
pub struct TableGate {
    pub name: &'static str,
    pub gate: SingleQubitGate,
    pub frame: Frame,
}

/// The gate table: Hadamard, π/8, phase, phase-dagger and NOT, each with
/// the frame `U σ U†`. The phase-dagger row is the frame the printed phase
/// row actually lists (`x' = -y`, `y' = x`).
pub fn gate_table() -> Vec<TableGate> {
    [
        ("hadamard", SingleQubitGate::hadamard()),
        ("pi/8", SingleQubitGate::pi_over_8()),
        ("phase", SingleQubitGate::phase()),
        ("phase-dagger", SingleQubitGate::phase_dagger()),
        ("not", SingleQubitGate::not()),
    ]
    .into_iter()
    .map(|(name, gate)| TableGate {
        name,
        frame: Frame::from_gate(&gate).expect("table gates are unitary"),
        gate,
    })
    .collect()
}

/// Names accepted by [`lookup_gate`], canonical first.
pub const GATE_NAMES: &[&str] = &[
    "identity",
    "hadamard",
    "pi/8",
    "phase",
    "phase-dagger",
    "not",
];

/// Resolve a gate name (case-insensitive, with a few common aliases).
pub fn lookup_gate(name: &str) -> Option<SingleQubitGate> {
    let lower = name.trim().to_ascii_lowercase();
    Some(match lower.as_str() {
        "identity" | "id" | "i" => SingleQubitGate::identity(),
        "hadamard" | "h" => SingleQubitGate::hadamard(),
        "pi/8" | "pi8" | "t" => SingleQubitGate::pi_over_8(),
        "phase" | "s" => SingleQubitGate::phase(),
        "phase-dagger" | "phase_dagger" | "sdg" => SingleQubitGate::phase_dagger(),
        "not" | "x" => SingleQubitGate::not(),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn assert_frame(f: &Frame, x: [f64; 3], y: [f64; 3], z: [f64; 3]) {
        for (axis, expected) in [(Axis::X, x), (Axis::Y, y), (Axis::Z, z)] {
            let got = f.primed(axis);
            for k in 0..3 {
                assert!(
                    (got[k] - expected[k]).abs() < 1e-12,
                    "{axis}': got {got:?}, expected {expected:?}"
                );
            }
        }
    }

    #[test]
    fn hadamard_frame() {
        let f = frame_from_gate(&SingleQubitGate::hadamard()).unwrap();
        assert_frame(&f, [0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_and_not_frames() {
        let f = frame_from_gate(&SingleQubitGate::identity()).unwrap();
        assert!(f.distance(&Frame::identity()) < 1e-15);
        let f = frame_from_gate(&SingleQubitGate::not()).unwrap();
        assert_frame(&f, [1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]);
    }

    #[test]
    fn pi_over_8_frame_uses_unit_normalization() {
        let r = FRAC_1_SQRT_2;
        let f = frame_from_gate(&SingleQubitGate::pi_over_8()).unwrap();
        assert_frame(&f, [r, r, 0.0], [-r, r, 0.0], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn phase_and_phase_dagger_frames() {
        let s = frame_from_gate(&SingleQubitGate::phase()).unwrap();
        assert_frame(&s, [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        let sdg = frame_from_gate(&SingleQubitGate::phase_dagger()).unwrap();
        assert_frame(&sdg, [0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn compose_examples() {
        let h = frame_from_gate(&SingleQubitGate::hadamard()).unwrap();
        assert!(compose(&h, &h).distance(&Frame::identity()) < 1e-12);
        assert_eq!(compose(&h, &Frame::identity()), h);
        let s = frame_from_gate(&SingleQubitGate::phase()).unwrap();
        assert_frame(
            &compose(&s, &s),
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
        );
    }

    #[test]
    fn round_trip_table_gates() {
        for row in gate_table() {
            let back = gate_from_frame(&row.frame);
            assert!(
                (back.phase_insensitive_overlap(&row.gate) - 1.0).abs() < 1e-12,
                "{}",
                row.name
            );
            let again = frame_from_gate(&back).unwrap();
            assert!(again.distance(&row.frame) < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unitary_and_improper() {
        let m = Matrix2c::new(ONE, ONE, ZERO, ONE);
        assert!(SingleQubitGate::new(m, None).is_err());
        let reflection = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0));
        assert!(Frame::new(reflection).is_err());
        let scaled = Matrix3::identity() * 1.1;
        assert!(Frame::new(scaled).is_err());
    }

    #[test]
    fn lookup_accepts_aliases() {
        assert_eq!(lookup_gate("H").unwrap(), SingleQubitGate::hadamard());
        assert_eq!(lookup_gate("x").unwrap(), SingleQubitGate::not());
        assert!(lookup_gate("sqrt-swap").is_none());
        for name in GATE_NAMES {
            assert!(lookup_gate(name).is_some(), "{name}");
        }
    }
}

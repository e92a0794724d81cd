//! Helpers shared by the integration tests and the acceptance run.

#![allow(dead_code)]

use std::f64::consts::PI;

use holobus_core::flux::CircuitParams;
use holobus_core::frame::SingleQubitGate;
use holobus_core::linalg::Matrix2c;
use holobus_core::Complex64;
use rand::Rng;

/// Haar-distributed up to the global phase, which is drawn uniformly.
pub fn random_gate<R: Rng>(rng: &mut R) -> SingleQubitGate {
    let q = loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            break q;
        }
    };
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / norm);
    let c = Complex64::new;
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    let u = Matrix2c::new(c(w, -z), c(-y, -x), c(y, -x), c(w, z)) * phase;
    SingleQubitGate::new(u, None).unwrap()
}

/// Straight transcription of the CCJJ algebra in closed form,
/// `β = sign(cos) √(β_+² cos² + β_-² sin²)`; returns `(β_eff, φ_q^0)`.
pub fn ccjj_transcription(p: &CircuitParams, phi_ccjj: f64, phi_l: f64, phi_r: f64) -> (f64, f64) {
    let k = 2.0 * PI * p.l_q / p.phi0;
    let [i1, i2, i3, i4] = p.currents;
    let (blp, blm) = (k * (i1 + i2), k * (i1 - i2));
    let (brp, brm) = (k * (i3 + i4), k * (i3 - i4));
    let amp = |plus: f64, minus: f64, phi: f64| {
        let (s, co) = (phi / 2.0).sin_cos();
        co.signum() * (plus * plus * co * co + minus * minus * s * s).sqrt()
    };
    let phi_l0 = ((blm / blp) * (phi_l / 2.0).tan()).atan();
    let phi_r0 = ((brm / brp) * (phi_r / 2.0).tan()).atan();
    let bl = amp(blp, blm, phi_l);
    let br = amp(brp, brm, phi_r);
    let (bp, bm) = (bl + br, bl - br);
    let gamma = phi_ccjj - (phi_l0 - phi_r0);
    let gamma0 = -((bm / bp) * (gamma / 2.0).tan()).atan();
    (amp(bp, bm, gamma), (phi_l0 + phi_r0) / 2.0 + gamma0)
}

/// The asymmetric reference circuit: `I = (1.0, 1.1, 0.9, 1.05)`, `L_q = Φ0 = 1`.
pub fn asymmetric_params() -> CircuitParams {
    CircuitParams {
        l_q: 1.0,
        currents: [1.0, 1.1, 0.9, 1.05],
        phi0: 1.0,
        ..Default::default()
    }
}

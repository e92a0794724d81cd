//! Executes a planned experiment on a bounded worker pool.

use std::time::{Duration, Instant};

use holobus_core::flux::{potential_grid, verify_simplification, SimplificationReport};
use holobus_core::protocols::{configure_point, run, ProtocolConfig, ProtocolResult, SweepPoint};
use holobus_core::state::Qubit;
use holobus_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::spec::{FluxPlan, InputSource, SweepPlan};

/// Outcome of one grid point, in grid order.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub index: usize,
    pub point: SweepPoint,
    /// Transported qubit or CNOT target actually used.
    pub input: Qubit,
    /// CNOT control actually used.
    pub control: Option<Qubit>,
    pub result: Result<ProtocolResult, CoreError>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<PointOutcome>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct FluxOutcome {
    pub report: SimplificationReport,
    pub tolerance: f64,
    /// `(φ_q, U)` samples of the optional potential profile.
    pub profile: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Haar-random qubit for grid point `index`; `stream` separates the draws
/// for different roles at the same point. Independent of scheduling.
pub fn sample_qubit(seed: u64, index: usize, stream: u64) -> Qubit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * index as u64 + stream);
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    Qubit::from_bloch((1.0 - 2.0 * u).acos(), 2.0 * std::f64::consts::PI * v)
}

fn resolve(source: InputSource, seed: u64, index: usize, stream: u64) -> Qubit {
    match source {
        InputSource::Fixed(q) => q,
        InputSource::Random => sample_qubit(seed, index, stream),
    }
}

/// Configuration actually run at grid point `index`.
pub fn point_config(plan: &SweepPlan, index: usize, point: &SweepPoint) -> (ProtocolConfig, Qubit, Option<Qubit>) {
    let mut cfg = configure_point(&plan.base, point);
    let input = resolve(plan.input, plan.seed, index, 0);
    let mut control = None;
    match &mut cfg {
        ProtocolConfig::Bus(c) => c.input = input,
        ProtocolConfig::Gate(c) => c.bus.input = input,
        ProtocolConfig::Cnot(c) => {
            c.target = input;
            c.control = resolve(plan.control, plan.seed, index, 1);
            control = Some(c.control);
        }
    }
    (cfg, input, control)
}

/// Runs every grid point on at most `workers` threads; results come back in
/// grid order whatever the completion order.
pub fn run_sweep(plan: &SweepPlan, workers: usize) -> Result<SweepOutcome, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?;
    let start = Instant::now();
    let points: Vec<(usize, SweepPoint)> = plan.grid.points().into_iter().enumerate().collect();
    let outcomes = pool.install(|| {
        points
            .par_iter()
            .map(|&(index, point)| {
                let (cfg, input, control) = point_config(plan, index, &point);
                let t0 = Instant::now();
                let result = run(&cfg).map(|mut r| {
                    r.wall_time = Some(t0.elapsed());
                    r
                });
                PointOutcome {
                    index,
                    point,
                    input,
                    control,
                    result,
                }
            })
            .collect()
    });
    Ok(SweepOutcome {
        points: outcomes,
        wall_time: start.elapsed(),
    })
}

pub fn run_flux(plan: &FluxPlan) -> Result<FluxOutcome, RunError> {
    let report = verify_simplification(&plan.params, &plan.grid)?;
    let profile = match &plan.profile {
        Some(p) => {
            let q = holobus_core::flux::linspace(p.q_range[0], p.q_range[1], p.points);
            let u = potential_grid(&plan.params, &q, p.fixed)?;
            Some(q.into_iter().zip(u).collect())
        }
        None => None,
    };
    Ok(FluxOutcome {
        report,
        tolerance: plan.tolerance,
        profile,
    })
}

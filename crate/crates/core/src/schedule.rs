//! Annealing schedules.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleKind {
    #[default]
    Linear,
}

/// Clamped annealing functions over `[0, t_fin]`.
///
/// `A` rises from 0 to 1, `B = 1 - A`, and `λ = A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    t_fin: f64,
    kind: ScheduleKind,
}

impl Schedule {
    pub fn linear(t_fin: f64) -> Result<Self> {
        if !(t_fin.is_finite() && t_fin > 0.0) {
            return Err(Error::validation("t_fin must be positive and finite"));
        }
        Ok(Schedule {
            t_fin,
            kind: ScheduleKind::Linear,
        })
    }

    pub fn t_fin(&self) -> f64 {
        self.t_fin
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn a(&self, t: f64) -> f64 {
        match self.kind {
            ScheduleKind::Linear => (t / self.t_fin).clamp(0.0, 1.0),
        }
    }

    pub fn b(&self, t: f64) -> f64 {
        1.0 - self.a(t)
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.a(t)
    }
}

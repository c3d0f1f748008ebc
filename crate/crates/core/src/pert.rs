//! Three-point PERT duration estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreePointEstimate {
    pub optimistic: f64,
    pub likely: f64,
    pub pessimistic: f64,
}

impl ThreePointEstimate {
    pub fn new(optimistic: f64, likely: f64, pessimistic: f64) -> Self {
        Self {
            optimistic,
            likely,
            pessimistic,
        }
    }

    fn validate(&self, id: &str) -> Result<()> {
        let Self {
            optimistic: o,
            likely: m,
            pessimistic: p,
        } = *self;
        let finite = o.is_finite() && m.is_finite() && p.is_finite();
        if !finite || !(0.0 <= o && o <= m && m <= p) {
            return Err(Error::Ordering {
                id: id.to_string(),
                o,
                m,
                p,
            });
        }
        Ok(())
    }

    /// Weighted mean `(O + 4M + P) / 6`.
    pub fn expected_time(&self) -> Result<f64> {
        self.validate("")?;
        Ok(self.weighted_mean())
    }

    fn weighted_mean(&self) -> f64 {
        let te = (self.optimistic + 4.0 * self.likely + self.pessimistic) / 6.0;
        // rounding can leave te an ulp outside [O, P] when O == P
        te.clamp(self.optimistic, self.pessimistic)
    }
}

/// A task as written by a user, before its duration is settled.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TaskInput {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimates: Option<ThreePointEstimate>,
}

/// An explicit duration wins over estimates; otherwise the PERT mean is used.
pub fn resolve_duration(input: &TaskInput) -> Result<f64> {
    match (input.duration, &input.estimates) {
        (Some(d), _) => Ok(d),
        (None, Some(e)) => {
            e.validate(&input.id)?;
            Ok(e.weighted_mean())
        }
        (None, None) => Err(Error::MissingDuration(input.id.clone())),
    }
}

pub fn resolve_durations(inputs: &[TaskInput]) -> Result<Vec<f64>> {
    inputs.iter().map(resolve_duration).collect()
}

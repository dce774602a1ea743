//! Piecewise parameter schedules for nonstationary games.
//!
//! A schedule is an ordered list of `(params, duration)` stages. In `Direct`
//! mode the parameters jump at stage boundaries. In `Continuous` mode the
//! first stage is held for its duration and each later stage acts as a linear
//! transition window from the previous parameters to its own. Past the final
//! stage the last parameters are held.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Linear interpolation between two parameter points.
pub trait Lerp<S: Scalar>: Clone {
    fn lerp(&self, other: &Self, w: S) -> Self;
}

impl<S: Scalar> Lerp<S> for S {
    fn lerp(&self, other: &Self, w: S) -> Self {
        *self + (*other - *self) * w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    /// Single parameter point, held forever.
    Static,
    /// Instantaneous jumps at stage boundaries.
    Direct,
    /// Linear interpolation across each transition window.
    Continuous,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stage<P> {
    pub params: P,
    /// Length of the stage in iterations; must be positive.
    pub duration: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamSchedule<P> {
    mode: ScheduleMode,
    stages: Vec<Stage<P>>,
}

impl<P> ParamSchedule<P> {
    pub fn new(mode: ScheduleMode, stages: Vec<Stage<P>>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Config("schedule has no stages".into()));
        }
        if stages.iter().any(|s| s.duration == 0) {
            return Err(Error::Config("schedule stage with zero duration".into()));
        }
        Ok(Self { mode, stages })
    }

    pub fn constant(params: P) -> Self {
        Self {
            mode: ScheduleMode::Static,
            stages: vec![Stage { params, duration: 1 }],
        }
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn stages(&self) -> &[Stage<P>] {
        &self.stages
    }

    pub fn total_duration(&self) -> u64 {
        self.stages.iter().map(|s| s.duration).sum()
    }

    pub fn is_static(&self) -> bool {
        self.mode == ScheduleMode::Static || self.stages.len() == 1
    }

    /// Index of the stage whose window contains iteration `t`; clamps to the
    /// last stage after the schedule ends.
    pub fn stage_index(&self, t: u64) -> usize {
        if self.mode == ScheduleMode::Static {
            return 0;
        }
        let mut start = 0;
        for (k, stage) in self.stages.iter().enumerate() {
            if t < start + stage.duration {
                return k;
            }
            start += stage.duration;
        }
        self.stages.len() - 1
    }
}

impl<P: Clone> ParamSchedule<P> {
    /// Parameters in effect at iteration `t`.
    pub fn at<S: Scalar>(&self, t: u64) -> P
    where
        P: Lerp<S>,
    {
        match self.mode {
            ScheduleMode::Static => self.stages[0].params.clone(),
            ScheduleMode::Direct => self.stages[self.stage_index(t)].params.clone(),
            ScheduleMode::Continuous => {
                let k = self.stage_index(t);
                if k == 0 {
                    return self.stages[0].params.clone();
                }
                let start: u64 = self.stages[..k].iter().map(|s| s.duration).sum();
                let stage = &self.stages[k];
                if t >= start + stage.duration {
                    // past the end of the schedule
                    return stage.params.clone();
                }
                let w = S::cast(t - start) / S::cast(stage.duration);
                self.stages[k - 1].params.lerp(&stage.params, w)
            }
        }
    }
}

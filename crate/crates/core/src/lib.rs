//! System-dynamics model of bitcoin mining.
//!
//! Miners add hash power while mining is profitable and remove it when it
//! is not, closing the gap to the zero-profit hash rate with a first-order
//! delay. The crate integrates that loop together with the halving supply
//! schedule, fits the delay to historical data and projects it forward
//! under noisy price and fee scenarios.

pub mod calibration;
pub mod cli;
pub mod coin;
pub mod dynamics;
pub mod econ;
pub mod error;
pub mod exog_series;
pub mod fixtures;
pub mod scenario;

pub use calibration::{
    calibrate, compare_fits, CalibrationResult, CalibrationSpec, FitComparison, Mode, ObjectiveKind,
};
pub use coin::{CoinState, SubsidySchedule};
pub use dynamics::{simulate, SimState, Trajectory, TrajectoryRecord};
pub use econ::{AdjustmentRegime, EfficiencyEpoch, MiningParams};
pub use error::{Error, Result};
pub use exog_series::{ExogenousSeries, Unit};
pub use scenario::{project, Projection, ProjectionSummary, ScenarioSpec};

//! Fitting the hash-rate adjustment time(s) to the historical hash rate.
//!
//! Three modes: one constant delay, two delays switching at a fixed break
//! day, and two delays with the break day fitted as well. Every objective
//! evaluation is an independent full simulation over the fit window.

pub mod optimize;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, Trajectory, HASH_RATE_FLOOR};
use crate::econ::{AdjustmentRegime, MiningParams};
use crate::error::{Error, Result};
use crate::exog_series::ExogenousSeries;
use optimize::{golden_section, linear_grid, log_grid, nelder_mead, NelderMeadOptions};

/// Improvements smaller than this fraction of the single-delay objective
/// are reported as not meaningful.
pub const MIN_RELATIVE_IMPROVEMENT: f64 = 0.01;
/// Objective differences below this are treated as numerical noise.
pub const MIN_ABSOLUTE_IMPROVEMENT: f64 = 1e-3;

const SINGLE_SCAN_POINTS: usize = 25;
const GRID_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Single,
    TwoRegime,
    TwoRegimeFreeBreak,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::TwoRegime => "two_regime",
            Mode::TwoRegimeFreeBreak => "two_regime_free_break",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// RMSE of `log10(model) - log10(observed)`, both clipped at 1e-12 GH/s.
    LogRmse,
    /// RMSE of `model - observed` divided by the RMS of the observations.
    LinearNrmse,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::LogRmse => "log_rmse",
            ObjectiveKind::LinearNrmse => "linear_nrmse",
        }
    }

    fn residual(self, model: f64, observed: f64) -> f64 {
        match self {
            ObjectiveKind::LogRmse => {
                model.max(HASH_RATE_FLOOR).log10() - observed.max(HASH_RATE_FLOOR).log10()
            }
            ObjectiveKind::LinearNrmse => model - observed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationSpec {
    pub mode: Mode,
    /// Fixed break day for [`Mode::TwoRegime`].
    pub break_day: f64,
    /// Allowed range of the break day for [`Mode::TwoRegimeFreeBreak`].
    pub break_bounds: (f64, f64),
    pub search_bounds: (f64, f64),
    pub fit_window: (f64, f64),
    pub objective: ObjectiveKind,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        CalibrationSpec {
            mode: Mode::Single,
            break_day: 3777.0,
            break_bounds: (600.0, 4000.0),
            search_bounds: (10.0, 5000.0),
            fit_window: (0.0, 4100.0),
            objective: ObjectiveKind::LinearNrmse,
        }
    }
}

impl CalibrationSpec {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_objective(mut self, objective: ObjectiveKind) -> Self {
        self.objective = objective;
        self
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        let (lo, hi) = self.search_bounds;
        if !(lo > dt && hi > lo && hi.is_finite()) {
            return Err(Error::params(format!(
                "search bounds ({lo}, {hi}) must satisfy dt < tau_min < tau_max"
            )));
        }
        let (start, end) = self.fit_window;
        if !(start >= 0.0 && end > start && end.is_finite()) {
            return Err(Error::params(format!("bad fit window ({start}, {end})")));
        }
        let (b0, b1) = self.break_bounds;
        if !(b0.is_finite() && b1.is_finite() && b1 > b0) {
            return Err(Error::params(format!("bad break bounds ({b0}, {b1})")));
        }
        if !self.break_day.is_finite() {
            return Err(Error::params("break day must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub day: f64,
    pub model: f64,
    pub observed: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub mode: Mode,
    pub objective_kind: ObjectiveKind,
    pub taus: Vec<AdjustmentRegime>,
    pub break_day: Option<f64>,
    pub objective_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub residuals: Vec<Residual>,
}

impl CalibrationResult {
    /// `base` with the fitted adjustment regimes.
    pub fn params(&self, base: &MiningParams) -> MiningParams {
        MiningParams {
            adjustment_regimes: self.taus.clone(),
            ..base.clone()
        }
    }
}

/// Scores `trajectory` against `(day, observed)` pairs. The pairs are sorted
/// first so the result does not depend on their order.
pub fn score(
    kind: ObjectiveKind,
    trajectory: &Trajectory,
    observations: &[(f64, f64)],
) -> Result<f64> {
    let residuals = residuals(kind, trajectory, observations)?;
    let n = residuals.len() as f64;
    let mse = residuals
        .iter()
        .map(|r| r.residual * r.residual)
        .sum::<f64>()
        / n;
    match kind {
        ObjectiveKind::LogRmse => Ok(mse.sqrt()),
        ObjectiveKind::LinearNrmse => {
            let ms = residuals
                .iter()
                .map(|r| r.observed * r.observed)
                .sum::<f64>()
                / n;
            if ms > 0.0 {
                Ok((mse / ms).sqrt())
            } else {
                Err(Error::Calibration(
                    "observed hash rate is zero over the fit window".into(),
                ))
            }
        }
    }
}

pub fn residuals(
    kind: ObjectiveKind,
    trajectory: &Trajectory,
    observations: &[(f64, f64)],
) -> Result<Vec<Residual>> {
    let mut obs = observations.to_vec();
    obs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let out: Vec<Residual> = obs
        .into_iter()
        .filter_map(|(day, observed)| {
            trajectory.hash_rate_at(day).map(|model| Residual {
                day,
                model,
                observed,
                residual: kind.residual(model, observed),
            })
        })
        .collect();
    if out.is_empty() {
        return Err(Error::Calibration(
            "no historical knots inside the simulated range".into(),
        ));
    }
    Ok(out)
}

/// Everything needed to score a set of adjustment regimes.
pub struct FitProblem<'a> {
    pub base: &'a MiningParams,
    pub price: &'a ExogenousSeries,
    pub fees: &'a ExogenousSeries,
    pub window: (f64, f64),
    pub kind: ObjectiveKind,
    observations: Vec<(f64, f64)>,
}

impl<'a> FitProblem<'a> {
    pub fn new(
        base: &'a MiningParams,
        price: &'a ExogenousSeries,
        fees: &'a ExogenousSeries,
        historical: &ExogenousSeries,
        window: (f64, f64),
        kind: ObjectiveKind,
    ) -> Result<Self> {
        let observations: Vec<(f64, f64)> = historical
            .points()
            .filter(|&(d, _)| window.0 <= d && d <= window.1)
            .collect();
        if observations.is_empty() {
            return Err(Error::Calibration(format!(
                "no historical knots inside the fit window ({}, {})",
                window.0, window.1
            )));
        }
        for series in [price, fees] {
            if !series.covers(0.0, window.1) {
                return Err(Error::OutOfRange {
                    t: window.1,
                    first: series.first_day(),
                    last: series.last_day(),
                });
            }
        }
        Ok(FitProblem {
            base,
            price,
            fees,
            window,
            kind,
            observations,
        })
    }

    pub fn observations(&self) -> &[(f64, f64)] {
        &self.observations
    }

    pub fn trajectory(&self, regimes: &[AdjustmentRegime]) -> Result<Trajectory> {
        let params = MiningParams {
            adjustment_regimes: regimes.to_vec(),
            ..self.base.clone()
        };
        simulate(&params, self.price, self.fees, self.window.1)
    }

    pub fn objective(&self, regimes: &[AdjustmentRegime]) -> Result<f64> {
        score(self.kind, &self.trajectory(regimes)?, &self.observations)
    }

    pub fn residuals(&self, regimes: &[AdjustmentRegime]) -> Result<Vec<Residual>> {
        residuals(self.kind, &self.trajectory(regimes)?, &self.observations)
    }

    /// Objective with infeasible candidates mapped to `+inf`.
    fn cost(&self, regimes: &[AdjustmentRegime]) -> f64 {
        self.objective(regimes).unwrap_or(f64::INFINITY)
    }
}

/// Objective of explicit adjustment regimes against `historical`.
#[allow(clippy::too_many_arguments)]
pub fn objective(
    regimes: &[AdjustmentRegime],
    base: &MiningParams,
    price: &ExogenousSeries,
    fees: &ExogenousSeries,
    historical: &ExogenousSeries,
    window: (f64, f64),
    kind: ObjectiveKind,
) -> Result<f64> {
    FitProblem::new(base, price, fees, historical, window, kind)?.objective(regimes)
}

fn single(tau: f64) -> Vec<AdjustmentRegime> {
    vec![AdjustmentRegime::open(tau)]
}

fn two(break_day: f64, early: f64, late: f64) -> Vec<AdjustmentRegime> {
    vec![
        AdjustmentRegime::until(break_day, early),
        AdjustmentRegime::open(late),
    ]
}

pub fn calibrate(
    spec: &CalibrationSpec,
    base: &MiningParams,
    price: &ExogenousSeries,
    fees: &ExogenousSeries,
    historical: &ExogenousSeries,
) -> Result<CalibrationResult> {
    spec.validate(base.dt)?;
    let problem = FitProblem::new(
        base,
        price,
        fees,
        historical,
        spec.fit_window,
        spec.objective,
    )?;
    let (taus, break_day, evaluations, converged) = match spec.mode {
        Mode::Single => fit_single(spec, &problem)?,
        Mode::TwoRegime | Mode::TwoRegimeFreeBreak => fit_two(spec, &problem)?,
    };
    let trajectory = problem.trajectory(&taus)?;
    let objective_value = score(spec.objective, &trajectory, problem.observations())?;
    let residuals = residuals(spec.objective, &trajectory, problem.observations())?;
    Ok(CalibrationResult {
        mode: spec.mode,
        objective_kind: spec.objective,
        taus,
        break_day,
        objective_value,
        evaluations,
        converged,
        residuals,
    })
}

type Fit = (Vec<AdjustmentRegime>, Option<f64>, usize, bool);

fn argmin(values: &[f64]) -> Result<usize> {
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    best.ok_or_else(|| {
        Error::Calibration("objective is not finite anywhere on the search grid".into())
    })
}

/// Log-spaced scan to bracket the minimum, then golden section to 1 day.
fn fit_single(spec: &CalibrationSpec, problem: &FitProblem<'_>) -> Result<Fit> {
    let (lo, hi) = spec.search_bounds;
    let grid = log_grid(lo, hi, SINGLE_SCAN_POINTS);
    let scan: Vec<f64> = grid
        .par_iter()
        .map(|&tau| problem.cost(&single(tau)))
        .collect();
    let best = argmin(&scan)?;
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let m = golden_section(|tau| problem.cost(&single(tau)), a, b, 1.0, 200);
    let evaluations = grid.len() + m.evaluations;
    let tau = if m.value <= scan[best] {
        m.x[0]
    } else {
        grid[best]
    };
    Ok((single(tau), None, evaluations, m.converged))
}

/// Coarse grid for the starting point, then Nelder-Mead in unit-box
/// coordinates (log scale for the delays, linear for the break day).
fn fit_two(spec: &CalibrationSpec, problem: &FitProblem<'_>) -> Result<Fit> {
    let (lo, hi) = spec.search_bounds;
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let free_break = spec.mode == Mode::TwoRegimeFreeBreak;
    let (b_lo, b_hi) = spec.break_bounds;

    let decode = |u: &[f64]| -> (f64, f64, f64) {
        let tau = |x: f64| (ln_lo + x * (ln_hi - ln_lo)).exp();
        let break_day = if free_break {
            b_lo + u[2] * (b_hi - b_lo)
        } else {
            spec.break_day
        };
        (tau(u[0]), tau(u[1]), break_day)
    };
    let cost = |u: &[f64]| {
        let (early, late, break_day) = decode(u);
        problem.cost(&two(break_day, early, late))
    };

    let axis = linear_grid(0.0, 1.0, GRID_POINTS);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for &x in &axis {
        for &y in &axis {
            if free_break {
                starts.extend(axis.iter().map(|&z| vec![x, y, z]));
            } else {
                starts.push(vec![x, y]);
            }
        }
    }
    let scores: Vec<f64> = starts.par_iter().map(|u| cost(u)).collect();
    let best = argmin(&scores)?;

    let dim = starts[best].len();
    let half_cell = 0.5 / (GRID_POINTS - 1) as f64;
    let m = nelder_mead(
        cost,
        &starts[best],
        &vec![half_cell; dim],
        &vec![0.0; dim],
        &vec![1.0; dim],
        &NelderMeadOptions::default(),
    );
    let (early, late, break_day) = decode(&m.x);
    Ok((
        two(break_day, early, late),
        Some(break_day),
        starts.len() + m.evaluations,
        m.converged,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitComparison {
    pub single_objective: f64,
    pub two_regime_objective: f64,
    /// `(single - two) / single`.
    pub relative_improvement: f64,
    pub two_regime_better: bool,
    pub meaningful: bool,
    pub verdict: String,
    pub residuals_single: Vec<Residual>,
    pub residuals_two_regime: Vec<Residual>,
}

pub fn compare_fits(single: &CalibrationResult, two: &CalibrationResult) -> FitComparison {
    let s = single.objective_value;
    let t = two.objective_value;
    let gain = s - t;
    let relative_improvement = if s > 0.0 { gain / s } else { 0.0 };
    let meaningful =
        relative_improvement >= MIN_RELATIVE_IMPROVEMENT && gain >= MIN_ABSOLUTE_IMPROVEMENT;
    let verdict = if meaningful {
        format!(
            "two-regime fit improves the objective by {:.1}%",
            100.0 * relative_improvement
        )
    } else if gain > 0.0 {
        "improvement not meaningful".to_owned()
    } else {
        "no improvement".to_owned()
    };
    FitComparison {
        single_objective: s,
        two_regime_objective: t,
        relative_improvement,
        two_regime_better: t < s,
        meaningful,
        verdict,
        residuals_single: single.residuals.clone(),
        residuals_two_regime: two.residuals.clone(),
    }
}

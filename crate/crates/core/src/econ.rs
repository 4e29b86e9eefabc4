//! Mining economics: hashing cost, revenues, energy cost and the hash-rate
//! shortfall that drives the adjustment loop.
//!
//! Units: hash rate in GH/s, efficiency in GH/J, energy price in USD/J,
//! money flows in USD/day.

use serde::{Deserialize, Serialize};

use crate::coin::BLOCKS_PER_DAY;
use crate::error::{Error, Result};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const JOULES_PER_KWH: f64 = 3.6e6;

pub fn usd_per_kwh_to_usd_per_joule(price: f64) -> f64 {
    price / JOULES_PER_KWH
}

/// A period during which the state-of-the-art hardware efficiency is flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEpoch {
    pub from_day: f64,
    /// `None` for the open-ended last epoch.
    #[serde(default)]
    pub to_day: Option<f64>,
    pub efficiency_mh_per_j: f64,
    #[serde(default)]
    pub label: String,
}

impl EfficiencyEpoch {
    fn new(from_day: f64, to_day: Option<f64>, efficiency_mh_per_j: f64, label: &str) -> Self {
        EfficiencyEpoch {
            from_day,
            to_day,
            efficiency_mh_per_j,
            label: label.to_owned(),
        }
    }

    pub fn efficiency_gh_per_j(&self) -> f64 {
        self.efficiency_mh_per_j / 1000.0
    }
}

/// Hardware generations from CPU to 16 nm ASIC.
pub fn default_epochs() -> Vec<EfficiencyEpoch> {
    vec![
        EfficiencyEpoch::new(0.0, Some(600.0), 0.1, "CPU"),
        EfficiencyEpoch::new(600.0, Some(1000.0), 1.0, "GPU"),
        EfficiencyEpoch::new(1000.0, Some(1400.0), 10.0, "FPGA"),
        EfficiencyEpoch::new(1400.0, Some(1550.0), 100.0, "ASIC (110 nm)"),
        EfficiencyEpoch::new(1550.0, Some(1900.0), 500.0, "ASIC (55 nm)"),
        EfficiencyEpoch::new(1900.0, Some(2450.0), 1000.0, "ASIC (28 nm)"),
        EfficiencyEpoch::new(2450.0, None, 10_000.0, "ASIC (16 nm)"),
    ]
}

/// Hash-rate adjustment time `tau_days` applies while `t < until_day`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentRegime {
    /// `None` for the open-ended last regime.
    #[serde(default)]
    pub until_day: Option<f64>,
    pub tau_days: f64,
}

impl AdjustmentRegime {
    pub fn open(tau_days: f64) -> Self {
        AdjustmentRegime {
            until_day: None,
            tau_days,
        }
    }

    pub fn until(until_day: f64, tau_days: f64) -> Self {
        AdjustmentRegime {
            until_day: Some(until_day),
            tau_days,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MiningParams {
    /// USD per joule.
    pub energy_price: f64,
    pub epochs: Vec<EfficiencyEpoch>,
    /// GH/s at day 0.
    pub initial_hash_rate: f64,
    pub adjustment_regimes: Vec<AdjustmentRegime>,
    /// Integration step in days.
    pub dt: f64,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            energy_price: usd_per_kwh_to_usd_per_joule(0.05),
            epochs: default_epochs(),
            initial_hash_rate: 0.007,
            adjustment_regimes: vec![
                AdjustmentRegime::until(3777.0, 1482.0),
                AdjustmentRegime::open(264.0),
            ],
            dt: 1.0,
        }
    }
}

impl MiningParams {
    pub fn with_single_tau(mut self, tau_days: f64) -> Self {
        self.adjustment_regimes = vec![AdjustmentRegime::open(tau_days)];
        self
    }

    pub fn with_two_regimes(mut self, break_day: f64, early_tau: f64, late_tau: f64) -> Self {
        self.adjustment_regimes = vec![
            AdjustmentRegime::until(break_day, early_tau),
            AdjustmentRegime::open(late_tau),
        ];
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    /// Holds hardware efficiency at its day-`t` value from `t` onwards.
    pub fn with_efficiency_frozen_at(mut self, t: f64) -> Self {
        let keep = self
            .epochs
            .iter()
            .take_while(|e| e.from_day <= t)
            .count()
            .max(1);
        self.epochs.truncate(keep);
        if let Some(last) = self.epochs.last_mut() {
            last.to_day = None;
        }
        self
    }

    pub fn min_tau(&self) -> f64 {
        self.adjustment_regimes
            .iter()
            .map(|r| r.tau_days)
            .fold(f64::INFINITY, f64::min)
    }

    /// Tau of the first regime with `until_day > t`; a boundary day belongs
    /// to the later regime.
    pub fn adjustment_time(&self, t: f64) -> f64 {
        self.adjustment_regimes
            .iter()
            .find(|r| r.until_day.is_none_or(|u| t < u))
            .or(self.adjustment_regimes.last())
            .map(|r| r.tau_days)
            .expect("at least one adjustment regime")
    }

    /// Checks everything the integrator relies on.
    pub fn validate_structure(&self) -> Result<()> {
        if !(self.energy_price > 0.0 && self.energy_price.is_finite()) {
            return Err(Error::params("energy_price must be positive"));
        }
        if !(self.initial_hash_rate > 0.0 && self.initial_hash_rate.is_finite()) {
            return Err(Error::params("initial_hash_rate must be positive"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::params("dt must be positive"));
        }
        self.validate_epochs()?;
        self.validate_regimes()?;
        if self.dt >= self.min_tau() {
            return Err(Error::params(format!(
                "dt = {} must be below the smallest adjustment time {}",
                self.dt,
                self.min_tau()
            )));
        }
        Ok(())
    }

    /// [`validate_structure`](Self::validate_structure) plus the accuracy
    /// requirement `dt < min(tau) / 10` applied to user configuration.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        if self.dt >= self.min_tau() / 10.0 {
            return Err(Error::params(format!(
                "dt = {} must be below a tenth of the smallest adjustment time {}",
                self.dt,
                self.min_tau()
            )));
        }
        Ok(())
    }

    fn validate_epochs(&self) -> Result<()> {
        let epochs = &self.epochs;
        let Some(first) = epochs.first() else {
            return Err(Error::params("efficiency table is empty"));
        };
        if first.from_day != 0.0 {
            return Err(Error::params("first efficiency epoch must start at day 0"));
        }
        for (i, e) in epochs.iter().enumerate() {
            if !(e.efficiency_mh_per_j > 0.0 && e.efficiency_mh_per_j.is_finite()) {
                return Err(Error::params(format!(
                    "epoch {i}: efficiency must be positive"
                )));
            }
            let last = i + 1 == epochs.len();
            match (e.to_day, last) {
                (None, true) => {}
                (Some(_), true) => {
                    return Err(Error::params("last efficiency epoch must be open-ended"))
                }
                (None, false) => return Err(Error::params(format!("epoch {i}: missing to_day"))),
                (Some(to), false) => {
                    let next = &epochs[i + 1];
                    if to <= e.from_day {
                        return Err(Error::params(format!("epoch {i}: empty period")));
                    }
                    if next.from_day != to {
                        return Err(Error::params(format!(
                            "epochs {i} and {}: gap or overlap at day {to}",
                            i + 1
                        )));
                    }
                    if next.efficiency_mh_per_j < e.efficiency_mh_per_j {
                        return Err(Error::params(format!(
                            "epoch {}: efficiency decreases",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_regimes(&self) -> Result<()> {
        let regimes = &self.adjustment_regimes;
        if regimes.is_empty() {
            return Err(Error::params("no adjustment regime"));
        }
        for (i, r) in regimes.iter().enumerate() {
            if !(r.tau_days > 0.0 && r.tau_days.is_finite()) {
                return Err(Error::params(format!("regime {i}: tau must be positive")));
            }
            let last = i + 1 == regimes.len();
            match (r.until_day, last) {
                (None, true) => {}
                (Some(_), true) => {
                    return Err(Error::params("last adjustment regime must be open-ended"))
                }
                (None, false) => {
                    return Err(Error::params(format!("regime {i}: missing until_day")))
                }
                (Some(u), false) => {
                    if let Some(next) = regimes[i + 1].until_day {
                        if next <= u {
                            return Err(Error::params("regimes must be sorted by until_day"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Efficiency of state-of-the-art hardware in GH/J (right-continuous steps).
pub fn efficiency_at(params: &MiningParams, t: f64) -> f64 {
    params
        .epochs
        .iter()
        .rev()
        .find(|e| e.from_day <= t)
        .or(params.epochs.first())
        .map(EfficiencyEpoch::efficiency_gh_per_j)
        .expect("non-empty efficiency table")
}

/// USD per GH hashed.
pub fn hashing_cost(params: &MiningParams, t: f64) -> f64 {
    params.energy_price / efficiency_at(params, t)
}

/// `(subsidy * 144 + fees) * price`, in USD/day.
pub fn mining_revenues(subsidy_btc_per_block: f64, fees_btc_per_day: f64, price: f64) -> f64 {
    (subsidy_btc_per_block * BLOCKS_PER_DAY + fees_btc_per_day) * price
}

/// Energy bill of running `hash_rate` for a day, in USD/day.
pub fn mining_cost(hash_rate: f64, params: &MiningParams, t: f64) -> f64 {
    hash_rate * SECONDS_PER_DAY * hashing_cost(params, t)
}

/// Hash rate the daily profit could pay for: profit is turned into
/// affordable power (J/s) at the energy price and then into GH/s at the
/// current efficiency. Negative when mining loses money.
pub fn hash_rate_shortfall(revenues: f64, hash_rate: f64, params: &MiningParams, t: f64) -> f64 {
    let profit = revenues - mining_cost(hash_rate, params, t);
    profit * efficiency_at(params, t) / (params.energy_price * SECONDS_PER_DAY)
}

/// Zero-profit hash rate.
pub fn equilibrium_hash_rate(
    subsidy_btc_per_block: f64,
    fees_btc_per_day: f64,
    price: f64,
    params: &MiningParams,
    t: f64,
) -> f64 {
    let revenues = mining_revenues(subsidy_btc_per_block, fees_btc_per_day, price);
    revenues * efficiency_at(params, t) / (params.energy_price * SECONDS_PER_DAY)
}

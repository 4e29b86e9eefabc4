//! Future projection: mean-reverting noise for price and fees spliced onto
//! the historical inputs, with hardware efficiency frozen at the present.

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coin::{SubsidySchedule, BLOCKS_PER_DAY};
use crate::dynamics::{simulate, Trajectory};
use crate::econ::MiningParams;
use crate::error::{Error, Result};
use crate::exog_series::{date_from_day, day_from_date, ExogenousSeries, Unit};

/// Identity of the random stream behind [`pink_noise`].
pub const GENERATOR: &str = "rand_chacha::ChaCha8Rng::seed_from_u64 + rand_distr::StandardNormal";

const PRICE_STREAM: u64 = 0;
const FEES_STREAM: u64 = 1;

/// Real-world halving dates, for reporting next to the model calendar.
const REAL_HALVINGS: [(i32, u32, u32); 4] =
    [(2012, 11, 28), (2016, 7, 9), (2020, 5, 11), (2024, 4, 20)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub price_mean: f64,
    pub price_sd: f64,
    pub fees_mean: f64,
    pub fees_sd: f64,
    pub correlation_time: f64,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            t_start: 4100.0,
            t_end: 7500.0,
            price_mean: 7300.0,
            price_sd: 500.0,
            fees_mean: 30.0,
            fees_sd: 5.0,
            correlation_time: 28.0,
            seed: 42,
        }
    }
}

impl ScenarioSpec {
    /// Noise-free mean path.
    pub fn deterministic(mut self) -> Self {
        self.price_sd = 0.0;
        self.fees_sd = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > self.t_start && self.t_start >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::params(format!(
                "horizon {} must be after the start day {}",
                self.t_end, self.t_start
            )));
        }
        if !(self.price_sd >= 0.0 && self.fees_sd >= 0.0) {
            return Err(Error::params("standard deviations must be >= 0"));
        }
        if !(self.price_mean >= 0.0 && self.fees_mean >= 0.0) {
            return Err(Error::params("means must be >= 0"));
        }
        if !(self.correlation_time > 0.0 && self.correlation_time.is_finite()) {
            return Err(Error::params("correlation time must be positive"));
        }
        Ok(())
    }
}

/// First-order filtered white noise with stationary mean `mean`, standard
/// deviation close to `sd` and correlation time `correlation_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinkNoise {
    pub mean: f64,
    pub sd: f64,
    pub correlation_time: f64,
}

impl PinkNoise {
    /// Samples on `t_start + k * dt` until `t_end` is reached, starting at the
    /// mean. Emitted values are floored at zero; the internal state is not.
    pub fn generate(
        &self,
        t_start: f64,
        t_end: f64,
        dt: f64,
        seed: u64,
        stream: u64,
    ) -> Result<Vec<(f64, f64)>> {
        if !(dt > 0.0 && self.correlation_time > dt) {
            return Err(Error::params(format!(
                "correlation time {} must exceed dt {dt}",
                self.correlation_time
            )));
        }
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::params("noise horizon must follow its start"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let steps = ((t_end - t_start) / dt - 1e-9).ceil() as usize;
        let pull = dt / self.correlation_time;
        let kick = self.sd * (2.0 * pull).sqrt();
        let mut x = self.mean;
        let mut out = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            out.push((t_start + k as f64 * dt, x.max(0.0)));
            let z: f64 = StandardNormal.sample(&mut rng);
            x += pull * (self.mean - x) + kick * z;
        }
        Ok(out)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn pink_noise(
    name: &str,
    unit: Unit,
    mean: f64,
    sd: f64,
    correlation_time: f64,
    t_start: f64,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<ExogenousSeries> {
    let noise = PinkNoise {
        mean,
        sd,
        correlation_time,
    };
    ExogenousSeries::new(
        name,
        unit,
        noise.generate(t_start, t_end, dt, seed, PRICE_STREAM)?,
    )
}

/// Model days at which the subsidy era increments, up to `t_end`.
pub fn halving_days(t_end: f64) -> Vec<f64> {
    let interval = SubsidySchedule::BITCOIN.halving_interval as f64;
    (1..)
        .map(|k| k as f64 * interval / BLOCKS_PER_DAY)
        .take_while(|&d| d <= t_end)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halving {
    pub index: usize,
    pub model_day: f64,
    pub model_date: NaiveDate,
    pub real_date: Option<NaiveDate>,
    pub real_day: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSummary {
    pub halving_days: Vec<f64>,
    pub halvings: Vec<Halving>,
    pub peak_hash_rate: f64,
    pub peak_day: f64,
    pub terminal_hash_rate: f64,
    /// Days within the projection where the shortfall turns negative.
    pub shortfall_turns_negative: Vec<f64>,
    pub seed: u64,
    pub generator: String,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub trajectory: Trajectory,
    pub summary: ProjectionSummary,
}

pub fn project(
    params: &MiningParams,
    historical_price: &ExogenousSeries,
    historical_fees: &ExogenousSeries,
    spec: &ScenarioSpec,
) -> Result<Projection> {
    spec.validate()?;
    let dt = params.dt;
    let price_hist = historical_price.truncate_at(spec.t_start)?;
    let fees_hist = historical_fees.truncate_at(spec.t_start)?;
    if price_hist.first_day() > 0.0 || fees_hist.first_day() > 0.0 {
        return Err(Error::params("historical inputs must start at day 0"));
    }

    let price_noise = PinkNoise {
        mean: spec.price_mean,
        sd: spec.price_sd,
        correlation_time: spec.correlation_time,
    };
    let fees_noise = PinkNoise {
        mean: spec.fees_mean,
        sd: spec.fees_sd,
        correlation_time: spec.correlation_time,
    };
    let future_price =
        price_noise.generate(spec.t_start, spec.t_end, dt, spec.seed, PRICE_STREAM)?;
    let future_fees = fees_noise.generate(spec.t_start, spec.t_end, dt, spec.seed, FEES_STREAM)?;
    let price = price_hist.extend_with(&future_price)?;
    let fees = fees_hist.extend_with(&future_fees)?;

    let frozen = params.clone().with_efficiency_frozen_at(spec.t_start);
    let t_end = (spec.t_end / dt).floor() * dt;
    let trajectory = simulate(&frozen, &price, &fees, t_end)?;
    let summary = summarize(&trajectory, spec)?;
    Ok(Projection {
        trajectory,
        summary,
    })
}

fn summarize(trajectory: &Trajectory, spec: &ScenarioSpec) -> Result<ProjectionSummary> {
    let last = trajectory
        .last()
        .ok_or_else(|| Error::params("empty projection"))?;
    let peak = trajectory
        .peak_hash_rate(spec.t_start, spec.t_end)
        .ok_or_else(|| Error::params("projection window holds no records"))?;
    let days = halving_days(last.t);
    let halvings = days
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let real_date = REAL_HALVINGS
                .get(i)
                .and_then(|&(y, m, dd)| NaiveDate::from_ymd_opt(y, m, dd));
            Halving {
                index: i + 1,
                model_day: d,
                model_date: date_from_day(d),
                real_date,
                real_day: real_date.map(day_from_date),
            }
        })
        .collect();
    let shortfall_turns_negative = trajectory
        .records
        .windows(2)
        .filter(|w| w[1].t >= spec.t_start && w[0].shortfall_ghs >= 0.0 && w[1].shortfall_ghs < 0.0)
        .map(|w| w[1].t)
        .collect();
    Ok(ProjectionSummary {
        halving_days: days,
        halvings,
        peak_hash_rate: peak.hash_rate_ghs,
        peak_day: peak.t,
        terminal_hash_rate: last.hash_rate_ghs,
        shortfall_turns_negative,
        seed: spec.seed,
        generator: GENERATOR.to_owned(),
        t_start: spec.t_start,
        t_end: last.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sd_is_constant() {
        let s = pink_noise(
            "p",
            Unit::UsdPerBtc,
            7300.0,
            0.0,
            28.0,
            4100.0,
            4200.0,
            1.0,
            3,
        )
        .unwrap();
        assert_eq!(s.len(), 101);
        assert!(s.values().iter().all(|&v| v == 7300.0));
        assert_eq!(s.first_day(), 4100.0);
        assert_eq!(s.last_day(), 4200.0);
    }

    #[test]
    fn correlation_time_must_exceed_dt() {
        assert!(pink_noise("p", Unit::UsdPerBtc, 1.0, 1.0, 1.0, 0.0, 10.0, 1.0, 0).is_err());
        assert!(pink_noise("p", Unit::UsdPerBtc, 1.0, 1.0, 0.5, 0.0, 10.0, 1.0, 0).is_err());
    }

    #[test]
    fn floor_at_zero() {
        let s = pink_noise("f", Unit::BtcPerDay, 1.0, 50.0, 28.0, 0.0, 5000.0, 1.0, 9).unwrap();
        assert!(s.values().iter().all(|&v| v >= 0.0));
        assert!(s.values().contains(&0.0));
    }

    #[test]
    fn seeds_and_streams() {
        let noise = PinkNoise {
            mean: 30.0,
            sd: 5.0,
            correlation_time: 28.0,
        };
        let a = noise.generate(0.0, 500.0, 1.0, 7, 0).unwrap();
        assert_eq!(a, noise.generate(0.0, 500.0, 1.0, 7, 0).unwrap());
        assert_ne!(a, noise.generate(0.0, 500.0, 1.0, 8, 0).unwrap());
        assert_ne!(a, noise.generate(0.0, 500.0, 1.0, 7, 1).unwrap());
    }

    #[test]
    fn halving_calendar() {
        let d = halving_days(7500.0);
        assert_eq!(d.len(), 5);
        assert!((d[0] - 1_458.333_333_333_333).abs() < 1e-9);
        assert_eq!(d[2], 4375.0);
        assert!(halving_days(1000.0).is_empty());
    }

    #[test]
    fn spec_validation() {
        let mut s = ScenarioSpec::default();
        s.validate().unwrap();
        s.t_end = 4000.0;
        assert!(s.validate().is_err());
        let s = ScenarioSpec {
            fees_sd: -1.0,
            ..Default::default()
        };
        assert!(s.validate().is_err());
    }
}

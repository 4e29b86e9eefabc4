//! Forward integration of the coupled coin-supply and hash-rate stocks.
//!
//! Explicit Euler with every flow evaluated at the left end of the step:
//! `H' = H + dt * shortfall(t) / tau(t)`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coin::{subsidy_at_height, CoinState};
use crate::econ::{hash_rate_shortfall, mining_cost, mining_revenues, MiningParams};
use crate::error::{Error, Result};
use crate::exog_series::ExogenousSeries;

/// Lower bound applied to the hash-rate stock.
pub const HASH_RATE_FLOOR: f64 = 1e-12;

pub const TRAJECTORY_COLUMNS: [&str; 12] = [
    "t",
    "height",
    "circulating",
    "subsidy",
    "price",
    "fees",
    "revenues_usd",
    "cost_usd",
    "profit_usd",
    "shortfall_ghs",
    "hash_rate_ghs",
    "tau_days",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub coin: CoinState,
    pub hash_rate: f64,
}

impl SimState {
    pub fn initial(params: &MiningParams) -> Self {
        SimState {
            t: 0.0,
            coin: CoinState::genesis(),
            hash_rate: params.initial_hash_rate,
        }
    }
}

/// Every model variable at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub height: f64,
    pub circulating: f64,
    #[serde(skip)]
    pub remaining: f64,
    pub subsidy: f64,
    pub price: f64,
    pub fees: f64,
    pub revenues_usd: f64,
    pub cost_usd: f64,
    pub profit_usd: f64,
    pub shortfall_ghs: f64,
    pub hash_rate_ghs: f64,
    pub tau_days: f64,
}

impl TrajectoryRecord {
    fn write_csv_row(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.height,
            self.circulating,
            self.subsidy,
            self.price,
            self.fees,
            self.revenues_usd,
            self.cost_usd,
            self.profit_usd,
            self.shortfall_ghs,
            self.hash_rate_ghs,
            self.tau_days
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub records: Vec<TrajectoryRecord>,
    /// Things worth telling the user, e.g. the hash-rate floor kicking in.
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectoryRecord> {
        self.records.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.t)
    }

    /// Record at the first grid time `>= t`.
    pub fn record_at_or_after(&self, t: f64) -> Option<&TrajectoryRecord> {
        let i = self.records.partition_point(|r| r.t < t);
        self.records.get(i)
    }

    /// Hash rate linearly interpolated between grid points.
    pub fn hash_rate_at(&self, t: f64) -> Option<f64> {
        let first = self.records.first()?;
        let last = self.records.last()?;
        if !(first.t <= t && t <= last.t) {
            return None;
        }
        let i = self.records.partition_point(|r| r.t < t);
        let hi = &self.records[i];
        if hi.t == t || i == 0 {
            return Some(hi.hash_rate_ghs);
        }
        let lo = &self.records[i - 1];
        let w = (t - lo.t) / (hi.t - lo.t);
        Some(lo.hash_rate_ghs + w * (hi.hash_rate_ghs - lo.hash_rate_ghs))
    }

    /// Record holding the largest hash rate in `[from, to]` (earliest on ties).
    pub fn peak_hash_rate(&self, from: f64, to: f64) -> Option<&TrajectoryRecord> {
        self.records
            .iter()
            .filter(|r| from <= r.t && r.t <= to)
            .fold(None, |best: Option<&TrajectoryRecord>, r| match best {
                Some(b) if b.hash_rate_ghs >= r.hash_rate_ghs => Some(b),
                _ => Some(r),
            })
    }

    pub fn write_csv_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", TRAJECTORY_COLUMNS.join(","))?;
        for r in &self.records {
            r.write_csv_row(out)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::with_capacity(self.records.len() * 200);
        self.write_csv_to(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

pub fn adjustment_time(params: &MiningParams, t: f64) -> f64 {
    params.adjustment_time(t)
}

/// Evaluates every auxiliary variable at `state`.
pub fn evaluate(
    state: &SimState,
    params: &MiningParams,
    price: &ExogenousSeries,
    fees: &ExogenousSeries,
) -> Result<TrajectoryRecord> {
    let t = state.t;
    let p = price.value_at(t)?;
    let f = fees.value_at(t)?;
    let subsidy = subsidy_at_height(state.coin.height);
    let revenues = mining_revenues(subsidy, f, p);
    let cost = mining_cost(state.hash_rate, params, t);
    let shortfall = hash_rate_shortfall(revenues, state.hash_rate, params, t);
    Ok(TrajectoryRecord {
        t,
        height: state.coin.height,
        circulating: state.coin.circulating,
        remaining: state.coin.remaining,
        subsidy,
        price: p,
        fees: f,
        revenues_usd: revenues,
        cost_usd: cost,
        profit_usd: revenues - cost,
        shortfall_ghs: shortfall,
        hash_rate_ghs: state.hash_rate,
        tau_days: params.adjustment_time(t),
    })
}

fn advance(state: &SimState, record: &TrajectoryRecord, dt: f64) -> (SimState, bool) {
    let raw = state.hash_rate + dt * record.shortfall_ghs / record.tau_days;
    let floored = raw < HASH_RATE_FLOOR;
    let next = SimState {
        t: state.t + dt,
        coin: state.coin.step(dt),
        hash_rate: if floored { HASH_RATE_FLOOR } else { raw },
    };
    (next, floored)
}

/// One Euler step of length `params.dt`.
pub fn step(
    state: &SimState,
    params: &MiningParams,
    price: &ExogenousSeries,
    fees: &ExogenousSeries,
) -> Result<SimState> {
    let record = evaluate(state, params, price, fees)?;
    Ok(advance(state, &record, params.dt).0)
}

/// Integrates from the genesis state to `t_end` on the grid `k * dt`.
pub fn simulate(
    params: &MiningParams,
    price: &ExogenousSeries,
    fees: &ExogenousSeries,
    t_end: f64,
) -> Result<Trajectory> {
    params.validate_structure()?;
    let dt = params.dt;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::params(format!("t_end = {t_end} must be >= 0")));
    }
    let steps = (t_end / dt).round();
    if (steps * dt - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::params(format!(
            "t_end = {t_end} is not a multiple of dt = {dt}"
        )));
    }
    for series in [price, fees] {
        for t in [0.0, t_end] {
            series.value_at(t)?;
        }
    }

    let steps = steps as usize;
    let mut records = Vec::with_capacity(steps + 1);
    let mut warnings = Vec::new();
    let mut state = SimState::initial(params);
    for k in 0..=steps {
        state.t = k as f64 * dt;
        let record = evaluate(&state, params, price, fees)?;
        records.push(record);
        if k == steps {
            break;
        }
        let (next, floored) = advance(&state, &record, dt);
        if floored && warnings.is_empty() {
            warnings.push(format!(
                "hash rate floored at {HASH_RATE_FLOOR} GH/s from day {}",
                next.t
            ));
        }
        state = next;
    }
    Ok(Trajectory {
        dt,
        records,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::{efficiency_at, equilibrium_hash_rate};
    use crate::exog_series::Unit;
    use approx::assert_relative_eq;

    fn constant(value: f64, unit: Unit, end: f64) -> ExogenousSeries {
        ExogenousSeries::constant("c", unit, value, 0.0, end).unwrap()
    }

    fn inputs(price: f64, fees: f64, end: f64) -> (ExogenousSeries, ExogenousSeries) {
        (
            constant(price, Unit::UsdPerBtc, end),
            constant(fees, Unit::BtcPerDay, end),
        )
    }

    #[test]
    fn one_euler_step() {
        let params = MiningParams::default().with_single_tau(264.0);
        let (price, fees) = inputs(7300.0, 30.0, 10.0);
        let s0 = SimState {
            t: 3000.0 - 3000.0,
            coin: CoinState::genesis(),
            hash_rate: 1e9,
        };
        let hstar = equilibrium_hash_rate(50.0, 30.0, 7300.0, &params, 0.0);
        let s1 = step(&s0, &params, &price, &fees).unwrap();
        assert_relative_eq!(
            s1.hash_rate,
            1e9 + (hstar - 1e9) / 264.0,
            max_relative = 1e-12
        );
        assert_eq!(s1.t, 1.0);
        assert_eq!(s1.coin.height, 144.0);
    }

    #[test]
    fn fixed_point_is_exact() {
        let params = MiningParams::default().with_single_tau(264.0);
        let (price, fees) = inputs(7300.0, 30.0, 5000.0);
        let t0 = 3000.0;
        let hstar = equilibrium_hash_rate(12.5, 30.0, 7300.0, &params, t0);
        let mut s = SimState {
            t: t0,
            coin: CoinState {
                height: 420_000.0,
                circulating: 15_750_000.0,
                remaining: 5_250_000.0,
            },
            hash_rate: hstar,
        };
        for _ in 0..500 {
            s = step(&s, &params, &price, &fees).unwrap();
            assert!((s.hash_rate - hstar).abs() <= 1e-12 * hstar);
        }
    }

    #[test]
    fn height_after_4100_days() {
        let params = MiningParams::default();
        let (price, fees) = inputs(7300.0, 30.0, 4100.0);
        let traj = simulate(&params, &price, &fees, 4100.0).unwrap();
        assert_eq!(traj.len(), 4101);
        assert_eq!(traj.last().unwrap().height, 590_400.0);
    }

    #[test]
    fn zero_price_decays_without_crossing_zero() {
        let params = MiningParams::default();
        let (price, fees) = inputs(0.0, 0.0, 4100.0);
        let traj = simulate(&params, &price, &fees, 4100.0).unwrap();
        assert_eq!(traj.records[0].hash_rate_ghs, 0.007);
        for w in traj.records.windows(2) {
            assert!(w[1].hash_rate_ghs < w[0].hash_rate_ghs);
            assert!(w[1].hash_rate_ghs > 0.0);
        }
        assert!(traj.warnings.is_empty());
    }

    #[test]
    fn floor_activates_when_step_overshoots() {
        // dt == tau would jump straight to H* = 0.
        let mut params = MiningParams::default().with_single_tau(2.0).with_dt(1.9);
        params.initial_hash_rate = 1.0;
        let (price, fees) = inputs(0.0, 0.0, 19.0);
        let traj = simulate(&params, &price, &fees, 19.0).unwrap();
        assert!(traj
            .records
            .iter()
            .all(|r| r.hash_rate_ghs >= HASH_RATE_FLOOR));
        assert_eq!(traj.warnings.len(), 1);
    }

    #[test]
    fn coverage_gap_is_an_error() {
        let params = MiningParams::default();
        let (price, fees) = inputs(1.0, 1.0, 100.0);
        assert!(matches!(
            simulate(&params, &price, &fees, 200.0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(simulate(&params, &price, &fees, 10.5).is_err());
    }

    #[test]
    fn records_are_self_consistent() {
        let params = MiningParams::default();
        let (price, fees) = inputs(300.0, 20.0, 3000.0);
        let traj = simulate(&params, &price, &fees, 3000.0).unwrap();
        for (k, r) in traj.records.iter().enumerate() {
            assert_eq!(r.t, k as f64);
            assert_eq!(r.revenues_usd, (r.subsidy * 144.0 + r.fees) * r.price);
            assert_relative_eq!(r.profit_usd, r.revenues_usd - r.cost_usd);
            let eff = efficiency_at(&params, r.t);
            assert_relative_eq!(
                r.shortfall_ghs,
                r.profit_usd * eff / (params.energy_price * 86_400.0),
                max_relative = 1e-12,
                epsilon = 1e-9
            );
            assert!((r.circulating + r.remaining - 21_000_000.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn csv_layout() {
        let params = MiningParams::default();
        let (price, fees) = inputs(1.0, 0.5, 2.0);
        let csv = simulate(&params, &price, &fees, 2.0)
            .unwrap()
            .to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,height,circulating,subsidy,price,fees,revenues_usd,cost_usd,profit_usd,shortfall_ghs,hash_rate_ghs,tau_days"
        );
        assert_eq!(lines.clone().count(), 3);
        assert!(lines.next().unwrap().starts_with("0,0,0,50,1,0.5,7200.5,"));
    }

    #[test]
    fn interpolated_lookup_and_peak() {
        let params = MiningParams::default();
        let (price, fees) = inputs(100.0, 0.0, 10.0);
        let traj = simulate(&params, &price, &fees, 10.0).unwrap();
        let a = traj.records[3].hash_rate_ghs;
        let b = traj.records[4].hash_rate_ghs;
        assert_relative_eq!(traj.hash_rate_at(3.5).unwrap(), 0.5 * (a + b));
        assert_eq!(traj.hash_rate_at(4.0).unwrap(), b);
        assert!(traj.hash_rate_at(10.5).is_none());
        assert_eq!(traj.peak_hash_rate(0.0, 10.0).unwrap().t, 10.0);
        assert_eq!(traj.record_at_or_after(2.5).unwrap().t, 3.0);
    }
}

use std::io::Write;

use serde::Serialize;

use crate::coin::{circulating_asymptote, CoinState, SubsidySchedule, BLOCKS_PER_DAY, TOTAL_BTC};
use crate::error::{Error, Result};
use crate::exog_series::ExogenousSeries;

const CONSERVATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SanityCheck {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SanityCheck {
    fn new(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        SanityCheck {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SanityReport {
    pub t_end: f64,
    pub dt: f64,
    pub rows: usize,
    pub asymptote_btc: f64,
    pub checks: Vec<SanityCheck>,
    /// Informational lines, e.g. the comparison with observed heights.
    pub notes: Vec<String>,
}

impl SanityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn print(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "coin supply from day 0 to {} with dt = {} ({} rows)",
            self.t_end, self.dt, self.rows
        )?;
        for c in &self.checks {
            writeln!(
                out,
                "[{}] {}: {} (expected {} +/- {})",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.value,
                c.expected,
                c.tolerance
            )?;
        }
        writeln!(out, "supply asymptote: {:.8} BTC", self.asymptote_btc)?;
        for n in &self.notes {
            writeln!(out, "{n}")?;
        }
        Ok(())
    }
}

/// Steps the coin stocks from genesis to `t_end` and checks them against
/// the closed forms of the subsidy schedule.
pub fn sanity_report(
    t_end: f64,
    dt: f64,
    observed_heights: Option<&ExogenousSeries>,
) -> Result<SanityReport> {
    if !(dt > 0.0 && dt.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let schedule = SubsidySchedule::BITCOIN;
    let steps = (t_end / dt).round() as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    let mut state = CoinState::genesis();
    rows.push((0.0, state));
    for k in 1..=steps {
        state = state.step(dt);
        rows.push((k as f64 * dt, state));
    }
    let (t_last, last) = rows[rows.len() - 1];

    let mut checks = vec![SanityCheck::new(
        format!("height at day {t_last}"),
        last.height,
        BLOCKS_PER_DAY * t_last,
        1e-6,
    )];

    let mut tolerance = 0.0;
    let interval = schedule.halving_interval as f64;
    for era in 0.. {
        let end_day = (era + 1) as f64 * interval / BLOCKS_PER_DAY;
        let Some(&(t, s)) = rows.iter().find(|(t, _)| *t >= end_day) else {
            break;
        };
        // a step straddling the boundary credits all its blocks at the old subsidy
        tolerance += BLOCKS_PER_DAY * dt * schedule.subsidy_at_height(era as f64 * interval);
        checks.push(SanityCheck::new(
            format!("circulating at end of era {era} (day {t})"),
            s.circulating,
            schedule.supply_satoshi_through_era(era) as f64 / schedule.satoshi_per_btc as f64,
            tolerance,
        ));
    }

    let worst_conservation = rows
        .iter()
        .map(|(_, s)| (s.circulating + s.remaining - TOTAL_BTC).abs())
        .fold(0.0, f64::max);
    checks.push(SanityCheck::new(
        "max |circulating + remaining - 21M| over all rows",
        worst_conservation,
        0.0,
        CONSERVATION_TOLERANCE,
    ));
    let decreases = rows
        .windows(2)
        .filter(|w| w[1].1.circulating < w[0].1.circulating || w[1].1.remaining < 0.0)
        .count();
    checks.push(SanityCheck::new(
        "rows where circulating decreases or remaining < 0",
        decreases as f64,
        0.0,
        0.0,
    ));
    let asymptote = circulating_asymptote();
    checks.push(SanityCheck::new(
        "21M minus supply asymptote (BTC)",
        TOTAL_BTC - asymptote,
        0.5,
        0.5,
    ));

    let mut notes = Vec::new();
    if let Some(obs) = observed_heights {
        let diffs: Vec<(f64, f64)> = obs
            .points()
            .filter(|&(d, h)| d <= t_last && h > 0.0)
            .map(|(d, h)| (d, BLOCKS_PER_DAY * d / h - 1.0))
            .collect();
        match diffs.iter().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())) {
            Some(&(day, rel)) => notes.push(format!(
                "observed heights ({}): {} points, largest relative deviation {:+.4} at day {}",
                obs.name(),
                diffs.len(),
                rel,
                day
            )),
            None => notes.push(format!(
                "observed heights ({}): no usable points",
                obs.name()
            )),
        }
    }

    Ok(SanityReport {
        t_end: t_last,
        dt,
        rows: rows.len(),
        asymptote_btc: asymptote,
        checks,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let r = sanity_report(4100.0, 1.0, None).unwrap();
        assert!(r.passed(), "{:#?}", r.checks);
        assert_eq!(r.checks[0].value, 590_400.0);
        assert_eq!(r.checks[1].value, 10_504_800.0);
        assert_eq!(r.rows, 4101);
    }

    #[test]
    fn half_day_steps_pass() {
        assert!(sanity_report(4100.0, 0.5, None).unwrap().passed());
    }

    #[test]
    fn long_horizon_passes() {
        let r = sanity_report(60_000.0, 1.0, None).unwrap();
        assert!(
            r.passed(),
            "{:#?}",
            r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
        );
    }
}

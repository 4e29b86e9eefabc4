//! Weekly down-sampled historical series compiled into the crate, so the
//! CLI and the test suite run without network access.
//!
//! They approximate the public blockchain.com charts from day 0 to day 4100
//! (see `scripts/make_fixtures.py`). Use `hashpeak fetch` for the full data.

use crate::exog_series::{parse_csv, Chart, ExogenousSeries};

pub const BUNDLED_END_DAY: f64 = 4100.0;

const MARKET_PRICE: &str = include_str!("../data/market-price.csv");
const TRANSACTION_FEES: &str = include_str!("../data/transaction-fees.csv");
const HASH_RATE: &str = include_str!("../data/hash-rate.csv");

pub fn bundled(chart: Chart) -> ExogenousSeries {
    let text = match chart {
        Chart::MarketPrice => MARKET_PRICE,
        Chart::TransactionFees => TRANSACTION_FEES,
        Chart::HashRate => HASH_RATE,
    };
    let source = format!("bundled:{}.csv", chart.name());
    parse_csv(text.as_bytes(), &source, chart.name(), chart.unit())
        .expect("bundled fixture is valid")
}

pub fn price() -> ExogenousSeries {
    bundled(Chart::MarketPrice)
}

pub fn fees() -> ExogenousSeries {
    bundled(Chart::TransactionFees)
}

pub fn hash_rate() -> ExogenousSeries {
    bundled(Chart::HashRate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_cover_history() {
        for chart in Chart::ALL {
            let s = bundled(chart);
            assert_eq!(s.first_day(), 0.0);
            assert_eq!(s.last_day(), BUNDLED_END_DAY);
            assert_eq!(s.unit(), chart.unit());
            assert!(s.len() > 500);
        }
    }
}

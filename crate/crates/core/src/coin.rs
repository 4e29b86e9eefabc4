//! Controlled coin supply: the halving subsidy schedule, blockchain height
//! and the transfer of the fixed 21M BTC stock into circulation.

use serde::{Deserialize, Serialize};

pub const SATOSHI_PER_BTC: u64 = 100_000_000;
pub const TOTAL_BTC: f64 = 21_000_000.0;
/// One block every 10 minutes.
pub const BLOCKS_PER_DAY: f64 = 144.0;

/// Subsidy per block, kept in integer satoshis and halved by flooring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsidySchedule {
    pub initial_subsidy_satoshi: u64,
    pub halving_interval: u64,
    pub satoshi_per_btc: u64,
}

impl SubsidySchedule {
    pub const BITCOIN: SubsidySchedule = SubsidySchedule {
        initial_subsidy_satoshi: 50 * SATOSHI_PER_BTC,
        halving_interval: 210_000,
        satoshi_per_btc: SATOSHI_PER_BTC,
    };

    pub fn era(&self, height: f64) -> u64 {
        (height.max(0.0) / self.halving_interval as f64).floor() as u64
    }

    pub fn subsidy_satoshi_in_era(&self, era: u64) -> u64 {
        if era >= 64 {
            0
        } else {
            self.initial_subsidy_satoshi >> era
        }
    }

    pub fn subsidy_at_height(&self, height: f64) -> f64 {
        self.subsidy_satoshi_in_era(self.era(height)) as f64 / self.satoshi_per_btc as f64
    }

    /// Satoshis issued by the end of `era` if every block is mined.
    pub fn supply_satoshi_through_era(&self, era: u64) -> u64 {
        (0..=era.min(63))
            .map(|e| self.halving_interval * self.subsidy_satoshi_in_era(e))
            .sum()
    }

    /// First era whose subsidy is zero.
    pub fn terminal_era(&self) -> u64 {
        (0..64)
            .find(|&e| self.subsidy_satoshi_in_era(e) == 0)
            .unwrap_or(64)
    }

    pub fn asymptote_satoshi(&self) -> u64 {
        self.supply_satoshi_through_era(self.terminal_era())
    }
}

impl Default for SubsidySchedule {
    fn default() -> Self {
        Self::BITCOIN
    }
}

pub fn subsidy_at_height(height: f64) -> f64 {
    SubsidySchedule::BITCOIN.subsidy_at_height(height)
}

pub fn block_creation_rate() -> f64 {
    BLOCKS_PER_DAY
}

/// Total BTC ever issued under the satoshi-floored schedule.
pub fn circulating_asymptote() -> f64 {
    SubsidySchedule::BITCOIN.asymptote_satoshi() as f64 / SATOSHI_PER_BTC as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinState {
    pub height: f64,
    pub circulating: f64,
    pub remaining: f64,
}

impl CoinState {
    pub fn genesis() -> Self {
        CoinState {
            height: 0.0,
            circulating: 0.0,
            remaining: TOTAL_BTC,
        }
    }

    /// Advances by `dt` days at the target block rate. The subsidy of the
    /// step is the one in force at the starting height.
    pub fn step(&self, dt: f64) -> CoinState {
        let blocks = BLOCKS_PER_DAY * dt;
        let created = (blocks * subsidy_at_height(self.height)).min(self.remaining);
        let circulating = self.circulating + created;
        CoinState {
            height: self.height + blocks,
            circulating,
            remaining: TOTAL_BTC - circulating,
        }
    }
}

impl Default for CoinState {
    fn default() -> Self {
        Self::genesis()
    }
}

pub fn coin_step(state: &CoinState, dt: f64) -> CoinState {
    state.step(dt)
}

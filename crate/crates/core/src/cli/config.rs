use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationSpec;
use crate::econ::MiningParams;
use crate::error::{Error, Result};
use crate::exog_series::{fetch_chart, load_csv, Chart, ExogenousSeries};
use crate::fixtures;
use crate::scenario::ScenarioSpec;

/// Everything a run depends on besides the input files themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: MiningParams,
    pub price_csv: Option<PathBuf>,
    pub fees_csv: Option<PathBuf>,
    pub hashrate_csv: Option<PathBuf>,
    /// Load charts without an explicit path through the fetch cache.
    pub fetch: bool,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    /// End of `simulate` and `sanity` runs.
    pub t_end: f64,
    pub calibration: CalibrationSpec,
    pub scenario: ScenarioSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: MiningParams::default(),
            price_csv: None,
            fees_csv: None,
            hashrate_csv: None,
            fetch: false,
            cache_dir: PathBuf::from("hashpeak-cache"),
            out_dir: PathBuf::from("hashpeak-out"),
            t_end: fixtures::BUNDLED_END_DAY,
            calibration: CalibrationSpec::default(),
            scenario: ScenarioSpec::default(),
        }
    }
}

impl RunConfig {
    /// Reads a config file. A `run.json` manifest is accepted too, in which
    /// case its `config` section is used.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::params(format!("{}: {e}", path.display())))?;
        let value = match value {
            serde_json::Value::Object(mut map)
                if map.contains_key("config") && map.contains_key("version") =>
            {
                map.remove("config").unwrap_or_default()
            }
            other => other,
        };
        serde_json::from_value(value).map_err(|e| Error::params(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for path in [&self.price_csv, &self.fees_csv, &self.hashrate_csv]
            .into_iter()
            .flatten()
        {
            if !path.is_file() {
                return Err(Error::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::params(format!(
                "t_end = {} must be >= 0",
                self.t_end
            )));
        }
        Ok(())
    }

    fn path_for(&self, chart: Chart) -> Option<&PathBuf> {
        match chart {
            Chart::MarketPrice => self.price_csv.as_ref(),
            Chart::TransactionFees => self.fees_csv.as_ref(),
            Chart::HashRate => self.hashrate_csv.as_ref(),
        }
    }

    /// Human-readable origin of a chart's data.
    pub fn source_of(&self, chart: Chart) -> String {
        match self.path_for(chart) {
            Some(p) => p.display().to_string(),
            None if self.fetch => self
                .cache_dir
                .join(format!("{}.csv", chart.name()))
                .display()
                .to_string(),
            None => format!("bundled:{}", chart.name()),
        }
    }

    pub fn load_chart(&self, chart: Chart) -> Result<ExogenousSeries> {
        match self.path_for(chart) {
            Some(p) => load_csv(p, chart.unit()),
            None if self.fetch => fetch_chart(chart.name(), &self.cache_dir),
            None => Ok(fixtures::bundled(chart)),
        }
    }
}

use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use serde::Deserialize;

use super::{day_from_unix, load_csv, write_csv, ExogenousSeries, Unit};
use crate::error::{Error, Result};

pub const DEFAULT_CHART_BASE: &str = "https://api.blockchain.info/charts";
/// Overrides [`DEFAULT_CHART_BASE`], mainly for pointing tests at a stub server.
pub const CHART_BASE_ENV: &str = "HASHPEAK_CHART_BASE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    MarketPrice,
    TransactionFees,
    HashRate,
}

impl Chart {
    pub const ALL: [Chart; 3] = [Chart::MarketPrice, Chart::TransactionFees, Chart::HashRate];

    pub fn name(self) -> &'static str {
        match self {
            Chart::MarketPrice => "market-price",
            Chart::TransactionFees => "transaction-fees",
            Chart::HashRate => "hash-rate",
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            Chart::MarketPrice => Unit::UsdPerBtc,
            Chart::TransactionFees => Unit::BtcPerDay,
            Chart::HashRate => Unit::GhPerSecond,
        }
    }
}

impl FromStr for Chart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Chart::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownChart(s.to_owned()))
    }
}

/// Blocking GET returning the response body.
pub trait Transport {
    fn get(&self, url: &str) -> Result<String>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new() -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .new_agent();
        HttpTransport { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String> {
        let http = |message: String| Error::Http {
            url: url.to_owned(),
            message,
        };
        let mut response = self
            .agent
            .get(url)
            .call()
            .map_err(|e| http(e.to_string()))?;
        response
            .body_mut()
            .with_config()
            .limit(256 * 1024 * 1024)
            .read_to_string()
            .map_err(|e| http(e.to_string()))
    }
}

pub fn chart_base_url() -> String {
    std::env::var(CHART_BASE_ENV)
        .ok()
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| DEFAULT_CHART_BASE.to_owned())
}

pub fn chart_url(base: &str, chart: Chart) -> String {
    format!(
        "{}/{}?timespan=all&format=json",
        base.trim_end_matches('/'),
        chart.name()
    )
}

/// Returns the cached `<cache_dir>/<chart_name>.csv` if present, otherwise
/// downloads the chart and writes the cache.
pub fn fetch_chart(chart_name: &str, cache_dir: &Path) -> Result<ExogenousSeries> {
    fetch_chart_with(
        chart_name,
        cache_dir,
        &chart_base_url(),
        &HttpTransport::new(),
    )
}

pub fn fetch_chart_with(
    chart_name: &str,
    cache_dir: &Path,
    base_url: &str,
    transport: &dyn Transport,
) -> Result<ExogenousSeries> {
    let chart: Chart = chart_name.parse()?;
    let cache_file = cache_dir.join(format!("{}.csv", chart.name()));
    if cache_file.is_file() {
        return load_csv(&cache_file, chart.unit());
    }
    let body = transport.get(&chart_url(base_url, chart))?;
    let series = parse_chart_json(chart, &body)?;
    std::fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    write_csv(&series, &cache_file)?;
    Ok(series)
}

#[derive(Deserialize)]
struct ChartPayload {
    #[serde(default)]
    unit: Option<String>,
    values: Vec<ChartPoint>,
}

#[derive(Deserialize)]
struct ChartPoint {
    x: f64,
    y: f64,
}

/// Parses `{"values":[{"x":<unix seconds>,"y":<number>},...]}`. Hash-rate
/// payloads labelled in TH/s, PH/s or EH/s are rescaled to GH/s.
pub fn parse_chart_json(chart: Chart, body: &str) -> Result<ExogenousSeries> {
    let payload: ChartPayload =
        serde_json::from_str(body).map_err(|e| Error::Payload(e.to_string()))?;
    let scale = match (chart, payload.unit.as_deref()) {
        (Chart::HashRate, Some(u)) => hash_rate_scale(u),
        _ => 1.0,
    };
    let points = payload
        .values
        .iter()
        .map(|p| (day_from_unix(p.x), p.y * scale))
        .collect();
    ExogenousSeries::new(chart.name(), chart.unit(), points)
        .map_err(|e| Error::Payload(e.to_string()))
}

fn hash_rate_scale(unit: &str) -> f64 {
    if unit.contains("EH/s") {
        1e9
    } else if unit.contains("PH/s") {
        1e6
    } else if unit.contains("TH/s") {
        1e3
    } else {
        1.0
    }
}

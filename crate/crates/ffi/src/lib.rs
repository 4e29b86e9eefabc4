//! C ABI over `hashpeak-core`.
//!
//! Objects are opaque heap handles created by `hp_*_new`/`hp_*_load`-style
//! functions and released with the matching `hp_*_free`. Fallible calls
//! return an [`HpStatus`]; the message of the most recent failure on the
//! calling thread is available from [`hp_last_error_message`].

#![allow(clippy::missing_safety_doc, clippy::too_many_arguments)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hashpeak_core::calibration::{calibrate, CalibrationSpec, Mode, ObjectiveKind};
use hashpeak_core::coin::{circulating_asymptote, subsidy_at_height};
use hashpeak_core::dynamics::{simulate, Trajectory, TrajectoryRecord};
use hashpeak_core::econ::{equilibrium_hash_rate, usd_per_kwh_to_usd_per_joule, MiningParams};
use hashpeak_core::exog_series::{load_csv, Chart, ExogenousSeries, Unit};
use hashpeak_core::scenario::{pink_noise, project, ScenarioSpec};
use hashpeak_core::{fixtures, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Data = 4,
    OutOfRange = 5,
    Calibration = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpUnit {
    UsdPerBtc = 0,
    BtcPerDay = 1,
    GhPerSecond = 2,
    Blocks = 3,
}

impl From<HpUnit> for Unit {
    fn from(u: HpUnit) -> Unit {
        match u {
            HpUnit::UsdPerBtc => Unit::UsdPerBtc,
            HpUnit::BtcPerDay => Unit::BtcPerDay,
            HpUnit::GhPerSecond => Unit::GhPerSecond,
            HpUnit::Blocks => Unit::Blocks,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpChart {
    MarketPrice = 0,
    TransactionFees = 1,
    HashRate = 2,
}

impl From<HpChart> for Chart {
    fn from(c: HpChart) -> Chart {
        match c {
            HpChart::MarketPrice => Chart::MarketPrice,
            HpChart::TransactionFees => Chart::TransactionFees,
            HpChart::HashRate => Chart::HashRate,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpMode {
    Single = 0,
    TwoRegime = 1,
    TwoRegimeFreeBreak = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpObjective {
    LinearNrmse = 0,
    LogRmse = 1,
}

/// One row of a trajectory, same columns as the CSV output.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HpRecord {
    pub t: f64,
    pub height: f64,
    pub circulating: f64,
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

impl From<&TrajectoryRecord> for HpRecord {
    fn from(r: &TrajectoryRecord) -> Self {
        HpRecord {
            t: r.t,
            height: r.height,
            circulating: r.circulating,
            subsidy: r.subsidy,
            price: r.price,
            fees: r.fees,
            revenues_usd: r.revenues_usd,
            cost_usd: r.cost_usd,
            profit_usd: r.profit_usd,
            shortfall_ghs: r.shortfall_ghs,
            hash_rate_ghs: r.hash_rate_ghs,
            tau_days: r.tau_days,
        }
    }
}

/// Outcome of [`hp_calibrate`]. In single mode `tau_late == tau_early` and
/// `break_day` is NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HpFit {
    pub tau_early: f64,
    pub tau_late: f64,
    pub break_day: f64,
    pub objective: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Scenario settings for [`hp_project`]; [`hp_scenario_default`] fills in
/// the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpScenario {
    pub t_start: f64,
    pub t_end: f64,
    pub price_mean: f64,
    pub price_sd: f64,
    pub fees_mean: f64,
    pub fees_sd: f64,
    pub correlation_time: f64,
    pub seed: u64,
}

impl From<HpScenario> for ScenarioSpec {
    fn from(s: HpScenario) -> Self {
        ScenarioSpec {
            t_start: s.t_start,
            t_end: s.t_end,
            price_mean: s.price_mean,
            price_sd: s.price_sd,
            fees_mean: s.fees_mean,
            fees_sd: s.fees_sd,
            correlation_time: s.correlation_time,
            seed: s.seed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HpProjectionSummary {
    pub peak_hash_rate: f64,
    pub peak_day: f64,
    pub terminal_hash_rate: f64,
    pub t_end: f64,
    pub halving_count: usize,
}

pub struct HpParams(MiningParams);
pub struct HpSeries(ExogenousSeries);
pub struct HpTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> HpStatus {
    match e {
        Error::Io { .. } | Error::Http { .. } => HpStatus::Io,
        Error::OutOfRange { .. } => HpStatus::OutOfRange,
        Error::InvalidParams(_) => HpStatus::InvalidArgument,
        Error::Calibration(_) => HpStatus::Calibration,
        _ => HpStatus::Data,
    }
}

struct Fail(HpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HpStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, recording failures and turning panics into [`HpStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HpStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(format!("internal error: {msg}"));
            HpStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn out<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            HpStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn out_handle<T>(p: *mut *mut T, value: T, what: &str) -> Result<(), Fail> {
    out(p, ptr::null_mut(), what)?;
    p.write(boxed(value));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next `hp_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Block subsidy in BTC at blockchain `height`.
#[no_mangle]
pub extern "C" fn hp_subsidy_at_height(height: f64) -> f64 {
    subsidy_at_height(height)
}

/// Total BTC ever issued.
#[no_mangle]
pub extern "C" fn hp_circulating_asymptote() -> f64 {
    circulating_asymptote()
}

/// Default model parameters. Never NULL.
#[no_mangle]
pub extern "C" fn hp_params_new() -> *mut HpParams {
    boxed(HpParams(MiningParams::default()))
}

/// Parameters from a JSON object; missing fields take their defaults.
#[no_mangle]
pub unsafe extern "C" fn hp_params_from_json(
    json: *const c_char,
    out_params: *mut *mut HpParams,
) -> HpStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let params: MiningParams = serde_json::from_str(text)
            .map_err(|e| Fail(HpStatus::InvalidArgument, format!("params JSON: {e}")))?;
        params.validate_structure()?;
        out_handle(out_params, HpParams(params), "out_params")
    })
}

/// Parameters as a JSON string; release it with [`hp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hp_params_to_json(
    params: *const HpParams,
    out_json: *mut *mut c_char,
) -> HpStatus {
    guard(|| {
        let p = get(params, "params")?;
        let text = serde_json::to_string(&p.0).map_err(|e| Fail(HpStatus::Data, e.to_string()))?;
        let c = CString::new(text).map_err(|e| Fail(HpStatus::Data, e.to_string()))?;
        out(out_json, c.into_raw(), "out_json")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn hp_params_set_single_tau(
    params: *mut HpParams,
    tau_days: f64,
) -> HpStatus {
    guard(|| {
        let p = get_mut(params, "params")?;
        let next = p.0.clone().with_single_tau(tau_days);
        next.validate_structure()?;
        p.0 = next;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hp_params_set_two_regimes(
    params: *mut HpParams,
    break_day: f64,
    early_tau: f64,
    late_tau: f64,
) -> HpStatus {
    guard(|| {
        let p = get_mut(params, "params")?;
        let next = p.0.clone().with_two_regimes(break_day, early_tau, late_tau);
        next.validate_structure()?;
        p.0 = next;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hp_params_set_dt(params: *mut HpParams, dt: f64) -> HpStatus {
    guard(|| {
        let p = get_mut(params, "params")?;
        let next = p.0.clone().with_dt(dt);
        next.validate_structure()?;
        p.0 = next;
        Ok(())
    })
}

/// Energy price in USD per kWh.
#[no_mangle]
pub unsafe extern "C" fn hp_params_set_energy_price(
    params: *mut HpParams,
    usd_per_kwh: f64,
) -> HpStatus {
    guard(|| {
        let p = get_mut(params, "params")?;
        let mut next = p.0.clone();
        next.energy_price = usd_per_kwh_to_usd_per_joule(usd_per_kwh);
        next.validate_structure()?;
        p.0 = next;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hp_params_set_initial_hash_rate(
    params: *mut HpParams,
    ghs: f64,
) -> HpStatus {
    guard(|| {
        let p = get_mut(params, "params")?;
        let mut next = p.0.clone();
        next.initial_hash_rate = ghs;
        next.validate_structure()?;
        p.0 = next;
        Ok(())
    })
}

/// Adjustment time in force at day `t`.
#[no_mangle]
pub unsafe extern "C" fn hp_params_adjustment_time(
    params: *const HpParams,
    t: f64,
    out_tau: *mut f64,
) -> HpStatus {
    guard(|| {
        let p = get(params, "params")?;
        out(out_tau, p.0.adjustment_time(t), "out_tau")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hp_params_free(params: *mut HpParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Zero-profit hash rate in GH/s at day `t`.
#[no_mangle]
pub unsafe extern "C" fn hp_equilibrium_hash_rate(
    params: *const HpParams,
    subsidy_btc_per_block: f64,
    fees_btc_per_day: f64,
    price_usd: f64,
    t: f64,
    out_ghs: *mut f64,
) -> HpStatus {
    guard(|| {
        let p = get(params, "params")?;
        let h = equilibrium_hash_rate(subsidy_btc_per_block, fees_btc_per_day, price_usd, &p.0, t);
        out(out_ghs, h, "out_ghs")
    })
}

/// Series from `len` (day, value) pairs.
#[no_mangle]
pub unsafe extern "C" fn hp_series_new(
    name: *const c_char,
    unit: HpUnit,
    days: *const f64,
    values: *const f64,
    len: usize,
    out_series: *mut *mut HpSeries,
) -> HpStatus {
    guard(|| {
        let name = if name.is_null() {
            "series"
        } else {
            str_arg(name, "name")?
        };
        if len > 0 && (days.is_null() || values.is_null()) {
            return Err(null("days/values"));
        }
        let (d, v) = if len == 0 {
            (&[][..], &[][..])
        } else {
            (
                std::slice::from_raw_parts(days, len),
                std::slice::from_raw_parts(values, len),
            )
        };
        let s = ExogenousSeries::from_columns(name, unit.into(), d.to_vec(), v.to_vec())?;
        out_handle(out_series, HpSeries(s), "out_series")
    })
}

/// Reads a `day,value` or `date,value` CSV.
#[no_mangle]
pub unsafe extern "C" fn hp_series_load_csv(
    path: *const c_char,
    unit: HpUnit,
    out_series: *mut *mut HpSeries,
) -> HpStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let s = load_csv(path, unit.into())?;
        out_handle(out_series, HpSeries(s), "out_series")
    })
}

/// One of the weekly historical series shipped with the library.
#[no_mangle]
pub unsafe extern "C" fn hp_series_bundled(
    chart: HpChart,
    out_series: *mut *mut HpSeries,
) -> HpStatus {
    guard(|| {
        out_handle(
            out_series,
            HpSeries(fixtures::bundled(chart.into())),
            "out_series",
        )
    })
}

/// Mean-reverting noise on `t_start + k * dt`, floored at zero.
#[no_mangle]
pub unsafe extern "C" fn hp_pink_noise(
    unit: HpUnit,
    mean: f64,
    sd: f64,
    correlation_time: f64,
    t_start: f64,
    t_end: f64,
    dt: f64,
    seed: u64,
    out_series: *mut *mut HpSeries,
) -> HpStatus {
    guard(|| {
        let s = pink_noise(
            "noise",
            unit.into(),
            mean,
            sd,
            correlation_time,
            t_start,
            t_end,
            dt,
            seed,
        )?;
        out_handle(out_series, HpSeries(s), "out_series")
    })
}

/// Linear interpolation at day `t`; [`HpStatus::OutOfRange`] outside the series.
#[no_mangle]
pub unsafe extern "C" fn hp_series_value_at(
    series: *const HpSeries,
    t: f64,
    out_value: *mut f64,
) -> HpStatus {
    guard(|| {
        let s = get(series, "series")?;
        out(out_value, s.0.value_at(t)?, "out_value")
    })
}

/// Number of knots; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn hp_series_len(series: *const HpSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn hp_series_free(series: *mut HpSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Integrates the model from day 0 to `t_end`.
#[no_mangle]
pub unsafe extern "C" fn hp_simulate(
    params: *const HpParams,
    price: *const HpSeries,
    fees: *const HpSeries,
    t_end: f64,
    out_trajectory: *mut *mut HpTrajectory,
) -> HpStatus {
    guard(|| {
        let p = get(params, "params")?;
        let price = get(price, "price")?;
        let fees = get(fees, "fees")?;
        let traj = simulate(&p.0, &price.0, &fees.0, t_end)?;
        out_handle(out_trajectory, HpTrajectory(traj), "out_trajectory")
    })
}

/// Number of rows; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn hp_trajectory_len(trajectory: *const HpTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn hp_trajectory_get(
    trajectory: *const HpTrajectory,
    index: usize,
    out_record: *mut HpRecord,
) -> HpStatus {
    guard(|| {
        let t = get(trajectory, "trajectory")?;
        let r = t.0.records.get(index).ok_or_else(|| {
            Fail(
                HpStatus::OutOfRange,
                format!("row {index} out of range (len {})", t.0.len()),
            )
        })?;
        out(out_record, HpRecord::from(r), "out_record")
    })
}

/// Number of warnings recorded during integration (e.g. hash-rate floor).
#[no_mangle]
pub unsafe extern "C" fn hp_trajectory_warning_count(trajectory: *const HpTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.warnings.len())
}

#[no_mangle]
pub unsafe extern "C" fn hp_trajectory_write_csv(
    trajectory: *const HpTrajectory,
    path: *const c_char,
) -> HpStatus {
    guard(|| {
        let t = get(trajectory, "trajectory")?;
        let path = str_arg(path, "path")?;
        t.0.write_csv(path)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hp_trajectory_free(trajectory: *mut HpTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Fits the adjustment time(s) of `base` to `historical` over days
/// `[0, window_end]`. `break_day` is used by [`HpMode::TwoRegime`] only.
/// `out_params` may be NULL; otherwise it receives `base` with the fitted
/// regimes.
#[no_mangle]
pub unsafe extern "C" fn hp_calibrate(
    base: *const HpParams,
    price: *const HpSeries,
    fees: *const HpSeries,
    historical: *const HpSeries,
    mode: HpMode,
    objective: HpObjective,
    break_day: f64,
    window_end: f64,
    out_fit: *mut HpFit,
    out_params: *mut *mut HpParams,
) -> HpStatus {
    guard(|| {
        let base = get(base, "base")?;
        let price = get(price, "price")?;
        let fees = get(fees, "fees")?;
        let historical = get(historical, "historical")?;
        if out_fit.is_null() {
            return Err(null("out_fit"));
        }
        let spec = CalibrationSpec {
            mode: match mode {
                HpMode::Single => Mode::Single,
                HpMode::TwoRegime => Mode::TwoRegime,
                HpMode::TwoRegimeFreeBreak => Mode::TwoRegimeFreeBreak,
            },
            objective: match objective {
                HpObjective::LinearNrmse => ObjectiveKind::LinearNrmse,
                HpObjective::LogRmse => ObjectiveKind::LogRmse,
            },
            break_day,
            fit_window: (0.0, window_end),
            ..CalibrationSpec::default()
        };
        let result = calibrate(&spec, &base.0, &price.0, &fees.0, &historical.0)?;
        let first = result.taus.first().map_or(f64::NAN, |r| r.tau_days);
        let last = result.taus.last().map_or(f64::NAN, |r| r.tau_days);
        out(
            out_fit,
            HpFit {
                tau_early: first,
                tau_late: last,
                break_day: result.break_day.unwrap_or(f64::NAN),
                objective: result.objective_value,
                evaluations: result.evaluations,
                converged: result.converged,
            },
            "out_fit",
        )?;
        if !out_params.is_null() {
            out_params.write(boxed(HpParams(result.params(&base.0))));
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn hp_scenario_default() -> HpScenario {
    let s = ScenarioSpec::default();
    HpScenario {
        t_start: s.t_start,
        t_end: s.t_end,
        price_mean: s.price_mean,
        price_sd: s.price_sd,
        fees_mean: s.fees_mean,
        fees_sd: s.fees_sd,
        correlation_time: s.correlation_time,
        seed: s.seed,
    }
}

/// Splices the scenario onto the history after `scenario.t_start` and
/// integrates to `scenario.t_end`. `out_summary` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hp_project(
    params: *const HpParams,
    price: *const HpSeries,
    fees: *const HpSeries,
    scenario: *const HpScenario,
    out_trajectory: *mut *mut HpTrajectory,
    out_summary: *mut HpProjectionSummary,
) -> HpStatus {
    guard(|| {
        let p = get(params, "params")?;
        let price = get(price, "price")?;
        let fees = get(fees, "fees")?;
        let spec: ScenarioSpec = (*get(scenario, "scenario")?).into();
        if out_trajectory.is_null() {
            return Err(null("out_trajectory"));
        }
        let projection = project(&p.0, &price.0, &fees.0, &spec)?;
        let s = &projection.summary;
        if !out_summary.is_null() {
            out_summary.write(HpProjectionSummary {
                peak_hash_rate: s.peak_hash_rate,
                peak_day: s.peak_day,
                terminal_hash_rate: s.terminal_hash_rate,
                t_end: s.t_end,
                halving_count: s.halving_days.len(),
            });
        }
        out_trajectory.write(boxed(HpTrajectory(projection.trajectory)));
        Ok(())
    })
}

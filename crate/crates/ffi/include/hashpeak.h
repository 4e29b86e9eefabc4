#ifndef HASHPEAK_H
#define HASHPEAK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  HP_STATUS_OK = 0,
  HP_STATUS_NULL_POINTER = 1,
  HP_STATUS_INVALID_ARGUMENT = 2,
  HP_STATUS_IO = 3,
  HP_STATUS_DATA = 4,
  HP_STATUS_OUT_OF_RANGE = 5,
  HP_STATUS_CALIBRATION = 6,
  HP_STATUS_PANIC = 7,
} HpStatus;

typedef enum {
  HP_UNIT_USD_PER_BTC = 0,
  HP_UNIT_BTC_PER_DAY = 1,
  HP_UNIT_GH_PER_SECOND = 2,
  HP_UNIT_BLOCKS = 3,
} HpUnit;

typedef enum {
  HP_CHART_MARKET_PRICE = 0,
  HP_CHART_TRANSACTION_FEES = 1,
  HP_CHART_HASH_RATE = 2,
} HpChart;

typedef enum {
  HP_MODE_SINGLE = 0,
  HP_MODE_TWO_REGIME = 1,
  HP_MODE_TWO_REGIME_FREE_BREAK = 2,
} HpMode;

typedef enum {
  HP_OBJECTIVE_LINEAR_NRMSE = 0,
  HP_OBJECTIVE_LOG_RMSE = 1,
} HpObjective;

typedef struct HpParams HpParams;

typedef struct HpSeries HpSeries;

typedef struct HpTrajectory HpTrajectory;

/**
 * One row of a trajectory, same columns as the CSV output.
 */
typedef struct {
  double t;
  double height;
  double circulating;
  double subsidy;
  double price;
  double fees;
  double revenues_usd;
  double cost_usd;
  double profit_usd;
  double shortfall_ghs;
  double hash_rate_ghs;
  double tau_days;
} HpRecord;

/**
 * Outcome of [`hp_calibrate`]. In single mode `tau_late == tau_early` and
 * `break_day` is NaN.
 */
typedef struct {
  double tau_early;
  double tau_late;
  double break_day;
  double objective;
  size_t evaluations;
  bool converged;
} HpFit;

/**
 * Scenario settings for [`hp_project`]; [`hp_scenario_default`] fills in
 * the defaults.
 */
typedef struct {
  double t_start;
  double t_end;
  double price_mean;
  double price_sd;
  double fees_mean;
  double fees_sd;
  double correlation_time;
  uint64_t seed;
} HpScenario;

typedef struct {
  double peak_hash_rate;
  double peak_day;
  double terminal_hash_rate;
  double t_end;
  size_t halving_count;
} HpProjectionSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hp_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next `hp_*` call on the same thread.
 */
const char *hp_last_error_message(void);

/**
 * Block subsidy in BTC at blockchain `height`.
 */
double hp_subsidy_at_height(double height);

/**
 * Total BTC ever issued.
 */
double hp_circulating_asymptote(void);

/**
 * Default model parameters. Never NULL.
 */
HpParams *hp_params_new(void);

/**
 * Parameters from a JSON object; missing fields take their defaults.
 */
HpStatus hp_params_from_json(const char *json, HpParams **out_params);

/**
 * Parameters as a JSON string; release it with [`hp_string_free`].
 */
HpStatus hp_params_to_json(const HpParams *params, char **out_json);

void hp_string_free(char *s);

HpStatus hp_params_set_single_tau(HpParams *params, double tau_days);

HpStatus hp_params_set_two_regimes(HpParams *params,
                                   double break_day,
                                   double early_tau,
                                   double late_tau);

HpStatus hp_params_set_dt(HpParams *params, double dt);

/**
 * Energy price in USD per kWh.
 */
HpStatus hp_params_set_energy_price(HpParams *params, double usd_per_kwh);

HpStatus hp_params_set_initial_hash_rate(HpParams *params, double ghs);

/**
 * Adjustment time in force at day `t`.
 */
HpStatus hp_params_adjustment_time(const HpParams *params, double t, double *out_tau);

void hp_params_free(HpParams *params);

/**
 * Zero-profit hash rate in GH/s at day `t`.
 */
HpStatus hp_equilibrium_hash_rate(const HpParams *params,
                                  double subsidy_btc_per_block,
                                  double fees_btc_per_day,
                                  double price_usd,
                                  double t,
                                  double *out_ghs);

/**
 * Series from `len` (day, value) pairs.
 */
HpStatus hp_series_new(const char *name,
                       HpUnit unit,
                       const double *days,
                       const double *values,
                       size_t len,
                       HpSeries **out_series);

/**
 * Reads a `day,value` or `date,value` CSV.
 */
HpStatus hp_series_load_csv(const char *path, HpUnit unit, HpSeries **out_series);

/**
 * One of the weekly historical series shipped with the library.
 */
HpStatus hp_series_bundled(HpChart chart, HpSeries **out_series);

/**
 * Mean-reverting noise on `t_start + k * dt`, floored at zero.
 */
HpStatus hp_pink_noise(HpUnit unit,
                       double mean,
                       double sd,
                       double correlation_time,
                       double t_start,
                       double t_end,
                       double dt,
                       uint64_t seed,
                       HpSeries **out_series);

/**
 * Linear interpolation at day `t`; [`HpStatus::OutOfRange`] outside the series.
 */
HpStatus hp_series_value_at(const HpSeries *series, double t, double *out_value);

/**
 * Number of knots; 0 for NULL.
 */
size_t hp_series_len(const HpSeries *series);

void hp_series_free(HpSeries *series);

/**
 * Integrates the model from day 0 to `t_end`.
 */
HpStatus hp_simulate(const HpParams *params,
                     const HpSeries *price,
                     const HpSeries *fees,
                     double t_end,
                     HpTrajectory **out_trajectory);

/**
 * Number of rows; 0 for NULL.
 */
size_t hp_trajectory_len(const HpTrajectory *trajectory);

HpStatus hp_trajectory_get(const HpTrajectory *trajectory, size_t index, HpRecord *out_record);

/**
 * Number of warnings recorded during integration (e.g. hash-rate floor).
 */
size_t hp_trajectory_warning_count(const HpTrajectory *trajectory);

HpStatus hp_trajectory_write_csv(const HpTrajectory *trajectory, const char *path);

void hp_trajectory_free(HpTrajectory *trajectory);

/**
 * Fits the adjustment time(s) of `base` to `historical` over days
 * `[0, window_end]`. `break_day` is used by [`HpMode::TwoRegime`] only.
 * `out_params` may be NULL; otherwise it receives `base` with the fitted
 * regimes.
 */
HpStatus hp_calibrate(const HpParams *base,
                      const HpSeries *price,
                      const HpSeries *fees,
                      const HpSeries *historical,
                      HpMode mode,
                      HpObjective objective,
                      double break_day,
                      double window_end,
                      HpFit *out_fit,
                      HpParams **out_params);

HpScenario hp_scenario_default(void);

/**
 * Splices the scenario onto the history after `scenario.t_start` and
 * integrates to `scenario.t_end`. `out_summary` may be NULL.
 */
HpStatus hp_project(const HpParams *params,
                    const HpSeries *price,
                    const HpSeries *fees,
                    const HpScenario *scenario,
                    HpTrajectory **out_trajectory,
                    HpProjectionSummary *out_summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HASHPEAK_H */

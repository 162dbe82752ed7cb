#pragma once

#include "stm/attention.hpp"
#include "stm/backend.hpp"
#include "stm/dataset.hpp"
#include "stm/prompting.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stm {

double mae(std::span<const double> truth, std::span<const double> pred);
double mse(std::span<const double> truth, std::span<const double> pred);

/// 100 * (base - treated) / base. Throws Error(undefined_improvement) for base <= 0.
double improvement_pct(double base, double treated);

/// Dataset loaded, resampled, split and normalized, with test windows in
/// model units (normalized when a normalizer is configured).
struct PreparedDataset {
    DatasetConfig config;
    TimeSeries series;
    Splits splits;
    Normalizer normalizer;
    std::vector<double> train_model_units;
    std::vector<ForecastWindow> test_windows;
    std::vector<double> test_targets;  // original units, aligned with test_windows
    std::size_t dropped_rows = 0;
    std::size_t duplicate_rows = 0;
};

PreparedDataset prepare_dataset(const DatasetConfig& config);

/// Same pipeline over an in-memory series; config.path is ignored.
PreparedDataset prepare_series(TimeSeries series, const DatasetConfig& config);

struct EvalConfig {
    PromptTemplate prompt_template = temperature_template();
    int k = 5;
    AttentionConfig attention;
    GenerationParams generation;
    PromptOptions prompt;
};

struct ForecastRecord {
    std::size_t origin_index = 0;
    double ground_truth = 0.0;
    std::optional<double> base_pred;  // original units
    std::optional<double> stm_pred;
    bool base_parse_failed = false;
    bool stm_parse_failed = false;
    bool base_backend_failed = false;
    bool stm_backend_failed = false;

    std::string pattern;
    std::optional<std::size_t> period;
    double attention_summary = 0.0;  // internal descriptor, model units
    double stm_compute_ms = 0.0;
    double base_latency_ms = 0.0;
    double stm_latency_ms = 0.0;

    bool scored() const noexcept { return base_pred.has_value() && stm_pred.has_value(); }
};

struct OverheadSummary {
    double stm_compute_ms_median = 0.0;
    double stm_compute_ms_p95 = 0.0;
    double backend_latency_ms_median = 0.0;
    std::optional<double> stm_compute_pct_of_latency;
};

struct EvalReport {
    int k = 5;
    double mae_base = 0.0;
    double mae_stm = 0.0;
    double mse_base = 0.0;
    double mse_stm = 0.0;
    std::optional<double> mae_improvement_pct;
    std::optional<double> mse_improvement_pct;
    std::size_t n_windows = 0;
    std::size_t n_scored = 0;
    std::size_t n_parse_failures = 0;
    std::size_t n_backend_failures = 0;
    OverheadSummary overhead;
    std::vector<ForecastRecord> records;  // sorted by origin_index
};

/**
 * Base-vs-STM comparison over every test window. The quantizer is fitted on
 * the training split only. Windows run concurrently up to the backend's
 * concurrency bound. Metrics use windows where both predictions parsed;
 * failures are counted, not scored.
 */
EvalReport run_eval(const PreparedDataset& data, Backend& backend, const EvalConfig& cfg);

EvalReport run_eval(const DatasetConfig& dataset, const BackendSpec& backend, const EvalConfig& cfg);

std::vector<std::pair<int, EvalReport>> run_ablation(const PreparedDataset& data, Backend& backend,
                                                     const EvalConfig& cfg, std::span<const int> ks);

struct OverheadProfile {
    std::size_t n_windows = 0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    double mean_ms = 0.0;
    double reference_latency_ms = 0.0;
    double pct_of_reference = 0.0;
};

double overhead_pct(double stm_ms, double reference_latency_ms);

/// Times encode + transitions + period + score + prompt rendering per window,
/// cycling through the test windows until n_windows samples are taken.
/// Needs n_windows >= 30.
OverheadProfile profile_overhead(const PreparedDataset& data, const EvalConfig& cfg, std::size_t n_windows,
                                 double reference_latency_ms);

/// Deterministic report document. Timings are excluded unless requested.
nlohmann::json report_json(const EvalReport& report, const nlohmann::json& config_echo, bool include_timings = false);
nlohmann::json metrics_json(const EvalReport& report);
nlohmann::json timings_json(const EvalReport& report);
nlohmann::json overhead_json(const OverheadProfile& profile);

/// origin_index, ground_truth, base_pred, stm_pred, base_abs_err, stm_abs_err
std::string records_csv(const EvalReport& report);

/// k, mae, mse (STM prompt metrics per alphabet size)
std::string ablation_csv(const std::vector<std::pair<int, EvalReport>>& runs);

}  // namespace stm

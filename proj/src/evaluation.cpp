#include "stm/evaluation.hpp"

#include "stm/error.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace stm {

namespace {

void check_metric_inputs(std::span<const double> truth, std::span<const double> pred) {
    if (truth.empty() || truth.size() != pred.size()) {
        throw Error(ErrorKind::metric, "metric inputs must be non-empty and equal in length");
    }
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!std::isfinite(truth[i]) || !std::isfinite(pred[i])) {
            throw Error(ErrorKind::metric, "metric inputs must be finite");
        }
    }
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Nearest-rank percentile.
double percentile_of(std::vector<double> v, double pct) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(v.size())));
    return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

std::string num(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

bool is_transport_failure(const Error& e) {
    return e.kind() == ErrorKind::backend || e.kind() == ErrorKind::timeout;
}

}  // namespace

double mae(std::span<const double> truth, std::span<const double> pred) {
    check_metric_inputs(truth, pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) acc += std::abs(truth[i] - pred[i]);
    return acc / static_cast<double>(truth.size());
}

double mse(std::span<const double> truth, std::span<const double> pred) {
    check_metric_inputs(truth, pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) acc += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    return acc / static_cast<double>(truth.size());
}

double improvement_pct(double base, double treated) {
    if (!(base > 0.0)) throw Error(ErrorKind::undefined_improvement, "improvement needs a positive base metric");
    return 100.0 * (base - treated) / base;
}

PreparedDataset prepare_series(TimeSeries series, const DatasetConfig& config) {
    series.validate();
    if (series.empty()) throw Error(ErrorKind::empty_data, "dataset is empty");
    PreparedDataset d;
    d.config = config;
    d.series = config.resample == Resample::hourly ? resample_hourly(series, config.aggregator) : std::move(series);
    d.splits = split(d.series);
    d.normalizer = fit_normalizer(d.splits.train, config.normalizer);
    d.train_model_units = d.normalizer.apply(d.splits.train.values);

    const auto test_model_units = d.normalizer.apply(d.splits.test.values);
    d.test_windows = make_windows(test_model_units, config.window_length, config.stride);
    d.test_targets.reserve(d.test_windows.size());
    for (const auto& w : d.test_windows) {
        d.test_targets.push_back(d.splits.test.values[w.origin_index + config.window_length]);
    }
    return d;
}

PreparedDataset prepare_dataset(const DatasetConfig& config) {
    CsvOptions csv = config.csv;
    auto loaded = load_csv(config.path, csv);
    auto d = prepare_series(std::move(loaded.series), config);
    d.dropped_rows = loaded.dropped_count;
    d.duplicate_rows = loaded.duplicate_count;
    return d;
}

EvalReport run_eval(const PreparedDataset& data, Backend& backend, const EvalConfig& cfg) {
    cfg.attention.validate();
    cfg.generation.validate();
    cfg.prompt_template.validate();
    if (data.test_windows.empty()) {
        throw Error(ErrorKind::insufficient_data,
                    "test split yields no forecast windows (length " + std::to_string(data.splits.test.size()) +
                        ", window " + std::to_string(data.config.window_length) + ")");
    }
    const Quantizer quantizer = fit_quantizer(data.train_model_units, cfg.k);

    const std::size_t n = data.test_windows.size();
    std::vector<ForecastRecord> records(n);

    auto evaluate_window = [&](std::size_t i) {
        const auto& w = data.test_windows[i];
        ForecastRecord& r = records[i];
        r.origin_index = w.origin_index;
        r.ground_truth = data.test_targets[i];

        const auto start = std::chrono::steady_clock::now();
        const StmAnalysis analysis = analyze(quantizer, w.history, cfg.attention);
        const std::string base_prompt = build_base_prompt(cfg.prompt_template, w.history, cfg.prompt);
        const std::string stm_prompt =
            build_stm_prompt(cfg.prompt_template, w.history, analysis.pattern, quantizer, cfg.prompt);
        r.stm_compute_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        r.pattern = analysis.pattern;
        r.period = analysis.periodicity.period;
        r.attention_summary = weighted_summary(w.history, analysis.attention);

        auto query = [&](const std::string& prompt, std::optional<double>& pred, bool& parse_failed,
                         bool& backend_failed, double& latency) {
            try {
                const Completion c = backend.complete({prompt, w.history}, cfg.generation);
                latency = c.latency_ms;
                if (c.parsed_value) {
                    pred = data.normalizer.invert(*c.parsed_value);
                } else {
                    parse_failed = true;
                }
            } catch (const Error& e) {
                if (!is_transport_failure(e)) throw;
                backend_failed = true;
            }
        };
        query(base_prompt, r.base_pred, r.base_parse_failed, r.base_backend_failed, r.base_latency_ms);
        query(stm_prompt, r.stm_pred, r.stm_parse_failed, r.stm_backend_failed, r.stm_latency_ms);
    };

    const auto workers = static_cast<std::size_t>(std::clamp(backend.max_concurrency(), 1, 64));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) evaluate_window(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(workers, n); ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        evaluate_window(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = n;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::sort(records.begin(), records.end(),
              [](const ForecastRecord& a, const ForecastRecord& b) { return a.origin_index < b.origin_index; });

    EvalReport report;
    report.k = cfg.k;
    report.n_windows = n;
    std::vector<double> truth, base, treated, compute_ms, latency_ms;
    for (const auto& r : records) {
        if (r.base_backend_failed || r.stm_backend_failed) ++report.n_backend_failures;
        if (r.base_parse_failed || r.stm_parse_failed) ++report.n_parse_failures;
        compute_ms.push_back(r.stm_compute_ms);
        if (!r.stm_backend_failed) latency_ms.push_back(r.stm_latency_ms);
        if (!r.scored()) continue;
        truth.push_back(r.ground_truth);
        base.push_back(*r.base_pred);
        treated.push_back(*r.stm_pred);
    }
    report.n_scored = truth.size();
    if (report.n_backend_failures == n) throw Error(ErrorKind::backend, "backend failed on every window");
    if (truth.empty()) throw Error(ErrorKind::eval, "no window produced two parseable predictions");

    report.mae_base = mae(truth, base);
    report.mae_stm = mae(truth, treated);
    report.mse_base = mse(truth, base);
    report.mse_stm = mse(truth, treated);
    if (report.mae_base > 0.0) report.mae_improvement_pct = improvement_pct(report.mae_base, report.mae_stm);
    if (report.mse_base > 0.0) report.mse_improvement_pct = improvement_pct(report.mse_base, report.mse_stm);

    report.overhead.stm_compute_ms_median = median_of(compute_ms);
    report.overhead.stm_compute_ms_p95 = percentile_of(compute_ms, 95.0);
    report.overhead.backend_latency_ms_median = median_of(latency_ms);
    if (report.overhead.backend_latency_ms_median > 0.0) {
        report.overhead.stm_compute_pct_of_latency =
            overhead_pct(report.overhead.stm_compute_ms_median, report.overhead.backend_latency_ms_median);
    }
    report.records = std::move(records);
    return report;
}

EvalReport run_eval(const DatasetConfig& dataset, const BackendSpec& backend, const EvalConfig& cfg) {
    const auto data = prepare_dataset(dataset);
    const auto b = make_backend(backend);
    return run_eval(data, *b, cfg);
}

std::vector<std::pair<int, EvalReport>> run_ablation(const PreparedDataset& data, Backend& backend,
                                                     const EvalConfig& cfg, std::span<const int> ks) {
    if (ks.empty()) throw Error(ErrorKind::config, "ablation needs at least one alphabet size");
    for (int k : ks) {
        if (k < Quantizer::kMinLevels || k > Quantizer::kMaxLevels) {
            throw Error(ErrorKind::config, "ablation alphabet sizes must lie in [2, 26]");
        }
    }
    std::vector<std::pair<int, EvalReport>> out;
    for (int k : ks) {
        EvalConfig run = cfg;
        run.k = k;
        out.emplace_back(k, run_eval(data, backend, run));
    }
    return out;
}

double overhead_pct(double stm_ms, double reference_latency_ms) {
    if (!(reference_latency_ms > 0.0)) throw Error(ErrorKind::profiling, "reference latency must be positive");
    return 100.0 * stm_ms / reference_latency_ms;
}

OverheadProfile profile_overhead(const PreparedDataset& data, const EvalConfig& cfg, std::size_t n_windows,
                                 double reference_latency_ms) {
    if (n_windows < 30) throw Error(ErrorKind::profiling, "profiling needs at least 30 windows");
    if (data.test_windows.empty()) throw Error(ErrorKind::profiling, "test split yields no windows to profile");
    if (!(reference_latency_ms > 0.0)) throw Error(ErrorKind::profiling, "reference latency must be positive");
    cfg.prompt_template.validate();
    const Quantizer quantizer = fit_quantizer(data.train_model_units, cfg.k);

    std::vector<double> samples;
    samples.reserve(n_windows);
    std::size_t sink = 0;
    for (std::size_t i = 0; i < n_windows; ++i) {
        const auto& w = data.test_windows[i % data.test_windows.size()];
        const auto start = std::chrono::steady_clock::now();
        const StmAnalysis analysis = analyze(quantizer, w.history, cfg.attention);
        const auto bundle = build_stm_prompt(cfg.prompt_template, w.history, analysis.pattern, quantizer, cfg.prompt);
        samples.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
        sink += bundle.size();
    }
    if (sink == 0) throw Error(ErrorKind::profiling, "profiling rendered no prompts");

    OverheadProfile p;
    p.n_windows = n_windows;
    p.median_ms = median_of(samples);
    p.p95_ms = percentile_of(samples, 95.0);
    p.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    p.reference_latency_ms = reference_latency_ms;
    p.pct_of_reference = overhead_pct(p.median_ms, reference_latency_ms);
    return p;
}

nlohmann::json metrics_json(const EvalReport& r) {
    return {
        {"mae_base", r.mae_base},
        {"mae_stm", r.mae_stm},
        {"mse_base", r.mse_base},
        {"mse_stm", r.mse_stm},
        {"mae_improvement_pct", optional_json(r.mae_improvement_pct)},
        {"mse_improvement_pct", optional_json(r.mse_improvement_pct)},
    };
}

nlohmann::json timings_json(const EvalReport& r) {
    return {
        {"stm_compute_ms_median", r.overhead.stm_compute_ms_median},
        {"stm_compute_ms_p95", r.overhead.stm_compute_ms_p95},
        {"backend_latency_ms_median", r.overhead.backend_latency_ms_median},
        {"stm_compute_pct_of_latency", optional_json(r.overhead.stm_compute_pct_of_latency)},
    };
}

nlohmann::json report_json(const EvalReport& r, const nlohmann::json& config_echo, bool include_timings) {
    nlohmann::json j;
    j["config_echo"] = config_echo;
    j["k"] = r.k;
    j["metrics"] = metrics_json(r);
    j["counts"] = {
        {"n_windows", r.n_windows},
        {"n_scored", r.n_scored},
        {"n_parse_failures", r.n_parse_failures},
        {"n_backend_failures", r.n_backend_failures},
    };
    j["overhead"] = include_timings ? timings_json(r) : nlohmann::json();
    return j;
}

nlohmann::json overhead_json(const OverheadProfile& p) {
    return {
        {"n_windows", p.n_windows},
        {"stm_compute_ms_median", p.median_ms},
        {"stm_compute_ms_p95", p.p95_ms},
        {"stm_compute_ms_mean", p.mean_ms},
        {"reference_latency_ms", p.reference_latency_ms},
        {"stm_compute_pct_of_latency", p.pct_of_reference},
    };
}

std::string records_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "origin_index,ground_truth,base_pred,stm_pred,base_abs_err,stm_abs_err\n";
    for (const auto& r : report.records) {
        std::optional<double> base_err, stm_err;
        if (r.base_pred) base_err = std::abs(*r.base_pred - r.ground_truth);
        if (r.stm_pred) stm_err = std::abs(*r.stm_pred - r.ground_truth);
        out << r.origin_index << ',' << num(r.ground_truth) << ',' << num(r.base_pred) << ',' << num(r.stm_pred)
            << ',' << num(base_err) << ',' << num(stm_err) << '\n';
    }
    return out.str();
}

std::string ablation_csv(const std::vector<std::pair<int, EvalReport>>& runs) {
    std::ostringstream out;
    out << "k,mae,mse\n";
    for (const auto& [k, r] : runs) out << k << ',' << num(r.mae_stm) << ',' << num(r.mse_stm) << '\n';
    return out.str();
}

}  // namespace stm

#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stm {

struct TimeSeries {
    std::vector<double> timestamps;  // epoch seconds, strictly increasing
    std::vector<double> values;
    std::string unit;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }

    /// Throws Error(consistency) when lengths differ, timestamps are not
    /// strictly increasing, or a value is non-finite.
    void validate() const;
};

struct CsvOptions {
    std::string timestamp_column = "timestamp";
    std::string value_column = "value";
    /// strftime-style pattern read as UTC, or "epoch" for numeric seconds.
    std::string timestamp_format = "epoch";
    char delimiter = ',';
    std::string unit;
};

struct LoadResult {
    TimeSeries series;
    std::size_t dropped_count = 0;    // unparseable value or timestamp
    std::size_t duplicate_count = 0;  // repeated timestamps, first row kept
};

LoadResult load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Parse one timestamp cell. Throws Error(load) when it does not match.
double parse_timestamp(const std::string& text, const std::string& format);

enum class Aggregator { mean, last };

/// One point per non-empty hour bucket, stamped with the bucket start.
TimeSeries resample_hourly(const TimeSeries& series, Aggregator aggregator = Aggregator::mean);

struct SplitFractions {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

struct Splits {
    TimeSeries train;
    TimeSeries validation;
    TimeSeries test;
    std::size_t validation_offset = 0;
    std::size_t test_offset = 0;
};

/// Ordered partition at floor(N * train) and floor(N * (train + validation)).
/// The remainder goes to test. Needs N >= 10.
Splits split(const TimeSeries& series, const SplitFractions& fractions = {});

enum class NormalizerKind { none, min_max };

class Normalizer {
public:
    Normalizer() = default;
    Normalizer(NormalizerKind kind, double lo, double hi);

    NormalizerKind kind() const noexcept { return kind_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    double apply(double v) const noexcept;
    double invert(double v) const noexcept;
    std::vector<double> apply(std::span<const double> values) const;

private:
    NormalizerKind kind_ = NormalizerKind::none;
    double lo_ = 0.0;
    double hi_ = 1.0;
};

Normalizer fit_normalizer(const TimeSeries& train, NormalizerKind kind);

struct ForecastWindow {
    std::vector<double> history;
    double target = 0.0;
    std::size_t origin_index = 0;
};

/// All windows whose target stays inside `values`: floor((N - L - 1) / stride) + 1
/// of them, or none when N <= L.
std::vector<ForecastWindow> make_windows(std::span<const double> values, std::size_t length,
                                         std::size_t stride = 1);

enum class Resample { none, hourly };

struct DatasetConfig {
    std::filesystem::path path;
    CsvOptions csv;
    Resample resample = Resample::none;
    Aggregator aggregator = Aggregator::mean;
    NormalizerKind normalizer = NormalizerKind::none;
    std::size_t window_length = 24;
    std::size_t stride = 1;
    std::string task = "temperature";
};

/// Reads the JSON dataset config; a relative `path` resolves against the
/// config file's directory.
DatasetConfig load_dataset_config(const std::filesystem::path& config_path);

/// Same schema from an already-parsed object; relative paths join base_dir.
DatasetConfig dataset_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json to_json(const DatasetConfig& cfg);

/// "timestamp,value" rows with shortest round-trip number formatting.
void write_csv(std::ostream& out, const TimeSeries& series);
void save_csv(const std::filesystem::path& path, const TimeSeries& series);

std::string to_string(Aggregator a);
std::string to_string(NormalizerKind k);
std::string to_string(Resample r);
Aggregator parse_aggregator(const std::string& s);
NormalizerKind parse_normalizer_kind(const std::string& s);
Resample parse_resample(const std::string& s);

}  // namespace stm

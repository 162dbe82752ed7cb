#include "stm/dataset.hpp"

#include "stm/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <locale>
#include <numeric>
#include <sstream>

namespace stm {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// RFC 4180-ish: quoted fields may contain the delimiter and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(trim(field));
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const std::filesystem::path& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorKind::load, "column '" + name + "' not found in " + path.string());
    }
    return static_cast<std::size_t>(it - header.begin());
}

TimeSeries take(const TimeSeries& s, std::size_t begin, std::size_t end) {
    TimeSeries out;
    out.unit = s.unit;
    out.timestamps.assign(s.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                          s.timestamps.begin() + static_cast<std::ptrdiff_t>(end));
    out.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(begin),
                      s.values.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

}  // namespace

void TimeSeries::validate() const {
    if (timestamps.size() != values.size()) {
        throw Error(ErrorKind::consistency, "timestamps and values differ in length");
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (!(timestamps[i] > timestamps[i - 1])) {
            throw Error(ErrorKind::consistency, "timestamps must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::consistency, "series contains a non-finite value");
    }
}

double parse_timestamp(const std::string& text, const std::string& format) {
    if (format == "epoch") {
        double v = 0.0;
        if (!parse_double(text, v)) throw Error(ErrorKind::load, "bad epoch timestamp '" + text + "'");
        return v;
    }
    std::tm tm{};
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    in >> std::get_time(&tm, format.c_str());
    if (in.fail()) throw Error(ErrorKind::load, "timestamp '" + text + "' does not match '" + format + "'");

    // Optional fractional seconds and a trailing UTC designator.
    double fraction = 0.0;
    std::string rest;
    std::getline(in, rest);
    rest = trim(rest);
    if (!rest.empty() && rest.front() == '.') {
        std::size_t digits = 1;
        while (digits < rest.size() && std::isdigit(static_cast<unsigned char>(rest[digits]))) ++digits;
        if (digits > 1) parse_double("0" + rest.substr(0, digits), fraction);
        rest = trim(rest.substr(digits));
    }
    if (!rest.empty() && rest != "Z" && rest != "UTC") {
        throw Error(ErrorKind::load, "trailing characters in timestamp '" + text + "'");
    }

    using namespace std::chrono;
    const year_month_day ymd{year{tm.tm_year + 1900}, month{static_cast<unsigned>(tm.tm_mon + 1)},
                             day{static_cast<unsigned>(tm.tm_mday)}};
    if (!ymd.ok()) throw Error(ErrorKind::load, "invalid calendar date in '" + text + "'");
    const auto day_start = sys_days{ymd}.time_since_epoch();
    const auto secs = duration_cast<seconds>(day_start).count() + tm.tm_hour * 3600LL + tm.tm_min * 60LL + tm.tm_sec;
    return static_cast<double>(secs) + fraction;
}

LoadResult load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::load, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::empty_data, path.string() + " has no header row");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto header = split_csv_line(line, options.delimiter);
    const auto ts_col = find_column(header, options.timestamp_column, path);
    const auto value_col = find_column(header, options.value_column, path);

    struct Row {
        double ts;
        double value;
    };
    std::vector<Row> rows;
    LoadResult result;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line, options.delimiter);
        if (fields.size() <= std::max(ts_col, value_col)) {
            ++result.dropped_count;
            continue;
        }
        double value = 0.0;
        if (!parse_double(fields[value_col], value)) {
            ++result.dropped_count;
            continue;
        }
        try {
            rows.push_back({parse_timestamp(fields[ts_col], options.timestamp_format), value});
        } catch (const Error&) {
            ++result.dropped_count;
        }
    }
    if (rows.empty()) throw Error(ErrorKind::empty_data, "no usable rows in " + path.string());

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.ts < b.ts; });
    auto& s = result.series;
    s.unit = options.unit;
    s.timestamps.reserve(rows.size());
    s.values.reserve(rows.size());
    for (const auto& row : rows) {
        if (!s.timestamps.empty() && s.timestamps.back() == row.ts) {
            ++result.duplicate_count;
            continue;
        }
        s.timestamps.push_back(row.ts);
        s.values.push_back(row.value);
    }
    return result;
}

TimeSeries resample_hourly(const TimeSeries& series, Aggregator aggregator) {
    if (series.empty()) throw Error(ErrorKind::empty_data, "cannot resample an empty series");
    TimeSeries out;
    out.unit = series.unit;

    double bucket = 0.0;
    double sum = 0.0;
    std::size_t count = 0;
    double last = 0.0;
    auto flush = [&] {
        if (count == 0) return;
        out.timestamps.push_back(bucket);
        out.values.push_back(aggregator == Aggregator::mean ? sum / static_cast<double>(count) : last);
    };
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double b = std::floor(series.timestamps[i] / 3600.0) * 3600.0;
        if (count > 0 && b != bucket) {
            flush();
            sum = 0.0;
            count = 0;
        }
        bucket = b;
        sum += series.values[i];
        last = series.values[i];
        ++count;
    }
    flush();
    return out;
}

Splits split(const TimeSeries& series, const SplitFractions& f) {
    if (f.train < 0 || f.validation < 0 || f.test < 0 ||
        std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) {
        throw Error(ErrorKind::split, "split fractions must be non-negative and sum to 1");
    }
    const std::size_t n = series.size();
    if (n < 10) throw Error(ErrorKind::split, "series too short to split (need >= 10 points)");

    // The epsilon absorbs representation error such as 0.7 + 0.15 = 0.8499...
    const auto boundary = [n](double fraction) {
        return std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9)));
    };
    const std::size_t b1 = boundary(f.train);
    const std::size_t b2 = std::max(b1, boundary(f.train + f.validation));

    Splits s;
    s.train = take(series, 0, b1);
    s.validation = take(series, b1, b2);
    s.test = take(series, b2, n);
    s.validation_offset = b1;
    s.test_offset = b2;
    return s;
}

Normalizer::Normalizer(NormalizerKind kind, double lo, double hi) : kind_(kind), lo_(lo), hi_(hi) {
    if (kind == NormalizerKind::min_max && !(hi > lo)) {
        throw Error(ErrorKind::fit, "min-max normalizer needs hi > lo");
    }
}

double Normalizer::apply(double v) const noexcept {
    if (kind_ == NormalizerKind::none) return v;
    return (v - lo_) / (hi_ - lo_);
}

double Normalizer::invert(double v) const noexcept {
    if (kind_ == NormalizerKind::none) return v;
    return v * (hi_ - lo_) + lo_;
}

std::vector<double> Normalizer::apply(std::span<const double> values) const {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(apply(v));
    return out;
}

Normalizer fit_normalizer(const TimeSeries& train, NormalizerKind kind) {
    if (kind == NormalizerKind::none) return {};
    if (train.empty()) throw Error(ErrorKind::fit, "cannot fit normalizer on an empty split");
    const auto [lo, hi] = std::minmax_element(train.values.begin(), train.values.end());
    if (!(*hi > *lo)) throw Error(ErrorKind::fit, "training split is constant; min-max is undefined");
    return Normalizer(kind, *lo, *hi);
}

std::vector<ForecastWindow> make_windows(std::span<const double> values, std::size_t length,
                                         std::size_t stride) {
    if (length == 0) throw Error(ErrorKind::config, "window length must be positive");
    if (stride == 0) throw Error(ErrorKind::config, "window stride must be positive");
    std::vector<ForecastWindow> out;
    if (values.size() < length + 1) return out;
    out.reserve((values.size() - length - 1) / stride + 1);
    for (std::size_t origin = 0; origin + length < values.size(); origin += stride) {
        ForecastWindow w;
        w.history.assign(values.begin() + static_cast<std::ptrdiff_t>(origin),
                         values.begin() + static_cast<std::ptrdiff_t>(origin + length));
        w.target = values[origin + length];
        w.origin_index = origin;
        out.push_back(std::move(w));
    }
    return out;
}

std::string to_string(Aggregator a) { return a == Aggregator::mean ? "mean" : "last"; }
std::string to_string(NormalizerKind k) { return k == NormalizerKind::none ? "none" : "min-max"; }
std::string to_string(Resample r) { return r == Resample::none ? "none" : "hourly"; }

Aggregator parse_aggregator(const std::string& s) {
    if (s == "mean") return Aggregator::mean;
    if (s == "last") return Aggregator::last;
    throw Error(ErrorKind::config, "unknown aggregator '" + s + "' (mean|last)");
}

NormalizerKind parse_normalizer_kind(const std::string& s) {
    if (s == "none") return NormalizerKind::none;
    if (s == "min-max" || s == "minmax") return NormalizerKind::min_max;
    throw Error(ErrorKind::config, "unknown normalizer '" + s + "' (none|min-max)");
}

Resample parse_resample(const std::string& s) {
    if (s == "none") return Resample::none;
    if (s == "hourly") return Resample::hourly;
    throw Error(ErrorKind::config, "unknown resample mode '" + s + "' (none|hourly)");
}

DatasetConfig dataset_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    DatasetConfig cfg;
    try {
        cfg.path = j.at("path").get<std::string>();
        if (cfg.path.is_relative() && !base_dir.empty()) cfg.path = base_dir / cfg.path;
        cfg.csv.timestamp_column = j.value("timestamp_column", cfg.csv.timestamp_column);
        cfg.csv.value_column = j.value("value_column", cfg.csv.value_column);
        cfg.csv.timestamp_format = j.value("timestamp_format", cfg.csv.timestamp_format);
        cfg.csv.unit = j.value("unit", cfg.csv.unit);
        const auto delimiter = j.value("delimiter", std::string(","));
        if (delimiter.size() != 1) throw Error(ErrorKind::config, "delimiter must be a single character");
        cfg.csv.delimiter = delimiter[0];
        cfg.resample = parse_resample(j.value("resample", std::string("none")));
        cfg.aggregator = parse_aggregator(j.value("aggregator", std::string("mean")));
        cfg.normalizer = parse_normalizer_kind(j.value("normalizer", std::string("none")));
        cfg.window_length = j.value("window_length", cfg.window_length);
        cfg.stride = j.value("stride", cfg.stride);
        cfg.task = j.value("task", cfg.task);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, std::string("dataset config: ") + e.what());
    }
    if (cfg.window_length == 0 || cfg.stride == 0) {
        throw Error(ErrorKind::config, "window_length and stride must be positive");
    }
    return cfg;
}

DatasetConfig load_dataset_config(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw Error(ErrorKind::config, "cannot open dataset config " + config_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, "dataset config " + config_path.string() + ": " + e.what());
    }
    return dataset_config_from_json(j, config_path.parent_path());
}

nlohmann::json to_json(const DatasetConfig& cfg) {
    return {
        {"path", cfg.path.generic_string()},
        {"timestamp_column", cfg.csv.timestamp_column},
        {"value_column", cfg.csv.value_column},
        {"timestamp_format", cfg.csv.timestamp_format},
        {"delimiter", std::string(1, cfg.csv.delimiter)},
        {"unit", cfg.csv.unit},
        {"resample", to_string(cfg.resample)},
        {"aggregator", to_string(cfg.aggregator)},
        {"normalizer", to_string(cfg.normalizer)},
        {"window_length", cfg.window_length},
        {"stride", cfg.stride},
        {"task", cfg.task},
    };
}

void write_csv(std::ostream& out, const TimeSeries& series) {
    out << "timestamp,value\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        auto res = std::to_chars(buf, buf + sizeof(buf), series.timestamps[i]);
        out.write(buf, res.ptr - buf);
        out << ',';
        res = std::to_chars(buf, buf + sizeof(buf), series.values[i]);
        out.write(buf, res.ptr - buf);
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::load, "cannot write " + path.string());
    write_csv(out, series);
}

}  // namespace stm

#include "stm/dataset.hpp"
#include "stm/error.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace stm;
using stm::testing::TempDir;

namespace {

TimeSeries ramp(std::size_t n) {
    TimeSeries s;
    for (std::size_t i = 0; i < n; ++i) {
        s.timestamps.push_back(3600.0 * static_cast<double>(i));
        s.values.push_back(static_cast<double>(i));
    }
    return s;
}

template <class F>
ErrorKind kind_of(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected stm::Error");
    return ErrorKind::config;
}

}  // namespace

TEST_CASE("load a small csv") {
    TempDir dir;
    const auto p = dir.write("a.csv", "timestamp,value\n0,10.5\n3600,11.0\n7200,11.5\n");
    const auto r = load_csv(p);
    CHECK(r.series.values == std::vector<double>{10.5, 11.0, 11.5});
    CHECK(r.series.timestamps == std::vector<double>{0, 3600, 7200});
    CHECK(r.dropped_count == 0);
    CHECK(r.duplicate_count == 0);
}

TEST_CASE("malformed rows are dropped and counted") {
    TempDir dir;
    const auto p = dir.write("a.csv", "timestamp,value\n0,10.5\n3600,abc\n7200,11.5\n");
    const auto r = load_csv(p);
    CHECK(r.series.values == std::vector<double>{10.5, 11.5});
    CHECK(r.dropped_count == 1);
}

TEST_CASE("rows are sorted and duplicate timestamps keep the first") {
    TempDir dir;
    const auto p = dir.write("a.csv", "\xEF\xBB\xBFvalue;timestamp\n3;20\n1;0\n2;10\n9;10\n\n");
    CsvOptions opt;
    opt.delimiter = ';';
    const auto r = load_csv(p, opt);
    CHECK(r.series.timestamps == std::vector<double>{0, 10, 20});
    CHECK(r.series.values == std::vector<double>{1, 2, 3});
    CHECK(r.duplicate_count == 1);
    CHECK_NOTHROW(r.series.validate());
}

TEST_CASE("load failures") {
    TempDir dir;
    CHECK(kind_of([&] { load_csv(dir.path() / "missing.csv"); }) == ErrorKind::load);
    const auto no_col = dir.write("b.csv", "time,value\n0,1\n");
    CHECK(kind_of([&] { load_csv(no_col); }) == ErrorKind::load);
    const auto all_bad = dir.write("c.csv", "timestamp,value\n0,x\n");
    CHECK(kind_of([&] { load_csv(all_bad); }) == ErrorKind::empty_data);
    const auto empty = dir.write("d.csv", "");
    CHECK(kind_of([&] { load_csv(empty); }) == ErrorKind::empty_data);
}

TEST_CASE("quoted fields and calendar timestamps") {
    TempDir dir;
    const auto p = dir.write("a.csv",
                             "date,\"temp, C\"\n"
                             "2020-01-01 00:00:00,\"1.5\"\n"
                             "2020-01-01 01:00:00.5Z,2.5\n"
                             "not a date,3\n");
    CsvOptions opt;
    opt.timestamp_column = "date";
    opt.value_column = "temp, C";
    opt.timestamp_format = "%Y-%m-%d %H:%M:%S";
    const auto r = load_csv(p, opt);
    CHECK(r.series.timestamps == std::vector<double>{1577836800.0, 1577840400.5});
    CHECK(r.series.values == std::vector<double>{1.5, 2.5});
    CHECK(r.dropped_count == 1);
}

TEST_CASE("timestamp parsing") {
    CHECK(parse_timestamp("1700000000", "epoch") == 1700000000.0);
    CHECK(parse_timestamp("1970-01-02T00:00:00", "%Y-%m-%dT%H:%M:%S") == 86400.0);
    CHECK(parse_timestamp("2000-03-01 12:30", "%Y-%m-%d %H:%M") == 951913800.0);
    CHECK_THROWS_AS(parse_timestamp("2021-02-30 00:00", "%Y-%m-%d %H:%M"), Error);
    CHECK_THROWS_AS(parse_timestamp("2021-01-01 00:00 junk", "%Y-%m-%d %H:%M"), Error);
    CHECK_THROWS_AS(parse_timestamp("abc", "epoch"), Error);
}

TEST_CASE("hourly resampling") {
    TimeSeries s;
    s.timestamps = {0, 600, 1200, 1800, 2400, 3000, 10800};
    s.values = {1, 2, 3, 4, 5, 6, 9};
    const auto mean = resample_hourly(s);
    CHECK(mean.timestamps == std::vector<double>{0, 10800});
    CHECK(mean.values == std::vector<double>{3.5, 9});
    const auto last = resample_hourly(s, Aggregator::last);
    CHECK(last.values == std::vector<double>{6, 9});
    CHECK_THROWS_AS(resample_hourly(TimeSeries{}), Error);
}

TEST_CASE("split sizes") {
    auto sizes = [](std::size_t n) {
        const auto sp = split(ramp(n));
        return std::vector<std::size_t>{sp.train.size(), sp.validation.size(), sp.test.size()};
    };
    CHECK(sizes(10) == std::vector<std::size_t>{7, 1, 2});
    CHECK(sizes(100) == std::vector<std::size_t>{70, 15, 15});
    CHECK(sizes(101) == std::vector<std::size_t>{70, 15, 16});
    CHECK(kind_of([] { split(ramp(9)); }) == ErrorKind::split);
    CHECK(kind_of([] { split(ramp(20), SplitFractions{0.5, 0.4, 0.4}); }) == ErrorKind::split);
}

TEST_CASE("property: splits are an ordered partition") {
    for (std::size_t n = 10; n <= 400; n += 7) {
        const auto s = ramp(n);
        const auto sp = split(s);
        std::vector<double> joined = sp.train.values;
        joined.insert(joined.end(), sp.validation.values.begin(), sp.validation.values.end());
        joined.insert(joined.end(), sp.test.values.begin(), sp.test.values.end());
        CHECK(joined == s.values);
        CHECK(sp.train.size() == static_cast<std::size_t>(std::floor(0.7 * n + 1e-9)));
        CHECK(sp.validation_offset == sp.train.size());
        CHECK(sp.test_offset == sp.train.size() + sp.validation.size());
    }
}

TEST_CASE("min-max normalizer") {
    TimeSeries train;
    train.timestamps = {0, 1, 2};
    train.values = {0, 100, 200};
    const auto n = fit_normalizer(train, NormalizerKind::min_max);
    CHECK(n.apply(50.0) == doctest::Approx(0.25));
    CHECK(n.invert(0.25) == doctest::Approx(50.0));
    const auto id = fit_normalizer(train, NormalizerKind::none);
    CHECK(id.apply(42.0) == 42.0);
    CHECK(id.invert(42.0) == 42.0);

    TimeSeries flat;
    flat.timestamps = {0, 1};
    flat.values = {5, 5};
    CHECK(kind_of([&] { fit_normalizer(flat, NormalizerKind::min_max); }) == ErrorKind::fit);
    CHECK_NOTHROW(fit_normalizer(flat, NormalizerKind::none));
    CHECK(kind_of([] { Normalizer(NormalizerKind::min_max, 1.0, 1.0); }) == ErrorKind::fit);
}

TEST_CASE("property: normalizer round-trips") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    TimeSeries train;
    for (int i = 0; i < 1000; ++i) {
        train.timestamps.push_back(i);
        train.values.push_back(u(rng));
    }
    const auto n = fit_normalizer(train, NormalizerKind::min_max);
    for (double v : train.values) {
        const double z = n.apply(v);
        CHECK(z >= 0.0);
        CHECK(z <= 1.0);
        CHECK(std::abs(n.invert(z) - v) <= 1e-9 * std::max(1.0, std::abs(v)));
    }
}

TEST_CASE("forecast windows") {
    std::vector<double> v(30);
    std::iota(v.begin(), v.end(), 0.0);
    const auto w = make_windows(v, 24);
    REQUIRE(w.size() == 6);
    CHECK(w[0].history.front() == 0.0);
    CHECK(w[0].target == 24.0);
    CHECK(w[5].origin_index == 5);
    CHECK(w[5].target == 29.0);
    CHECK(make_windows(std::span(v).first(25), 24).size() == 1);
    CHECK(make_windows(std::span(v).first(24), 24).empty());
    CHECK(make_windows(v, 24, 4).size() == 2);
    CHECK_THROWS_AS(make_windows(v, 0), Error);
    CHECK_THROWS_AS(make_windows(v, 4, 0), Error);
}

TEST_CASE("property: window count formula and contents") {
    std::vector<double> v(120);
    std::iota(v.begin(), v.end(), 0.0);
    for (std::size_t n = 1; n <= v.size(); n += 5) {
        for (std::size_t len : {1, 3, 24}) {
            for (std::size_t stride : {1, 2, 5}) {
                const auto w = make_windows(std::span(v).first(n), len, stride);
                const std::size_t expected = n <= len ? 0 : (n - len - 1) / stride + 1;
                REQUIRE(w.size() == expected);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    CHECK(w[i].origin_index == i * stride);
                    CHECK(w[i].history.size() == len);
                    CHECK(w[i].target == v[i * stride + len]);
                }
            }
        }
    }
}

TEST_CASE("dataset config json") {
    TempDir dir;
    const auto cfg_path = dir.write("ds.json", R"({
        "path": "data/series.csv",
        "timestamp_column": "ts",
        "value_column": "y",
        "timestamp_format": "%Y-%m-%d %H:%M:%S",
        "delimiter": ";",
        "unit": "C",
        "resample": "hourly",
        "aggregator": "last",
        "normalizer": "min-max",
        "window_length": 12,
        "stride": 2,
        "task": "traffic"
    })");
    const auto cfg = load_dataset_config(cfg_path);
    CHECK(cfg.path == dir.path() / "data/series.csv");
    CHECK(cfg.csv.timestamp_column == "ts");
    CHECK(cfg.csv.value_column == "y");
    CHECK(cfg.csv.delimiter == ';');
    CHECK(cfg.csv.unit == "C");
    CHECK(cfg.resample == Resample::hourly);
    CHECK(cfg.aggregator == Aggregator::last);
    CHECK(cfg.normalizer == NormalizerKind::min_max);
    CHECK(cfg.window_length == 12);
    CHECK(cfg.stride == 2);
    CHECK(cfg.task == "traffic");

    const auto again = dataset_config_from_json(to_json(cfg), "/elsewhere");
    CHECK(again.path == cfg.path);
    CHECK(again.normalizer == cfg.normalizer);

    CHECK(kind_of([&] { load_dataset_config(dir.write("bad.json", R"({"path": "x", "stride": 0})")); }) ==
          ErrorKind::config);
    CHECK(kind_of([&] { load_dataset_config(dir.write("bad2.json", R"({"path": "x", "resample": "daily"})")); }) ==
          ErrorKind::config);
    CHECK(kind_of([&] { load_dataset_config(dir.write("bad3.json", "{")); }) == ErrorKind::config);
    CHECK(kind_of([&] { load_dataset_config(dir.path() / "none.json"); }) == ErrorKind::config);
}

TEST_CASE("csv round trip") {
    TimeSeries s;
    s.timestamps = {0, 3600.5};
    s.values = {0.1, -2.25};
    std::ostringstream out;
    write_csv(out, s);
    CHECK(out.str() == "timestamp,value\n0,0.1\n3600.5,-2.25\n");
    TempDir dir;
    save_csv(dir.path() / "s.csv", s);
    const auto back = load_csv(dir.path() / "s.csv");
    CHECK(back.series.values == s.values);
    CHECK(back.series.timestamps == s.timestamps);
}

TEST_CASE("series validation") {
    TimeSeries s;
    s.timestamps = {0, 0};
    s.values = {1, 2};
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::consistency);
    s.timestamps = {0};
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::consistency);
    s.timestamps = {0, 1};
    s.values = {1, NAN};
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::consistency);
}

#include "stm/error.hpp"
#include "stm/prompting.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

using namespace stm;
using stm::testing::TempDir;

namespace {

const std::string kFiveLegend = "A=very low, B=low, C=medium, D=high, E=very high";

}  // namespace

TEST_CASE("render sequence") {
    CHECK(render_sequence(std::vector<double>{12.8471, 13.0}) == "12.85, 13.00");
    CHECK(render_sequence(std::vector<double>{}).empty());
    CHECK(render_sequence(std::vector<double>{0.123456}, 4) == "0.1235");
    CHECK(render_sequence(std::vector<double>{0.125, -0.125, 2.5}, 2) == "0.13, -0.13, 2.50");
    CHECK(render_sequence(std::vector<double>{2.5, -0.5}, 0) == "3, -1");
    CHECK(render_sequence(std::vector<double>{-0.001}) == "0.00");
    CHECK(render_sequence(std::vector<double>{1e6}, 1) == "1000000.0");
    CHECK_THROWS_AS(render_sequence(std::vector<double>{NAN}), Error);
    CHECK_THROWS_AS(render_sequence(std::vector<double>{1.0}, -1), Error);
}

TEST_CASE("property: rendering agrees with printf away from exact ties") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    char buf[64];
    for (int i = 0; i < 5000; ++i) {
        const double v = u(rng);
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        std::string expected = buf;
        if (expected == "-0.000") expected = "0.000";
        CHECK(render_sequence(std::vector<double>{v}, 3) == expected);
    }
}

TEST_CASE("temperature base prompt is verbatim") {
    CHECK(build_base_prompt(temperature_template(), std::vector<double>{10.0, 11.0}) ==
          "The temperature readings for the past 24 hours are: 10.00, 11.00, What is the next temperature reading?");
}

TEST_CASE("traffic base prompt is verbatim") {
    CHECK(build_base_prompt(traffic_template(), std::vector<double>{0.25}) ==
          "Given the following sequence of normalized inference traffic values: 0.25, Predict the next traffic "
          "value based on pattern and trends.");
}

TEST_CASE("custom template") {
    const auto t = custom_template("X {sequence_str} Y");
    CHECK(build_base_prompt(t, std::vector<double>{1.0}) == "X 1.00 Y");
    CHECK(t.task == Task::custom);
}

TEST_CASE("template validation") {
    auto kind = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::config;
    };
    CHECK(kind([] { custom_template("no slot"); }) == ErrorKind::template_error);
    CHECK(kind([] { custom_template("{sequence_str} {sequence_str}"); }) == ErrorKind::template_error);
    CHECK(kind([] { custom_template("{sequence_str}", "no pattern"); }) == ErrorKind::template_error);
    CHECK(kind([] { custom_template("{sequence_str}", "{pattern}{pattern}"); }) == ErrorKind::template_error);
    PromptTemplate broken{Task::temperature, "missing", default_stm_suffix()};
    CHECK(kind([&] { build_base_prompt(broken, std::vector<double>{1.0}); }) == ErrorKind::template_error);
    CHECK(kind([] { build_base_prompt(temperature_template(), std::vector<double>{}); }) ==
          ErrorKind::template_error);
}

TEST_CASE("stm prompt appends the symbolic pattern") {
    const Quantizer q(5, 0.0, 10.0);
    std::vector<double> w(10, 1.0);
    const auto base = build_base_prompt(temperature_template(), w);
    const auto stm = build_stm_prompt(temperature_template(), w, "AABCCCDDEE", q);
    CHECK(stm == base + "\nSymbolic pattern (" + kFiveLegend + "): AABCCCDDEE");
    CHECK(stm.substr(0, base.size()) == base);
    CHECK(stm.find("0.4") == std::string::npos);
    CHECK_THROWS_AS(build_stm_prompt(temperature_template(), w, "AB", q), Error);
}

TEST_CASE("symbol legend") {
    CHECK(symbol_legend(5) == kFiveLegend);
    CHECK(symbol_legend(3) == "A=level 1 of 3, B=level 2 of 3, C=level 3 of 3");
    CHECK_THROWS_AS(symbol_legend(1), Error);
    CHECK_THROWS_AS(symbol_legend(27), Error);
}

TEST_CASE("property: stm prompt extends the base prompt for every k") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(20.0, 4.0);
    for (int k : {2, 3, 5, 7, 9, 10, 26}) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> w(24);
            for (double& v : w) v = g(rng);
            const auto q = fit_quantizer(w, k);
            for (const auto& tmpl : {temperature_template(), traffic_template()}) {
                const auto b = build_prompts(tmpl, w, q, 7);
                CHECK(b.window_ref == 7);
                CHECK(b.pattern.size() == w.size());
                CHECK(b.stm_prompt.rfind(b.base_prompt, 0) == 0);
                const std::string suffix = "\nSymbolic pattern (" + symbol_legend(k) + "): " + b.pattern;
                CHECK(b.stm_prompt == b.base_prompt + suffix);
            }
        }
    }
}

TEST_CASE("verbalized transitions") {
    TransitionSequence up{{1, 4, -1}, 4};
    CHECK(describe_transitions(up, 5) == "strong upward shift is observed");
    TransitionSequence down{{-1, 0}, 3};
    CHECK(describe_transitions(down, 5) == "mild downward shift is observed");
    TransitionSequence flat{{0, 0}, 3};
    CHECK(describe_transitions(flat, 5) == "no shift is observed");

    const Quantizer q(5, 0.0, 10.0);
    const std::vector<double> w{0.0, 9.0, 9.5};
    PromptOptions opt;
    opt.verbalize_transitions = true;
    const auto plain = build_stm_prompt(temperature_template(), w, "AEE", q);
    const auto verbal = build_stm_prompt(temperature_template(), w, "AEE", q, opt);
    CHECK(verbal == plain + "\nstrong upward shift is observed");
}

TEST_CASE("template overrides from json") {
    TempDir dir;
    const auto p = dir.write("t.json", R"({
        "traffic": {"base": "Seq: {sequence_str}"},
        "mine": {"base": "M {sequence_str}", "stm_suffix": "P={pattern}"}
    })");
    const auto t = load_template_overrides(p);
    REQUIRE(t.size() == 2);
    CHECK(t.at("traffic").task == Task::traffic);
    CHECK(t.at("traffic").stm_suffix_text == default_stm_suffix());
    const Quantizer q(3, 0.0, 1.0);
    CHECK(build_stm_prompt(t.at("mine"), std::vector<double>{0.5}, "B", q) == "M 0.50\nP=B");
    CHECK_THROWS_AS(load_template_overrides(dir.write("bad.json", R"({"x": {"base": "none"}})")), Error);
    CHECK_THROWS_AS(load_template_overrides(dir.path() / "missing.json"), Error);
}

TEST_CASE("task names") {
    CHECK(parse_task("traffic") == Task::traffic);
    CHECK(to_string(Task::temperature) == "temperature");
    CHECK(builtin_template(Task::traffic).base_text == traffic_template().base_text);
    CHECK_THROWS_AS(parse_task("weather"), Error);
}

#include "stm/prompting.hpp"

#include "stm/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace stm {

namespace {

constexpr const char* kTemperatureBase =
    "The temperature readings for the past 24 hours are: {sequence_str}, What is the next temperature reading?";
constexpr const char* kTrafficBase =
    "Given the following sequence of normalized inference traffic values: {sequence_str}, "
    "Predict the next traffic value based on pattern and trends.";
constexpr const char* kDefaultSuffix = "Symbolic pattern ({legend}): {pattern}";
constexpr const char* kFiveLevelNames[] = {"very low", "low", "medium", "high", "very high"};

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

void replace_all(std::string& text, std::string_view needle, std::string_view replacement) {
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + replacement.size())) {
        text.replace(pos, needle.size(), replacement);
    }
}

std::string to_fixed(double v, int decimals) {
    char buf[512];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

// to_chars rounds exact binary ties to even; detect those and push them
// away from zero instead.
bool is_exact_tie(double v, int decimals) {
    constexpr int kExtra = 25;
    const std::string wide = to_fixed(std::abs(v), decimals + kExtra);
    const auto dot = wide.find('.');
    const std::string_view tail = std::string_view(wide).substr(dot + 1 + static_cast<std::size_t>(decimals));
    if (tail.empty() || tail.front() != '5') return false;
    return tail.find_first_not_of('0', 1) == std::string_view::npos;
}

std::string format_half_up(double v, int decimals) {
    if (is_exact_tie(v, decimals)) {
        v = std::nextafter(v, v > 0 ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity());
    }
    std::string s = to_fixed(v, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

}  // namespace

std::string to_string(Task task) {
    switch (task) {
        case Task::temperature: return "temperature";
        case Task::traffic: return "traffic";
        case Task::custom: return "custom";
    }
    return "custom";
}

Task parse_task(const std::string& s) {
    if (s == "temperature") return Task::temperature;
    if (s == "traffic") return Task::traffic;
    if (s == "custom") return Task::custom;
    throw Error(ErrorKind::config, "unknown task '" + s + "' (temperature|traffic|custom)");
}

void PromptTemplate::validate() const {
    if (count_occurrences(base_text, kSequenceSlot) != 1) {
        throw Error(ErrorKind::template_error, "base template needs exactly one {sequence_str} slot");
    }
    if (count_occurrences(stm_suffix_text, kPatternSlot) != 1) {
        throw Error(ErrorKind::template_error, "STM suffix template needs exactly one {pattern} slot");
    }
}

std::string default_stm_suffix() { return kDefaultSuffix; }

PromptTemplate temperature_template() { return {Task::temperature, kTemperatureBase, kDefaultSuffix}; }
PromptTemplate traffic_template() { return {Task::traffic, kTrafficBase, kDefaultSuffix}; }

PromptTemplate custom_template(std::string base_text, std::string stm_suffix_text) {
    PromptTemplate t{Task::custom, std::move(base_text), std::move(stm_suffix_text)};
    t.validate();
    return t;
}

PromptTemplate builtin_template(Task task) {
    switch (task) {
        case Task::temperature: return temperature_template();
        case Task::traffic: return traffic_template();
        case Task::custom: break;
    }
    return {Task::custom, "{sequence_str}", kDefaultSuffix};
}

std::map<std::string, PromptTemplate> load_template_overrides(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open template file " + path.string());
    std::map<std::string, PromptTemplate> out;
    try {
        nlohmann::json j;
        in >> j;
        if (!j.is_object()) throw Error(ErrorKind::config, "template file must hold a JSON object");
        for (const auto& [name, entry] : j.items()) {
            Task task = Task::custom;
            if (name == "temperature" || name == "traffic") task = parse_task(name);
            PromptTemplate t = builtin_template(task);
            t.base_text = entry.value("base", t.base_text);
            t.stm_suffix_text = entry.value("stm_suffix", t.stm_suffix_text);
            t.validate();
            out.emplace(name, std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, "template file " + path.string() + ": " + e.what());
    }
    return out;
}

std::string render_sequence(std::span<const double> values, int decimals) {
    if (decimals < 0 || decimals > 17) throw Error(ErrorKind::config, "decimals must be in [0, 17]");
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw Error(ErrorKind::encode, "cannot render a non-finite value");
        if (i) out += ", ";
        out += format_half_up(values[i], decimals);
    }
    return out;
}

std::string symbol_legend(int k) {
    if (k < Quantizer::kMinLevels || k > Quantizer::kMaxLevels) {
        throw Error(ErrorKind::domain, "legend needs 2 <= k <= 26");
    }
    std::string out;
    for (int i = 0; i < k; ++i) {
        if (i) out += ", ";
        out += static_cast<char>('A' + i);
        out += '=';
        if (k == 5) {
            out += kFiveLevelNames[i];
        } else {
            out += "level " + std::to_string(i + 1) + " of " + std::to_string(k);
        }
    }
    return out;
}

std::string build_base_prompt(const PromptTemplate& tmpl, std::span<const double> history,
                              const PromptOptions& options) {
    tmpl.validate();
    if (history.empty()) throw Error(ErrorKind::template_error, "cannot build a prompt from an empty window");
    std::string prompt = tmpl.base_text;
    replace_all(prompt, kSequenceSlot, render_sequence(history, options.decimals));
    return prompt;
}

std::string describe_transitions(const TransitionSequence& deltas, int k) {
    const auto it = std::max_element(deltas.deltas.begin(), deltas.deltas.end(),
                                     [](int a, int b) { return std::abs(a) < std::abs(b); });
    if (it == deltas.deltas.end() || *it == 0) return "no shift is observed";
    const int magnitude = std::abs(*it);
    const bool strong = 2 * magnitude >= k - 1;
    return std::string(strong ? "strong " : "mild ") + (*it > 0 ? "upward" : "downward") + " shift is observed";
}

std::string build_stm_prompt(const PromptTemplate& tmpl, std::span<const double> history,
                             std::string_view pattern, const Quantizer& q, const PromptOptions& options) {
    if (pattern.size() != history.size()) {
        throw Error(ErrorKind::consistency, "symbol pattern and window differ in length");
    }
    std::string prompt = build_base_prompt(tmpl, history, options);
    std::string suffix = tmpl.stm_suffix_text;
    replace_all(suffix, kLegendSlot, symbol_legend(q.k()));
    replace_all(suffix, kPatternSlot, pattern);
    prompt += '\n';
    prompt += suffix;
    if (options.verbalize_transitions && pattern.size() >= 2) {
        prompt += '\n';
        prompt += describe_transitions(transitions(parse_pattern(pattern, q)), q.k());
    }
    return prompt;
}

PromptBundle build_prompts(const PromptTemplate& tmpl, std::span<const double> history, const Quantizer& q,
                           std::size_t window_ref, const PromptOptions& options) {
    PromptBundle b;
    b.pattern = pattern_string(encode(q, history), q);
    b.base_prompt = build_base_prompt(tmpl, history, options);
    b.stm_prompt = build_stm_prompt(tmpl, history, b.pattern, q, options);
    b.window_ref = window_ref;
    return b;
}

}  // namespace stm

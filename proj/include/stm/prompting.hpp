#pragma once

#include "stm/symbolic.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace stm {

inline constexpr std::string_view kSequenceSlot = "{sequence_str}";
inline constexpr std::string_view kPatternSlot = "{pattern}";
inline constexpr std::string_view kLegendSlot = "{legend}";

enum class Task { temperature, traffic, custom };

std::string to_string(Task task);
Task parse_task(const std::string& s);

struct PromptTemplate {
    Task task = Task::custom;
    std::string base_text;
    std::string stm_suffix_text;

    /// Exactly one {sequence_str} in base_text and one {pattern} in the
    /// suffix; throws Error(template_error) otherwise.
    void validate() const;
};

/// Default suffix shared by the built-in templates.
std::string default_stm_suffix();

PromptTemplate temperature_template();
PromptTemplate traffic_template();
PromptTemplate custom_template(std::string base_text, std::string stm_suffix_text = default_stm_suffix());
PromptTemplate builtin_template(Task task);

/// Templates from a JSON object keyed by task name:
///   {"traffic": {"base": "...", "stm_suffix": "..."}, ...}
/// Missing keys fall back to the built-in text for that task.
std::map<std::string, PromptTemplate> load_template_overrides(const std::filesystem::path& path);

/// Fixed-point, comma-space separated, half away from zero, locale-independent.
std::string render_sequence(std::span<const double> values, int decimals = 2);

/// "A=very low, ..., E=very high" for k = 5, "A=level 1 of k, ..." otherwise.
std::string symbol_legend(int k);

struct PromptOptions {
    int decimals = 2;
    /// Append a one-line verbal description of the largest transition.
    bool verbalize_transitions = false;
};

std::string build_base_prompt(const PromptTemplate& tmpl, std::span<const double> history,
                              const PromptOptions& options = {});

std::string build_stm_prompt(const PromptTemplate& tmpl, std::span<const double> history,
                             std::string_view pattern, const Quantizer& q,
                             const PromptOptions& options = {});

/// e.g. "strong upward shift is observed" for the largest |delta|.
std::string describe_transitions(const TransitionSequence& deltas, int k);

struct PromptBundle {
    std::string base_prompt;
    std::string stm_prompt;
    std::string pattern;
    std::size_t window_ref = 0;
};

PromptBundle build_prompts(const PromptTemplate& tmpl, std::span<const double> history,
                           const Quantizer& q, std::size_t window_ref, const PromptOptions& options = {});

}  // namespace stm

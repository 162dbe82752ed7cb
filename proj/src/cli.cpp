#include "stm/cli.hpp"

#include "stm/attention.hpp"
#include "stm/backend.hpp"
#include "stm/dataset.hpp"
#include "stm/error.hpp"
#include "stm/evaluation.hpp"
#include "stm/prompting.hpp"
#include "stm/symbolic.hpp"
#include "stm/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

namespace stm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Effective settings for one invocation. Precedence: run config file,
/// then command-line flags, then these defaults.
struct RunConfig {
    std::string config_path;

    std::string dataset;  // dataset config (.json) or a CSV file
    std::optional<json> dataset_inline;
    fs::path dataset_base_dir;
    std::string input;  // raw CSV for encode / analyze
    std::string timestamp_column = "timestamp";
    std::string value_column = "value";
    std::string timestamp_format = "epoch";
    std::string normalizer;  // empty: keep the dataset config's choice
    std::string resample;
    std::size_t window = 0;  // 0: dataset config's window_length
    std::size_t stride = 0;

    std::string task;  // empty: dataset config's task
    std::string templates;
    int decimals = 2;
    bool verbalize = false;

    std::string backend_kind = "mock";
    BackendSpec backend;
    std::string parse_mode = "first";
    GenerationParams generation;

    int k = 5;
    AttentionConfig attention;

    std::string out = "stm_out";
    std::uint64_t seed = 42;
    std::vector<int> ks = {3, 5, 7, 9, 10};
    bool include_timings = false;
    std::size_t n_windows = 1000;
    double reference_latency_ms = 200.0;
    std::optional<std::size_t> window_index;
    std::string report_path;

    // synth
    std::string synth_kind = "mix";
    std::size_t synth_n = 2000;
    double synth_period = 24.0;
    double synth_noise = 0.5;
    double synth_amplitude = 10.0;
    double synth_offset = 15.0;
    double synth_interval_s = 3600.0;
};

template <typename T>
void take(const json& j, const char* key, T& target) {
    if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

void apply_config_file(RunConfig& rc) {
    if (rc.config_path.empty()) return;
    std::ifstream in(rc.config_path);
    if (!in) throw Error(ErrorKind::config, "cannot open run config " + rc.config_path);
    json j;
    try {
        in >> j;
        const fs::path base = fs::path(rc.config_path).parent_path();
        if (j.contains("dataset")) {
            if (j["dataset"].is_object()) {
                rc.dataset_inline = j["dataset"];
                rc.dataset_base_dir = base;
            } else {
                fs::path p = j["dataset"].get<std::string>();
                if (p.is_relative()) p = base / p;
                rc.dataset = p.string();
            }
        }
        take(j, "input", rc.input);
        take(j, "task", rc.task);
        if (j.contains("templates")) {
            fs::path p = j["templates"].get<std::string>();
            rc.templates = (p.is_relative() ? base / p : p).string();
        }
        take(j, "k", rc.k);
        take(j, "window", rc.window);
        take(j, "stride", rc.stride);
        take(j, "decimals", rc.decimals);
        take(j, "verbalize", rc.verbalize);
        take(j, "out", rc.out);
        take(j, "seed", rc.seed);
        take(j, "ks", rc.ks);
        take(j, "include_timings", rc.include_timings);
        take(j, "n_windows", rc.n_windows);
        take(j, "reference_latency_ms", rc.reference_latency_ms);
        if (j.contains("attention")) {
            const auto& a = j["attention"];
            take(a, "periodic_bonus", rc.attention.periodic_bonus);
            take(a, "directional_bonus", rc.attention.directional_bonus);
            take(a, "tolerance", rc.attention.tolerance);
        }
        if (j.contains("generation")) {
            const auto& g = j["generation"];
            take(g, "num_return_sequences", rc.generation.num_return_sequences);
            take(g, "temperature", rc.generation.temperature);
            take(g, "top_p", rc.generation.top_p);
            take(g, "do_sample", rc.generation.do_sample);
            take(g, "max_new_tokens", rc.generation.max_new_tokens);
        }
        if (j.contains("backend")) {
            const auto& b = j["backend"];
            take(b, "kind", rc.backend_kind);
            take(b, "endpoint_url", rc.backend.endpoint_url);
            take(b, "endpoint_env_var", rc.backend.endpoint_env_var);
            take(b, "auth_token_env_var", rc.backend.auth_token_env_var);
            take(b, "timeout_ms", rc.backend.timeout_ms);
            take(b, "max_concurrent_requests", rc.backend.max_concurrent_requests);
            take(b, "retries", rc.backend.retries);
            take(b, "backoff_ms", rc.backend.backoff_ms);
            take(b, "parse_mode", rc.parse_mode);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, "run config " + rc.config_path + ": " + e.what());
    }
}

DatasetConfig resolve_dataset(const RunConfig& rc) {
    DatasetConfig d;
    if (rc.dataset_inline) {
        d = dataset_config_from_json(*rc.dataset_inline, rc.dataset_base_dir);
    } else if (!rc.dataset.empty() && fs::path(rc.dataset).extension() == ".json") {
        d = load_dataset_config(rc.dataset);
    } else {
        const std::string& csv = rc.dataset.empty() ? rc.input : rc.dataset;
        if (csv.empty()) throw Error(ErrorKind::config, "no dataset given (use --dataset or --input)");
        d.path = csv;
        d.csv.timestamp_column = rc.timestamp_column;
        d.csv.value_column = rc.value_column;
        d.csv.timestamp_format = rc.timestamp_format;
    }
    if (rc.window) d.window_length = rc.window;
    if (rc.stride) d.stride = rc.stride;
    if (!rc.normalizer.empty()) d.normalizer = parse_normalizer_kind(rc.normalizer);
    if (!rc.resample.empty()) d.resample = parse_resample(rc.resample);
    if (!rc.task.empty()) d.task = rc.task;
    return d;
}

PromptTemplate resolve_template(const RunConfig& rc, const DatasetConfig& d) {
    const Task task = parse_task(d.task);
    if (!rc.templates.empty()) {
        const auto overrides = load_template_overrides(rc.templates);
        if (const auto it = overrides.find(d.task); it != overrides.end()) return it->second;
    }
    auto t = builtin_template(task);
    t.validate();
    return t;
}

BackendSpec resolve_backend(const RunConfig& rc) {
    BackendSpec b = rc.backend;
    b.kind = parse_backend_kind(rc.backend_kind);
    b.parse_mode = parse_parse_mode(rc.parse_mode);
    b.validate();
    return b;
}

EvalConfig resolve_eval(const RunConfig& rc, const DatasetConfig& d) {
    EvalConfig e;
    e.prompt_template = resolve_template(rc, d);
    e.k = rc.k;
    e.attention = rc.attention;
    e.generation = rc.generation;
    e.prompt.decimals = rc.decimals;
    e.prompt.verbalize_transitions = rc.verbalize;
    e.attention.validate();
    e.generation.validate();
    if (rc.k < Quantizer::kMinLevels || rc.k > Quantizer::kMaxLevels) {
        throw Error(ErrorKind::config, "--k must lie in [2, 26]");
    }
    return e;
}

json config_echo(const RunConfig& rc, const DatasetConfig& d, const BackendSpec& b, const EvalConfig& e) {
    return {
        {"dataset", to_json(d)},
        {"backend",
         {{"kind", to_string(b.kind)},
          {"endpoint_url", b.kind == BackendKind::http ? b.resolved_endpoint() : std::string()},
          {"timeout_ms", b.timeout_ms},
          {"retries", b.retries},
          {"max_concurrent_requests", b.max_concurrent_requests},
          {"parse_mode", to_string(b.parse_mode)}}},
        {"k", e.k},
        {"attention",
         {{"periodic_bonus", e.attention.periodic_bonus},
          {"directional_bonus", e.attention.directional_bonus},
          {"tolerance", e.attention.tolerance}}},
        {"generation",
         {{"num_return_sequences", e.generation.num_return_sequences},
          {"temperature", e.generation.temperature},
          {"top_p", e.generation.top_p},
          {"do_sample", e.generation.do_sample},
          {"max_new_tokens", e.generation.max_new_tokens}}},
        {"task", d.task},
        {"decimals", e.prompt.decimals},
        {"verbalize", e.prompt.verbalize_transitions},
        {"seed", rc.seed},
    };
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

TimeSeries load_series(const RunConfig& rc) {
    const DatasetConfig d = resolve_dataset(rc);
    auto series = load_csv(d.path, d.csv).series;
    if (d.resample == Resample::hourly) series = resample_hourly(series, d.aggregator);
    return series;
}

json analysis_json(const Quantizer& q, const StmAnalysis& a) {
    return {
        {"pattern", a.pattern},
        {"symbols", a.symbols.symbols},
        {"deltas", a.transitions.deltas},
        {"period", a.periodicity.period ? json(*a.periodicity.period) : json()},
        {"alphas", a.attention.alphas},
        {"trend_sign", a.attention.trend_sign},
        {"uniform_fallback", a.attention.uniform_fallback},
        {"quantizer", {{"k", q.k()}, {"lo", q.lo()}, {"hi", q.hi()}, {"edges", q.edges()}, {"degenerate", q.degenerate()}}},
    };
}

int cmd_encode(const RunConfig& rc, std::ostream& out) {
    const auto series = load_series(rc);
    const Quantizer q = fit_quantizer(series.values, rc.k);
    rc.attention.validate();
    const StmAnalysis a = analyze(q, series.values, rc.attention);
    out << a.pattern << "\n";
    const json j = analysis_json(q, a);
    if (rc.out.empty()) {
        out << j.dump(2) << "\n";
    } else {
        write_json(fs::path(rc.out) / "encode.json", j);
    }
    return 0;
}

int cmd_analyze(const RunConfig& rc, std::ostream& out) {
    const auto series = load_series(rc);
    const Quantizer q = fit_quantizer(series.values, rc.k);
    rc.attention.validate();
    const StmAnalysis a = analyze(q, series.values, rc.attention);

    out << "points        " << series.size() << "\n";
    out << "range         [" << q.lo() << ", " << q.hi() << "]" << (q.degenerate() ? " (degenerate)" : "") << "\n";
    out << "levels        " << q.k() << " (" << symbol_legend(q.k()) << ")\n";
    out << "pattern       " << a.pattern << "\n";
    out << "trend         " << (a.attention.trend_sign > 0 ? "upward" : a.attention.trend_sign < 0 ? "downward" : "flat")
        << "\n";
    out << "period        ";
    if (a.periodicity.period) {
        out << *a.periodicity.period << " transitions\n";
    } else {
        out << "none\n";
    }
    out << "largest shift " << describe_transitions(a.transitions, q.k()) << "\n";

    std::vector<std::size_t> order(a.attention.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a.attention.alphas[x] > a.attention.alphas[y]; });
    out << "top transitions (t: delta, alpha)\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, order.size()); ++i) {
        const auto t = order[i];
        out << "  " << t << ": " << a.transitions.deltas[t] << ", " << a.attention.alphas[t] << "\n";
    }
    out << "weighted summary " << weighted_summary(series.values, a.attention) << "\n";
    if (!rc.out.empty()) write_json(fs::path(rc.out) / "analysis.json", analysis_json(q, a));
    return 0;
}

int cmd_prompt(const RunConfig& rc, std::ostream& out) {
    const DatasetConfig d = resolve_dataset(rc);
    const EvalConfig e = resolve_eval(rc, d);
    const PreparedDataset data = prepare_dataset(d);
    if (data.test_windows.empty()) throw Error(ErrorKind::insufficient_data, "test split yields no windows");
    const std::size_t index = rc.window_index.value_or(data.test_windows.size() - 1);
    if (index >= data.test_windows.size()) {
        throw Error(ErrorKind::config, "--index must be below " + std::to_string(data.test_windows.size()));
    }
    const Quantizer q = fit_quantizer(data.train_model_units, e.k);
    const auto& w = data.test_windows[index];
    const PromptBundle b = build_prompts(e.prompt_template, w.history, q, w.origin_index, e.prompt);
    out << "[base]\n" << b.base_prompt << "\n\n[stm]\n" << b.stm_prompt << "\n";
    return 0;
}

int cmd_forecast(const RunConfig& rc, std::ostream& out) {
    const DatasetConfig d = resolve_dataset(rc);
    const EvalConfig e = resolve_eval(rc, d);
    const BackendSpec b = resolve_backend(rc);
    const PreparedDataset data = prepare_dataset(d);
    const auto backend = make_backend(b);
    const EvalReport report = run_eval(data, *backend, e);

    const fs::path dir = rc.out;
    write_json(dir / "report.json", report_json(report, config_echo(rc, d, b, e), rc.include_timings));
    write_text(dir / "windows.csv", records_csv(report));
    write_json(dir / "timings.json", timings_json(report));

    out << "windows " << report.n_windows << " scored " << report.n_scored << " parse failures "
        << report.n_parse_failures << " backend failures " << report.n_backend_failures << "\n";
    out << "MAE base " << report.mae_base << " stm " << report.mae_stm;
    if (report.mae_improvement_pct) out << " improvement " << *report.mae_improvement_pct << "%";
    out << "\nMSE base " << report.mse_base << " stm " << report.mse_stm;
    if (report.mse_improvement_pct) out << " improvement " << *report.mse_improvement_pct << "%";
    out << "\nwrote " << (dir / "report.json").string() << "\n";
    return 0;
}

int cmd_ablate(const RunConfig& rc, std::ostream& out) {
    const DatasetConfig d = resolve_dataset(rc);
    const EvalConfig e = resolve_eval(rc, d);
    const BackendSpec b = resolve_backend(rc);
    const PreparedDataset data = prepare_dataset(d);
    const auto backend = make_backend(b);
    const auto runs = run_ablation(data, *backend, e, rc.ks);

    json per_k = json::array();
    for (const auto& [k, r] : runs) per_k.push_back(report_json(r, json(), rc.include_timings));
    json doc;
    doc["config_echo"] = config_echo(rc, d, b, e);
    doc["config_echo"]["ks"] = rc.ks;
    doc["per_k"] = per_k;

    const fs::path dir = rc.out;
    write_json(dir / "ablation.json", doc);
    write_text(dir / "ablation.csv", ablation_csv(runs));
    out << ablation_csv(runs);
    return 0;
}

int cmd_profile(const RunConfig& rc, std::ostream& out) {
    const DatasetConfig d = resolve_dataset(rc);
    const EvalConfig e = resolve_eval(rc, d);
    const PreparedDataset data = prepare_dataset(d);
    const OverheadProfile p = profile_overhead(data, e, rc.n_windows, rc.reference_latency_ms);
    const json j = overhead_json(p);
    write_json(fs::path(rc.out) / "overhead.json", j);
    out << j.dump(2) << "\n";
    return 0;
}

void print_metrics_row(std::ostream& out, const std::string& name, const json& m, const char* base_key,
                       const char* stm_key, const char* imp_key) {
    out << std::left << std::setw(6) << name << std::setw(16) << m.at(base_key).get<double>() << std::setw(16)
        << m.at(stm_key).get<double>();
    if (m.at(imp_key).is_null()) {
        out << "n/a";
    } else {
        out << std::fixed << std::setprecision(2) << m.at(imp_key).get<double>() << "%" << std::defaultfloat
            << std::setprecision(6);
    }
    out << "\n";
}

void print_report(std::ostream& out, const json& r) {
    const auto& c = r.at("counts");
    out << "k=" << r.value("k", 0) << " windows=" << c.at("n_windows") << " scored=" << c.at("n_scored")
        << " parse_failures=" << c.at("n_parse_failures") << " backend_failures=" << c.at("n_backend_failures") << "\n";
    out << std::left << std::setw(6) << "" << std::setw(16) << "base" << std::setw(16) << "stm" << "improvement\n";
    const auto& m = r.at("metrics");
    print_metrics_row(out, "MAE", m, "mae_base", "mae_stm", "mae_improvement_pct");
    print_metrics_row(out, "MSE", m, "mse_base", "mse_stm", "mse_improvement_pct");
}

int cmd_report(const RunConfig& rc, std::ostream& out) {
    fs::path path = rc.report_path.empty() ? fs::path(rc.out) / "report.json" : fs::path(rc.report_path);
    if (fs::is_directory(path)) path /= fs::exists(path / "report.json") ? "report.json" : "ablation.json";
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::load, "cannot open report " + path.string());
    json j;
    try {
        in >> j;
        if (j.contains("per_k")) {
            for (const auto& r : j["per_k"]) print_report(out, r);
        } else {
            print_report(out, j);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::load, "malformed report " + path.string() + ": " + e.what());
    }
    return 0;
}

int cmd_synth(const RunConfig& rc, std::ostream& out) {
    SynthOptions o;
    o.kind = parse_synth_kind(rc.synth_kind);
    o.n = rc.synth_n;
    o.seed = rc.seed;
    o.period = rc.synth_period;
    o.noise = rc.synth_noise;
    o.amplitude = rc.synth_amplitude;
    o.offset = rc.synth_offset;
    o.interval_s = rc.synth_interval_s;
    const TimeSeries s = synthesize(o);
    if (rc.out.empty() || rc.out == "-") {
        write_csv(out, s);
    } else {
        if (fs::path(rc.out).has_parent_path()) fs::create_directories(fs::path(rc.out).parent_path());
        save_csv(rc.out, s);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    CLI::App app{"Symbolic transition prompts for language-model time-series forecasting", "stm"};
    app.require_subcommand(1);

    auto add_config = [&](CLI::App* s) {
        s->add_option("--config", rc.config_path, "Run config JSON; its values take precedence over flags");
    };
    auto add_symbolic = [&](CLI::App* s) {
        s->add_option("--k", rc.k, "Number of symbol levels")->capture_default_str()->check(CLI::Range(2, 26));
        s->add_option("--gamma-p", rc.attention.periodic_bonus, "Bonus at period-consistent transitions")
            ->capture_default_str();
        s->add_option("--gamma-d", rc.attention.directional_bonus, "Bonus for transitions along the window trend")
            ->capture_default_str();
        s->add_option("--epsilon", rc.attention.tolerance, "Mismatch fraction tolerated by period detection")
            ->capture_default_str();
    };
    auto add_dataset = [&](CLI::App* s) {
        s->add_option("--dataset", rc.dataset, "Dataset config (.json) or CSV file");
        s->add_option("--timestamp-column", rc.timestamp_column, "CSV timestamp column")->capture_default_str();
        s->add_option("--value-column", rc.value_column, "CSV value column")->capture_default_str();
        s->add_option("--timestamp-format", rc.timestamp_format, "strftime pattern or 'epoch'")->capture_default_str();
        s->add_option("--resample", rc.resample, "none|hourly (overrides dataset config)");
        s->add_option("--normalizer", rc.normalizer, "none|min-max (overrides dataset config)");
    };
    auto add_windows = [&](CLI::App* s) {
        s->add_option("--window", rc.window, "History length L (default: dataset config, 24)");
        s->add_option("--stride", rc.stride, "Window stride (default: dataset config, 1)");
        s->add_option("--task", rc.task, "temperature|traffic|custom");
        s->add_option("--templates", rc.templates, "Template overrides JSON keyed by task");
        s->add_option("--decimals", rc.decimals, "Fractional digits in rendered sequences")->capture_default_str();
        s->add_flag("--verbalize", rc.verbalize, "Append a verbal description of the largest transition");
    };
    auto add_backend = [&](CLI::App* s) {
        s->add_option("--backend", rc.backend_kind, "mock|persistence|http")->capture_default_str();
        s->add_option("--endpoint", rc.backend.endpoint_url, "HTTP completion endpoint (else $STM_ENDPOINT_URL)");
        s->add_option("--timeout-ms", rc.backend.timeout_ms, "Per-request timeout")->capture_default_str();
        s->add_option("--retries", rc.backend.retries, "Retries after a failed request")->capture_default_str();
        s->add_option("--max-concurrent", rc.backend.max_concurrent_requests, "Requests in flight at most")
            ->capture_default_str();
        s->add_option("--parse-mode", rc.parse_mode, "Number taken from a completion: first|last")
            ->capture_default_str();
        s->add_option("--num-return-sequences", rc.generation.num_return_sequences, "Sequences per request")
            ->capture_default_str();
        s->add_option("--temperature", rc.generation.temperature, "Decoding temperature")->capture_default_str();
        s->add_option("--top-p", rc.generation.top_p, "Nucleus sampling mass")->capture_default_str();
        s->add_option("--do-sample", rc.generation.do_sample, "Sample instead of greedy decoding")
            ->capture_default_str();
        s->add_option("--max-new-tokens", rc.generation.max_new_tokens, "Generation budget")->capture_default_str();
    };
    auto add_out = [&](CLI::App* s, const char* help) { s->add_option("--out", rc.out, help)->capture_default_str(); };

    auto* encode = app.add_subcommand("encode", "Encode a series into symbols; print the pattern, write JSON");
    add_config(encode);
    add_symbolic(encode);
    add_dataset(encode);
    encode->add_option("--input", rc.input, "Input CSV");
    encode->add_option("--out", rc.out, "Directory for encode.json (empty: print JSON)");

    auto* analyze_cmd = app.add_subcommand("analyze", "Describe transitions, period and attention of a series");
    add_config(analyze_cmd);
    add_symbolic(analyze_cmd);
    add_dataset(analyze_cmd);
    analyze_cmd->add_option("--input", rc.input, "Input CSV");
    analyze_cmd->add_option("--out", rc.out, "Directory for analysis.json (empty: none)");

    auto* prompt = app.add_subcommand("prompt", "Render base and STM prompts for one test window");
    add_config(prompt);
    add_symbolic(prompt);
    add_dataset(prompt);
    add_windows(prompt);
    prompt->add_option("--index", rc.window_index, "Test window index (default: last)");

    auto* forecast = app.add_subcommand("forecast", "Compare base and STM prompts over the test split");
    add_config(forecast);
    add_symbolic(forecast);
    add_dataset(forecast);
    add_windows(forecast);
    add_backend(forecast);
    add_out(forecast, "Output directory");
    forecast->add_option("--seed", rc.seed, "Seed echoed into the report")->capture_default_str();
    forecast->add_flag("--include-timings", rc.include_timings, "Embed wall-clock timings in report.json");

    auto* ablate = app.add_subcommand("ablate", "Repeat the forecast comparison for several symbol counts");
    add_config(ablate);
    add_symbolic(ablate);
    add_dataset(ablate);
    add_windows(ablate);
    add_backend(ablate);
    add_out(ablate, "Output directory");
    ablate->add_option("--ks", rc.ks, "Symbol counts, comma separated")->delimiter(',')->capture_default_str();
    ablate->add_option("--seed", rc.seed, "Seed echoed into the report")->capture_default_str();
    ablate->add_flag("--include-timings", rc.include_timings, "Embed wall-clock timings in ablation.json");

    auto* profile = app.add_subcommand("profile", "Time the STM computation per window");
    add_config(profile);
    add_symbolic(profile);
    add_dataset(profile);
    add_windows(profile);
    add_out(profile, "Output directory");
    profile->add_option("--n-windows", rc.n_windows, "Timed windows (>= 30)")->capture_default_str();
    profile->add_option("--reference-latency-ms", rc.reference_latency_ms, "Model latency the overhead is relative to")
        ->capture_default_str();

    auto* report = app.add_subcommand("report", "Print a summary of a report or ablation JSON");
    report->add_option("report", rc.report_path, "report.json, ablation.json or an output directory");
    add_out(report, "Output directory holding report.json");

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic series as CSV");
    synth->add_option("--kind", rc.synth_kind, "sine|sawtooth|step|noise|mix")->capture_default_str();
    synth->add_option("--n", rc.synth_n, "Number of points")->capture_default_str();
    synth->add_option("--seed", rc.seed, "Random seed")->capture_default_str();
    synth->add_option("--period", rc.synth_period, "Samples per cycle")->capture_default_str();
    synth->add_option("--noise", rc.synth_noise, "Gaussian noise sigma")->capture_default_str();
    synth->add_option("--amplitude", rc.synth_amplitude, "Cycle amplitude")->capture_default_str();
    synth->add_option("--offset", rc.synth_offset, "Series level")->capture_default_str();
    synth->add_option("--interval", rc.synth_interval_s, "Seconds between samples")->capture_default_str();
    synth->add_option("--out", rc.out, "Output CSV path ('-' for stdout)");

    // Subcommands print to stdout by default; keep encode/analyze/synth
    // output on `out` unless a directory is named.
    rc.out.clear();
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        apply_config_file(rc);
        if (rc.out.empty() && !encode->parsed() && !analyze_cmd->parsed() && !synth->parsed()) rc.out = "stm_out";
        if (encode->parsed()) return cmd_encode(rc, out);
        if (analyze_cmd->parsed()) return cmd_analyze(rc, out);
        if (prompt->parsed()) return cmd_prompt(rc, out);
        if (forecast->parsed()) return cmd_forecast(rc, out);
        if (ablate->parsed()) return cmd_ablate(rc, out);
        if (profile->parsed()) return cmd_profile(rc, out);
        if (report->parsed()) return cmd_report(rc, out);
        if (synth->parsed()) return cmd_synth(rc, out);
    } catch (const Error& e) {
        err << "stm: " << to_string(e.kind()) << " error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "stm: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace stm::cli

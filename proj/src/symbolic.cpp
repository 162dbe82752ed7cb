#include "stm/symbolic.hpp"

#include "stm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace stm {

namespace {

constexpr const char* kFiveLevelAliases[] = {"VL", "L", "M", "H", "VH"};

void check_index(const Quantizer& q, int index) {
    if (index < 0 || index >= q.k()) {
        throw Error(ErrorKind::domain,
                    "symbol index " + std::to_string(index) + " outside [0, " +
                        std::to_string(q.k() - 1) + "]");
    }
}

}  // namespace

Quantizer::Quantizer(int k, double lo, double hi) : k_(k), lo_(lo), hi_(hi) {
    if (k < kMinLevels || k > kMaxLevels) {
        throw Error(ErrorKind::domain,
                    "quantizer level count must be in [2, 26], got " + std::to_string(k));
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw Error(ErrorKind::fit, "quantizer range must be finite with lo <= hi");
    }
    width_ = (hi - lo) / k;
    labels_.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) labels_.push_back(static_cast<char>('A' + i));
}

double Quantizer::edge(int i) const {
    if (i < 0 || i > k_) throw Error(ErrorKind::domain, "edge index out of range");
    if (i == k_) return hi_;
    return lo_ + i * width_;
}

std::vector<double> Quantizer::edges() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k_) + 1);
    for (int i = 0; i <= k_; ++i) out.push_back(edge(i));
    return out;
}

char Quantizer::label(int index) const {
    check_index(*this, index);
    return labels_[static_cast<std::size_t>(index)];
}

std::string Quantizer::alias(int index) const {
    check_index(*this, index);
    if (k_ == 5) return kFiveLevelAliases[index];
    return std::string(1, label(index));
}

int Quantizer::weight(int index) const {
    check_index(*this, index);
    return index;
}

Quantizer fit_quantizer(std::span<const double> values, int k) {
    if (values.empty()) throw Error(ErrorKind::fit, "cannot fit quantizer on empty input");
    double lo = values.front();
    double hi = values.front();
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::fit, "cannot fit quantizer on non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return Quantizer(k, lo, hi);
}

int encode_value(const Quantizer& q, double value) {
    if (!std::isfinite(value)) throw Error(ErrorKind::encode, "cannot encode non-finite value");
    const int k = q.k();
    if (q.degenerate()) return k / 2;
    if (value <= q.lo()) return 0;
    if (value >= q.hi()) return k - 1;

    int index = static_cast<int>(std::floor((value - q.lo()) / q.width()));
    index = std::clamp(index, 0, k - 1);
    // Division rounding can land one bin off near an edge; settle against
    // the edges themselves so that edge(index) <= value < edge(index + 1).
    while (index > 0 && value < q.edge(index)) --index;
    while (index < k - 1 && value >= q.edge(index + 1)) ++index;
    return index;
}

SymbolSequence encode(const Quantizer& q, std::span<const double> values) {
    SymbolSequence seq;
    seq.quantizer_k = q.k();
    seq.symbols.reserve(values.size());
    for (double v : values) seq.symbols.push_back(encode_value(q, v));
    return seq;
}

int symbol_distance(const Quantizer& q, int a, int b) {
    return std::abs(q.weight(a) - q.weight(b));
}

TransitionSequence transitions(const SymbolSequence& seq) {
    if (seq.symbols.size() < 2) {
        throw Error(ErrorKind::insufficient_data, "transitions need at least two symbols");
    }
    TransitionSequence out;
    out.source_len = seq.symbols.size();
    out.deltas.reserve(seq.symbols.size() - 1);
    for (std::size_t t = 0; t + 1 < seq.symbols.size(); ++t) {
        out.deltas.push_back(seq.symbols[t + 1] - seq.symbols[t]);
    }
    return out;
}

std::string pattern_string(const SymbolSequence& seq, const Quantizer& q) {
    std::string out;
    out.reserve(seq.symbols.size());
    for (int s : seq.symbols) out.push_back(q.label(s));
    return out;
}

SymbolSequence parse_pattern(std::string_view pattern, const Quantizer& q) {
    SymbolSequence seq;
    seq.quantizer_k = q.k();
    seq.symbols.reserve(pattern.size());
    for (char c : pattern) {
        const int index = c - 'A';
        if (index < 0 || index >= q.k()) {
            throw Error(ErrorKind::encode, std::string("unknown symbol '") + c + "' in pattern");
        }
        seq.symbols.push_back(index);
    }
    return seq;
}

}  // namespace stm

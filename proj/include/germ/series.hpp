#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germ/errors.hpp"

namespace germ {

enum class SeriesKind { Converges, Diverges, Undecided };

struct SeriesMethod {
    enum class Tag { ClosedForm, Kummer, Comparison, TruncationOnly } tag =
        Tag::TruncationOnly;
    std::string name;        // e.g. "pareto-exponent", "p-series", "geometric"
    double exponent = 0.0;   // comparison exponent when meaningful
    double b_start = 0.0;    // Kummer evidence
    double alpha = 0.0;
    std::uint64_t horizon = 0;
};

// Classification of a positive series. A Converges/Diverges verdict always
// carries a certificate; raw partial sums alone yield Undecided.
struct SeriesVerdict {
    SeriesKind kind = SeriesKind::Undecided;
    SeriesMethod method;
    std::vector<std::pair<std::uint64_t, double>> partial_sums;  // checkpointed

    static SeriesVerdict undecided(std::vector<std::pair<std::uint64_t, double>> sums = {}) {
        SeriesVerdict v;
        v.partial_sums = std::move(sums);
        return v;
    }

    static SeriesVerdict certified(SeriesKind kind, SeriesMethod method,
                                   std::vector<std::pair<std::uint64_t, double>> sums = {}) {
        if (kind != SeriesKind::Undecided && method.tag == SeriesMethod::Tag::TruncationOnly)
            throw ModuleError("a decided series verdict needs a certificate");
        SeriesVerdict v;
        v.kind = kind;
        v.method = std::move(method);
        v.partial_sums = std::move(sums);
        return v;
    }
};

// Terms of a positive series: either a recognized power law a_n =
// scale/(n+offset)^expo, which admits algebraic tail certificates, or an
// arbitrary callback, which never does.
class TermRule {
public:
    static TermRule power_law(double scale, double offset, double expo) {
        if (!(scale > 0.0) || !(offset > 0.0))
            throw ConfigError("power-law terms need positive scale and offset");
        TermRule r;
        r.scale_ = scale;
        r.offset_ = offset;
        r.expo_ = expo;
        return r;
    }

    static TermRule callback(std::function<double(std::uint64_t)> f) {
        TermRule r;
        r.fn_ = std::move(f);
        return r;
    }

    double at(std::uint64_t n) const {
        if (fn_) return fn_(n);
        return scale_ / std::pow(static_cast<double>(n) + offset_, expo_);
    }

    bool is_power_law() const { return !fn_; }
    double exponent() const { return expo_; }
    double offset() const { return offset_; }

private:
    TermRule() = default;
    double scale_ = 1.0, offset_ = 1.0, expo_ = 1.0;
    std::function<double(std::uint64_t)> fn_;
};

struct KummerResult {
    bool certified = false;
    bool recursion_positive = false;             // positivity held through the horizon
    std::optional<std::uint64_t> first_violation;
    double b_final = 0.0;
};

// Convergence side: B_{n+1} := B_n a_n / a_{n+1} - alpha must stay positive.
// The finite recursion is only evidence; certification additionally needs the
// tail argument, exact for power-law terms with exponent e > 1, where
// B_n >= beta (n + offset) with beta = alpha/(e-1) is inductively preserved:
//   B_{n+1} >= B_n (1 + e/(n+offset)) - alpha >= beta (n+offset+1) + beta(e-1) - alpha.
inline KummerResult kummer_convergence(const TermRule& terms, double b_start, double alpha,
                                       std::uint64_t n_start, std::uint64_t horizon) {
    if (!(b_start > 0.0) || !(alpha > 0.0))
        throw ModuleError("kummer certificate needs positive B_N and alpha");
    KummerResult res;
    double b = b_start;
    for (std::uint64_t n = n_start; n < horizon; ++n) {
        double an = terms.at(n);
        double an1 = terms.at(n + 1);
        if (!(an > 0.0 && an1 > 0.0)) throw ModuleError("kummer terms must be positive");
        b = b * an / an1 - alpha;
        if (!(b > 0.0)) {
            res.first_violation = n + 1;
            return res;
        }
    }
    res.recursion_positive = true;
    res.b_final = b;
    if (terms.is_power_law() && terms.exponent() > 1.0) {
        const double beta = alpha / (terms.exponent() - 1.0);
        res.certified = b >= beta * (static_cast<double>(horizon) + terms.offset());
    }
    return res;
}

// Divergence side of the same lemma: a positive sequence B with
// B_n a_n/a_{n+1} <= B_{n+1} and sum 1/B_n = infinity. B_n = n + offset
// works for power-law terms with exponent e <= 1 because then
// a_n/a_{n+1} = (1 + 1/(n+offset))^e <= (n+offset+1)/(n+offset).
inline KummerResult kummer_divergence(const TermRule& terms, std::uint64_t n_start,
                                      std::uint64_t horizon) {
    KummerResult res;
    const double off = terms.is_power_law() ? terms.offset() : 1.0;
    for (std::uint64_t n = n_start; n < horizon; ++n) {
        double an = terms.at(n);
        double an1 = terms.at(n + 1);
        if (!(an > 0.0 && an1 > 0.0)) throw ModuleError("kummer terms must be positive");
        double bn = static_cast<double>(n) + off;
        if (bn * an / an1 > bn + 1.0 + 1e-12) {
            res.first_violation = n;
            return res;
        }
    }
    res.recursion_positive = true;
    res.certified = terms.is_power_law() && terms.exponent() <= 1.0;
    return res;
}

// p-series comparison for terms asymptotically c / n^p.
inline SeriesVerdict classify_power_series(double exponent, std::string name = "p-series") {
    SeriesMethod m;
    m.tag = SeriesMethod::Tag::Comparison;
    m.name = std::move(name);
    m.exponent = exponent;
    return SeriesVerdict::certified(
        exponent > 1.0 ? SeriesKind::Converges : SeriesKind::Diverges, std::move(m));
}

// Partial sums with checkpoints at powers of ten (and the final horizon).
inline std::vector<std::pair<std::uint64_t, double>> checkpointed_sums(
    const std::function<double(std::uint64_t)>& term, std::uint64_t horizon) {
    std::vector<std::pair<std::uint64_t, double>> out;
    double acc = 0.0;
    std::uint64_t next = 10;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        acc += term(n);
        if (n + 1 == next || n + 1 == horizon) {
            out.emplace_back(n + 1, acc);
            if (n + 1 == next) next *= 10;
        }
    }
    return out;
}

}  // namespace germ

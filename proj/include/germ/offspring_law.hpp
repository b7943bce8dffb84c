#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "germ/errors.hpp"
#include "germ/nat_law.hpp"
#include "germ/rng.hpp"

namespace germ {

enum class OffspringKind { Explicit, IndepDiffusion, AllToOne, Balanced };

// Schedule i -> alpha_i for the balanced variant, constrained by k*alpha_i <= i.
// Values beyond the stored prefix follow the maximal floor(i/k) rule, which is
// the even-split schedule used throughout.
struct BalancedAlpha {
    std::vector<std::uint64_t> prefix;

    std::uint64_t at(std::uint64_t i, std::uint64_t k) const {
        std::uint64_t a = i < prefix.size() ? prefix[i] : i / k;
        if (k * a > i) throw ConfigError("balanced schedule violates k*alpha_i <= i");
        return a;
    }
};

struct GenfunResult {
    double value = 0.0;
    double truncation_bound = 0.0;  // nonzero only for truncated balanced series
};

// A measure on finitely supported functions X -> N, in one of four structural
// variants. Everything is immutable after construction and safe to share.
class OffspringLaw {
public:
    struct Atom {
        std::vector<std::uint64_t> f;
        double prob;
    };

    static OffspringLaw explicit_atoms(std::size_t type_count, std::vector<Atom> atoms) {
        if (type_count == 0) throw ConfigError("type count must be positive");
        if (atoms.empty()) throw ConfigError("explicit law needs at least one atom");
        double sum = 0.0;
        for (const auto& a : atoms) {
            if (a.f.size() != type_count) throw ConfigError("atom arity must equal the type count");
            if (!(a.prob >= 0.0)) throw ConfigError("atom probabilities must be non-negative");
            sum += a.prob;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw ConfigError("explicit atom probabilities must sum to 1 within 1e-12");
        OffspringLaw law(OffspringKind::Explicit, type_count);
        law.atoms_ = std::move(atoms);
        return law;
    }

    static OffspringLaw indep_diffusion(NatLaw total, std::vector<double> row) {
        OffspringLaw law(OffspringKind::IndepDiffusion, row.size(), std::move(total));
        law.row_ = validated_row(std::move(row));
        return law;
    }

    static OffspringLaw all_to_one(NatLaw total, std::vector<double> row) {
        OffspringLaw law(OffspringKind::AllToOne, row.size(), std::move(total));
        law.row_ = validated_row(std::move(row));
        return law;
    }

    // Rational row p_x = weights[x]/k with k = sum of weights.
    static OffspringLaw balanced(NatLaw total, std::vector<std::uint64_t> weights,
                                 BalancedAlpha alpha = {}, double truncation_eps = 1e-12,
                                 std::uint64_t truncation_cap = 1u << 20) {
        if (weights.empty()) throw ConfigError("balanced law needs at least one type");
        std::uint64_t k = 0;
        for (auto w : weights) k += w;
        if (k == 0) throw ConfigError("balanced weights must not all be zero");
        OffspringLaw law(OffspringKind::Balanced, weights.size(), std::move(total));
        law.weights_ = std::move(weights);
        law.denominator_ = k;
        law.row_.resize(law.weights_.size());
        for (std::size_t x = 0; x < law.weights_.size(); ++x)
            law.row_[x] = static_cast<double>(law.weights_[x]) / static_cast<double>(k);
        law.alpha_ = std::move(alpha);
        law.trunc_eps_ = truncation_eps;
        law.trunc_cap_ = truncation_cap;
        return law;
    }

    OffspringKind kind() const { return kind_; }
    std::size_t type_count() const { return type_count_; }
    const std::vector<double>& row() const { return row_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::uint64_t balanced_denominator() const { return denominator_; }

    // The law of |f|: the stored total for structured variants, atom
    // aggregation for explicit ones.
    NatLaw total_law() const {
        if (kind_ != OffspringKind::Explicit) return total_;
        std::uint64_t max_size = 0;
        for (const auto& a : atoms_) max_size = std::max(max_size, size_of(a.f) + 1);
        std::vector<double> probs(max_size, 0.0);
        for (const auto& a : atoms_) probs[size_of(a.f)] += a.prob;
        return NatLaw::finite_support(std::move(probs));
    }

    // G(z) = sum_f mu(f) prod_x z(x)^f(x), closed form per variant.
    double genfun(std::span<const double> z) const { return genfun_detail(z).value; }

    GenfunResult genfun_detail(std::span<const double> z) const {
        if (z.size() != type_count_) throw ModuleError("genfun point arity mismatch");
        for (double v : z)
            if (!(v >= 0.0 && v <= 1.0)) throw ModuleError("genfun point outside [0,1]^X");
        switch (kind_) {
            case OffspringKind::Explicit: {
                double g = 0.0;
                for (const auto& a : atoms_) g += a.prob * monomial(z, a.f);
                return {g, 0.0};
            }
            case OffspringKind::IndepDiffusion:
                return {total_.pgf(dot(row_, z)), 0.0};
            case OffspringKind::AllToOne: {
                double g = 0.0;
                for (std::size_t x = 0; x < type_count_; ++x) g += row_[x] * total_.pgf(z[x]);
                return {g, 0.0};
            }
            case OffspringKind::Balanced:
                return balanced_genfun(z);
        }
        return {0.0, 0.0};
    }

    // E[f] as a vector over X. For every variant this equals mean(total)*row
    // except the explicit one, which sums its atoms.
    std::vector<double> mean_vector() const {
        std::vector<double> m(type_count_, 0.0);
        if (kind_ == OffspringKind::Explicit) {
            for (const auto& a : atoms_)
                for (std::size_t x = 0; x < type_count_; ++x)
                    m[x] += a.prob * static_cast<double>(a.f[x]);
            return m;
        }
        const double mt = total_.mean();
        for (std::size_t x = 0; x < type_count_; ++x) m[x] = mt * row_[x];
        return m;
    }

    std::vector<std::uint64_t> sample(RngStream& rng) const {
        std::vector<std::uint64_t> f(type_count_, 0);
        sample_accumulate(rng, 1, f);
        return f;
    }

    // Pool the offspring of n parents into `out` (size |X|). Uses aggregated
    // samplers where the structure allows; explicit and balanced laws fall
    // back to value-count aggregation, which is still O(distinct values).
    void sample_accumulate(RngStream& rng, std::uint64_t n, std::vector<std::uint64_t>& out) const {
        if (out.size() != type_count_) throw ModuleError("occupation vector arity mismatch");
        if (n == 0) return;
        switch (kind_) {
            case OffspringKind::Explicit: {
                // multinomial over atoms
                std::uint64_t remaining = n;
                double mass = 1.0;
                for (std::size_t j = 0; j < atoms_.size() && remaining > 0; ++j) {
                    std::uint64_t c =
                        j + 1 == atoms_.size()
                            ? remaining
                            : sample_binomial(rng, remaining,
                                              std::clamp(atoms_[j].prob / mass, 0.0, 1.0));
                    for (std::size_t x = 0; x < type_count_; ++x) out[x] += c * atoms_[j].f[x];
                    remaining -= c;
                    mass -= atoms_[j].prob;
                }
                return;
            }
            case OffspringKind::IndepDiffusion: {
                std::uint64_t total = total_.sample_sum(rng, n);
                spread_multinomial(rng, total, out);
                return;
            }
            case OffspringKind::AllToOne: {
                // destination first, then one pooled total per destination
                std::uint64_t remaining = n;
                double mass = 1.0;
                for (std::size_t x = 0; x < type_count_ && remaining > 0; ++x) {
                    std::uint64_t c =
                        x + 1 == type_count_
                            ? remaining
                            : sample_binomial(rng, remaining, std::clamp(row_[x] / mass, 0.0, 1.0));
                    if (c > 0) out[x] += total_.sample_sum(rng, c);
                    remaining -= c;
                    mass -= row_[x];
                }
                return;
            }
            case OffspringKind::Balanced: {
                std::uint64_t loose = 0;  // particles assigned independently
                for (std::uint64_t parent = 0; parent < n; ++parent) {
                    std::uint64_t i = total_.sample(rng);
                    std::uint64_t a = alpha_.at(i, denominator_);
                    for (std::size_t x = 0; x < type_count_; ++x) out[x] += a * weights_[x];
                    loose += i - denominator_ * a;
                }
                spread_multinomial(rng, loose, out);
                return;
            }
        }
    }

private:
    OffspringLaw(OffspringKind kind, std::size_t type_count)
        : kind_(kind), type_count_(type_count), total_(NatLaw::finite_support({1.0})) {}
    OffspringLaw(OffspringKind kind, std::size_t type_count, NatLaw total)
        : kind_(kind), type_count_(type_count), total_(std::move(total)) {
        if (type_count == 0) throw ConfigError("type count must be positive");
    }

    static std::vector<double> validated_row(std::vector<double> row) {
        if (row.empty()) throw ConfigError("row must have at least one type");
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0)) throw ConfigError("row entries must be non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw ConfigError("row must be a probability vector within 1e-12");
        return row;
    }

    static std::uint64_t size_of(const std::vector<std::uint64_t>& f) {
        std::uint64_t s = 0;
        for (auto v : f) s += v;
        return s;
    }

    static double dot(const std::vector<double>& row, std::span<const double> z) {
        double v = 0.0;
        for (std::size_t x = 0; x < row.size(); ++x) v += row[x] * z[x];
        return v;
    }

    static double monomial(std::span<const double> z, const std::vector<std::uint64_t>& f) {
        double v = 1.0;
        for (std::size_t x = 0; x < f.size(); ++x) {
            for (std::uint64_t j = 0; j < f[x]; ++j) v *= z[x];
            if (v == 0.0) return 0.0;
        }
        return v;
    }

    GenfunResult balanced_genfun(std::span<const double> z) const {
        const double pz = dot(row_, z);
        double g = 0.0, head = 0.0;
        const bool finite = total_.kind() == NatLawKind::FiniteSupport;
        const std::uint64_t stop =
            finite ? static_cast<std::uint64_t>(total_.finite_probs().size()) : trunc_cap_;
        std::uint64_t i = 0;
        for (; i < stop; ++i) {
            const double rho = total_.pmf(i);
            if (rho > 0.0) {
                const std::uint64_t a = alpha_.at(i, denominator_);
                double term = 1.0;
                for (std::size_t x = 0; x < type_count_ && term > 0.0; ++x)
                    for (std::uint64_t j = 0; j < a * weights_[x]; ++j) term *= z[x];
                term *= std::pow(pz, static_cast<double>(i - denominator_ * a));
                g += rho * term;
            }
            head += rho;
            if (!finite && 1.0 - head <= trunc_eps_) {
                ++i;
                break;
            }
        }
        const double bound = finite ? 0.0 : std::max(0.0, 1.0 - head);
        if (!finite && bound > trunc_eps_)
            throw TruncationBudgetError("balanced series did not reach the tail budget");
        return {g, bound};
    }

    void spread_multinomial(RngStream& rng, std::uint64_t total,
                            std::vector<std::uint64_t>& out) const {
        std::uint64_t remaining = total;
        double mass = 1.0;
        for (std::size_t x = 0; x < type_count_ && remaining > 0; ++x) {
            std::uint64_t c = x + 1 == type_count_
                                  ? remaining
                                  : sample_binomial(rng, remaining,
                                                    std::clamp(row_[x] / mass, 0.0, 1.0));
            out[x] += c;
            remaining -= c;
            mass -= row_[x];
        }
    }

    OffspringKind kind_;
    std::size_t type_count_;
    NatLaw total_;
    std::vector<double> row_;
    std::vector<Atom> atoms_;            // Explicit
    std::vector<std::uint64_t> weights_; // Balanced: k*p_x
    std::uint64_t denominator_ = 0;      // Balanced: k
    BalancedAlpha alpha_;
    double trunc_eps_ = 1e-12;
    std::uint64_t trunc_cap_ = 1u << 20;
};

}  // namespace germ

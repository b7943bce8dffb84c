#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "germ/errors.hpp"
#include "germ/rng.hpp"

namespace germ {

inline constexpr double kProbTol = 1e-12;   // probability normalization
inline constexpr double kValueTol = 1e-10;  // exact-identity comparisons

enum class NatLawKind { FiniteSupport, Poisson, MixedPoisson, Geometric };

// One (weight, rate) atom of a finite Poisson mixture.
struct MixComponent {
    double weight;
    double rate;
};

// A probability law on the naturals with pmf/pgf/moment/sampling access.
// Parametric variants evaluate their generating functions in closed form;
// there is no truncation error anywhere in this class except pmf tail sums,
// which run in log space so rates up to 1e4 stay finite.
class NatLaw {
public:
    static NatLaw finite_support(std::vector<double> probs) {
        if (probs.empty()) throw ConfigError("finite-support law needs at least one atom");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw ConfigError("finite-support probabilities must be non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw ConfigError("finite-support probabilities must sum to 1 within 1e-12");
        NatLaw law(NatLawKind::FiniteSupport);
        law.probs_ = std::move(probs);
        while (law.probs_.size() > 1 && law.probs_.back() == 0.0) law.probs_.pop_back();
        return law;
    }

    static NatLaw poisson(double lambda) {
        if (!(lambda > 0.0)) throw ConfigError("poisson rate must be positive");
        NatLaw law(NatLawKind::Poisson);
        law.components_ = {{1.0, lambda}};
        return law;
    }

    static NatLaw mixed_poisson(std::vector<MixComponent> components) {
        if (components.empty()) throw ConfigError("mixed-poisson law needs at least one component");
        double wsum = 0.0;
        for (const auto& c : components) {
            if (!(c.weight > 0.0 && c.weight <= 1.0))
                throw ConfigError("mixed-poisson weights must lie in (0,1]");
            if (!(c.rate > 0.0)) throw ConfigError("mixed-poisson rates must be positive");
            wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > kProbTol)
            throw ConfigError("mixed-poisson weights must sum to 1 within 1e-12");
        NatLaw law(NatLawKind::MixedPoisson);
        law.components_ = std::move(components);
        return law;
    }

    static NatLaw geometric(double success_prob) {
        if (!(success_prob > 0.0 && success_prob < 1.0))
            throw ConfigError("geometric success probability must lie in (0,1)");
        NatLaw law(NatLawKind::Geometric);
        law.geom_p_ = success_prob;
        return law;
    }

    NatLawKind kind() const { return kind_; }
    const std::vector<double>& finite_probs() const { return probs_; }
    const std::vector<MixComponent>& mix_components() const { return components_; }
    double poisson_rate() const { return components_.front().rate; }
    double geometric_p() const { return geom_p_; }

    // P(T = n). Poisson terms are computed as exp(n log l - l - lgamma(n+1)).
    double pmf(std::uint64_t n) const {
        switch (kind_) {
            case NatLawKind::FiniteSupport:
                return n < probs_.size() ? probs_[n] : 0.0;
            case NatLawKind::Poisson:
            case NatLawKind::MixedPoisson: {
                double v = 0.0;
                for (const auto& c : components_) v += c.weight * poisson_pmf(n, c.rate);
                return v;
            }
            case NatLawKind::Geometric:
                return geom_p_ * std::pow(1.0 - geom_p_, static_cast<double>(n));
        }
        return 0.0;
    }

    // P(T >= n).
    double tail(std::uint64_t n) const {
        switch (kind_) {
            case NatLawKind::FiniteSupport: {
                double v = 0.0;
                for (std::uint64_t m = n; m < probs_.size(); ++m) v += probs_[m];
                return std::min(v, 1.0);
            }
            case NatLawKind::Poisson:
            case NatLawKind::MixedPoisson: {
                double head = 0.0;
                for (std::uint64_t m = 0; m < n; ++m) head += pmf(m);
                return std::max(0.0, 1.0 - head);
            }
            case NatLawKind::Geometric:
                return std::pow(1.0 - geom_p_, static_cast<double>(n));
        }
        return 0.0;
    }

    // E[t^T] for t in [0,1]; closed form for every variant.
    double pgf(double t) const {
        check_unit_interval(t);
        return pgf_derivative(t, 0);
    }

    // k-th derivative of the pgf at t in [0,1]; at t=1 this is the k-th
    // factorial moment. Every representable variant has all moments finite.
    double pgf_derivative(double t, unsigned k) const {
        check_unit_interval(t);
        switch (kind_) {
            case NatLawKind::FiniteSupport: {
                // sum_n p_n * n!/(n-k)! * t^(n-k), highest powers first
                double v = 0.0;
                for (std::size_t n = probs_.size(); n-- > k;) {
                    double falling = 1.0;
                    for (unsigned j = 0; j < k; ++j) falling *= static_cast<double>(n - j);
                    v = v * t + probs_[n] * falling;
                }
                return v;
            }
            case NatLawKind::Poisson:
            case NatLawKind::MixedPoisson: {
                double v = 0.0;
                for (const auto& c : components_)
                    v += c.weight * std::pow(c.rate, static_cast<double>(k)) *
                         std::exp(c.rate * (t - 1.0));
                return v;
            }
            case NatLawKind::Geometric: {
                // pgf p/(1-qt); k-th derivative p k! q^k (1-qt)^-(k+1)
                const double q = 1.0 - geom_p_;
                double v = geom_p_;
                for (unsigned j = 1; j <= k; ++j) v *= static_cast<double>(j) * q;
                return v / std::pow(1.0 - q * t, static_cast<double>(k + 1));
            }
        }
        return 0.0;
    }

    // E[T (T-1) ... (T-k+1)] for k >= 1.
    double factorial_moment(unsigned k) const { return pgf_derivative(1.0, k); }

    double mean() const { return pgf_derivative(1.0, 1); }

    // Ordinary moment E[T^k] via Stirling numbers of the second kind.
    double moment(unsigned k) const {
        if (k == 0) return 1.0;
        std::vector<std::vector<double>> s(k + 1, std::vector<double>(k + 1, 0.0));
        s[0][0] = 1.0;
        for (unsigned n = 1; n <= k; ++n)
            for (unsigned j = 1; j <= n; ++j)
                s[n][j] = s[n - 1][j - 1] + static_cast<double>(j) * s[n - 1][j];
        double v = 0.0;
        for (unsigned j = 1; j <= k; ++j) v += s[k][j] * factorial_moment(j);
        return v;
    }

    std::uint64_t sample(RngStream& rng) const {
        switch (kind_) {
            case NatLawKind::FiniteSupport: {
                double u = rng.uniform01();
                double cum = 0.0;
                for (std::size_t n = 0; n < probs_.size(); ++n) {
                    cum += probs_[n];
                    if (u < cum) return n;
                }
                return probs_.size() - 1;
            }
            case NatLawKind::Poisson:
                return sample_poisson(rng, components_.front().rate);
            case NatLawKind::MixedPoisson:
                return sample_poisson(rng, pick_rate(rng));
            case NatLawKind::Geometric: {
                std::geometric_distribution<long long> d(geom_p_);
                return static_cast<std::uint64_t>(d(rng));
            }
        }
        return 0;
    }

    // Sum of n iid draws in O(support) instead of O(n); this is what keeps
    // population simulations fast near the cap.
    std::uint64_t sample_sum(RngStream& rng, std::uint64_t n) const {
        if (n == 0) return 0;
        if (n == 1) return sample(rng);
        switch (kind_) {
            case NatLawKind::FiniteSupport: {
                std::uint64_t total = 0, remaining = n;
                double mass = 1.0;
                for (std::size_t v = 0; v + 1 < probs_.size() && remaining > 0; ++v) {
                    double p = mass > 0.0 ? std::clamp(probs_[v] / mass, 0.0, 1.0) : 0.0;
                    std::uint64_t c = sample_binomial(rng, remaining, p);
                    total += c * v;
                    remaining -= c;
                    mass -= probs_[v];
                }
                total += remaining * (probs_.size() - 1);
                return total;
            }
            case NatLawKind::Poisson:
                return sample_poisson(rng, static_cast<double>(n) * components_.front().rate);
            case NatLawKind::MixedPoisson: {
                // split parents over components, then one Poisson of the summed rate
                double rate_sum = 0.0;
                std::uint64_t remaining = n;
                double mass = 1.0;
                for (std::size_t j = 0; j + 1 < components_.size() && remaining > 0; ++j) {
                    double p = std::clamp(components_[j].weight / mass, 0.0, 1.0);
                    std::uint64_t c = sample_binomial(rng, remaining, p);
                    rate_sum += static_cast<double>(c) * components_[j].rate;
                    remaining -= c;
                    mass -= components_[j].weight;
                }
                rate_sum += static_cast<double>(remaining) * components_.back().rate;
                return rate_sum > 0.0 ? sample_poisson(rng, rate_sum) : 0;
            }
            case NatLawKind::Geometric:
                return sample_negative_binomial(rng, n, geom_p_);
        }
        return 0;
    }

    bool operator==(const NatLaw& other) const {
        if (kind_ != other.kind_) return false;
        switch (kind_) {
            case NatLawKind::FiniteSupport:
                return probs_ == other.probs_;
            case NatLawKind::Geometric:
                return geom_p_ == other.geom_p_;
            default:
                if (components_.size() != other.components_.size()) return false;
                for (std::size_t i = 0; i < components_.size(); ++i)
                    if (components_[i].weight != other.components_[i].weight ||
                        components_[i].rate != other.components_[i].rate)
                        return false;
                return true;
        }
    }

private:
    explicit NatLaw(NatLawKind kind) : kind_(kind) {}

    static void check_unit_interval(double t) {
        if (!(t >= 0.0 && t <= 1.0)) throw ModuleError("pgf argument must lie in [0,1]");
    }

    static double poisson_pmf(std::uint64_t n, double lambda) {
        double logp = static_cast<double>(n) * std::log(lambda) - lambda -
                      std::lgamma(static_cast<double>(n) + 1.0);
        return std::exp(logp);
    }

    double pick_rate(RngStream& rng) const {
        double u = rng.uniform01();
        double cum = 0.0;
        for (const auto& c : components_) {
            cum += c.weight;
            if (u < cum) return c.rate;
        }
        return components_.back().rate;
    }

    NatLawKind kind_;
    std::vector<double> probs_;            // FiniteSupport
    std::vector<MixComponent> components_; // Poisson (single), MixedPoisson
    double geom_p_ = 0.0;                  // Geometric
};

}  // namespace germ

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germ/errors.hpp"
#include "germ/offspring_law.hpp"
#include "germ/orders.hpp"
#include "germ/rng.hpp"
#include "germ/series.hpp"

namespace germ {

// Integer-valued transmission/listening radius law, described through its
// tail P(R >= i). The named rules keep series criteria exactly analyzable:
// a Pareto tail contributes 1/lambda0 per unit of harmonic mass, everything
// else is summable. cdf(t) = P(R < t) = 1 - tail(ceil t).
class RadiusLaw {
public:
    enum class Kind { FiniteSupport, ParetoDiscrete, GeometricTail, ExplicitTail, Mixture };

    static RadiusLaw finite_support(std::vector<double> pmf) {
        double sum = 0.0;
        for (double p : pmf) {
            if (!(p >= 0.0)) throw ConfigError("radius pmf must be non-negative");
            sum += p;
        }
        if (pmf.empty() || std::abs(sum - 1.0) > kProbTol)
            throw ConfigError("radius pmf must sum to 1 within 1e-12");
        RadiusLaw law(Kind::FiniteSupport);
        law.values_ = std::move(pmf);
        return law;
    }

    // tail(i) = min(1, 1/(lambda0 i)) for i >= 1; the o(1) freedom of the
    // asymptotic family is resolved to 0 and heads are capped at 1.
    static RadiusLaw pareto(double lambda0) {
        if (!(lambda0 > 0.0)) throw ConfigError("pareto rate must be positive");
        RadiusLaw law(Kind::ParetoDiscrete);
        law.rate_ = lambda0;
        return law;
    }

    // tail(i) = q^i; finite mean.
    static RadiusLaw geometric_tail(double q) {
        if (!(q > 0.0 && q < 1.0)) throw ConfigError("geometric tail base must lie in (0,1)");
        RadiusLaw law(Kind::GeometricTail);
        law.rate_ = q;
        return law;
    }

    // tail(i) = prefix[i-1] for 1 <= i <= len, then a constant floor
    // (mass at +infinity when the floor is positive). Non-increasing, and the
    // head must obey the standing constraint tail(1) in (0,1).
    static RadiusLaw explicit_tail(std::vector<double> prefix, double floor = 0.0) {
        if (!(floor >= 0.0 && floor <= 1.0)) throw ConfigError("tail floor must lie in [0,1]");
        double prev = 1.0;
        for (double t : prefix) {
            if (!(t >= 0.0 && t <= prev + kProbTol))
                throw ConfigError("radius tail must be non-increasing within [0,1]");
            prev = t;
        }
        if (floor > prev + kProbTol) throw ConfigError("tail floor exceeds the prefix");
        RadiusLaw law(Kind::ExplicitTail);
        law.values_ = std::move(prefix);
        law.rate_ = floor;
        if (!(law.tail(1) > 0.0 && law.tail(1) < 1.0))
            throw ConfigError("explicit radius tails need P(R >= 1) in (0,1)");
        return law;
    }

    static RadiusLaw mixture(std::vector<std::pair<double, RadiusLaw>> parts) {
        double wsum = 0.0;
        for (const auto& [w, part] : parts) {
            if (!(w > 0.0)) throw ConfigError("mixture weights must be positive");
            wsum += w;
        }
        if (parts.empty() || std::abs(wsum - 1.0) > kProbTol)
            throw ConfigError("mixture weights must sum to 1 within 1e-12");
        RadiusLaw law(Kind::Mixture);
        law.parts_ = std::move(parts);
        return law;
    }

    Kind kind() const { return kind_; }
    double pareto_rate() const { return rate_; }

    // P(R >= i); tail(0) = 1.
    double tail(std::uint64_t i) const {
        if (i == 0) return 1.0;
        switch (kind_) {
            case Kind::FiniteSupport: {
                double v = 0.0;
                for (std::uint64_t m = i; m < values_.size(); ++m) v += values_[m];
                return v;
            }
            case Kind::ParetoDiscrete:
                return std::min(1.0, 1.0 / (rate_ * static_cast<double>(i)));
            case Kind::GeometricTail:
                return std::pow(rate_, static_cast<double>(i));
            case Kind::ExplicitTail:
                return i <= values_.size() ? values_[i - 1] : rate_;
            case Kind::Mixture: {
                double v = 0.0;
                for (const auto& [w, part] : parts_) v += w * part.tail(i);
                return v;
            }
        }
        return 0.0;
    }

    // P(R < t) for real t >= 0.
    double cdf(double t) const {
        if (!(t >= 0.0)) throw ModuleError("radius cdf argument must be non-negative");
        const double c = std::ceil(t);
        if (c >= 1e18) return 1.0 - infinite_mass();
        return 1.0 - tail(static_cast<std::uint64_t>(c));
    }

    // Mass escaping to +infinity (positive only for floored explicit tails).
    double infinite_mass() const {
        switch (kind_) {
            case Kind::ExplicitTail:
                return rate_;
            case Kind::Mixture: {
                double v = 0.0;
                for (const auto& [w, part] : parts_) v += w * part.infinite_mass();
                return v;
            }
            default:
                return 0.0;
        }
    }

    // Coefficient of the harmonic part of the tail: sum_i tail(i) ~ c ln n
    // with c = harmonic_weight(); the remainder is summable for every kind.
    double harmonic_weight() const {
        switch (kind_) {
            case Kind::ParetoDiscrete:
                return 1.0 / rate_;
            case Kind::Mixture: {
                double v = 0.0;
                for (const auto& [w, part] : parts_) v += w * part.harmonic_weight();
                return v;
            }
            default:
                return 0.0;
        }
    }

    std::uint64_t sample(RngStream& rng) const {
        switch (kind_) {
            case Kind::FiniteSupport: {
                double u = rng.uniform01();
                double cum = 0.0;
                for (std::size_t v = 0; v < values_.size(); ++v) {
                    cum += values_[v];
                    if (u < cum) return v;
                }
                return values_.empty() ? 0 : values_.size() - 1;
            }
            case Kind::ParetoDiscrete: {
                const double u = 1.0 - rng.uniform01();  // in (0,1]
                const double r = std::floor(1.0 / (rate_ * u));
                return r >= 1e15 ? static_cast<std::uint64_t>(1e15)
                                 : static_cast<std::uint64_t>(r);
            }
            case Kind::GeometricTail: {
                const double u = 1.0 - rng.uniform01();
                const double r = std::floor(std::log(u) / std::log(rate_));
                return r >= 1e15 ? static_cast<std::uint64_t>(1e15)
                                 : static_cast<std::uint64_t>(std::max(0.0, r));
            }
            case Kind::ExplicitTail: {
                const double u = rng.uniform01();  // u < tail(i) <=> R >= i
                std::uint64_t r = 0;
                while (u < tail(r + 1)) {
                    ++r;
                    if (r > values_.size()) return static_cast<std::uint64_t>(1e15);  // floor mass
                }
                return r;
            }
            case Kind::Mixture: {
                double u = rng.uniform01();
                for (const auto& [w, part] : parts_) {
                    if (u < w) return part.sample(rng);
                    u -= w;
                }
                return parts_.back().second.sample(rng);
            }
        }
        return 0;
    }

private:
    explicit RadiusLaw(Kind kind) : kind_(kind) {}

    Kind kind_;
    double rate_ = 0.0;           // pareto lambda0 / geometric q / explicit floor
    std::vector<double> values_;  // pmf or tail prefix
    std::vector<std::pair<double, RadiusLaw>> parts_;
};

// Firework / reverse-firework process on the naturals: per-site station law
// over types, per-(type,site) radius law, both as prefix + periodic tail.
// The reverse process may give the root its own station law.
class RumorModel {
public:
    enum class Kind { Firework, ReverseFirework };

    static RumorModel homogeneous(Kind kind, OffspringLaw stations,
                                  std::vector<RadiusLaw> radii_per_type,
                                  std::optional<OffspringLaw> root = std::nullopt) {
        return RumorModel(kind, {}, {std::move(stations)}, {},
                          {std::move(radii_per_type)}, std::move(root));
    }

    static RumorModel heterogeneous(Kind kind, std::vector<OffspringLaw> station_prefix,
                                    std::vector<OffspringLaw> station_period,
                                    std::vector<std::vector<RadiusLaw>> radius_prefix,
                                    std::vector<std::vector<RadiusLaw>> radius_period,
                                    std::optional<OffspringLaw> root = std::nullopt) {
        return RumorModel(kind, std::move(station_prefix), std::move(station_period),
                          std::move(radius_prefix), std::move(radius_period), std::move(root));
    }

    Kind kind() const { return kind_; }
    std::size_t type_count() const { return station_period_.front().type_count(); }
    bool homogeneous_stations() const {
        return station_prefix_.empty() && station_period_.size() == 1;
    }
    bool homogeneous_radii() const { return radius_prefix_.empty() && radius_period_.size() == 1; }
    bool homogeneous() const { return homogeneous_stations() && homogeneous_radii(); }
    const std::optional<OffspringLaw>& root_law() const { return root_; }

    const OffspringLaw& station_at(std::uint64_t y) const {
        if (y == 0 && root_) return *root_;
        if (y < station_prefix_.size()) return station_prefix_[y];
        return station_period_[(y - station_prefix_.size()) % station_period_.size()];
    }

    const RadiusLaw& radius_at(std::size_t x, std::uint64_t y) const {
        const auto& site = y < radius_prefix_.size()
                               ? radius_prefix_[y]
                               : radius_period_[(y - radius_prefix_.size()) % radius_period_.size()];
        return site[x];
    }

    // Sites beyond structure_prefix() repeat with this period.
    std::uint64_t structure_prefix() const {
        return std::max<std::uint64_t>(
            root_ ? 1 : 0, std::max(station_prefix_.size(), radius_prefix_.size()));
    }
    std::uint64_t structure_period() const {
        return std::lcm(station_period_.size(), radius_period_.size());
    }

private:
    RumorModel(Kind kind, std::vector<OffspringLaw> sp, std::vector<OffspringLaw> per,
               std::vector<std::vector<RadiusLaw>> rp, std::vector<std::vector<RadiusLaw>> rper,
               std::optional<OffspringLaw> root)
        : kind_(kind),
          station_prefix_(std::move(sp)),
          station_period_(std::move(per)),
          radius_prefix_(std::move(rp)),
          radius_period_(std::move(rper)),
          root_(std::move(root)) {
        if (station_period_.empty() || radius_period_.empty())
            throw ConfigError("rumor model needs periodic station and radius rules");
        const std::size_t d = station_period_.front().type_count();
        auto check_station = [&](const OffspringLaw& law) {
            if (law.type_count() != d) throw ConfigError("station law type count mismatch");
        };
        for (const auto& l : station_prefix_) check_station(l);
        for (const auto& l : station_period_) check_station(l);
        if (root_) check_station(*root_);
        auto check_radii = [&](const std::vector<RadiusLaw>& site) {
            if (site.size() != d) throw ConfigError("radius vector must cover every type");
        };
        for (const auto& site : radius_prefix_) check_radii(site);
        for (const auto& site : radius_period_) check_radii(site);
    }

    Kind kind_;
    std::vector<OffspringLaw> station_prefix_;
    std::vector<OffspringLaw> station_period_;   // cyclic after the prefix
    std::vector<std::vector<RadiusLaw>> radius_prefix_;
    std::vector<std::vector<RadiusLaw>> radius_period_;
    std::optional<OffspringLaw> root_;
};

// P(max radius at y < t) = G(r_y(t) | y) with r_y(t,x) = P(R_{x,y} < t).
inline double max_radius_cdf(const RumorModel& model, std::uint64_t y, double t) {
    const std::size_t d = model.type_count();
    std::vector<double> z(d);
    for (std::size_t x = 0; x < d; ++x) z[x] = model.radius_at(x, y).cdf(t);
    return model.station_at(y).genfun(z);
}

}  // namespace germ

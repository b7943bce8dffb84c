#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "germ/orders.hpp"
#include "germ/rumor.hpp"
#include "germ/series.hpp"

namespace germ {

enum class RumorOutcome { Survives, SurvivesAS, SurvivesPositive, Dies, Undecided };

struct RumorVerdict {
    RumorOutcome outcome = RumorOutcome::Undecided;
    SeriesVerdict series;
    std::string note;
};

namespace detail {

// Site classes: prefix sites keep their index, tail sites collapse onto the
// combined period. Criteria sums over large n only see the periodic classes.
struct SiteClasses {
    std::uint64_t prefix;
    std::uint64_t period;
    std::uint64_t count() const { return prefix + period; }
    std::uint64_t class_of(std::uint64_t site) const {
        return site < prefix ? site : prefix + (site - prefix) % period;
    }
    std::uint64_t representative(std::uint64_t cls) const { return cls; }
};

inline SiteClasses site_classes(const RumorModel& m) {
    return {m.structure_prefix(), m.structure_period()};
}

// First-order tail structure of the whole model, period-averaged:
//   exponent = (1/L) sum_{periodic classes} sum_x m_x * harmonic_weight_x.
// All radius-rule remainders are square-summable, so products of the
// generating-function factors behave like n^(-exponent) up to bounded
// constants; positive escaping mass at a mean-positive type pins the factors
// below 1 uniformly instead.
struct TailStructure {
    double exponent = 0.0;
    bool escaping_mass = false;
};

inline TailStructure tail_structure(const RumorModel& m) {
    const auto cls = site_classes(m);
    TailStructure out;
    for (std::uint64_t c = cls.prefix; c < cls.count(); ++c) {
        const std::uint64_t site = cls.representative(c);
        const auto mean = m.station_at(site).mean_vector();
        for (std::size_t x = 0; x < mean.size(); ++x) {
            out.exponent += mean[x] * m.radius_at(x, site).harmonic_weight();
            if (mean[x] > 0.0 && m.radius_at(x, site).infinite_mass() > 0.0)
                out.escaping_mass = true;
        }
    }
    out.exponent /= static_cast<double>(cls.period);
    return out;
}

}  // namespace detail

// Homogeneous firework criterion: the series sum_n prod_{i<=n} G(r(i+1)|0)
// converges iff the rumor survives (quenched, for almost every environment
// with a station at the origin). Classification is by certificate:
//   - a zero factor means certain relay beyond some distance (finite sum);
//   - escaping radius mass bounds every factor below 1 (geometric);
//   - otherwise terms are n^(-p) up to constants with p = tail exponent.
inline RumorVerdict firework_homog_series(const RumorModel& model, std::uint64_t horizon = 10000) {
    if (model.kind() != RumorModel::Kind::Firework)
        throw ModuleError("criterion applies to firework models");
    if (!model.homogeneous()) throw ModuleError("criterion applies to homogeneous models");

    RumorVerdict v;
    auto factor = [&](std::uint64_t d) { return max_radius_cdf(model, 0, static_cast<double>(d)); };
    double prod = 1.0, acc = 0.0;
    std::uint64_t next = 10;
    bool zero_factor = false;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        const double g = factor(n + 1);
        if (g == 0.0) zero_factor = true;
        prod *= g;
        acc += prod;
        if (n + 1 == next || n + 1 == horizon) {
            v.series.partial_sums.emplace_back(n + 1, acc);
            if (n + 1 == next) next *= 10;
        }
    }

    const auto tail = detail::tail_structure(model);
    SeriesMethod m;
    if (zero_factor) {
        m.tag = SeriesMethod::Tag::ClosedForm;
        m.name = "zero-factor: certain relay beyond a finite distance";
        v.series = SeriesVerdict::certified(SeriesKind::Converges, m, v.series.partial_sums);
    } else if (tail.escaping_mass) {
        m.tag = SeriesMethod::Tag::ClosedForm;
        m.name = "escaping radius mass: factors bounded below 1";
        v.series = SeriesVerdict::certified(SeriesKind::Converges, m, v.series.partial_sums);
    } else {
        m.tag = SeriesMethod::Tag::ClosedForm;
        m.name = "pareto-exponent";
        m.exponent = tail.exponent;
        v.series = SeriesVerdict::certified(
            tail.exponent > 1.0 ? SeriesKind::Converges : SeriesKind::Diverges, m,
            v.series.partial_sums);
    }
    v.outcome = v.series.kind == SeriesKind::Converges ? RumorOutcome::Survives : RumorOutcome::Dies;
    return v;
}

// Homogeneous reverse firework: W = sum_i (1 - G(r(i)|1)) is infinite iff the
// process survives almost surely (given a station at the origin); W < inf,
// equivalently a finite-mean maximal radius, is extinction.
inline RumorVerdict reverse_homog_W(const RumorModel& model, std::uint64_t horizon = 10000) {
    if (model.kind() != RumorModel::Kind::ReverseFirework)
        throw ModuleError("criterion applies to reverse firework models");
    if (!(model.homogeneous_radii() && model.homogeneous_stations()))
        throw ModuleError("criterion applies to homogeneous models");

    RumorVerdict v;
    double acc = 0.0;
    std::uint64_t next = 10;
    for (std::uint64_t i = 0; i < horizon; ++i) {
        acc += 1.0 - max_radius_cdf(model, 1, static_cast<double>(i));
        if (i + 1 == next || i + 1 == horizon) {
            v.series.partial_sums.emplace_back(i + 1, acc);
            if (i + 1 == next) next *= 10;
        }
    }

    const auto tail = detail::tail_structure(model);
    SeriesMethod m;
    m.tag = SeriesMethod::Tag::Comparison;
    if (tail.exponent > 0.0 || tail.escaping_mass) {
        m.name = tail.escaping_mass ? "escaping mass: terms bounded below" : "harmonic tails";
        m.exponent = tail.exponent;
        v.series = SeriesVerdict::certified(SeriesKind::Diverges, m, v.series.partial_sums);
        v.outcome = RumorOutcome::SurvivesAS;
    } else {
        m.name = "summable tails";
        v.series = SeriesVerdict::certified(SeriesKind::Converges, m, v.series.partial_sums);
        v.outcome = RumorOutcome::Dies;
    }
    return v;
}

// Heterogeneous firework sufficient condition: convergence of
// sum_n prod_{i<=n} G(r_i(n-i+1)|i) gives survival; the theorem has no
// converse, so everything else stays Undecided (the series verdict still
// records a divergence certificate when one exists).
inline RumorVerdict firework_hetero_series(const RumorModel& model, std::uint64_t horizon = 2000) {
    if (model.kind() != RumorModel::Kind::Firework)
        throw ModuleError("criterion applies to firework models");

    const auto cls = detail::site_classes(model);
    // factor table: class x distance
    std::vector<std::vector<double>> g(cls.count(), std::vector<double>(horizon + 2, 1.0));
    for (std::uint64_t c = 0; c < cls.count(); ++c)
        for (std::uint64_t d = 1; d <= horizon + 1; ++d)
            g[c][d] = max_radius_cdf(model, cls.representative(c), static_cast<double>(d));

    RumorVerdict v;
    double acc = 0.0;
    std::uint64_t next = 10;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        double logp = 0.0;
        bool zero = false;
        for (std::uint64_t i = 0; i <= n && !zero; ++i) {
            const double gi = g[cls.class_of(i)][n - i + 1];
            if (gi == 0.0) zero = true;
            else logp += std::log(gi);
        }
        acc += zero ? 0.0 : std::exp(logp);
        if (n + 1 == next || n + 1 == horizon) {
            v.series.partial_sums.emplace_back(n + 1, acc);
            if (n + 1 == next) next *= 10;
        }
    }

    const auto tail = detail::tail_structure(model);
    // residues of n (mod period) killed by a recurring zero factor
    std::set<std::uint64_t> killed;
    for (std::uint64_t c = cls.prefix; c < cls.count(); ++c)
        for (std::uint64_t d = 1; d <= cls.period + 2; ++d)
            if (g[c][d] == 0.0)
                killed.insert((c - cls.prefix + d - 1) % cls.period);
    const bool all_killed = killed.size() == cls.period;

    SeriesMethod m;
    if (all_killed) {
        m.tag = SeriesMethod::Tag::ClosedForm;
        m.name = "zero-factor: certain relay beyond a finite distance";
        v.series = SeriesVerdict::certified(SeriesKind::Converges, m, v.series.partial_sums);
    } else if (tail.escaping_mass) {
        m.tag = SeriesMethod::Tag::ClosedForm;
        m.name = "escaping radius mass: factors bounded below 1";
        v.series = SeriesVerdict::certified(SeriesKind::Converges, m, v.series.partial_sums);
    } else {
        m.tag = SeriesMethod::Tag::ClosedForm;
        m.name = "pareto-exponent (period averaged)";
        m.exponent = tail.exponent;
        v.series = SeriesVerdict::certified(
            tail.exponent > 1.0 ? SeriesKind::Converges : SeriesKind::Diverges, m,
            v.series.partial_sums);
    }
    if (v.series.kind == SeriesKind::Converges) {
        v.outcome = RumorOutcome::Survives;
    } else {
        v.outcome = RumorOutcome::Undecided;
        v.note = "sufficient condition only: divergence does not imply extinction here";
    }
    return v;
}

// Heterogeneous reverse firework:
//  (1) sum_k (1 - G(r_{n+k}(k)|n+k)) = inf for every n  <=>  a.s. survival;
//      by periodicity the divergence is shift-invariant, so the tail
//      exponent decides it.
//  (2) sum_n prod_k G(r_{n+k}(k)|n+k) < inf gives positive-probability
//      survival; with periodic tails the inner products are eventually
//      periodic, so (2) can only fire when they vanish.
inline RumorVerdict reverse_hetero_checks(const RumorModel& model, std::uint64_t horizon = 4000) {
    if (model.kind() != RumorModel::Kind::ReverseFirework)
        throw ModuleError("criterion applies to reverse firework models");

    RumorVerdict v;
    const auto tail = detail::tail_structure(model);
    const auto cls = detail::site_classes(model);

    // partial sums of condition (1) at n = 0 as evidence
    double acc = 0.0;
    std::uint64_t next = 10;
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        acc += 1.0 - max_radius_cdf(model, k, static_cast<double>(k));
        if (k == next || k == horizon) {
            v.series.partial_sums.emplace_back(k, acc);
            if (k == next) next *= 10;
        }
    }

    if (tail.exponent > 0.0 || tail.escaping_mass) {
        SeriesMethod m;
        m.tag = SeriesMethod::Tag::Comparison;
        m.name = "harmonic tails, uniform over shifts";
        m.exponent = tail.exponent;
        v.series = SeriesVerdict::certified(SeriesKind::Diverges, m, v.series.partial_sums);
        v.outcome = RumorOutcome::SurvivesAS;
        return v;
    }

    // summable tails: evaluate the inner products over one structural cycle
    bool any_zero_inner = false, all_zero_inner = true;
    for (std::uint64_t n = 0; n < cls.count(); ++n) {
        double logp = 0.0;
        bool zero = false;
        for (std::uint64_t k = 1; k <= horizon && !zero; ++k) {
            const double gk = max_radius_cdf(model, n + k, static_cast<double>(k));
            if (gk == 0.0) zero = true;
            else logp += std::log(gk);
        }
        any_zero_inner |= zero;
        all_zero_inner &= zero;
    }
    SeriesMethod m;
    m.tag = SeriesMethod::Tag::Comparison;
    if (all_zero_inner) {
        m.name = "vanishing inner products";
        v.series = SeriesVerdict::certified(SeriesKind::Converges, m, v.series.partial_sums);
        v.outcome = RumorOutcome::SurvivesPositive;
        return v;
    }
    m.name = "summable tails: inner products periodic and positive";
    v.series = SeriesVerdict::undecided(v.series.partial_sums);
    v.outcome = RumorOutcome::Undecided;
    v.note = any_zero_inner ? "some inner products vanish, others stay positive"
                            : "both sufficient conditions fail on this structure";
    return v;
}

// Collapses an independently diffusing multi-type model onto its single-type
// equivalent: per-site radius law sum_x p(y,x) r_{x,y}, same totals. The
// max-radius law is preserved pointwise.
inline RumorModel single_station_counterpart(const RumorModel& model) {
    const auto cls = detail::site_classes(model);
    auto reduce_site = [&](std::uint64_t site) {
        const auto& law = model.station_at(site);
        if (law.kind() != OffspringKind::IndepDiffusion)
            throw ModuleError("not reducible: stations must diffuse independently");
        std::vector<std::pair<double, RadiusLaw>> parts;
        for (std::size_t x = 0; x < law.type_count(); ++x)
            if (law.row()[x] > 0.0) parts.emplace_back(law.row()[x], model.radius_at(x, site));
        std::vector<RadiusLaw> radii{parts.size() == 1 ? parts.front().second
                                                       : RadiusLaw::mixture(std::move(parts))};
        return std::make_pair(OffspringLaw::indep_diffusion(law.total_law(), {1.0}),
                              std::move(radii));
    };

    std::vector<OffspringLaw> sp, per;
    std::vector<std::vector<RadiusLaw>> rp, rper;
    for (std::uint64_t s = 0; s < cls.prefix; ++s) {
        auto [law, radii] = reduce_site(s);
        sp.push_back(std::move(law));
        rp.push_back(std::move(radii));
    }
    for (std::uint64_t c = 0; c < cls.period; ++c) {
        auto [law, radii] = reduce_site(cls.prefix + c);
        per.push_back(std::move(law));
        rper.push_back(std::move(radii));
    }
    std::optional<OffspringLaw> root;
    if (model.root_law()) {
        if (model.root_law()->kind() != OffspringKind::IndepDiffusion)
            throw ModuleError("not reducible: stations must diffuse independently");
        root = OffspringLaw::indep_diffusion(model.root_law()->total_law(), {1.0});
    }
    return RumorModel::heterogeneous(model.kind(), std::move(sp), std::move(per), std::move(rp),
                                     std::move(rper), std::move(root));
}

enum class TransferOutcome { TransferSurvival, TransferExtinction, NotApplicable };

struct TransferResult {
    TransferOutcome outcome = TransferOutcome::NotApplicable;
    RumorVerdict mu_verdict;   // classification of the germ-larger model
    RumorVerdict nu_verdict;   // classification of the germ-smaller model
    bool assumption_ok = false;
    std::string note;
};

namespace detail {

// Eventual cdf dominance r_mu(t) <= r_nu(t) for all t beyond the checked
// horizon: decided by the harmonic weights, then escaping mass, then a
// geometric ladder of spot checks for the summable remainders.
inline bool eventual_tail_dominates(const RadiusLaw& mu, const RadiusLaw& nu,
                                    std::uint64_t from) {
    const double wm = mu.harmonic_weight(), wn = nu.harmonic_weight();
    if (wm > wn + 1e-15) return true;
    if (wm < wn - 1e-15) return false;
    const double fm = mu.infinite_mass(), fn = nu.infinite_mass();
    if (fm > fn + 1e-15) return true;
    if (fm < fn - 1e-15) return false;
    for (std::uint64_t t = from; t < from * 1024; t *= 2)
        if (mu.tail(t) < nu.tail(t) - 1e-12) return false;
    return true;
}

inline bool classify_survives(const RumorVerdict& v) {
    return v.outcome == RumorOutcome::Survives || v.outcome == RumorOutcome::SurvivesAS ||
           v.outcome == RumorOutcome::SurvivesPositive;
}

inline RumorVerdict classify(const RumorModel& m) {
    if (m.kind() == RumorModel::Kind::Firework)
        return m.homogeneous() ? firework_homog_series(m) : firework_hetero_series(m);
    return m.homogeneous_stations() && m.homogeneous_radii() ? reverse_homog_W(m)
                                                             : reverse_hetero_checks(m);
}

}  // namespace detail

// Survival/extinction transfer across a certified order: with mu >=germ nu
// (delta certified by `order`) and radius cdfs satisfying
// max(r_mu(t), delta) <= r_nu(t) beyond T, a surviving nu forces mu to
// survive, and an a.s.-dying mu forces nu to die (the extinction direction
// needs homogeneity, as does any firework transfer).
inline TransferResult germ_rumor_transfer(const RumorModel& mu, const RumorModel& nu,
                                          const OrderVerdict& order, double T,
                                          std::uint64_t check_horizon = 4096) {
    TransferResult res;
    if (mu.kind() != nu.kind()) {
        res.note = "kind mismatch";
        return res;
    }
    if (mu.type_count() != nu.type_count()) {
        res.note = "type count mismatch";
        return res;
    }
    double delta = 0.0;
    if (order.kind == OrderKind::GermDominates) delta = order.delta;
    else if (order.kind != OrderKind::PgfDominates) {
        res.note = "no dominance certificate";
        return res;
    }

    // radius comparison over one structural cycle of both models
    const auto cm = detail::site_classes(mu);
    const auto cn = detail::site_classes(nu);
    const std::uint64_t span = std::max(cm.prefix, cn.prefix) + std::lcm(cm.period, cn.period);
    const std::uint64_t t0 = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(T)));
    for (std::uint64_t site = 0; site < span; ++site) {
        for (std::size_t x = 0; x < mu.type_count(); ++x) {
            const auto& rm = mu.radius_at(x, site);
            const auto& rn = nu.radius_at(x, site);
            for (std::uint64_t t = t0; t <= check_horizon; ++t)
                if (std::max(rm.cdf(static_cast<double>(t)), delta) >
                    rn.cdf(static_cast<double>(t)) + 1e-12) {
                    res.note = "radius comparison fails at t=" + std::to_string(t);
                    return res;
                }
            if (rn.cdf(std::max(T, 1.0)) + 1e-12 < delta) {
                res.note = "delta exceeds the comparison cdf at T";
                return res;
            }
            if (!detail::eventual_tail_dominates(rm, rn, check_horizon)) {
                res.note = "radius tails are not eventually dominated";
                return res;
            }
        }
    }
    res.assumption_ok = true;

    const bool both_homog = mu.homogeneous() && nu.homogeneous();
    const bool firework = mu.kind() == RumorModel::Kind::Firework;
    if (firework && !both_homog) {
        res.note = "firework transfer is stated for homogeneous processes";
        return res;
    }

    res.nu_verdict = detail::classify(nu);
    res.mu_verdict = detail::classify(mu);
    if (detail::classify_survives(res.nu_verdict)) {
        res.outcome = TransferOutcome::TransferSurvival;
        res.note = "smaller model survives, so the larger one does";
        return res;
    }
    if (res.mu_verdict.outcome == RumorOutcome::Dies && (firework || both_homog)) {
        res.outcome = TransferOutcome::TransferExtinction;
        res.note = "larger model dies, so the smaller one does";
        return res;
    }
    res.note = "assumptions hold but neither direction is certified";
    return res;
}

}  // namespace germ

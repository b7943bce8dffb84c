#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germ/errors.hpp"
#include "germ/nat_law.hpp"
#include "germ/rng.hpp"
#include "germ/series.hpp"

namespace germ {

// Monotone mean schedule m_n = limit + sign * coeff / (n + offset)^expo.
// coeff = 0 makes the schedule constant. This is the recognized closed-form
// family: p-series tails and (for expo = 2, coeff = 1) a telescoping product.
struct SequenceRule {
    double limit = 1.0;
    double coeff = 0.0;
    double offset = 2.0;
    double expo = 2.0;
    int sign = -1;

    double at(std::uint64_t n) const {
        if (coeff == 0.0) return limit;
        return limit + sign * coeff / std::pow(static_cast<double>(n) + offset, expo);
    }

    bool constant() const { return coeff == 0.0; }
};

// Time-indexed law rule: an explicit prefix, then one of the tail rules.
class BpveModel {
public:
    enum class TailKind { Constant, Periodic, BernoulliSeq, TwoPointSeq };

    static BpveModel constant(NatLaw law, std::vector<NatLaw> prefix = {}) {
        BpveModel m(TailKind::Constant, std::move(prefix));
        m.period_.push_back(std::move(law));
        m.validate();
        return m;
    }

    static BpveModel periodic(std::vector<NatLaw> period, std::vector<NatLaw> prefix = {}) {
        if (period.empty()) throw ConfigError("periodic tail needs at least one law");
        BpveModel m(TailKind::Periodic, std::move(prefix));
        m.period_ = std::move(period);
        m.validate();
        return m;
    }

    // Bernoulli laws with success schedule a_n = seq(n) in (0,1].
    static BpveModel bernoulli_seq(SequenceRule seq, std::vector<NatLaw> prefix = {}) {
        BpveModel m(TailKind::BernoulliSeq, std::move(prefix));
        m.seq_ = seq;
        m.validate();
        return m;
    }

    // Laws on {0, v} with mean schedule m_n = seq(n), so p_n(v) = seq(n)/v.
    static BpveModel two_point_seq(std::uint64_t v, SequenceRule seq,
                                   std::vector<NatLaw> prefix = {}) {
        if (v == 0) throw ConfigError("two-point support value must be positive");
        BpveModel m(TailKind::TwoPointSeq, std::move(prefix));
        m.two_point_ = v;
        m.seq_ = seq;
        m.validate();
        return m;
    }

    TailKind tail_kind() const { return kind_; }
    const std::vector<NatLaw>& prefix() const { return prefix_; }
    const std::vector<NatLaw>& period() const { return period_; }
    const SequenceRule& seq() const { return seq_; }
    std::uint64_t two_point_value() const { return two_point_; }

    NatLaw law_at(std::uint64_t n) const {
        if (n < prefix_.size()) return prefix_[n];
        const std::uint64_t k = n - prefix_.size();
        switch (kind_) {
            case TailKind::Constant:
                return period_.front();
            case TailKind::Periodic:
                return period_[k % period_.size()];
            case TailKind::BernoulliSeq: {
                const double a = seq_.at(n);
                if (!(a > 0.0 && a <= 1.0)) throw ModuleError("bernoulli schedule left (0,1]");
                return NatLaw::finite_support({1.0 - a, a});
            }
            case TailKind::TwoPointSeq: {
                const double p = seq_.at(n) / static_cast<double>(two_point_);
                if (!(p > 0.0 && p <= 1.0)) throw ModuleError("two-point schedule left (0,1]");
                std::vector<double> probs(two_point_ + 1, 0.0);
                probs[0] = 1.0 - p;
                probs[two_point_] = p;
                return NatLaw::finite_support(std::move(probs));
            }
        }
        throw ModuleError("unreachable tail kind");
    }

    // Law built from the schedule's limiting parameter; used to evaluate
    // limsup criteria exactly on convergent-schedule tails.
    NatLaw tail_limit_law() const {
        switch (kind_) {
            case TailKind::Constant:
                return period_.front();
            case TailKind::Periodic:
                throw ModuleError("periodic tails have no single limit law");
            case TailKind::BernoulliSeq:
                return NatLaw::finite_support({1.0 - seq_.limit, seq_.limit});
            case TailKind::TwoPointSeq: {
                const double p = seq_.limit / static_cast<double>(two_point_);
                std::vector<double> probs(two_point_ + 1, 0.0);
                probs[0] = 1.0 - p;
                probs[two_point_] = p;
                return NatLaw::finite_support(std::move(probs));
            }
        }
        throw ModuleError("unreachable tail kind");
    }

private:
    BpveModel(TailKind kind, std::vector<NatLaw> prefix)
        : kind_(kind), prefix_(std::move(prefix)) {}

    // standing assumption: rho_n(0) < 1 everywhere it is representable
    void validate() const {
        for (std::uint64_t n = 0; n < prefix_.size() + std::max<std::size_t>(period_.size(), 4); ++n)
            if (!(law_at(n).pmf(0) < 1.0))
                throw ConfigError("law at time " + std::to_string(n) + " is the zero law");
        if ((kind_ == TailKind::BernoulliSeq || kind_ == TailKind::TwoPointSeq)) {
            const double L = seq_.limit;
            if (kind_ == TailKind::BernoulliSeq && !(L > 0.0 && L <= 1.0))
                throw ConfigError("bernoulli schedule limit must lie in (0,1]");
            if (kind_ == TailKind::TwoPointSeq &&
                !(L > 0.0 && L <= static_cast<double>(two_point_)))
                throw ConfigError("two-point schedule limit must lie in (0,v]");
        }
    }

    TailKind kind_;
    std::vector<NatLaw> prefix_;
    std::vector<NatLaw> period_;
    SequenceRule seq_{};
    std::uint64_t two_point_ = 1;
};

// Strictly increasing block breakpoints n_0 < n_1 < ...
struct BlockSpec {
    std::vector<std::uint64_t> breakpoints;

    explicit BlockSpec(std::vector<std::uint64_t> pts) : breakpoints(std::move(pts)) {
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
            if (breakpoints[i] >= breakpoints[i + 1])
                throw ConfigError("block breakpoints must be strictly increasing");
    }
};

// phi_{n_{i+1}-1} o ... o phi_{n_i} evaluated at t; the innermost factor is
// the one at time n_i.
inline double compose_blocks(const BpveModel& model, const BlockSpec& blocks, std::size_t i,
                             double t) {
    if (i + 1 >= blocks.breakpoints.size()) throw ModuleError("block index out of range");
    double v = t;
    for (std::uint64_t n = blocks.breakpoints[i]; n < blocks.breakpoints[i + 1]; ++n)
        v = model.law_at(n).pgf(v);
    return v;
}

enum class BpveVerdict { Survives, Dies, Inconclusive };

struct BinarySurvival {
    BpveVerdict verdict = BpveVerdict::Inconclusive;
    double partial_product = 1.0;   // prod_{n<N} a_n
    std::optional<double> limit;    // exact when the schedule telescopes
    std::string certificate;
};

// Binary BPVE (offspring in {0,1}): survives iff sum (1-a_n) converges, with
// survival probability prod a_n. The expo=2, coeff=1 schedule telescopes to
// the exact limit (offset-1)/offset.
inline BinarySurvival survival_binary(const SequenceRule& a, std::uint64_t horizon) {
    BinarySurvival out;
    for (std::uint64_t n = 0; n < horizon; ++n) {
        const double an = a.at(n);
        if (!(an > 0.0 && an <= 1.0)) throw ModuleError("a_n must lie in (0,1]");
        out.partial_product *= an;
    }
    if (a.constant()) {
        if (a.limit >= 1.0) {
            out.verdict = BpveVerdict::Survives;
            out.limit = 1.0;
            out.certificate = "constant a_n = 1";
        } else {
            out.verdict = BpveVerdict::Dies;
            out.limit = 0.0;
            out.certificate = "geometric decay";
        }
        return out;
    }
    if (a.limit < 1.0 || a.sign > 0) {
        // terms 1-a_n do not vanish (or schedule exceeds 1, rejected above)
        out.verdict = BpveVerdict::Dies;
        out.limit = 0.0;
        out.certificate = "1-a_n bounded away from 0";
        return out;
    }
    // a_n = 1 - coeff/(n+offset)^expo
    auto p = classify_power_series(a.expo);
    if (p.kind == SeriesKind::Converges) {
        out.verdict = BpveVerdict::Survives;
        out.certificate = "p-series exponent " + std::to_string(a.expo);
        if (a.expo == 2.0 && a.coeff == 1.0 && a.offset > 1.0)
            out.limit = (a.offset - 1.0) / a.offset;  // telescoping product
    } else {
        out.verdict = BpveVerdict::Dies;
        out.limit = 0.0;
        out.certificate = "p-series exponent " + std::to_string(a.expo) + " diverges";
    }
    return out;
}

struct CriterionResult {
    BpveVerdict verdict = BpveVerdict::Inconclusive;
    double limsup = 0.0;
};

namespace detail {

// limsup over the tail rule of a continuous functional of the law; exact for
// constant/periodic tails, the schedule limit for convergent schedules.
template <typename F>
double tail_limsup(const BpveModel& model, const F& value_of) {
    switch (model.tail_kind()) {
        case BpveModel::TailKind::Constant:
            return value_of(model.period().front());
        case BpveModel::TailKind::Periodic: {
            double v = -std::numeric_limits<double>::infinity();
            for (const auto& law : model.period()) v = std::max(v, value_of(law));
            return v;
        }
        default:
            return value_of(model.tail_limit_law());
    }
}

}  // namespace detail

// Survival criterion: limsup_n (2 rho_n(0) + rho_n(1)) < 1. Sufficient only,
// so a failed inequality is Inconclusive.
inline CriterionResult check_example_bpve1(const BpveModel& model) {
    CriterionResult res;
    res.limsup = detail::tail_limsup(
        model, [](const NatLaw& law) { return 2.0 * law.pmf(0) + law.pmf(1); });
    res.verdict = res.limsup < 1.0 ? BpveVerdict::Survives : BpveVerdict::Inconclusive;
    return res;
}

// Survival criterion: limsup_n sum_{k<=k0} (k0+1-k) rho_n(k) < k0.
inline CriterionResult check_prop_bpve1(const BpveModel& model, std::uint64_t k0) {
    if (k0 == 0) throw ModuleError("k0 must be positive");
    CriterionResult res;
    res.limsup = detail::tail_limsup(model, [&](const NatLaw& law) {
        double s = 0.0;
        for (std::uint64_t k = 0; k <= k0; ++k)
            s += static_cast<double>(k0 + 1 - k) * law.pmf(k);
        return s;
    });
    res.verdict =
        res.limsup < static_cast<double>(k0) ? BpveVerdict::Survives : BpveVerdict::Inconclusive;
    return res;
}

struct MomentSeriesResult {
    BpveVerdict verdict = BpveVerdict::Inconclusive;
    double series_partial = 0.0;   // sum of (m2-m1)/m1 / prod m1 over [n0, N)
    double inf_products = 0.0;     // running inf of prod_{i=n0..j} m1_i
    std::string certificate;
};

// Moment conditions on the comparison model: the series
// sum_j (m2_j - m1_j)/m1_j (prod_{i=n0}^j m1_i)^{-1} must converge and the
// running products must stay bounded away from 0. Certificates are exact per
// tail rule; everything else stays Inconclusive.
inline MomentSeriesResult check_bertrodzuc(const BpveModel& model, std::uint64_t n0,
                                           std::uint64_t horizon) {
    MomentSeriesResult res;
    double prod = 1.0, inf = std::numeric_limits<double>::infinity();
    for (std::uint64_t j = n0; j < horizon; ++j) {
        NatLaw law = model.law_at(j);
        const double m1 = law.mean();
        const double m2 = law.moment(2);
        if (!(m1 > 0.0)) throw ModuleError("first moments must be positive");
        prod *= m1;
        inf = std::min(inf, prod);
        res.series_partial += (m2 - m1) / m1 / prod;
    }
    res.inf_products = inf;

    SeriesKind series = SeriesKind::Undecided;
    bool inf_positive = false;
    switch (model.tail_kind()) {
        case BpveModel::TailKind::Constant:
        case BpveModel::TailKind::Periodic: {
            double per_prod = 1.0, ratio_max = 0.0;
            bool zero_terms = true;
            for (const auto& law : model.period()) {
                const double m1 = law.mean(), m2 = law.moment(2);
                per_prod *= m1;
                ratio_max = std::max(ratio_max, (m2 - m1) / m1);
                zero_terms = zero_terms && std::abs(m2 - m1) < 1e-15;
            }
            if (per_prod > 1.0 + 1e-12) {
                series = SeriesKind::Converges;  // geometric decay of 1/prod
                inf_positive = true;
                res.certificate = "periodic product > 1: geometric series";
            } else if (zero_terms) {
                series = SeriesKind::Converges;
                inf_positive = per_prod >= 1.0 - 1e-12;
                res.certificate = "zero second-moment gap";
            } else if (ratio_max > 0.0) {
                series = SeriesKind::Diverges;  // terms bounded below
                res.certificate = "periodic product <= 1 with positive gap";
            }
            break;
        }
        case BpveModel::TailKind::BernoulliSeq: {
            // m2 = m1: the series is identically zero past the prefix
            series = SeriesKind::Converges;
            inf_positive = model.seq().limit >= 1.0 && model.seq().sign < 0 &&
                           model.seq().expo > 1.0;
            res.certificate = inf_positive
                                  ? "zero gap + p-series product bound"
                                  : "zero gap, product not bounded below";
            break;
        }
        case BpveModel::TailKind::TwoPointSeq: {
            // constant gap v-1; behavior driven by the product growth
            if (model.seq().limit > 1.0 + 1e-12) {
                series = SeriesKind::Converges;
                inf_positive = true;
                res.certificate = "limit mean > 1: geometric series";
            } else {
                series = SeriesKind::Diverges;
                res.certificate = "bounded products against a constant gap";
            }
            break;
        }
    }
    res.verdict = (series == SeriesKind::Converges && inf_positive) ? BpveVerdict::Survives
                                                                    : BpveVerdict::Inconclusive;
    return res;
}

// Truncated reversed-tail-sum comparison at one time step:
//   sum_{i<=k0} P(T_mu >= i+1) t^i  >=  sum_i P(T_nu >= i+1) t^i
// implies phi_mu(t) <= phi_nu(t). The right side collapses to
// (1 - phi_nu(t))/(1-t) for t < 1 and to the mean at t = 1.
inline bool tail_sum_compare(const NatLaw& mu, const NatLaw& nu, double t, std::uint64_t k0) {
    if (!(t >= 0.0 && t <= 1.0)) throw ModuleError("t must lie in [0,1]");
    double left = 0.0;
    for (std::uint64_t i = 0; i <= k0; ++i)
        left += mu.tail(i + 1) * std::pow(t, static_cast<double>(i));
    const double right = t < 1.0 ? (1.0 - nu.pgf(t)) / (1.0 - t) : nu.mean();
    return left >= right - 1e-12;
}

struct GermCompareResult {
    bool holds = false;
    double worst_margin = 0.0;  // min over (n,t) of phi_nu - phi_mu
    std::uint64_t witness_n = 0;
    double witness_t = 1.0;
    bool tail_certified = false;
    std::string certificate;
};

// phi_mu_n(t) <= phi_nu_n(t) on [delta,1] for n in [n0, N), the endpoint
// handled by the mean comparison. Tails are certified exactly for
// constant/periodic pairs (finitely many distinct law pairs) and via the
// k0-truncated tail-sum bound against Bernoulli-schedule comparisons.
inline GermCompareResult germ_compare_bpve(const BpveModel& mu, const BpveModel& nu, double delta,
                                           std::uint64_t n0, std::uint64_t horizon,
                                           std::size_t t_points = 256) {
    if (!(delta >= 0.0 && delta < 1.0)) throw ModuleError("delta must lie in [0,1)");
    GermCompareResult res;
    res.holds = true;
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (std::uint64_t n = n0; n < horizon; ++n) {
        NatLaw lm = mu.law_at(n);
        NatLaw ln = nu.law_at(n);
        for (std::size_t j = 0; j < t_points; ++j) {
            const double t = delta + (1.0 - delta) * static_cast<double>(j) /
                                         static_cast<double>(t_points);
            const double margin = ln.pgf(t) - lm.pgf(t);
            if (margin < res.worst_margin) {
                res.worst_margin = margin;
                res.witness_n = n;
                res.witness_t = t;
            }
        }
        const double mean_gap = lm.mean() - ln.mean();  // needs >= 0 at t=1
        if (mean_gap < -1e-12) {
            res.holds = false;
            res.worst_margin = std::min(res.worst_margin, mean_gap);
            res.witness_n = n;
            res.witness_t = 1.0;
        }
        if (res.worst_margin < -1e-12) res.holds = false;
        if (!res.holds) return res;
    }

    const bool mu_finite_tail = mu.tail_kind() == BpveModel::TailKind::Constant ||
                                mu.tail_kind() == BpveModel::TailKind::Periodic;
    const bool nu_finite_tail = nu.tail_kind() == BpveModel::TailKind::Constant ||
                                nu.tail_kind() == BpveModel::TailKind::Periodic;
    if (mu_finite_tail && nu_finite_tail) {
        res.tail_certified = true;  // checked above: the tail cycles through checked pairs
        res.certificate = "constant/periodic tails";
    } else if (mu_finite_tail && nu.tail_kind() == BpveModel::TailKind::BernoulliSeq) {
        // sum_{i<=k0} P(T_mu >= i+1) delta^i >= 1 >= a_n bounds every tail time
        for (std::uint64_t k0 = 1; k0 <= 4 && !res.tail_certified; ++k0) {
            bool all = true;
            for (const auto& law : mu.period()) {
                double left = 0.0;
                for (std::uint64_t i = 0; i <= k0; ++i)
                    left += law.tail(i + 1) * std::pow(delta, static_cast<double>(i));
                all = all && left >= 1.0;
            }
            if (all) {
                res.tail_certified = true;
                res.certificate = "truncated tail-sum bound, k0=" + std::to_string(k0);
            }
        }
    }
    return res;
}

// Alive-at-horizon frequency for the time-indexed population process.
struct BpveMcEstimate {
    double frequency = 0.0;
    double stderr_ = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
};

inline BpveMcEstimate simulate_bpve(const BpveModel& model, std::uint64_t horizon,
                                    std::uint64_t reps, std::uint64_t cap, std::uint64_t seed) {
    if (cap == 0) throw ModuleError("population cap must be at least 1");
    std::vector<NatLaw> laws;  // resolve the time rule once, share across reps
    laws.reserve(horizon);
    for (std::uint64_t n = 0; n < horizon; ++n) laws.push_back(model.law_at(n));
    std::uint64_t alive = 0;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        RngStream rng(seed, rep);
        std::uint64_t pop = 1;
        for (std::uint64_t n = 0; n < horizon && pop > 0; ++n) {
            pop = laws[n].sample_sum(rng, pop);
            if (pop > cap) break;  // capped: counted alive
        }
        if (pop > 0) ++alive;
    }
    BpveMcEstimate est;
    est.reps = reps;
    est.seed = seed;
    est.frequency = static_cast<double>(alive) / static_cast<double>(reps);
    est.stderr_ = std::sqrt(est.frequency * (1.0 - est.frequency) / static_cast<double>(reps));
    return est;
}

}  // namespace germ

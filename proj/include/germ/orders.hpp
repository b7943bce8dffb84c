#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germ/errors.hpp"
#include "germ/nat_law.hpp"
#include "germ/offspring_law.hpp"

namespace germ {

// Two families of measures indexed by the same site set, with a common type set.
struct FamilyPair {
    std::vector<OffspringLaw> mu;
    std::vector<OffspringLaw> nu;

    FamilyPair(std::vector<OffspringLaw> m, std::vector<OffspringLaw> n)
        : mu(std::move(m)), nu(std::move(n)) {
        if (mu.empty() || mu.size() != nu.size())
            throw ConfigError("families must be non-empty and equally sized");
        for (const auto& law : mu)
            if (law.type_count() != mu.front().type_count())
                throw ConfigError("all laws must share one type count");
        for (const auto& law : nu)
            if (law.type_count() != mu.front().type_count())
                throw ConfigError("all laws must share one type count");
    }

    std::size_t site_count() const { return mu.size(); }
    std::size_t type_count() const { return mu.front().type_count(); }
};

struct GridSpec {
    std::size_t points_per_axis = 64;
    std::vector<double> delta_ladder = {0.0, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999};
    double tolerance = 1e-9;
    std::size_t point_budget = 1000000;

    void validate() const {
        if (points_per_axis < 2) throw ConfigError("grid needs at least 2 points per axis");
        double prev = -1.0;
        for (double d : delta_ladder) {
            if (!(d >= 0.0 && d < 1.0 && d > prev))
                throw ConfigError("delta ladder must be strictly ascending in [0,1)");
            prev = d;
        }
        if (!(tolerance > 0.0)) throw ConfigError("grid tolerance must be positive");
    }
};

enum class OrderKind { PgfDominates, GermDominates, CounterexampleFound, Inconclusive };

// Outcome of a dominance check. Grid passes are falsifiers, not proofs:
// `certified` is set only when an analytic sufficient condition also holds,
// and `method` records which route produced the verdict.
struct OrderVerdict {
    OrderKind kind = OrderKind::Inconclusive;
    double delta = 0.0;                  // GermDominates
    double max_delta_tried = 0.0;        // Inconclusive
    std::size_t witness_site = 0;        // CounterexampleFound
    std::vector<double> witness_point;   // CounterexampleFound
    double g_mu = 0.0, g_nu = 0.0;       // CounterexampleFound
    bool certified = false;
    std::string method = "grid";
};

namespace detail {

// Walks the product grid {lo + j*h}^d in lexicographic order; pred returns
// false to report a violation and stop.
template <typename Pred>
bool scan_grid(std::size_t dim, std::size_t points, double lo, const Pred& pred,
               std::size_t budget) {
    double h = (1.0 - lo) / static_cast<double>(points - 1);
    double total = std::pow(static_cast<double>(points), static_cast<double>(dim));
    if (total > static_cast<double>(budget)) throw GridBudgetError("grid exceeds the point budget");
    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> z(dim, lo);
    for (;;) {
        if (!pred(z, h)) return false;
        std::size_t axis = dim;
        while (axis > 0) {
            --axis;
            if (++idx[axis] < points) break;
            idx[axis] = 0;
            if (axis == 0) return true;
        }
        for (std::size_t x = 0; x < dim; ++x)
            z[x] = idx[x] + 1 == points ? 1.0 : lo + h * static_cast<double>(idx[x]);
    }
}

// One refinement pass: re-check the half-step neighborhood of a near-tie.
inline bool refine_ok(const OffspringLaw& mu, const OffspringLaw& nu, const std::vector<double>& z,
                      double h, double lo, double tol, std::vector<double>& bad) {
    std::size_t d = z.size();
    std::vector<int> off(d, -1);
    for (;;) {
        std::vector<double> p(d);
        for (std::size_t x = 0; x < d; ++x)
            p[x] = std::min(1.0, std::max(lo, z[x] + off[x] * h / 2.0));
        if (mu.genfun(p) > nu.genfun(p) + tol) {
            bad = p;
            return false;
        }
        std::size_t axis = d;
        bool done = true;
        while (axis > 0) {
            --axis;
            if (++off[axis] <= 1) {
                done = false;
                break;
            }
            off[axis] = -1;
        }
        if (done) return true;
    }
}

// Core pass: G_mu <= G_nu + tol on [lo,1]^X for every site. Reports the
// lexicographically smallest violating (site, point).
inline OrderVerdict dominance_on(const FamilyPair& pair, const GridSpec& grid, double lo) {
    grid.validate();
    OrderVerdict verdict;
    for (std::size_t y = 0; y < pair.site_count(); ++y) {
        const auto& mu = pair.mu[y];
        const auto& nu = pair.nu[y];
        bool ok = scan_grid(
            pair.type_count(), grid.points_per_axis, lo,
            [&](const std::vector<double>& z, double h) {
                double gm = mu.genfun(z);
                double gn = nu.genfun(z);
                if (gm > gn + grid.tolerance) {
                    verdict.kind = OrderKind::CounterexampleFound;
                    verdict.witness_site = y;
                    verdict.witness_point = z;
                    verdict.g_mu = gm;
                    verdict.g_nu = gn;
                    return false;
                }
                if (std::abs(gm - gn) <= grid.tolerance) {
                    std::vector<double> bad;
                    if (!refine_ok(mu, nu, z, h, lo, grid.tolerance, bad)) {
                        verdict.kind = OrderKind::CounterexampleFound;
                        verdict.witness_site = y;
                        verdict.witness_point = bad;
                        verdict.g_mu = mu.genfun(bad);
                        verdict.g_nu = nu.genfun(bad);
                        return false;
                    }
                }
                return true;
            },
            grid.point_budget);
        if (!ok) return verdict;
    }
    verdict.kind = OrderKind::PgfDominates;
    return verdict;
}

}  // namespace detail

// mu >=pgf nu check on the full cube: dominance iff G_mu <= G_nu everywhere.
inline OrderVerdict check_pgf_order(const FamilyPair& pair, const GridSpec& grid = {}) {
    OrderVerdict v = detail::dominance_on(pair, grid, 0.0);
    v.method = "grid";
    return v;
}

// Smallest ladder delta whose sub-cube [delta,1]^X passes; Inconclusive keeps
// the largest delta tried.
inline OrderVerdict find_germ_delta(const FamilyPair& pair, const GridSpec& grid = {}) {
    grid.validate();
    for (double d : grid.delta_ladder) {
        OrderVerdict v = detail::dominance_on(pair, grid, d);
        if (v.kind == OrderKind::PgfDominates) {
            v.kind = OrderKind::GermDominates;
            v.delta = d;
            v.method = "grid";
            return v;
        }
    }
    OrderVerdict v;
    v.kind = OrderKind::Inconclusive;
    v.max_delta_tried = grid.delta_ladder.back();
    v.method = "grid";
    return v;
}

struct TotalsCheck {
    bool holds = true;
    std::size_t witness_site = 0;
    double witness_t = 0.0;
    double phi_mu = 0.0, phi_nu = 0.0;
};

// Necessary direction of the totals comparison: phi_mu_y <= phi_nu_y on
// [delta,1] for every site. A failure refutes germ dominance at this delta.
inline TotalsCheck totals_necessary_check(const FamilyPair& pair, double delta,
                                          const GridSpec& grid = {}) {
    grid.validate();
    if (!(delta >= 0.0 && delta < 1.0)) throw ModuleError("delta must lie in [0,1)");
    TotalsCheck res;
    for (std::size_t y = 0; y < pair.site_count(); ++y) {
        NatLaw tm = pair.mu[y].total_law();
        NatLaw tn = pair.nu[y].total_law();
        for (std::size_t j = 0; j < grid.points_per_axis; ++j) {
            double t = j + 1 == grid.points_per_axis
                           ? 1.0
                           : delta + (1.0 - delta) * static_cast<double>(j) /
                                         static_cast<double>(grid.points_per_axis - 1);
            double pm = tm.pgf(t);
            double pn = tn.pgf(t);
            if (pm > pn + grid.tolerance) {
                res.holds = false;
                res.witness_site = y;
                res.witness_t = t;
                res.phi_mu = pm;
                res.phi_nu = pn;
                return res;
            }
        }
    }
    return res;
}

// Mean-gap sufficient condition: if E[U] > E[W] there is a delta_1 < 1 with
// E[U e^{-tU}] >= E[W] for all t in [0, -ln delta_1]. In pgf form the left
// side at z = e^{-t} is z phi_U'(z), non-decreasing in z, so the threshold is
// found by bisection and any larger z keeps the inequality.
inline std::optional<double> germ_sufficient_mean(const NatLaw& U, const NatLaw& W,
                                                  double pad = 1e-6) {
    const double target = W.mean();
    if (!(U.mean() > target)) return std::nullopt;
    auto lhs = [&](double z) { return z * U.pgf_derivative(z, 1); };
    if (lhs(0.0) >= target) return 0.0;  // holds on all of [0,1]
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (lhs(mid) >= target ? hi : lo) = mid;
    }
    double delta = std::min(hi + pad, 1.0 - 1e-9);
    return lhs(delta) >= target ? std::optional<double>(delta) : std::nullopt;
}

// Factorial-moment condition at a given delta_1, parity-correct orientation:
//   k even:  phi_U^(k+1)(delta_1) >= phi_W^(k+1)(1)
//   k odd :  phi_W^(k+1)(delta_1) >= phi_U^(k+1)(1)
// requires factorial moments of orders 1..k to agree. A true result certifies
// germ dominance at delta_1 for independently diffusing families sharing P.
inline bool germ_sufficient_factorial(const NatLaw& U, const NatLaw& W, unsigned k, double delta1,
                                      double moment_tol = 1e-9) {
    if (!(delta1 > 0.0 && delta1 < 1.0)) throw ModuleError("delta_1 must lie in (0,1)");
    for (unsigned i = 1; i <= k; ++i) {
        double fu = U.factorial_moment(i);
        double fw = W.factorial_moment(i);
        if (std::abs(fu - fw) > moment_tol * std::max(1.0, std::abs(fw)))
            throw ModuleError("factorial moments up to k must agree for this condition");
    }
    if (k % 2 == 0) return U.pgf_derivative(delta1, k + 1) >= W.factorial_moment(k + 1);
    return W.pgf_derivative(delta1, k + 1) >= U.factorial_moment(k + 1);
}

// Mixed-Poisson sufficient condition at a given delta:
// E[Lambda_1 exp((delta-1) Lambda_1)] >= E[Lambda_2] for finite mixing laws.
inline bool mixed_poisson_germ(const std::vector<MixComponent>& L1,
                               const std::vector<MixComponent>& L2, double delta) {
    if (!(delta < 1.0)) throw ModuleError("delta must be smaller than 1");
    double lhs = 0.0;
    for (const auto& c : L1) lhs += c.weight * c.rate * std::exp((delta - 1.0) * c.rate);
    double rhs = 0.0;
    for (const auto& c : L2) rhs += c.weight * c.rate;
    return lhs >= rhs;
}

inline std::vector<MixComponent> mixing_of(const NatLaw& law) {
    switch (law.kind()) {
        case NatLawKind::Poisson:
        case NatLawKind::MixedPoisson:
            return law.mix_components();
        default:
            throw ModuleError("law has no Poisson mixing representation");
    }
}

// Grid verdict plus an analytic certificate when one applies. Analytic
// certification needs independently diffusing families sharing the row at
// every site; the certified delta is uniform over sites (max of per-site
// thresholds), reported only when that max stays below 1.
inline OrderVerdict certify_germ(const FamilyPair& pair, const GridSpec& grid = {}) {
    OrderVerdict v = find_germ_delta(pair, grid);
    if (v.kind != OrderKind::GermDominates) return v;

    bool indep = true;
    for (std::size_t y = 0; indep && y < pair.site_count(); ++y) {
        indep = pair.mu[y].kind() == OffspringKind::IndepDiffusion &&
                pair.nu[y].kind() == OffspringKind::IndepDiffusion;
        if (indep)
            for (std::size_t x = 0; x < pair.type_count(); ++x)
                if (std::abs(pair.mu[y].row()[x] - pair.nu[y].row()[x]) > kProbTol) indep = false;
    }
    if (!indep) return v;

    double uniform = 0.0;
    for (std::size_t y = 0; y < pair.site_count(); ++y) {
        auto d = germ_sufficient_mean(pair.mu[y].total_law(), pair.nu[y].total_law());
        if (!d) return v;
        uniform = std::max(uniform, *d);
    }
    if (uniform < 1.0) {
        v.certified = true;
        v.delta = std::max(v.delta, uniform);
        v.method = "grid+mean-certificate";
    }
    return v;
}

}  // namespace germ

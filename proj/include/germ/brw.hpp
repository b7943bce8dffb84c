#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "germ/errors.hpp"
#include "germ/offspring_law.hpp"
#include "germ/rng.hpp"

namespace germ {

// Branching random walk on a finite site set; sites double as types, so every
// law's type count must equal the number of sites.
struct BrwModel {
    std::vector<OffspringLaw> laws;

    explicit BrwModel(std::vector<OffspringLaw> site_laws) : laws(std::move(site_laws)) {
        if (laws.empty()) throw ConfigError("brw model needs at least one site");
        for (const auto& law : laws)
            if (law.type_count() != laws.size())
                throw ConfigError("every site law must have typeCount == siteCount");
    }

    std::size_t site_count() const { return laws.size(); }
};

struct ExtinctionVector {
    std::vector<double> q;
    std::uint64_t iterations = 0;
    double residual = 0.0;
    bool converged = false;  // false: max-iterations exceeded, q is the last iterate
};

// Smallest fixed point of q = G(q), reached monotonically from the zero
// vector. Near-critical models may exhaust maxIter; that is reported, never
// silently accepted.
inline ExtinctionVector extinction_vector(const BrwModel& model, double tol = 1e-12,
                                          std::uint64_t max_iter = 1000000) {
    if (!(tol > 0.0)) throw ModuleError("tolerance must be positive");
    const std::size_t d = model.site_count();
    ExtinctionVector out;
    out.q.assign(d, 0.0);
    std::vector<double> next(d, 0.0);
    for (std::uint64_t it = 0; it < max_iter; ++it) {
        double change = 0.0;
        for (std::size_t x = 0; x < d; ++x) {
            next[x] = model.laws[x].genfun(out.q);
            change = std::max(change, std::abs(next[x] - out.q[x]));
        }
        out.q.swap(next);
        out.iterations = it + 1;
        if (change < tol) {
            out.residual = change;
            out.converged = true;
            return out;
        }
        out.residual = change;
    }
    return out;
}

using Matrix = std::vector<std::vector<double>>;

// m[x][y]: expected offspring a particle at x places at y. Exact per variant.
inline Matrix first_moment_matrix(const BrwModel& model) {
    Matrix m(model.site_count());
    for (std::size_t x = 0; x < model.site_count(); ++x) m[x] = model.laws[x].mean_vector();
    return m;
}

// Power iteration for the spectral radius of a non-negative matrix, shifted
// by +I so periodic matrices converge; deterministic all-ones start.
inline double perron_root(const Matrix& m, double tol = 1e-10, std::uint64_t max_iter = 100000) {
    const std::size_t d = m.size();
    for (const auto& row : m)
        if (row.size() != d) throw ModuleError("perron root needs a square matrix");
    std::vector<double> x(d, 1.0), y(d, 0.0);
    double prev = -1.0;
    int stable = 0;
    for (std::uint64_t it = 0; it < max_iter; ++it) {
        double max_ratio = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double v = x[i];
            for (std::size_t j = 0; j < d; ++j) v += m[i][j] * x[j];
            y[i] = v;
            if (x[i] > 0.0) max_ratio = std::max(max_ratio, v / x[i]);
            norm = std::max(norm, v);
        }
        if (norm == 0.0) return 0.0;
        for (std::size_t i = 0; i < d; ++i) x[i] = y[i] / norm;
        double root = max_ratio - 1.0;
        stable = std::abs(root - prev) < tol * std::max(1.0, std::abs(root)) ? stable + 1 : 0;
        prev = root;
        if (stable >= 3) return root;
    }
    return prev;
}

struct ProjectionCheck {
    bool ok = false;
    Matrix projected;  // |U| x |U| transition matrix when ok
};

// A surjective g : X -> U projects the walk iff the fiber sums
// sum_{w in g^-1(u)} p(x,w) depend on x only through g(x).
inline ProjectionCheck fbrw_project_check(const Matrix& P, const std::vector<std::size_t>& g,
                                          double tol = 1e-9) {
    const std::size_t d = P.size();
    if (g.size() != d) throw ConfigError("projection map arity mismatch");
    std::size_t classes = 0;
    for (auto u : g) classes = std::max(classes, u + 1);
    std::vector<bool> seen(classes, false);
    for (auto u : g) seen[u] = true;
    for (bool s : seen)
        if (!s) throw ConfigError("projection map must be surjective onto 0..|U|-1");
    for (const auto& row : P) {
        if (row.size() != d) throw ConfigError("transition matrix must be square");
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0)) throw ConfigError("transition entries must be non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol) throw ConfigError("transition rows must sum to 1");
    }

    Matrix fiber(d, std::vector<double>(classes, 0.0));
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t w = 0; w < d; ++w) fiber[x][g[w]] += P[x][w];

    ProjectionCheck res;
    res.projected.assign(classes, std::vector<double>(classes, 0.0));
    std::vector<bool> filled(classes, false);
    for (std::size_t x = 0; x < d; ++x) {
        const std::size_t u = g[x];
        if (!filled[u]) {
            res.projected[u] = fiber[x];
            filled[u] = true;
            continue;
        }
        for (std::size_t v = 0; v < classes; ++v)
            if (std::abs(res.projected[u][v] - fiber[x][v]) > tol) return res;  // ok = false
    }
    res.ok = true;
    return res;
}

enum class SurvivalVerdict { Survives, Dies };

struct FbrwResult {
    SurvivalVerdict verdict = SurvivalVerdict::Dies;
    double perron_root = 0.0;
    Matrix projected_moments;
};

inline bool natlaw_approx_equal(const NatLaw& a, const NatLaw& b, double tol = 1e-12) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case NatLawKind::FiniteSupport: {
            const auto& pa = a.finite_probs();
            const auto& pb = b.finite_probs();
            if (pa.size() != pb.size()) return false;
            for (std::size_t i = 0; i < pa.size(); ++i)
                if (std::abs(pa[i] - pb[i]) > tol) return false;
            return true;
        }
        case NatLawKind::Geometric:
            return std::abs(a.geometric_p() - b.geometric_p()) <= tol;
        default: {
            const auto& ca = a.mix_components();
            const auto& cb = b.mix_components();
            if (ca.size() != cb.size()) return false;
            for (std::size_t i = 0; i < ca.size(); ++i)
                if (std::abs(ca[i].weight - cb[i].weight) > tol ||
                    std::abs(ca[i].rate - cb[i].rate) > tol)
                    return false;
            return true;
        }
    }
}

// Classify root > 1 (strictly, with a 1e-9 margin) as survival; criticality
// counts as extinction for this criterion.
inline SurvivalVerdict classify_root(double root) {
    return root > 1.0 + 1e-9 ? SurvivalVerdict::Survives : SurvivalVerdict::Dies;
}

// Survival classifier for projectable walks with independent diffusion:
// builds the projected first-moment matrix and tests its Perron root.
inline FbrwResult fbrw_survival(const BrwModel& model, const std::vector<std::size_t>& g) {
    const std::size_t d = model.site_count();
    Matrix P(d);
    for (std::size_t x = 0; x < d; ++x) {
        if (model.laws[x].kind() != OffspringKind::IndepDiffusion)
            throw ModuleError("projection classifier needs independent diffusion at every site");
        P[x] = model.laws[x].row();
    }
    auto proj = fbrw_project_check(P, g);
    if (!proj.ok) throw ModuleError("projection invalid: fiber sums differ within a class");
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t w = 0; w < d; ++w)
            if (g[x] == g[w] &&
                !natlaw_approx_equal(model.laws[x].total_law(), model.laws[w].total_law()))
                throw ModuleError("projection invalid: totals are not g-invariant");

    const std::size_t classes = proj.projected.size();
    FbrwResult res;
    res.projected_moments.assign(classes, std::vector<double>(classes, 0.0));
    std::vector<double> class_mean(classes, 0.0);
    for (std::size_t x = 0; x < d; ++x) class_mean[g[x]] = model.laws[x].total_law().mean();
    for (std::size_t u = 0; u < classes; ++u)
        for (std::size_t v = 0; v < classes; ++v)
            res.projected_moments[u][v] = class_mean[u] * proj.projected[u][v];
    res.perron_root = perron_root(res.projected_moments);
    res.verdict = classify_root(res.perron_root);
    return res;
}

// q_mu(x) <= q_nu(x)(1-delta) + delta whenever mu >=germ nu with this delta.
inline std::vector<double> germ_transfer_bound(const std::vector<double>& q_nu, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw ModuleError("delta must lie in [0,1)");
    std::vector<double> bound(q_nu.size());
    for (std::size_t x = 0; x < q_nu.size(); ++x) bound[x] = q_nu[x] * (1.0 - delta) + delta;
    return bound;
}

struct BrwTrajectory {
    std::vector<std::vector<std::uint64_t>> occupation;  // per generation
    bool alive = false;
    bool capped = false;  // population exceeded the cap; counted alive
};

// Generation-synchronous simulation. Survival is increasing in population,
// so runs that blow past the cap are classified alive and stopped.
inline BrwTrajectory simulate_brw(const BrwModel& model, std::size_t start, std::uint64_t horizon,
                                  std::uint64_t population_cap, RngStream& rng,
                                  bool keep_trajectory = true) {
    if (population_cap == 0) throw ModuleError("population cap must be at least 1");
    if (start >= model.site_count()) throw ModuleError("start site out of range");
    const std::size_t d = model.site_count();
    BrwTrajectory out;
    std::vector<std::uint64_t> occ(d, 0);
    occ[start] = 1;
    if (keep_trajectory) out.occupation.push_back(occ);
    std::uint64_t population = 1;
    for (std::uint64_t gen = 0; gen < horizon; ++gen) {
        std::vector<std::uint64_t> next(d, 0);
        for (std::size_t x = 0; x < d; ++x)
            if (occ[x] > 0) model.laws[x].sample_accumulate(rng, occ[x], next);
        occ.swap(next);
        population = 0;
        for (auto c : occ) population += c;
        if (keep_trajectory) out.occupation.push_back(occ);
        if (population == 0) return out;  // dead
        if (population > population_cap) {
            out.alive = true;
            out.capped = true;
            return out;
        }
    }
    out.alive = population > 0;
    return out;
}

struct McEstimate {
    double frequency = 0.0;
    double stderr_ = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
};

// Alive-at-horizon frequency over independent replication streams.
inline McEstimate brw_alive_frequency(const BrwModel& model, std::size_t start,
                                      std::uint64_t horizon, std::uint64_t population_cap,
                                      std::uint64_t reps, std::uint64_t seed) {
    std::uint64_t alive = 0;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        RngStream rng(seed, rep);
        if (simulate_brw(model, start, horizon, population_cap, rng, false).alive) ++alive;
    }
    McEstimate est;
    est.reps = reps;
    est.seed = seed;
    est.frequency = static_cast<double>(alive) / static_cast<double>(reps);
    est.stderr_ = std::sqrt(est.frequency * (1.0 - est.frequency) / static_cast<double>(reps));
    return est;
}

}  // namespace germ

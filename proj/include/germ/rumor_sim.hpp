#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "germ/errors.hpp"
#include "germ/rng.hpp"
#include "germ/rumor.hpp"

namespace germ {

using Environment = std::vector<std::vector<std::uint64_t>>;  // site -> counts per type

// Station counts for sites 0..N from a dedicated seed; optionally re-draws
// the origin until it holds at least one station (quenched conditioning).
inline Environment draw_environment(const RumorModel& model, std::uint64_t n_sites,
                                    std::uint64_t env_seed, bool condition_on_origin) {
    Environment env(n_sites + 1);
    for (std::uint64_t y = 0; y <= n_sites; ++y) {
        RngStream rng(env_seed, y);
        env[y] = model.station_at(y).sample(rng);
    }
    if (condition_on_origin) {
        RngStream rng(env_seed, n_sites + 1);
        for (std::uint64_t tries = 0; tries < 1000000; ++tries) {
            std::uint64_t total = 0;
            for (auto c : env[0]) total += c;
            if (total > 0) return env;
            env[0] = model.station_at(0).sample(rng);
        }
        throw ModuleError("origin conditioning failed: the station law is almost surely empty");
    }
    return env;
}

enum class SimMode { Annealed, Quenched };

struct RumorSimResult {
    double raw_frequency = 0.0;          // origin-empty runs count as not reached
    double conditioned_frequency = 0.0;  // among runs with a station at the origin
    double stderr_ = 0.0;                // of the conditioned frequency
    std::uint64_t reps = 0;
    std::uint64_t excluded = 0;  // runs without a station at the origin
    std::uint64_t seed = 0;
    double mean_depth = 0.0;  // rightmost informed site, averaged over all runs
    std::vector<std::uint64_t> depths;  // per run, when requested
};

namespace detail {

inline std::uint64_t max_radius_draw(const RumorModel& model, std::uint64_t site,
                                     const std::vector<std::uint64_t>& counts, RngStream& rng) {
    std::uint64_t best = 0;
    bool any = false;
    for (std::size_t x = 0; x < counts.size(); ++x)
        for (std::uint64_t i = 0; i < counts[x]; ++i) {
            best = std::max(best, model.radius_at(x, site).sample(rng));
            any = true;
        }
    return any ? best : 0;
}

// Firework on 0..N: informed sites form the interval [0, frontier]; radii are
// drawn lazily while the frontier advances.
inline std::uint64_t firework_depth(const RumorModel& model, const Environment& env,
                                    std::uint64_t n_sites, RngStream& rng) {
    std::uint64_t frontier = std::min(max_radius_draw(model, 0, env[0], rng), n_sites);
    for (std::uint64_t w = 1; w <= frontier && frontier < n_sites; ++w) {
        const std::uint64_t reach = w + max_radius_draw(model, w, env[w], rng);
        frontier = std::min(std::max(frontier, reach), n_sites);
    }
    return frontier;
}

// Reverse firework: a station site activates when its radius covers some
// already-active site, in either direction; rounds until a fixed point.
inline std::uint64_t reverse_depth(const RumorModel& model, const Environment& env,
                                   std::uint64_t n_sites, RngStream& rng) {
    std::vector<std::uint64_t> radius(n_sites + 1, 0);
    std::vector<bool> has_station(n_sites + 1, false), active(n_sites + 1, false);
    for (std::uint64_t y = 0; y <= n_sites; ++y) {
        std::uint64_t total = 0;
        for (auto c : env[y]) total += c;
        has_station[y] = total > 0;
        radius[y] = max_radius_draw(model, y, env[y], rng);
    }
    if (!has_station[0]) return 0;
    active[0] = true;
    std::uint64_t depth = 0;
    for (bool changed = true; changed;) {
        changed = false;
        // distance to the nearest active site, two sweeps
        std::vector<std::uint64_t> dist(n_sites + 1, n_sites + 2);
        std::uint64_t run = n_sites + 2;
        for (std::uint64_t y = 0; y <= n_sites; ++y) {
            run = active[y] ? 0 : (run > n_sites ? run : run + 1);
            dist[y] = std::min(dist[y], run);
        }
        run = n_sites + 2;
        for (std::uint64_t y = n_sites + 1; y-- > 0;) {
            run = active[y] ? 0 : (run > n_sites ? run : run + 1);
            dist[y] = std::min(dist[y], run);
        }
        for (std::uint64_t y = 1; y <= n_sites; ++y) {
            if (active[y] || !has_station[y]) continue;
            if (dist[y] <= radius[y]) {
                active[y] = true;
                depth = std::max(depth, y);
                changed = true;
            }
        }
    }
    return depth;
}

}  // namespace detail

// Reach-N experiment. Quenched mode fixes the station counts from env_seed
// and resamples only radii per replication; annealed mode resamples both.
inline RumorSimResult simulate_rumor(const RumorModel& model, std::uint64_t n_sites,
                                     std::uint64_t reps, SimMode mode, std::uint64_t seed,
                                     std::uint64_t env_seed = 1, bool condition_on_origin = false,
                                     bool keep_depths = false) {
    if (n_sites == 0) throw ModuleError("need at least one site beyond the origin");
    RumorSimResult out;
    out.reps = reps;
    out.seed = seed;

    Environment quenched_env;
    if (mode == SimMode::Quenched)
        quenched_env = draw_environment(model, n_sites, env_seed, condition_on_origin);

    std::uint64_t reached = 0;
    double depth_acc = 0.0;
    if (keep_depths) out.depths.reserve(reps);
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        RngStream rng(seed, rep);
        Environment fresh;
        const Environment* env = &quenched_env;
        if (mode == SimMode::Annealed) {
            fresh.resize(n_sites + 1);
            for (std::uint64_t y = 0; y <= n_sites; ++y)
                fresh[y] = model.station_at(y).sample(rng);
            env = &fresh;
        }
        std::uint64_t origin_total = 0;
        for (auto c : (*env)[0]) origin_total += c;
        if (origin_total == 0) {
            ++out.excluded;
            if (keep_depths) out.depths.push_back(0);
            continue;
        }
        const std::uint64_t depth = model.kind() == RumorModel::Kind::Firework
                                        ? detail::firework_depth(model, *env, n_sites, rng)
                                        : detail::reverse_depth(model, *env, n_sites, rng);
        depth_acc += static_cast<double>(depth);
        if (keep_depths) out.depths.push_back(depth);
        if (depth >= n_sites) ++reached;
    }
    out.raw_frequency = static_cast<double>(reached) / static_cast<double>(reps);
    const std::uint64_t included = reps - out.excluded;
    out.conditioned_frequency =
        included > 0 ? static_cast<double>(reached) / static_cast<double>(included) : 0.0;
    out.stderr_ = included > 0 ? std::sqrt(out.conditioned_frequency *
                                           (1.0 - out.conditioned_frequency) /
                                           static_cast<double>(included))
                               : 0.0;
    out.mean_depth = depth_acc / static_cast<double>(reps);
    return out;
}

}  // namespace germ

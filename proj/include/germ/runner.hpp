#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "germ/config.hpp"
#include "germ/examples_catalog.hpp"
#include "germ/report.hpp"
#include "germ/rumor_sim.hpp"

namespace germ {

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> horizon;
};

namespace runner_detail {

inline Json run_order_check(const Json& cfg, std::uint64_t) {
    std::vector<OffspringLaw> mu, nu;
    for (const auto& l : config::require<Json>(cfg, "mu", "config"))
        mu.push_back(config::parse_offspring_law(l, "config.mu"));
    for (const auto& l : config::require<Json>(cfg, "nu", "config"))
        nu.push_back(config::parse_offspring_law(l, "config.nu"));
    FamilyPair pair(std::move(mu), std::move(nu));
    GridSpec grid = cfg.contains("grid") ? config::parse_grid(cfg.at("grid"), "config.grid")
                                         : GridSpec{};
    const auto mode = config::optional_or<std::string>(cfg, "mode", "certify");
    Json out;
    if (mode == "pgf") {
        out["verdict"] = to_json(check_pgf_order(pair, grid));
    } else if (mode == "germ") {
        out["verdict"] = to_json(find_germ_delta(pair, grid));
    } else if (mode == "certify") {
        auto v = certify_germ(pair, grid);
        out["verdict"] = to_json(v);
        if (v.kind == OrderKind::GermDominates) {
            auto totals = totals_necessary_check(pair, v.delta, grid);
            out["totals_check"] = Json{{"holds", totals.holds}};
        }
    } else {
        throw ConfigError("config.mode: unknown mode '" + mode + "'");
    }
    return out;
}

inline Json run_brw(const Json& cfg, std::uint64_t seed, const RunOverrides& o) {
    auto model = config::parse_brw_model(cfg.at("model"), "config.model");
    const auto task = config::require<std::string>(cfg, "task", "config");
    Json out;
    if (task == "extinction") {
        out["extinction"] = to_json(extinction_vector(
            model, config::optional_or<double>(cfg, "tol", 1e-12),
            config::optional_or<std::uint64_t>(cfg, "max_iter", 1000000)));
        out["first_moments"] = first_moment_matrix(model);
    } else if (task == "fbrw") {
        auto g = config::require<std::vector<std::size_t>>(cfg, "g", "config");
        out["fbrw"] = to_json(fbrw_survival(model, g));
    } else if (task == "simulate") {
        const std::uint64_t horizon =
            o.horizon.value_or(config::optional_or<std::uint64_t>(cfg, "horizon", 50));
        const std::uint64_t reps =
            o.reps.value_or(config::optional_or<std::uint64_t>(cfg, "reps", 10000));
        const std::uint64_t cap = config::optional_or<std::uint64_t>(cfg, "cap", 1000000);
        const std::size_t start = config::optional_or<std::size_t>(cfg, "start", 0);
        out["monte_carlo"] = to_json(brw_alive_frequency(model, start, horizon, cap, reps, seed));
        if (o.out_dir && config::optional_or<bool>(cfg, "trajectory_csv", false)) {
            RngStream rng(seed, reps + 1);
            auto traj = simulate_brw(model, start, horizon, cap, rng);
            write_trajectory_csv(*o.out_dir + "/trajectory.csv", traj);
            out["trajectory_csv"] = "trajectory.csv";
        }
    } else {
        throw ConfigError("config.task: unknown brw task '" + task + "'");
    }
    return out;
}

inline Json run_bpve(const Json& cfg, std::uint64_t seed, const RunOverrides& o) {
    const auto task = config::require<std::string>(cfg, "task", "config");
    Json out;
    if (task == "binary") {
        auto seq = config::parse_sequence_rule(cfg.at("seq"), "config.seq");
        out["binary"] = to_json(survival_binary(
            seq, o.horizon.value_or(config::optional_or<std::uint64_t>(cfg, "horizon", 1000))));
        return out;
    }
    auto model = config::parse_bpve_model(cfg.at("model"), "config.model");
    if (task == "criteria") {
        out["head_criterion"] = to_json(check_example_bpve1(model));
        out["weighted_head"] =
            to_json(check_prop_bpve1(model, config::optional_or<std::uint64_t>(cfg, "k0", 1)));
        out["moment_series"] = to_json(check_bertrodzuc(
            model, config::optional_or<std::uint64_t>(cfg, "n0", 0),
            o.horizon.value_or(config::optional_or<std::uint64_t>(cfg, "horizon", 1000))));
    } else if (task == "germ-compare") {
        auto nu = config::parse_bpve_model(cfg.at("nu"), "config.nu");
        out["germ_compare"] = to_json(germ_compare_bpve(
            model, nu, config::require<double>(cfg, "delta", "config"),
            config::optional_or<std::uint64_t>(cfg, "n0", 0),
            o.horizon.value_or(config::optional_or<std::uint64_t>(cfg, "horizon", 300))));
    } else if (task == "simulate") {
        out["monte_carlo"] = to_json(simulate_bpve(
            model, o.horizon.value_or(config::optional_or<std::uint64_t>(cfg, "horizon", 1000)),
            o.reps.value_or(config::optional_or<std::uint64_t>(cfg, "reps", 10000)),
            config::optional_or<std::uint64_t>(cfg, "cap", 1000000), seed));
    } else {
        throw ConfigError("config.task: unknown bpve task '" + task + "'");
    }
    return out;
}

inline Json run_rumor(const Json& cfg, std::uint64_t seed, const RunOverrides& o) {
    auto model = config::parse_rumor_model(cfg.at("model"), "config.model");
    const auto task = config::require<std::string>(cfg, "task", "config");
    Json out;
    if (task == "classify") {
        if (model.kind() == RumorModel::Kind::Firework) {
            if (model.homogeneous()) out["homogeneous_series"] = to_json(firework_homog_series(model));
            out["heterogeneous_series"] = to_json(firework_hetero_series(model));
        } else {
            if (model.homogeneous_stations() && model.homogeneous_radii())
                out["w_criterion"] = to_json(reverse_homog_W(model));
            out["heterogeneous_checks"] = to_json(reverse_hetero_checks(model));
        }
    } else if (task == "counterpart") {
        auto reduced = single_station_counterpart(model);
        Json table = Json::array();
        for (std::uint64_t t = 1; t <= 20; ++t)
            table.push_back(Json::array(
                {t, max_radius_cdf(model, 0, static_cast<double>(t)),
                 max_radius_cdf(reduced, 0, static_cast<double>(t))}));
        out["counterpart_cdf_table"] = table;
    } else if (task == "transfer") {
        auto nu = config::parse_rumor_model(cfg.at("nu"), "config.nu");
        const std::uint64_t span = std::max(model.structure_prefix(), nu.structure_prefix()) +
                                   std::lcm(model.structure_period(), nu.structure_period());
        std::vector<OffspringLaw> mu_laws, nu_laws;
        for (std::uint64_t s = 0; s < span; ++s) {
            mu_laws.push_back(model.station_at(s));
            nu_laws.push_back(nu.station_at(s));
        }
        auto order = certify_germ(FamilyPair(std::move(mu_laws), std::move(nu_laws)));
        out["order"] = to_json(order);
        out["transfer"] = to_json(germ_rumor_transfer(
            model, nu, order, config::optional_or<double>(cfg, "T", 1.0)));
    } else if (task == "simulate") {
        const auto mode_s = config::optional_or<std::string>(cfg, "mode", "annealed");
        const SimMode mode = mode_s == "quenched" ? SimMode::Quenched : SimMode::Annealed;
        const std::uint64_t env_seed = config::optional_or<std::uint64_t>(cfg, "env_seed", seed + 1);
        const bool condition = config::optional_or<bool>(cfg, "condition_on_origin", false);
        const std::uint64_t n_sites =
            o.horizon.value_or(config::optional_or<std::uint64_t>(cfg, "n_sites", 100));
        auto sim = simulate_rumor(
            model, n_sites, o.reps.value_or(config::optional_or<std::uint64_t>(cfg, "reps", 10000)),
            mode, seed, env_seed, condition);
        out["monte_carlo"] = to_json(sim);
        if (o.out_dir && mode == SimMode::Quenched &&
            config::optional_or<bool>(cfg, "env_csv", false)) {
            write_environment_csv(*o.out_dir + "/environment.csv",
                                  draw_environment(model, n_sites, env_seed, condition));
            out["environment_csv"] = "environment.csv";
        }
    } else {
        throw ConfigError("config.task: unknown rumor task '" + task + "'");
    }
    return out;
}

}  // namespace runner_detail

// Dispatches a parsed experiment config; deterministic given (config, seed).
inline Json run_experiment(const Json& cfg, const RunOverrides& overrides = {}) {
    if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
    const auto kind = config::require<std::string>(cfg, "kind", "config");
    const std::uint64_t seed =
        overrides.seed.value_or(config::optional_or<std::uint64_t>(cfg, "seed", 1));

    Json results;
    if (kind == "order-check") {
        results = runner_detail::run_order_check(cfg, seed);
    } else if (kind == "brw") {
        results = runner_detail::run_brw(cfg, seed, overrides);
    } else if (kind == "bpve") {
        results = runner_detail::run_bpve(cfg, seed, overrides);
    } else if (kind == "rumor") {
        results = runner_detail::run_rumor(cfg, seed, overrides);
    } else if (kind == "named-example") {
        const auto name = config::require<std::string>(cfg, "name", "config");
        const auto& example = find_named_example(name);
        Json params = example.params;
        if (cfg.contains("params"))
            for (const auto& [k, v] : cfg.at("params").items()) params[k] = v;
        if (overrides.reps && params.contains("reps")) params["reps"] = *overrides.reps;
        if (overrides.horizon && params.contains("horizon")) params["horizon"] = *overrides.horizon;
        results = example.run(params, seed);
        results["params"] = params;
    } else {
        throw ConfigError("config.kind: unknown experiment kind '" + kind + "'");
    }

    return Json{{"schema", 1}, {"kind", kind}, {"seed", seed}, {"results", results}};
}

// Reports are written atomically: full dump to a temporary, then rename.
inline void write_report(const Json& report, const std::string& dir,
                         const std::string& filename = "report.json") {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + filename;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ModuleError("cannot open " + tmp);
        out << report.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace germ

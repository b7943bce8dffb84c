#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "germ/bpve.hpp"
#include "germ/brw.hpp"
#include "germ/errors.hpp"
#include "germ/orders.hpp"
#include "germ/rumor.hpp"

namespace germ {
namespace config {

using Json = nlohmann::json;

// All parsers convert schema problems into ConfigError with a field path, so
// the CLI can map them onto exit code 1 with a usable diagnostic.

inline ConfigError schema_error(const std::string& where, const std::string& what) {
    return ConfigError(where + ": " + what);
}

template <typename T>
T require(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw schema_error(where, "missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw schema_error(where + "." + key, e.what());
    }
}

template <typename T>
T optional_or(const Json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

inline NatLaw parse_nat_law(const Json& j, const std::string& where) {
    const auto type = require<std::string>(j, "type", where);
    if (type == "finite") return NatLaw::finite_support(require<std::vector<double>>(j, "probs", where));
    if (type == "poisson") return NatLaw::poisson(require<double>(j, "lambda", where));
    if (type == "geometric") return NatLaw::geometric(require<double>(j, "p", where));
    if (type == "mixed-poisson") {
        std::vector<MixComponent> parts;
        for (const auto& c : require<Json>(j, "components", where)) {
            parts.push_back({require<double>(c, "weight", where + ".components"),
                             require<double>(c, "rate", where + ".components")});
        }
        return NatLaw::mixed_poisson(std::move(parts));
    }
    throw schema_error(where, "unknown law type '" + type + "'");
}

inline OffspringLaw parse_offspring_law(const Json& j, const std::string& where) {
    const auto type = require<std::string>(j, "type", where);
    if (type == "explicit") {
        const auto types = require<std::size_t>(j, "types", where);
        std::vector<OffspringLaw::Atom> atoms;
        for (const auto& a : require<Json>(j, "atoms", where))
            atoms.push_back({require<std::vector<std::uint64_t>>(a, "f", where + ".atoms"),
                             require<double>(a, "prob", where + ".atoms")});
        return OffspringLaw::explicit_atoms(types, std::move(atoms));
    }
    if (type == "indep-diffusion")
        return OffspringLaw::indep_diffusion(parse_nat_law(j.at("total"), where + ".total"),
                                             require<std::vector<double>>(j, "row", where));
    if (type == "all-to-one")
        return OffspringLaw::all_to_one(parse_nat_law(j.at("total"), where + ".total"),
                                        require<std::vector<double>>(j, "row", where));
    if (type == "balanced") {
        BalancedAlpha alpha;
        alpha.prefix = optional_or<std::vector<std::uint64_t>>(j, "alpha_prefix", {});
        return OffspringLaw::balanced(parse_nat_law(j.at("total"), where + ".total"),
                                      require<std::vector<std::uint64_t>>(j, "weights", where),
                                      std::move(alpha),
                                      optional_or<double>(j, "truncation_eps", 1e-12));
    }
    throw schema_error(where, "unknown offspring law type '" + type + "'");
}

inline RadiusLaw parse_radius_law(const Json& j, const std::string& where) {
    const auto type = require<std::string>(j, "type", where);
    if (type == "pareto") return RadiusLaw::pareto(require<double>(j, "lambda0", where));
    if (type == "geometric-tail") return RadiusLaw::geometric_tail(require<double>(j, "q", where));
    if (type == "finite") return RadiusLaw::finite_support(require<std::vector<double>>(j, "pmf", where));
    if (type == "explicit-tail")
        return RadiusLaw::explicit_tail(require<std::vector<double>>(j, "tail", where),
                                        optional_or<double>(j, "floor", 0.0));
    if (type == "mixture") {
        std::vector<std::pair<double, RadiusLaw>> parts;
        for (const auto& p : require<Json>(j, "parts", where))
            parts.emplace_back(require<double>(p, "weight", where + ".parts"),
                               parse_radius_law(p.at("law"), where + ".parts.law"));
        return RadiusLaw::mixture(std::move(parts));
    }
    throw schema_error(where, "unknown radius law type '" + type + "'");
}

inline SequenceRule parse_sequence_rule(const Json& j, const std::string& where) {
    SequenceRule r;
    r.limit = require<double>(j, "limit", where);
    r.coeff = optional_or<double>(j, "coeff", 0.0);
    r.offset = optional_or<double>(j, "offset", 2.0);
    r.expo = optional_or<double>(j, "expo", 2.0);
    r.sign = optional_or<int>(j, "sign", -1);
    return r;
}

inline BpveModel parse_bpve_model(const Json& j, const std::string& where) {
    std::vector<NatLaw> prefix;
    for (const auto& p : optional_or<Json>(j, "prefix", Json::array()))
        prefix.push_back(parse_nat_law(p, where + ".prefix"));
    const auto& tail = j.contains("tail") ? j.at("tail") : throw schema_error(where, "missing 'tail'");
    const auto kind = require<std::string>(tail, "kind", where + ".tail");
    if (kind == "constant")
        return BpveModel::constant(parse_nat_law(tail.at("law"), where + ".tail.law"),
                                   std::move(prefix));
    if (kind == "periodic") {
        std::vector<NatLaw> period;
        for (const auto& p : require<Json>(tail, "laws", where + ".tail"))
            period.push_back(parse_nat_law(p, where + ".tail.laws"));
        return BpveModel::periodic(std::move(period), std::move(prefix));
    }
    if (kind == "bernoulli-seq")
        return BpveModel::bernoulli_seq(parse_sequence_rule(tail.at("seq"), where + ".tail.seq"),
                                        std::move(prefix));
    if (kind == "two-point-seq")
        return BpveModel::two_point_seq(require<std::uint64_t>(tail, "v", where + ".tail"),
                                        parse_sequence_rule(tail.at("seq"), where + ".tail.seq"),
                                        std::move(prefix));
    throw schema_error(where + ".tail", "unknown tail kind '" + kind + "'");
}

inline std::vector<std::vector<RadiusLaw>> parse_radius_sites(const Json& j,
                                                              const std::string& where) {
    std::vector<std::vector<RadiusLaw>> sites;
    for (const auto& site : j) {
        std::vector<RadiusLaw> per_type;
        for (const auto& r : site) per_type.push_back(parse_radius_law(r, where));
        sites.push_back(std::move(per_type));
    }
    return sites;
}

inline RumorModel parse_rumor_model(const Json& j, const std::string& where) {
    const auto kind_s = require<std::string>(j, "kind", where);
    RumorModel::Kind kind;
    if (kind_s == "firework") kind = RumorModel::Kind::Firework;
    else if (kind_s == "reverse-firework") kind = RumorModel::Kind::ReverseFirework;
    else throw schema_error(where, "unknown rumor kind '" + kind_s + "'");

    std::optional<OffspringLaw> root;
    if (j.contains("root")) root = parse_offspring_law(j.at("root"), where + ".root");

    const auto& st = j.contains("stations") ? j.at("stations")
                                            : throw schema_error(where, "missing 'stations'");
    const auto& rad = j.contains("radii") ? j.at("radii") : throw schema_error(where, "missing 'radii'");

    if (st.contains("law")) {
        // homogeneous stations; radii must then be one per-type vector
        auto law = parse_offspring_law(st.at("law"), where + ".stations.law");
        std::vector<RadiusLaw> per_type;
        for (const auto& r : require<Json>(rad, "per_type", where + ".radii"))
            per_type.push_back(parse_radius_law(r, where + ".radii.per_type"));
        return RumorModel::homogeneous(kind, std::move(law), std::move(per_type), std::move(root));
    }
    std::vector<OffspringLaw> sp, per;
    for (const auto& p : optional_or<Json>(st, "prefix", Json::array()))
        sp.push_back(parse_offspring_law(p, where + ".stations.prefix"));
    for (const auto& p : require<Json>(st, "period", where + ".stations"))
        per.push_back(parse_offspring_law(p, where + ".stations.period"));
    auto rp = parse_radius_sites(optional_or<Json>(rad, "prefix", Json::array()),
                                 where + ".radii.prefix");
    auto rper = parse_radius_sites(require<Json>(rad, "period", where + ".radii"),
                                   where + ".radii.period");
    return RumorModel::heterogeneous(kind, std::move(sp), std::move(per), std::move(rp),
                                     std::move(rper), std::move(root));
}

inline BrwModel parse_brw_model(const Json& j, const std::string& where) {
    std::vector<OffspringLaw> laws;
    for (const auto& l : require<Json>(j, "laws", where))
        laws.push_back(parse_offspring_law(l, where + ".laws"));
    return BrwModel(std::move(laws));
}

inline GridSpec parse_grid(const Json& j, const std::string& where) {
    GridSpec g;
    g.points_per_axis = optional_or<std::size_t>(j, "points_per_axis", g.points_per_axis);
    g.delta_ladder = optional_or<std::vector<double>>(j, "delta_ladder", g.delta_ladder);
    g.tolerance = optional_or<double>(j, "tolerance", g.tolerance);
    g.validate();
    return g;
}

}  // namespace config
}  // namespace germ

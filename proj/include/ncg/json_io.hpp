#pragma once

#include <string>

#include <json.hpp>

#include "ncg/analysis.hpp"
#include "ncg/demand_path.hpp"
#include "ncg/game.hpp"
#include "ncg/solver.hpp"

namespace ncg {

using Json = nlohmann::ordered_json;

inline Json rat_to_json(const Rat& r) {
    if (r.is_integer()) return Json(r.num());
    return Json(r.to_string());
}

inline Rat rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
    if (j.is_string()) return Rat::parse(j.get<std::string>());
    if (j.is_number_float()) {
        double v = j.get<double>();
        auto n = static_cast<std::int64_t>(v);
        if (static_cast<double>(n) == v) return Rat(n);
    }
    throw std::invalid_argument("expected an integer or a \"p/q\" string: " + j.dump());
}

// --------------------------------------------------------------------------
// Game <-> JSON
//
// { "resources": [ {"id", "price": {"kind":"poly","coeffs":[...]}
//                              | {"kind":"powerlog","c","rho","beta"}} ],
//   "groups":    [ {"id", "strategies": [ {"id", "uses": [{"resource","r"}]} ]} ] }
// --------------------------------------------------------------------------

inline Json price_to_json(const PriceFunction& p) {
    Json j;
    if (p.is_polynomial()) {
        j["kind"] = "poly";
        j["coeffs"] = p.as_polynomial().coeffs;
    } else {
        const auto& pl = p.as_power_log();
        j["kind"] = "powerlog";
        j["c"] = pl.scale;
        j["rho"] = rat_to_json(pl.power);
        j["beta"] = pl.log_exponent;
    }
    return j;
}

inline PriceFunction price_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "poly") return PriceFunction::polynomial(j.at("coeffs").get<std::vector<double>>());
    if (kind == "powerlog")
        return PriceFunction::power_log(j.at("c").get<double>(), rat_from_json(j.at("rho")),
                                        j.at("beta").get<double>());
    throw std::invalid_argument("unknown price kind: " + kind);
}

inline Json game_to_json(const Game& g) {
    Json j;
    j["resources"] = Json::array();
    for (int a = 0; a < g.n_resources(); ++a) {
        Json r;
        r["id"] = g.resource_id(a);
        r["price"] = price_to_json(g.price(a));
        j["resources"].push_back(std::move(r));
    }
    j["groups"] = Json::array();
    for (int k = 0; k < g.n_groups(); ++k) {
        Json grp;
        grp["id"] = g.group_id(k);
        grp["strategies"] = Json::array();
        for (int s : g.strategies_of(k)) {
            Json st;
            st["id"] = g.strategy_id(s);
            st["uses"] = Json::array();
            for (const auto& u : g.uses(s)) {
                Json use;
                use["resource"] = g.resource_id(u.resource);
                use["r"] = u.rate;
                st["uses"].push_back(std::move(use));
            }
            grp["strategies"].push_back(std::move(st));
        }
        j["groups"].push_back(std::move(grp));
    }
    return j;
}

inline Game game_from_json(const Json& j) {
    Game g;
    for (const auto& r : j.at("resources"))
        g.add_resource(r.at("id").get<std::string>(), price_from_json(r.at("price")));
    for (const auto& grp : j.at("groups")) {
        int k = g.add_group(grp.at("id").get<std::string>());
        for (const auto& st : grp.at("strategies")) {
            std::vector<Use> uses;
            for (const auto& use : st.at("uses")) {
                int a = g.find_resource(use.at("resource").get<std::string>());
                if (a < 0)
                    throw std::invalid_argument("strategy uses unknown resource '" +
                                                use.at("resource").get<std::string>() + "'");
                uses.push_back({a, use.at("r").get<double>()});
            }
            g.add_strategy(k, st.at("id").get<std::string>(), std::move(uses));
        }
    }
    return g;
}

// --------------------------------------------------------------------------
// Demand paths
//
// { "phases": [ {"modulus":2, "residue":0,
//                "groups": [ {"group":"g1", "theta":1.0, "p":"2"} ]} ] }
// Groups omitted from a phase have zero demand there.
// --------------------------------------------------------------------------

inline Json demand_path_to_json(const DemandPath& path, const Game& g) {
    Json j;
    j["phases"] = Json::array();
    for (const auto& ph : path.phases()) {
        Json p;
        p["modulus"] = ph.modulus;
        p["residue"] = ph.residue;
        p["groups"] = Json::array();
        for (std::size_t k = 0; k < ph.per_group.size(); ++k) {
            if (ph.per_group[k].theta == 0.0) continue;
            Json t;
            t["group"] = g.group_id(static_cast<int>(k));
            t["theta"] = ph.per_group[k].theta;
            t["p"] = rat_to_json(ph.per_group[k].p);
            p["groups"].push_back(std::move(t));
        }
        j["phases"].push_back(std::move(p));
    }
    return j;
}

inline DemandPath demand_path_from_json(const Json& j, const Game& g) {
    std::vector<DemandPhase> phases;
    for (const auto& p : j.at("phases")) {
        DemandPhase ph;
        ph.modulus = p.value("modulus", 1);
        ph.residue = p.value("residue", 0);
        ph.per_group.assign(static_cast<std::size_t>(g.n_groups()), PowerTerm{});
        for (const auto& t : p.at("groups")) {
            int k = g.find_group(t.at("group").get<std::string>());
            if (k < 0)
                throw std::invalid_argument("demand path names unknown group '" +
                                            t.at("group").get<std::string>() + "'");
            ph.per_group[static_cast<std::size_t>(k)] =
                PowerTerm{t.at("theta").get<double>(), rat_from_json(t.at("p"))};
        }
        phases.push_back(std::move(ph));
    }
    DemandPath path(std::move(phases));
    path.validate(g.n_groups());
    return path;
}

// --------------------------------------------------------------------------
// Results and reports
// --------------------------------------------------------------------------

inline Json solve_result_to_json(const SolveResult& r, const Game& g) {
    Json j;
    j["profile"] = Json::object();
    for (int s = 0; s < g.n_strategies(); ++s) j["profile"][g.strategy_id(s)] = r.profile[s];
    j["gap"] = r.gap;
    j["iterations"] = r.iterations;
    j["objective"] = r.objective;
    j["converged"] = r.converged;
    return j;
}

inline Json poa_to_json(const PoaResult& r) {
    Json j;
    j["defined"] = r.defined;
    if (r.defined) j["poa"] = r.poa;
    j["c_ne"] = r.c_ne;
    j["c_so"] = r.c_so;
    j["gap_ne"] = r.ne.gap;
    j["gap_so"] = r.so.gap;
    return j;
}

inline Json degrees_to_json(const DegreeReport& d, const Game& g) {
    Json j;
    j["resources"] = Json::object();
    for (int a = 0; a < g.n_resources(); ++a)
        j["resources"][g.resource_id(a)] = d.resource[a] ? rat_to_json(*d.resource[a]) : Json("zero");
    j["strategies"] = Json::object();
    for (int s = 0; s < g.n_strategies(); ++s)
        j["strategies"][g.strategy_id(s)] = rat_to_json(d.strategy[s]);
    j["groups"] = Json::object();
    for (int k = 0; k < g.n_groups(); ++k) j["groups"][g.group_id(k)] = rat_to_json(d.group[k]);
    return j;
}

inline Json limit_price_to_json(const LimitPrice& p) {
    switch (p.kind) {
        case LimitKind::Zero: return Json("zero");
        case LimitKind::Infinite: return Json("infinite");
        case LimitKind::Power: {
            Json j;
            j["coeff"] = p.coeff;
            j["exponent"] = rat_to_json(p.exponent);
            return j;
        }
    }
    return Json();
}

inline Json limit_game_to_json(const LimitGameResult& r, const Game& g) {
    Json j;
    j["valid"] = r.valid;
    j["phase"] = r.phase;
    j["gauge"] = {{"c", r.gauge.scale}, {"rho", rat_to_json(r.gauge.power)}, {"beta", r.gauge.log_exponent}};
    if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
    j["prices"] = Json::object();
    for (int a = 0; a < g.n_resources(); ++a)
        j["prices"][g.resource_id(a)] = limit_price_to_json(r.prices[static_cast<std::size_t>(a)]);
    j["tight_strategies"] = Json::array();
    for (int s = 0; s < g.n_strategies(); ++s)
        if (r.tight_strategy[static_cast<std::size_t>(s)]) j["tight_strategies"].push_back(g.strategy_id(s));
    j["negligible_groups"] = Json::array();
    for (int k = 0; k < g.n_groups(); ++k)
        if (r.negligible_group[static_cast<std::size_t>(k)]) j["negligible_groups"].push_back(g.group_id(k));
    j["surviving_groups"] = Json::array();
    for (int k = 0; k < g.n_groups(); ++k)
        if (r.surviving_group[static_cast<std::size_t>(k)]) j["surviving_groups"].push_back(g.group_id(k));
    j["delta"] = Json::object();
    for (int k = 0; k < g.n_groups(); ++k) j["delta"][g.group_id(k)] = r.delta[static_cast<std::size_t>(k)];
    if (r.valid) {
        j["ne_cost"] = r.ne_cost;
        j["so_cost"] = r.so_cost;
        if (r.poa_defined) j["poa"] = r.poa;
    }
    return j;
}

inline Json decomposition_to_json(const DecompositionReport& r, const Game& g) {
    Json j;
    j["phases"] = Json::array();
    for (const auto& pd : r.phases) {
        Json p;
        p["phase"] = pd.phase;
        p["predicted_cost_exponent"] = rat_to_json(pd.predicted_cost_exponent);
        p["levels"] = Json::array();
        for (const auto& lv : pd.levels) {
            Json l;
            l["groups"] = Json::array();
            for (int k : lv.groups) l["groups"].push_back(g.group_id(k));
            l["alpha"] = rat_to_json(lv.alpha);
            l["t_exponent"] = rat_to_json(lv.t_exponent);
            l["scaling_exponent"] = rat_to_json(lv.scaling_exponent);
            l["cost_exponent"] = rat_to_json(lv.cost_exponent);
            switch (lv.verdict) {
                case DecompositionLevel::Verdict::Base: l["verdict"] = "base"; break;
                case DecompositionLevel::Verdict::Independent: l["verdict"] = "independent"; break;
                case DecompositionLevel::Verdict::Negligible: l["verdict"] = "negligible"; break;
                case DecompositionLevel::Verdict::ZeroDemand: l["verdict"] = "zero-demand"; break;
            }
            p["levels"].push_back(std::move(l));
        }
        j["phases"].push_back(std::move(p));
    }
    return j;
}

inline Json gauge_report_to_json(const GaugeReport& r, const Game& g) {
    Json j;
    j["gauge"] = {{"c", r.gauge.scale}, {"rho", rat_to_json(r.gauge.power)}, {"beta", r.gauge.log_exponent}};
    j["q"] = Json::object();
    for (int a = 0; a < g.n_resources(); ++a) {
        const auto& q = r.q[static_cast<std::size_t>(a)];
        j["q"][g.resource_id(a)] =
            q.kind == LimitKind::Infinite ? Json("infinite") : Json(q.kind == LimitKind::Zero ? 0.0 : q.value);
    }
    j["tight_groups"] = Json::array();
    for (int k = 0; k < g.n_groups(); ++k)
        if (r.tight_group[static_cast<std::size_t>(k)]) j["tight_groups"].push_back(g.group_id(k));
    j["phase_tight_share"] = r.phase_tight_share;
    j["liminf_tight_share"] = r.liminf_tight_share;
    j["G1"] = r.g1;
    j["G2"] = r.g2;
    j["G3"] = r.g3;
    j["gaugeable"] = r.gaugeable;
    return j;
}

inline Json regvar_to_json(const RegVarDiagnostics& d) {
    Json j;
    j["symbolic_index"] = d.symbolic_index ? rat_to_json(*d.symbolic_index) : Json("zero");
    j["index_estimate"] = d.index_estimate;
    j["karamata_limit_estimate"] = d.karamata_limit_estimate;
    j["index_samples"] = d.index_samples;
    j["karamata_samples"] = d.karamata_samples;
    return j;
}

}  // namespace ncg

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncg/game.hpp"
#include "ncg/kpaths.hpp"
#include "ncg/tntp.hpp"

namespace ncg {

struct IngestResult {
    Game game;
    DemandVector demand;  // per group, straight from the trip table
};

namespace detail {

/// BPR latency fft*(1 + b*(x/cap)^p) as price functions. Integral powers map
/// to a single polynomial. For fractional powers the congestion term becomes
/// a PowerLog resource and the free-flow constant moves to a companion
/// fixed-price resource consumed by the same strategies, keeping the link
/// cost exact while every price stays in the symbolic family.
struct BprPrices {
    std::vector<std::pair<std::string, PriceFunction>> resources;  // suffix, price
};

inline BprPrices bpr_prices(const tntp::Link& l) {
    BprPrices out;
    double congestion_scale = l.free_flow_time * l.b / std::pow(l.capacity, l.power);
    bool integral = l.power == std::floor(l.power) && l.power >= 0.0 && l.power < 64.0;
    if (l.free_flow_time == 0.0) {
        out.resources.emplace_back("", PriceFunction::polynomial({0.0}));
        return out;
    }
    if (integral) {
        auto p = static_cast<std::size_t>(l.power);
        std::vector<double> coeffs(p + 1, 0.0);
        coeffs[0] = l.free_flow_time;
        coeffs[p] += congestion_scale;  // p == 0 folds into the constant
        out.resources.emplace_back("", PriceFunction::polynomial(std::move(coeffs)));
        return out;
    }
    out.resources.emplace_back("", PriceFunction::constant(l.free_flow_time));
    if (congestion_scale > 0.0) {
        auto denominator = static_cast<std::int64_t>(std::llround(l.power * 1000000.0));
        out.resources.emplace_back(
            "_cg", PriceFunction::power_log(congestion_scale, Rat(denominator, 1000000), 0.0));
    }
    return out;
}

}  // namespace detail

/// Builds a game from a parsed network and trip table: every OD pair with
/// positive demand becomes a group whose strategies are its k shortest
/// simple paths by free-flow time, with r(a,s) = 1 on the traversed links.
inline IngestResult enumerate_paths(const tntp::Network& net, const tntp::TripTable& trips, int k = 8) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");

    IngestResult out;
    LinkGraph graph(net.nodes);
    // per link: the resource indices a path over it must consume
    std::vector<std::vector<int>> link_resources(net.links.size());
    for (std::size_t i = 0; i < net.links.size(); ++i) {
        const auto& l = net.links[i];
        std::string base = "l" + std::to_string(i + 1) + "_" + std::to_string(l.from) + "_" +
                           std::to_string(l.to);
        for (auto& [suffix, price] : detail::bpr_prices(l).resources)
            link_resources[i].push_back(out.game.add_resource(base + suffix, price));
        graph.add_link(static_cast<int>(i), l.from, l.to, l.free_flow_time);
    }
    graph.finalize();

    for (const auto& [origin, row] : trips.demand) {
        for (const auto& [dest, volume] : row) {
            if (!(volume > 0.0) || origin == dest) continue;
            auto paths = k_shortest_paths(graph, origin, dest, k);
            if (paths.empty())
                throw std::runtime_error("no path from origin " + std::to_string(origin) +
                                         " to destination " + std::to_string(dest));
            std::string gid = "od_" + std::to_string(origin) + "_" + std::to_string(dest);
            int group = out.game.add_group(gid);
            out.demand.push_back(volume);
            for (std::size_t pi = 0; pi < paths.size(); ++pi) {
                std::vector<Use> uses;
                for (int link : paths[pi].links)
                    for (int a : link_resources[static_cast<std::size_t>(link)])
                        uses.push_back({a, 1.0});
                out.game.add_strategy(group, gid + "_p" + std::to_string(pi), std::move(uses));
            }
        }
    }
    return out;
}

}  // namespace ncg

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ncg/price.hpp"

namespace ncg {

/// One sparse consumption entry: strategy draws `rate` units of `resource`.
struct Use {
    int resource;
    double rate;
};

using DemandVector = std::vector<double>;  // per-group user volume, >= 0
using Profile = std::vector<double>;       // per-strategy flow, >= 0

/// A non-atomic congestion game: groups with disjoint strategy sets, shared
/// resources with price functions, and a sparse consumption matrix r(a,s).
/// Immutable once built; all evaluation helpers are free of interior state.
class Game {
public:
    int add_resource(const std::string& id, PriceFunction price) {
        if (resource_index_.count(id)) throw std::invalid_argument("duplicate resource id: " + id);
        resource_index_[id] = static_cast<int>(resource_ids_.size());
        resource_ids_.push_back(id);
        prices_.push_back(std::move(price));
        return static_cast<int>(resource_ids_.size()) - 1;
    }

    int add_group(const std::string& id) {
        if (group_index_.count(id)) throw std::invalid_argument("duplicate group id: " + id);
        group_index_[id] = static_cast<int>(group_ids_.size());
        group_ids_.push_back(id);
        group_strategies_.emplace_back();
        return static_cast<int>(group_ids_.size()) - 1;
    }

    int add_strategy(int group, const std::string& id, std::vector<Use> uses) {
        if (group < 0 || group >= n_groups()) throw std::out_of_range("no such group");
        for (const auto& u : uses)
            if (u.resource < 0 || u.resource >= n_resources()) throw std::out_of_range("no such resource");
        int s = static_cast<int>(strategy_ids_.size());
        strategy_ids_.push_back(id);
        strategy_group_.push_back(group);
        strategy_uses_.push_back(std::move(uses));
        group_strategies_[group].push_back(s);
        if (!strategy_index_.emplace(id, s).second) duplicate_strategy_ids_.push_back(id);
        return s;
    }

    int n_groups() const { return static_cast<int>(group_ids_.size()); }
    int n_resources() const { return static_cast<int>(resource_ids_.size()); }
    int n_strategies() const { return static_cast<int>(strategy_ids_.size()); }

    const std::string& group_id(int k) const { return group_ids_.at(k); }
    const std::string& resource_id(int a) const { return resource_ids_.at(a); }
    const std::string& strategy_id(int s) const { return strategy_ids_.at(s); }

    int group_of(int s) const { return strategy_group_.at(s); }
    const std::vector<int>& strategies_of(int k) const { return group_strategies_.at(k); }
    std::span<const Use> uses(int s) const { return strategy_uses_.at(s); }
    const PriceFunction& price(int a) const { return prices_.at(a); }

    int find_group(const std::string& id) const {
        auto it = group_index_.find(id);
        return it == group_index_.end() ? -1 : it->second;
    }
    int find_resource(const std::string& id) const {
        auto it = resource_index_.find(id);
        return it == resource_index_.end() ? -1 : it->second;
    }
    int find_strategy(const std::string& id) const {
        auto it = strategy_index_.find(id);
        return it == strategy_index_.end() ? -1 : it->second;
    }

    const std::vector<std::string>& duplicate_strategy_ids() const { return duplicate_strategy_ids_; }

private:
    std::vector<std::string> group_ids_;
    std::vector<std::string> resource_ids_;
    std::vector<std::string> strategy_ids_;
    std::vector<int> strategy_group_;
    std::vector<std::vector<Use>> strategy_uses_;
    std::vector<std::vector<int>> group_strategies_;
    std::vector<PriceFunction> prices_;
    std::unordered_map<std::string, int> group_index_;
    std::unordered_map<std::string, int> resource_index_;
    std::unordered_map<std::string, int> strategy_index_;
    std::vector<std::string> duplicate_strategy_ids_;
};

inline double total_demand(const DemandVector& d) {
    double t = 0.0;
    for (double v : d) t += v;
    return t;
}

/// f_a = sum_s r(a,s) f_s.
inline std::vector<double> resource_loads(const Game& g, const Profile& f) {
    if (static_cast<int>(f.size()) != g.n_strategies())
        throw std::invalid_argument("profile dimension does not match game");
    std::vector<double> loads(g.n_resources(), 0.0);
    for (int s = 0; s < g.n_strategies(); ++s) {
        if (f[s] == 0.0) continue;
        for (const auto& u : g.uses(s)) loads[u.resource] += u.rate * f[s];
    }
    return loads;
}

/// tau_s = sum_a r(a,s) tau_a(f_a), from precomputed resource loads.
inline double strategy_cost_at_loads(const Game& g, const std::vector<double>& loads, int s) {
    if (s < 0 || s >= g.n_strategies()) throw std::out_of_range("unknown strategy");
    double c = 0.0;
    for (const auto& u : g.uses(s)) c += u.rate * g.price(u.resource).value(loads[u.resource]);
    return c;
}

/// tau_s(f) = sum_a r(a,s) tau_a(f_a).
inline double strategy_cost(const Game& g, const Profile& f, int s) {
    return strategy_cost_at_loads(g, resource_loads(g, f), s);
}

/// Total cost sum_a f_a tau_a(f_a); equals sum_s f_s tau_s(f).
inline double total_cost(const Game& g, const Profile& f) {
    auto loads = resource_loads(g, f);
    double c = 0.0;
    for (int a = 0; a < g.n_resources(); ++a)
        if (loads[a] > 0.0) c += loads[a] * g.price(a).value(loads[a]);
    return c;
}

/// Average cost C(f) = total cost / T(d). Requires T(d) > 0.
inline double average_cost(const Game& g, const DemandVector& d, const Profile& f) {
    double t = total_demand(d);
    if (!(t > 0.0)) throw std::invalid_argument("average cost undefined for zero total demand");
    return total_cost(g, f) / t;
}

/// Checks p1 (non-negative flows) and p2 (group flows sum to demands).
inline bool is_feasible(const Game& g, const DemandVector& d, const Profile& f, double tol = 1e-9) {
    if (static_cast<int>(d.size()) != g.n_groups() || static_cast<int>(f.size()) != g.n_strategies())
        return false;
    for (double v : f)
        if (v < -tol || !std::isfinite(v)) return false;
    for (int k = 0; k < g.n_groups(); ++k) {
        double sum = 0.0;
        for (int s : g.strategies_of(k)) sum += f[s];
        double scale = std::max(1.0, std::abs(d[k]));
        if (std::abs(sum - d[k]) > tol * scale) return false;
    }
    return true;
}

struct Violation {
    enum class Kind { FreeStrategy, OverlappingStrategySets, NegativeCoefficient, EmptyGroup, BadPrice };
    Kind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Structural validation: no free strategies (a strategy is free iff every
/// resource it consumes with positive rate has the identically-zero price),
/// pairwise-disjoint strategy sets, well-formed prices, non-empty groups.
inline ValidationReport validate_game(const Game& g) {
    ValidationReport report;
    auto add = [&](Violation::Kind kind, std::string msg) {
        report.violations.push_back({kind, std::move(msg)});
    };

    for (const auto& id : g.duplicate_strategy_ids())
        add(Violation::Kind::OverlappingStrategySets,
            "overlapping strategy sets: strategy id '" + id + "' appears more than once");

    for (int a = 0; a < g.n_resources(); ++a)
        for (const auto& issue : g.price(a).validate())
            add(Violation::Kind::NegativeCoefficient, "resource '" + g.resource_id(a) + "': " + issue);

    for (int k = 0; k < g.n_groups(); ++k)
        if (g.strategies_of(k).empty())
            add(Violation::Kind::EmptyGroup, "empty group '" + g.group_id(k) + "'");

    for (int s = 0; s < g.n_strategies(); ++s) {
        bool priced = false;
        for (const auto& u : g.uses(s)) {
            if (u.rate < 0.0)
                add(Violation::Kind::NegativeCoefficient,
                    "negative consumption r(" + g.resource_id(u.resource) + ", " + g.strategy_id(s) + ")");
            if (u.rate > 0.0 && !g.price(u.resource).is_zero()) priced = true;
        }
        if (!priced)
            add(Violation::Kind::FreeStrategy, "free strategy '" + g.strategy_id(s) + "'");
    }
    return report;
}

}  // namespace ncg

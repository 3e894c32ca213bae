#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ncg/game.hpp"

namespace ncg {

struct SolverConfig {
    double gap_tolerance = 1e-9;       // relative Wardrop gap at which to stop
    int max_iterations = 10000;
    double line_search_tolerance = 1e-12;
    bool record_objective = true;      // keep the per-iteration potential trace
};

struct SolveResult {
    Profile profile;
    int iterations = 0;
    double gap = 0.0;        // final relative gap
    double objective = 0.0;  // Beckmann potential of the cost model used
    bool converged = false;
    std::vector<double> objective_history;  // potential after each iteration
};

namespace detail {

/// Uniform view over either the plain prices tau_a or the marginal prices
/// c_a(x) = x tau_a'(x) + tau_a(x). Minimizing the Beckmann potential of
/// tau yields Wardrop equilibria; minimizing the potential of c (which is
/// sum_a f_a tau_a(f_a)) yields system optima.
class CostModel {
public:
    CostModel(const Game& g, bool marginal) : g_(&g), marginal_(marginal) {}

    double value(int a, double x) const {
        const auto& p = g_->price(a);
        return marginal_ ? p.marginal_value(x) : p.value(x);
    }
    double potential_term(int a, double x) const {
        const auto& p = g_->price(a);
        return marginal_ ? p.marginal_antiderivative(x) : p.antiderivative(x);
    }
    double strategy_value(int s, const std::vector<double>& loads) const {
        double c = 0.0;
        for (const auto& u : g_->uses(s)) c += u.rate * value(u.resource, loads[u.resource]);
        return c;
    }
    double potential(const std::vector<double>& loads) const {
        double p = 0.0;
        for (int a = 0; a < g_->n_resources(); ++a) p += potential_term(a, loads[a]);
        return p;
    }

private:
    const Game* g_;
    bool marginal_;
};

struct GapInfo {
    double absolute = 0.0;
    double relative = 0.0;
    double used_cost = 0.0;   // sum_s f_s tau_s(f)
    int worst_group = -1;
    std::vector<int> best_strategy;  // per-group argmin (lowest index on ties)
};

/// Wardrop gap of a feasible profile under a cost model:
///   sum_s f_s tau_s(f) - sum_k d_k min_{s in S_k} tau_s(f),
/// relative form divides by sum_s f_s tau_s(f); 0/0 counts as 0.
inline GapInfo wardrop_gap(const Game& g, const DemandVector& d, const Profile& f,
                           const CostModel& model, const std::vector<double>& loads) {
    GapInfo info;
    info.best_strategy.assign(g.n_groups(), -1);
    std::vector<double> cost(g.n_strategies());
    for (int s = 0; s < g.n_strategies(); ++s) cost[s] = model.strategy_value(s, loads);

    double worst_excess = -1.0;
    for (int k = 0; k < g.n_groups(); ++k) {
        const auto& strategies = g.strategies_of(k);
        if (strategies.empty()) continue;
        double best = std::numeric_limits<double>::infinity();
        int best_s = -1;
        double used = 0.0;
        for (int s : strategies) {
            if (cost[s] < best) { best = cost[s]; best_s = s; }
            used += f[s] * cost[s];
        }
        info.best_strategy[k] = best_s;
        info.used_cost += used;
        double excess = used - d[k] * best;
        info.absolute += excess;
        if (excess > worst_excess) { worst_excess = excess; info.worst_group = k; }
    }
    info.relative = info.used_cost > 0.0 ? info.absolute / info.used_cost : 0.0;
    return info;
}

/// Exact step along direction delta (in load space) by bisection on the
/// monotone derivative phi'(lambda) = sum_a delta_a m_a(loads_a + lambda delta_a).
inline double line_search(const Game& g, const CostModel& model, const std::vector<double>& loads,
                          const std::vector<double>& delta, double tol) {
    auto dphi = [&](double lam) {
        double v = 0.0;
        for (int a = 0; a < g.n_resources(); ++a)
            if (delta[a] != 0.0) v += delta[a] * model.value(a, loads[a] + lam * delta[a]);
        return v;
    };
    if (dphi(0.0) >= 0.0) return 0.0;
    if (dphi(1.0) <= 0.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (dphi(mid) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline SolveResult solve_conditional_gradient(const Game& g, const DemandVector& d,
                                              const CostModel& model, const SolverConfig& cfg,
                                              const Profile* start) {
    if (static_cast<int>(d.size()) != g.n_groups())
        throw std::invalid_argument("demand dimension does not match game");
    for (double v : d)
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("negative or non-finite demand");

    SolveResult res;
    res.profile.assign(g.n_strategies(), 0.0);

    if (!(total_demand(d) > 0.0)) {  // nothing to route
        res.converged = true;
        return res;
    }

    if (start) {
        if (!is_feasible(g, d, *start)) throw std::invalid_argument("start profile is infeasible");
        res.profile = *start;
    } else {
        for (int k = 0; k < g.n_groups(); ++k) {
            const auto& strategies = g.strategies_of(k);
            if (!strategies.empty()) res.profile[strategies.front()] = d[k];
        }
    }

    auto loads = resource_loads(g, res.profile);
    std::vector<double> block_delta(static_cast<std::size_t>(g.n_resources()), 0.0);
    std::vector<int> touched;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        auto gap = wardrop_gap(g, d, res.profile, model, loads);
        if (cfg.record_objective && it == 0) res.objective_history.push_back(model.potential(loads));
        res.gap = gap.relative;
        res.iterations = it;
        if (gap.relative <= cfg.gap_tolerance) {
            res.converged = true;
            break;
        }

        // joint step: full demand on the cheapest strategy per group
        Profile target(g.n_strategies(), 0.0);
        for (int k = 0; k < g.n_groups(); ++k)
            if (gap.best_strategy[k] >= 0) target[gap.best_strategy[k]] = d[k];

        auto target_loads = resource_loads(g, target);
        std::vector<double> delta(g.n_resources());
        for (int a = 0; a < g.n_resources(); ++a) delta[a] = target_loads[a] - loads[a];

        double lam = line_search(g, model, loads, delta, cfg.line_search_tolerance);
        bool moved = lam > 0.0;
        if (moved) {
            for (int s = 0; s < g.n_strategies(); ++s)
                res.profile[s] += lam * (target[s] - res.profile[s]);
            loads = resource_loads(g, res.profile);
        }

        // per-group equilibration sweep: shift mass from the costliest used
        // strategy to the cheapest one with an exact line step, which can
        // zero a strategy outright. The joint direction alone zigzags on
        // shared resources and stalls above tight tolerances.
        for (int k = 0; k < g.n_groups(); ++k) {
            const auto& strategies = g.strategies_of(k);
            if (strategies.size() < 2 || !(d[k] > 0.0)) continue;
            int inner_cap = 2 * static_cast<int>(strategies.size());
            for (int inner = 0; inner < inner_cap; ++inner) {
                int cheap = -1, costly = -1;
                double cheap_cost = std::numeric_limits<double>::infinity();
                double costly_cost = -1.0;
                for (int s : strategies) {
                    double c = model.strategy_value(s, loads);
                    if (c < cheap_cost) { cheap_cost = c; cheap = s; }
                    if (res.profile[s] > 0.0 && c > costly_cost) { costly_cost = c; costly = s; }
                }
                if (costly < 0 || costly == cheap) break;
                if (costly_cost - cheap_cost <= 1e-15 * std::max(1.0, cheap_cost)) break;

                touched.clear();
                auto add_delta = [&](int a, double v) {
                    if (v == 0.0) return;
                    if (block_delta[static_cast<std::size_t>(a)] == 0.0) touched.push_back(a);
                    block_delta[static_cast<std::size_t>(a)] += v;
                };
                for (const auto& u : g.uses(cheap)) add_delta(u.resource, u.rate);
                for (const auto& u : g.uses(costly)) add_delta(u.resource, -u.rate);
                auto dphi = [&](double m) {
                    double v = 0.0;
                    for (int a : touched) {
                        double da = block_delta[static_cast<std::size_t>(a)];
                        v += da * model.value(a, loads[static_cast<std::size_t>(a)] + m * da);
                    }
                    return v;
                };
                double full = res.profile[costly];
                double step = 0.0;
                if (dphi(0.0) < 0.0) {
                    if (dphi(full) <= 0.0) {
                        step = full;
                    } else {
                        double lo = 0.0, hi = full;
                        double tol = cfg.line_search_tolerance * std::max(1.0, full);
                        while (hi - lo > tol) {
                            double mid = 0.5 * (lo + hi);
                            (dphi(mid) <= 0.0 ? lo : hi) = mid;
                        }
                        step = 0.5 * (lo + hi);
                    }
                }
                if (step > 0.0) {
                    moved = true;
                    res.profile[costly] = step >= full ? 0.0 : res.profile[costly] - step;
                    res.profile[cheap] += step;
                    for (int a : touched)
                        loads[static_cast<std::size_t>(a)] += step * block_delta[static_cast<std::size_t>(a)];
                }
                for (int a : touched) block_delta[static_cast<std::size_t>(a)] = 0.0;
                if (step <= 0.0) break;
            }
        }
        loads = resource_loads(g, res.profile);  // shed incremental drift

        if (!moved) { res.converged = res.gap <= cfg.gap_tolerance; break; }
        if (cfg.record_objective) res.objective_history.push_back(model.potential(loads));
        res.iterations = it + 1;
    }

    auto final_gap = wardrop_gap(g, d, res.profile, model, loads);
    res.gap = final_gap.relative;
    if (res.gap <= cfg.gap_tolerance) res.converged = true;
    res.objective = model.potential(loads);
    return res;
}

}  // namespace detail

/// Computes a Wardrop equilibrium by conditional gradient descent on the
/// Beckmann potential. Returns the best iterate with converged=false if the
/// gap tolerance is not reached within max_iterations.
inline SolveResult solve_wardrop(const Game& g, const DemandVector& d,
                                 const SolverConfig& cfg = {},
                                 const Profile* start = nullptr) {
    return detail::solve_conditional_gradient(g, d, detail::CostModel(g, false), cfg, start);
}

/// Computes a system optimum as a Wardrop equilibrium under the marginal
/// prices c_a(x) = x tau_a'(x) + tau_a(x); the reported objective is the
/// total cost sum_a f_a tau_a(f_a) and the gap is measured under c_a.
inline SolveResult solve_so(const Game& g, const DemandVector& d,
                            const SolverConfig& cfg = {},
                            const Profile* start = nullptr) {
    return detail::solve_conditional_gradient(g, d, detail::CostModel(g, true), cfg, start);
}

struct WardropCheck {
    double gap = 0.0;  // relative
    bool is_equilibrium = false;
    int worst_group = -1;
};

/// Relative Wardrop gap of a feasible profile; zero exactly characterizes
/// equilibria. Zero-demand groups contribute nothing to either term.
inline WardropCheck check_wardrop(const Game& g, const DemandVector& d, const Profile& f,
                                  double epsilon = 1e-9) {
    if (!is_feasible(g, d, f)) throw std::invalid_argument("infeasible profile");
    auto info = detail::wardrop_gap(g, d, f, detail::CostModel(g, false), resource_loads(g, f));
    return {info.relative, info.relative <= epsilon, info.worst_group};
}

/// Smallest relative eps such that every used strategy costs at most (1+eps)
/// times its group minimum; 0 for exact equilibria, infinity when a used
/// strategy has positive cost while some group alternative is free.
inline double check_epsilon_ne_of_so(const Game& g, const DemandVector& d, const Profile& f) {
    if (!is_feasible(g, d, f)) throw std::invalid_argument("infeasible profile");
    auto loads = resource_loads(g, f);
    double eps = 0.0;
    for (int k = 0; k < g.n_groups(); ++k) {
        const auto& strategies = g.strategies_of(k);
        if (strategies.empty() || d[k] <= 0.0) continue;
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> cost;
        cost.reserve(strategies.size());
        for (int s : strategies) {
            cost.push_back(strategy_cost_at_loads(g, loads, s));
            best = std::min(best, cost.back());
        }
        double used_tol = 1e-12 * std::max(1.0, d[k]);
        for (std::size_t i = 0; i < strategies.size(); ++i) {
            if (f[strategies[i]] <= used_tol) continue;
            if (cost[i] <= best) continue;
            if (best <= 0.0) return std::numeric_limits<double>::infinity();
            eps = std::max(eps, cost[i] / best - 1.0);
        }
    }
    return eps;
}

}  // namespace ncg

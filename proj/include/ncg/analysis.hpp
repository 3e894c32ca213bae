#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ncg/demand_path.hpp"
#include "ncg/game.hpp"
#include "ncg/solver.hpp"

namespace ncg {

// ---------------------------------------------------------------------------
// Price of anarchy
// ---------------------------------------------------------------------------

struct PoaResult {
    bool defined = false;  // false when the optimal cost is zero
    double poa = std::numeric_limits<double>::quiet_NaN();
    double c_ne = 0.0;  // average equilibrium cost
    double c_so = 0.0;  // average optimal cost
    SolveResult ne;
    SolveResult so;
};

inline PoaResult price_of_anarchy(const Game& g, const DemandVector& d, const SolverConfig& cfg = {}) {
    if (!(total_demand(d) > 0.0)) throw std::invalid_argument("price of anarchy needs positive total demand");
    PoaResult r;
    r.ne = solve_wardrop(g, d, cfg);
    r.so = solve_so(g, d, cfg);
    double t = total_demand(d);
    r.c_ne = total_cost(g, r.ne.profile) / t;
    r.c_so = total_cost(g, r.so.profile) / t;
    r.defined = r.c_so > 0.0;
    if (r.defined) r.poa = r.c_ne / r.c_so;
    return r;
}

/// Closed-form PoA of the two-link Pigou game with prices x^beta and 1.
/// The default is derived by minimizing f^(beta+1) + (T - f): the optimal
/// interior flow is (beta+1)^(-1/beta), so for T >= 1 the optimum totals
/// T - (beta+1)^(-1/beta) + (beta+1)^(-(beta+1)/beta) while equilibrium
/// totals T. `paper_literal` reproduces the commonly printed variant whose
/// last denominator term is (beta+1)^(-1) instead.
inline double pigou_poa_closed_form(double beta, double T, bool paper_literal = false) {
    if (!(beta > 0.0)) throw std::invalid_argument("pigou closed form needs beta > 0");
    if (!(T > 0.0)) throw std::invalid_argument("pigou closed form needs T > 0");
    if (paper_literal)
        return T / (T - std::pow(beta + 1.0, -1.0 / beta) + std::pow(beta + 1.0, -1.0));
    double f_star = std::pow(beta + 1.0, -1.0 / beta);
    double so_total = T <= f_star ? std::pow(T, beta + 1.0)
                                  : T - f_star + std::pow(f_star, beta + 1.0);
    double ne_total = T <= 1.0 ? std::pow(T, beta + 1.0) : T;
    return ne_total / so_total;
}

// ---------------------------------------------------------------------------
// Degrees
// ---------------------------------------------------------------------------

struct DegreeReport {
    std::vector<std::optional<Rat>> resource;  // nullopt for the zero polynomial
    std::vector<Rat> strategy;                 // rho_s = max over consumed resources
    std::vector<Rat> group;                    // rho_k = min over the group's strategies
};

/// Degrees rho_a / rho_s / rho_k; requires a game without free strategies so
/// that every strategy touches at least one resource of defined degree.
inline DegreeReport degrees(const Game& g) {
    DegreeReport rep;
    rep.resource.resize(g.n_resources());
    for (int a = 0; a < g.n_resources(); ++a) rep.resource[a] = g.price(a).index();
    rep.strategy.resize(g.n_strategies());
    for (int s = 0; s < g.n_strategies(); ++s) {
        bool any = false;
        Rat best(0);
        for (const auto& u : g.uses(s)) {
            if (u.rate <= 0.0 || !rep.resource[u.resource]) continue;
            Rat r = *rep.resource[u.resource];
            if (!any || best < r) best = r;
            any = true;
        }
        if (!any) throw std::invalid_argument("free strategy '" + g.strategy_id(s) + "' has no degree");
        rep.strategy[s] = best;
    }
    rep.group.resize(g.n_groups());
    for (int k = 0; k < g.n_groups(); ++k) {
        const auto& strategies = g.strategies_of(k);
        if (strategies.empty()) throw std::invalid_argument("empty group '" + g.group_id(k) + "' has no degree");
        Rat best = rep.strategy[strategies.front()];
        for (int s : strategies) best = min(best, rep.strategy[s]);
        rep.group[k] = best;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Mutually disjoint groups / direct sums
// ---------------------------------------------------------------------------

struct MdgComponent {
    std::vector<int> groups;      // original group indices
    std::vector<int> resources;   // original resource indices
    std::vector<int> strategies;  // original strategy indices, in global order
    Game game;                    // the independent sub-game
};

/// Connected components of the bipartite group-resource graph (edge iff some
/// strategy of the group consumes the resource). Each component is an
/// independent sub-game; concatenating component equilibria solves the whole
/// game.
inline std::vector<MdgComponent> mdg_decompose(const Game& g) {
    int K = g.n_groups(), A = g.n_resources();
    std::vector<int> comp(K + A, -1);  // groups then resources
    int n_comp = 0;
    for (int k0 = 0; k0 < K; ++k0) {
        if (comp[k0] != -1) continue;
        std::vector<int> stack{k0};
        comp[k0] = n_comp;
        while (!stack.empty()) {
            int node = stack.back();
            stack.pop_back();
            if (node < K) {
                for (int s : g.strategies_of(node))
                    for (const auto& u : g.uses(s))
                        if (u.rate > 0.0 && comp[K + u.resource] == -1) {
                            comp[K + u.resource] = n_comp;
                            stack.push_back(K + u.resource);
                        }
            } else {
                int a = node - K;
                for (int k = 0; k < K; ++k) {
                    if (comp[k] != -1) continue;
                    bool touches = false;
                    for (int s : g.strategies_of(k)) {
                        for (const auto& u : g.uses(s))
                            if (u.rate > 0.0 && u.resource == a) { touches = true; break; }
                        if (touches) break;
                    }
                    if (touches) { comp[k] = n_comp; stack.push_back(k); }
                }
            }
        }
        ++n_comp;
    }

    std::vector<MdgComponent> out(n_comp);
    std::vector<std::vector<int>> res_local(n_comp, std::vector<int>(A, -1));
    for (int a = 0; a < A; ++a) {
        int c = comp[K + a];
        if (c == -1) continue;  // untouched resource: attach nowhere
        res_local[c][a] = static_cast<int>(out[c].resources.size());
        out[c].resources.push_back(a);
        out[c].game.add_resource(g.resource_id(a), g.price(a));
    }
    std::vector<int> group_local(K);
    for (int k = 0; k < K; ++k) {
        int c = comp[k];
        group_local[k] = out[c].game.add_group(g.group_id(k));
        out[c].groups.push_back(k);
    }
    for (int s = 0; s < g.n_strategies(); ++s) {
        int k = g.group_of(s);
        int c = comp[k];
        std::vector<Use> uses;
        for (const auto& u : g.uses(s)) {
            int local = res_local[c][u.resource];
            if (local == -1) {
                // resource consumed at rate 0 lives in another component
                if (u.rate > 0.0) throw std::logic_error("component bookkeeping error");
                continue;
            }
            uses.push_back({local, u.rate});
        }
        out[c].game.add_strategy(group_local[k], g.strategy_id(s), std::move(uses));
        out[c].strategies.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Limit games
// ---------------------------------------------------------------------------

/// Asymptotic size of a price function: its regular-variation index and the
/// exponent of the slowly varying log factor, compared lexicographically.
struct AsymptoticKey {
    Rat index;
    double log_exponent = 0.0;
};

inline bool operator<(const AsymptoticKey& a, const AsymptoticKey& b) {
    if (a.index != b.index) return a.index < b.index;
    return a.log_exponent < b.log_exponent;
}
inline bool operator==(const AsymptoticKey& a, const AsymptoticKey& b) {
    return a.index == b.index && a.log_exponent == b.log_exponent;
}

inline std::optional<AsymptoticKey> asymptotic_key(const PriceFunction& p) {
    auto idx = p.index();
    if (!idx) return std::nullopt;  // identically zero
    return AsymptoticKey{*idx, p.log_exponent()};
}

enum class LimitKind { Zero, Power, Infinite };

struct LimitPrice {
    LimitKind kind = LimitKind::Zero;
    double coeff = 0.0;  // Power only: tau_inf(x) = coeff * x^exponent
    Rat exponent;
};

struct LimitGameResult {
    bool valid = false;
    std::vector<std::string> diagnostics;  // L3/L4 failures
    int phase = 0;
    PowerLog gauge;                       // scaling g_n = gauge(T(d^(n)))
    std::vector<LimitPrice> prices;       // per resource
    std::vector<bool> tight_strategy;     // all consumed limits finite
    std::vector<bool> negligible_group;   // L3.1 w.r.t. the scaling factors
    std::vector<bool> surviving_group;    // K^inf
    std::vector<bool> tight_group;        // 0 < min_s max_a q_a < inf
    std::vector<double> delta;            // limit volume shares
    // numeric verification on the constructed instance at demand delta
    Game instance;
    std::vector<int> instance_strategy_of;  // instance strategy -> original strategy
    bool poa_defined = false;
    double ne_cost = 0.0, so_cost = 0.0, poa = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

/// q_a = lim tau_a(x)/g(x) within the power-log family: decided by the
/// lexicographic comparison of (index, log exponent), with the ratio of
/// scales on exact ties.
inline LimitPrice limit_price_under(const PriceFunction& tau, const PowerLog& gauge) {
    auto key = asymptotic_key(tau);
    if (!key) return {LimitKind::Zero, 0.0, gauge.power};
    AsymptoticKey gkey{gauge.power, gauge.log_exponent};
    if (*key < gkey) return {LimitKind::Zero, 0.0, gauge.power};
    if (gkey < *key) return {LimitKind::Infinite, 0.0, gauge.power};
    return {LimitKind::Power, tau.index_coefficient() / gauge.scale, gauge.power};
}

}  // namespace detail

/// Constructs the limit game of `g` along one phase of a demand path with
/// scaling factors g_n = T^alpha, verifying the limit-game conditions:
/// every group is negligible or has a tight strategy, and equilibria of the
/// limit instance have positive cost. On violation the result is marked
/// invalid and carries diagnostics instead.
inline LimitGameResult build_limit_game(const Game& g, const DemandPath& path, int phase_idx,
                                        const PowerLog& gauge, const SolverConfig& cfg = {});

inline LimitGameResult build_limit_game(const Game& g, const DemandPath& path, int phase_idx,
                                        const Rat& alpha, const SolverConfig& cfg = {}) {
    return build_limit_game(g, path, phase_idx, PowerLog{1.0, alpha, 0.0}, cfg);
}

inline LimitGameResult build_limit_game(const Game& g, const DemandPath& path, int phase_idx,
                                        const PowerLog& gauge, const SolverConfig& cfg) {
    path.validate(g.n_groups());
    if (phase_idx < 0 || phase_idx >= path.n_phases()) throw std::out_of_range("no such phase");
    const auto& phase = path.phases()[static_cast<std::size_t>(phase_idx)];

    LimitGameResult res;
    res.phase = phase_idx;
    res.gauge = gauge;
    res.delta = phase_limit_shares(phase);
    Rat p_total = phase_total_exponent(phase);

    res.prices.resize(static_cast<std::size_t>(g.n_resources()));
    for (int a = 0; a < g.n_resources(); ++a)
        res.prices[static_cast<std::size_t>(a)] = detail::limit_price_under(g.price(a), gauge);

    res.tight_strategy.assign(static_cast<std::size_t>(g.n_strategies()), false);
    for (int s = 0; s < g.n_strategies(); ++s) {
        bool tight = true;
        for (const auto& u : g.uses(s))
            if (u.rate > 0.0 && res.prices[static_cast<std::size_t>(u.resource)].kind == LimitKind::Infinite)
                tight = false;
        res.tight_strategy[static_cast<std::size_t>(s)] = tight;
    }

    // L3.1: group cost vanishes relative to T*g_n for every feasible profile.
    // A resource's load is bounded by the demand of the groups touching it,
    // so its worst-case price grows like tau_a(n^q_a) with q_a the largest
    // demand exponent among those groups. Growth keys (exponent in n, log
    // exponent) compare lexicographically.
    std::vector<Rat> load_exp(static_cast<std::size_t>(g.n_resources()), Rat(0));
    for (int k = 0; k < g.n_groups(); ++k) {
        const auto& term = phase.per_group[static_cast<std::size_t>(k)];
        if (term.theta <= 0.0) continue;
        for (int s : g.strategies_of(k))
            for (const auto& u : g.uses(s))
                if (u.rate > 0.0)
                    load_exp[static_cast<std::size_t>(u.resource)] =
                        max(load_exp[static_cast<std::size_t>(u.resource)], term.p);
    }
    AsymptoticKey scaling_key{p_total + p_total * gauge.power, gauge.log_exponent};
    res.negligible_group.assign(static_cast<std::size_t>(g.n_groups()), false);
    res.tight_group.assign(static_cast<std::size_t>(g.n_groups()), false);
    for (int k = 0; k < g.n_groups(); ++k) {
        const auto& term = phase.per_group[static_cast<std::size_t>(k)];
        if (term.theta <= 0.0) {
            res.negligible_group[static_cast<std::size_t>(k)] = true;
        } else {
            AsymptoticKey worst{Rat(0), 0.0};
            for (int s : g.strategies_of(k)) {
                for (const auto& u : g.uses(s)) {
                    if (u.rate <= 0.0) continue;
                    auto key = asymptotic_key(g.price(u.resource));
                    if (!key) continue;
                    Rat q = load_exp[static_cast<std::size_t>(u.resource)];
                    AsymptoticKey growth = q > Rat(0)
                                               ? AsymptoticKey{key->index * q, key->log_exponent}
                                               : AsymptoticKey{Rat(0), 0.0};
                    if (worst < growth) worst = growth;
                }
            }
            AsymptoticKey cost_key{term.p + worst.index, worst.log_exponent};
            res.negligible_group[static_cast<std::size_t>(k)] = cost_key < scaling_key;
        }

        // gauge-style group tightness: min over strategies of the largest
        // consumed q lies strictly between zero and infinity
        int zero_rank = 0, power_rank = 1, inf_rank = 2;
        int best_rank = inf_rank;
        for (int s : g.strategies_of(k)) {
            int rank = zero_rank;
            for (const auto& u : g.uses(s)) {
                if (u.rate <= 0.0) continue;
                switch (res.prices[static_cast<std::size_t>(u.resource)].kind) {
                    case LimitKind::Zero: break;
                    case LimitKind::Power: rank = std::max(rank, power_rank); break;
                    case LimitKind::Infinite: rank = std::max(rank, inf_rank); break;
                }
            }
            best_rank = std::min(best_rank, rank);
        }
        res.tight_group[static_cast<std::size_t>(k)] = best_rank == power_rank;
    }

    // L3: negligible or tight strategy, for every group
    for (int k = 0; k < g.n_groups(); ++k) {
        bool has_tight = false;
        for (int s : g.strategies_of(k))
            if (res.tight_strategy[static_cast<std::size_t>(s)]) has_tight = true;
        if (!res.negligible_group[static_cast<std::size_t>(k)] && !has_tight)
            res.diagnostics.push_back("L3 fails: group '" + g.group_id(k) +
                                      "' is neither negligible nor has a tight strategy");
    }

    // K^inf: groups that are not negligible or keep a tight strategy
    res.surviving_group.assign(static_cast<std::size_t>(g.n_groups()), false);
    for (int k = 0; k < g.n_groups(); ++k) {
        bool has_tight = false;
        for (int s : g.strategies_of(k))
            if (res.tight_strategy[static_cast<std::size_t>(s)]) has_tight = true;
        res.surviving_group[static_cast<std::size_t>(k)] =
            !res.negligible_group[static_cast<std::size_t>(k)] || has_tight;
    }

    // L4: equilibrium cost of the limit game is positive, i.e. some group
    // with positive limit share has no free-in-the-limit tight strategy
    bool l4 = false;
    for (int k = 0; k < g.n_groups(); ++k) {
        if (res.delta[static_cast<std::size_t>(k)] <= 0.0) continue;
        bool has_tight = false, all_tight_paid = true;
        for (int s : g.strategies_of(k)) {
            if (!res.tight_strategy[static_cast<std::size_t>(s)]) continue;
            has_tight = true;
            bool paid = false;
            for (const auto& u : g.uses(s))
                if (u.rate > 0.0 &&
                    res.prices[static_cast<std::size_t>(u.resource)].kind == LimitKind::Power)
                    paid = true;
            if (!paid) all_tight_paid = false;
        }
        if (has_tight && all_tight_paid) l4 = true;
    }
    if (!l4)
        res.diagnostics.push_back(
            "L4 fails: every group with positive limit share can ride a zero-cost strategy");

    res.valid = res.diagnostics.empty();
    if (!res.valid) return res;

    // materialize the limit instance over K^inf and tight strategies
    std::vector<int> res_local(static_cast<std::size_t>(g.n_resources()), -1);
    for (int a = 0; a < g.n_resources(); ++a) {
        const auto& lp = res.prices[static_cast<std::size_t>(a)];
        if (lp.kind == LimitKind::Infinite) continue;
        PriceFunction price = PriceFunction::polynomial({0.0});
        if (lp.kind == LimitKind::Power) {
            if (lp.exponent.is_integer() && lp.exponent.num() >= 0) {
                std::vector<double> coeffs(static_cast<std::size_t>(lp.exponent.num()) + 1, 0.0);
                coeffs.back() = lp.coeff;
                price = PriceFunction::polynomial(std::move(coeffs));
            } else {
                price = PriceFunction::power_log(lp.coeff, lp.exponent, 0.0);
            }
        }
        res_local[static_cast<std::size_t>(a)] = res.instance.add_resource(g.resource_id(a), price);
    }
    DemandVector ref;
    for (int k = 0; k < g.n_groups(); ++k) {
        if (!res.surviving_group[static_cast<std::size_t>(k)]) continue;
        int lk = res.instance.add_group(g.group_id(k));
        ref.push_back(res.delta[static_cast<std::size_t>(k)]);
        for (int s : g.strategies_of(k)) {
            if (!res.tight_strategy[static_cast<std::size_t>(s)]) continue;
            std::vector<Use> uses;
            for (const auto& u : g.uses(s))
                if (res_local[static_cast<std::size_t>(u.resource)] != -1 && u.rate > 0.0)
                    uses.push_back({res_local[static_cast<std::size_t>(u.resource)], u.rate});
            res.instance.add_strategy(lk, g.strategy_id(s), std::move(uses));
            res.instance_strategy_of.push_back(s);
        }
    }

    // numeric check at the reference demand: equilibrium cost is positive and
    // the instance is well designed there (PoA = 1)
    if (total_demand(ref) > 0.0) {
        auto ne = solve_wardrop(res.instance, ref, cfg);
        auto so = solve_so(res.instance, ref, cfg);
        res.ne_cost = total_cost(res.instance, ne.profile);
        res.so_cost = total_cost(res.instance, so.profile);
        res.poa_defined = res.so_cost > 0.0;
        if (res.poa_defined) res.poa = res.ne_cost / res.so_cost;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Asymptotic decomposition
// ---------------------------------------------------------------------------

struct DecompositionLevel {
    std::vector<int> groups;  // K_l
    Rat alpha;                // alpha_l = max group degree at this level
    Rat t_exponent;           // growth exponent of the remaining volume T_l
    Rat scaling_exponent;     // alpha_l * t_exponent, growth of g_n^(l)
    Rat cost_exponent;        // (alpha_l + 1) * t_exponent, growth of T_l * g_n^(l)
    enum class Verdict { Base, Independent, Negligible, ZeroDemand } verdict = Verdict::Base;
};

struct PhaseDecomposition {
    int phase = 0;
    std::vector<DecompositionLevel> levels;
    Rat predicted_cost_exponent;  // growth exponent of the total equilibrium cost
};

struct DecompositionReport {
    std::vector<PhaseDecomposition> phases;
};

/// Inductive partition K_0, ..., K_t of the groups along each phase of the
/// demand path: level l collects the groups whose degree is at most the
/// maximal degree among groups still carrying a positive share of the
/// remaining volume. Levels whose scaling factors stop growing relative to
/// earlier ones are negligible; the rest are asymptotically independent.
inline DecompositionReport asymptotic_decomposition(const Game& g, const DemandPath& path) {
    path.validate(g.n_groups());
    auto deg = degrees(g);

    DecompositionReport report;
    for (int pi = 0; pi < path.n_phases(); ++pi) {
        const auto& phase = path.phases()[static_cast<std::size_t>(pi)];
        PhaseDecomposition pd;
        pd.phase = pi;

        std::vector<int> remaining(static_cast<std::size_t>(g.n_groups()));
        for (int k = 0; k < g.n_groups(); ++k) remaining[static_cast<std::size_t>(k)] = k;

        bool first = true;
        Rat max_scaling(0);
        Rat predicted(0);
        bool have_predicted = false;
        while (!remaining.empty()) {
            bool any_demand = false;
            for (int k : remaining)
                if (phase.per_group[static_cast<std::size_t>(k)].theta > 0.0) any_demand = true;

            DecompositionLevel level;
            if (!any_demand) {
                // trailing groups with identically-zero demand contribute no
                // cost; park them in one terminal level
                level.groups = remaining;
                level.alpha = deg.group[static_cast<std::size_t>(remaining.front())];
                for (int k : remaining) level.alpha = max(level.alpha, deg.group[static_cast<std::size_t>(k)]);
                level.t_exponent = Rat(0);
                level.scaling_exponent = Rat(0);
                level.cost_exponent = Rat(0);
                level.verdict = DecompositionLevel::Verdict::ZeroDemand;
                pd.levels.push_back(std::move(level));
                break;
            }

            level.t_exponent = phase_total_exponent(phase, &remaining);
            bool have_alpha = false;
            for (int k : remaining) {
                const auto& term = phase.per_group[static_cast<std::size_t>(k)];
                if (term.theta > 0.0 && term.p == level.t_exponent) {
                    if (!have_alpha || level.alpha < deg.group[static_cast<std::size_t>(k)])
                        level.alpha = deg.group[static_cast<std::size_t>(k)];
                    have_alpha = true;
                }
            }
            std::vector<int> rest;
            for (int k : remaining) {
                if (deg.group[static_cast<std::size_t>(k)] <= level.alpha)
                    level.groups.push_back(k);
                else
                    rest.push_back(k);
            }
            level.scaling_exponent = level.alpha * level.t_exponent;
            level.cost_exponent = (level.alpha + Rat(1)) * level.t_exponent;
            if (first) {
                level.verdict = DecompositionLevel::Verdict::Base;
                max_scaling = level.scaling_exponent;
            } else if (max_scaling < level.scaling_exponent) {
                level.verdict = DecompositionLevel::Verdict::Independent;
                max_scaling = level.scaling_exponent;
            } else {
                level.verdict = DecompositionLevel::Verdict::Negligible;
            }
            if (!have_predicted || predicted < level.cost_exponent) predicted = level.cost_exponent;
            have_predicted = true;
            first = false;
            remaining = std::move(rest);
            pd.levels.push_back(std::move(level));
        }
        pd.predicted_cost_exponent = predicted;
        report.phases.push_back(std::move(pd));
    }
    return report;
}

inline std::string to_table(const DecompositionReport& report, const Game& g) {
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    std::ostringstream out;
    for (const auto& pd : report.phases) {
        out << "phase " << pd.phase << " (predicted total-cost growth exponent "
            << pd.predicted_cost_exponent.to_string() << ")\n";
        out << "  " << pad("level", 7) << pad("groups", 27) << pad("alpha", 7) << pad("T-exp", 7)
            << pad("g-exp", 7) << "verdict\n";
        for (std::size_t l = 0; l < pd.levels.size(); ++l) {
            const auto& lv = pd.levels[l];
            std::string names;
            for (int k : lv.groups) {
                if (!names.empty()) names += ",";
                names += g.group_id(k);
            }
            if (names.size() > 24) names = names.substr(0, 21) + "...";
            const char* verdict = "";
            switch (lv.verdict) {
                case DecompositionLevel::Verdict::Base: verdict = "base"; break;
                case DecompositionLevel::Verdict::Independent: verdict = "independent"; break;
                case DecompositionLevel::Verdict::Negligible: verdict = "negligible"; break;
                case DecompositionLevel::Verdict::ZeroDemand: verdict = "zero-demand"; break;
            }
            out << "  " << pad(std::to_string(l), 7) << pad(names, 27)
                << pad(lv.alpha.to_string(), 7) << pad(lv.t_exponent.to_string(), 7)
                << pad(lv.scaling_exponent.to_string(), 7) << verdict << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Gaugeability
// ---------------------------------------------------------------------------

struct QValue {
    LimitKind kind = LimitKind::Zero;  // Zero / Power (finite) / Infinite
    double value = 0.0;                // set for finite q
};

struct GaugeReport {
    PowerLog gauge;
    std::vector<QValue> q;                  // per resource, q_a = lim tau_a / g
    std::vector<bool> group_has_finite;     // G2 per group
    std::vector<bool> tight_group;          // 0 < min_s max_a q_a < inf
    std::vector<double> phase_tight_share;  // lim of sum_{tight} d_k / T per phase
    double liminf_tight_share = 0.0;
    bool g1 = true;  // limits exist (always, within the family)
    bool g2 = false;
    bool g3 = false;
    bool gaugeable = false;
};

inline GaugeReport gauge_check(const Game& g, const DemandPath& path, const PowerLog& gauge) {
    path.validate(g.n_groups());
    GaugeReport rep;
    rep.gauge = gauge;
    rep.q.resize(static_cast<std::size_t>(g.n_resources()));
    for (int a = 0; a < g.n_resources(); ++a) {
        auto lp = detail::limit_price_under(g.price(a), gauge);
        rep.q[static_cast<std::size_t>(a)] = {lp.kind, lp.coeff};
    }

    rep.group_has_finite.assign(static_cast<std::size_t>(g.n_groups()), false);
    rep.tight_group.assign(static_cast<std::size_t>(g.n_groups()), false);
    for (int k = 0; k < g.n_groups(); ++k) {
        int best_rank = 2;
        for (int s : g.strategies_of(k)) {
            int rank = 0;  // 0 zero, 1 finite positive, 2 infinite
            for (const auto& u : g.uses(s)) {
                if (u.rate <= 0.0) continue;
                switch (rep.q[static_cast<std::size_t>(u.resource)].kind) {
                    case LimitKind::Zero: break;
                    case LimitKind::Power: rank = std::max(rank, 1); break;
                    case LimitKind::Infinite: rank = std::max(rank, 2); break;
                }
            }
            if (rank < 2) rep.group_has_finite[static_cast<std::size_t>(k)] = true;
            best_rank = std::min(best_rank, rank);
        }
        rep.tight_group[static_cast<std::size_t>(k)] = best_rank == 1;
    }

    rep.g2 = true;
    for (int k = 0; k < g.n_groups(); ++k)
        if (!rep.group_has_finite[static_cast<std::size_t>(k)]) rep.g2 = false;

    rep.liminf_tight_share = std::numeric_limits<double>::infinity();
    for (const auto& phase : path.phases()) {
        auto delta = phase_limit_shares(phase);
        double share = 0.0;
        for (int k = 0; k < g.n_groups(); ++k)
            if (rep.tight_group[static_cast<std::size_t>(k)]) share += delta[static_cast<std::size_t>(k)];
        rep.phase_tight_share.push_back(share);
        rep.liminf_tight_share = std::min(rep.liminf_tight_share, share);
    }
    rep.g3 = rep.liminf_tight_share > 0.0;
    rep.gaugeable = rep.g1 && rep.g2 && rep.g3;
    return rep;
}

struct SubsetGaugeReport {
    PowerLog gauge;
    bool g1p = true;
    bool g2p = false;
    bool g3p = false;
    bool ok() const { return g1p && g2p && g3p; }
};

/// Checks G1'-G3' for a subset of groups: every subset group has a strategy
/// with all consumed q finite, and some subset group's cheapest strategy has
/// a positive finite worst q.
inline SubsetGaugeReport gauge_check_subset(const Game& g, const std::vector<int>& subset,
                                            const PowerLog& gauge) {
    SubsetGaugeReport rep;
    rep.gauge = gauge;
    std::vector<QValue> q(static_cast<std::size_t>(g.n_resources()));
    for (int a = 0; a < g.n_resources(); ++a) {
        auto lp = detail::limit_price_under(g.price(a), gauge);
        q[static_cast<std::size_t>(a)] = {lp.kind, lp.coeff};
    }
    rep.g2p = true;
    rep.g3p = false;
    for (int k : subset) {
        int best_rank = 2;
        for (int s : g.strategies_of(k)) {
            int rank = 0;
            for (const auto& u : g.uses(s)) {
                if (u.rate <= 0.0) continue;
                switch (q[static_cast<std::size_t>(u.resource)].kind) {
                    case LimitKind::Zero: break;
                    case LimitKind::Power: rank = std::max(rank, 1); break;
                    case LimitKind::Infinite: rank = std::max(rank, 2); break;
                }
            }
            best_rank = std::min(best_rank, rank);
        }
        if (best_rank == 2) rep.g2p = false;
        if (best_rank == 1) rep.g3p = true;
    }
    return rep;
}

/// Searches for a gauge satisfying G1'-G3' for the subset among power-log
/// gauges whose (index, log exponent) occurs among the game's resources;
/// candidates outside that set cannot change any q verdict in this family.
inline std::optional<PowerLog> find_gauge(const Game& g, const std::vector<int>& subset) {
    std::vector<AsymptoticKey> keys;
    for (int a = 0; a < g.n_resources(); ++a) {
        auto key = asymptotic_key(g.price(a));
        if (!key) continue;
        bool dup = false;
        for (const auto& k : keys)
            if (k == *key) dup = true;
        if (!dup) keys.push_back(*key);
    }
    std::sort(keys.begin(), keys.end());
    for (const auto& key : keys) {
        PowerLog gauge{1.0, key.index, key.log_exponent};
        if (gauge_check_subset(g, subset, gauge).ok()) return gauge;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Regular-variation diagnostics
// ---------------------------------------------------------------------------

struct RegVarDiagnostics {
    std::optional<Rat> symbolic_index;
    double index_estimate = 0.0;           // limit estimate from scaling ratios
    double karamata_limit_estimate = 0.0;  // limit estimate of x tau'/tau
    std::vector<double> index_samples;     // log2(tau(2t)/tau(t)) at t = 1e6, 1e12
    std::vector<double> karamata_samples;  // x tau'(x)/tau(x) at x = 1e4, 1e6, 1e8
};

/// Numerically estimates the regular-variation index two ways: from the
/// scaling ratio tau(t x)/tau(t) and from the Karamata quotient x tau'/tau.
/// Raw samples converge only like 1/ln t for log-type slowly varying parts,
/// so both estimators extrapolate the 1/ln t term away before reporting.
inline RegVarDiagnostics regvar_diagnostics(const PriceFunction& tau) {
    RegVarDiagnostics d;
    d.symbolic_index = tau.index();
    if (tau.is_zero()) return d;

    auto ratio_at = [&](double t) { return std::log2(tau.value(2.0 * t) / tau.value(t)); };
    double t1 = 1e6, t2 = 1e12;
    d.index_samples = {ratio_at(t1), ratio_at(t2)};
    double l1 = std::log(t1), l2 = std::log(t2);
    d.index_estimate = (d.index_samples[1] * l2 - d.index_samples[0] * l1) / (l2 - l1);

    auto karamata_at = [&](double x) { return x * tau.derivative(x) / tau.value(x); };
    d.karamata_samples = {karamata_at(1e4), karamata_at(1e6), karamata_at(1e8)};
    double k2 = std::log(1e6), k3 = std::log(1e8);
    d.karamata_limit_estimate =
        (d.karamata_samples[2] * k3 - d.karamata_samples[1] * k2) / (k3 - k2);
    return d;
}

// ---------------------------------------------------------------------------
// Comparability ordering
// ---------------------------------------------------------------------------

struct ComparabilityOrder {
    bool all_comparable = true;               // always, within this family
    std::vector<int> class_of;                // resource -> equivalence class
    std::vector<std::vector<int>> classes;    // ascending by (index, log exponent)
    std::vector<int> cheapest_strategy;       // asymptotically cheapest s*_k per group
};

/// Total preorder a <= b iff lim tau_a/tau_b < inf: lexicographic on
/// (index, log exponent); equal keys are one equivalence class regardless of
/// scale. The identically-zero price sits below everything.
inline ComparabilityOrder comparability_order(const Game& g) {
    ComparabilityOrder ord;
    std::vector<std::pair<bool, AsymptoticKey>> key(static_cast<std::size_t>(g.n_resources()));
    for (int a = 0; a < g.n_resources(); ++a) {
        auto k = asymptotic_key(g.price(a));
        key[static_cast<std::size_t>(a)] = k ? std::make_pair(true, *k)
                                             : std::make_pair(false, AsymptoticKey{Rat(0), 0.0});
    }
    std::vector<int> order(static_cast<std::size_t>(g.n_resources()));
    for (int a = 0; a < g.n_resources(); ++a) order[static_cast<std::size_t>(a)] = a;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ka = key[static_cast<std::size_t>(a)];
        const auto& kb = key[static_cast<std::size_t>(b)];
        if (ka.first != kb.first) return !ka.first;  // zero price first
        if (!(ka.second == kb.second)) return ka.second < kb.second;
        return a < b;
    });
    ord.class_of.assign(static_cast<std::size_t>(g.n_resources()), -1);
    for (int a : order) {
        bool fresh = ord.classes.empty();
        if (!fresh) {
            int last = ord.classes.back().front();
            const auto& ka = key[static_cast<std::size_t>(a)];
            const auto& kl = key[static_cast<std::size_t>(last)];
            fresh = ka.first != kl.first || !(ka.second == kl.second);
        }
        if (fresh) ord.classes.emplace_back();
        ord.classes.back().push_back(a);
        ord.class_of[static_cast<std::size_t>(a)] = static_cast<int>(ord.classes.size()) - 1;
    }

    // cheapest strategy: smallest dominant class, then smallest summed scale
    // over the dominant class, then lowest index
    ord.cheapest_strategy.assign(static_cast<std::size_t>(g.n_groups()), -1);
    for (int k = 0; k < g.n_groups(); ++k) {
        int best = -1, best_class = 0;
        double best_scale = 0.0;
        for (int s : g.strategies_of(k)) {
            int cls = 0;
            for (const auto& u : g.uses(s))
                if (u.rate > 0.0) cls = std::max(cls, ord.class_of[static_cast<std::size_t>(u.resource)]);
            double scale = 0.0;
            for (const auto& u : g.uses(s))
                if (u.rate > 0.0 && ord.class_of[static_cast<std::size_t>(u.resource)] == cls)
                    scale += u.rate * g.price(u.resource).index_coefficient();
            if (best == -1 || cls < best_class || (cls == best_class && scale < best_scale)) {
                best = s;
                best_class = cls;
                best_scale = scale;
            }
        }
        ord.cheapest_strategy[static_cast<std::size_t>(k)] = best;
    }
    return ord;
}

}  // namespace ncg

#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "ncg/analysis.hpp"
#include "ncg/demand_path.hpp"
#include "ncg/game.hpp"
#include "ncg/solver.hpp"

namespace ncg {

// ---------------------------------------------------------------------------
// Demand-scaling experiments
// ---------------------------------------------------------------------------

struct ScaleRecord {
    int phase = 0;
    long n = 0;
    double t = 0.0;
    double c_ne = 0.0;
    double c_so = 0.0;
    double poa = 0.0;
    double gap_ne = 0.0;
    double gap_so = 0.0;
    double eps_so = 0.0;
    double ms = 0.0;
    bool converged = false;
};

struct ScaleRun {
    std::vector<ScaleRecord> records;  // ordered by the n grid
};

/// Grid spec "start:end:geometric[:factor]" (default factor 2) or
/// "start:end:linear[:step]" (default step 1).
inline std::vector<long> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() < 3) throw std::invalid_argument("grid spec needs start:end:kind");
    long start = std::stol(parts[0]);
    long end = std::stol(parts[1]);
    if (start < 1 || end < start) throw std::invalid_argument("grid range must satisfy 1 <= start <= end");
    std::vector<long> grid;
    if (parts[2] == "geometric") {
        double factor = parts.size() > 3 ? std::stod(parts[3]) : 2.0;
        if (!(factor > 1.0)) throw std::invalid_argument("geometric factor must be > 1");
        double v = static_cast<double>(start);
        while (true) {
            long n = std::lround(v);
            if (n > end) break;
            if (grid.empty() || grid.back() != n) grid.push_back(n);
            v *= factor;
        }
        if (grid.empty() || grid.back() != end) grid.push_back(end);
    } else if (parts[2] == "linear") {
        long step = parts.size() > 3 ? std::stol(parts[3]) : 1;
        if (step < 1) throw std::invalid_argument("linear step must be >= 1");
        for (long n = start; n <= end; n += step) grid.push_back(n);
    } else {
        throw std::invalid_argument("unknown grid kind: " + parts[2]);
    }
    return grid;
}

inline int default_thread_count() {
    if (const char* env = std::getenv("NCG_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Solves equilibrium and optimum at every grid point of the demand path.
/// Records for distinct n are independent; they may be computed in parallel
/// (thread count from `threads`, else NCG_THREADS, else the hardware) and
/// are always aggregated in grid order.
inline ScaleRun scale_poa(const Game& g, const DemandPath& path, const std::vector<long>& grid,
                          const SolverConfig& cfg = {}, int threads = 0) {
    path.validate(g.n_groups());
    ScaleRun run;
    run.records.resize(grid.size());

    auto solve_one = [&](std::size_t i) {
        auto start = std::chrono::steady_clock::now();
        ScaleRecord rec;
        rec.n = grid[i];
        rec.phase = path.phase_index_of(grid[i]);
        DemandVector d = path.demand_at(grid[i]);
        rec.t = total_demand(d);
        SolverConfig quiet = cfg;
        quiet.record_objective = false;
        auto ne = solve_wardrop(g, d, quiet);
        auto so = solve_so(g, d, quiet);
        rec.gap_ne = ne.gap;
        rec.gap_so = so.gap;
        rec.converged = ne.converged && so.converged;
        if (rec.t > 0.0) {
            rec.c_ne = total_cost(g, ne.profile) / rec.t;
            rec.c_so = total_cost(g, so.profile) / rec.t;
            rec.poa = rec.c_so > 0.0 ? rec.c_ne / rec.c_so : std::numeric_limits<double>::quiet_NaN();
            rec.eps_so = check_epsilon_ne_of_so(g, d, so.profile);
        }
        rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        run.records[i] = rec;
    };

    int n_threads = threads > 0 ? threads : default_thread_count();
    n_threads = std::min<int>(n_threads, static_cast<int>(grid.size()));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) solve_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) solve_one(i);
            });
        for (auto& th : pool) th.join();
    }
    return run;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace detail

/// CSV with one row per record. Every column except ms is a deterministic
/// function of the inputs; pass with_timing=false to zero the ms column and
/// make the whole file byte-reproducible.
inline std::string to_csv(const ScaleRun& run, bool with_timing = true) {
    std::string out = "phase,n,T,C_ne,C_so,poa,gap_ne,gap_so,eps_so,ms\n";
    for (const auto& r : run.records) {
        out += std::to_string(r.phase) + "," + std::to_string(r.n) + "," + detail::fmt(r.t) + "," +
               detail::fmt(r.c_ne) + "," + detail::fmt(r.c_so) + "," + detail::fmt(r.poa) + "," +
               detail::fmt(r.gap_ne) + "," + detail::fmt(r.gap_so) + "," + detail::fmt(r.eps_so) + "," +
               detail::fmt(with_timing ? r.ms : 0.0) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Convergence reports
// ---------------------------------------------------------------------------

struct PhaseConvergence {
    int phase = 0;
    int n_records = 0;
    double poa_last_minus_1 = 0.0;
    bool monotone_nonincreasing = false;  // over the last 5 records, 1e-6 slack
    bool gamma_defined = false;
    double gamma_hat = 0.0;   // PoA - 1 ~ c * T^(-gamma)
    double residual = 0.0;    // rms residual of the log-log fit
    int fit_points = 0;
    bool measured_defined = false;
    double measured_cost_exponent = 0.0;  // slope of log total NE cost vs log n, top decade of T
    std::string verdict;
};

struct ConvergenceReport {
    std::vector<PhaseConvergence> phases;
    bool has_prediction = false;
    std::vector<double> predicted_cost_exponent;  // parallel to phases
};

namespace detail {

struct FitResult {
    double slope = 0.0, intercept = 0.0, residual = 0.0;
    int points = 0;
};

inline FitResult least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    FitResult f;
    f.points = static_cast<int>(x.size());
    if (f.points < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < f.points; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double n = f.points;
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) return f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (int i = 0; i < f.points; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

}  // namespace detail

/// Fits the decay exponent of PoA - 1 against T per phase (log-log least
/// squares over the top half of the converged records) and, when a
/// decomposition report is supplied, compares the measured growth of the
/// total equilibrium cost with the predicted exponent.
inline ConvergenceReport convergence_report(const ScaleRun& run,
                                            const DecompositionReport* decomposition = nullptr) {
    int total_converged = 0;
    int max_phase = -1;
    for (const auto& r : run.records) {
        if (r.converged) ++total_converged;
        max_phase = std::max(max_phase, r.phase);
    }
    if (total_converged < 4) throw std::invalid_argument("insufficient data: need at least 4 converged records");

    ConvergenceReport rep;
    for (int phase = 0; phase <= max_phase; ++phase) {
        PhaseConvergence pc;
        pc.phase = phase;
        std::vector<ScaleRecord> recs;
        for (const auto& r : run.records)
            if (r.phase == phase && r.converged) recs.push_back(r);
        pc.n_records = static_cast<int>(recs.size());
        if (recs.empty()) {
            pc.verdict = "no records";
            rep.phases.push_back(std::move(pc));
            continue;
        }
        std::sort(recs.begin(), recs.end(), [](const ScaleRecord& a, const ScaleRecord& b) { return a.t < b.t; });
        pc.poa_last_minus_1 = recs.back().poa - 1.0;

        pc.monotone_nonincreasing = true;
        std::size_t tail = recs.size() > 5 ? recs.size() - 5 : 0;
        for (std::size_t i = tail; i + 1 < recs.size(); ++i)
            if (recs[i + 1].poa > recs[i].poa + 1e-6) pc.monotone_nonincreasing = false;

        // decay fit over the top half by T, skipping records where PoA - 1
        // is below solver resolution
        std::size_t half = recs.size() / 2;
        std::vector<double> lx, ly;
        for (std::size_t i = half; i < recs.size(); ++i) {
            double excess = recs[i].poa - 1.0;
            if (excess > 1e-11 && recs[i].t > 0.0) {
                lx.push_back(std::log(recs[i].t));
                ly.push_back(std::log(excess));
            }
        }
        if (static_cast<int>(lx.size()) >= 4) {
            auto fit = detail::least_squares(lx, ly);
            pc.gamma_defined = true;
            pc.gamma_hat = -fit.slope;
            pc.residual = fit.residual;
            pc.fit_points = fit.points;
            pc.verdict = "converging";
        } else if (pc.poa_last_minus_1 <= 1e-11) {
            pc.verdict = "already optimal";
        } else {
            pc.verdict = "insufficient data";
        }

        // measured growth of the total equilibrium cost over the top decade
        double t_max = recs.back().t;
        std::vector<double> gx, gy;
        for (const auto& r : recs) {
            if (r.t >= t_max / 10.0 && r.c_ne > 0.0 && r.n > 0) {
                gx.push_back(std::log(static_cast<double>(r.n)));
                gy.push_back(std::log(r.c_ne * r.t));
            }
        }
        if (gx.size() >= 2) {
            auto fit = detail::least_squares(gx, gy);
            pc.measured_defined = true;
            pc.measured_cost_exponent = fit.slope;
        }
        rep.phases.push_back(std::move(pc));
    }

    if (decomposition) {
        rep.has_prediction = true;
        rep.predicted_cost_exponent.assign(rep.phases.size(), 0.0);
        for (const auto& pd : decomposition->phases)
            if (pd.phase >= 0 && pd.phase < static_cast<int>(rep.phases.size()))
                rep.predicted_cost_exponent[static_cast<std::size_t>(pd.phase)] =
                    pd.predicted_cost_exponent.to_double();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Built-in corpus
// ---------------------------------------------------------------------------

/// Pigou's game: one group, one link priced x^beta against one constant link.
inline Game pigou(double beta) {
    Game g;
    int rx;
    if (beta == std::floor(beta) && beta >= 0.0 && beta < 64.0) {
        std::vector<double> coeffs(static_cast<std::size_t>(beta) + 1, 0.0);
        coeffs.back() = 1.0;
        rx = g.add_resource("rx", PriceFunction::polynomial(std::move(coeffs)));
    } else {
        auto denominator = static_cast<std::int64_t>(std::llround(beta * 1000000.0));
        rx = g.add_resource("rx", PriceFunction::power_log(1.0, Rat(denominator, 1000000), 0.0));
    }
    int rc = g.add_resource("rc", PriceFunction::constant(1.0));
    int k = g.add_group("g");
    g.add_strategy(k, "variable", {{rx, 1.0}});
    g.add_strategy(k, "constant", {{rc, 1.0}});
    return g;
}

/// Two independent parallel-link pairs: an affine upper pair (2x+1, 3x+1)
/// and a quadratic lower pair (4x^2, 5x^2). Alternating demand sequences on
/// it have different limit scalings per phase.
inline Game double_limits() {
    Game g;
    int u1 = g.add_resource("u1", PriceFunction::polynomial({1.0, 2.0}));
    int u2 = g.add_resource("u2", PriceFunction::polynomial({1.0, 3.0}));
    int l1 = g.add_resource("l1", PriceFunction::polynomial({0.0, 0.0, 4.0}));
    int l2 = g.add_resource("l2", PriceFunction::polynomial({0.0, 0.0, 5.0}));
    int up = g.add_group("up");
    g.add_strategy(up, "up_a", {{u1, 1.0}});
    g.add_strategy(up, "up_b", {{u2, 1.0}});
    int low = g.add_group("low");
    g.add_strategy(low, "low_a", {{l1, 1.0}});
    g.add_strategy(low, "low_b", {{l2, 1.0}});
    return g;
}

/// Two groups colliding on a shared middle resource; every group degree is 1.
inline Game all_degree_equal() {
    Game g;
    int a1 = g.add_resource("a1", PriceFunction::polynomial({0.0, 1.0}));
    int a2 = g.add_resource("a2", PriceFunction::polynomial({1.0, 2.0}));
    int a3 = g.add_resource("a3", PriceFunction::polynomial({3.0, 1.0}));
    int g1 = g.add_group("g1");
    g.add_strategy(g1, "g1_own", {{a1, 1.0}});
    g.add_strategy(g1, "g1_shared", {{a2, 1.0}});
    int g2 = g.add_group("g2");
    g.add_strategy(g2, "g2_shared", {{a2, 1.0}});
    g.add_strategy(g2, "g2_own", {{a3, 1.0}});
    return g;
}

/// Direct sum of two Pigou games on disjoint resources.
inline Game mdg_pair() {
    Game g;
    int x1 = g.add_resource("x1", PriceFunction::polynomial({0.0, 1.0}));
    int c1 = g.add_resource("c1", PriceFunction::constant(1.0));
    int x2 = g.add_resource("x2", PriceFunction::polynomial({0.0, 0.0, 0.0, 0.0, 1.0}));
    int c2 = g.add_resource("c2", PriceFunction::constant(1.0));
    int k1 = g.add_group("left");
    g.add_strategy(k1, "left_var", {{x1, 1.0}});
    g.add_strategy(k1, "left_const", {{c1, 1.0}});
    int k2 = g.add_group("right");
    g.add_strategy(k2, "right_var", {{x2, 1.0}});
    g.add_strategy(k2, "right_const", {{c2, 1.0}});
    return g;
}

struct BuiltinGame {
    std::string name;
    Game game;
};

inline std::vector<BuiltinGame> builtin_games() {
    return {
        {"pigou1", pigou(1.0)},
        {"pigou4", pigou(4.0)},
        {"double_limits", double_limits()},
        {"all_degree_equal", all_degree_equal()},
        {"mdg_pair", mdg_pair()},
    };
}

// ---------------------------------------------------------------------------
// Seeded random games
// ---------------------------------------------------------------------------

struct RandomGameSpec {
    int n_groups = 2;
    int max_strategies_per_group = 3;
    int n_resources = 4;
    int max_degree = 3;
};

namespace detail {

/// splitmix64; fixed algorithm so identical seeds give identical games on
/// every platform, independent of the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t state_;
};

}  // namespace detail

/// Deterministic random polynomial game: every price has a positive leading
/// coefficient and a positive constant term, so no strategy is free and
/// equilibrium costs stay bounded away from zero.
inline Game random_game(std::uint64_t seed, const RandomGameSpec& spec = {}, int max_degree = -1) {
    detail::Rng rng(seed ^ 0xda3e39cb94b95bdbULL);
    int degree_cap = max_degree >= 0 ? max_degree : spec.max_degree;

    Game g;
    for (int a = 0; a < spec.n_resources; ++a) {
        int degree = rng.below(degree_cap + 1);
        std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1, 0.0);
        coeffs[0] = rng.uniform(0.5, 2.0);
        if (degree > 0) coeffs[static_cast<std::size_t>(degree)] = rng.uniform(0.5, 2.0);
        g.add_resource("a" + std::to_string(a), PriceFunction::polynomial(std::move(coeffs)));
    }
    for (int k = 0; k < spec.n_groups; ++k) {
        int group = g.add_group("k" + std::to_string(k));
        int n_strats = 1 + rng.below(spec.max_strategies_per_group);
        for (int s = 0; s < n_strats; ++s) {
            int n_uses = 1 + rng.below(std::min(3, spec.n_resources));
            std::vector<Use> uses;
            std::vector<bool> taken(static_cast<std::size_t>(spec.n_resources), false);
            for (int u = 0; u < n_uses; ++u) {
                int a = rng.below(spec.n_resources);
                if (taken[static_cast<std::size_t>(a)]) continue;
                taken[static_cast<std::size_t>(a)] = true;
                double rate = rng.uniform() < 0.75 ? 1.0 : rng.uniform(0.5, 2.0);
                uses.push_back({a, rate});
            }
            g.add_strategy(group, "k" + std::to_string(k) + "s" + std::to_string(s), std::move(uses));
        }
    }
    return g;
}

}  // namespace ncg

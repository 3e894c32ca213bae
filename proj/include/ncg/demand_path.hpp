#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncg/game.hpp"
#include "ncg/rational.hpp"

namespace ncg {

/// One power-law demand term: theta * n^p.
struct PowerTerm {
    double theta = 0.0;
    Rat p;
};

/// Demands for indices n with n = residue (mod modulus).
struct DemandPhase {
    long modulus = 1;
    long residue = 0;
    std::vector<PowerTerm> per_group;
};

/// Symbolic demand sequence d^(n): per-group power-law terms, optionally
/// phased over residue classes of n. Phases let one path express alternating
/// sequences whose subsequences scale differently.
class DemandPath {
public:
    DemandPath() = default;
    explicit DemandPath(std::vector<DemandPhase> phases) : phases_(std::move(phases)) {}

    /// Single-phase path d_k(n) = theta_k * n^(p_k).
    static DemandPath single(std::vector<PowerTerm> terms) {
        return DemandPath({DemandPhase{1, 0, std::move(terms)}});
    }

    const std::vector<DemandPhase>& phases() const { return phases_; }
    int n_phases() const { return static_cast<int>(phases_.size()); }

    /// Phases must share one modulus and cover each residue exactly once;
    /// every phase needs a group with theta > 0 and p > 0 so that the total
    /// volume diverges along the sequence.
    void validate(int n_groups) const {
        if (phases_.empty()) throw std::invalid_argument("demand path has no phases");
        long m = phases_.front().modulus;
        if (m < 1) throw std::invalid_argument("phase modulus must be >= 1");
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        for (const auto& ph : phases_) {
            if (ph.modulus != m) throw std::invalid_argument("phases must share one modulus");
            if (ph.residue < 0 || ph.residue >= m) throw std::invalid_argument("phase residue out of range");
            if (seen[static_cast<std::size_t>(ph.residue)])
                throw std::invalid_argument("phase residue covered twice");
            seen[static_cast<std::size_t>(ph.residue)] = true;
            if (static_cast<int>(ph.per_group.size()) != n_groups)
                throw std::invalid_argument("phase group count does not match game");
            bool diverges = false;
            for (const auto& t : ph.per_group) {
                if (t.theta < 0.0) throw std::invalid_argument("negative demand coefficient");
                if (t.theta > 0.0 && t.p > Rat(0)) diverges = true;
                if (t.p < Rat(0)) throw std::invalid_argument("negative demand exponent");
            }
            if (!diverges)
                throw std::invalid_argument("phase residue " + std::to_string(ph.residue) +
                                            " has no growing group (total volume must diverge)");
        }
        for (bool s : seen)
            if (!s) throw std::invalid_argument("phases do not cover all residues");
    }

    int phase_index_of(long n) const {
        long m = phases_.front().modulus;
        long r = n % m;
        if (r < 0) r += m;
        for (int i = 0; i < n_phases(); ++i)
            if (phases_[i].residue == r) return i;
        throw std::logic_error("residue not covered");
    }

    const DemandPhase& phase_of(long n) const { return phases_[phase_index_of(n)]; }

    DemandVector demand_at(long n) const {
        const auto& ph = phase_of(n);
        DemandVector d(ph.per_group.size());
        for (std::size_t k = 0; k < d.size(); ++k)
            d[k] = ph.per_group[k].theta * std::pow(static_cast<double>(n), ph.per_group[k].p.to_double());
        return d;
    }

private:
    std::vector<DemandPhase> phases_;
};

/// Growth exponent of the total volume within a phase: max p_k over groups
/// with theta_k > 0 (among the given subset, or all groups).
inline Rat phase_total_exponent(const DemandPhase& ph, const std::vector<int>* subset = nullptr) {
    Rat best(0);
    bool any = false;
    auto consider = [&](int k) {
        const auto& t = ph.per_group[static_cast<std::size_t>(k)];
        if (t.theta <= 0.0) return;
        if (!any || best < t.p) best = t.p;
        any = true;
    };
    if (subset) {
        for (int k : *subset) consider(k);
    } else {
        for (int k = 0; k < static_cast<int>(ph.per_group.size()); ++k) consider(k);
    }
    if (!any) throw std::invalid_argument("no group with positive demand in phase");
    return best;
}

/// Limit shares delta_k = lim d_k / T along the phase: positive exactly for
/// the groups attaining the dominant exponent.
inline std::vector<double> phase_limit_shares(const DemandPhase& ph) {
    Rat pmax = phase_total_exponent(ph);
    double denom = 0.0;
    for (const auto& t : ph.per_group)
        if (t.theta > 0.0 && t.p == pmax) denom += t.theta;
    std::vector<double> delta(ph.per_group.size(), 0.0);
    for (std::size_t k = 0; k < delta.size(); ++k)
        if (ph.per_group[k].theta > 0.0 && ph.per_group[k].p == pmax)
            delta[k] = ph.per_group[k].theta / denom;
    return delta;
}

}  // namespace ncg

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "fso/scenarios/relay.hpp"
#include "fso/scenarios/rofso.hpp"

namespace fso {

/// Ground-truth solution of the power-adaptation problem restricted to a
/// finite channel-state set and a power grid. The expected budget and the
/// dual function are exact sums over the states, so the whole dual line
/// search is deterministic: c both the extracted primal value and the dual
/// bound are returned (they bracket the discretized optimum).
struct RofsoOracleResult {
    double optimum = 0.0;      ///< mean objective of the extracted policy
    double dual_bound = 0.0;   ///< min_lambda D(lambda) over the grid problem
    double lambda_star = 0.0;
    double mean_budget = 0.0;  ///< expected total power of the policy
    std::vector<std::vector<double>> policy_table; ///< per state: powers
};

inline RofsoOracleResult brute_force_rofso(const RofsoProgram& inst,
                                           std::span<const ChannelSample> states,
                                           int grid_points) {
    if (states.empty()) throw std::invalid_argument("oracle: no states");
    if (grid_points < 2) throw std::invalid_argument("oracle: grid too small");
    const RofsoConstants& k = inst.constants();
    int n = inst.channels();

    // Precompute capacities on the grid: cap[state][channel][g].
    std::vector<double> grid(grid_points);
    for (int g = 0; g < grid_points; ++g)
        grid[g] = k.power_peak * g / (grid_points - 1);
    std::vector<std::vector<std::vector<double>>> cap(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        cap[s].resize(n);
        for (int i = 0; i < n; ++i) {
            cap[s][i].resize(grid_points);
            for (int g = 0; g < grid_points; ++g)
                cap[s][i][g] =
                    inst.weights()[i] * capacity_rofso(states[s].gains[i], grid[g], k);
        }
    }

    auto argmax_power = [&](std::size_t s, int i, double lam) {
        int best = 0;
        double bv = cap[s][i][0];
        for (int g = 1; g < grid_points; ++g) {
            double v = cap[s][i][g] - lam * grid[g];
            if (v > bv) {
                bv = v;
                best = g;
            }
        }
        return best;
    };
    auto mean_budget = [&](double lam) {
        double tot = 0.0;
        for (std::size_t s = 0; s < states.size(); ++s)
            for (int i = 0; i < n; ++i) tot += grid[argmax_power(s, i, lam)];
        return tot / static_cast<double>(states.size());
    };

    RofsoOracleResult res;
    double lam = 0.0;
    if (mean_budget(0.0) > k.power_total) {
        double hi = 1.0;
        while (mean_budget(hi) > k.power_total && hi < 1e12) hi *= 2.0;
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mean_budget(mid) > k.power_total)
                lo = mid;
            else
                hi = mid;
        }
        lam = hi;
    }
    res.lambda_star = lam;

    res.policy_table.resize(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        res.policy_table[s].resize(n);
        for (int i = 0; i < n; ++i) {
            int g = argmax_power(s, i, lam);
            res.policy_table[s][i] = grid[g];
            res.optimum += cap[s][i][g];
            res.mean_budget += grid[g];
        }
    }
    res.optimum /= static_cast<double>(states.size());
    res.mean_budget /= static_cast<double>(states.size());
    res.dual_bound = res.optimum - lam * (res.mean_budget - k.power_total);
    return res;
}

/// Exhaustive path enumeration, written independently of the scenario's own
/// argmax loop (plain nested recursion) so it can serve as its oracle.
inline double enumerate_relay_best(const ChannelSample& h, const RelayProgram& inst,
                                   std::vector<int>* best_path = nullptr) {
    int n = inst.hops(), m = inst.relays_per_hop();
    std::vector<int> path(n, 0);
    std::vector<int> best(n, 0);
    double best_v = -1.0;
    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            double v = inst.path_capacity(h, path);
            if (v > best_v) {
                best_v = v;
                best = path;
            }
            return;
        }
        for (int j = 0; j < m; ++j) {
            path[depth] = j;
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
    if (best_path) *best_path = best;
    return best_v;
}

} // namespace fso

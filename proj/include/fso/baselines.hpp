#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fso/detail/search.hpp"
#include "fso/scenarios/fronthaul.hpp"
#include "fso/scenarios/joint_relay.hpp"
#include "fso/scenarios/relay.hpp"
#include "fso/scenarios/rofso.hpp"

namespace fso {

/// Per-draw allocation at multiplier nu: each carrier maximizes
/// w_i C_i(h_i, p) - nu p on [0, P_s].
inline Action waterfill_powers_at(const ChannelSample& h, const RofsoProgram& inst,
                                  double nu) {
    const RofsoConstants& k = inst.constants();
    Action a;
    a.powers.resize(inst.channels());
    for (int i = 0; i < inst.channels(); ++i) {
        double g = h.gains[i];
        double w = inst.weights()[i];
        a.powers[i] = detail::maximize_scalar(
            [&](double p) { return w * capacity_rofso(g, p, k) - nu * p; }, 0.0, k.power_peak,
            1e-6);
    }
    return a;
}

/// Water-filling reconstruction: bisect the budget multiplier nu until the
/// per-draw total power matches P_t within tol (relative), or nu = 0 when
/// the unconstrained allocation already fits. `warned` is set when the
/// budget cannot be matched (non-bracketing jump); the feasible-side
/// boundary solution is returned in that case.
inline Action waterfill_rofso(const ChannelSample& h, const RofsoProgram& inst,
                              double tol = 1e-4, bool* warned = nullptr,
                              double* nu_out = nullptr) {
    const RofsoConstants& k = inst.constants();
    if (warned) *warned = false;
    if (nu_out) *nu_out = 0.0;
    auto total = [&](const Action& a) {
        double t = 0.0;
        for (double p : a.powers) t += p;
        return t;
    };
    Action a0 = waterfill_powers_at(h, inst, 0.0);
    if (total(a0) <= k.power_total) return a0;

    double hi = 1.0;
    while (total(waterfill_powers_at(h, inst, hi)) > k.power_total) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    double lo = 0.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (total(waterfill_powers_at(h, inst, mid)) > k.power_total)
            lo = mid;
        else
            hi = mid;
    }
    Action a = waterfill_powers_at(h, inst, hi);
    if (std::abs(total(a) - k.power_total) > tol * k.power_total && warned) *warned = true;
    if (nu_out) *nu_out = hi;
    return a;
}

/// p_i = min(P_t / N, P_s) on every carrier.
inline Action equal_power(const RofsoProgram& inst) {
    Action a;
    a.powers.assign(inst.channels(),
                    std::min(inst.constants().power_total / inst.channels(),
                             inst.constants().power_peak));
    return a;
}

/// i.i.d. U[0, P_s] powers, rescaled per draw when they exceed the budget.
inline Action random_power(const RofsoProgram& inst, Rng& rng) {
    const RofsoConstants& k = inst.constants();
    Action a;
    a.powers.resize(inst.channels());
    double tot = 0.0;
    for (double& p : a.powers) {
        p = rng.uniform(0.0, k.power_peak);
        tot += p;
    }
    if (tot > k.power_total)
        for (double& p : a.powers) p *= k.power_total / tot;
    return a;
}

enum class GreedyMode { best_csi, paper_literal_lowest };

/// Hop-by-hop selection on the incoming segment gain. The default picks the
/// strongest link; the literal mode picks the weakest (shipped for
/// comparison against the quoted baseline wording).
inline Action greedy_relay(const ChannelSample& h, const RelayProgram& inst,
                           GreedyMode mode = GreedyMode::best_csi) {
    int n = inst.hops(), m = inst.relays_per_hop();
    Action a;
    a.selections.resize(n);
    bool best = mode == GreedyMode::best_csi;
    auto better = [&](double x, double y) { return best ? x > y : x < y; };
    int prev = -1;
    for (int i = 0; i < n; ++i) {
        int arg = 0;
        double val = i == 0 ? h.gains[inst.idx_first(0)] : h.gains[inst.idx_mid(i, prev, 0)];
        for (int j = 1; j < m; ++j) {
            double g = i == 0 ? h.gains[inst.idx_first(j)] : h.gains[inst.idx_mid(i, prev, j)];
            if (better(g, val)) {
                val = g;
                arg = j;
            }
        }
        a.selections[i] = arg;
        prev = arg;
    }
    return a;
}

inline Action random_relay(const RelayProgram& inst, Rng& rng) {
    Action a;
    a.selections.resize(inst.hops());
    for (int& j : a.selections) j = static_cast<int>(rng.below(inst.relays_per_hop()));
    return a;
}

/// Random relay plus equal per-carrier power P_t / L (capped at P_s) on the
/// transmitter and the chosen relay.
inline Action random_joint_equal(const JointRelayProgram& inst, Rng& rng) {
    Action a;
    a.powers.assign(inst.node_count() * inst.carriers(), 0.0);
    a.selections.assign(1, static_cast<int>(rng.below(inst.relays())));
    double p = std::min(inst.constants().power_total / inst.carriers(),
                        inst.constants().power_peak);
    for (int l = 0; l < inst.carriers(); ++l) {
        a.powers[inst.power_idx(0, l)] = p;
        a.powers[inst.power_idx(1 + a.selections[0], l)] = p;
    }
    return a;
}

/// Random relay plus i.i.d. U[0, P_s] powers, per-node rescale to the budget.
inline Action random_joint_random(const JointRelayProgram& inst, Rng& rng) {
    Action a;
    a.powers.assign(inst.node_count() * inst.carriers(), 0.0);
    a.selections.assign(1, static_cast<int>(rng.below(inst.relays())));
    const JointRelayConstants& k = inst.constants();
    for (int node : {0, 1 + a.selections[0]}) {
        double tot = 0.0;
        for (int l = 0; l < inst.carriers(); ++l) {
            double p = rng.uniform(0.0, k.power_peak);
            a.powers[inst.power_idx(node, l)] = p;
            tot += p;
        }
        if (tot > k.power_total)
            for (int l = 0; l < inst.carriers(); ++l)
                a.powers[inst.power_idx(node, l)] *= k.power_total / tot;
    }
    return a;
}

/// Uniform AN choice per RRH with equal power P_t / L (capped at P_s) on the
/// selected link. Structurally feasible but prone to breaking the shared
/// congestion caps, which is the point of the comparison.
inline Action random_fronthaul_equal(const FronthaulProgram& inst, Rng& rng) {
    Action a;
    a.powers.assign(inst.csi_size(), 0.0);
    a.selections.resize(inst.rrhs());
    double p = std::min(inst.constants().power_total / inst.carriers(),
                        inst.constants().power_peak);
    for (int i = 0; i < inst.rrhs(); ++i) {
        int j = static_cast<int>(rng.below(inst.ans()));
        a.selections[i] = j;
        for (int l = 0; l < inst.carriers(); ++l) a.powers[inst.entry_idx(i, j, l)] = p;
    }
    return a;
}

} // namespace fso

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fso/oracle.hpp"
#include "fso/scenarios/joint_relay.hpp"
#include "fso/scenarios/relay.hpp"

using namespace fso;

namespace {
RelayProgram make_relay(int hops, int relays, std::uint64_t topo_seed = 101) {
    RelayConstants k;
    ChannelConfig ch;
    Rng rng(topo_seed);
    return RelayProgram(hops, relays, k, ch, 3.0, 0.5, rng);
}

JointRelayProgram make_joint(int relays, int carriers, std::vector<double> omega,
                             std::uint64_t topo_seed = 102) {
    JointRelayConstants k;
    ChannelConfig ch;
    Rng rng(topo_seed);
    return JointRelayProgram(relays, carriers, k, ch, 3.0, 0.5, rng, std::move(omega));
}
} // namespace

TEST_CASE("relay capacity: dead segment kills the path", "[relay]") {
    RelayConstants k;
    std::vector<double> g = {0.05, 0.0, 0.04};
    std::vector<double> p(3, 0.3);
    REQUIRE(capacity_relay_link(g, p, k) == 0.0);
    g[1] = 0.04;
    p[2] = 0.0;
    REQUIRE(capacity_relay_link(g, p, k) == 0.0);
}

TEST_CASE("relay capacity: two segments at SNR 10, precomputed scalar", "[relay]") {
    // s_i = 10 on both segments, T_f B / eps = 5:
    //   5 * log(1 + 1/((1 + 1/10)^2 - 1)) frozen from direct evaluation.
    RelayConstants k;
    double h10 = 10.0 * k.electron_charge * k.noise_bandwidth_hz / k.responsivity;
    std::vector<double> g = {h10, h10};
    std::vector<double> p = {1.0, 1.0};
    REQUIRE(capacity_relay_link(g, p, k) ==
            Catch::Approx(8.756340539366587).epsilon(1e-12));
}

TEST_CASE("relay capacity: weak segment dominates (bottleneck)", "[relay]") {
    RelayConstants k;
    double unit = k.electron_charge * k.noise_bandwidth_hz / k.responsivity; // s = 1 at p = 1
    std::vector<double> g = {1e8 * unit, 100.0 * unit, 1e8 * unit};
    std::vector<double> p = {1.0, 1.0, 1.0};
    double full = capacity_relay_link(g, p, k);
    double bottleneck = k.rate_scale() * std::log1p(100.0);
    REQUIRE(full == Catch::Approx(bottleneck).epsilon(0.01));
}

TEST_CASE("objective: single relay per hop is the only path", "[relay]") {
    RelayProgram prog = make_relay(2, 1);
    Rng rng(1);
    ChannelSample h = prog.draw_csi(rng);
    Action a;
    a.selections = {0, 0};
    std::vector<double> g = prog.path_gains(h, a.selections);
    std::vector<double> p(g.size(), prog.constants().power_fixed);
    REQUIRE(prog.objective(h, a) == Catch::Approx(capacity_relay_link(g, p, prog.constants())));
}

TEST_CASE("objective: equals the full selection-indicator double sum", "[relay]") {
    // The objective's sum over all relay combinations weighted by the
    // selection indicators collapses to the chosen path; check against the
    // literal sum for N=2, M=3.
    RelayProgram prog = make_relay(2, 3);
    Rng rng(2);
    ChannelSample h = prog.draw_csi(rng);
    for (int s1 = 0; s1 < 3; ++s1)
        for (int s2 = 0; s2 < 3; ++s2) {
            Action a;
            a.selections = {s1, s2};
            double sum = 0.0;
            for (int j1 = 0; j1 < 3; ++j1)
                for (int j2 = 0; j2 < 3; ++j2) {
                    double alpha = (j1 == s1 ? 1.0 : 0.0) * (j2 == s2 ? 1.0 : 0.0);
                    if (alpha > 0.0) {
                        std::vector<int> path = {j1, j2};
                        sum += alpha * prog.path_capacity(h, path);
                    }
                }
            REQUIRE(prog.objective(h, a) == Catch::Approx(sum).epsilon(1e-14));
        }
}

TEST_CASE("objective: literal triple-sum oracle for every one-hot selection, N<=3 M<=4",
          "[relay]") {
    for (int n : {1, 2, 3})
        for (int m : {2, 4}) {
            RelayProgram prog = make_relay(n, m, 200 + n * 10 + m);
            Rng rng(3);
            ChannelSample h = prog.draw_csi(rng);
            std::vector<int> sel(n, 0);
            while (true) {
                Action a;
                a.selections = sel;
                // independent enumeration of the indicator sum
                std::vector<int> path(n, 0);
                double sum = 0.0;
                while (true) {
                    bool chosen = true;
                    for (int i = 0; i < n; ++i) chosen = chosen && path[i] == sel[i];
                    if (chosen) sum += prog.path_capacity(h, path);
                    int i = 0;
                    for (; i < n; ++i) {
                        if (++path[i] < m) break;
                        path[i] = 0;
                    }
                    if (i == n) break;
                }
                REQUIRE(prog.objective(h, a) == Catch::Approx(sum).epsilon(1e-14));
                int i = 0;
                for (; i < n; ++i) {
                    if (++sel[i] < m) break;
                    sel[i] = 0;
                }
                if (i == n) break;
            }
        }
}

TEST_CASE("objective: permuting unselected relays' gains changes nothing", "[relay]") {
    RelayProgram prog = make_relay(2, 4);
    Rng rng(4);
    ChannelSample h = prog.draw_csi(rng);
    Action a;
    a.selections = {1, 2};
    double before = prog.objective(h, a);
    // swap every link touching unselected relays 0 and 3 of hop 1
    ChannelSample h2 = h;
    std::swap(h2.gains[prog.idx_first(0)], h2.gains[prog.idx_first(3)]);
    for (int b = 0; b < 4; ++b)
        if (b != 2) std::swap(h2.gains[prog.idx_mid(1, 0, b)], h2.gains[prog.idx_mid(1, 3, b)]);
    REQUIRE(prog.objective(h2, a) == Catch::Approx(before).epsilon(1e-15));
}

TEST_CASE("objective: a path must exist", "[relay]") {
    RelayProgram prog = make_relay(2, 3);
    Rng rng(5);
    ChannelSample h = prog.draw_csi(rng);
    Action a;
    a.selections = {1, -1};
    REQUIRE_THROWS_AS(prog.objective(h, a), std::invalid_argument);
}

TEST_CASE("argmax: equals the independent exhaustive enumeration", "[relay]") {
    RelayProgram prog = make_relay(2, 5);
    Rng rng(6);
    DualState d; // S = 0
    for (int t = 0; t < 50; ++t) {
        ChannelSample h = prog.draw_csi(rng);
        Action a = prog.primal_argmax(h, d);
        std::vector<int> best;
        double v = enumerate_relay_best(h, prog, &best);
        REQUIRE(prog.objective(h, a) == Catch::Approx(v));
        REQUIRE(a.selections == best);
    }
}

TEST_CASE("csi layout has the segment-adjacent size", "[relay]") {
    RelayProgram prog = make_relay(3, 5);
    REQUIRE(prog.csi_size() == 5 + 2 * 25 + 5);
    RelayProgram prog2 = make_relay(1, 7);
    REQUIRE(prog2.csi_size() == 14);
}

// --- joint power and relay allocation -------------------------------------

TEST_CASE("joint: constraint vector is one power budget per node", "[relay]") {
    JointRelayProgram prog = make_joint(3, 2, {0.5, 0.8});
    REQUIRE(prog.constraint_count() == 4);
    Rng rng(7);
    ChannelSample h = prog.draw_csi(rng);
    Action a;
    a.powers.assign(4 * 2, 0.0);
    a.selections = {1};
    a.powers[prog.power_idx(0, 0)] = 0.6;
    a.powers[prog.power_idx(0, 1)] = 0.5;
    a.powers[prog.power_idx(2, 0)] = 0.25;
    std::vector<double> c = prog.constraints(h, a);
    REQUIRE(c[0] == Catch::Approx(1.1 - 1.5));
    REQUIRE(c[1] == Catch::Approx(-1.5));
    REQUIRE(c[2] == Catch::Approx(0.25 - 1.5));
    REQUIRE(c[3] == Catch::Approx(-1.5));
}

TEST_CASE("joint: objective uses only the selected relay's powers", "[relay]") {
    JointRelayProgram prog = make_joint(3, 2, {0.5, 0.8});
    Rng rng(8);
    ChannelSample h = prog.draw_csi(rng);
    Action a;
    a.powers.assign(4 * 2, 0.0);
    a.selections = {1};
    a.powers[prog.power_idx(0, 0)] = 0.4;
    a.powers[prog.power_idx(0, 1)] = 0.3;
    a.powers[prog.power_idx(2, 0)] = 0.2;
    a.powers[prog.power_idx(2, 1)] = 0.1;
    double expect = 0.0;
    for (int l = 0; l < 2; ++l)
        expect += prog.weights()[l] *
                  prog.carrier_capacity(h, 1, l, a.powers[prog.power_idx(0, l)],
                                        a.powers[prog.power_idx(2, l)]);
    REQUIRE(prog.objective(h, a) == Catch::Approx(expect));
    // powers parked on unselected relays do not contribute
    Action b = a;
    b.powers[prog.power_idx(1, 0)] = 0.6;
    b.powers[prog.power_idx(3, 1)] = 0.6;
    REQUIRE(prog.objective(h, b) == Catch::Approx(expect));
}

TEST_CASE("joint: argmax at zero duals saturates the selected pair", "[relay]") {
    JointRelayProgram prog = make_joint(3, 2, {0.5, 0.8});
    Rng rng(9);
    ChannelSample h = prog.draw_csi(rng);
    Action a = prog.primal_argmax(h, DualState::zeros(4));
    int j = a.selections[0];
    for (int l = 0; l < 2; ++l) {
        REQUIRE(a.powers[prog.power_idx(0, l)] == Catch::Approx(0.6).margin(1e-9));
        REQUIRE(a.powers[prog.power_idx(1 + j, l)] == Catch::Approx(0.6).margin(1e-9));
    }
}

TEST_CASE("joint: argmax with huge duals turns everything off", "[relay]") {
    JointRelayProgram prog = make_joint(3, 2, {0.5, 0.8});
    Rng rng(10);
    ChannelSample h = prog.draw_csi(rng);
    DualState d;
    d.lambda.assign(4, 1e9);
    Action a = prog.primal_argmax(h, d);
    for (double p : a.powers) REQUIRE(p == 0.0);
}

TEST_CASE("joint: argmax matches a fine exhaustive oracle on a small case", "[relay]") {
    JointRelayProgram prog = make_joint(2, 1, {1.0}, 45);
    Rng rng(11);
    DualState d;
    d.lambda = {0.7, 0.3, 1.1};
    for (int t = 0; t < 5; ++t) {
        ChannelSample h = prog.draw_csi(rng);
        Action a = prog.primal_argmax(h, d);
        double got = prog.objective(h, a);
        {
            std::vector<double> c = prog.constraints(h, a);
            for (std::size_t s = 0; s < c.size(); ++s) got -= d.lambda[s] * (c[s] + 1.5);
        }
        // independent 301x301 grid over (p_tx, p_relay) per relay; the
        // per-node constant P_t drops out of the comparison above
        double best = -1e300;
        for (int j = 0; j < 2; ++j)
            for (int g0 = 0; g0 <= 300; ++g0)
                for (int g1 = 0; g1 <= 300; ++g1) {
                    double p0 = 0.6 * g0 / 300.0, p1 = 0.6 * g1 / 300.0;
                    double v = prog.carrier_capacity(h, j, 0, p0, p1) - d.lambda[0] * p0 -
                               d.lambda[1 + j] * p1;
                    if (v > best) best = v;
                }
        REQUIRE(got == Catch::Approx(best).margin(5e-3 * std::abs(best) + 1e-4));
    }
}

TEST_CASE("joint: dims validated", "[relay]") {
    JointRelayConstants k;
    ChannelConfig ch;
    Rng rng(12);
    REQUIRE_THROWS_AS(JointRelayProgram(0, 2, k, ch, 3.0, 0.5, rng, {0.5, 0.5}),
                      std::invalid_argument);
    Rng rng2(12);
    REQUIRE_THROWS_AS(JointRelayProgram(3, 2, k, ch, 3.0, 0.5, rng2, {0.5}),
                      std::invalid_argument);
}

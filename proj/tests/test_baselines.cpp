#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fso/baselines.hpp"
#include "fso/detail/math.hpp"

using namespace fso;

namespace {
RofsoProgram make_rofso(int n, std::vector<double> omega, double pt = 1.5, double ps = 0.3) {
    RofsoConstants k;
    k.power_total = pt;
    k.power_peak = ps;
    ChannelConfig ch;
    return RofsoProgram(n, k, ch, 1.0, std::move(omega));
}
} // namespace

TEST_CASE("waterfill: symmetric channels get equal powers", "[baselines]") {
    RofsoProgram prog = make_rofso(4, std::vector<double>(4, 0.7));
    ChannelSample h{std::vector<double>(4, 0.05)};
    Action a = waterfill_rofso(h, prog);
    for (int i = 1; i < 4; ++i)
        REQUIRE(a.powers[i] == Catch::Approx(a.powers[0]).margin(1e-5));
    double tot = 0.0;
    for (double p : a.powers) tot += p;
    REQUIRE(tot <= 1.5 * 1.0001);
}

TEST_CASE("waterfill: slack budget saturates every carrier", "[baselines]") {
    // N * P_s <= P_t: the unconstrained argmax applies, and capacity is
    // increasing in power, so everything sits at the peak.
    RofsoProgram prog = make_rofso(4, {0.9, 0.5, 0.7, 0.3}, /*pt=*/2.0, /*ps=*/0.3);
    Rng rng(1);
    ChannelSample h = prog.draw_csi(rng);
    Action a = waterfill_rofso(h, prog);
    for (double p : a.powers) REQUIRE(p == Catch::Approx(0.3).margin(1e-5));
}

TEST_CASE("waterfill: active budget is balanced to 1e-4 relative", "[baselines]") {
    Rng rng(2);
    std::vector<double> omega(8);
    for (double& w : omega) w = rng.uniform();
    RofsoProgram prog = make_rofso(8, omega); // 8 * 0.3 > 1.5: budget binds
    for (int t = 0; t < 25; ++t) {
        ChannelSample h = prog.draw_csi(rng);
        bool warned = false;
        Action a = waterfill_rofso(h, prog, 1e-4, &warned);
        double tot = 0.0;
        for (double p : a.powers) tot += p;
        REQUIRE_FALSE(warned);
        REQUIRE(std::abs(tot - 1.5) < 1e-4 * 1.5);
    }
}

TEST_CASE("waterfill: KKT stationarity at interior carriers", "[baselines]") {
    Rng rng(3);
    std::vector<double> omega(8);
    for (double& w : omega) w = rng.uniform();
    RofsoProgram prog = make_rofso(8, omega);
    ChannelSample h = prog.draw_csi(rng);
    double nu = 0.0;
    Action a = waterfill_rofso(h, prog, 1e-4, nullptr, &nu);
    REQUIRE(nu > 0.0);
    int interior = 0;
    for (int i = 0; i < 8; ++i) {
        double p = a.powers[i];
        if (p < 1e-3 || p > 0.3 - 1e-3) continue;
        const double eps = 1e-6;
        double up = omega[i] * capacity_rofso(h.gains[i], p + eps, prog.constants());
        double dn = omega[i] * capacity_rofso(h.gains[i], p - eps, prog.constants());
        double slope = (up - dn) / (2 * eps);
        REQUIRE(std::abs(slope - nu) < 1e-3 * nu);
        ++interior;
    }
    REQUIRE(interior > 0);
}

TEST_CASE("equal power: uniform split capped at the peak", "[baselines]") {
    RofsoProgram prog = make_rofso(10, std::vector<double>(10, 0.5));
    Action a = equal_power(prog);
    for (double p : a.powers) REQUIRE(p == Catch::Approx(0.15));
    RofsoProgram prog2 = make_rofso(4, std::vector<double>(4, 0.5), 2.0, 0.3);
    Action b = equal_power(prog2);
    for (double p : b.powers) REQUIRE(p == Catch::Approx(0.3));
}

TEST_CASE("random power: support and expected budget", "[baselines]") {
    RofsoProgram prog = make_rofso(10, std::vector<double>(10, 0.5));
    Rng rng(4);
    detail::RunningStats budget;
    for (int t = 0; t < 100000; ++t) {
        Action a = random_power(prog, rng);
        double tot = 0.0;
        for (double p : a.powers) {
            REQUIRE(p >= 0.0);
            REQUIRE(p <= 0.3);
            tot += p;
        }
        REQUIRE(tot <= 1.5 * (1 + 1e-12));
        budget.add(tot);
    }
    REQUIRE(budget.mean() <= 1.5);
    REQUIRE(budget.mean() > 1.2); // rescaling keeps it near the budget
}

TEST_CASE("greedy relay: single relay is a forced choice", "[baselines]") {
    RelayConstants k;
    ChannelConfig ch;
    Rng topo(5);
    RelayProgram prog(3, 1, k, ch, 3.0, 0.5, topo);
    Rng rng(6);
    ChannelSample h = prog.draw_csi(rng);
    Action a = greedy_relay(h, prog);
    REQUIRE(a.selections == std::vector<int>{0, 0, 0});
}

TEST_CASE("greedy relay: matches a sort-based oracle on the incoming segment", "[baselines]") {
    RelayConstants k;
    ChannelConfig ch;
    Rng topo(7);
    RelayProgram prog(2, 5, k, ch, 3.0, 0.5, topo);
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        ChannelSample h = prog.draw_csi(rng);
        Action a = greedy_relay(h, prog);
        // hop 1: argmax over the transmitter links
        std::vector<std::pair<double, int>> order;
        for (int j = 0; j < 5; ++j) order.push_back({h.gains[prog.idx_first(j)], j});
        std::sort(order.rbegin(), order.rend());
        REQUIRE(a.selections[0] == order[0].second);
        // hop 2: argmax over links leaving the chosen hop-1 relay
        order.clear();
        for (int j = 0; j < 5; ++j)
            order.push_back({h.gains[prog.idx_mid(1, a.selections[0], j)], j});
        std::sort(order.rbegin(), order.rend());
        REQUIRE(a.selections[1] == order[0].second);

        Action lo = greedy_relay(h, prog, GreedyMode::paper_literal_lowest);
        std::sort(order.begin(), order.end());
        // literal mode min-picks hop 2 relative to its own hop-1 choice
        std::vector<std::pair<double, int>> first;
        for (int j = 0; j < 5; ++j) first.push_back({h.gains[prog.idx_first(j)], j});
        std::sort(first.begin(), first.end());
        REQUIRE(lo.selections[0] == first[0].second);
    }
}

TEST_CASE("greedy relay: best mode beats literal-lowest almost always", "[baselines]") {
    RelayConstants k;
    ChannelConfig ch;
    Rng topo(9);
    RelayProgram prog(2, 5, k, ch, 3.0, 0.5, topo);
    Rng rng(10);
    int wins = 0;
    const int n = 1000;
    for (int t = 0; t < n; ++t) {
        ChannelSample h = prog.draw_csi(rng);
        double best = prog.objective(h, greedy_relay(h, prog));
        double lowest =
            prog.objective(h, greedy_relay(h, prog, GreedyMode::paper_literal_lowest));
        if (best >= lowest) ++wins;
    }
    REQUIRE(wins >= static_cast<int>(0.99 * n));
}

TEST_CASE("random selection: uniform per hop and structurally one-hot", "[baselines]") {
    RelayConstants k;
    ChannelConfig ch;
    Rng topo(11);
    RelayProgram prog(2, 5, k, ch, 3.0, 0.5, topo);
    Rng rng(12);
    const int n = 100000;
    std::vector<int> counts(5, 0);
    for (int t = 0; t < n; ++t) {
        Action a = random_relay(prog, rng);
        REQUIRE(prog.action_feasible(a));
        ++counts[a.selections[0]];
    }
    // chi-square against uniform, 4 dof; 3-sigma-ish critical value
    double chi2 = 0.0;
    double expect = n / 5.0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    REQUIRE(chi2 < 25.0);
}

TEST_CASE("random AN selection breaks the congestion cap on a loaded cluster",
          "[baselines]") {
    FronthaulConstants k;
    ChannelConfig ch;
    Rng topo(13);
    std::vector<double> omega = {0.9, 0.8, 0.7, 0.6, 0.5};
    FronthaulProgram prog(5, 2, 5, k, ch, 5.0, 1.0, topo, omega);
    Rng rng(14);
    detail::RunningStats worst;
    std::vector<double> c(prog.constraint_count());
    for (int t = 0; t < 2000; ++t) {
        ChannelSample h = prog.draw_csi(rng);
        Action a = random_fronthaul_equal(prog, rng);
        REQUIRE(prog.action_feasible(a));
        prog.constraints(h, a, c);
        worst.add(std::max(c[5 * 2 + 0], c[5 * 2 + 1]));
    }
    REQUIRE(worst.mean() > 0.0); // congestion violated on average
}

TEST_CASE("joint baselines: structurally feasible with budgeted powers", "[baselines]") {
    JointRelayConstants k;
    ChannelConfig ch;
    Rng topo(15);
    JointRelayProgram prog(5, 5, k, ch, 3.0, 0.5, topo,
                           std::vector<double>(5, 0.5));
    Rng rng(16);
    for (int t = 0; t < 2000; ++t) {
        Action a = random_joint_equal(prog, rng);
        REQUIRE(prog.action_feasible(a));
        Action b = random_joint_random(prog, rng);
        REQUIRE(prog.action_feasible(b));
        for (std::size_t node = 0; node < prog.node_count(); ++node) {
            double tot = 0.0;
            for (int l = 0; l < 5; ++l) tot += b.powers[prog.power_idx(node, l)];
            REQUIRE(tot <= 1.5 * (1 + 1e-12));
        }
    }
}

#include <catch_amalgamated.hpp>

#include <cmath>

#include "fso/channel.hpp"
#include "fso/detail/math.hpp"

using namespace fso;

namespace {
AttenuationParams unit_link() {
    AttenuationParams p;
    p.alpha_db_per_km = 0.0;
    p.distance_km = 1e-3; // one meter
    p.wavelength_m = 1.0;
    p.aperture_tx_m2 = 1.0;
    p.aperture_rx_m2 = 1.0;
    return p;
}
} // namespace

TEST_CASE("attenuation: unit factors give unit gain", "[channel]") {
    REQUIRE(attenuation(unit_link()) == Catch::Approx(1.0));
}

TEST_CASE("attenuation: inverse-square law at zero absorption", "[channel]") {
    AttenuationParams p = unit_link();
    double h1 = attenuation(p);
    p.distance_km *= 2.0;
    REQUIRE(attenuation(p) / h1 == Catch::Approx(0.25));
}

TEST_CASE("attenuation: hazy 4.5 dB/km at 1 km, precomputed scalar", "[channel]") {
    // Independent direct evaluation of A_t A_r exp(-alpha d)/(d^2 lambda^2)
    // with circular apertures (D_tx = 0.015 m, D_rx = 0.05 m), lambda =
    // 1550 nm: value frozen from an out-of-band calculation.
    AttenuationParams p;
    p.alpha_db_per_km = 4.5;
    p.distance_km = 1.0;
    p.wavelength_m = 1550e-9;
    p.aperture_tx_m2 = 1.7671458676442586e-4;
    p.aperture_rx_m2 = 1.9634954084936210e-3;
    REQUIRE(attenuation(p) == Catch::Approx(0.05124351276584637).epsilon(1e-12));
}

TEST_CASE("attenuation: invalid parameters rejected", "[channel]") {
    AttenuationParams p = unit_link();
    p.distance_km = 0.0;
    REQUIRE_THROWS_AS(attenuation(p), std::invalid_argument);
    p = unit_link();
    p.wavelength_m = -1.0;
    REQUIRE_THROWS_AS(attenuation(p), std::invalid_argument);
    p = unit_link();
    p.alpha_db_per_km = -0.1;
    REQUIRE_THROWS_AS(attenuation(p), std::invalid_argument);
}

TEST_CASE("turbulence: degenerate sigma gives exactly one", "[channel]") {
    TurbulenceParams t{0.0, true};
    Rng rng(1);
    for (int i = 0; i < 100; ++i) REQUIRE(sample_turbulence(t, rng) == 1.0);
}

TEST_CASE("turbulence: normalized mean is one within 1%", "[channel]") {
    TurbulenceParams t{0.2, true};
    Rng rng(2);
    detail::RunningStats st;
    for (int i = 0; i < 1000000; ++i) st.add(sample_turbulence(t, rng));
    REQUIRE(st.mean() == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("turbulence: deterministic under a fixed seed", "[channel]") {
    TurbulenceParams t{0.3, true};
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) REQUIRE(sample_turbulence(t, a) == sample_turbulence(t, b));
}

TEST_CASE("turbulence: log(h_t)/2 is normal (skew check)", "[channel]") {
    TurbulenceParams t{0.25, true};
    Rng rng(3);
    detail::RunningStats st;
    for (int i = 0; i < 1000000; ++i) st.add(0.5 * std::log(sample_turbulence(t, rng)));
    REQUIRE(std::abs(st.skewness()) < 0.05);
    REQUIRE(st.mean() == Catch::Approx(-0.25 * 0.25).margin(1e-3));
    REQUIRE(st.stddev() == Catch::Approx(0.25).margin(1e-3));
}

TEST_CASE("csi: zero turbulence returns the attenuations exactly", "[channel]") {
    Topology topo;
    topo.entry_attenuation = {0.5, 0.25, 0.125};
    topo.turbulence = {0.0, true};
    Rng rng(4);
    ChannelSample s = sample_csi(topo, rng);
    REQUIRE(s.gains == topo.entry_attenuation);
}

TEST_CASE("csi: equal-distance links have matching empirical means", "[channel]") {
    Topology topo;
    topo.entry_attenuation = {0.07, 0.07};
    topo.turbulence = {0.2, true};
    Rng rng(5);
    detail::RunningStats a, b;
    for (int i = 0; i < 100000; ++i) {
        ChannelSample s = sample_csi(topo, rng);
        a.add(s.gains[0]);
        b.add(s.gains[1]);
    }
    REQUIRE(a.mean() == Catch::Approx(b.mean()).epsilon(0.02));
}

TEST_CASE("csi: shape and bit-for-bit reproducibility", "[channel]") {
    Topology topo;
    topo.entry_attenuation.assign(10, 0.05);
    topo.turbulence = {0.2, true};
    Rng a(6), b(6);
    ChannelSample s1 = sample_csi(topo, a);
    ChannelSample s2 = sample_csi(topo, b);
    REQUIRE(s1.gains.size() == 10);
    REQUIRE(s1.gains == s2.gains);
    for (double g : s1.gains) REQUIRE(g >= 0.0);
}

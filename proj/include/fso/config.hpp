#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fso/pddl.hpp"
#include "fso/scenarios/fronthaul.hpp"
#include "fso/scenarios/joint_relay.hpp"
#include "fso/scenarios/relay.hpp"
#include "fso/scenarios/rofso.hpp"
#include "fso/sdg.hpp"

namespace fso {

// Purpose tags for deriving independent random streams from one seed.
namespace streams {
inline constexpr std::uint64_t kOmega = 1;
inline constexpr std::uint64_t kTopology = 2;
inline constexpr std::uint64_t kSolver = 3;
inline constexpr std::uint64_t kEvalCsi = 4;
inline constexpr std::uint64_t kEvalAction = 5;
inline constexpr std::uint64_t kOracleStates = 6;
inline constexpr std::uint64_t kBench = 7;
} // namespace streams

struct GeometryConfig {
    double rofso_distance_km = 1.0;
    double relay_span_km = 3.0;
    double relay_lateral_km = 0.5;
    double rrh_box_km = 5.0;
    double an_box_km = 1.0;
};

/// One experiment, fully specified: scenario + dimensions, channel model,
/// scenario constants, solver choice and settings, seed and output knobs.
struct ExperimentConfig {
    std::string preset;   ///< informational; empty for file-based configs
    std::string scenario = "rofso";
    int n = 10; ///< carriers (rofso) / hops (relay) / RRHs (fronthaul)
    int m = 0;  ///< relays per hop / ANs
    int l = 0;  ///< optical carriers (joint & fronthaul)
    std::uint64_t seed = 1;
    std::string solver = "sdg";

    ChannelConfig channel;
    GeometryConfig geometry;
    RofsoConstants rofso;
    RelayConstants relay;
    JointRelayConstants joint;
    FronthaulConstants fronthaul;
    bool literal_congestion = false;

    SdgConfig sdg;
    PddlConfig pddl;

    long eval_samples = 10000;
    long trailing_window = 500;
    bool timing_in_trace = false;
    std::string resume_checkpoint;
    int workers = 1;

    /// Returns every violation (an empty list means valid).
    std::vector<std::string> validate() const;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"rofso", "relay", "joint_relay",
                                                   "fronthaul"};
    return names;
}

inline std::vector<std::string> solver_names(const std::string& scenario) {
    if (scenario == "rofso") return {"sdg", "pddl", "waterfill", "equal-power", "random-power"};
    if (scenario == "relay") return {"sdg", "pddl", "greedy", "greedy-lowest", "random"};
    if (scenario == "joint_relay") return {"sdg", "pddl", "random-equal", "random-random"};
    if (scenario == "fronthaul") return {"sdg", "pddl", "random-equal"};
    return {};
}

inline std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> issues;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) issues.push_back(msg);
    };
    bool known = false;
    for (const auto& s : scenario_names()) known = known || s == scenario;
    check(known, "unknown scenario '" + scenario + "'");
    if (known) {
        bool solver_ok = false;
        for (const auto& s : solver_names(scenario)) solver_ok = solver_ok || s == solver;
        check(solver_ok, "solver '" + solver + "' not available for scenario '" + scenario + "'");
    }
    check(n >= 1, "dims: n must be >= 1");
    if (scenario != "rofso") check(m >= 1, "dims: m must be >= 1 for " + scenario);
    if (scenario == "joint_relay" || scenario == "fronthaul")
        check(l >= 1, "dims: l must be >= 1 for " + scenario);
    if (scenario == "joint_relay")
        check(n == 1, "joint_relay supports a single hop (n = 1)");
    check(eval_samples >= 1, "eval_samples must be >= 1");
    check(trailing_window >= 1, "trailing_window must be >= 1");
    check(workers >= 1, "workers must be >= 1");
    auto guard = [&](auto&& fn, const char* what) {
        try {
            fn();
        } catch (const std::exception& e) {
            issues.push_back(std::string(what) + ": " + e.what());
        }
    };
    guard([&] { channel.turbulence().validate(); }, "channel");
    guard([&] { channel.link(1.0).validate(); }, "channel");
    if (scenario == "rofso") guard([&] { rofso.validate(); }, "rofso constants");
    if (scenario == "relay") guard([&] { relay.validate(); }, "relay constants");
    if (scenario == "joint_relay") guard([&] { joint.validate(); }, "joint constants");
    if (scenario == "fronthaul") guard([&] { fronthaul.validate(); }, "fronthaul constants");
    if (solver == "sdg") guard([&] { sdg.validate(); }, "sdg config");
    if (solver == "pddl") guard([&] { pddl.validate(); }, "pddl config");
    return issues;
}

/// Construct the scenario instance; priority weights are drawn once from the
/// experiment seed and the node geometry from its own stream, so a config +
/// seed pins the whole problem.
inline std::unique_ptr<ProgramInstance> make_instance(const ExperimentConfig& cfg) {
    Rng omega_rng(derive_seed(cfg.seed, streams::kOmega));
    Rng topo_rng(derive_seed(cfg.seed, streams::kTopology));
    auto draw_omega = [&](int count) {
        std::vector<double> w(count);
        for (double& v : w) v = omega_rng.uniform();
        return w;
    };
    if (cfg.scenario == "rofso")
        return std::make_unique<RofsoProgram>(cfg.n, cfg.rofso, cfg.channel,
                                              cfg.geometry.rofso_distance_km,
                                              draw_omega(cfg.n));
    if (cfg.scenario == "relay")
        return std::make_unique<RelayProgram>(cfg.n, cfg.m, cfg.relay, cfg.channel,
                                              cfg.geometry.relay_span_km,
                                              cfg.geometry.relay_lateral_km, topo_rng);
    if (cfg.scenario == "joint_relay")
        return std::make_unique<JointRelayProgram>(cfg.m, cfg.l, cfg.joint, cfg.channel,
                                                   cfg.geometry.relay_span_km,
                                                   cfg.geometry.relay_lateral_km, topo_rng,
                                                   draw_omega(cfg.l));
    if (cfg.scenario == "fronthaul")
        return std::make_unique<FronthaulProgram>(cfg.n, cfg.m, cfg.l, cfg.fronthaul,
                                                  cfg.channel, cfg.geometry.rrh_box_km,
                                                  cfg.geometry.an_box_km, topo_rng,
                                                  draw_omega(cfg.l), cfg.literal_congestion);
    throw std::invalid_argument("unknown scenario: " + cfg.scenario);
}

// ---------------------------------------------------------------------------
// JSON config files
// ---------------------------------------------------------------------------

namespace detail {
template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}
} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig c;
    detail::maybe(j, "scenario", c.scenario);
    if (j.contains("dims")) {
        const auto& d = j.at("dims");
        detail::maybe(d, "n", c.n);
        detail::maybe(d, "m", c.m);
        detail::maybe(d, "l", c.l);
    }
    detail::maybe(j, "seed", c.seed);
    detail::maybe(j, "solver", c.solver);
    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        detail::maybe(ch, "alpha_db_per_km", c.channel.alpha_db_per_km);
        detail::maybe(ch, "wavelength_m", c.channel.wavelength_m);
        detail::maybe(ch, "aperture_tx_m2", c.channel.aperture_tx_m2);
        detail::maybe(ch, "aperture_rx_m2", c.channel.aperture_rx_m2);
        detail::maybe(ch, "sigma_x", c.channel.sigma_x);
        detail::maybe(ch, "normalize_mean", c.channel.normalize_mean);
    }
    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        detail::maybe(g, "rofso_distance_km", c.geometry.rofso_distance_km);
        detail::maybe(g, "relay_span_km", c.geometry.relay_span_km);
        detail::maybe(g, "relay_lateral_km", c.geometry.relay_lateral_km);
        detail::maybe(g, "rrh_box_km", c.geometry.rrh_box_km);
        detail::maybe(g, "an_box_km", c.geometry.an_box_km);
    }
    if (j.contains("rofso")) {
        const auto& k = j.at("rofso");
        detail::maybe(k, "omi", c.rofso.omi);
        detail::maybe(k, "apd_gain", c.rofso.apd_gain);
        detail::maybe(k, "responsivity", c.rofso.responsivity);
        detail::maybe(k, "rin_linear", c.rofso.rin_linear);
        detail::maybe(k, "excess_noise", c.rofso.excess_noise);
        detail::maybe(k, "temperature_k", c.rofso.temperature_k);
        detail::maybe(k, "feedback_ohm", c.rofso.feedback_ohm);
        detail::maybe(k, "power_total", c.rofso.power_total);
        detail::maybe(k, "power_peak", c.rofso.power_peak);
    }
    auto relay_kernel = [](const nlohmann::json& k, RelayConstants& out) {
        detail::maybe(k, "frame_s", out.frame_s);
        detail::maybe(k, "bandwidth_hz", out.bandwidth_hz);
        detail::maybe(k, "duplex_factor", out.duplex_factor);
        detail::maybe(k, "power_fixed", out.power_fixed);
        detail::maybe(k, "responsivity", out.responsivity);
        detail::maybe(k, "noise_bandwidth_hz", out.noise_bandwidth_hz);
    };
    if (j.contains("relay")) relay_kernel(j.at("relay"), c.relay);
    if (j.contains("joint")) {
        const auto& k = j.at("joint");
        if (k.contains("link")) relay_kernel(k.at("link"), c.joint.link);
        detail::maybe(k, "power_total", c.joint.power_total);
        detail::maybe(k, "power_peak", c.joint.power_peak);
    }
    if (j.contains("fronthaul")) {
        const auto& k = j.at("fronthaul");
        detail::maybe(k, "frame_s", c.fronthaul.frame_s);
        detail::maybe(k, "bandwidth_hz", c.fronthaul.bandwidth_hz);
        detail::maybe(k, "duplex_factor", c.fronthaul.duplex_factor);
        detail::maybe(k, "responsivity", c.fronthaul.responsivity);
        detail::maybe(k, "noise_bandwidth_hz", c.fronthaul.noise_bandwidth_hz);
        detail::maybe(k, "power_total", c.fronthaul.power_total);
        detail::maybe(k, "power_peak", c.fronthaul.power_peak);
        detail::maybe(k, "fiber_cap", c.fronthaul.fiber_cap);
    }
    detail::maybe(j, "literal_congestion", c.literal_congestion);
    if (j.contains("sdg")) {
        const auto& s = j.at("sdg");
        detail::maybe(s, "iterations", c.sdg.iterations);
        detail::maybe(s, "eta0", c.sdg.eta0);
        detail::maybe(s, "gamma", c.sdg.gamma);
        detail::maybe(s, "batch", c.sdg.batch);
    }
    if (j.contains("pddl")) {
        const auto& p = j.at("pddl");
        detail::maybe(p, "iterations", c.pddl.iterations);
        detail::maybe(p, "batch", c.pddl.batch);
        detail::maybe(p, "lr", c.pddl.lr);
        detail::maybe(p, "eta0", c.pddl.eta0);
        detail::maybe(p, "gamma", c.pddl.gamma);
        detail::maybe(p, "eval_every", c.pddl.eval_every);
        detail::maybe(p, "eval_batch", c.pddl.eval_batch);
        detail::maybe(p, "baseline", c.pddl.baseline);
    }
    detail::maybe(j, "eval_samples", c.eval_samples);
    detail::maybe(j, "trailing_window", c.trailing_window);
    detail::maybe(j, "timing_in_trace", c.timing_in_trace);
    detail::maybe(j, "resume_checkpoint", c.resume_checkpoint);
    return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Presets: the shipped parameter sets, plus weather overlays
// ("<preset>-clear" 0.43 dB/km, "<preset>-hazy" 4.5, "<preset>-foggy" 11.5).
// Base presets use the hazy coefficient.
// ---------------------------------------------------------------------------

inline std::vector<std::string> preset_names() {
    return {"rofso10",  "rofso20",  "rofso10-bigbudget", "relay2x5",
            "relay2x10", "relay3x5", "joint1x5x5",        "fronthaul5x2x5"};
}

inline ExperimentConfig base_preset(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    c.channel.alpha_db_per_km = 4.5;
    if (name == "rofso10" || name == "rofso20" || name == "rofso10-bigbudget") {
        c.scenario = "rofso";
        c.n = name == "rofso20" ? 20 : 10;
        if (name == "rofso20") {
            c.rofso.power_total = 3.0;
            c.rofso.power_peak = 0.3;
        } else if (name == "rofso10-bigbudget") {
            c.rofso.power_total = 3.0;
            c.rofso.power_peak = 0.6;
        }
        c.sdg.iterations = 3000;
        c.pddl.iterations = 20000;
        c.pddl.lr = 5e-3;
        c.pddl.eval_batch = 1024;
        return c;
    }
    if (name == "relay2x5" || name == "relay2x10" || name == "relay3x5") {
        c.scenario = "relay";
        c.n = name == "relay3x5" ? 3 : 2;
        c.m = name == "relay2x10" ? 10 : 5;
        c.sdg.iterations = 1500;
        c.pddl.iterations = 30000;
        c.pddl.lr = 1e-3;
        return c;
    }
    if (name == "joint1x5x5") {
        c.scenario = "joint_relay";
        c.n = 1;
        c.m = 5;
        c.l = 5;
        c.sdg.iterations = 1500;
        c.sdg.eta0 = 0.2;
        c.pddl.iterations = 20000;
        c.pddl.lr = 1e-3;
        c.eval_samples = 2000;
        return c;
    }
    if (name == "fronthaul5x2x5") {
        c.scenario = "fronthaul";
        c.n = 5;
        c.m = 2;
        c.l = 5;
        c.sdg.iterations = 4000;
        c.sdg.eta0 = 0.02;
        c.sdg.gamma = 0.9995;
        c.pddl.iterations = 25000;
        c.pddl.lr = 1e-3;
        c.pddl.eta0 = 0.02;
        c.pddl.gamma = 0.9995;
        c.eval_samples = 5000;
        return c;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

/// Resolve a preset name, accepting the weather-overlay suffixes.
inline ExperimentConfig preset(const std::string& name) {
    for (const auto& base : preset_names())
        if (name == base) return base_preset(name);
    auto ends_with = [&](const std::string& suffix) {
        return name.size() > suffix.size() &&
               name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    double alpha = -1.0;
    std::string suffix;
    if (ends_with("-clear")) {
        alpha = 0.43;
        suffix = "-clear";
    } else if (ends_with("-hazy")) {
        alpha = 4.5;
        suffix = "-hazy";
    } else if (ends_with("-foggy")) {
        alpha = 11.5;
        suffix = "-foggy";
    }
    if (alpha >= 0.0) {
        std::string base = name.substr(0, name.size() - suffix.size());
        for (const auto& b : preset_names())
            if (base == b) {
                ExperimentConfig c = base_preset(base);
                c.preset = name;
                c.channel.alpha_db_per_km = alpha;
                return c;
            }
    }
    throw std::invalid_argument("unknown preset: " + name);
}

inline bool is_preset(const std::string& name) {
    try {
        preset(name);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

} // namespace fso

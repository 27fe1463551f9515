#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fso/policy.hpp"
#include "fso/program.hpp"

namespace fso {

inline constexpr int kCheckpointSchemaVersion = 1;

/// Serialize the policy networks (weights, biases, ADAM moments) together
/// with the trainer's dual state and iteration counter.
inline void save_checkpoint(const std::string& path, const PolicyModel& policy,
                            const DualState& dual, long iter, double eta) {
    nlohmann::json j;
    j["schema_version"] = kCheckpointSchemaVersion;
    j["trainer"] = {{"iter", iter}, {"eta", eta}, {"lambda", dual.lambda}};
    nlohmann::json nets = nlohmann::json::array();
    for (const Mlp& net : policy.nets()) {
        nlohmann::json n;
        n["sizes"] = net.spec().sizes;
        n["w"] = net.weights();
        n["b"] = net.biases();
        n["adam"] = {{"mw", net.adam_mw()}, {"vw", net.adam_vw()},
                     {"mb", net.adam_mb()}, {"vb", net.adam_vb()},
                     {"step", net.step_count()}};
        nets.push_back(std::move(n));
    }
    j["nets"] = std::move(nets);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump();
}

struct CheckpointState {
    long iter = 0;
    double eta = 0.0;
    DualState dual;
};

/// Restore a checkpoint into an already-constructed policy of the same
/// architecture; returns the trainer state.
inline CheckpointState load_checkpoint(const std::string& path, PolicyModel& policy) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("schema_version", -1) != kCheckpointSchemaVersion)
        throw std::runtime_error("checkpoint: unsupported schema version");
    const auto& nets = j.at("nets");
    if (nets.size() != policy.nets().size())
        throw std::runtime_error("checkpoint: net count mismatch");
    for (std::size_t k = 0; k < nets.size(); ++k) {
        Mlp& net = policy.nets()[k];
        if (nets[k].at("sizes").get<std::vector<int>>() != net.spec().sizes)
            throw std::runtime_error("checkpoint: architecture mismatch");
        net.weights() = nets[k].at("w").get<std::vector<std::vector<double>>>();
        net.biases() = nets[k].at("b").get<std::vector<std::vector<double>>>();
        const auto& adam = nets[k].at("adam");
        net.adam_mw() = adam.at("mw").get<std::vector<std::vector<double>>>();
        net.adam_vw() = adam.at("vw").get<std::vector<std::vector<double>>>();
        net.adam_mb() = adam.at("mb").get<std::vector<std::vector<double>>>();
        net.adam_vb() = adam.at("vb").get<std::vector<std::vector<double>>>();
        net.set_step_count(adam.at("step").get<long>());
    }
    CheckpointState st;
    st.iter = j.at("trainer").at("iter").get<long>();
    st.eta = j.at("trainer").at("eta").get<double>();
    st.dual.lambda = j.at("trainer").at("lambda").get<std::vector<double>>();
    return st;
}

} // namespace fso

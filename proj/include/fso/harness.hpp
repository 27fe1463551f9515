#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fso/baselines.hpp"
#include "fso/checkpoint.hpp"
#include "fso/config.hpp"
#include "fso/oracle.hpp"
#include "fso/pddl.hpp"
#include "fso/sdg.hpp"
#include "fso/trace.hpp"

namespace fso {

inline constexpr int kSummarySchemaVersion = 1;

using PolicyFn = std::function<Action(const ChannelSample&, Rng&)>;

/// The deployable policy of a named baseline for the given instance.
inline PolicyFn baseline_policy(const std::string& name, const ProgramInstance& inst) {
    if (const auto* rofso = dynamic_cast<const RofsoProgram*>(&inst)) {
        if (name == "waterfill")
            return [rofso](const ChannelSample& h, Rng&) { return waterfill_rofso(h, *rofso); };
        if (name == "equal-power")
            return [rofso](const ChannelSample&, Rng&) { return equal_power(*rofso); };
        if (name == "random-power")
            return [rofso](const ChannelSample&, Rng& rng) { return random_power(*rofso, rng); };
    }
    if (const auto* relay = dynamic_cast<const RelayProgram*>(&inst)) {
        if (name == "greedy")
            return [relay](const ChannelSample& h, Rng&) { return greedy_relay(h, *relay); };
        if (name == "greedy-lowest")
            return [relay](const ChannelSample& h, Rng&) {
                return greedy_relay(h, *relay, GreedyMode::paper_literal_lowest);
            };
        if (name == "random")
            return [relay](const ChannelSample&, Rng& rng) { return random_relay(*relay, rng); };
    }
    if (const auto* joint = dynamic_cast<const JointRelayProgram*>(&inst)) {
        if (name == "random-equal")
            return
                [joint](const ChannelSample&, Rng& rng) { return random_joint_equal(*joint, rng); };
        if (name == "random-random")
            return [joint](const ChannelSample&, Rng& rng) {
                return random_joint_random(*joint, rng);
            };
    }
    if (const auto* fh = dynamic_cast<const FronthaulProgram*>(&inst)) {
        if (name == "random-equal")
            return [fh](const ChannelSample&, Rng& rng) { return random_fronthaul_equal(*fh, rng); };
    }
    throw std::invalid_argument("no baseline '" + name + "' for scenario " + inst.name());
}

/// Post-run evaluation of a deployable policy on the shared evaluation
/// stream (same seed => same CSI draws for every solver, so cross-solver
/// comparisons are paired).
struct EvalStats {
    double objective = 0.0;
    std::vector<double> constraints;
    double latency_us = 0.0;       ///< mean per-call execution time
    std::vector<double> per_sample; ///< per-draw objective (paired tests)
};

inline EvalStats evaluate_policy(const ProgramInstance& inst, const PolicyFn& policy,
                                 std::uint64_t seed, long samples) {
    EvalStats st;
    st.constraints.assign(inst.constraint_count(), 0.0);
    st.per_sample.reserve(static_cast<std::size_t>(samples));
    Rng csi_rng(derive_seed(seed, streams::kEvalCsi));
    Rng act_rng(derive_seed(seed, streams::kEvalAction));
    std::vector<double> c(inst.constraint_count());
    double total_us = 0.0;
    for (long t = 0; t < samples; ++t) {
        ChannelSample h = inst.draw_csi(csi_rng);
        auto t0 = std::chrono::steady_clock::now();
        Action a = policy(h, act_rng);
        auto t1 = std::chrono::steady_clock::now();
        total_us += std::chrono::duration<double, std::micro>(t1 - t0).count();
        double f = inst.objective(h, a);
        st.objective += f;
        st.per_sample.push_back(f);
        inst.constraints(h, a, c);
        for (std::size_t s = 0; s < c.size(); ++s) st.constraints[s] += c[s];
    }
    st.objective /= static_cast<double>(samples);
    for (double& v : st.constraints) v /= static_cast<double>(samples);
    st.latency_us = total_us / static_cast<double>(samples);
    return st;
}

struct RunResult {
    ExperimentConfig cfg;
    std::vector<TraceRecord> trace;
    std::vector<TraceRecord> evals; ///< pddl learning-curve points
    DualState lambda_star;
    EvalStats eval;
    std::vector<double> omega;
    double wall_time_s = 0.0;
    std::string trace_path, summary_path, checkpoint_path, eval_curve_path;
};

namespace detail {

/// Flat-line trace for the non-iterative baselines: every row is the batch
/// mean of fresh draws under the fixed policy.
inline std::vector<TraceRecord> baseline_trace(const ProgramInstance& inst,
                                               const PolicyFn& policy, long iterations,
                                               int batch, Rng& rng) {
    std::vector<TraceRecord> rows;
    rows.reserve(static_cast<std::size_t>(iterations));
    std::size_t S = inst.constraint_count();
    std::vector<double> c(S);
    for (long k = 0; k < iterations; ++k) {
        auto t0 = std::chrono::steady_clock::now();
        TraceRecord row;
        row.iter = k;
        row.constraints.assign(S, 0.0);
        row.lambda.assign(S, 0.0);
        for (int t = 0; t < batch; ++t) {
            ChannelSample h = inst.draw_csi(rng);
            Action a = policy(h, rng);
            row.objective += inst.objective(h, a);
            inst.constraints(h, a, c);
            for (std::size_t s = 0; s < S; ++s) row.constraints[s] += c[s];
        }
        row.objective /= batch;
        for (double& v : row.constraints) v /= batch;
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

/// Execute one configured experiment end to end: solve / train, evaluate the
/// resulting policy on the shared stream, and (when out_dir is nonempty)
/// write trace.csv, summary.json and the checkpoint artifacts.
inline RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    auto issues = cfg.validate();
    if (!issues.empty()) {
        std::string msg = "invalid config:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw std::invalid_argument(msg);
    }
    auto wall0 = std::chrono::steady_clock::now();
    RunResult res;
    res.cfg = cfg;
    std::unique_ptr<ProgramInstance> inst = make_instance(cfg);
    res.omega = inst->weights();

    Rng solver_rng(derive_seed(cfg.seed, streams::kSolver));
    PolicyFn deploy;
    std::unique_ptr<PddlTrainer> trainer;

    if (cfg.solver == "sdg") {
        SdgConfig sc = cfg.sdg;
        sc.seed = cfg.seed;
        sc.workers = cfg.workers;
        SdgResult sr = sdg_run(*inst, sc, solver_rng);
        res.lambda_star = sr.trailing_dual(static_cast<std::size_t>(cfg.trailing_window));
        res.trace = std::move(sr.trace);
        const ProgramInstance& ref = *inst;
        DualState dual = res.lambda_star;
        deploy = [&ref, dual](const ChannelSample& h, Rng&) {
            return execute_policy(ref, h, dual);
        };
    } else if (cfg.solver == "pddl") {
        PddlConfig pc = cfg.pddl;
        pc.seed = cfg.seed;
        pc.workers = cfg.workers;
        const ProgramInstance& ref = *inst;
        trainer = std::make_unique<PddlTrainer>(
            ref, ref.policy_layout(),
            [&ref](Rng& rng) { return ref.draw_csi(rng); }, pc);
        if (!cfg.resume_checkpoint.empty()) {
            CheckpointState st = load_checkpoint(cfg.resume_checkpoint, trainer->policy());
            trainer->restore(st.iter, st.dual, st.eta);
        }
        trainer->run();
        res.trace = trainer->trace();
        res.evals = trainer->evals();
        res.lambda_star = trainer->dual();
        const PolicyModel& pm = trainer->policy();
        deploy = [&pm](const ChannelSample& h, Rng&) { return pm.deterministic(h); };
    } else {
        deploy = baseline_policy(cfg.solver, *inst);
        res.trace =
            detail::baseline_trace(*inst, deploy, cfg.sdg.iterations, cfg.sdg.batch, solver_rng);
        res.lambda_star = DualState::zeros(inst->constraint_count());
    }

    res.eval = evaluate_policy(*inst, deploy, cfg.seed, cfg.eval_samples);
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        std::string stem = (cfg.preset.empty() ? cfg.scenario : cfg.preset) + "-" + cfg.solver;
        res.trace_path = (fs::path(out_dir) / (stem + "-trace.csv")).string();
        write_trace_csv(res.trace_path, res.trace, inst->constraint_count(),
                        cfg.timing_in_trace);
        if (trainer) {
            res.eval_curve_path = (fs::path(out_dir) / (stem + "-eval.csv")).string();
            write_trace_csv(res.eval_curve_path, res.evals, inst->constraint_count(), false);
            res.checkpoint_path = (fs::path(out_dir) / (stem + "-checkpoint.json")).string();
            save_checkpoint(res.checkpoint_path, trainer->policy(), trainer->dual(),
                            trainer->iteration(), trainer->eta());
        }

        nlohmann::json summary;
        summary["schema_version"] = kSummarySchemaVersion;
        summary["scenario"] = cfg.scenario;
        summary["solver"] = cfg.solver;
        summary["seed"] = cfg.seed;
        summary["final_objective"] = res.eval.objective;
        summary["final_constraints"] = res.eval.constraints;
        summary["lambda_star"] = res.lambda_star.lambda;
        summary["exec_latency_us"] = res.eval.latency_us;
        summary["preset"] = cfg.preset;
        summary["dims"] = {{"n", cfg.n}, {"m", cfg.m}, {"l", cfg.l}};
        summary["omega"] = res.omega;
        summary["iterations"] = res.trace.size();
        summary["trailing_objective"] = trailing_mean(
            res.trace, static_cast<std::size_t>(cfg.trailing_window),
            [](const TraceRecord& r) { return r.objective; });
        std::vector<double> tc(inst->constraint_count());
        for (std::size_t s = 0; s < tc.size(); ++s)
            tc[s] = trailing_mean(res.trace, static_cast<std::size_t>(cfg.trailing_window),
                                  [s](const TraceRecord& r) { return r.constraints[s]; });
        summary["trailing_constraints"] = tc;
        summary["eval_samples"] = cfg.eval_samples;
        summary["wall_time_s"] = res.wall_time_s;
        res.summary_path = (fs::path(out_dir) / (stem + "-summary.json")).string();
        std::ofstream out(res.summary_path, std::ios::binary);
        out << summary.dump(2) << '\n';
    }
    return res;
}

// ---------------------------------------------------------------------------
// Execution-time benchmark
// ---------------------------------------------------------------------------

struct BenchEntry {
    std::string policy;
    double mean_us = 0.0;
    double median_us = 0.0;
};

struct BenchResult {
    std::vector<BenchEntry> entries;

    const BenchEntry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.policy == name) return &e;
        return nullptr;
    }
};

/// Time the per-CSI execution of each deployable policy over n_calls fresh
/// draws. The dual solver executes its converged primal argmax; the learned
/// policy executes one network forward pass (its cost does not depend on the
/// weight values, so no training run is required here); water-filling solves
/// its per-draw budget bisection.
inline BenchResult bench_execution(const ExperimentConfig& cfg, int n_calls) {
    auto issues = cfg.validate();
    if (!issues.empty()) throw std::invalid_argument("invalid config: " + issues.front());
    std::unique_ptr<ProgramInstance> inst = make_instance(cfg);

    std::vector<std::pair<std::string, PolicyFn>> policies;
    {
        SdgConfig sc = cfg.sdg;
        sc.seed = cfg.seed;
        sc.workers = cfg.workers;
        Rng rng(derive_seed(cfg.seed, streams::kSolver));
        SdgResult sr = sdg_run(*inst, sc, rng);
        const ProgramInstance& ref = *inst;
        DualState dual = sr.dual;
        policies.emplace_back("sdg", [&ref, dual](const ChannelSample& h, Rng&) {
            return execute_policy(ref, h, dual);
        });
    }
    auto policy_holder = std::make_shared<PolicyModel>([&] {
        Rng init(derive_seed(cfg.seed, 11));
        return PolicyModel(inst->policy_layout(), init);
    }());
    policies.emplace_back("pddl", [policy_holder](const ChannelSample& h, Rng&) {
        return policy_holder->deterministic(h);
    });
    if (cfg.scenario == "rofso") policies.emplace_back("waterfill", baseline_policy("waterfill", *inst));
    if (cfg.scenario == "relay") policies.emplace_back("greedy", baseline_policy("greedy", *inst));

    BenchResult res;
    for (auto& [name, fn] : policies) {
        Rng csi_rng(derive_seed(cfg.seed, streams::kBench));
        Rng act_rng(derive_seed(cfg.seed, streams::kEvalAction));
        for (int w = 0; w < 3; ++w) fn(inst->draw_csi(csi_rng), act_rng); // warmup
        std::vector<double> us;
        us.reserve(static_cast<std::size_t>(n_calls));
        for (int t = 0; t < n_calls; ++t) {
            ChannelSample h = inst->draw_csi(csi_rng);
            auto t0 = std::chrono::steady_clock::now();
            Action a = fn(h, act_rng);
            auto t1 = std::chrono::steady_clock::now();
            (void)a;
            us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
        }
        BenchEntry e;
        e.policy = name;
        for (double v : us) e.mean_us += v;
        e.mean_us /= static_cast<double>(us.size());
        std::nth_element(us.begin(), us.begin() + us.size() / 2, us.end());
        e.median_us = us[us.size() / 2];
        res.entries.push_back(std::move(e));
    }
    return res;
}

} // namespace fso

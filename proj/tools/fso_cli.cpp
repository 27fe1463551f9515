// Command-line front end: run experiments from presets or config files,
// benchmark policy execution, and run the desk-scale verification oracles.

#include <cinttypes>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "fso/fso.hpp"

namespace {

fso::ExperimentConfig resolve_config(const std::string& spec) {
    if (fso::is_preset(spec)) return fso::preset(spec);
    return fso::load_config_file(spec);
}

void apply_overrides(fso::ExperimentConfig& cfg, const std::string& solver,
                     std::uint64_t seed, bool seed_set, long iterations, int workers) {
    if (!solver.empty()) cfg.solver = solver;
    if (seed_set) cfg.seed = seed;
    if (iterations > 0) {
        cfg.sdg.iterations = iterations;
        cfg.pddl.iterations = iterations;
    }
    if (workers > 0) {
        cfg.workers = workers;
        cfg.sdg.workers = workers;
        cfg.pddl.workers = workers;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resource allocation solvers for free-space optical links"};
    app.require_subcommand(1);

    std::string config_spec;
    std::string out_dir = "out";
    std::string solver;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long iterations = 0;
    int workers = 0;
    bool timing_in_trace = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_spec, "Preset name or path to a JSON config file")
            ->required();
        cmd->add_option("--seed", seed, "Experiment seed (overrides the config)")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--iterations", iterations, "Iteration budget override");
        cmd->add_option("--workers", workers, "Worker threads for batch evaluation");
    };

    CLI::App* run = app.add_subcommand("run", "Run one experiment and write its artifacts");
    add_common(run);
    run->add_option("--out-dir", out_dir, "Output directory for trace/summary/checkpoint");
    run->add_option("--solver", solver, "Solver override (sdg, pddl, or a baseline)");
    run->add_flag("--timing-in-trace", timing_in_trace,
                  "Record wall time in the trace ms column (breaks byte-identical reruns)");

    CLI::App* bench = app.add_subcommand("bench", "Time per-CSI policy execution");
    add_common(bench);
    int n_calls = 200;
    bench->add_option("--n-calls", n_calls, "Timed calls per policy");
    bench->add_option("--out-dir", out_dir, "Directory for bench.json");

    CLI::App* oracle = app.add_subcommand(
        "oracle", "Desk-scale brute-force verification of the dual solver");
    add_common(oracle);
    int grid = 200;
    int states = 8;
    oracle->add_option("--grid", grid, "Power grid points");
    oracle->add_option("--states", states, "Fixed channel states");
    oracle->add_option("--out-dir", out_dir, "Directory for oracle.json");

    CLI::App* list = app.add_subcommand("list-presets", "List the shipped presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& name : fso::preset_names()) {
                fso::ExperimentConfig c = fso::preset(name);
                std::printf("%-18s %-12s n=%d m=%d l=%d\n", name.c_str(), c.scenario.c_str(),
                            c.n, c.m, c.l);
            }
            std::printf("overlays: <preset>-clear (0.43 dB/km), <preset>-hazy (4.5), "
                        "<preset>-foggy (11.5)\n");
            return 0;
        }

        fso::ExperimentConfig cfg = resolve_config(config_spec);
        apply_overrides(cfg, solver, seed, seed_set, iterations, workers);
        cfg.timing_in_trace = cfg.timing_in_trace || timing_in_trace;

        if (run->parsed()) {
            fso::RunResult res = fso::run_experiment(cfg, out_dir);
            std::printf("scenario=%s solver=%s seed=%" PRIu64 "\n", cfg.scenario.c_str(),
                        cfg.solver.c_str(), cfg.seed);
            std::printf("final objective  %.6g\n", res.eval.objective);
            for (std::size_t s = 0; s < res.eval.constraints.size(); ++s)
                std::printf("final c_%zu       %.6g\n", s + 1, res.eval.constraints[s]);
            std::printf("exec latency     %.3g us/call\n", res.eval.latency_us);
            std::printf("wall time        %.1f s\n", res.wall_time_s);
            std::printf("trace            %s\n", res.trace_path.c_str());
            std::printf("summary          %s\n", res.summary_path.c_str());
            if (!res.checkpoint_path.empty())
                std::printf("checkpoint       %s\n", res.checkpoint_path.c_str());
            return 0;
        }

        if (bench->parsed()) {
            fso::BenchResult res = fso::bench_execution(cfg, n_calls);
            std::printf("%-12s %12s %12s\n", "policy", "mean us", "median us");
            nlohmann::json j;
            j["schema_version"] = 1;
            j["preset"] = cfg.preset;
            j["n_calls"] = n_calls;
            for (const auto& e : res.entries) {
                std::printf("%-12s %12.2f %12.2f\n", e.policy.c_str(), e.mean_us, e.median_us);
                j["entries"].push_back({{"policy", e.policy},
                                        {"mean_us", e.mean_us},
                                        {"median_us", e.median_us}});
            }
            std::filesystem::create_directories(out_dir);
            std::ofstream out(std::filesystem::path(out_dir) / "bench.json");
            out << j.dump(2) << '\n';
            return 0;
        }

        if (oracle->parsed()) {
            if (cfg.scenario == "rofso") {
                std::unique_ptr<fso::ProgramInstance> inst = fso::make_instance(cfg);
                auto* rofso = dynamic_cast<fso::RofsoProgram*>(inst.get());
                fso::Rng rng(fso::derive_seed(cfg.seed, fso::streams::kOracleStates));
                std::vector<fso::ChannelSample> pool;
                for (int s = 0; s < states; ++s) pool.push_back(inst->draw_csi(rng));
                fso::RofsoOracleResult res = fso::brute_force_rofso(*rofso, pool, grid);
                std::printf("states=%d grid=%d\n", states, grid);
                std::printf("optimum      %.8g\n", res.optimum);
                std::printf("dual bound   %.8g\n", res.dual_bound);
                std::printf("lambda*      %.6g\n", res.lambda_star);
                std::printf("mean budget  %.6g (P_t = %g)\n", res.mean_budget,
                            rofso->constants().power_total);
                std::filesystem::create_directories(out_dir);
                nlohmann::json j;
                j["schema_version"] = 1;
                j["optimum"] = res.optimum;
                j["dual_bound"] = res.dual_bound;
                j["lambda_star"] = res.lambda_star;
                j["mean_budget"] = res.mean_budget;
                j["policy_table"] = res.policy_table;
                std::ofstream out(std::filesystem::path(out_dir) / "oracle.json");
                out << j.dump(2) << '\n';
                return 0;
            }
            if (cfg.scenario == "relay") {
                std::unique_ptr<fso::ProgramInstance> inst = fso::make_instance(cfg);
                auto* relay = dynamic_cast<fso::RelayProgram*>(inst.get());
                fso::Rng rng(fso::derive_seed(cfg.seed, fso::streams::kOracleStates));
                double mean_best = 0.0;
                int mismatches = 0;
                for (int s = 0; s < states; ++s) {
                    fso::ChannelSample h = inst->draw_csi(rng);
                    double best = fso::enumerate_relay_best(h, *relay);
                    fso::Action a = inst->primal_argmax(h, fso::DualState{});
                    if (std::abs(best - inst->objective(h, a)) > 1e-12 * std::abs(best))
                        ++mismatches;
                    mean_best += best;
                }
                std::printf("states=%d mean enumerated optimum %.8g, argmax mismatches %d\n",
                            states, mean_best / states, mismatches);
                return mismatches == 0 ? 0 : 1;
            }
            std::fprintf(stderr, "oracle: unsupported scenario %s\n", cfg.scenario.c_str());
            return 2;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

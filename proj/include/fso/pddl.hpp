#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fso/detail/parallel.hpp"
#include "fso/policy.hpp"
#include "fso/sdg.hpp" // dual_step
#include "fso/trace.hpp"

namespace fso {

struct PddlConfig {
    long iterations = 20000;
    int batch = 64;          ///< T, samples per gradient estimate
    double lr = 1e-3;        ///< primal ADAM step size delta
    double eta0 = 0.5;       ///< dual step schedule eta^k = eta0 * gamma^k
    double gamma = 0.999;
    std::uint64_t seed = 1;
    long eval_every = 500;   ///< deterministic-policy evaluation cadence
    int eval_batch = 512;
    bool baseline = true;    ///< subtract the batch-mean reward (variance
                             ///< reduction); off reproduces the raw estimator
    int workers = 1;

    void validate() const {
        if (iterations < 1) throw std::invalid_argument("pddl: iterations < 1");
        if (batch < 1) throw std::invalid_argument("pddl: batch < 1");
        if (!(lr >= 0.0)) throw std::invalid_argument("pddl: lr < 0"); // 0 freezes theta
        if (!(eta0 > 0.0)) throw std::invalid_argument("pddl: eta0 <= 0");
        if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("pddl: bad gamma");
        if (eval_every < 1 || eval_batch < 1) throw std::invalid_argument("pddl: bad eval cadence");
    }
};

/// Score-function estimate of the Lagrangian gradient:
///   (1/T) sum_tau [ f_tau - sum_s lambda_s c_{s,tau} - b ] * dlog pi(r_tau | h_tau)/dtheta
/// where b is the optional batch-mean baseline. Only observed values of f
/// and c enter; no derivative of the system model is requested anywhere.
inline void policy_gradient_estimate(const PolicyModel& policy,
                                     std::span<const PolicyModel::Sampled> samples,
                                     std::span<const double> f,
                                     const std::vector<std::vector<double>>& c,
                                     const DualState& lambda, bool baseline_subtract,
                                     std::vector<MlpGrad>& grads) {
    std::size_t T = samples.size();
    if (f.size() != T || c.size() != T)
        throw std::invalid_argument("policy_gradient_estimate: batch shape mismatch");
    std::vector<double> reward(T);
    for (std::size_t t = 0; t < T; ++t) {
        if (!std::isfinite(f[t]))
            throw std::runtime_error("policy_gradient_estimate: non-finite objective observation");
        double r = f[t];
        for (std::size_t s = 0; s < lambda.lambda.size(); ++s) {
            if (!std::isfinite(c[t][s]))
                throw std::runtime_error(
                    "policy_gradient_estimate: non-finite constraint observation");
            r -= lambda.lambda[s] * c[t][s];
        }
        reward[t] = r;
    }
    double base = 0.0;
    if (baseline_subtract && T > 0) {
        for (double r : reward) base += r;
        base /= static_cast<double>(T);
    }
    for (auto& g : grads) g.zero();
    for (std::size_t t = 0; t < T; ++t)
        policy.accumulate_score(samples[t], (reward[t] - base) / static_cast<double>(T), grads);
}

/// Model-free primal-dual trainer. The primal step ascends the policy
/// parameters with the score-function gradient estimate through ADAM; the
/// dual step projects batch-mean constraint observations of the sampled
/// actions. Compiles against the observation interface only.
class PddlTrainer {
public:
    using CsiSource = std::function<ChannelSample(Rng&)>;

    PddlTrainer(const ObservableProgram& prog, PolicyLayout layout, CsiSource csi,
                PddlConfig cfg)
        : prog_(prog), csi_(std::move(csi)), cfg_(cfg),
          train_rng_(derive_seed(cfg.seed, kStreamTrain)),
          policy_(make_policy(std::move(layout), cfg.seed)),
          dual_(DualState::zeros(prog.constraint_count())), eta_(cfg.eta0) {
        cfg_.validate();
        grads_ = policy_.make_grads();
    }

    long iteration() const { return iter_; }
    const PolicyModel& policy() const { return policy_; }
    PolicyModel& policy() { return policy_; }
    const DualState& dual() const { return dual_; }
    const std::vector<TraceRecord>& trace() const { return trace_; }
    /// Learning-curve points: deterministic policy on the fixed held-out
    /// stream at the evaluation cadence.
    const std::vector<TraceRecord>& evals() const { return evals_; }

    /// One primal-dual iteration; appends and returns the trace row.
    const TraceRecord& step() {
        auto t0 = std::chrono::steady_clock::now();
        std::size_t T = static_cast<std::size_t>(cfg_.batch);
        std::size_t S = prog_.constraint_count();

        samples_.resize(T);
        fvals_.resize(T);
        cvals_.assign(T, std::vector<double>(S));
        // Sequentially drawn sub-seeds keep the result identical for any
        // worker count.
        seeds_.resize(T);
        std::vector<ChannelSample> states(T);
        for (std::size_t t = 0; t < T; ++t) {
            states[t] = csi_(train_rng_);
            seeds_[t] = train_rng_.next_u64();
        }
        detail::parallel_for(T, cfg_.workers, [&](std::size_t t) {
            Rng r(seeds_[t]);
            samples_[t] = policy_.sample(states[t], r);
            fvals_[t] = prog_.objective(states[t], samples_[t].action);
            prog_.constraints(states[t], samples_[t].action, cvals_[t]);
        });

        policy_gradient_estimate(policy_, samples_, fvals_, cvals_, dual_, cfg_.baseline,
                                 grads_);
        policy_.adam_step(grads_, cfg_.lr, /*maximize=*/true);
        check_finite_params();

        TraceRecord row;
        row.iter = iter_;
        row.constraints.assign(S, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            row.objective += fvals_[t];
            for (std::size_t s = 0; s < S; ++s) row.constraints[s] += cvals_[t][s];
        }
        row.objective /= static_cast<double>(T);
        for (double& v : row.constraints) v /= static_cast<double>(T);

        dual_ = dual_step(dual_, eta_, row.constraints);
        eta_ *= cfg_.gamma;

        row.lambda = dual_.lambda;
        row.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        trace_.push_back(std::move(row));
        ++iter_;
        return trace_.back();
    }

    /// Full training budget with the evaluation cadence.
    void run() {
        while (iter_ < cfg_.iterations) {
            step();
            if (iter_ % cfg_.eval_every == 0 || iter_ == cfg_.iterations) evaluate();
        }
    }

    /// Deterministic-policy metrics on the held-out stream (the stream is
    /// re-seeded every call so successive points see the same states).
    TraceRecord evaluate() {
        Rng rng(derive_seed(cfg_.seed, kStreamEval));
        std::size_t S = prog_.constraint_count();
        TraceRecord row;
        row.iter = iter_;
        row.constraints.assign(S, 0.0);
        std::vector<double> c(S);
        for (int t = 0; t < cfg_.eval_batch; ++t) {
            ChannelSample h = csi_(rng);
            Action a = policy_.deterministic(h);
            row.objective += prog_.objective(h, a);
            prog_.constraints(h, a, c);
            for (std::size_t s = 0; s < S; ++s) row.constraints[s] += c[s];
        }
        row.objective /= cfg_.eval_batch;
        for (double& v : row.constraints) v /= cfg_.eval_batch;
        row.lambda = dual_.lambda;
        evals_.push_back(row);
        return row;
    }

    // Checkpoint restore hooks.
    void restore(long iter, DualState dual, double eta) {
        iter_ = iter;
        dual_ = std::move(dual);
        eta_ = eta;
    }
    double eta() const { return eta_; }

private:
    static constexpr std::uint64_t kStreamInit = 11;
    static constexpr std::uint64_t kStreamTrain = 12;
    static constexpr std::uint64_t kStreamEval = 13;

    static PolicyModel make_policy(PolicyLayout layout, std::uint64_t seed) {
        Rng init(derive_seed(seed, kStreamInit));
        return PolicyModel(std::move(layout), init);
    }

    void check_finite_params() const {
        for (const Mlp& net : policy_.nets()) {
            for (const auto& layer : net.weights())
                for (double v : layer)
                    if (!std::isfinite(v)) throw std::runtime_error("pddl: non-finite weight");
            for (const auto& layer : net.biases())
                for (double v : layer)
                    if (!std::isfinite(v)) throw std::runtime_error("pddl: non-finite bias");
        }
    }

    const ObservableProgram& prog_;
    CsiSource csi_;
    PddlConfig cfg_;
    Rng train_rng_;
    PolicyModel policy_;
    DualState dual_;
    double eta_;
    long iter_ = 0;
    std::vector<TraceRecord> trace_, evals_;
    std::vector<PolicyModel::Sampled> samples_;
    std::vector<double> fvals_;
    std::vector<std::vector<double>> cvals_;
    std::vector<std::uint64_t> seeds_;
    std::vector<MlpGrad> grads_;
};

/// Runtime execution of a trained policy: one forward pass plus head mapping.
inline Action execute_learned_policy(const ChannelSample& h, const PolicyModel& policy,
                                     bool stochastic, Rng* rng = nullptr) {
    if (stochastic) {
        if (!rng) throw std::invalid_argument("stochastic execution needs an rng");
        return policy.sample(h, *rng).action;
    }
    return policy.deterministic(h);
}

} // namespace fso

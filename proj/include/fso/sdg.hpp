#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fso/detail/parallel.hpp"
#include "fso/program.hpp"
#include "fso/trace.hpp"

namespace fso {

/// Dual-gradient solver settings: iteration budget, exponentially decaying
/// dual step eta^k = eta0 * gamma^k, and the per-update sample batch.
struct SdgConfig {
    long iterations = 2000;
    double eta0 = 0.5;
    double gamma = 0.999;
    int batch = 64;
    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const {
        if (iterations < 1) throw std::invalid_argument("sdg: iterations < 1");
        if (!(eta0 > 0.0)) throw std::invalid_argument("sdg: eta0 <= 0");
        if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("sdg: gamma not in (0,1]");
        if (batch < 1) throw std::invalid_argument("sdg: batch < 1");
    }
};

/// Per-sample Lagrangian f(h,a) - sum_s lambda_s c_s(h,a).
inline double lagrangian(const ObservableProgram& prog, const ChannelSample& h,
                         const Action& a, const DualState& d) {
    double v = prog.objective(h, a);
    if (prog.constraint_count() == 0) return v;
    std::vector<double> c = prog.constraints(h, a);
    for (std::size_t s = 0; s < c.size(); ++s) v -= d.lambda[s] * c[s];
    return v;
}

/// Projected dual ascent on the constraint estimate:
/// lambda_s' = max(0, lambda_s + eta * c_hat_s). A violated constraint
/// (c_hat > 0) grows its multiplier.
inline DualState dual_step(const DualState& d, double eta, std::span<const double> c_hat) {
    if (c_hat.size() != d.lambda.size())
        throw std::invalid_argument("dual_step: constraint size mismatch");
    DualState next = d;
    for (std::size_t s = 0; s < c_hat.size(); ++s) {
        double v = d.lambda[s] + eta * c_hat[s];
        next.lambda[s] = v > 0.0 ? v : 0.0;
    }
    return next;
}

struct SdgResult {
    DualState dual; ///< final iterate
    std::vector<TraceRecord> trace;

    /// Trailing-window average of the multipliers: the iterates are
    /// stochastic, so the averaged dual is the one to deploy.
    DualState trailing_dual(std::size_t window) const {
        if (trace.empty()) return dual;
        DualState d = DualState::zeros(dual.lambda.size());
        std::size_t n = trace.size() < window ? trace.size() : window;
        for (std::size_t i = trace.size() - n; i < trace.size(); ++i)
            for (std::size_t s = 0; s < d.lambda.size(); ++s)
                d.lambda[s] += trace[i].lambda[s];
        for (double& v : d.lambda) v /= static_cast<double>(n);
        return d;
    }
};

/// The model-based solver: per iteration, draw a CSI batch, maximize the
/// per-sample Lagrangian at the current multipliers, then take a projected
/// dual step on the batch-mean constraint values. Fixed iteration budget
/// (the iterates are stochastic; convergence is read from trailing-window
/// statistics).
inline SdgResult sdg_run(const ProgramInstance& inst, const SdgConfig& cfg, Rng& rng) {
    cfg.validate();
    std::size_t S = inst.constraint_count();
    SdgResult res;
    res.dual = DualState::zeros(S);
    res.trace.reserve(static_cast<std::size_t>(cfg.iterations));

    std::vector<ChannelSample> batch(static_cast<std::size_t>(cfg.batch));
    std::vector<double> f(batch.size());
    std::vector<std::vector<double>> c(batch.size(), std::vector<double>(S));
    double eta = cfg.eta0;

    for (long k = 0; k < cfg.iterations; ++k) {
        auto t0 = std::chrono::steady_clock::now();
        for (auto& h : batch) h = inst.draw_csi(rng);
        detail::parallel_for(batch.size(), cfg.workers, [&](std::size_t t) {
            Action a = inst.primal_argmax(batch[t], res.dual);
            f[t] = inst.objective(batch[t], a);
            inst.constraints(batch[t], a, c[t]);
        });

        TraceRecord row;
        row.iter = k;
        row.constraints.assign(S, 0.0);
        for (std::size_t t = 0; t < batch.size(); ++t) {
            row.objective += f[t];
            for (std::size_t s = 0; s < S; ++s) row.constraints[s] += c[t][s];
        }
        row.objective /= static_cast<double>(batch.size());
        for (double& v : row.constraints) v /= static_cast<double>(batch.size());

        if (!std::isfinite(row.objective)) {
            std::ostringstream msg;
            msg << "sdg: non-finite objective at iteration " << k;
            throw std::runtime_error(msg.str());
        }
        for (std::size_t s = 0; s < S; ++s)
            if (!std::isfinite(row.constraints[s])) {
                std::ostringstream msg;
                msg << "sdg: non-finite constraint " << s << " at iteration " << k;
                throw std::runtime_error(msg.str());
            }

        res.dual = dual_step(res.dual, eta, row.constraints);
        eta *= cfg.gamma;

        row.lambda = res.dual.lambda;
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        res.trace.push_back(std::move(row));
    }
    return res;
}

/// The deployable policy after convergence: the per-sample Lagrangian
/// maximizer at the final multipliers.
inline Action execute_policy(const ProgramInstance& inst, const ChannelSample& h,
                             const DualState& dual) {
    return inst.primal_argmax(h, dual);
}

} // namespace fso

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fso/rng.hpp"

namespace fso {

/// Layer sizes n0..nL; hidden activations are ReLU, the output layer is
/// linear (heads apply their own squashing downstream).
struct MlpSpec {
    std::vector<int> sizes;

    void validate() const {
        if (sizes.size() < 2) throw std::invalid_argument("mlp: need at least one layer");
        for (int s : sizes)
            if (s < 1) throw std::invalid_argument("mlp: layer size < 1");
    }
    int input_dim() const { return sizes.front(); }
    int output_dim() const { return sizes.back(); }
    std::size_t layer_count() const { return sizes.size() - 1; }
};

struct MlpGrad {
    std::vector<std::vector<double>> dw, db;

    void zero() {
        for (auto& g : dw) std::fill(g.begin(), g.end(), 0.0);
        for (auto& g : db) std::fill(g.begin(), g.end(), 0.0);
    }
};

/// Forward activations of one pass, kept for the backward sweep. x[0] is the
/// input, x[l] the post-activation output of layer l.
struct MlpCache {
    std::vector<std::vector<double>> x;
};

/// A fully connected network together with its ADAM moment state. Weights
/// are row-major (out x in). He-uniform initialization for the ReLU stack,
/// zero biases.
class Mlp {
public:
    Mlp() = default;
    Mlp(MlpSpec spec, Rng& rng) : spec_(std::move(spec)) {
        spec_.validate();
        std::size_t nl = spec_.layer_count();
        w_.resize(nl);
        b_.resize(nl);
        mw_.resize(nl);
        vw_.resize(nl);
        mb_.resize(nl);
        vb_.resize(nl);
        for (std::size_t l = 0; l < nl; ++l) {
            int fan_in = spec_.sizes[l];
            int fan_out = spec_.sizes[l + 1];
            double limit = std::sqrt(6.0 / fan_in);
            w_[l].resize(static_cast<std::size_t>(fan_in) * fan_out);
            for (double& v : w_[l]) v = rng.uniform(-limit, limit);
            b_[l].assign(fan_out, 0.0);
            mw_[l].assign(w_[l].size(), 0.0);
            vw_[l].assign(w_[l].size(), 0.0);
            mb_[l].assign(fan_out, 0.0);
            vb_[l].assign(fan_out, 0.0);
        }
    }

    const MlpSpec& spec() const { return spec_; }
    std::vector<std::vector<double>>& weights() { return w_; }
    std::vector<std::vector<double>>& biases() { return b_; }
    const std::vector<std::vector<double>>& weights() const { return w_; }
    const std::vector<std::vector<double>>& biases() const { return b_; }
    long step_count() const { return step_; }

    std::size_t param_count() const {
        std::size_t q = 0;
        for (std::size_t l = 0; l < w_.size(); ++l) q += w_[l].size() + b_[l].size();
        return q;
    }

    MlpGrad make_grad() const {
        MlpGrad g;
        g.dw.resize(w_.size());
        g.db.resize(b_.size());
        for (std::size_t l = 0; l < w_.size(); ++l) {
            g.dw[l].assign(w_[l].size(), 0.0);
            g.db[l].assign(b_[l].size(), 0.0);
        }
        return g;
    }

    std::vector<double> forward(std::span<const double> input, MlpCache* cache = nullptr) const {
        if (input.size() != static_cast<std::size_t>(spec_.input_dim()))
            throw std::invalid_argument("mlp: input size mismatch");
        std::vector<double> cur(input.begin(), input.end());
        if (cache) {
            cache->x.clear();
            cache->x.push_back(cur);
        }
        for (std::size_t l = 0; l < w_.size(); ++l) {
            int nin = spec_.sizes[l];
            int nout = spec_.sizes[l + 1];
            std::vector<double> next(nout);
            const double* wl = w_[l].data();
            for (int o = 0; o < nout; ++o) {
                double acc = b_[l][o];
                const double* row = wl + static_cast<std::size_t>(o) * nin;
                for (int i = 0; i < nin; ++i) acc += row[i] * cur[i];
                next[o] = acc;
            }
            if (l + 1 < w_.size())
                for (double& v : next) v = v > 0.0 ? v : 0.0; // ReLU
            cur = std::move(next);
            if (cache) cache->x.push_back(cur);
        }
        return cur;
    }

    /// Accumulate scale * d(upstream . output)/d(theta) into `grad`.
    /// Exact reverse-mode gradient of the cached forward pass.
    void backward(const MlpCache& cache, std::span<const double> upstream, MlpGrad& grad,
                  double scale = 1.0) const {
        if (cache.x.size() != w_.size() + 1)
            throw std::invalid_argument("mlp: stale cache");
        std::vector<double> delta(upstream.begin(), upstream.end());
        for (std::size_t li = w_.size(); li-- > 0;) {
            int nin = spec_.sizes[li];
            int nout = spec_.sizes[li + 1];
            const std::vector<double>& xin = cache.x[li];
            double* dwl = grad.dw[li].data();
            for (int o = 0; o < nout; ++o) {
                double d = delta[o] * scale;
                grad.db[li][o] += d;
                double* row = dwl + static_cast<std::size_t>(o) * nin;
                for (int i = 0; i < nin; ++i) row[i] += d * xin[i];
            }
            if (li == 0) break;
            std::vector<double> prev(nin, 0.0);
            const double* wl = w_[li].data();
            for (int o = 0; o < nout; ++o) {
                double d = delta[o];
                const double* row = wl + static_cast<std::size_t>(o) * nin;
                for (int i = 0; i < nin; ++i) prev[i] += d * row[i];
            }
            // ReLU gate of the layer below: x[li] is its post-activation output
            const std::vector<double>& gate = cache.x[li];
            for (int i = 0; i < nin; ++i)
                if (gate[i] <= 0.0) prev[i] = 0.0;
            delta = std::move(prev);
        }
    }

    /// One ADAM update from an accumulated gradient. `maximize` ascends.
    void adam_step(const MlpGrad& grad, double lr, double beta1 = 0.9, double beta2 = 0.999,
                   double eps = 1e-8, bool maximize = false) {
        ++step_;
        double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
        double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
        // descend on g, or on -g when ascending
        double sign = maximize ? -1.0 : 1.0;
        for (std::size_t l = 0; l < w_.size(); ++l) {
            apply(w_[l], grad.dw[l], mw_[l], vw_[l], lr, beta1, beta2, eps, c1, c2, sign);
            apply(b_[l], grad.db[l], mb_[l], vb_[l], lr, beta1, beta2, eps, c1, c2, sign);
        }
    }

    // Checkpoint access.
    std::vector<std::vector<double>>& adam_mw() { return mw_; }
    std::vector<std::vector<double>>& adam_vw() { return vw_; }
    std::vector<std::vector<double>>& adam_mb() { return mb_; }
    std::vector<std::vector<double>>& adam_vb() { return vb_; }
    const std::vector<std::vector<double>>& adam_mw() const { return mw_; }
    const std::vector<std::vector<double>>& adam_vw() const { return vw_; }
    const std::vector<std::vector<double>>& adam_mb() const { return mb_; }
    const std::vector<std::vector<double>>& adam_vb() const { return vb_; }
    void set_step_count(long s) { step_ = s; }

private:
    MlpSpec spec_;
    std::vector<std::vector<double>> w_, b_;
    std::vector<std::vector<double>> mw_, vw_, mb_, vb_;
    long step_ = 0;

    static void apply(std::vector<double>& p, const std::vector<double>& g,
                      std::vector<double>& m, std::vector<double>& v, double lr, double beta1,
                      double beta2, double eps, double c1, double c2, double sign) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            double gi = sign * g[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
            v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
            double mhat = m[i] / c1;
            double vhat = v[i] / c2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
};

} // namespace fso

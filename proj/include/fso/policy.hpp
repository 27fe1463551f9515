#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fso/detail/math.hpp"
#include "fso/detail/normal.hpp"
#include "fso/mlp.hpp"
#include "fso/program.hpp"
#include "fso/rng.hpp"

namespace fso {

/// Gaussian truncated to [lo, hi] (infinite bounds give the plain normal).
/// Density phi((x-mu)/sigma) / (sigma Z) with Z = Phi(beta) - Phi(alpha).
/// Sampling is inverse-CDF on the truncated range, so one uniform word per
/// draw and support membership by construction.
struct TruncNormal {
    double mu = 0.0;
    double sigma = 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("truncnorm: sigma <= 0");
        if (!(lo < hi)) throw std::invalid_argument("truncnorm: empty support");
    }

    double alpha() const { return (lo - mu) / sigma; }
    double beta() const { return (hi - mu) / sigma; }
    double z() const { return detail::normal_cdf(beta()) - detail::normal_cdf(alpha()); }

    double logpdf(double x) const {
        validate();
        if (x < lo || x > hi) return -std::numeric_limits<double>::infinity();
        double zv = (x - mu) / sigma;
        return -0.5 * zv * zv - 0.5 * std::log(2.0 * 3.14159265358979323846) -
               std::log(sigma) - std::log(z());
    }

    double sample(Rng& rng) const {
        validate();
        double ca = detail::normal_cdf(alpha());
        double cb = detail::normal_cdf(beta());
        double u = ca + rng.uniform() * (cb - ca);
        double x = mu + sigma * detail::normal_inverse_cdf(u);
        return std::clamp(x, lo, hi);
    }

    /// E[X] under the truncated density (the deterministic-execution value).
    double mean() const {
        validate();
        double a = alpha(), b = beta();
        double pa = std::isfinite(a) ? detail::normal_pdf(a) : 0.0;
        double pb = std::isfinite(b) ? detail::normal_pdf(b) : 0.0;
        return mu + sigma * (pa - pb) / z();
    }

    struct Score {
        double d_mu;
        double d_sigma;
    };

    /// Analytic (d log pdf / d mu, d log pdf / d sigma) including the
    /// normalization-term corrections from the moving truncation bounds.
    Score score(double x) const {
        validate();
        double a = alpha(), b = beta();
        double zv = (x - mu) / sigma;
        double pa = std::isfinite(a) ? detail::normal_pdf(a) : 0.0;
        double pb = std::isfinite(b) ? detail::normal_pdf(b) : 0.0;
        double apa = std::isfinite(a) ? a * pa : 0.0;
        double bpb = std::isfinite(b) ? b * pb : 0.0;
        double zz = z();
        Score s;
        s.d_mu = zv / sigma + (pb - pa) / (sigma * zz);
        s.d_sigma = (zv * zv - 1.0) / sigma + (bpb - apa) / (sigma * zz);
        return s;
    }
};

inline std::vector<double> categorical_probs(std::span<const double> logits) {
    double lse = detail::logsumexp(logits);
    std::vector<double> p(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) p[i] = std::exp(logits[i] - lse);
    return p;
}

inline int categorical_sample(std::span<const double> logits, Rng& rng) {
    std::vector<double> p = categorical_probs(logits);
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
}

inline double categorical_log_prob(std::span<const double> logits, int k) {
    return logits[k] - detail::logsumexp(logits);
}

/// d log p(k) / d logits = onehot(k) - softmax(logits).
inline void categorical_score(std::span<const double> logits, int k,
                              std::span<double> out) {
    std::vector<double> p = categorical_probs(logits);
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = -p[i];
    out[k] += 1.0;
}

/// Raw head outputs -> distribution parameters. The location head is
/// squashed onto the support with a scaled logistic (gradients stay alive at
/// the boundary, unlike clipping); the spread head goes through softplus
/// with a floor that keeps densities non-degenerate.
struct PowerHeadMap {
    double power_peak;
    double sigma_min;

    TruncNormal params(double u_mean, double u_sigma) const {
        TruncNormal t;
        t.mu = power_peak * detail::sigmoid(u_mean);
        t.sigma = detail::softplus(u_sigma) + sigma_min;
        t.lo = 0.0;
        t.hi = power_peak;
        return t;
    }
    double dmu_du(double u_mean) const {
        double s = detail::sigmoid(u_mean);
        return power_peak * s * (1.0 - s);
    }
    double dsigma_du(double u_sigma) const { return detail::sigmoid(u_sigma); }
};

/// The stochastic resource-allocation policy: one MLP per layout entry whose
/// outputs parameterize truncated-Gaussian power heads and categorical
/// selection heads. Every sampled action lies in the feasible set by
/// construction.
class PolicyModel {
public:
    static constexpr double kSigmaMinFrac = 1e-3;

    PolicyModel(PolicyLayout layout, Rng& init_rng) : layout_(std::move(layout)) {
        for (const NetLayout& nl : layout_.nets) {
            MlpSpec spec;
            spec.sizes.push_back(static_cast<int>(nl.input_indices.size()));
            for (int hsz : nl.hidden) spec.sizes.push_back(hsz);
            spec.sizes.push_back(nl.output_dim());
            nets_.emplace_back(std::move(spec), init_rng);
        }
        // Start the spread heads near 0.25 * P_s instead of softplus(0):
        // exploration wider than the support just wastes the early budget.
        if (layout_.power_peak > 0.0) {
            double target = 0.25 * layout_.power_peak - kSigmaMinFrac * layout_.power_peak;
            double bias = std::log(std::expm1(std::max(target, 1e-9)));
            for (std::size_t n = 0; n < nets_.size(); ++n) {
                const NetLayout& nl = layout_.nets[n];
                std::vector<double>& out_bias = nets_[n].biases().back();
                for (std::size_t ph = 0; ph < nl.power_action_index.size(); ++ph)
                    out_bias[2 * ph + 1] = bias;
            }
        }
    }

    const PolicyLayout& layout() const { return layout_; }
    std::vector<Mlp>& nets() { return nets_; }
    const std::vector<Mlp>& nets() const { return nets_; }

    PowerHeadMap head_map() const {
        return {layout_.power_peak, kSigmaMinFrac * layout_.power_peak};
    }

    /// One sampled action plus everything the score-function estimator needs:
    /// per-net forward caches and d(log pi)/d(net outputs).
    struct Sampled {
        Action action;
        double log_prob = 0.0;
        std::vector<MlpCache> caches;
        std::vector<std::vector<double>> dlog_du;
    };

    Sampled sample(const ChannelSample& h, Rng& rng) const {
        Sampled out;
        out.action.powers.assign(layout_.n_powers, 0.0);
        out.action.selections.assign(layout_.n_selections, 0);
        out.caches.resize(nets_.size());
        out.dlog_du.resize(nets_.size());
        PowerHeadMap map = head_map();
        for (std::size_t n = 0; n < nets_.size(); ++n) {
            const NetLayout& nl = layout_.nets[n];
            std::vector<double> u = nets_[n].forward(net_input(h, nl), &out.caches[n]);
            std::vector<double>& dl = out.dlog_du[n];
            dl.assign(u.size(), 0.0);
            std::size_t off = 0;
            for (std::size_t ph = 0; ph < nl.power_action_index.size(); ++ph, off += 2) {
                TruncNormal t = map.params(u[off], u[off + 1]);
                double x = t.sample(rng);
                out.action.powers[nl.power_action_index[ph]] = x;
                out.log_prob += t.logpdf(x);
                TruncNormal::Score sc = t.score(x);
                dl[off] = sc.d_mu * map.dmu_du(u[off]);
                dl[off + 1] = sc.d_sigma * map.dsigma_du(u[off + 1]);
            }
            for (std::size_t ch = 0; ch < nl.cat_sizes.size(); ++ch) {
                int k = nl.cat_sizes[ch];
                std::span<const double> logits(u.data() + off, static_cast<std::size_t>(k));
                int pick = categorical_sample(logits, rng);
                out.log_prob += categorical_log_prob(logits, pick);
                categorical_score(logits, pick,
                                  std::span<double>(dl.data() + off, static_cast<std::size_t>(k)));
                int sel = (nl.cat_allow_none && pick == k - 1) ? -1 : pick;
                out.action.selections[nl.cat_selection_index[ch]] = sel;
                off += static_cast<std::size_t>(k);
            }
        }
        return out;
    }

    /// Deterministic execution: location parameter for powers, argmax for
    /// selections. One forward pass per net.
    Action deterministic(const ChannelSample& h) const {
        Action a;
        a.powers.assign(layout_.n_powers, 0.0);
        a.selections.assign(layout_.n_selections, 0);
        PowerHeadMap map = head_map();
        for (std::size_t n = 0; n < nets_.size(); ++n) {
            const NetLayout& nl = layout_.nets[n];
            std::vector<double> u = nets_[n].forward(net_input(h, nl));
            std::size_t off = 0;
            for (std::size_t ph = 0; ph < nl.power_action_index.size(); ++ph, off += 2)
                a.powers[nl.power_action_index[ph]] = map.params(u[off], u[off + 1]).mean();
            for (std::size_t ch = 0; ch < nl.cat_sizes.size(); ++ch) {
                int k = nl.cat_sizes[ch];
                int arg = 0;
                for (int i = 1; i < k; ++i)
                    if (u[off + i] > u[off + arg]) arg = i;
                a.selections[nl.cat_selection_index[ch]] =
                    (nl.cat_allow_none && arg == k - 1) ? -1 : arg;
                off += static_cast<std::size_t>(k);
            }
        }
        return a;
    }

    /// Score-function gradient accumulation: grads[n] += weight *
    /// d log pi / d theta_n for the given sampled action.
    void accumulate_score(const Sampled& s, double weight, std::vector<MlpGrad>& grads) const {
        for (std::size_t n = 0; n < nets_.size(); ++n)
            nets_[n].backward(s.caches[n], s.dlog_du[n], grads[n], weight);
    }

    std::vector<MlpGrad> make_grads() const {
        std::vector<MlpGrad> g;
        g.reserve(nets_.size());
        for (const Mlp& net : nets_) g.push_back(net.make_grad());
        return g;
    }

    void adam_step(const std::vector<MlpGrad>& grads, double lr, bool maximize) {
        for (std::size_t n = 0; n < nets_.size(); ++n)
            nets_[n].adam_step(grads[n], lr, 0.9, 0.999, 1e-8, maximize);
    }

    std::vector<double> net_input(const ChannelSample& h, const NetLayout& nl) const {
        std::vector<double> in(nl.input_indices.size());
        for (std::size_t i = 0; i < in.size(); ++i) {
            int idx = nl.input_indices[i];
            in[i] = h.gains[idx] * layout_.input_scale[idx];
        }
        return in;
    }

private:
    PolicyLayout layout_;
    std::vector<Mlp> nets_;
};

} // namespace fso

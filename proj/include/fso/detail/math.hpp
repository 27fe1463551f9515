#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace fso::detail {

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double logsumexp(std::span<const double> v) {
    double m = v[0];
    for (double x : v)
        if (x > m) m = x;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/// Streaming mean / variance / skewness (Welford updates through the third
/// central moment).
class RunningStats {
public:
    void add(double x) {
        ++n_;
        double n = static_cast<double>(n_);
        double delta = x - mean_;
        double delta_n = delta / n;
        double term1 = delta * delta_n * (n - 1.0);
        mean_ += delta_n;
        m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
        m2_ += term1;
    }

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    /// Standard error of the mean.
    double sem() const { return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0; }
    double skewness() const {
        if (n_ < 3 || m2_ <= 0.0) return 0.0;
        double n = static_cast<double>(n_);
        return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0;
};

} // namespace fso::detail

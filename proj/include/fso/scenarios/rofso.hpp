#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fso/detail/search.hpp"
#include "fso/program.hpp"

namespace fso {

/// Constants of the wavelength-multiplexed power-adaptation system. RIN is
/// stored linear (the quoted -140 dB/Hz density times an effective bandwidth
/// factor, folded at configuration time). F and R_f are typical APD /
/// transimpedance values; the source system leaves them open.
struct RofsoConstants {
    double omi = 0.15;              ///< optical modulation index
    double apd_gain = 5.0;          ///< m_p
    double responsivity = 0.75;     ///< r [A/W]
    double rin_linear = 1e-14;      ///< relative intensity noise, linear
    double excess_noise = 0.5;      ///< F
    double temperature_k = 300.0;   ///< T
    double feedback_ohm = 50.0;     ///< R_f
    double electron_charge = consts::kElectronCharge;
    double boltzmann = consts::kBoltzmann;
    double power_total = 1.5;       ///< P_t [W], budget in expectation
    double power_peak = 0.3;        ///< P_s [W], per-carrier eye-safety cap

    void validate() const {
        if (omi <= 0 || apd_gain <= 0 || responsivity <= 0 || rin_linear <= 0 ||
            excess_noise <= 0 || temperature_k <= 0 || feedback_ohm <= 0 ||
            power_total <= 0 || power_peak <= 0)
            throw std::invalid_argument("rofso constants must be > 0");
    }
};

/// Per-wavelength capacity (nats/use):
///   log(1 + (1/2)(OMI m_p r p h)^2 /
///            (RIN (r p h)^2 + 2 e m_p^{2+F} r p h + 4 K T / R_f))
inline double capacity_rofso(double gain, double power, const RofsoConstants& k) {
    if (gain < 0.0 || power < 0.0)
        throw std::invalid_argument("capacity_rofso: negative input");
    double x = k.responsivity * power * gain; // photocurrent scale r*p*h
    if (x == 0.0) return 0.0;
    double sig = 0.5 * (k.omi * k.apd_gain * x) * (k.omi * k.apd_gain * x);
    double noise = k.rin_linear * x * x +
                   2.0 * k.electron_charge * std::pow(k.apd_gain, 2.0 + k.excess_noise) * x +
                   4.0 * k.boltzmann * k.temperature_k / k.feedback_ohm;
    return std::log1p(sig / noise);
}

/// Power adaptation over N parallel wavelength carriers: maximize the
/// omega-weighted sum capacity subject to one expected total-power constraint
/// (P_t) and the structural per-carrier box [0, P_s].
class RofsoProgram final : public ProgramInstance {
public:
    RofsoProgram(int n, RofsoConstants k, const ChannelConfig& ch, double distance_km,
                 std::vector<double> omega)
        : ProgramInstance("rofso"), n_(n), k_(k) {
        k_.validate();
        if (n <= 0) throw std::invalid_argument("rofso: n <= 0");
        if (omega.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("rofso: omega size != n");
        omega_ = std::move(omega);
        double ha = attenuation(ch.link(distance_km));
        topology_.entry_attenuation.assign(n, ha);
        topology_.turbulence = ch.turbulence();
    }

    int channels() const { return n_; }
    const RofsoConstants& constants() const { return k_; }

    using ObservableProgram::constraints;
    std::size_t constraint_count() const override { return 1; }

    double objective(const ChannelSample& h, const Action& a) const override {
        require_csi(h);
        if (a.powers.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("rofso: action size mismatch");
        double f = 0.0;
        for (int i = 0; i < n_; ++i)
            f += omega_[i] * capacity_rofso(h.gains[i], a.powers[i], k_);
        return f;
    }

    void constraints(const ChannelSample& h, const Action& a,
                     std::span<double> out) const override {
        require_csi(h);
        double tot = 0.0;
        for (double p : a.powers) tot += p;
        out[0] = tot - k_.power_total;
    }

    Action primal_argmax(const ChannelSample& h, const DualState& d) const override {
        require_csi(h);
        double lam = d.lambda.empty() ? 0.0 : d.lambda[0];
        Action a;
        a.powers.resize(n_);
        for (int i = 0; i < n_; ++i) {
            double gain = h.gains[i];
            double w = omega_[i];
            a.powers[i] = detail::maximize_scalar(
                [&](double p) { return w * capacity_rofso(gain, p, k_) - lam * p; }, 0.0,
                k_.power_peak, 1e-6);
        }
        return a;
    }

    PolicyLayout policy_layout() const override {
        // N independent per-carrier nets, each emitting one (mean, spread)
        // pair for a truncated-Gaussian power policy on [0, P_s].
        PolicyLayout layout;
        layout.power_peak = k_.power_peak;
        layout.n_powers = static_cast<std::size_t>(n_);
        layout.n_selections = 0;
        layout.input_scale.resize(n_);
        for (int i = 0; i < n_; ++i)
            layout.input_scale[i] = 1.0 / topology_.entry_attenuation[i];
        for (int i = 0; i < n_; ++i) {
            NetLayout net;
            net.hidden = {20, 10};
            net.input_indices = {i};
            net.power_action_index = {i};
            layout.nets.push_back(std::move(net));
        }
        return layout;
    }

    bool action_feasible(const Action& a) const override {
        if (a.powers.size() != static_cast<std::size_t>(n_) || !a.selections.empty())
            return false;
        for (double p : a.powers)
            if (!(p >= 0.0 && p <= k_.power_peak * (1.0 + 1e-12))) return false;
        return true;
    }

private:
    int n_;
    RofsoConstants k_;
};

} // namespace fso

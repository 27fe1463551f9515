#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fso/detail/search.hpp"
#include "fso/program.hpp"

namespace fso {

struct FronthaulConstants {
    double frame_s = 1e-9;       ///< T_f
    double bandwidth_hz = 1e9;   ///< B
    double duplex_factor = 1.0;  ///< epsilon
    double responsivity = 0.75;  ///< R [A/W]
    double noise_bandwidth_hz = 1e9; ///< delta-f; defaults to B
    double electron_charge = consts::kElectronCharge;
    double power_total = 1.5;    ///< P_t per (RRH, AN) link
    double power_peak = 0.6;     ///< P_s per carrier
    double fiber_cap = 50.0;     ///< C_t, per-AN congestion ceiling

    void validate() const {
        if (frame_s <= 0 || bandwidth_hz <= 0 || responsivity <= 0 ||
            noise_bandwidth_hz <= 0 || power_total <= 0 || power_peak <= 0 ||
            fiber_cap <= 0)
            throw std::invalid_argument("fronthaul constants must be > 0");
        if (duplex_factor != 1.0 && duplex_factor != 2.0)
            throw std::invalid_argument("fronthaul duplex factor must be 1 or 2");
    }
    double rate_scale() const { return frame_s * bandwidth_hz / duplex_factor; }
    double snr_per_watt() const {
        return responsivity / (electron_charge * noise_bandwidth_hz);
    }
};

/// Link capacity between one RRH and one AN over L carriers:
///   sum_l omega_l (T_f B / eps) log(1 + p_l h_l R / (e df)).
inline double capacity_fronthaul_link(std::span<const double> gains,
                                      std::span<const double> powers,
                                      std::span<const double> omega,
                                      const FronthaulConstants& k) {
    if (gains.size() != powers.size() || gains.size() != omega.size())
        throw std::invalid_argument("capacity_fronthaul_link: shape mismatch");
    double c = 0.0;
    for (std::size_t l = 0; l < gains.size(); ++l)
        c += omega[l] * k.rate_scale() * std::log1p(powers[l] * gains[l] * k.snr_per_watt());
    return c;
}

/// Joint AN selection and carrier power allocation for N RRHs, M ANs and L
/// carriers. Constraints: one expected power budget per (RRH, AN) link
/// (N*M of them) followed by one congestion cap per AN (M more). A RRH may
/// select no AN. By default the congestion sum counts only links that are
/// actually selected (unselected links carry no traffic); `literal_congestion`
/// switches to the variant that sums every link's capacity.
class FronthaulProgram final : public ProgramInstance {
public:
    FronthaulProgram(int rrhs, int ans, int carriers, FronthaulConstants k,
                     const ChannelConfig& ch, double rrh_box_km, double an_box_km,
                     Rng& topo_rng, std::vector<double> omega,
                     bool literal_congestion = false)
        : ProgramInstance("fronthaul"), n_(rrhs), m_(ans), l_(carriers), k_(k),
          literal_(literal_congestion) {
        k_.validate();
        if (rrhs < 1 || ans < 1 || carriers < 1)
            throw std::invalid_argument("fronthaul: dims must be >= 1");
        if (omega.size() != static_cast<std::size_t>(carriers))
            throw std::invalid_argument("fronthaul: omega size != carriers");
        omega_ = std::move(omega);
        build_topology(ch, rrh_box_km, an_box_km, topo_rng);
    }

    int rrhs() const { return n_; }
    int ans() const { return m_; }
    int carriers() const { return l_; }
    const FronthaulConstants& constants() const { return k_; }
    bool literal_congestion() const { return literal_; }

    std::size_t entry_idx(int i, int j, int l) const {
        return static_cast<std::size_t>((i * m_ + j) * l_ + l);
    }
    using ObservableProgram::constraints;
    std::size_t constraint_count() const override {
        return static_cast<std::size_t>(n_ * m_ + m_);
    }

    double link_capacity(const ChannelSample& h, const Action& a, int i, int j) const {
        double c = 0.0;
        for (int l = 0; l < l_; ++l) {
            std::size_t e = entry_idx(i, j, l);
            c += omega_[l] * k_.rate_scale() *
                 std::log1p(a.powers[e] * h.gains[e] * k_.snr_per_watt());
        }
        return c;
    }

    double objective(const ChannelSample& h, const Action& a) const override {
        require_csi(h);
        check_action(a);
        double f = 0.0;
        for (int i = 0; i < n_; ++i)
            if (a.selections[i] >= 0) f += link_capacity(h, a, i, a.selections[i]);
        return f;
    }

    void constraints(const ChannelSample& h, const Action& a,
                     std::span<double> out) const override {
        require_csi(h);
        check_action(a);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < m_; ++j) {
                double tot = 0.0;
                for (int l = 0; l < l_; ++l) tot += a.powers[entry_idx(i, j, l)];
                out[i * m_ + j] = tot - k_.power_total;
            }
        for (int j = 0; j < m_; ++j) {
            double traffic = 0.0;
            for (int i = 0; i < n_; ++i)
                if (literal_ || a.selections[i] == j) traffic += link_capacity(h, a, i, j);
            out[n_ * m_ + j] = traffic - k_.fiber_cap;
        }
    }

    /// Per-sample Lagrangian maximizer. Separable across RRHs: for each
    /// candidate AN j the carrier powers solve scalar problems
    /// (1 - mu_j) w_l c(p) - lambda_ij p, and the RRH takes the best AN or
    /// none (value 0). Congestion multipliers >= 1 switch the link off.
    Action primal_argmax(const ChannelSample& h, const DualState& d) const override {
        require_csi(h);
        if (d.lambda.size() != constraint_count())
            throw std::invalid_argument("fronthaul: dual size mismatch");
        Action a;
        a.powers.assign(csi_size(), 0.0);
        a.selections.assign(n_, -1);
        std::vector<double> p_best(l_), p_cand(l_);
        for (int i = 0; i < n_; ++i) {
            double best_v = 0.0; // "no selection" baseline
            int best_j = -1;
            for (int j = 0; j < m_; ++j) {
                double lam = d.lambda[i * m_ + j];
                double mu = d.lambda[n_ * m_ + j];
                double coef = 1.0 - mu;
                double v = 0.0;
                for (int l = 0; l < l_; ++l) {
                    double g = h.gains[entry_idx(i, j, l)];
                    double wl = omega_[l] * k_.rate_scale();
                    double p =
                        coef <= 0.0
                            ? 0.0
                            : detail::maximize_scalar(
                                  [&](double q) {
                                      return coef * wl * std::log1p(q * g * k_.snr_per_watt()) -
                                             lam * q;
                                  },
                                  0.0, k_.power_peak, 1e-6);
                    p_cand[l] = p;
                    v += coef * wl * std::log1p(p * g * k_.snr_per_watt()) - lam * p;
                }
                if (v > best_v) {
                    best_v = v;
                    best_j = j;
                    p_best = p_cand;
                }
            }
            a.selections[i] = best_j;
            if (best_j >= 0)
                for (int l = 0; l < l_; ++l) a.powers[entry_idx(i, best_j, l)] = p_best[l];
        }
        return a;
    }

    PolicyLayout policy_layout() const override {
        PolicyLayout layout;
        layout.power_peak = k_.power_peak;
        layout.n_powers = csi_size();
        layout.n_selections = static_cast<std::size_t>(n_);
        layout.input_scale.resize(csi_size());
        for (std::size_t i = 0; i < csi_size(); ++i)
            layout.input_scale[i] = 1.0 / topology_.entry_attenuation[i];
        NetLayout net;
        net.hidden = {400, 200, 100};
        net.input_indices.resize(csi_size());
        for (std::size_t i = 0; i < csi_size(); ++i)
            net.input_indices[i] = static_cast<int>(i);
        net.power_action_index.resize(layout.n_powers);
        for (std::size_t i = 0; i < layout.n_powers; ++i)
            net.power_action_index[i] = static_cast<int>(i);
        for (int i = 0; i < n_; ++i) {
            net.cat_sizes.push_back(m_ + 1); // extra "select nothing" category
            net.cat_selection_index.push_back(i);
        }
        net.cat_allow_none = true;
        layout.nets.push_back(std::move(net));
        return layout;
    }

    bool action_feasible(const Action& a) const override {
        if (a.powers.size() != csi_size() ||
            a.selections.size() != static_cast<std::size_t>(n_))
            return false;
        for (double p : a.powers)
            if (!(p >= 0.0 && p <= k_.power_peak * (1.0 + 1e-12))) return false;
        for (int j : a.selections)
            if (j < -1 || j >= m_) return false;
        return true;
    }

private:
    int n_, m_, l_;
    FronthaulConstants k_;
    bool literal_;

    void check_action(const Action& a) const {
        if (a.powers.size() != csi_size() ||
            a.selections.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("fronthaul: malformed action");
        for (int j : a.selections)
            if (j < -1 || j >= m_) throw std::invalid_argument("fronthaul: bad selection");
    }

    void build_topology(const ChannelConfig& ch, double rrh_box_km, double an_box_km,
                        Rng& rng) {
        std::vector<std::pair<double, double>> rrh(n_), an(m_);
        for (auto& p : rrh)
            p = {rng.uniform(-rrh_box_km, rrh_box_km), rng.uniform(-rrh_box_km, rrh_box_km)};
        for (auto& p : an)
            p = {rng.uniform(-an_box_km, an_box_km), rng.uniform(-an_box_km, an_box_km)};
        topology_.entry_attenuation.resize(static_cast<std::size_t>(n_) * m_ * l_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < m_; ++j) {
                double dx = rrh[i].first - an[j].first;
                double dy = rrh[i].second - an[j].second;
                double ha = attenuation(ch.link(std::max(1e-3, std::hypot(dx, dy))));
                for (int l = 0; l < l_; ++l) topology_.entry_attenuation[entry_idx(i, j, l)] = ha;
            }
        topology_.turbulence = ch.turbulence();
    }
};

} // namespace fso

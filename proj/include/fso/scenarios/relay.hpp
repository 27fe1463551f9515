#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fso/program.hpp"

namespace fso {

/// Constants of the relay-assisted networks (plain selection and the
/// multichannel joint variant share the same capacity kernel).
struct RelayConstants {
    double frame_s = 1e-8;       ///< T_f
    double bandwidth_hz = 5e8;   ///< B
    double duplex_factor = 1.0;  ///< epsilon: 1 full-duplex, 2 half-duplex
    double power_fixed = 0.3;    ///< P [W], per-segment power in plain selection
    double responsivity = 0.75;  ///< R [A/W]
    double noise_bandwidth_hz = 5e8; ///< delta-f; defaults to B
    double electron_charge = consts::kElectronCharge;

    void validate() const {
        if (frame_s <= 0 || bandwidth_hz <= 0 || power_fixed <= 0 || responsivity <= 0 ||
            noise_bandwidth_hz <= 0)
            throw std::invalid_argument("relay constants must be > 0");
        if (duplex_factor != 1.0 && duplex_factor != 2.0)
            throw std::invalid_argument("relay duplex factor must be 1 or 2");
    }
    double rate_scale() const { return frame_s * bandwidth_hz / duplex_factor; }
    double snr_per_watt() const {
        return responsivity / (electron_charge * noise_bandwidth_hz);
    }
};

/// End-to-end capacity of one amplify-and-forward path with per-segment
/// SNRs s_i = p_i h_i R / (e df):
///
///   (T_f B / eps) * log(1 + (prod_i (1 + 1/s_i) - 1)^{-1})
///
/// Any dead segment (p h = 0) kills the path; the limit value 0 is returned
/// rather than an error. The product-minus-one is accumulated incrementally
/// so huge SNRs do not cancel to zero.
inline double capacity_relay_link(std::span<const double> seg_gains,
                                  std::span<const double> seg_powers,
                                  const RelayConstants& k) {
    if (seg_gains.size() != seg_powers.size() || seg_gains.empty())
        throw std::invalid_argument("capacity_relay_link: segment shape mismatch");
    double prodm1 = 0.0; // prod(1 + e_i) - 1, built as x + e + x*e
    for (std::size_t i = 0; i < seg_gains.size(); ++i) {
        double s = seg_powers[i] * seg_gains[i] * k.snr_per_watt();
        if (s <= 0.0) return 0.0;
        double e = 1.0 / s;
        prodm1 += e + prodm1 * e;
    }
    return k.rate_scale() * std::log1p(1.0 / prodm1);
}

/// Relay selection over N hops of M parallel relays. The CSI stores only
/// layer-adjacent gains: segment 0 is transmitter->hop1 (M links), segments
/// 1..N-1 are M x M, segment N is hopN->receiver (M links). There is no
/// stochastic constraint; the action is the per-hop relay index.
class RelayProgram final : public ProgramInstance {
public:
    RelayProgram(int hops, int relays, RelayConstants k, const ChannelConfig& ch,
                 double span_km, double lateral_km, Rng& topo_rng)
        : ProgramInstance("relay"), n_(hops), m_(relays), k_(k) {
        k_.validate();
        if (hops < 1 || relays < 1) throw std::invalid_argument("relay: dims must be >= 1");
        build_topology(ch, span_km, lateral_km, topo_rng);
    }

    int hops() const { return n_; }
    int relays_per_hop() const { return m_; }
    const RelayConstants& constants() const { return k_; }

    // CSI index layout.
    std::size_t idx_first(int j) const { return static_cast<std::size_t>(j); }
    std::size_t idx_mid(int seg, int j_from, int j_to) const {
        return static_cast<std::size_t>(m_ + (seg - 1) * m_ * m_ + j_from * m_ + j_to);
    }
    std::size_t idx_last(int j) const {
        return static_cast<std::size_t>(m_ + (n_ - 1) * m_ * m_ + j);
    }

    /// Segment gains along the path (j_1 ... j_N); N+1 entries.
    std::vector<double> path_gains(const ChannelSample& h, std::span<const int> path) const {
        std::vector<double> g(n_ + 1);
        g[0] = h.gains[idx_first(path[0])];
        for (int s = 1; s < n_; ++s) g[s] = h.gains[idx_mid(s, path[s - 1], path[s])];
        g[n_] = h.gains[idx_last(path[n_ - 1])];
        return g;
    }

    double path_capacity(const ChannelSample& h, std::span<const int> path) const {
        std::vector<double> g = path_gains(h, path);
        std::vector<double> p(g.size(), k_.power_fixed);
        return capacity_relay_link(g, p, k_);
    }

    using ObservableProgram::constraints;
    std::size_t constraint_count() const override { return 0; }

    double objective(const ChannelSample& h, const Action& a) const override {
        require_csi(h);
        if (a.selections.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("relay: selection size mismatch");
        for (int j : a.selections)
            if (j < 0 || j >= m_) throw std::invalid_argument("relay: a path must exist");
        return path_capacity(h, a.selections);
    }

    void constraints(const ChannelSample&, const Action&, std::span<double>) const override {}

    Action primal_argmax(const ChannelSample& h, const DualState& d) const override {
        require_csi(h);
        if (!d.lambda.empty()) throw std::invalid_argument("relay: expected empty duals");
        Action best;
        best.selections.assign(n_, 0);
        std::vector<int> path(n_, 0);
        double best_v = -1.0;
        while (true) {
            double v = path_capacity(h, path);
            if (v > best_v) {
                best_v = v;
                best.selections.assign(path.begin(), path.end());
            }
            int i = 0;
            for (; i < n_; ++i) {
                if (++path[i] < m_) break;
                path[i] = 0;
            }
            if (i == n_) break;
        }
        return best;
    }

    PolicyLayout policy_layout() const override {
        PolicyLayout layout;
        layout.power_peak = 0.0;
        layout.n_powers = 0;
        layout.n_selections = static_cast<std::size_t>(n_);
        layout.input_scale.resize(csi_size());
        for (std::size_t i = 0; i < csi_size(); ++i)
            layout.input_scale[i] = 1.0 / topology_.entry_attenuation[i];
        NetLayout net;
        net.hidden = {200, 100};
        net.input_indices.resize(csi_size());
        for (std::size_t i = 0; i < csi_size(); ++i)
            net.input_indices[i] = static_cast<int>(i);
        for (int i = 0; i < n_; ++i) {
            net.cat_sizes.push_back(m_);
            net.cat_selection_index.push_back(i);
        }
        layout.nets.push_back(std::move(net));
        return layout;
    }

    bool action_feasible(const Action& a) const override {
        if (!a.powers.empty() || a.selections.size() != static_cast<std::size_t>(n_))
            return false;
        for (int j : a.selections)
            if (j < 0 || j >= m_) return false;
        return true;
    }

private:
    int n_, m_;
    RelayConstants k_;

    void build_topology(const ChannelConfig& ch, double span_km, double lateral_km,
                        Rng& rng) {
        // Node geometry: layers evenly spaced between transmitter and
        // receiver, relays offset laterally at random (fixed per experiment).
        std::vector<std::vector<double>> lateral(n_);
        for (int i = 0; i < n_; ++i) {
            lateral[i].resize(m_);
            for (int j = 0; j < m_; ++j) lateral[i][j] = rng.uniform(-lateral_km, lateral_km);
        }
        double dx = span_km / (n_ + 1);
        auto dist = [&](double y0, double y1) {
            return std::sqrt(dx * dx + (y1 - y0) * (y1 - y0));
        };
        topology_.entry_attenuation.resize(2 * m_ + (n_ - 1) * m_ * m_);
        for (int j = 0; j < m_; ++j)
            topology_.entry_attenuation[idx_first(j)] =
                attenuation(ch.link(dist(0.0, lateral[0][j])));
        for (int s = 1; s < n_; ++s)
            for (int a = 0; a < m_; ++a)
                for (int b = 0; b < m_; ++b)
                    topology_.entry_attenuation[idx_mid(s, a, b)] =
                        attenuation(ch.link(dist(lateral[s - 1][a], lateral[s][b])));
        for (int j = 0; j < m_; ++j)
            topology_.entry_attenuation[idx_last(j)] =
                attenuation(ch.link(dist(lateral[n_ - 1][j], 0.0)));
        topology_.turbulence = ch.turbulence();
    }
};

} // namespace fso

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fso/detail/search.hpp"
#include "fso/scenarios/relay.hpp"

namespace fso {

/// Joint power and relay allocation in a single-hop multichannel relay
/// network: L orthogonal carriers, M parallel relays, per-node expected
/// power budgets. Carrier powers live at the transmitter (node 0) and at
/// every relay (node 1+j); only the selected relay's powers earn capacity,
/// but every node's budget is a constraint.
///
/// The per-sample Lagrangian maximization runs a 2-D power grid per
/// (relay, carrier) pair, which is why this scenario is fixed at one hop.
struct JointRelayConstants {
    RelayConstants link;       ///< capacity kernel (T_f, B, eps, R, delta-f)
    double power_total = 1.5;  ///< P_t per node
    double power_peak = 0.6;   ///< P_s per carrier

    void validate() const {
        link.validate();
        if (power_total <= 0 || power_peak <= 0)
            throw std::invalid_argument("joint relay constants must be > 0");
    }
};

class JointRelayProgram final : public ProgramInstance {
public:
    JointRelayProgram(int relays, int carriers, JointRelayConstants k,
                      const ChannelConfig& ch, double span_km, double lateral_km,
                      Rng& topo_rng, std::vector<double> omega)
        : ProgramInstance("joint_relay"), m_(relays), l_(carriers), k_(k) {
        k_.validate();
        if (relays < 1 || carriers < 1)
            throw std::invalid_argument("joint relay: dims must be >= 1");
        if (omega.size() != static_cast<std::size_t>(carriers))
            throw std::invalid_argument("joint relay: omega size != carriers");
        omega_ = std::move(omega);
        build_topology(ch, span_km, lateral_km, topo_rng);
    }

    int relays() const { return m_; }
    int carriers() const { return l_; }
    const JointRelayConstants& constants() const { return k_; }

    // CSI: segment 0 (tx -> relay j) then segment 1 (relay j -> rx).
    std::size_t idx_in(int j, int l) const { return static_cast<std::size_t>(j * l_ + l); }
    std::size_t idx_out(int j, int l) const {
        return static_cast<std::size_t>(m_ * l_ + j * l_ + l);
    }
    // Action powers: node-major, node 0 = transmitter, node 1+j = relay j.
    std::size_t power_idx(int node, int l) const {
        return static_cast<std::size_t>(node * l_ + l);
    }
    std::size_t node_count() const { return static_cast<std::size_t>(1 + m_); }

    using ObservableProgram::constraints;
    std::size_t constraint_count() const override { return node_count(); }

    /// Carrier capacity through relay j with transmit/relay powers (p0, p1).
    double carrier_capacity(const ChannelSample& h, int j, int l, double p0,
                            double p1) const {
        double g[2] = {h.gains[idx_in(j, l)], h.gains[idx_out(j, l)]};
        double p[2] = {p0, p1};
        return capacity_relay_link(g, p, k_.link);
    }

    double objective(const ChannelSample& h, const Action& a) const override {
        require_csi(h);
        check_action(a);
        int j = a.selections[0];
        double f = 0.0;
        for (int l = 0; l < l_; ++l)
            f += omega_[l] * carrier_capacity(h, j, l, a.powers[power_idx(0, l)],
                                              a.powers[power_idx(1 + j, l)]);
        return f;
    }

    void constraints(const ChannelSample& h, const Action& a,
                     std::span<double> out) const override {
        require_csi(h);
        check_action(a);
        for (std::size_t node = 0; node < node_count(); ++node) {
            double tot = 0.0;
            for (int l = 0; l < l_; ++l) tot += a.powers[power_idx(static_cast<int>(node), l)];
            out[node] = tot - k_.power_total;
        }
    }

    Action primal_argmax(const ChannelSample& h, const DualState& d) const override {
        require_csi(h);
        if (d.lambda.size() != node_count())
            throw std::invalid_argument("joint relay: dual size mismatch");
        Action best;
        best.powers.assign(node_count() * l_, 0.0);
        best.selections.assign(1, 0);
        double best_v = -std::numeric_limits<double>::infinity();
        std::vector<double> p0(l_), p1(l_);
        for (int j = 0; j < m_; ++j) {
            double value = 0.0;
            for (int l = 0; l < l_; ++l) {
                auto [bx, by] = detail::maximize_grid2(
                    [&](double ptx, double prl) {
                        return omega_[l] * carrier_capacity(h, j, l, ptx, prl) -
                               d.lambda[0] * ptx - d.lambda[1 + j] * prl;
                    },
                    k_.power_peak, k_.power_peak);
                p0[l] = bx;
                p1[l] = by;
                value += omega_[l] * carrier_capacity(h, j, l, bx, by) - d.lambda[0] * bx -
                         d.lambda[1 + j] * by;
            }
            if (value > best_v) {
                best_v = value;
                best.selections[0] = j;
                std::fill(best.powers.begin(), best.powers.end(), 0.0);
                for (int l = 0; l < l_; ++l) {
                    best.powers[power_idx(0, l)] = p0[l];
                    best.powers[power_idx(1 + j, l)] = p1[l];
                }
            }
        }
        return best;
    }

    PolicyLayout policy_layout() const override {
        PolicyLayout layout;
        layout.power_peak = k_.power_peak;
        layout.n_powers = node_count() * l_;
        layout.n_selections = 1;
        layout.input_scale.resize(csi_size());
        for (std::size_t i = 0; i < csi_size(); ++i)
            layout.input_scale[i] = 1.0 / topology_.entry_attenuation[i];
        NetLayout net;
        net.hidden = {200, 100};
        net.input_indices.resize(csi_size());
        for (std::size_t i = 0; i < csi_size(); ++i)
            net.input_indices[i] = static_cast<int>(i);
        net.power_action_index.resize(layout.n_powers);
        for (std::size_t i = 0; i < layout.n_powers; ++i)
            net.power_action_index[i] = static_cast<int>(i);
        net.cat_sizes = {m_};
        net.cat_selection_index = {0};
        layout.nets.push_back(std::move(net));
        return layout;
    }

    bool action_feasible(const Action& a) const override {
        if (a.powers.size() != node_count() * static_cast<std::size_t>(l_) ||
            a.selections.size() != 1)
            return false;
        for (double p : a.powers)
            if (!(p >= 0.0 && p <= k_.power_peak * (1.0 + 1e-12))) return false;
        return a.selections[0] >= 0 && a.selections[0] < m_;
    }

private:
    int m_, l_;
    JointRelayConstants k_;

    void check_action(const Action& a) const {
        if (a.powers.size() != node_count() * static_cast<std::size_t>(l_) ||
            a.selections.size() != 1 || a.selections[0] < 0 || a.selections[0] >= m_)
            throw std::invalid_argument("joint relay: malformed action");
    }

    void build_topology(const ChannelConfig& ch, double span_km, double lateral_km,
                        Rng& rng) {
        double dx = 0.5 * span_km;
        topology_.entry_attenuation.resize(2 * m_ * l_);
        for (int j = 0; j < m_; ++j) {
            double y = rng.uniform(-lateral_km, lateral_km);
            double d = std::sqrt(dx * dx + y * y);
            double ha = attenuation(ch.link(d));
            // carriers of one physical link share the path loss
            for (int l = 0; l < l_; ++l) {
                topology_.entry_attenuation[idx_in(j, l)] = ha;
                topology_.entry_attenuation[idx_out(j, l)] = ha;
            }
        }
        topology_.turbulence = ch.turbulence();
    }
};

} // namespace fso

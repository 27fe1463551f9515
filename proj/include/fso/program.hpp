#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fso/channel.hpp"
#include "fso/rng.hpp"

namespace fso {

/// One resource-allocation decision: continuous transmit powers (Watts) plus
/// discrete selections (one chosen index per hop / RRH, -1 meaning "none"
/// where the scenario allows it). Encoding the selections as indices makes
/// the one-choice-per-hop constraint structural.
struct Action {
    std::vector<double> powers;
    std::vector<int> selections;
};

/// Nonnegative multipliers, one per stochastic constraint.
struct DualState {
    std::vector<double> lambda;

    static DualState zeros(std::size_t s) {
        DualState d;
        d.lambda.assign(s, 0.0);
        return d;
    }
};

/// The observation-only view of a problem: black-box values of the objective
/// and constraint functions at a given channel state and action. Model-free
/// solvers are written against this interface and nothing else.
class ObservableProgram {
public:
    virtual ~ObservableProgram() = default;

    virtual std::size_t constraint_count() const = 0;
    virtual double objective(const ChannelSample& h, const Action& a) const = 0;
    /// Writes the S per-sample constraint values (feasible means <= 0 in
    /// expectation) into `out`, which must have constraint_count() entries.
    virtual void constraints(const ChannelSample& h, const Action& a,
                             std::span<double> out) const = 0;

    std::vector<double> constraints(const ChannelSample& h, const Action& a) const {
        std::vector<double> c(constraint_count());
        constraints(h, a, c);
        return c;
    }
};

/// How a scenario wants its policy networks wired: which CSI entries feed
/// each net, the hidden sizes, and how net outputs map onto action
/// coordinates. Output packing per net: first (mean, spread) pairs for the
/// power heads in listed order, then the logit blocks of the selection heads.
struct NetLayout {
    std::vector<int> hidden;
    std::vector<int> input_indices;
    std::vector<int> power_action_index; ///< action.powers slot per power head
    std::vector<int> cat_sizes;          ///< logits per selection head
    std::vector<int> cat_selection_index;
    bool cat_allow_none = false; ///< last category maps to "no selection"

    int output_dim() const {
        int d = 2 * static_cast<int>(power_action_index.size());
        for (int k : cat_sizes) d += k;
        return d;
    }
};

struct PolicyLayout {
    std::vector<NetLayout> nets;
    std::vector<double> input_scale; ///< per CSI entry; 1 / mean gain
    double power_peak = 0.0;         ///< P_s, the support of every power head
    std::size_t n_powers = 0;
    std::size_t n_selections = 0;
};

/// A concrete constrained stochastic program: expected-objective
/// maximization over actions from CSI, subject to S expected-value
/// constraints and a structural action set. Immutable after construction;
/// all evaluators are pure.
class ProgramInstance : public ObservableProgram {
public:
    explicit ProgramInstance(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    const Topology& topology() const { return topology_; }
    std::size_t csi_size() const { return topology_.size(); }
    const std::vector<double>& weights() const { return omega_; }

    /// Per-sample maximizer of the Lagrangian f - lambda . c over the action
    /// set; the primal step of the dual-gradient solver.
    virtual Action primal_argmax(const ChannelSample& h, const DualState& d) const = 0;

    virtual PolicyLayout policy_layout() const = 0;

    /// Structural feasibility: power box plus selection-range rules.
    virtual bool action_feasible(const Action& a) const = 0;

    /// Draw one CSI sample; when a fixed state pool is installed the draw is
    /// uniform over the pool (used by desk-scale oracle experiments).
    ChannelSample draw_csi(Rng& rng) const {
        if (!fixed_states_.empty())
            return fixed_states_[rng.below(fixed_states_.size())];
        return sample_csi(topology_, rng);
    }

    void set_fixed_states(std::vector<ChannelSample> states) {
        for (const auto& s : states)
            if (s.gains.size() != topology_.size())
                throw std::invalid_argument("fixed state shape mismatch");
        fixed_states_ = std::move(states);
    }
    const std::vector<ChannelSample>& fixed_states() const { return fixed_states_; }

protected:
    std::string name_;
    Topology topology_;
    std::vector<double> omega_;
    std::vector<ChannelSample> fixed_states_;

    void require_csi(const ChannelSample& h) const {
        if (h.gains.size() != topology_.size())
            throw std::invalid_argument(name_ + ": CSI size mismatch");
    }
};

/// Channel-model inputs shared by every scenario (weather, optics,
/// turbulence). Geometry is per-scenario and passed separately.
struct ChannelConfig {
    double alpha_db_per_km = 4.5;
    double wavelength_m = 1550e-9;
    double aperture_tx_m2 = 1.7671458676442586e-4; ///< circular, D_tx = 0.015 m
    double aperture_rx_m2 = 1.9634954084936210e-3; ///< circular, D_rx = 0.05 m
    double sigma_x = 0.2;
    bool normalize_mean = true;

    AttenuationParams link(double distance_km) const {
        AttenuationParams a;
        a.alpha_db_per_km = alpha_db_per_km;
        a.distance_km = distance_km;
        a.wavelength_m = wavelength_m;
        a.aperture_tx_m2 = aperture_tx_m2;
        a.aperture_rx_m2 = aperture_rx_m2;
        return a;
    }
    TurbulenceParams turbulence() const { return {sigma_x, normalize_mean}; }
};

namespace consts {
inline constexpr double kElectronCharge = 1.602176634e-19;
inline constexpr double kBoltzmann = 1.380649e-23;
} // namespace consts

} // namespace fso

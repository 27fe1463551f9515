#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fso/rng.hpp"

namespace fso {

/// Deterministic path-loss parameters of one optical link.
///
/// Configuration units are km and dB/km (the usual link-budget units); the
/// evaluation converts to meters and nepers internally. Aperture areas are
/// plain areas in m^2 -- when only diameters are known, circular apertures
/// pi*(D/2)^2 are assumed (the diameters quoted for this system do not come
/// with a shape, so this is a documented assumption).
struct AttenuationParams {
    double alpha_db_per_km = 0.0; ///< weather attenuation coefficient
    double distance_km = 1.0;
    double wavelength_m = 1550e-9;
    double aperture_tx_m2 = 0.0;
    double aperture_rx_m2 = 0.0;

    void validate() const {
        if (alpha_db_per_km < 0.0) throw std::invalid_argument("attenuation: alpha < 0");
        if (distance_km <= 0.0) throw std::invalid_argument("attenuation: distance <= 0");
        if (wavelength_m <= 0.0) throw std::invalid_argument("attenuation: wavelength <= 0");
        if (aperture_tx_m2 <= 0.0 || aperture_rx_m2 <= 0.0)
            throw std::invalid_argument("attenuation: aperture area <= 0");
    }
};

/// Log-normal turbulence: a gain factor exp(2X) with X ~ Normal(mu_x, sigma_x^2).
/// With normalize_mean the location is fixed at mu_x = -sigma_x^2 so that
/// E[exp(2X)] = 1 and turbulence is a pure fluctuation around the path loss.
struct TurbulenceParams {
    double sigma_x = 0.2;
    bool normalize_mean = true;

    void validate() const {
        if (sigma_x < 0.0) throw std::invalid_argument("turbulence: sigma_x < 0");
    }
    double mu_x() const { return normalize_mean ? -sigma_x * sigma_x : 0.0; }
};

/// One i.i.d. draw of channel state: nonnegative gains, one per link entry.
/// The owning scenario defines the index layout.
struct ChannelSample {
    std::vector<double> gains;
};

/// Path-loss gain A_t*A_r*exp(-alpha*d) / (d^2 * lambda^2), dimensionless.
inline double attenuation(const AttenuationParams& p) {
    p.validate();
    // dB -> nepers: divide by 10*log10(e) = 4.3429448...
    double alpha_np_per_m = p.alpha_db_per_km / (10.0 / std::log(10.0)) / 1000.0;
    double d = p.distance_km * 1000.0;
    return p.aperture_tx_m2 * p.aperture_rx_m2 * std::exp(-alpha_np_per_m * d) /
           (d * d * p.wavelength_m * p.wavelength_m);
}

/// One turbulence factor exp(2X).
inline double sample_turbulence(const TurbulenceParams& t, Rng& rng) {
    t.validate();
    if (t.sigma_x == 0.0) {
        rng.normal(); // keep the stream position independent of sigma_x
        return 1.0;
    }
    return std::exp(2.0 * rng.normal(t.mu_x(), t.sigma_x));
}

/// Per-link deterministic gains plus the shared turbulence model. Scenarios
/// build one of these from node geometry; `entry_attenuation[i]` is the path
/// loss of link entry i (carriers of one physical link repeat the same value).
struct Topology {
    std::vector<double> entry_attenuation;
    TurbulenceParams turbulence;

    std::size_t size() const { return entry_attenuation.size(); }
};

/// Draw one CSI sample: gain[i] = attenuation[i] * independent turbulence.
inline ChannelSample sample_csi(const Topology& topo, Rng& rng) {
    ChannelSample s;
    s.gains.resize(topo.size());
    for (std::size_t i = 0; i < topo.size(); ++i)
        s.gains[i] = topo.entry_attenuation[i] * sample_turbulence(topo.turbulence, rng);
    return s;
}

} // namespace fso

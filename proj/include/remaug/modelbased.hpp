#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "remaug/core.hpp"

namespace remaug {

/// One receiver's view of the unknown transmitter.
struct ReceiverObservation {
    double x = 0.0;
    double y = 0.0;
    double p_avg_dbm = 0.0;  // averaged RSS
    std::vector<Eigen::Vector2cd> snapshots;  // AOA only
    std::optional<double> snr_linear;         // SNR fusion only

    void validate() const;
};

struct LocalizationEstimate {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> p_t_dbm;
    double residual_norm = 0.0;
    std::string method;
    bool low_confidence = false;
};

/// RSS localization: least squares on the linearized log-distance model with
/// unknowns (10^{P_t/5p}, x_t, y_t, x_t^2+y_t^2). Needs >= 4 distinct,
/// non-collinear receivers; recovers power and position exactly on noiseless
/// model data.
LocalizationEstimate localize_rss(const std::vector<ReceiverObservation>& obs,
                                  const PropagationParams& prop);

/// RSSD localization from pairwise power differences against the strongest
/// receiver; transmit power cancels. Needs >= 4 receivers.
LocalizationEstimate localize_rssd(const std::vector<ReceiverObservation>& obs,
                                   const PropagationParams& prop);

/// MUSIC direction estimate over a candidate grid (degrees, within
/// [-90, 90] where the 2-element steering vector is unambiguous; resolution
/// must be <= 1 degree). Returns the grid argmax of the pseudo-spectrum.
double estimate_aoa(const std::vector<Eigen::Vector2cd>& snapshots,
                    const std::vector<double>& candidates_deg);

/// Default MUSIC candidate grid: [-90, 90] in `step_deg` steps.
std::vector<double> aoa_candidate_grid(double step_deg = 0.5);

/// AOA localization: per-receiver MUSIC bearing + power-inverted range, fused
/// by least squares on the bearing lines. One receiver falls back to the
/// direct bearing+range estimate, flagged low-confidence.
LocalizationEstimate localize_aoa(const std::vector<ReceiverObservation>& obs,
                                  const PropagationParams& prop, double p_t_dbm,
                                  double freq_mhz, double fading_const = 1.0,
                                  const std::vector<double>& candidates_deg = aoa_candidate_grid());

/// SNR-weighted fusion of location estimates: coordinate-wise mean with
/// weights Gamma_i / sum(Gamma).
LocalizationEstimate fuse_snr(const std::vector<LocalizationEstimate>& estimates,
                              const std::vector<double>& gammas);

/// Okumura-Hata style propagation model with optional directional antenna.
/// Distances enter the log terms in km (floored at 1 m); f in MHz, heights m.
struct StmParams {
    double a0 = 69.55;
    double a1 = 44.9;
    double a2 = 13.82;
    double a3 = 6.55;
    double l_d = 0.0;  // diffraction loss, dB
    double l_c = 0.0;  // clutter loss, dB
    double p_t = 40.0; // dBm
    double h_m = 1.5;  // mobile height, m (not calibrated)
    std::optional<AntennaPattern> antenna;

    struct Bound {
        double lo = 0.0;
        double hi = 0.0;
    };
    /// Per-parameter search bounds; zero-width pins the parameter. Antenna
    /// bounds apply to (theta_azi, phi_tilt) when a pattern is present.
    struct Bounds {
        Bound a0, a1, a2, a3, l_d, l_c, p_t;
        Bound theta_azi, phi_tilt;
    };
    Bounds bounds;

    /// Bounds pinned at the current values (nothing calibrated).
    void pin_all_bounds();
};

/// Received power (dBm) at the target under the calibrated model.
double stm_predict(const StmParams& params, const Transmitter& tx, Point2 target);

struct StmFit {
    StmParams params;
    double rmse = 0.0;  // dB
};

/// Self-tuning calibration: deterministic 8-start pattern search over the
/// bounded parameters, minimizing the RMSE between measured and predicted
/// signal strengths.
StmFit stm_calibrate(const SampleSet& samples, const Transmitter& tx, const StmParams& init);

}  // namespace remaug

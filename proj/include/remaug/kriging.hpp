#pragma once

#include <vector>

#include "remaug/core.hpp"
#include "remaug/interpolate.hpp"

namespace remaug {

struct EmpiricalVariogram {
    std::vector<double> lag_centers;  // meters, strictly increasing
    std::vector<double> gamma_hat;    // dB^2
    std::vector<long> pair_counts;

    size_t bins() const { return lag_centers.size(); }
};

enum class VariogramKind { Exponential, Spherical, Gaussian };

/// Fitted theoretical semivariogram. gamma(0) = 0; gamma -> sill as h grows.
struct Variogram {
    VariogramKind kind = VariogramKind::Exponential;
    double nugget = 0.0;  // dB^2, >= 0
    double sill = 1.0;    // dB^2, >= nugget
    double range = 1.0;   // meters, > 0

    void validate() const;
    double operator()(double h) const;
};

struct KrigingConfig {
    int n_lags = 15;                 // >= 3
    double max_lag_fraction = 0.5;   // of the sample-domain diameter
    Neighborhood neighborhood = KNearest{32};
    enum class FitWeighting { PairCount, Equal };
    FitWeighting fit_weighting = FitWeighting::PairCount;

    void validate() const;
};

/// Matheron estimator on equal-width lag bins; empty bins are dropped.
EmpiricalVariogram empirical_variogram(const SampleSet& s, const KrigingConfig& cfg = {});

struct VariogramFit {
    Variogram variogram;
    bool fallback = false;    // weighted fit failed, heuristic defaults used
    bool degenerate = false;  // all-zero empirical variogram
};

/// Weighted least squares over (nugget, sill, range); best of 10 pattern
/// searches from a deterministic start lattice. pin_nugget_zero constrains
/// the nugget for exact-interpolation use.
VariogramFit fit_variogram(const EmpiricalVariogram& ev, VariogramKind kind,
                           const KrigingConfig& cfg = {}, bool pin_nugget_zero = false);

struct KrigeResult {
    double value = 0.0;     // dBm
    double variance = 0.0;  // dB^2, clipped at 0
    std::vector<double> weights;
    std::vector<int> neighbor_indices;
};

/// Ordinary kriging at one target via the bordered system (unbiasedness row).
KrigeResult krige(const SampleSet& s, Point2 target, const Variogram& vg,
                  const KrigingConfig& cfg = {});

}  // namespace remaug

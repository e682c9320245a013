#pragma once

#include <cstdint>
#include <vector>

#include "remaug/core.hpp"
#include "remaug/rng.hpp"

namespace remaug {

/// Synthetic ground-truth input: grid + transmitters + propagation + seed.
struct Scenario {
    GridSpec grid;
    std::vector<Transmitter> transmitters;
    PropagationParams prop;
    uint64_t seed = 0;

    void validate() const;
};

/// Observation mask: which bins of a full map stay observed.
struct MaskSpec {
    enum class Kind { UniformRandom, ClusterHoles, PathTrace };

    Kind kind = Kind::UniformRandom;
    double fraction = 0.1;        // UniformRandom: keep probability, (0, 1]
    int n_holes = 1;              // ClusterHoles
    double hole_radius_bins = 1;  // ClusterHoles, >= 1
    int n_points = 1;             // PathTrace: walk length
    uint64_t seed = 0;

    static MaskSpec uniform(double fraction, uint64_t seed) {
        MaskSpec m;
        m.kind = Kind::UniformRandom;
        m.fraction = fraction;
        m.seed = seed;
        return m;
    }
    static MaskSpec cluster_holes(int n_holes, double radius_bins, uint64_t seed) {
        MaskSpec m;
        m.kind = Kind::ClusterHoles;
        m.n_holes = n_holes;
        m.hole_radius_bins = radius_bins;
        m.seed = seed;
        return m;
    }
    static MaskSpec path_trace(int n_points, uint64_t seed) {
        MaskSpec m;
        m.kind = Kind::PathTrace;
        m.n_points = n_points;
        m.seed = seed;
        return m;
    }

    void validate() const;
};

/// Exact sampler for a zero-mean Gaussian field with covariance
/// sigma^2 * exp(-d / decorr) on the grid's bin centers. Uses a dense
/// Cholesky factor of the grid covariance, built once and reusable across
/// seeds; grids are capped at kMaxBins bins.
class ShadowingSampler {
public:
    // 16384 bins (~2.1 GB transient factor) is the largest dense factorization
    // that fits comfortably in memory here.
    static constexpr long kMaxBins = 16384;

    ShadowingSampler(const GridSpec& grid, double sigma_db, double decorr_dist_m);

    /// Field draw for the given seed, as an n_rows x n_cols matrix.
    Eigen::MatrixXd sample(uint64_t seed) const;

    bool trivial() const { return sigma_ == 0.0; }

private:
    GridSpec grid_;
    double sigma_;
    Eigen::MatrixXd chol_;  // lower-triangular factor, empty when sigma == 0
};

/// Full (no MISSING) truth map: per bin, the strongest transmitter's
/// p_t + antenna_gain - L - 10 p log10(max(d, cell/2)), plus one shared
/// correlated shadowing field. Identical seed => identical map.
RadioMap generate_truth(const Scenario& s);

/// Same, reusing a prebuilt sampler (must match s.grid/s.prop).
RadioMap generate_truth(const Scenario& s, const ShadowingSampler& shadowing);

/// Deterministic part only (shadowing excluded).
RadioMap generate_mean_field(const Scenario& s);

/// Apply an observation mask; retained values are never altered and at
/// least one bin always stays observed.
RadioMap apply_mask(const RadioMap& map, const MaskSpec& m);

}  // namespace remaug

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "remaug/errors.hpp"

namespace remaug {

// Canonical units everywhere: dBm for power, meters for distance, MHz for
// frequency, degrees for angles.

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Normalize an angle in degrees to (-180, 180].
double normalize_angle_deg(double deg);

/// Missing-cell marker for RadioMap values.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Rectangular binning of the coverage area. Row i advances +y, column j +x.
struct GridSpec {
    double origin_x = 0.0;  // meters
    double origin_y = 0.0;  // meters
    double cell_size = 1.0; // meters, > 0
    int n_rows = 1;
    int n_cols = 1;

    void validate() const;
    long bins() const { return static_cast<long>(n_rows) * n_cols; }
    double width() const { return n_cols * cell_size; }
    double height() const { return n_rows * cell_size; }
    double diameter() const { return std::hypot(width(), height()); }
    bool operator==(const GridSpec&) const = default;
};

/// Center coordinate of bin (i, j): origin + ((j+0.5)·cell, (i+0.5)·cell).
Point2 bin_center(const GridSpec& grid, int i, int j);

/// Gridded map of received power (dBm); NaN entries are MISSING.
struct RadioMap {
    GridSpec grid;
    Eigen::MatrixXd values;  // n_rows x n_cols

    static RadioMap all_missing(const GridSpec& g) {
        RadioMap m;
        m.grid = g;
        m.values = Eigen::MatrixXd::Constant(g.n_rows, g.n_cols, kMissing);
        return m;
    }

    void validate() const;
    bool missing_at(int i, int j) const { return is_missing(values(i, j)); }
    long observed_count() const;
    bool fully_observed() const { return observed_count() == grid.bins(); }
};

struct Sample {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> z;  // elevation, used by GIDS only
    double value = 0.0;       // dBm
};

/// Scattered measurements. Construction pre-averages duplicate positions
/// (within 1e-9 m) so downstream solvers never see coincident points.
class SampleSet {
public:
    SampleSet() = default;
    explicit SampleSet(std::vector<Sample> samples);

    const std::vector<Sample>& samples() const { return samples_; }
    size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const Sample& operator[](size_t k) const { return samples_[k]; }

    /// Axis-aligned bounding box (min, max); errors on empty set.
    std::pair<Point2, Point2> bounding_box() const;

    double value_min() const;
    double value_max() const;

private:
    std::vector<Sample> samples_;
};

struct AntennaPattern {
    enum class Kind { Cosine, ThreeGpp };

    Kind kind = Kind::ThreeGpp;
    double g_max_dbi = 0.0;

    // Cosine form
    double f_theta_db = 0.0;
    double f_phi_db = 0.0;
    double p1 = 2.0;
    double p2 = 2.0;

    // 3GPP form
    double b_theta_deg = 65.0;   // horizontal half-power beamwidth
    double b_phi_deg = 10.0;     // vertical half-power beamwidth
    double a_max_db = 30.0;      // side/back lobe attenuation floor
    double lambda_theta = 0.5;   // paper leaves the weights undefined
    double lambda_phi = 0.5;

    // Orientation, shared by both forms
    double theta_azi_deg = 0.0;
    double phi_tilt_deg = 0.0;

    void validate() const;
};

struct Transmitter {
    double x = 0.0;            // meters
    double y = 0.0;            // meters
    double height_m = 30.0;    // H > 0
    double power_dbm = 40.0;   // P_t
    double freq_mhz = 900.0;   // f > 0
    std::optional<AntennaPattern> antenna;

    void validate() const;
};

/// Log-distance model parameters: P = P_t - L - 10 p log10(d) + shadowing.
struct PropagationParams {
    double intercept_db = 30.0;     // L
    double exponent = 3.0;          // p > 0
    double shadow_sigma_db = 0.0;   // >= 0
    double decorr_dist_m = 100.0;   // > 0

    void validate() const;
};

/// Receiver-side link geometry as seen from a transmitter.
struct LinkGeometry {
    double distance_m = 0.0;   // horizontal distance
    double theta_u_deg = 0.0;  // horizontal angle to user, (-180, 180]
    double phi_u_deg = 0.0;    // vertical angle to user, (-180, 180]
};

/// Geometry from tx to a ground target at the given height (default 0 m).
LinkGeometry link_geometry(const Transmitter& tx, Point2 target, double target_height_m = 0.0);

/// Directional gain (dB) for the configured pattern.
double antenna_gain(const AntennaPattern& a, const LinkGeometry& g);

/// One sample per observed bin, positioned at the bin center.
SampleSet sample_from_map(const RadioMap& map);

}  // namespace remaug

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>
#include <vector>

#include "remaug/core.hpp"

namespace remaug {

// Scattered-data interpolators. All of them answer "value at target" from a
// SampleSet; grid sweeps live in evaluate.cpp. Tie-breaking is always lowest
// sample index.

struct KNearest {
    int n = 1;
};
struct Radius {
    double r_m = 0.0;
};
struct AllSamples {};
using Neighborhood = std::variant<AllSamples, KNearest, Radius>;

/// Indices of the neighborhood samples, ascending by distance to target
/// (ties by index). Empty result is the caller's error to handle.
std::vector<int> select_neighbors(const SampleSet& s, Point2 target, const Neighborhood& hood);

struct IdwConfig {
    double power = 2.0;  // >= 0; 0 degenerates to the moving-average method
    Neighborhood neighborhood = AllSamples{};

    void validate() const;
};

/// Inverse-distance weighting: sum(c_k / d_k^p) / sum(1 / d_k^p).
/// A target coinciding with a sample returns that value exactly.
double idw(const SampleSet& s, Point2 target, const IdwConfig& cfg);

struct AidwCategory {
    double center = 0.0;  // membership center in [0, 1]
    double power = 0.0;   // >= 0
};

struct AidwConfig {
    // Normalization ceiling for the nearest-neighbor statistic R; 2.1491 is
    // its theoretical maximum (perfectly dispersed pattern).
    double r_max = 2.1491;
    std::vector<AidwCategory> categories = {
        {0.00, 0.25}, {0.25, 0.5}, {0.50, 1.0}, {0.75, 2.0}, {1.00, 3.0}};
    int neighborhood = 10;  // >= 2
    double area_m2 = 0.0;   // 0 = derive from the sample bounding box

    void validate() const;
};

/// Triangular membership weights over the category centers for mu in [0, 1].
std::vector<double> aidw_memberships(const AidwConfig& cfg, double mu);

/// Effective IDW power from the spatial pattern of the neighborhood.
double aidw_effective_power(const SampleSet& s, Point2 target, const AidwConfig& cfg);

/// Adaptive IDW: R = r_o / r_e picks the power, then plain IDW evaluates.
double adaptive_idw(const SampleSet& s, Point2 target, const AidwConfig& cfg);

struct GidsConfig {
    int neighborhood = 8;       // >= 4 (>= 5 with elevation)
    bool use_elevation = false;

    void validate() const;
};

/// Gradient-plus-inverse-distance-squared. A rank-deficient local regression
/// falls back to idw(p=2); *used_fallback reports it when non-null.
double gids(const SampleSet& s, Point2 target, const GidsConfig& cfg, bool* used_fallback = nullptr);

struct MsmConfig {
    double r_w_m = 0.0;  // weight cutoff radius, > 0
    double r_v_m = 0.0;  // nodal-fit radius, > 0
    double power = 2.0;  // > 0
    enum class Nodal { Constant, LocalLinear };
    Nodal nodal = Nodal::LocalLinear;

    void validate() const;
};

/// Modified Shepard's method: nodal functions blended with
/// W_k = [(R_w - d_k) / (R_w d_k)]^p inside R_w.
double msm(const SampleSet& s, Point2 target, const MsmConfig& cfg);

/// Value of the nearest sample.
double nearest(const SampleSet& s, Point2 target);

/// Natural-neighbor interpolation with Sibson weights approximated by a
/// discrete Voronoi raster (documented accuracy ~ raster cell / 4). Targets
/// outside the convex hull of the samples raise OutsideHull.
class NaturalNeighbor {
public:
    /// raster_cell_m <= 0 picks bbox_max_extent / 256.
    explicit NaturalNeighbor(const SampleSet& s, double raster_cell_m = 0.0);
    ~NaturalNeighbor();
    NaturalNeighbor(NaturalNeighbor&&) noexcept;
    NaturalNeighbor& operator=(NaturalNeighbor&&) noexcept;

    double at(Point2 target) const;

    /// Sibson weights per sample index (diagnostic / property tests).
    std::vector<double> weights(Point2 target) const;

    bool inside_hull(Point2 p) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper.
double natural_neighbor(const SampleSet& s, Point2 target);

struct TpsConfig {
    double lambda = 0.0;  // ridge on the basis system, >= 0

    void validate() const;
};

/// Thin-plate spline w/ basis |d|^2 ln|d| (0 at d=0), no polynomial term.
/// With lambda = 0 the surface reproduces every sample value at its site.
class TpsModel {
public:
    TpsModel(const SampleSet& s, const TpsConfig& cfg = {});

    double at(Point2 target) const;
    const Eigen::VectorXd& coefficients() const { return w_; }

private:
    std::vector<Point2> sites_;
    Eigen::VectorXd w_;
};

std::vector<double> thin_plate_spline(const SampleSet& s, const std::vector<Point2>& targets,
                                      const TpsConfig& cfg = {});

}  // namespace remaug

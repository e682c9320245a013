#include "remaug/core.hpp"

#include <algorithm>
#include <string>

namespace remaug {

double normalize_angle_deg(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a <= -180.0) a += 360.0;
    if (a > 180.0) a -= 360.0;
    return a;
}

void GridSpec::validate() const {
    if (!(cell_size > 0.0)) throw InvalidInput("GridSpec: cell_size must be > 0");
    if (n_rows < 1 || n_cols < 1) throw InvalidInput("GridSpec: n_rows and n_cols must be >= 1");
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y) || !std::isfinite(cell_size))
        throw InvalidInput("GridSpec: non-finite field");
}

Point2 bin_center(const GridSpec& grid, int i, int j) {
    grid.validate();
    if (i < 0 || i >= grid.n_rows || j < 0 || j >= grid.n_cols)
        throw InvalidInput("bin_center: index (" + std::to_string(i) + "," + std::to_string(j) +
                           ") out of range for " + std::to_string(grid.n_rows) + "x" +
                           std::to_string(grid.n_cols) + " grid");
    return {grid.origin_x + (j + 0.5) * grid.cell_size,
            grid.origin_y + (i + 0.5) * grid.cell_size};
}

void RadioMap::validate() const {
    grid.validate();
    if (values.rows() != grid.n_rows || values.cols() != grid.n_cols)
        throw InvalidInput("RadioMap: value matrix does not match grid dimensions");
    for (int i = 0; i < values.rows(); ++i)
        for (int j = 0; j < values.cols(); ++j)
            if (!is_missing(values(i, j)) && !std::isfinite(values(i, j)))
                throw InvalidInput("RadioMap: non-finite observed entry");
}

long RadioMap::observed_count() const {
    long n = 0;
    for (int i = 0; i < values.rows(); ++i)
        for (int j = 0; j < values.cols(); ++j)
            if (!is_missing(values(i, j))) ++n;
    return n;
}

SampleSet::SampleSet(std::vector<Sample> samples) {
    constexpr double kDupTol = 1e-9;
    for (const Sample& s : samples) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.value) ||
            (s.z && !std::isfinite(*s.z)))
            throw InvalidInput("SampleSet: non-finite sample");
    }
    // Quadratic dedup pass; sample sets here are small enough that this
    // beats the bookkeeping of a spatial index.
    std::vector<Sample> out;
    std::vector<int> counts;
    for (const Sample& s : samples) {
        bool merged = false;
        for (size_t k = 0; k < out.size(); ++k) {
            if (std::abs(out[k].x - s.x) <= kDupTol && std::abs(out[k].y - s.y) <= kDupTol) {
                const int n = counts[k];
                out[k].value = (out[k].value * n + s.value) / (n + 1);
                if (out[k].z && s.z) out[k].z = (*out[k].z * n + *s.z) / (n + 1);
                counts[k] = n + 1;
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back(s);
            counts.push_back(1);
        }
    }
    samples_ = std::move(out);
}

std::pair<Point2, Point2> SampleSet::bounding_box() const {
    if (samples_.empty()) throw InvalidInput("SampleSet: bounding_box of empty set");
    Point2 lo{samples_[0].x, samples_[0].y};
    Point2 hi = lo;
    for (const Sample& s : samples_) {
        lo.x = std::min(lo.x, s.x);
        lo.y = std::min(lo.y, s.y);
        hi.x = std::max(hi.x, s.x);
        hi.y = std::max(hi.y, s.y);
    }
    return {lo, hi};
}

double SampleSet::value_min() const {
    if (samples_.empty()) throw InvalidInput("SampleSet: empty");
    double v = samples_[0].value;
    for (const Sample& s : samples_) v = std::min(v, s.value);
    return v;
}

double SampleSet::value_max() const {
    if (samples_.empty()) throw InvalidInput("SampleSet: empty");
    double v = samples_[0].value;
    for (const Sample& s : samples_) v = std::max(v, s.value);
    return v;
}

void AntennaPattern::validate() const {
    if (kind == Kind::ThreeGpp) {
        if (!(b_theta_deg > 0.0) || !(b_phi_deg > 0.0))
            throw InvalidInput("AntennaPattern: beamwidths must be > 0");
        if (!(a_max_db > 0.0)) throw InvalidInput("AntennaPattern: A_max must be > 0");
        if (lambda_theta < 0.0 || lambda_theta > 1.0 || lambda_phi < 0.0 || lambda_phi > 1.0)
            throw InvalidInput("AntennaPattern: lambda weights must lie in [0,1]");
    } else {
        if (p1 < 0.0 || p2 < 0.0) throw InvalidInput("AntennaPattern: cosine exponents must be >= 0");
    }
}

void Transmitter::validate() const {
    if (!(height_m > 0.0)) throw InvalidInput("Transmitter: height must be > 0");
    if (!(freq_mhz > 0.0)) throw InvalidInput("Transmitter: frequency must be > 0");
    if (!std::isfinite(power_dbm)) throw InvalidInput("Transmitter: non-finite power");
    if (antenna) antenna->validate();
}

void PropagationParams::validate() const {
    if (!(exponent > 0.0)) throw InvalidInput("PropagationParams: exponent must be > 0");
    if (shadow_sigma_db < 0.0) throw InvalidInput("PropagationParams: shadow sigma must be >= 0");
    if (!(decorr_dist_m > 0.0)) throw InvalidInput("PropagationParams: decorrelation distance must be > 0");
}

LinkGeometry link_geometry(const Transmitter& tx, Point2 target, double target_height_m) {
    LinkGeometry g;
    const double dx = target.x - tx.x;
    const double dy = target.y - tx.y;
    g.distance_m = std::hypot(dx, dy);
    g.theta_u_deg = (g.distance_m > 0.0) ? normalize_angle_deg(std::atan2(dy, dx) * 180.0 / M_PI) : 0.0;
    // Vertical angle from the tx horizon to the target; below horizon is negative.
    g.phi_u_deg = normalize_angle_deg(std::atan2(target_height_m - tx.height_m, g.distance_m) * 180.0 / M_PI);
    return g;
}

double antenna_gain(const AntennaPattern& a, const LinkGeometry& g) {
    a.validate();
    const double dtheta = normalize_angle_deg(g.theta_u_deg - a.theta_azi_deg);
    const double dphi = normalize_angle_deg(g.phi_u_deg - a.phi_tilt_deg);
    if (a.kind == AntennaPattern::Kind::ThreeGpp) {
        const double att_phi = std::min(12.0 * (dphi / a.b_phi_deg) * (dphi / a.b_phi_deg), a.a_max_db);
        const double att_theta = std::min(12.0 * (dtheta / a.b_theta_deg) * (dtheta / a.b_theta_deg), a.a_max_db);
        return a.lambda_phi * (a.g_max_dbi - att_phi) + a.lambda_theta * (a.g_max_dbi - att_theta);
    }
    const double ct = std::pow(std::abs(std::cos(dtheta / 2.0 * M_PI / 180.0)), a.p1);
    const double cp = std::pow(std::abs(std::cos(dphi / 2.0 * M_PI / 180.0)), a.p2);
    return a.g_max_dbi - a.f_theta_db + a.f_theta_db * ct - a.f_phi_db + a.f_phi_db * cp;
}

SampleSet sample_from_map(const RadioMap& map) {
    map.validate();
    std::vector<Sample> out;
    for (int i = 0; i < map.grid.n_rows; ++i) {
        for (int j = 0; j < map.grid.n_cols; ++j) {
            if (map.missing_at(i, j)) continue;
            const Point2 c = bin_center(map.grid, i, j);
            out.push_back({c.x, c.y, std::nullopt, map.values(i, j)});
        }
    }
    if (out.empty()) throw InvalidInput("sample_from_map: map has no observed bins");
    return SampleSet(std::move(out));
}

}  // namespace remaug

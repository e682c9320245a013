#include "remaug/scenario.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>

namespace remaug {

void Scenario::validate() const {
    grid.validate();
    prop.validate();
    if (transmitters.empty()) throw InvalidInput("Scenario: at least one transmitter required");
    for (const Transmitter& t : transmitters) t.validate();
}

void MaskSpec::validate() const {
    switch (kind) {
        case Kind::UniformRandom:
            if (!(fraction > 0.0) || fraction > 1.0)
                throw InvalidInput("MaskSpec: fraction must lie in (0, 1]");
            break;
        case Kind::ClusterHoles:
            if (n_holes < 1) throw InvalidInput("MaskSpec: n_holes must be >= 1");
            if (hole_radius_bins < 1.0) throw InvalidInput("MaskSpec: hole radius must be >= 1 bin");
            break;
        case Kind::PathTrace:
            if (n_points < 1) throw InvalidInput("MaskSpec: n_points must be >= 1");
            break;
    }
}

ShadowingSampler::ShadowingSampler(const GridSpec& grid, double sigma_db, double decorr_dist_m)
    : grid_(grid), sigma_(sigma_db) {
    grid.validate();
    if (sigma_db < 0.0) throw InvalidInput("ShadowingSampler: sigma must be >= 0");
    if (!(decorr_dist_m > 0.0)) throw InvalidInput("ShadowingSampler: decorrelation distance must be > 0");
    if (sigma_ == 0.0) return;

    const long n = grid.bins();
    if (n > kMaxBins)
        throw InvalidInput("ShadowingSampler: grid has " + std::to_string(n) +
                           " bins; the exact Cholesky sampler supports at most " +
                           std::to_string(kMaxBins));

    Eigen::MatrixXd cov(n, n);
    const double var = sigma_db * sigma_db;
    for (long a = 0; a < n; ++a) {
        const Point2 pa = bin_center(grid, static_cast<int>(a / grid.n_cols), static_cast<int>(a % grid.n_cols));
        cov(a, a) = var;
        for (long b = a + 1; b < n; ++b) {
            const Point2 pb = bin_center(grid, static_cast<int>(b / grid.n_cols), static_cast<int>(b % grid.n_cols));
            const double c = var * std::exp(-dist(pa, pb) / decorr_dist_m);
            cov(a, b) = c;
            cov(b, a) = c;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(std::move(cov));
    if (llt.info() != Eigen::Success)
        throw ComputeError("ShadowingSampler: covariance factorization failed");
    chol_ = llt.matrixL();
}

Eigen::MatrixXd ShadowingSampler::sample(uint64_t seed) const {
    if (sigma_ == 0.0) return Eigen::MatrixXd::Zero(grid_.n_rows, grid_.n_cols);
    Rng rng = Rng(seed).substream(StreamTag::Shadowing);
    const long n = grid_.bins();
    Eigen::VectorXd z(n);
    for (long k = 0; k < n; ++k) z(k) = rng.normal();
    const Eigen::VectorXd field = chol_ * z;
    Eigen::MatrixXd out(grid_.n_rows, grid_.n_cols);
    for (long k = 0; k < n; ++k)
        out(static_cast<int>(k / grid_.n_cols), static_cast<int>(k % grid_.n_cols)) = field(k);
    return out;
}

RadioMap generate_mean_field(const Scenario& s) {
    s.validate();
    RadioMap map = RadioMap::all_missing(s.grid);
    const double d_floor = s.grid.cell_size / 2.0;
    for (int i = 0; i < s.grid.n_rows; ++i) {
        for (int j = 0; j < s.grid.n_cols; ++j) {
            const Point2 c = bin_center(s.grid, i, j);
            double best = -std::numeric_limits<double>::infinity();
            for (const Transmitter& tx : s.transmitters) {
                const LinkGeometry g = link_geometry(tx, c);
                const double gain = tx.antenna ? antenna_gain(*tx.antenna, g) : 0.0;
                const double d = std::max(g.distance_m, d_floor);
                const double p = tx.power_dbm + gain - s.prop.intercept_db -
                                 10.0 * s.prop.exponent * std::log10(d);
                best = std::max(best, p);
            }
            map.values(i, j) = best;
        }
    }
    return map;
}

RadioMap generate_truth(const Scenario& s, const ShadowingSampler& shadowing) {
    RadioMap map = generate_mean_field(s);
    if (!shadowing.trivial()) map.values += shadowing.sample(s.seed);
    return map;
}

RadioMap generate_truth(const Scenario& s) {
    s.validate();
    const ShadowingSampler sampler(s.grid, s.prop.shadow_sigma_db, s.prop.decorr_dist_m);
    return generate_truth(s, sampler);
}

namespace {

RadioMap masked_from_keep(const RadioMap& map, const std::vector<uint8_t>& keep) {
    RadioMap out = map;
    for (int i = 0; i < map.grid.n_rows; ++i)
        for (int j = 0; j < map.grid.n_cols; ++j)
            if (!keep[static_cast<size_t>(i) * map.grid.n_cols + j]) out.values(i, j) = kMissing;
    return out;
}

long keep_count(const std::vector<uint8_t>& keep) {
    long n = 0;
    for (uint8_t k : keep) n += k;
    return n;
}

std::vector<uint8_t> uniform_keep(const GridSpec& grid, double fraction, Rng rng) {
    std::vector<uint8_t> keep(grid.bins());
    for (auto& k : keep) k = rng.uniform() < fraction ? 1 : 0;
    return keep;
}

std::vector<uint8_t> cluster_keep(const GridSpec& grid, int n_holes, double radius, Rng rng) {
    std::vector<uint8_t> keep(grid.bins(), 1);
    for (int h = 0; h < n_holes; ++h) {
        const long ci = static_cast<long>(rng.uniform_int(grid.n_rows));
        const long cj = static_cast<long>(rng.uniform_int(grid.n_cols));
        for (int i = 0; i < grid.n_rows; ++i)
            for (int j = 0; j < grid.n_cols; ++j)
                if (std::hypot(double(i - ci), double(j - cj)) <= radius)
                    keep[static_cast<size_t>(i) * grid.n_cols + j] = 0;
    }
    return keep;
}

std::vector<uint8_t> path_keep(const GridSpec& grid, int n_points, Rng rng) {
    std::vector<uint8_t> keep(grid.bins(), 0);
    long i = static_cast<long>(rng.uniform_int(grid.n_rows));
    long j = static_cast<long>(rng.uniform_int(grid.n_cols));
    keep[static_cast<size_t>(i) * grid.n_cols + j] = 1;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int step = 1; step < n_points; ++step) {
        const int dir = static_cast<int>(rng.uniform_int(4));
        i = std::clamp(i + di[dir], 0L, static_cast<long>(grid.n_rows - 1));
        j = std::clamp(j + dj[dir], 0L, static_cast<long>(grid.n_cols - 1));
        keep[static_cast<size_t>(i) * grid.n_cols + j] = 1;
    }
    return keep;
}

}  // namespace

RadioMap apply_mask(const RadioMap& map, const MaskSpec& m) {
    map.validate();
    m.validate();
    if (!map.fully_observed()) throw InvalidInput("apply_mask: input map must be fully observed");

    const Rng base(m.seed);
    std::vector<uint8_t> keep;
    constexpr int kMaxRetries = 8;
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
        Rng rng = (attempt == 0) ? base.substream(StreamTag::Mask)
                                 : base.substream(StreamTag::MaskRetry, static_cast<uint64_t>(attempt));
        switch (m.kind) {
            case MaskSpec::Kind::UniformRandom:
                keep = uniform_keep(map.grid, m.fraction, rng);
                break;
            case MaskSpec::Kind::ClusterHoles:
                keep = cluster_keep(map.grid, m.n_holes, m.hole_radius_bins, rng);
                break;
            case MaskSpec::Kind::PathTrace:
                keep = path_keep(map.grid, m.n_points, rng);
                break;
        }
        if (keep_count(keep) >= 1) return masked_from_keep(map, keep);
    }
    // Resampling cannot help (e.g. a hole radius covering the whole grid):
    // force one deterministic-random bin to stay observed.
    Rng rng = base.substream(StreamTag::MaskRetry, 0xfeedULL);
    keep.assign(map.grid.bins(), 0);
    keep[rng.uniform_int(static_cast<uint64_t>(map.grid.bins()))] = 1;
    return masked_from_keep(map, keep);
}

}  // namespace remaug

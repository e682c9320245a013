#include "remaug/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace remaug {

namespace {
constexpr double kCoincide = 1e-9;  // meters; matches SampleSet dedup tolerance
}

std::vector<int> select_neighbors(const SampleSet& s, Point2 target, const Neighborhood& hood) {
    std::vector<std::pair<double, int>> by_dist;
    by_dist.reserve(s.size());
    for (size_t k = 0; k < s.size(); ++k)
        by_dist.emplace_back(dist({s[k].x, s[k].y}, target), static_cast<int>(k));
    std::sort(by_dist.begin(), by_dist.end());

    std::vector<int> out;
    if (std::holds_alternative<AllSamples>(hood)) {
        for (auto& [d, k] : by_dist) out.push_back(k);
    } else if (const KNearest* kn = std::get_if<KNearest>(&hood)) {
        const int n = std::min<int>(kn->n, static_cast<int>(by_dist.size()));
        for (int i = 0; i < n; ++i) out.push_back(by_dist[i].second);
    } else {
        const double r = std::get<Radius>(hood).r_m;
        for (auto& [d, k] : by_dist)
            if (d <= r) out.push_back(k);
    }
    return out;
}

void IdwConfig::validate() const {
    if (power < 0.0) throw InvalidInput("IdwConfig: power must be >= 0");
    if (const KNearest* kn = std::get_if<KNearest>(&neighborhood); kn && kn->n < 1)
        throw InvalidInput("IdwConfig: KNearest n must be >= 1");
    if (const Radius* r = std::get_if<Radius>(&neighborhood); r && !(r->r_m > 0.0))
        throw InvalidInput("IdwConfig: radius must be > 0");
}

namespace {

double idw_over(const SampleSet& s, const std::vector<int>& hood, Point2 target, double power) {
    double num = 0.0, den = 0.0;
    for (int k : hood) {
        const double d = dist({s[k].x, s[k].y}, target);
        if (d <= kCoincide) return s[k].value;  // exact hit; lowest index wins via sort order
        const double w = 1.0 / std::pow(d, power);
        num += w * s[k].value;
        den += w;
    }
    return num / den;
}

}  // namespace

double idw(const SampleSet& s, Point2 target, const IdwConfig& cfg) {
    cfg.validate();
    if (s.empty()) throw InvalidInput("idw: empty sample set");
    const std::vector<int> hood = select_neighbors(s, target, cfg.neighborhood);
    if (hood.empty()) throw InvalidInput("idw: no sample in the configured neighborhood");
    return idw_over(s, hood, target, cfg.power);
}

void AidwConfig::validate() const {
    if (!(r_max > 0.0)) throw InvalidInput("AidwConfig: r_max must be > 0");
    if (neighborhood < 2) throw InvalidInput("AidwConfig: neighborhood must be >= 2");
    if (categories.size() < 2) throw InvalidInput("AidwConfig: need at least two categories");
    for (size_t i = 0; i < categories.size(); ++i) {
        if (categories[i].power < 0.0) throw InvalidInput("AidwConfig: powers must be >= 0");
        if (i > 0 && !(categories[i].center > categories[i - 1].center))
            throw InvalidInput("AidwConfig: category centers must be strictly increasing");
    }
    if (categories.front().center != 0.0 || categories.back().center != 1.0)
        throw InvalidInput("AidwConfig: category centers must span [0, 1]");
}

std::vector<double> aidw_memberships(const AidwConfig& cfg, double mu) {
    cfg.validate();
    mu = std::clamp(mu, 0.0, 1.0);
    std::vector<double> w(cfg.categories.size(), 0.0);
    for (size_t i = 0; i + 1 < cfg.categories.size(); ++i) {
        const double a = cfg.categories[i].center;
        const double b = cfg.categories[i + 1].center;
        if (mu >= a && mu <= b) {
            const double t = (mu - a) / (b - a);
            w[i] = 1.0 - t;
            w[i + 1] = t;
            return w;
        }
    }
    w.back() = 1.0;
    return w;
}

double aidw_effective_power(const SampleSet& s, Point2 target, const AidwConfig& cfg) {
    cfg.validate();
    if (s.size() < 2) throw InvalidInput("adaptive_idw: need at least 2 samples");

    double area = cfg.area_m2;
    if (area <= 0.0) {
        const auto [lo, hi] = s.bounding_box();
        area = (hi.x - lo.x) * (hi.y - lo.y);
        if (!(area > 0.0)) throw InvalidInput("adaptive_idw: degenerate sample bounding box; set area_m2");
    }

    const std::vector<int> hood =
        select_neighbors(s, target, KNearest{std::max(cfg.neighborhood, 2)});

    // Observed mean nearest-neighbor distance over the local pattern.
    double r_o = 0.0;
    for (int k : hood) {
        double dmin = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < s.size(); ++j) {
            if (static_cast<int>(j) == k) continue;
            dmin = std::min(dmin, dist({s[k].x, s[k].y}, {s[j].x, s[j].y}));
        }
        r_o += dmin;
    }
    r_o /= hood.size();

    const double r_e = 1.0 / (2.0 * std::sqrt(static_cast<double>(s.size()) / area));
    const double big_r = r_o / r_e;
    const double mu = std::min(big_r, cfg.r_max) / cfg.r_max;

    const std::vector<double> w = aidw_memberships(cfg, mu);
    double p = 0.0;
    for (size_t i = 0; i < w.size(); ++i) p += w[i] * cfg.categories[i].power;
    return p;
}

double adaptive_idw(const SampleSet& s, Point2 target, const AidwConfig& cfg) {
    const double p = aidw_effective_power(s, target, cfg);
    IdwConfig idw_cfg;
    idw_cfg.power = p;
    idw_cfg.neighborhood = KNearest{cfg.neighborhood};
    return idw(s, target, idw_cfg);
}

void GidsConfig::validate() const {
    const int min_n = use_elevation ? 5 : 4;
    if (neighborhood < min_n)
        throw InvalidInput("GidsConfig: neighborhood must be >= " + std::to_string(min_n));
}

double gids(const SampleSet& s, Point2 target, const GidsConfig& cfg, bool* used_fallback) {
    cfg.validate();
    if (used_fallback) *used_fallback = false;
    if (static_cast<int>(s.size()) < cfg.neighborhood)
        throw InvalidInput("gids: fewer samples than the configured neighborhood");
    if (cfg.use_elevation)
        for (const Sample& smp : s.samples())
            if (!smp.z) throw InvalidInput("gids: elevation requested but samples lack z");

    const std::vector<int> hood = select_neighbors(s, target, KNearest{cfg.neighborhood});
    for (int k : hood)
        if (dist({s[k].x, s[k].y}, target) <= kCoincide) return s[k].value;

    const int n = static_cast<int>(hood.size());
    const int cols = cfg.use_elevation ? 4 : 3;
    Eigen::MatrixXd x(n, cols);
    Eigen::VectorXd c(n);
    for (int r = 0; r < n; ++r) {
        const Sample& smp = s[hood[r]];
        x(r, 0) = 1.0;
        x(r, 1) = smp.x;
        x(r, 2) = smp.y;
        if (cfg.use_elevation) x(r, 3) = *smp.z;
        c(r) = smp.value;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-9);
    if (qr.rank() < cols) {
        if (used_fallback) *used_fallback = true;
        IdwConfig fb;
        fb.power = 2.0;
        fb.neighborhood = KNearest{cfg.neighborhood};
        return idw(s, target, fb);
    }
    const Eigen::VectorXd beta = qr.solve(c);
    const double grad_x = beta(1), grad_y = beta(2);
    const double grad_z = cfg.use_elevation ? beta(3) : 0.0;

    double num = 0.0, den = 0.0;
    for (int k : hood) {
        const Sample& smp = s[k];
        const double d = dist({smp.x, smp.y}, target);
        const double corrected = smp.value + grad_x * (target.x - smp.x) + grad_y * (target.y - smp.y) +
                                 (cfg.use_elevation ? grad_z * (0.0 - *smp.z) : 0.0);
        const double w = 1.0 / (d * d);
        num += w * corrected;
        den += w;
    }
    return num / den;
}

void MsmConfig::validate() const {
    if (!(r_w_m > 0.0) || !(r_v_m > 0.0)) throw InvalidInput("MsmConfig: radii must be > 0");
    if (!(power > 0.0)) throw InvalidInput("MsmConfig: power must be > 0");
}

namespace {

// Nodal function anchored at (D_k, c_k): c_k plus a least-squares plane of the
// residuals over samples within R_v. Anchoring keeps Q_k(D_k) == c_k, so the
// blend stays an exact interpolator at sample sites.
double msm_nodal_at(const SampleSet& s, int k, Point2 eval, const MsmConfig& cfg) {
    if (cfg.nodal == MsmConfig::Nodal::Constant) return s[k].value;

    std::vector<int> in_range;
    for (size_t j = 0; j < s.size(); ++j)
        if (static_cast<int>(j) != k &&
            dist({s[j].x, s[j].y}, {s[k].x, s[k].y}) <= cfg.r_v_m)
            in_range.push_back(static_cast<int>(j));
    if (in_range.size() < 2) return s[k].value;  // constant fallback below 3 in-range points

    Eigen::MatrixXd a(in_range.size(), 2);
    Eigen::VectorXd r(in_range.size());
    for (size_t row = 0; row < in_range.size(); ++row) {
        const Sample& smp = s[in_range[row]];
        a(row, 0) = smp.x - s[k].x;
        a(row, 1) = smp.y - s[k].y;
        r(row) = smp.value - s[k].value;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-9);
    if (qr.rank() < 2) return s[k].value;
    const Eigen::Vector2d g = qr.solve(r);
    return s[k].value + g(0) * (eval.x - s[k].x) + g(1) * (eval.y - s[k].y);
}

}  // namespace

double msm(const SampleSet& s, Point2 target, const MsmConfig& cfg) {
    cfg.validate();
    if (s.empty()) throw InvalidInput("msm: empty sample set");

    double num = 0.0, den = 0.0;
    bool any = false;
    for (size_t k = 0; k < s.size(); ++k) {
        const double d = dist({s[k].x, s[k].y}, target);
        if (d <= kCoincide) return msm_nodal_at(s, static_cast<int>(k), target, cfg);
        if (d >= cfg.r_w_m) continue;
        const double w = std::pow((cfg.r_w_m - d) / (cfg.r_w_m * d), cfg.power);
        num += w * msm_nodal_at(s, static_cast<int>(k), target, cfg);
        den += w;
        any = true;
    }
    if (!any) throw InvalidInput("msm: no sample within R_w of the target");
    return num / den;
}

double nearest(const SampleSet& s, Point2 target) {
    if (s.empty()) throw InvalidInput("nearest: empty sample set");
    int best = 0;
    double best_d = dist({s[0].x, s[0].y}, target);
    for (size_t k = 1; k < s.size(); ++k) {
        const double d = dist({s[k].x, s[k].y}, target);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return s[best].value;
}

// ---------------------------------------------------------------------------
// Natural neighbor
// ---------------------------------------------------------------------------

namespace {

// Convex hull (Andrew monotone chain), counter-clockwise, no duplicates.
std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const auto cross = [](Point2 o, Point2 a, Point2 b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    if (pts.size() < 3) return pts;
    std::vector<Point2> h(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

struct NaturalNeighbor::Impl {
    std::vector<Point2> pos;
    std::vector<double> val;
    std::vector<Point2> hull;
    double scale = 1.0;

    // raster geometry
    double cell = 1.0;
    double ox = 0.0, oy = 0.0;  // pixel (0,0) center = (ox + cell/2, oy + cell/2)

    // bucket grid for nearest-sample queries
    double bx = 0.0, by = 0.0, bcell = 1.0;
    int bnx = 1, bny = 1;
    std::vector<std::vector<int>> buckets;

    int nearest_sample_brute(double qx, double qy) const {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < pos.size(); ++k) {
            const double dx = pos[k].x - qx, dy = pos[k].y - qy;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = static_cast<int>(k);
            }
        }
        return best;
    }

    int nearest_sample(double qx, double qy) const {
        // The ring lower bound below assumes the query lies inside the bucket
        // grid; queries outside it fall back to a linear scan.
        if (qx < bx || qy < by || qx > bx + bnx * bcell || qy > by + bny * bcell)
            return nearest_sample_brute(qx, qy);
        int cx = std::clamp(static_cast<int>((qx - bx) / bcell), 0, bnx - 1);
        int cy = std::clamp(static_cast<int>((qy - by) / bcell), 0, bny - 1);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int ring = 0; ring < std::max(bnx, bny) + 1; ++ring) {
            // Once a candidate is found, one extra ring guarantees correctness.
            bool scanned_any = false;
            for (int iy = cy - ring; iy <= cy + ring; ++iy) {
                if (iy < 0 || iy >= bny) continue;
                for (int ix = cx - ring; ix <= cx + ring; ++ix) {
                    if (ix < 0 || ix >= bnx) continue;
                    if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
                    scanned_any = true;
                    for (int k : buckets[static_cast<size_t>(iy) * bnx + ix]) {
                        const double dx = pos[k].x - qx, dy = pos[k].y - qy;
                        const double d2 = dx * dx + dy * dy;
                        if (d2 < best_d2 || (d2 == best_d2 && k < best)) {
                            best_d2 = d2;
                            best = k;
                        }
                    }
                }
            }
            if (best >= 0) {
                // Safe stop: any sample in a farther ring is at least
                // (ring-1)*bcell away from the query.
                const double safe = (ring > 0 ? (ring - 1) : 0) * bcell;
                if (safe * safe >= best_d2) break;
            }
            if (!scanned_any && best >= 0) break;
        }
        return best;
    }

    bool inside_hull_strict(Point2 p) const {
        if (hull.size() < 3) return false;
        const double tol = 1e-12 * scale;
        for (size_t i = 0; i < hull.size(); ++i) {
            const Point2 a = hull[i], b = hull[(i + 1) % hull.size()];
            const double c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            if (c <= tol) return false;
        }
        return true;
    }

    std::vector<double> sibson_weights(Point2 t) const {
        std::vector<double> w(pos.size(), 0.0);
        // Pixel holding the target.
        const long ti = std::lround(std::floor((t.x - ox) / cell));
        const long tj = std::lround(std::floor((t.y - oy) / cell));
        long total = 0;
        int empty_rings = 0;
        // A stolen region never extends past the inserted cell, which for an
        // in-hull target is bounded by the data extent; 4x is generous.
        const long max_ring = std::lround(4.0 * scale / cell) + 4;
        for (long ring = 0; ring <= max_ring; ++ring) {
            bool stole = false;
            for (long jy = tj - ring; jy <= tj + ring; ++jy) {
                for (long jx = ti - ring; jx <= ti + ring; ++jx) {
                    if (std::max(std::abs(jx - ti), std::abs(jy - tj)) != ring) continue;
                    const double qx = ox + (jx + 0.5) * cell;
                    const double qy = oy + (jy + 0.5) * cell;
                    const int k = nearest_sample(qx, qy);
                    const double dtx = qx - t.x, dty = qy - t.y;
                    const double d2t = dtx * dtx + dty * dty;
                    const double dsx = qx - pos[k].x, dsy = qy - pos[k].y;
                    const double d2s = dsx * dsx + dsy * dsy;
                    if (d2t < d2s) {
                        w[k] += 1.0;
                        ++total;
                        stole = true;
                    }
                }
            }
            if (stole) {
                empty_rings = 0;
            } else if (ring > 0) {
                // The inserted Voronoi cell is convex, so two consecutive
                // pixel rings without a stolen pixel end the scan.
                if (++empty_rings >= 2) break;
            }
        }
        if (total == 0) {
            // Target sits in a sliver thinner than a pixel; weight the owner
            // of its own pixel.
            const int k = nearest_sample(t.x, t.y);
            w[k] = 1.0;
            total = 1;
        }
        for (double& x : w) x /= static_cast<double>(total);
        return w;
    }
};

NaturalNeighbor::NaturalNeighbor(const SampleSet& s, double raster_cell_m)
    : impl_(std::make_unique<Impl>()) {
    if (s.size() < 3) throw InvalidInput("natural_neighbor: need at least 3 samples");
    for (size_t k = 0; k < s.size(); ++k) {
        impl_->pos.push_back({s[k].x, s[k].y});
        impl_->val.push_back(s[k].value);
    }
    impl_->hull = convex_hull(impl_->pos);
    if (impl_->hull.size() < 3)
        throw InvalidInput("natural_neighbor: degenerate (collinear) sample set");

    const auto [lo, hi] = s.bounding_box();
    const double ext = std::max(hi.x - lo.x, hi.y - lo.y);
    impl_->scale = ext;
    impl_->cell = raster_cell_m > 0.0 ? raster_cell_m : ext / 256.0;
    // Anchor the raster to the bounding box so translated inputs rasterize
    // identically; rings extend beyond it as far as stolen cells reach.
    impl_->ox = lo.x;
    impl_->oy = lo.y;

    // Sample buckets sized for ~2 samples per cell.
    const double bcell = std::max(ext / std::max(1.0, std::sqrt(static_cast<double>(s.size()) / 2.0)),
                                  1e-9);
    impl_->bcell = bcell;
    impl_->bx = lo.x;
    impl_->by = lo.y;
    impl_->bnx = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / bcell)) + 1);
    impl_->bny = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / bcell)) + 1);
    impl_->buckets.assign(static_cast<size_t>(impl_->bnx) * impl_->bny, {});
    for (size_t k = 0; k < impl_->pos.size(); ++k) {
        const int ix = std::clamp(static_cast<int>((impl_->pos[k].x - lo.x) / bcell), 0, impl_->bnx - 1);
        const int iy = std::clamp(static_cast<int>((impl_->pos[k].y - lo.y) / bcell), 0, impl_->bny - 1);
        impl_->buckets[static_cast<size_t>(iy) * impl_->bnx + ix].push_back(static_cast<int>(k));
    }
}

NaturalNeighbor::~NaturalNeighbor() = default;
NaturalNeighbor::NaturalNeighbor(NaturalNeighbor&&) noexcept = default;
NaturalNeighbor& NaturalNeighbor::operator=(NaturalNeighbor&&) noexcept = default;

bool NaturalNeighbor::inside_hull(Point2 p) const { return impl_->inside_hull_strict(p); }

std::vector<double> NaturalNeighbor::weights(Point2 target) const {
    for (size_t k = 0; k < impl_->pos.size(); ++k) {
        if (dist(impl_->pos[k], target) <= kCoincide) {
            std::vector<double> w(impl_->pos.size(), 0.0);
            w[k] = 1.0;
            return w;
        }
    }
    if (!impl_->inside_hull_strict(target))
        throw OutsideHull("natural_neighbor: target outside the convex hull of the samples");
    return impl_->sibson_weights(target);
}

double NaturalNeighbor::at(Point2 target) const {
    const std::vector<double> w = weights(target);
    double v = 0.0;
    for (size_t k = 0; k < w.size(); ++k) v += w[k] * impl_->val[k];
    return v;
}

double natural_neighbor(const SampleSet& s, Point2 target) {
    return NaturalNeighbor(s).at(target);
}

// ---------------------------------------------------------------------------
// Thin-plate spline
// ---------------------------------------------------------------------------

void TpsConfig::validate() const {
    if (lambda < 0.0) throw InvalidInput("TpsConfig: lambda must be >= 0");
}

namespace {
double tps_basis(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }
}  // namespace

TpsModel::TpsModel(const SampleSet& s, const TpsConfig& cfg) {
    cfg.validate();
    if (s.size() < 3) throw InvalidInput("thin_plate_spline: need at least 3 distinct samples");
    const int n = static_cast<int>(s.size());
    for (int k = 0; k < n; ++k) sites_.push_back({s[k].x, s[k].y});

    Eigen::MatrixXd o(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs(i) = s[i].value;
        o(i, i) = cfg.lambda;
        for (int j = i + 1; j < n; ++j) {
            const double v = tps_basis(dist(sites_[i], sites_[j]));
            o(i, j) = v;
            o(j, i) = v;
        }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(o);
    if (!lu.isInvertible())
        throw ComputeError(
            "thin_plate_spline: singular basis system; retry with a small ridge (lambda > 0)");
    w_ = lu.solve(rhs);
    if (cfg.lambda == 0.0) {
        const double range = std::max(1.0, s.value_max() - s.value_min());
        const double resid = (o * w_ - rhs).cwiseAbs().maxCoeff();
        if (resid > 1e-8 * range)
            throw ComputeError(
                "thin_plate_spline: ill-conditioned basis system; retry with a small ridge (lambda > 0)");
    }
}

double TpsModel::at(Point2 target) const {
    double v = 0.0;
    for (size_t k = 0; k < sites_.size(); ++k) v += w_(k) * tps_basis(dist(sites_[k], target));
    return v;
}

std::vector<double> thin_plate_spline(const SampleSet& s, const std::vector<Point2>& targets,
                                      const TpsConfig& cfg) {
    const TpsModel model(s, cfg);
    std::vector<double> out;
    out.reserve(targets.size());
    for (Point2 t : targets) out.push_back(model.at(t));
    return out;
}

}  // namespace remaug

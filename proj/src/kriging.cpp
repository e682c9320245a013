#include "remaug/kriging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "remaug/optim.hpp"

namespace remaug {

void Variogram::validate() const {
    if (nugget < 0.0) throw InvalidInput("Variogram: nugget must be >= 0");
    if (sill < nugget) throw InvalidInput("Variogram: sill must be >= nugget");
    if (!(range > 0.0)) throw InvalidInput("Variogram: range must be > 0");
}

double Variogram::operator()(double h) const {
    if (h <= 0.0) return 0.0;
    const double partial = sill - nugget;
    switch (kind) {
        case VariogramKind::Exponential:
            return nugget + partial * (1.0 - std::exp(-h / range));
        case VariogramKind::Spherical: {
            if (h >= range) return sill;
            const double u = h / range;
            return nugget + partial * (1.5 * u - 0.5 * u * u * u);
        }
        case VariogramKind::Gaussian:
            return nugget + partial * (1.0 - std::exp(-(h / range) * (h / range)));
    }
    return sill;
}

void KrigingConfig::validate() const {
    if (n_lags < 3) throw InvalidInput("KrigingConfig: n_lags must be >= 3");
    if (!(max_lag_fraction > 0.0) || max_lag_fraction > 1.0)
        throw InvalidInput("KrigingConfig: max_lag_fraction must lie in (0, 1]");
    if (const KNearest* kn = std::get_if<KNearest>(&neighborhood); kn && kn->n < 3)
        throw InvalidInput("KrigingConfig: KNearest neighborhood must be >= 3");
}

EmpiricalVariogram empirical_variogram(const SampleSet& s, const KrigingConfig& cfg) {
    cfg.validate();
    if (s.size() < 2) throw InvalidInput("empirical_variogram: need at least 2 samples");

    const auto [lo, hi] = s.bounding_box();
    const double diameter = std::hypot(hi.x - lo.x, hi.y - lo.y);
    double max_lag = cfg.max_lag_fraction * diameter;
    if (!(max_lag > 0.0)) {
        // All samples are (numerically) coincident after dedup; degenerate.
        throw InvalidInput("empirical_variogram: degenerate sample geometry");
    }
    const double bin_w = max_lag / cfg.n_lags;

    std::vector<double> acc(cfg.n_lags, 0.0);
    std::vector<long> counts(cfg.n_lags, 0);
    for (size_t i = 0; i < s.size(); ++i) {
        for (size_t j = i + 1; j < s.size(); ++j) {
            const double h = dist({s[i].x, s[i].y}, {s[j].x, s[j].y});
            if (h > max_lag) continue;
            int b = std::min(static_cast<int>(h / bin_w), cfg.n_lags - 1);
            const double diff = s[i].value - s[j].value;
            acc[b] += diff * diff;
            counts[b] += 1;
        }
    }

    EmpiricalVariogram ev;
    for (int b = 0; b < cfg.n_lags; ++b) {
        if (counts[b] == 0) continue;
        ev.lag_centers.push_back((b + 0.5) * bin_w);
        ev.gamma_hat.push_back(acc[b] / (2.0 * counts[b]));
        ev.pair_counts.push_back(counts[b]);
    }
    return ev;
}

VariogramFit fit_variogram(const EmpiricalVariogram& ev, VariogramKind kind,
                           const KrigingConfig& cfg, bool pin_nugget_zero) {
    if (ev.bins() < 3) throw InvalidInput("fit_variogram: need at least 3 non-empty lag bins");

    const double max_lag = ev.lag_centers.back();
    const double gmax = *std::max_element(ev.gamma_hat.begin(), ev.gamma_hat.end());

    VariogramFit out;
    if (gmax <= 0.0) {
        // All-zero empirical variogram (constant field).
        out.variogram = {kind, 0.0, 0.0, max_lag / 3.0};
        out.degenerate = true;
        return out;
    }

    auto objective = [&](const std::vector<double>& x) {
        Variogram vg{kind, x[0], x[0] + x[1], x[2]};
        double loss = 0.0;
        for (size_t b = 0; b < ev.bins(); ++b) {
            const double w = cfg.fit_weighting == KrigingConfig::FitWeighting::PairCount
                                 ? static_cast<double>(ev.pair_counts[b])
                                 : 1.0;
            const double r = vg(ev.lag_centers[b]) - ev.gamma_hat[b];
            loss += w * r * r;
        }
        return loss;
    };

    // x = (nugget, partial sill, range); the reparametrization keeps
    // sill >= nugget >= 0 inside the box.
    Box box;
    box.lo = {0.0, 0.0, max_lag * 1e-3};
    box.hi = {pin_nugget_zero ? 0.0 : 2.0 * gmax, 3.0 * gmax, 4.0 * max_lag};

    PatternSearchOptions pso;
    pso.max_evals = 6000;
    OptimResult best;
    bool have = false;
    for (int k = 0; k < 10; ++k) {  // deterministic multi-start lattice
        const OptimResult r = pattern_search(objective, box, halton_point(box, k), pso);
        if (!have || r.value < best.value) {
            best = r;
            have = true;
        }
    }

    if (!have || !std::isfinite(best.value)) {
        double mean = 0.0;
        for (double g : ev.gamma_hat) mean += g;
        mean /= ev.bins();
        out.variogram = {VariogramKind::Exponential, 0.0, mean, max_lag / 3.0};
        out.fallback = true;
        return out;
    }
    out.variogram = {kind, best.x[0], best.x[0] + best.x[1], best.x[2]};
    out.variogram.validate();
    return out;
}

KrigeResult krige(const SampleSet& s, Point2 target, const Variogram& vg,
                  const KrigingConfig& cfg) {
    cfg.validate();
    vg.validate();
    const std::vector<int> hood = select_neighbors(s, target, cfg.neighborhood);
    if (hood.size() < 2) throw InvalidInput("krige: need at least 2 neighbors");
    const int n = static_cast<int>(hood.size());

    KrigeResult res;
    res.neighbor_indices = hood;

    // A fully degenerate variogram (gamma == 0 everywhere) makes the bordered
    // system singular; the limit solution weights every neighbor equally.
    if (vg.sill <= 0.0) {
        res.weights.assign(n, 1.0 / n);
        double mean = 0.0;
        for (int k : hood) mean += s[k].value;
        res.value = mean / n;
        res.variance = 0.0;
        return res;
    }

    Eigen::MatrixXd x(n + 1, n + 1);
    Eigen::VectorXd y(n + 1);
    for (int a = 0; a < n; ++a) {
        const Point2 pa{s[hood[a]].x, s[hood[a]].y};
        x(a, a) = 0.0;
        for (int b = a + 1; b < n; ++b) {
            const Point2 pb{s[hood[b]].x, s[hood[b]].y};
            const double g = vg(dist(pa, pb));
            x(a, b) = g;
            x(b, a) = g;
        }
        x(a, n) = 1.0;
        x(n, a) = 1.0;
        y(a) = vg(dist(pa, target));
    }
    x(n, n) = 0.0;
    y(n) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
    if (!lu.isInvertible())
        throw ComputeError("krige: singular kriging system (degenerate neighbor geometry)");
    const Eigen::VectorXd sol = lu.solve(y);

    double value = 0.0, variance = 0.0, wsum = 0.0;
    res.weights.resize(n);
    for (int a = 0; a < n; ++a) {
        res.weights[a] = sol(a);
        value += sol(a) * s[hood[a]].value;
        variance += sol(a) * y(a);
        wsum += sol(a);
    }
    variance += sol(n);  // + delta
    if (std::abs(wsum - 1.0) > 1e-6)
        throw ComputeError("krige: unbiasedness constraint violated (ill-conditioned system)");
    if (variance < -1e-9)
        throw ComputeError("krige: negative kriging variance beyond tolerance");
    res.value = value;
    res.variance = std::max(variance, 0.0);
    return res;
}

}  // namespace remaug

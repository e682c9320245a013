#include "remaug/modelbased.hpp"

#include <algorithm>
#include <cmath>

#include "remaug/optim.hpp"

namespace remaug {

namespace {
constexpr double kSpeedOfLight = 299792458.0;  // m/s
}

void ReceiverObservation::validate() const {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(p_avg_dbm))
        throw InvalidInput("ReceiverObservation: non-finite field");
    if (snr_linear && (!std::isfinite(*snr_linear) || *snr_linear < 0.0))
        throw InvalidInput("ReceiverObservation: SNR must be finite and >= 0");
}

namespace {

/// Distinct receiver positions (1e-9 m tolerance), keeping first occurrences.
std::vector<ReceiverObservation> dedup_receivers(const std::vector<ReceiverObservation>& obs) {
    std::vector<ReceiverObservation> out;
    for (const ReceiverObservation& o : obs) {
        o.validate();
        bool dup = false;
        for (const ReceiverObservation& q : out)
            if (std::abs(q.x - o.x) <= 1e-9 && std::abs(q.y - o.y) <= 1e-9) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(o);
    }
    return out;
}

bool all_collinear(const std::vector<ReceiverObservation>& obs) {
    if (obs.size() < 3) return true;
    for (size_t i = 1; i + 1 < obs.size(); ++i)
        for (size_t j = i + 1; j < obs.size(); ++j) {
            const double c = (obs[i].x - obs[0].x) * (obs[j].y - obs[0].y) -
                             (obs[i].y - obs[0].y) * (obs[j].x - obs[0].x);
            if (std::abs(c) > 1e-6) return false;
        }
    return true;
}

}  // namespace

LocalizationEstimate localize_rss(const std::vector<ReceiverObservation>& obs,
                                  const PropagationParams& prop) {
    prop.validate();
    const std::vector<ReceiverObservation> rx = dedup_receivers(obs);
    const int n = static_cast<int>(rx.size());
    if (n < 4) throw InvalidInput("localize_rss: need >= 4 distinct receivers (4 unknowns)");
    if (all_collinear(rx)) throw InvalidInput("localize_rss: receivers are collinear");

    const double p5 = 5.0 * prop.exponent;
    Eigen::MatrixXd a(n, 4);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        a(i, 0) = std::pow(10.0, (-prop.intercept_db - rx[i].p_avg_dbm) / p5);
        a(i, 1) = 2.0 * rx[i].x;
        a(i, 2) = 2.0 * rx[i].y;
        a(i, 3) = -1.0;
        b(i) = rx[i].x * rx[i].x + rx[i].y * rx[i].y;
    }
    const Eigen::VectorXd u = a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    if (!(u(0) > 0.0))
        throw ComputeError("localize_rss: inconsistent data (nonpositive power unknown)");

    LocalizationEstimate est;
    est.x = u(1);
    est.y = u(2);
    est.p_t_dbm = p5 * std::log10(u(0));
    est.residual_norm = (a * u - b).norm();
    est.method = "rss";
    return est;
}

LocalizationEstimate localize_rssd(const std::vector<ReceiverObservation>& obs,
                                   const PropagationParams& prop) {
    prop.validate();
    std::vector<ReceiverObservation> rx = dedup_receivers(obs);
    const int n = static_cast<int>(rx.size());
    if (n < 4) throw InvalidInput("localize_rssd: need >= 4 distinct receivers (3 difference rows)");
    if (all_collinear(rx)) throw InvalidInput("localize_rssd: receivers are collinear");

    // Reference receiver: strongest average power (best SNR anchor).
    size_t ref = 0;
    for (size_t i = 1; i < rx.size(); ++i)
        if (rx[i].p_avg_dbm > rx[ref].p_avg_dbm) ref = i;
    std::swap(rx[0], rx[ref]);

    const double p5 = 5.0 * prop.exponent;
    const double x1 = rx[0].x, y1 = rx[0].y;
    const double q1 = x1 * x1 + y1 * y1;
    Eigen::MatrixXd a(n - 1, 3);
    Eigen::VectorXd b(n - 1);
    for (int k = 1; k < n; ++k) {
        const double beta = std::pow(10.0, (rx[0].p_avg_dbm - rx[k].p_avg_dbm) / p5);
        const double xk = rx[k].x, yk = rx[k].y;
        a(k - 1, 0) = 1.0 - beta;
        a(k - 1, 1) = -2.0 * (xk - beta * x1);
        a(k - 1, 2) = -2.0 * (yk - beta * y1);
        b(k - 1) = beta * q1 - (xk * xk + yk * yk);
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // The (x_t, y_t) columns must be resolvable even when the quadratic
    // column vanishes (all receivers equidistant -> beta == 1 rows).
    svd.setThreshold(1e-10);
    if (svd.rank() < 2)
        throw ComputeError("localize_rssd: difference system is rank-deficient");
    const Eigen::VectorXd u = svd.solve(b);

    LocalizationEstimate est;
    est.x = u(1);
    est.y = u(2);
    est.residual_norm = (a * u - b).norm();
    est.method = "rssd";
    return est;
}

std::vector<double> aoa_candidate_grid(double step_deg) {
    if (!(step_deg > 0.0) || step_deg > 1.0)
        throw InvalidInput("aoa_candidate_grid: step must lie in (0, 1] degrees");
    std::vector<double> grid;
    for (double a = -90.0; a <= 90.0 + 1e-12; a += step_deg) grid.push_back(std::min(a, 90.0));
    return grid;
}

namespace {
Eigen::Vector2cd steering(double theta_deg) {
    const double s = std::sin(theta_deg * M_PI / 180.0);
    return {std::complex<double>(1.0, 0.0),
            std::exp(std::complex<double>(0.0, M_PI / 2.0 * s))};
}
}  // namespace

double estimate_aoa(const std::vector<Eigen::Vector2cd>& snapshots,
                    const std::vector<double>& candidates_deg) {
    if (snapshots.size() < 2) throw InvalidInput("estimate_aoa: need >= 2 snapshots");
    if (candidates_deg.size() < 2) throw InvalidInput("estimate_aoa: candidate grid too small");
    for (size_t i = 1; i < candidates_deg.size(); ++i) {
        const double step = candidates_deg[i] - candidates_deg[i - 1];
        if (!(step > 0.0) || step > 1.0 + 1e-12)
            throw InvalidInput("estimate_aoa: grid must be increasing with resolution <= 1 degree");
        if (candidates_deg[i] < -90.0 - 1e-12 || candidates_deg[i] > 90.0 + 1e-12)
            throw InvalidInput("estimate_aoa: candidates must lie in [-90, 90] degrees");
    }

    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    for (const Eigen::Vector2cd& s : snapshots) r += s * s.adjoint();
    r /= static_cast<double>(snapshots.size());
    if (r.norm() <= 0.0) throw InvalidInput("estimate_aoa: zero sample covariance");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(r);
    const Eigen::Vector2cd noise = eig.eigenvectors().col(0);  // smallest eigenvalue

    double best_theta = candidates_deg.front();
    double best_spec = -1.0;
    for (double theta : candidates_deg) {
        const double denom = std::norm(steering(theta).dot(noise));
        const double spec = 1.0 / std::max(denom, 1e-300);
        if (spec > best_spec) {
            best_spec = spec;
            best_theta = theta;
        }
    }
    return best_theta;
}

LocalizationEstimate localize_aoa(const std::vector<ReceiverObservation>& obs,
                                  const PropagationParams& prop, double p_t_dbm,
                                  double freq_mhz, double fading_const,
                                  const std::vector<double>& candidates_deg) {
    prop.validate();
    if (!(freq_mhz > 0.0)) throw InvalidInput("localize_aoa: frequency must be > 0");
    if (!(fading_const > 0.0)) throw InvalidInput("localize_aoa: fading constant must be > 0");

    std::vector<const ReceiverObservation*> rx;
    for (const ReceiverObservation& o : obs) {
        o.validate();
        if (!o.snapshots.empty()) rx.push_back(&o);
    }
    if (rx.empty()) throw InvalidInput("localize_aoa: no receiver carries snapshots");

    // alpha(d) = fading * (c / 4 pi f) * d^-p, inverted from linear mean power.
    const double gain0 = fading_const * kSpeedOfLight / (4.0 * M_PI * freq_mhz * 1e6);
    auto invert_range = [&](double p_avg_dbm) {
        const double alpha = std::pow(10.0, (p_avg_dbm - p_t_dbm) / 10.0);
        return std::pow(gain0 / alpha, 1.0 / prop.exponent);
    };

    std::vector<double> thetas;
    for (const ReceiverObservation* o : rx)
        thetas.push_back(estimate_aoa(o->snapshots, candidates_deg));

    LocalizationEstimate est;
    est.method = "aoa";
    est.p_t_dbm = p_t_dbm;
    if (rx.size() == 1) {
        const double d = invert_range(rx[0]->p_avg_dbm);
        const double th = thetas[0] * M_PI / 180.0;
        est.x = rx[0]->x + d * std::cos(th);
        est.y = rx[0]->y + d * std::sin(th);
        est.residual_norm = 0.0;
        est.low_confidence = true;  // single bearing, no fusion possible
        return est;
    }

    const int n = static_cast<int>(rx.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double th = thetas[i] * M_PI / 180.0;
        a(i, 0) = -std::sin(th);
        a(i, 1) = std::cos(th);
        b(i) = -rx[i]->x * std::sin(th) + rx[i]->y * std::cos(th);
    }
    const Eigen::Matrix2d normal = a.transpose() * a;
    if (std::abs(normal.determinant()) < 1e-12)
        throw ComputeError("localize_aoa: parallel bearings, fusion system singular");
    const Eigen::Vector2d u = normal.ldlt().solve(a.transpose() * b);
    est.x = u(0);
    est.y = u(1);
    est.residual_norm = (a * u - b).norm();
    return est;
}

LocalizationEstimate fuse_snr(const std::vector<LocalizationEstimate>& estimates,
                              const std::vector<double>& gammas) {
    if (estimates.empty() || estimates.size() != gammas.size())
        throw InvalidInput("fuse_snr: estimates and SNR lists must be equal-length and non-empty");
    double total = 0.0;
    for (double g : gammas) {
        if (!std::isfinite(g) || g < 0.0) throw InvalidInput("fuse_snr: SNRs must be finite and >= 0");
        total += g;
    }
    if (!(total > 0.0)) throw InvalidInput("fuse_snr: all SNR weights are zero");

    LocalizationEstimate out;
    out.method = "snr";
    for (size_t i = 0; i < estimates.size(); ++i) {
        const double w = gammas[i] / total;
        out.x += w * estimates[i].x;
        out.y += w * estimates[i].y;
        out.residual_norm += w * estimates[i].residual_norm;
    }
    return out;
}

void StmParams::pin_all_bounds() {
    bounds.a0 = {a0, a0};
    bounds.a1 = {a1, a1};
    bounds.a2 = {a2, a2};
    bounds.a3 = {a3, a3};
    bounds.l_d = {l_d, l_d};
    bounds.l_c = {l_c, l_c};
    bounds.p_t = {p_t, p_t};
    if (antenna) {
        bounds.theta_azi = {antenna->theta_azi_deg, antenna->theta_azi_deg};
        bounds.phi_tilt = {antenna->phi_tilt_deg, antenna->phi_tilt_deg};
    }
}

double stm_predict(const StmParams& params, const Transmitter& tx, Point2 target) {
    tx.validate();
    const LinkGeometry geom = link_geometry(tx, target);
    const double d_km = std::max(geom.distance_m, 1.0) / 1000.0;
    const double log_d = std::log10(d_km);
    const double log_h = std::log10(tx.height_m);
    const double log_f = std::log10(tx.freq_mhz);
    const double mobile_term = 3.2 * std::pow(std::log10(11.75 * params.h_m), 2.0);
    const double gain = params.antenna ? antenna_gain(*params.antenna, geom) : 0.0;
    return params.p_t - params.a0 - params.a1 * log_d - params.a2 * log_h -
           params.a3 * log_d * log_h + mobile_term - 44.49 * log_f +
           4.78 * log_f * log_f - params.l_d - params.l_c + gain;
}

StmFit stm_calibrate(const SampleSet& samples, const Transmitter& tx, const StmParams& init) {
    tx.validate();
    const bool with_antenna = init.antenna.has_value();

    Box box;
    auto push = [&](StmParams::Bound b) {
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi))
            throw InvalidInput("stm_calibrate: bounds must be finite");
        if (b.lo > b.hi) throw InvalidInput("stm_calibrate: empty feasible box (lo > hi)");
        box.lo.push_back(b.lo);
        box.hi.push_back(b.hi);
    };
    push(init.bounds.a0);
    push(init.bounds.a1);
    push(init.bounds.a2);
    push(init.bounds.a3);
    push(init.bounds.l_d);
    push(init.bounds.l_c);
    push(init.bounds.p_t);
    if (with_antenna) {
        push(init.bounds.theta_azi);
        push(init.bounds.phi_tilt);
    }

    int free_params = 0;
    for (size_t d = 0; d < box.dims(); ++d)
        if (box.hi[d] > box.lo[d]) ++free_params;
    if (static_cast<int>(samples.size()) < free_params + 2)
        throw InvalidInput("stm_calibrate: need at least free-parameter count + 2 samples");

    auto apply = [&](const std::vector<double>& x) {
        StmParams p = init;
        p.a0 = x[0];
        p.a1 = x[1];
        p.a2 = x[2];
        p.a3 = x[3];
        p.l_d = x[4];
        p.l_c = x[5];
        p.p_t = x[6];
        if (with_antenna) {
            p.antenna->theta_azi_deg = x[7];
            p.antenna->phi_tilt_deg = x[8];
        }
        return p;
    };
    auto mse = [&](const std::vector<double>& x) {
        const StmParams p = apply(x);
        double acc = 0.0;
        for (const Sample& s : samples.samples()) {
            const double e = stm_predict(p, tx, {s.x, s.y}) - s.value;
            acc += e * e;
        }
        return acc / samples.size();
    };

    std::vector<double> start = {init.a0, init.a1, init.a2, init.a3, init.l_d, init.l_c, init.p_t};
    if (with_antenna) {
        start.push_back(init.antenna->theta_azi_deg);
        start.push_back(init.antenna->phi_tilt_deg);
    }

    PatternSearchOptions pso;
    pso.max_evals = 12000;
    const OptimResult best = multistart_search(mse, box, 8, {box.clamp(start)}, pso);

    StmFit fit;
    fit.params = apply(best.x);
    fit.rmse = std::sqrt(best.value);
    return fit;
}

}  // namespace remaug

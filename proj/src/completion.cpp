#include "remaug/completion.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "remaug/rng.hpp"

namespace remaug {

void SvtConfig::validate() const {
    if (eta < 0.0 || delta < 0.0 || i0 < 0.0) throw InvalidInput("SvtConfig: negative parameter");
    if (zeta < 0.0) throw InvalidInput("SvtConfig: zeta must be >= 0");
    if (phi < 0.0) throw InvalidInput("SvtConfig: phi must be >= 0");
    if (max_iters < 1) throw InvalidInput("SvtConfig: max_iters must be >= 1");
    if (alpha < 1) throw InvalidInput("SvtConfig: alpha must be >= 1");
}

void FpcConfig::validate() const {
    if (mu < 0.0) throw InvalidInput("FpcConfig: mu must be >= 0");
    if (!(tau > 0.0)) throw InvalidInput("FpcConfig: tau must be > 0");
    if (max_iters < 1) throw InvalidInput("FpcConfig: max_iters must be >= 1");
    if (zeta < 0.0 || phi < 0.0) throw InvalidInput("FpcConfig: negative tolerance");
}

namespace {

struct Observed {
    Eigen::MatrixXd c;          // observed values, zero outside psi
    Eigen::ArrayXXd mask;       // 1 on psi, 0 elsewhere
    long m = 0;

    static Observed from_map(const RadioMap& map) {
        map.validate();
        Observed o;
        o.c = Eigen::MatrixXd::Zero(map.grid.n_rows, map.grid.n_cols);
        o.mask = Eigen::ArrayXXd::Zero(map.grid.n_rows, map.grid.n_cols);
        for (int i = 0; i < map.grid.n_rows; ++i) {
            for (int j = 0; j < map.grid.n_cols; ++j) {
                if (map.missing_at(i, j)) continue;
                o.c(i, j) = map.values(i, j);
                o.mask(i, j) = 1.0;
                ++o.m;
            }
        }
        if (o.m < 1) throw InvalidInput("completion: need at least one observed entry");
        return o;
    }

    Eigen::MatrixXd project(const Eigen::MatrixXd& p) const { return (p.array() * mask).matrix(); }

    double fidelity_sq(const Eigen::MatrixXd& p) const {
        return (((p - c).array() * mask).square()).sum();
    }
};

double stop_threshold(long m, double zeta, double phi) {
    return phi > 0.0 ? (1.0 + zeta) * m * phi * phi : 1e-8 * static_cast<double>(m);
}

struct ShrinkOut {
    Eigen::MatrixXd p;
    int rank = 0;
};

ShrinkOut shrink_full(const Eigen::MatrixXd& q, double eta) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(q, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    int rank = 0;
    for (int k = 0; k < s.size(); ++k) {
        s(k) = std::max(s(k) - eta, 0.0);
        if (s(k) > 0.0) ++rank;
    }
    ShrinkOut out;
    out.p = svd.matrixU().leftCols(s.size()) * s.asDiagonal() * svd.matrixV().leftCols(s.size()).transpose();
    out.rank = rank;
    return out;
}

// Top-k singular triplets by subspace iteration (deterministic start block).
struct PartialSvd {
    Eigen::MatrixXd u, v;
    Eigen::VectorXd s;
};

PartialSvd top_k_svd(const Eigen::MatrixXd& a, int k, int iters = 8) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(a.cols());
    const int kk = std::min({k, n, m});
    Rng rng(0x5df1cafeULL);
    Eigen::MatrixXd g(m, kk);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < kk; ++j) g(i, j) = rng.normal();
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a * g).householderQ() *
                        Eigen::MatrixXd::Identity(n, kk);
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXd z = Eigen::HouseholderQR<Eigen::MatrixXd>(a.transpose() * q).householderQ() *
                            Eigen::MatrixXd::Identity(m, kk);
        q = Eigen::HouseholderQR<Eigen::MatrixXd>(a * z).householderQ() *
            Eigen::MatrixXd::Identity(n, kk);
    }
    const Eigen::MatrixXd b = q.transpose() * a;  // kk x m
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    PartialSvd out;
    out.u = q * svd.matrixU();
    out.s = svd.singularValues();
    out.v = svd.matrixV();
    return out;
}

// Algorithm-1 style shrink: probe the spectrum in steps of alpha until the
// last probed value drops below eta; small matrices just take the full SVD.
ShrinkOut shrink_probing(const Eigen::MatrixXd& q, double eta, int alpha) {
    const int min_dim = static_cast<int>(std::min(q.rows(), q.cols()));
    if (min_dim <= 64) return shrink_full(q, eta);

    int probe = alpha;
    while (true) {
        if (probe + alpha >= min_dim) return shrink_full(q, eta);
        const PartialSvd psvd = top_k_svd(q, probe + alpha);
        if (psvd.s(probe - 1) > eta) {
            probe += alpha;
            continue;
        }
        int rank = 0;
        Eigen::VectorXd s = psvd.s;
        for (int k = 0; k < s.size(); ++k) {
            s(k) = std::max(s(k) - eta, 0.0);
            if (s(k) > 0.0) ++rank;
        }
        ShrinkOut out;
        out.p = psvd.u * s.asDiagonal() * psvd.v.transpose();
        out.rank = rank;
        return out;
    }
}

RadioMap to_map(const GridSpec& grid, const Eigen::MatrixXd& p) {
    RadioMap out;
    out.grid = grid;
    out.values = p;
    return out;
}

}  // namespace

Eigen::MatrixXd shrink(const Eigen::MatrixXd& m, double eta) {
    if (!m.allFinite()) throw InvalidInput("shrink: non-finite input");
    if (eta < 0.0) throw InvalidInput("shrink: eta must be >= 0");
    return shrink_full(m, eta).p;
}

CompletionResult complete_svt(const RadioMap& observed, const SvtConfig& cfg) {
    cfg.validate();
    const Observed obs = Observed::from_map(observed);
    const long n_r = observed.grid.n_rows, n_c = observed.grid.n_cols;

    const double eta = cfg.eta > 0.0 ? cfg.eta : 5.0 * std::sqrt(static_cast<double>(n_r) * n_c);
    const double delta = cfg.delta > 0.0 ? cfg.delta : 1.2 * static_cast<double>(n_r) * n_c / obs.m;
    const double sigma_max = obs.c.norm() > 0.0
                                 ? Eigen::BDCSVD<Eigen::MatrixXd>(obs.c).singularValues()(0)
                                 : 0.0;
    const double i0 = cfg.i0 > 0.0
                          ? cfg.i0
                          : (sigma_max > 0.0 ? std::ceil(eta / (delta * sigma_max)) : 1.0);
    const double threshold = stop_threshold(obs.m, cfg.zeta, cfg.phi);

    Eigen::MatrixXd q = i0 * delta * obs.c;
    CompletionResult res;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_r, n_c);
    for (int t = 1; t <= cfg.max_iters; ++t) {
        const ShrinkOut sh = shrink_probing(q, eta, cfg.alpha);
        p = sh.p;
        if (!p.allFinite())
            throw ComputeError("complete_svt: iterate diverged; retry with a smaller step size delta");
        res.iterations = t;
        res.final_rank = sh.rank;
        res.residual = obs.fidelity_sq(p);
        res.residual_trace.push_back(res.residual);
        if (res.residual <= threshold) {
            res.converged = true;
            break;
        }
        q += delta * obs.project(obs.c - p);
        if (!q.allFinite())
            throw ComputeError("complete_svt: iterate diverged; retry with a smaller step size delta");
    }
    res.completed = to_map(observed.grid, p);
    return res;
}

CompletionResult complete_fpc(const RadioMap& observed, const FpcConfig& cfg) {
    cfg.validate();
    const Observed obs = Observed::from_map(observed);
    const double sigma_max = obs.c.norm() > 0.0
                                 ? Eigen::BDCSVD<Eigen::MatrixXd>(obs.c).singularValues()(0)
                                 : 0.0;
    const double mu_target = cfg.mu > 0.0 ? cfg.mu : 1e-6 * std::max(sigma_max, 1.0);
    const double threshold = stop_threshold(obs.m, cfg.zeta, cfg.phi);

    CompletionResult res;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(observed.grid.n_rows, observed.grid.n_cols);
    double mu = std::max(sigma_max * 0.25, mu_target);
    int t = 0;
    while (t < cfg.max_iters) {
        // Inner fixed-point sweep at this continuation level.
        for (int inner = 0; inner < 25 && t < cfg.max_iters; ++inner) {
            ++t;
            const Eigen::MatrixXd grad_step = p - cfg.tau * obs.project(p - obs.c);
            const ShrinkOut sh = shrink_full(grad_step, cfg.tau * mu);
            const double move = (sh.p - p).norm();
            p = sh.p;
            if (!p.allFinite())
                throw ComputeError("complete_fpc: iterate diverged; retry with a smaller step size tau");
            res.iterations = t;
            res.final_rank = sh.rank;
            res.residual = obs.fidelity_sq(p);
            res.residual_trace.push_back(res.residual);
        res.residual_trace.push_back(res.residual);
            if (mu <= mu_target && res.residual <= threshold) {
                res.converged = true;
                res.completed = to_map(observed.grid, p);
                return res;
            }
            if (move <= 1e-10 * std::max(1.0, p.norm())) break;
        }
        if (mu <= mu_target) break;
        mu = std::max(0.25 * mu, mu_target);
    }
    res.converged = res.residual <= threshold;
    res.completed = to_map(observed.grid, p);
    return res;
}

double nuclear_norm(const Eigen::MatrixXd& m) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues().sum();
}

}  // namespace remaug

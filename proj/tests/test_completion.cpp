#include <doctest.h>

#include <cmath>

#include "remaug/completion.hpp"
#include "remaug/rng.hpp"
#include "remaug/scenario.hpp"

using namespace remaug;

namespace {

GridSpec square_grid(int n) { return {0.0, 0.0, 1.0, n, n}; }

RadioMap map_of(const Eigen::MatrixXd& values) {
    RadioMap m;
    m.grid = square_grid(static_cast<int>(values.rows()));
    m.grid.n_cols = static_cast<int>(values.cols());
    m.values = values;
    return m;
}

// Seeded low-rank truth from unit normals.
Eigen::MatrixXd low_rank_truth(int n, int rank, uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd u(n, rank), v(n, rank);
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < rank; ++r) {
            u(i, r) = rng.normal();
            v(i, r) = rng.normal();
        }
    return u * v.transpose();
}

RadioMap mask_uniform(const Eigen::MatrixXd& truth, double keep, uint64_t seed) {
    return apply_mask(map_of(truth), MaskSpec::uniform(keep, seed));
}

double rel_error(const Eigen::MatrixXd& recon, const Eigen::MatrixXd& truth) {
    return (recon - truth).norm() / truth.norm();
}

}  // namespace

TEST_SUITE_BEGIN("completion");

TEST_CASE("shrink soft-thresholds singular values") {
    SUBCASE("threshold above sigma_max zeroes the matrix") {
        Eigen::MatrixXd m = low_rank_truth(6, 2, 1);
        const double smax = Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues()(0);
        CHECK(shrink(m, smax + 1.0).norm() == doctest::Approx(0.0));
    }
    SUBCASE("zero threshold is the identity") {
        Eigen::MatrixXd m = low_rank_truth(6, 3, 2);
        CHECK((shrink(m, 0.0) - m).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("diagonal example: diag(5,2) at eta 3 gives diag(2,0)") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 0) = 5.0;
        m(1, 1) = 2.0;
        const Eigen::MatrixXd r = shrink(m, 3.0);
        CHECK(r(0, 0) == doctest::Approx(2.0));
        CHECK(r(1, 1) == doctest::Approx(0.0));
        CHECK(std::abs(r(0, 1)) + std::abs(r(1, 0)) < 1e-12);
    }
    SUBCASE("every output singular value is bounded by its input") {
        Rng rng(3);
        Eigen::MatrixXd m(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) m(i, j) = rng.normal();
        const Eigen::VectorXd before = Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
        const Eigen::VectorXd after =
            Eigen::BDCSVD<Eigen::MatrixXd>(shrink(m, 1.3)).singularValues();
        for (int k = 0; k < after.size(); ++k) CHECK(after(k) <= before(k) + 1e-12);
    }
}

TEST_CASE("svt recovers a fully observed matrix") {
    const Eigen::MatrixXd truth = low_rank_truth(10, 3, 11) * 10.0;
    const CompletionResult res = complete_svt(map_of(truth));
    CHECK(res.converged);
    CHECK(rel_error(res.completed.values, truth) < 1e-4);
}

TEST_CASE("svt completes a rank-1 matrix from 60% of the entries") {
    const Eigen::MatrixXd truth = low_rank_truth(10, 1, 21);
    const RadioMap observed = mask_uniform(truth, 0.6, 22);
    const CompletionResult res = complete_svt(observed);
    CHECK(res.converged);
    CHECK(res.iterations <= 500);
    CHECK(rel_error(res.completed.values, truth) < 1e-3);
    CHECK(res.completed.observed_count() == res.completed.grid.bins());  // no MISSING
    CHECK(res.completed.values.allFinite());
}

TEST_CASE("svt fidelity is non-increasing after the warmup iterations") {
    const Eigen::MatrixXd truth = low_rank_truth(10, 1, 21);
    const RadioMap observed = mask_uniform(truth, 0.6, 22);
    const CompletionResult res = complete_svt(observed);
    REQUIRE(res.residual_trace.size() >= 6);
    for (size_t t = 5; t + 1 < res.residual_trace.size(); ++t) {
        const double here = std::sqrt(res.residual_trace[t]);
        const double next = std::sqrt(res.residual_trace[t + 1]);
        CHECK(next <= here + 1e-12);
    }
}

TEST_CASE("svt with a single observed entry fits it with rank one") {
    RadioMap observed = RadioMap::all_missing(square_grid(8));
    observed.values(3, 4) = -57.0;
    const CompletionResult res = complete_svt(observed);
    CHECK(res.converged);
    CHECK(res.final_rank <= 1);
    CHECK(res.completed.values(3, 4) == doctest::Approx(-57.0).epsilon(1e-3));
}

TEST_CASE("svt reports divergence with advice") {
    const Eigen::MatrixXd truth = low_rank_truth(10, 1, 33);
    const RadioMap observed = mask_uniform(truth, 0.6, 34);
    SvtConfig cfg;
    cfg.delta = 1e6;  // far beyond the stable step range
    bool threw = false;
    try {
        complete_svt(observed, cfg);
    } catch (const ComputeError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("smaller step size") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("nuclear norm of the completion undercuts naive fills") {
    const Eigen::MatrixXd truth = low_rank_truth(10, 1, 21);
    const RadioMap observed = mask_uniform(truth, 0.6, 22);
    const CompletionResult res = complete_svt(observed);
    REQUIRE(res.converged);

    Eigen::MatrixXd zero_filled = Eigen::MatrixXd::Zero(10, 10);
    double mean = 0.0;
    long n_obs = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            if (!observed.missing_at(i, j)) {
                zero_filled(i, j) = observed.values(i, j);
                mean += observed.values(i, j);
                ++n_obs;
            }
    mean /= n_obs;
    Eigen::MatrixXd mean_filled = Eigen::MatrixXd::Constant(10, 10, mean);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            if (!observed.missing_at(i, j)) mean_filled(i, j) = observed.values(i, j);

    const double completed_norm = nuclear_norm(res.completed.values);
    CHECK(completed_norm <= nuclear_norm(zero_filled) + 1e-6);
    CHECK(completed_norm <= nuclear_norm(mean_filled) + 1e-6);
}

TEST_CASE("fpc recovers a fully observed matrix") {
    const Eigen::MatrixXd truth = low_rank_truth(10, 3, 44) * 10.0;
    const CompletionResult res = complete_fpc(map_of(truth));
    CHECK(res.converged);
    CHECK(rel_error(res.completed.values, truth) < 1e-4);
}

TEST_CASE("fpc matches the svt oracle on the rank-1 instance") {
    const Eigen::MatrixXd truth = low_rank_truth(10, 1, 21);
    const RadioMap observed = mask_uniform(truth, 0.6, 22);
    FpcConfig cfg;
    cfg.max_iters = 2000;
    const CompletionResult res = complete_fpc(observed, cfg);
    CHECK(res.converged);
    CHECK(rel_error(res.completed.values, truth) < 1e-3);
}

TEST_CASE("fpc is no worse than svt on a rank-4 instance" * doctest::timeout(120)) {
    const Eigen::MatrixXd truth = low_rank_truth(50, 4, 55);
    const RadioMap observed = mask_uniform(truth, 0.5, 56);
    SvtConfig svt_cfg;
    svt_cfg.max_iters = 500;
    const CompletionResult svt_res = complete_svt(observed, svt_cfg);
    FpcConfig fpc_cfg;
    fpc_cfg.max_iters = 2000;
    const CompletionResult fpc_res = complete_fpc(observed, fpc_cfg);
    const double svt_err = rel_error(svt_res.completed.values, truth);
    const double fpc_err = rel_error(fpc_res.completed.values, truth);
    CHECK(fpc_err <= svt_err + 0.01);
}

TEST_SUITE_END();

#pragma once

#include <Eigen/Dense>

#include "remaug/core.hpp"

namespace remaug {

// Low-rank completion of the coverage matrix. The observed map's MISSING
// entries define the complement of the sampled set; m is the observed count.

struct SvtConfig {
    // 0 = derive the documented default at run time.
    double eta = 0.0;    // threshold; default 5*sqrt(n_rows*n_cols)
    double delta = 0.0;  // step size; default 1.2*n_rows*n_cols/m
    double zeta = 0.05;  // stopping tolerance
    double phi = 0.0;    // shadowing std (dB); 0 = noiseless floor
    int max_iters = 500;
    int alpha = 5;       // rank-probe increment
    double i0 = 0.0;     // initial multiplier; default ceil(eta/(delta*sigma_max))

    void validate() const;
};

struct FpcConfig {
    double mu = 0.0;   // target regularization; default 1e-6*sigma_max
    double tau = 1.0;  // step size
    int max_iters = 500;
    double zeta = 0.05;
    double phi = 0.0;

    void validate() const;
};

struct CompletionResult {
    RadioMap completed;  // no MISSING entries
    int iterations = 0;
    int final_rank = 0;
    bool converged = false;
    double residual = 0.0;               // ||O_psi(P - C)||_F^2 at exit
    std::vector<double> residual_trace;  // per-iteration fidelity (Frobenius, squared)
};

/// Soft-threshold the singular values of m at level eta.
Eigen::MatrixXd shrink(const Eigen::MatrixXd& m, double eta);

/// Singular value thresholding iteration:
///   P^t = shrink(Q^{t-1}, eta),  Q^t = Q^{t-1} + delta * O_psi(C - P^t),
/// started from Q^0 = i0 * delta * O_psi(C), stopped when
/// ||O_psi(P^t - C)||_F^2 <= (1+zeta) m phi^2 (noiseless floor 1e-8*m).
CompletionResult complete_svt(const RadioMap& observed, const SvtConfig& cfg = {});

/// Fixed-point continuation: P <- shrink(P - tau*O_psi(P - C), tau*mu_k)
/// with mu_k decreasing geometrically (factor 0.25) to the target mu.
CompletionResult complete_fpc(const RadioMap& observed, const FpcConfig& cfg = {});

/// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& m);

}  // namespace remaug

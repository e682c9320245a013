#pragma once

#include <functional>
#include <vector>

namespace remaug {

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    size_t dims() const { return lo.size(); }
    void validate() const;
    std::vector<double> clamp(std::vector<double> x) const;
};

struct PatternSearchOptions {
    double initial_step_frac = 0.25;  // of the box width, per coordinate
    double step_tol_frac = 1e-10;     // stop when all steps shrink below this
    int max_evals = 20000;
};

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
};

/// Deterministic compass/pattern search within a box. Robust to the kinks a
/// clamped objective has; no derivatives needed. Zero-width coordinates stay
/// pinned at their bound.
OptimResult pattern_search(const std::function<double(const std::vector<double>&)>& f,
                           const Box& box, std::vector<double> start,
                           const PatternSearchOptions& opt = {});

/// k-th point (0-based) of the Halton sequence in the given box; bases are
/// the first primes. Used for deterministic multi-start lattices.
std::vector<double> halton_point(const Box& box, int k);

/// Multi-start pattern search: n_starts Halton points (plus optional explicit
/// starts prepended); returns the best result, ties broken by start order.
OptimResult multistart_search(const std::function<double(const std::vector<double>&)>& f,
                              const Box& box, int n_starts,
                              const std::vector<std::vector<double>>& explicit_starts = {},
                              const PatternSearchOptions& opt = {});

}  // namespace remaug

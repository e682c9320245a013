#include "remaug/optim.hpp"

#include <algorithm>
#include <cmath>

#include "remaug/errors.hpp"

namespace remaug {

void Box::validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw InvalidInput("Box: malformed bounds");
    for (size_t d = 0; d < lo.size(); ++d) {
        if (!std::isfinite(lo[d]) || !std::isfinite(hi[d]))
            throw InvalidInput("Box: bounds must be finite");
        if (lo[d] > hi[d]) throw InvalidInput("Box: empty feasible region (lo > hi)");
    }
}

std::vector<double> Box::clamp(std::vector<double> x) const {
    for (size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], lo[d], hi[d]);
    return x;
}

OptimResult pattern_search(const std::function<double(const std::vector<double>&)>& f,
                           const Box& box, std::vector<double> start,
                           const PatternSearchOptions& opt) {
    box.validate();
    const size_t n = box.dims();
    if (start.size() != n) throw InvalidInput("pattern_search: start dimension mismatch");
    start = box.clamp(std::move(start));

    std::vector<double> width(n), step(n);
    bool any_free = false;
    for (size_t d = 0; d < n; ++d) {
        width[d] = box.hi[d] - box.lo[d];
        step[d] = width[d] * opt.initial_step_frac;
        any_free = any_free || width[d] > 0.0;
    }

    OptimResult res;
    res.x = start;
    res.value = f(start);
    res.evals = 1;
    if (!any_free) return res;  // everything pinned

    while (res.evals < opt.max_evals) {
        bool improved = false;
        for (size_t d = 0; d < n; ++d) {
            if (step[d] <= 0.0) continue;
            for (double sign : {+1.0, -1.0}) {
                std::vector<double> cand = res.x;
                cand[d] = std::clamp(cand[d] + sign * step[d], box.lo[d], box.hi[d]);
                if (cand[d] == res.x[d]) continue;
                const double v = f(cand);
                ++res.evals;
                if (v < res.value) {
                    res.value = v;
                    res.x = std::move(cand);
                    improved = true;
                    break;
                }
                if (res.evals >= opt.max_evals) return res;
            }
        }
        if (!improved) {
            bool all_tiny = true;
            for (size_t d = 0; d < n; ++d) {
                step[d] *= 0.5;
                if (width[d] > 0.0 && step[d] > opt.step_tol_frac * width[d]) all_tiny = false;
            }
            if (all_tiny) break;
        }
    }
    return res;
}

namespace {
double halton_radical_inverse(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
}  // namespace

std::vector<double> halton_point(const Box& box, int k) {
    box.validate();
    const size_t n = box.dims();
    if (n > std::size(kPrimes)) throw InvalidInput("halton_point: too many dimensions");
    std::vector<double> x(n);
    for (size_t d = 0; d < n; ++d) {
        const double u = halton_radical_inverse(k + 1, kPrimes[d]);
        x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * u;
    }
    return x;
}

OptimResult multistart_search(const std::function<double(const std::vector<double>&)>& f,
                              const Box& box, int n_starts,
                              const std::vector<std::vector<double>>& explicit_starts,
                              const PatternSearchOptions& opt) {
    OptimResult best;
    bool have = false;
    auto consider = [&](const std::vector<double>& start) {
        const OptimResult r = pattern_search(f, box, start, opt);
        if (!have || r.value < best.value) {
            best = r;
            have = true;
        }
    };
    for (const auto& s : explicit_starts) consider(s);
    for (int k = 0; k < n_starts; ++k) consider(halton_point(box, k));
    if (!have) throw InvalidInput("multistart_search: no starts");
    return best;
}

}  // namespace remaug

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "remaug/completion.hpp"
#include "remaug/core.hpp"
#include "remaug/interpolate.hpp"
#include "remaug/kriging.hpp"
#include "remaug/modelbased.hpp"
#include "remaug/scenario.hpp"

namespace remaug {

enum class MetricScope { MissingOnly, All };

struct Metrics {
    double rmse = 0.0;      // dB
    double mae = 0.0;       // dB
    double rmae = 0.0;      // fraction
    double rel_frob = 0.0;  // fraction
    long n_evaluated = 0;
};

/// Error metrics between a reconstruction and the ground truth. MissingOnly
/// scope needs the observed map to know which bins were hidden.
Metrics compute_metrics(const RadioMap& truth, const RadioMap& recon, MetricScope scope,
                        const RadioMap* observed = nullptr);

/// Declarative reconstruction method: a name from the implemented vocabulary
/// plus the knobs the named method reads. Methods needing scenario context
/// (transmitter / propagation parameters) are stm, rss and rssd.
struct ReconstructMethod {
    std::string name = "kriging";

    IdwConfig idw;
    AidwConfig aidw;
    GidsConfig gids;

    // MSM; radii <= 0 are derived from the sample density (~19 / ~13
    // expected neighbors inside R_w / R_v).
    double msm_r_w_m = 0.0;
    double msm_r_v_m = 0.0;
    double msm_power = 2.0;
    MsmConfig::Nodal msm_nodal = MsmConfig::Nodal::LocalLinear;

    TpsConfig tps;

    KrigingConfig kriging;
    VariogramKind variogram_kind = VariogramKind::Exponential;
    bool pin_nugget_zero = false;

    SvtConfig svt;
    FpcConfig fpc;

    // natural neighbor: strict errors on out-of-hull bins, otherwise they
    // stay missing in the output.
    bool natural_strict = true;

    // stm: calibration freedom around the scenario-derived initial point.
    double stm_a0_halfwidth = 60.0;
    double stm_a1_halfwidth = 25.0;
    bool stm_calibrate_p_t = false;
    double stm_p_t_halfwidth = 10.0;
};

/// Names accepted by `reconstruct`.
const std::vector<std::string>& implemented_method_names();

/// Fill the MISSING bins of `observed`. Interpolation-family methods keep
/// observed bins untouched; svt/fpc return the completion iterate everywhere.
RadioMap reconstruct(const RadioMap& observed, const ReconstructMethod& method,
                     const Scenario* context = nullptr);

struct BenchmarkConfig {
    Scenario scenario;
    MaskSpec mask;
    std::vector<ReconstructMethod> methods;
    std::vector<uint64_t> seeds;
    MetricScope scope = MetricScope::MissingOnly;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct BenchmarkCell {
    std::string method;
    uint64_t seed = 0;
    bool ok = false;
    std::string fail_reason;
    Metrics metrics;
    bool scope_fell_back_to_all = false;  // degenerate mask left nothing missing
};

struct MethodAggregate {
    std::string method;
    int n_ok = 0;
    int n_failed = 0;
    Metrics mean;
    Metrics stddev;  // population std; zero for single-seed runs
};

struct BenchmarkReport {
    std::vector<BenchmarkCell> cells;        // keyed (method, seed), stable order
    std::vector<MethodAggregate> aggregates; // config order
};

/// Sweep (method x seed); failures are recorded per cell, never abort the
/// run. Deterministic for a fixed config, regardless of thread count.
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

/// Non-strict mean-metric ordering over methods, e.g. kriging <= idw <= nearest.
struct OrderingAssertion {
    std::string metric = "rmse";  // rmse | mae | rmae | rel_frob
    std::vector<std::string> method_order;
    double min_success_fraction = 0.9;
};

struct AssertionResult {
    std::string description;
    bool pass = false;
    std::string details;
};

std::vector<AssertionResult> check_assertions(const BenchmarkReport& report,
                                              const std::vector<OrderingAssertion>& assertions);

}  // namespace remaug

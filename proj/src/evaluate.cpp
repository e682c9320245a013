#include "remaug/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace remaug {

Metrics compute_metrics(const RadioMap& truth, const RadioMap& recon, MetricScope scope,
                        const RadioMap* observed) {
    truth.validate();
    recon.validate();
    if (!(truth.grid == recon.grid))
        throw InvalidInput("compute_metrics: truth and reconstruction grids differ");
    if (scope == MetricScope::MissingOnly) {
        if (observed == nullptr)
            throw InvalidInput("compute_metrics: MissingOnly scope needs the observed map");
        if (!(observed->grid == truth.grid))
            throw InvalidInput("compute_metrics: observed map grid differs");
    }

    double se = 0.0, ae = 0.0, rae = 0.0, frob_num = 0.0, frob_den = 0.0;
    long n = 0, n_rae = 0;
    for (int i = 0; i < truth.grid.n_rows; ++i) {
        for (int j = 0; j < truth.grid.n_cols; ++j) {
            if (scope == MetricScope::MissingOnly && !observed->missing_at(i, j)) continue;
            if (truth.missing_at(i, j))
                throw InvalidInput("compute_metrics: truth is MISSING inside the scope");
            if (recon.missing_at(i, j))
                throw InvalidInput("compute_metrics: reconstruction is MISSING inside the scope");
            const double t = truth.values(i, j);
            const double e = recon.values(i, j) - t;
            se += e * e;
            ae += std::abs(e);
            frob_num += e * e;
            frob_den += t * t;
            if (std::abs(t) >= 1e-9) {
                rae += std::abs(e) / std::abs(t);
                ++n_rae;
            }
            ++n;
        }
    }
    if (n == 0) throw InvalidInput("compute_metrics: empty scope");

    Metrics m;
    m.n_evaluated = n;
    m.rmse = std::sqrt(se / n);
    m.mae = ae / n;
    m.rmae = n_rae > 0 ? rae / n_rae : 0.0;
    m.rel_frob = frob_den > 0.0 ? std::sqrt(frob_num) / std::sqrt(frob_den)
                                : (frob_num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    return m;
}

const std::vector<std::string>& implemented_method_names() {
    static const std::vector<std::string> names = {
        "idw",  "adaptive_idw", "gids", "msm",  "nearest", "natural_neighbor",
        "tps",  "splines",      "kriging", "svt", "fpc",   "stm",
        "rss",  "rssd"};
    return names;
}

namespace {

std::vector<Point2> missing_bin_centers(const RadioMap& observed, std::vector<std::pair<int, int>>& idx) {
    std::vector<Point2> targets;
    for (int i = 0; i < observed.grid.n_rows; ++i)
        for (int j = 0; j < observed.grid.n_cols; ++j)
            if (observed.missing_at(i, j)) {
                idx.emplace_back(i, j);
                targets.push_back(bin_center(observed.grid, i, j));
            }
    return targets;
}

// Radius holding ~n_expected samples on average, given the observed density.
double radius_for_expected(const SampleSet& s, double n_expected) {
    const auto [lo, hi] = s.bounding_box();
    const double area = std::max((hi.x - lo.x) * (hi.y - lo.y), 1e-12);
    return std::sqrt(n_expected * area / (M_PI * static_cast<double>(s.size())));
}

RadioMap reconstruct_model_based(const RadioMap& observed, const ReconstructMethod& method,
                                 const Scenario* context, const SampleSet& samples) {
    if (context == nullptr)
        throw InvalidInput("reconstruct: method '" + method.name + "' needs scenario context");
    if (context->transmitters.size() != 1)
        throw InvalidInput("reconstruct: method '" + method.name + "' supports a single transmitter");
    const Transmitter& tx = context->transmitters[0];
    const PropagationParams& prop = context->prop;

    RadioMap out = observed;
    std::vector<std::pair<int, int>> idx;
    const std::vector<Point2> targets = missing_bin_centers(observed, idx);

    if (method.name == "stm") {
        StmParams init;
        init.a2 = 0.0;
        init.a3 = 0.0;
        init.l_d = 0.0;
        init.l_c = 0.0;
        init.p_t = tx.power_dbm;
        init.h_m = 1.5;
        // Initial point: the scenario's log-distance model rewritten in the
        // Okumura-Hata shape (distance in km absorbs 3 decades into a0).
        const double log_f = std::log10(tx.freq_mhz);
        const double mobile_term = 3.2 * std::pow(std::log10(11.75 * init.h_m), 2.0);
        init.a1 = 10.0 * prop.exponent;
        init.a0 = prop.intercept_db + 30.0 * prop.exponent + mobile_term - 44.49 * log_f +
                  4.78 * log_f * log_f;
        init.pin_all_bounds();
        init.bounds.a0 = {init.a0 - method.stm_a0_halfwidth, init.a0 + method.stm_a0_halfwidth};
        init.bounds.a1 = {std::max(0.0, init.a1 - method.stm_a1_halfwidth),
                          init.a1 + method.stm_a1_halfwidth};
        if (method.stm_calibrate_p_t)
            init.bounds.p_t = {init.p_t - method.stm_p_t_halfwidth, init.p_t + method.stm_p_t_halfwidth};

        const StmFit fit = stm_calibrate(samples, tx, init);
        for (size_t k = 0; k < targets.size(); ++k)
            out.values(idx[k].first, idx[k].second) = stm_predict(fit.params, tx, targets[k]);
        return out;
    }

    // rss / rssd: localize the transmitter from the samples, then predict
    // through the log-distance model.
    std::vector<ReceiverObservation> rx;
    for (const Sample& s : samples.samples()) rx.push_back({s.x, s.y, s.value, {}, std::nullopt});
    LocalizationEstimate est = method.name == "rss" ? localize_rss(rx, prop)
                                                    : localize_rssd(rx, prop);
    double p_t = 0.0;
    if (est.p_t_dbm) {
        p_t = *est.p_t_dbm;
    } else {
        // RSSD cancels the transmit power; recover it from the fit residuals.
        double acc = 0.0;
        for (const Sample& s : samples.samples()) {
            const double d = std::max(std::hypot(s.x - est.x, s.y - est.y), 1.0);
            acc += s.value + prop.intercept_db + 10.0 * prop.exponent * std::log10(d);
        }
        p_t = acc / samples.size();
    }
    for (size_t k = 0; k < targets.size(); ++k) {
        const double d = std::max(std::hypot(targets[k].x - est.x, targets[k].y - est.y), 1.0);
        out.values(idx[k].first, idx[k].second) =
            p_t - prop.intercept_db - 10.0 * prop.exponent * std::log10(d);
    }
    return out;
}

}  // namespace

RadioMap reconstruct(const RadioMap& observed, const ReconstructMethod& method,
                     const Scenario* context) {
    observed.validate();
    const auto& names = implemented_method_names();
    if (std::find(names.begin(), names.end(), method.name) == names.end())
        throw InvalidInput("reconstruct: unknown method '" + method.name + "'");

    if (method.name == "svt") {
        CompletionResult r = complete_svt(observed, method.svt);
        return r.completed;
    }
    if (method.name == "fpc") {
        CompletionResult r = complete_fpc(observed, method.fpc);
        return r.completed;
    }

    const SampleSet samples = sample_from_map(observed);
    if (method.name == "stm" || method.name == "rss" || method.name == "rssd")
        return reconstruct_model_based(observed, method, context, samples);

    RadioMap out = observed;
    std::vector<std::pair<int, int>> idx;
    const std::vector<Point2> targets = missing_bin_centers(observed, idx);
    if (targets.empty()) return out;

    if (method.name == "idw") {
        for (size_t k = 0; k < targets.size(); ++k)
            out.values(idx[k].first, idx[k].second) = idw(samples, targets[k], method.idw);
    } else if (method.name == "adaptive_idw") {
        for (size_t k = 0; k < targets.size(); ++k)
            out.values(idx[k].first, idx[k].second) = adaptive_idw(samples, targets[k], method.aidw);
    } else if (method.name == "gids") {
        for (size_t k = 0; k < targets.size(); ++k)
            out.values(idx[k].first, idx[k].second) = gids(samples, targets[k], method.gids);
    } else if (method.name == "msm") {
        MsmConfig cfg;
        cfg.r_w_m = method.msm_r_w_m > 0.0 ? method.msm_r_w_m : radius_for_expected(samples, 19.0);
        cfg.r_v_m = method.msm_r_v_m > 0.0 ? method.msm_r_v_m : radius_for_expected(samples, 13.0);
        cfg.power = method.msm_power;
        cfg.nodal = method.msm_nodal;
        for (size_t k = 0; k < targets.size(); ++k)
            out.values(idx[k].first, idx[k].second) = msm(samples, targets[k], cfg);
    } else if (method.name == "nearest") {
        for (size_t k = 0; k < targets.size(); ++k)
            out.values(idx[k].first, idx[k].second) = nearest(samples, targets[k]);
    } else if (method.name == "natural_neighbor") {
        const NaturalNeighbor nn(samples, observed.grid.cell_size / 4.0);
        for (size_t k = 0; k < targets.size(); ++k) {
            if (!method.natural_strict && !nn.inside_hull(targets[k])) continue;
            out.values(idx[k].first, idx[k].second) = nn.at(targets[k]);
        }
    } else if (method.name == "tps" || method.name == "splines") {
        const TpsModel model(samples, method.tps);
        for (size_t k = 0; k < targets.size(); ++k)
            out.values(idx[k].first, idx[k].second) = model.at(targets[k]);
    } else if (method.name == "kriging") {
        const EmpiricalVariogram ev = empirical_variogram(samples, method.kriging);
        const VariogramFit fit =
            fit_variogram(ev, method.variogram_kind, method.kriging, method.pin_nugget_zero);
        for (size_t k = 0; k < targets.size(); ++k) {
            const KrigeResult r = krige(samples, targets[k], fit.variogram, method.kriging);
            out.values(idx[k].first, idx[k].second) = r.value;
        }
    }
    return out;
}

void BenchmarkConfig::validate() const {
    scenario.validate();
    mask.validate();
    if (methods.empty()) throw InvalidInput("BenchmarkConfig: at least one method required");
    if (seeds.empty()) throw InvalidInput("BenchmarkConfig: at least one seed required");
    const auto& names = implemented_method_names();
    for (const ReconstructMethod& m : methods)
        if (std::find(names.begin(), names.end(), m.name) == names.end())
            throw InvalidInput("BenchmarkConfig: unknown method '" + m.name + "'");
    if (threads < 0) throw InvalidInput("BenchmarkConfig: threads must be >= 0");
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();
    const ShadowingSampler sampler(cfg.scenario.grid, cfg.scenario.prop.shadow_sigma_db,
                                   cfg.scenario.prop.decorr_dist_m);

    const size_t n_seeds = cfg.seeds.size();
    const size_t n_methods = cfg.methods.size();
    std::vector<BenchmarkCell> cells(n_seeds * n_methods);

    auto run_seed = [&](size_t si) {
        const uint64_t seed = cfg.seeds[si];
        Scenario sc = cfg.scenario;
        sc.seed = Rng(cfg.scenario.seed).substream(StreamTag::BenchmarkScenario, seed).seed();
        MaskSpec mask = cfg.mask;
        mask.seed = Rng(cfg.mask.seed).substream(StreamTag::BenchmarkMask, seed).seed();

        RadioMap truth, observed;
        std::string setup_error;
        bool nothing_missing = false;
        try {
            truth = generate_truth(sc, sampler);
            observed = apply_mask(truth, mask);
            nothing_missing = observed.observed_count() == observed.grid.bins();
        } catch (const std::exception& e) {
            setup_error = e.what();
        }

        for (size_t mi = 0; mi < n_methods; ++mi) {
            BenchmarkCell& cell = cells[si * n_methods + mi];
            cell.method = cfg.methods[mi].name;
            cell.seed = seed;
            if (!setup_error.empty()) {
                cell.fail_reason = "scenario setup failed: " + setup_error;
                continue;
            }
            try {
                const RadioMap recon = reconstruct(observed, cfg.methods[mi], &sc);
                if (nothing_missing && cfg.scope == MetricScope::MissingOnly) {
                    cell.metrics = compute_metrics(truth, recon, MetricScope::All);
                    cell.scope_fell_back_to_all = true;
                } else {
                    cell.metrics = compute_metrics(truth, recon, cfg.scope, &observed);
                }
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.fail_reason = e.what();
            }
        }
    };

    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_seeds));
    if (n_threads <= 1) {
        for (size_t si = 0; si < n_seeds; ++si) run_seed(si);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (size_t si = next.fetch_add(1); si < n_seeds; si = next.fetch_add(1)) run_seed(si);
            });
        for (std::thread& th : pool) th.join();
    }

    BenchmarkReport report;
    report.cells = std::move(cells);
    for (const ReconstructMethod& m : cfg.methods) {
        MethodAggregate agg;
        agg.method = m.name;
        std::vector<const Metrics*> ok;
        for (const BenchmarkCell& c : report.cells) {
            if (c.method != m.name) continue;
            if (c.ok)
                ok.push_back(&c.metrics);
            else
                ++agg.n_failed;
        }
        agg.n_ok = static_cast<int>(ok.size());
        auto accumulate = [&](auto proj, double& mean_out, double& std_out) {
            if (ok.empty()) return;
            double mean = 0.0;
            for (const Metrics* m2 : ok) mean += proj(*m2);
            mean /= ok.size();
            double var = 0.0;
            for (const Metrics* m2 : ok) var += (proj(*m2) - mean) * (proj(*m2) - mean);
            var /= ok.size();
            mean_out = mean;
            std_out = std::sqrt(var);
        };
        accumulate([](const Metrics& x) { return x.rmse; }, agg.mean.rmse, agg.stddev.rmse);
        accumulate([](const Metrics& x) { return x.mae; }, agg.mean.mae, agg.stddev.mae);
        accumulate([](const Metrics& x) { return x.rmae; }, agg.mean.rmae, agg.stddev.rmae);
        accumulate([](const Metrics& x) { return x.rel_frob; }, agg.mean.rel_frob, agg.stddev.rel_frob);
        if (!ok.empty()) {
            long n_eval = 0;
            for (const Metrics* m2 : ok) n_eval += m2->n_evaluated;
            agg.mean.n_evaluated = n_eval / static_cast<long>(ok.size());
        }
        report.aggregates.push_back(std::move(agg));
    }
    return report;
}

namespace {
double pick_metric(const Metrics& m, const std::string& name) {
    if (name == "rmse") return m.rmse;
    if (name == "mae") return m.mae;
    if (name == "rmae") return m.rmae;
    if (name == "rel_frob") return m.rel_frob;
    throw InvalidInput("unknown metric '" + name + "'");
}
}  // namespace

std::vector<AssertionResult> check_assertions(const BenchmarkReport& report,
                                              const std::vector<OrderingAssertion>& assertions) {
    std::vector<AssertionResult> out;
    for (const OrderingAssertion& a : assertions) {
        AssertionResult res;
        std::string desc = "ordering(" + a.metric + "):";
        for (const std::string& m : a.method_order) desc += " " + m;
        res.description = desc;
        res.pass = true;

        double prev = -std::numeric_limits<double>::infinity();
        std::string details;
        for (const std::string& mname : a.method_order) {
            const MethodAggregate* agg = nullptr;
            for (const MethodAggregate& g : report.aggregates)
                if (g.method == mname) agg = &g;
            if (agg == nullptr) {
                res.pass = false;
                details += mname + ": not in report; ";
                continue;
            }
            const int total = agg->n_ok + agg->n_failed;
            const double success = total > 0 ? static_cast<double>(agg->n_ok) / total : 0.0;
            if (success < a.min_success_fraction) {
                res.pass = false;
                details += mname + ": success fraction " + std::to_string(success) + " below " +
                           std::to_string(a.min_success_fraction) + "; ";
            }
            const double v = agg->n_ok > 0 ? pick_metric(agg->mean, a.metric)
                                           : std::numeric_limits<double>::infinity();
            details += mname + "=" + std::to_string(v) + " ";
            // Non-strict ordering: each mean must not drop below the previous.
            if (prev > v) {
                res.pass = false;
                details += "(ordering violated) ";
            }
            prev = v;
        }
        res.details = details;
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace remaug

// remaug — reconstruct radio coverage maps from scarce measurements.
//
// Subcommands: generate, reconstruct, benchmark, select.
// Exit codes: 0 success, 1 assertion/convergence failure, 2 usage/config error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "remaug/io.hpp"
#include "remaug/version.hpp"

namespace {

using namespace remaug;
using nlohmann::json;
using remaug::io::ordered_json;

std::optional<uint64_t> env_seed() {
    const char* v = std::getenv("REMAUG_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw InvalidInput("REMAUG_SEED is not a valid unsigned integer");
    }
}

// Seed precedence: CLI flag > REMAUG_SEED > config file.
uint64_t resolve_seed(uint64_t config_seed, const std::optional<uint64_t>& flag_seed) {
    if (flag_seed) return *flag_seed;
    if (const auto e = env_seed()) return *e;
    return config_seed;
}

ordered_json tool_stamp() {
    return ordered_json{{"name", kToolName}, {"version", kToolVersion}};
}

const std::vector<std::string>& advisory_labels() {
    static const std::vector<std::string> labels = {
        "TRIANGLE", "ARC_CLUSTER", "VAE", "GAN", "TRANSFER_LEARNING",
        "FEW_SHOT", "SIMULATOR", "TESTBED", "MOBILE_APP"};
    return labels;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Map selector-style labels onto the reconstruction vocabulary.
std::string canonical_method(const std::string& name) {
    const std::string l = lower(name);
    if (l == "matrix_completion") return "svt";
    if (l == "natural" || l == "natural_neighbour") return "natural_neighbor";
    return l;
}

struct GridFlag {
    std::string text;  // "origin_x,origin_y,cell_size,n_rows,n_cols"

    std::optional<GridSpec> parse() const {
        if (text.empty()) return std::nullopt;
        GridSpec g;
        if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%d,%d", &g.origin_x, &g.origin_y, &g.cell_size,
                        &g.n_rows, &g.n_cols) != 5)
            throw InvalidInput("--grid expects origin_x,origin_y,cell_size,n_rows,n_cols");
        g.validate();
        return g;
    }
};

int cmd_generate(const std::string& scenario_path, const std::string& out_path,
                 const std::string& mask_path, const std::string& masked_out,
                 const std::optional<uint64_t>& seed_flag) {
    Scenario scenario = io::scenario_from_json(io::parse_json_file(scenario_path));
    scenario.seed = resolve_seed(scenario.seed, seed_flag);

    const RadioMap truth = generate_truth(scenario);
    io::write_map_csv(out_path, truth);
    ordered_json meta{{"tool", tool_stamp()},
                      {"grid", io::grid_to_json(truth.grid)},
                      {"scenario", io::scenario_to_json(scenario)}};
    io::write_text_file(io::meta_path_for(out_path), meta.dump(2) + "\n");

    if (!mask_path.empty()) {
        const MaskSpec mask = io::mask_from_json(io::parse_json_file(mask_path));
        const RadioMap observed = apply_mask(truth, mask);
        const std::string masked_path = masked_out.empty() ? "observed.csv" : masked_out;
        io::write_map_csv(masked_path, observed);
        ordered_json mmeta{{"tool", tool_stamp()},
                           {"grid", io::grid_to_json(observed.grid)},
                           {"scenario", io::scenario_to_json(scenario)},
                           {"mask", io::mask_to_json(mask)},
                           {"observed_bins", observed.observed_count()}};
        io::write_text_file(io::meta_path_for(masked_path), mmeta.dump(2) + "\n");
    } else if (!masked_out.empty()) {
        throw InvalidInput("--masked-out needs --mask");
    }
    return 0;
}

int cmd_reconstruct(const std::string& in_path, const std::string& method_name,
                    const std::string& params_json, const std::string& out_path,
                    const GridFlag& grid_flag, const std::string& scenario_path, bool strict) {
    const std::string canonical = canonical_method(method_name);
    for (const std::string& adv : advisory_labels()) {
        if (lower(adv) == canonical) {
            std::cerr << "error: '" << method_name
                      << "' is an advisory label, not implemented: the machine-learning, "
                         "network-geometry and data-sourcing options are selection guidance "
                         "only in this toolkit\n";
            return 2;
        }
    }
    if (canonical == "snr_method" || canonical == "aoa") {
        std::cerr << "error: method '" << method_name
                  << "' needs per-receiver snapshot/SNR observations, which the samples CSV "
                     "format does not carry; use the library API for it\n";
        return 2;
    }

    json jm = params_json.empty() ? json::object() : json::parse(params_json);
    jm["name"] = canonical;
    ReconstructMethod method = io::method_from_json(jm);
    if (canonical == "natural_neighbor") method.natural_strict = strict;

    std::optional<Scenario> scenario;
    if (!scenario_path.empty())
        scenario = io::scenario_from_json(io::parse_json_file(scenario_path));

    // Input: samples CSV (header) or map CSV (grid from sidecar meta or --grid).
    const std::string text = io::read_text_file(in_path);
    RadioMap observed;
    if (text.rfind("x_m", 0) == 0) {
        const SampleSet samples = io::samples_from_csv(text);
        std::optional<GridSpec> grid = grid_flag.parse();
        if (!grid) throw InvalidInput("samples input needs --grid to define the target map");
        observed = RadioMap::all_missing(*grid);
        for (const Sample& s : samples.samples()) {
            const int j = static_cast<int>(std::floor((s.x - grid->origin_x) / grid->cell_size));
            const int i = static_cast<int>(std::floor((s.y - grid->origin_y) / grid->cell_size));
            if (i < 0 || i >= grid->n_rows || j < 0 || j >= grid->n_cols)
                throw InvalidInput("sample at (" + std::to_string(s.x) + ", " + std::to_string(s.y) +
                                   ") falls outside the target grid");
            observed.values(i, j) = s.value;
        }
    } else {
        std::optional<GridSpec> grid = grid_flag.parse();
        if (!grid) {
            const std::string meta_path = io::meta_path_for(in_path);
            try {
                grid = io::grid_from_json(io::parse_json_file(meta_path).at("grid"));
            } catch (const std::exception&) {
                throw InvalidInput("cannot determine the grid: pass --grid or provide " + meta_path);
            }
        }
        observed = io::read_map_csv(in_path, *grid);
    }

    const auto t0 = std::chrono::steady_clock::now();
    RadioMap completed;
    ordered_json extra;
    if (canonical == "svt" || canonical == "fpc") {
        const CompletionResult r = canonical == "svt" ? complete_svt(observed, method.svt)
                                                      : complete_fpc(observed, method.fpc);
        completed = r.completed;
        extra["iterations"] = r.iterations;
        extra["converged"] = r.converged;
        extra["final_rank"] = r.final_rank;
        extra["residual"] = r.residual;
        if (!r.converged) {
            std::cerr << "error: " << canonical << " did not reach its stopping rule within "
                      << r.iterations << " iterations\n";
            return 1;
        }
    } else {
        completed = reconstruct(observed, method, scenario ? &*scenario : nullptr);
    }
    const auto t1 = std::chrono::steady_clock::now();

    long unfilled = 0;
    for (int i = 0; i < completed.grid.n_rows; ++i)
        for (int j = 0; j < completed.grid.n_cols; ++j)
            if (completed.missing_at(i, j)) ++unfilled;
    if (unfilled > 0)
        std::cerr << "warning: " << unfilled
                  << " bins left unreachable (outside the sample hull); written as nan\n";

    io::write_map_csv(out_path, completed);
    ordered_json meta{{"tool", tool_stamp()},
                      {"grid", io::grid_to_json(completed.grid)},
                      {"method", io::method_to_json(method)},
                      {"wall_time_ms",
                       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
    if (!extra.empty()) meta["completion"] = extra;
    if (unfilled > 0) meta["unfilled_bins"] = unfilled;
    io::write_text_file(io::meta_path_for(out_path), meta.dump(2) + "\n");
    return 0;
}

int cmd_benchmark(const std::string& config_path, const std::string& report_json_path,
                  const std::string& report_csv_path, const std::optional<uint64_t>& seed_flag,
                  int threads_flag) {
    io::BenchmarkRun run = io::benchmark_run_from_json(io::parse_json_file(config_path));
    run.config.scenario.seed = resolve_seed(run.config.scenario.seed, seed_flag);
    if (threads_flag >= 0) run.config.threads = threads_flag;

    const BenchmarkReport report = run_benchmark(run.config);
    const std::vector<AssertionResult> results = check_assertions(report, run.assertions);

    ordered_json config_echo{{"scenario", io::scenario_to_json(run.config.scenario)},
                             {"mask", io::mask_to_json(run.config.mask)},
                             {"seeds", run.config.seeds},
                             {"scope", run.config.scope == MetricScope::MissingOnly ? "missing_only" : "all"}};
    ordered_json methods = ordered_json::array();
    for (const ReconstructMethod& m : run.config.methods) methods.push_back(io::method_to_json(m));
    config_echo["methods"] = methods;

    if (!report_json_path.empty())
        io::write_text_file(report_json_path,
                            io::report_to_json(report, config_echo, results).dump(2) + "\n");
    if (!report_csv_path.empty()) io::write_text_file(report_csv_path, io::report_to_csv(report));

    bool all_pass = true;
    for (const AssertionResult& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.description << "  [" << r.details << "]\n";
        all_pass = all_pass && r.pass;
    }
    for (const MethodAggregate& a : report.aggregates)
        std::cout << a.method << ": mean rmse " << a.mean.rmse << " dB over " << a.n_ok
                  << " cells (" << a.n_failed << " failed)\n";
    return all_pass ? 0 : 1;
}

int cmd_select(const std::string& features_path) {
    const ScenarioFeatures f = io::features_from_json(io::parse_json_file(features_path));
    const Recommendation rec = select(f);
    std::cout << io::recommendation_to_json(rec).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"remaug: radio coverage map reconstruction from scarce measurements"};
    app.set_version_flag("--version", std::string(remaug::kToolVersion));
    app.require_subcommand(1);

    // generate
    std::string gen_scenario, gen_out = "truth.csv", gen_mask, gen_masked_out;
    std::optional<uint64_t> gen_seed;
    CLI::App* gen = app.add_subcommand("generate", "Generate a ground-truth map from a scenario");
    gen->add_option("scenario", gen_scenario, "Scenario JSON file")->required();
    gen->add_option("-o,--out", gen_out, "Output truth CSV path");
    gen->add_option("--mask", gen_mask, "Mask JSON file; also writes a masked map");
    gen->add_option("--masked-out", gen_masked_out, "Masked map CSV path (with --mask)");
    gen->add_option("--seed", gen_seed, "Override the scenario seed");

    // reconstruct
    std::string rec_in, rec_method, rec_params, rec_out = "completed.csv", rec_scenario;
    GridFlag rec_grid;
    bool rec_strict = false;
    CLI::App* rec = app.add_subcommand("reconstruct", "Fill the missing bins of a map");
    rec->add_option("input", rec_in, "Observed map CSV (nan = missing) or samples CSV")->required();
    rec->add_option("-m,--method", rec_method, "Reconstruction method name")->required();
    rec->add_option("--params", rec_params, "Method parameters as a JSON object");
    rec->add_option("-o,--out", rec_out, "Output map CSV path");
    rec->add_option("--grid", rec_grid.text, "origin_x,origin_y,cell_size,n_rows,n_cols");
    rec->add_option("--scenario", rec_scenario, "Scenario JSON (context for stm/rss/rssd)");
    rec->add_flag("--strict", rec_strict, "Fail on bins outside the sample hull");

    // benchmark
    std::string bench_config, bench_json = "report.json", bench_csv = "report.csv";
    std::optional<uint64_t> bench_seed;
    int bench_threads = -1;
    CLI::App* bench = app.add_subcommand("benchmark", "Method comparison sweep");
    bench->add_option("config", bench_config, "Benchmark config JSON")->required();
    bench->add_option("--report-json", bench_json, "Report JSON path");
    bench->add_option("--report-csv", bench_csv, "Report CSV path");
    bench->add_option("--seed", bench_seed, "Override the scenario seed");
    bench->add_option("--threads", bench_threads, "Worker threads (0 = auto)");

    // select
    std::string sel_features;
    CLI::App* sel = app.add_subcommand("select", "Recommend augmentation methods from features");
    sel->add_option("features", sel_features, "Feature JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_scenario, gen_out, gen_mask, gen_masked_out, gen_seed);
        if (rec->parsed())
            return cmd_reconstruct(rec_in, rec_method, rec_params, rec_out, rec_grid, rec_scenario,
                                   rec_strict);
        if (bench->parsed())
            return cmd_benchmark(bench_config, bench_json, bench_csv, bench_seed, bench_threads);
        if (sel->parsed()) return cmd_select(sel_features);
    } catch (const remaug::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const remaug::ComputeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

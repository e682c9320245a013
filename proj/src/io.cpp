#include "remaug/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "remaug/version.hpp"

namespace remaug::io {

namespace {

std::string fmt6(double v) {
    if (is_missing(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& context) {
    if (!j.is_object()) throw InvalidInput(context + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            std::string keys;
            for (const std::string& k : allowed) keys += (keys.empty() ? "" : ", ") + k;
            throw InvalidInput(context + ": unknown key '" + it.key() + "' (valid keys: " + keys + ")");
        }
    }
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key)) throw InvalidInput(context + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput(context + ": key '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_field_or(const nlohmann::json& j, const std::string& key, const std::string& context, T fallback) {
    if (!j.contains(key)) return fallback;
    return get_field<T>(j, key, context);
}

}  // namespace

std::string map_to_csv(const RadioMap& map) {
    map.validate();
    std::string out;
    out.reserve(static_cast<size_t>(map.grid.bins()) * 12);
    for (int i = 0; i < map.grid.n_rows; ++i) {
        for (int j = 0; j < map.grid.n_cols; ++j) {
            if (j) out += ',';
            out += fmt6(map.values(i, j));
        }
        out += '\n';
    }
    return out;
}

RadioMap map_from_csv(const std::string& csv, const GridSpec& grid) {
    grid.validate();
    RadioMap map = RadioMap::all_missing(grid);
    std::istringstream in(csv);
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (i >= grid.n_rows) throw InvalidInput("map CSV: more rows than the grid declares");
        std::istringstream ls(line);
        std::string cell;
        int j = 0;
        while (std::getline(ls, cell, ',')) {
            if (j >= grid.n_cols) throw InvalidInput("map CSV: row " + std::to_string(i) + " has too many fields");
            if (cell == "nan" || cell == "NaN") {
                map.values(i, j) = kMissing;
            } else {
                try {
                    size_t pos = 0;
                    map.values(i, j) = std::stod(cell, &pos);
                    if (pos != cell.size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    throw InvalidInput("map CSV: bad number '" + cell + "' at row " +
                                       std::to_string(i) + ", col " + std::to_string(j));
                }
            }
            ++j;
        }
        if (j != grid.n_cols)
            throw InvalidInput("map CSV: row " + std::to_string(i) + " has " + std::to_string(j) +
                               " fields, expected " + std::to_string(grid.n_cols));
        ++i;
    }
    if (i != grid.n_rows)
        throw InvalidInput("map CSV: found " + std::to_string(i) + " rows, expected " +
                           std::to_string(grid.n_rows));
    return map;
}

void write_map_csv(const std::string& path, const RadioMap& map) {
    write_text_file(path, map_to_csv(map));
}

RadioMap read_map_csv(const std::string& path, const GridSpec& grid) {
    return map_from_csv(read_text_file(path), grid);
}

std::string meta_path_for(const std::string& csv_path) {
    const size_t slash = csv_path.find_last_of("/\\");
    const size_t dot = csv_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".meta.json";
    return csv_path.substr(0, dot) + ".meta.json";
}

std::string samples_to_csv(const SampleSet& s) {
    const bool with_z = !s.empty() && s[0].z.has_value();
    std::string out = with_z ? "x_m,y_m,z_m,value_dbm\n" : "x_m,y_m,value_dbm\n";
    for (const Sample& smp : s.samples()) {
        out += fmt6(smp.x);
        out += ',';
        out += fmt6(smp.y);
        if (with_z) {
            out += ',';
            out += fmt6(smp.z.value_or(0.0));
        }
        out += ',';
        out += fmt6(smp.value);
        out += '\n';
    }
    return out;
}

SampleSet samples_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("samples CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::istringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ',')) header.push_back(col);
    }
    int ix = -1, iy = -1, iz = -1, iv = -1;
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
        if (header[c] == "x_m") ix = c;
        else if (header[c] == "y_m") iy = c;
        else if (header[c] == "z_m") iz = c;
        else if (header[c] == "value_dbm") iv = c;
        else throw InvalidInput("samples CSV: unknown column '" + header[c] + "'");
    }
    if (ix < 0 || iy < 0 || iv < 0)
        throw InvalidInput("samples CSV: header must contain x_m, y_m and value_dbm");

    std::vector<Sample> samples;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> fields;
        while (std::getline(ls, cell, ',')) {
            try {
                size_t pos = 0;
                fields.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidInput("samples CSV: bad number '" + cell + "' on line " +
                                   std::to_string(row));
            }
        }
        if (fields.size() != header.size())
            throw InvalidInput("samples CSV: line " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()));
        Sample s;
        s.x = fields[ix];
        s.y = fields[iy];
        s.value = fields[iv];
        if (iz >= 0) s.z = fields[iz];
        samples.push_back(s);
    }
    if (samples.empty()) throw InvalidInput("samples CSV: no data rows");
    return SampleSet(std::move(samples));
}

void write_samples_csv(const std::string& path, const SampleSet& s) {
    write_text_file(path, samples_to_csv(s));
}

SampleSet read_samples_csv(const std::string& path) {
    return samples_from_csv(read_text_file(path));
}

ordered_json grid_to_json(const GridSpec& g) {
    return ordered_json{{"origin_x", g.origin_x},
                        {"origin_y", g.origin_y},
                        {"cell_size", g.cell_size},
                        {"n_rows", g.n_rows},
                        {"n_cols", g.n_cols}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
    check_keys(j, {"origin_x", "origin_y", "cell_size", "n_rows", "n_cols"}, "grid");
    GridSpec g;
    g.origin_x = get_field_or<double>(j, "origin_x", "grid", 0.0);
    g.origin_y = get_field_or<double>(j, "origin_y", "grid", 0.0);
    g.cell_size = get_field<double>(j, "cell_size", "grid");
    g.n_rows = get_field<int>(j, "n_rows", "grid");
    g.n_cols = get_field<int>(j, "n_cols", "grid");
    g.validate();
    return g;
}

namespace {

ordered_json antenna_to_json(const AntennaPattern& a) {
    ordered_json j;
    j["kind"] = a.kind == AntennaPattern::Kind::ThreeGpp ? "threegpp" : "cosine";
    j["g_max_dbi"] = a.g_max_dbi;
    if (a.kind == AntennaPattern::Kind::ThreeGpp) {
        j["b_theta_deg"] = a.b_theta_deg;
        j["b_phi_deg"] = a.b_phi_deg;
        j["a_max_db"] = a.a_max_db;
        j["lambda_theta"] = a.lambda_theta;
        j["lambda_phi"] = a.lambda_phi;
    } else {
        j["f_theta_db"] = a.f_theta_db;
        j["f_phi_db"] = a.f_phi_db;
        j["p1"] = a.p1;
        j["p2"] = a.p2;
    }
    j["theta_azi_deg"] = a.theta_azi_deg;
    j["phi_tilt_deg"] = a.phi_tilt_deg;
    return j;
}

AntennaPattern antenna_from_json(const nlohmann::json& j) {
    check_keys(j,
               {"kind", "g_max_dbi", "b_theta_deg", "b_phi_deg", "a_max_db", "lambda_theta",
                "lambda_phi", "f_theta_db", "f_phi_db", "p1", "p2", "theta_azi_deg", "phi_tilt_deg"},
               "antenna");
    AntennaPattern a;
    const std::string kind = get_field<std::string>(j, "kind", "antenna");
    if (kind == "threegpp")
        a.kind = AntennaPattern::Kind::ThreeGpp;
    else if (kind == "cosine")
        a.kind = AntennaPattern::Kind::Cosine;
    else
        throw InvalidInput("antenna: kind must be 'threegpp' or 'cosine'");
    a.g_max_dbi = get_field_or<double>(j, "g_max_dbi", "antenna", a.g_max_dbi);
    a.b_theta_deg = get_field_or<double>(j, "b_theta_deg", "antenna", a.b_theta_deg);
    a.b_phi_deg = get_field_or<double>(j, "b_phi_deg", "antenna", a.b_phi_deg);
    a.a_max_db = get_field_or<double>(j, "a_max_db", "antenna", a.a_max_db);
    a.lambda_theta = get_field_or<double>(j, "lambda_theta", "antenna", a.lambda_theta);
    a.lambda_phi = get_field_or<double>(j, "lambda_phi", "antenna", a.lambda_phi);
    a.f_theta_db = get_field_or<double>(j, "f_theta_db", "antenna", a.f_theta_db);
    a.f_phi_db = get_field_or<double>(j, "f_phi_db", "antenna", a.f_phi_db);
    a.p1 = get_field_or<double>(j, "p1", "antenna", a.p1);
    a.p2 = get_field_or<double>(j, "p2", "antenna", a.p2);
    a.theta_azi_deg = get_field_or<double>(j, "theta_azi_deg", "antenna", a.theta_azi_deg);
    a.phi_tilt_deg = get_field_or<double>(j, "phi_tilt_deg", "antenna", a.phi_tilt_deg);
    a.validate();
    return a;
}

}  // namespace

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json txs = ordered_json::array();
    for (const Transmitter& t : s.transmitters) {
        ordered_json jt{{"x", t.x},
                        {"y", t.y},
                        {"height_m", t.height_m},
                        {"power_dbm", t.power_dbm},
                        {"freq_mhz", t.freq_mhz}};
        if (t.antenna) jt["antenna"] = antenna_to_json(*t.antenna);
        txs.push_back(jt);
    }
    return ordered_json{{"grid", grid_to_json(s.grid)},
                        {"transmitters", txs},
                        {"propagation",
                         ordered_json{{"intercept_db", s.prop.intercept_db},
                                      {"exponent", s.prop.exponent},
                                      {"shadow_sigma_db", s.prop.shadow_sigma_db},
                                      {"decorr_dist_m", s.prop.decorr_dist_m}}},
                        {"seed", s.seed}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
    check_keys(j, {"grid", "transmitters", "propagation", "seed"}, "scenario");
    Scenario s;
    s.grid = grid_from_json(j.at("grid"));
    if (!j.contains("transmitters") || !j.at("transmitters").is_array())
        throw InvalidInput("scenario: 'transmitters' must be an array");
    for (const auto& jt : j.at("transmitters")) {
        check_keys(jt, {"x", "y", "height_m", "power_dbm", "freq_mhz", "antenna"}, "transmitter");
        Transmitter t;
        t.x = get_field<double>(jt, "x", "transmitter");
        t.y = get_field<double>(jt, "y", "transmitter");
        t.height_m = get_field_or<double>(jt, "height_m", "transmitter", t.height_m);
        t.power_dbm = get_field<double>(jt, "power_dbm", "transmitter");
        t.freq_mhz = get_field_or<double>(jt, "freq_mhz", "transmitter", t.freq_mhz);
        if (jt.contains("antenna")) t.antenna = antenna_from_json(jt.at("antenna"));
        s.transmitters.push_back(t);
    }
    const nlohmann::json& jp = j.contains("propagation") ? j.at("propagation") : nlohmann::json::object();
    check_keys(jp, {"intercept_db", "exponent", "shadow_sigma_db", "decorr_dist_m"}, "propagation");
    s.prop.intercept_db = get_field_or<double>(jp, "intercept_db", "propagation", s.prop.intercept_db);
    s.prop.exponent = get_field_or<double>(jp, "exponent", "propagation", s.prop.exponent);
    s.prop.shadow_sigma_db = get_field_or<double>(jp, "shadow_sigma_db", "propagation", s.prop.shadow_sigma_db);
    s.prop.decorr_dist_m = get_field_or<double>(jp, "decorr_dist_m", "propagation", s.prop.decorr_dist_m);
    s.seed = get_field_or<uint64_t>(j, "seed", "scenario", 0);
    s.validate();
    return s;
}

ordered_json mask_to_json(const MaskSpec& m) {
    ordered_json j;
    switch (m.kind) {
        case MaskSpec::Kind::UniformRandom:
            j["kind"] = "uniform_random";
            j["fraction"] = m.fraction;
            break;
        case MaskSpec::Kind::ClusterHoles:
            j["kind"] = "cluster_holes";
            j["n_holes"] = m.n_holes;
            j["hole_radius_bins"] = m.hole_radius_bins;
            break;
        case MaskSpec::Kind::PathTrace:
            j["kind"] = "path_trace";
            j["n_points"] = m.n_points;
            break;
    }
    j["seed"] = m.seed;
    return j;
}

MaskSpec mask_from_json(const nlohmann::json& j) {
    check_keys(j, {"kind", "fraction", "n_holes", "hole_radius_bins", "n_points", "seed"}, "mask");
    MaskSpec m;
    const std::string kind = get_field<std::string>(j, "kind", "mask");
    if (kind == "uniform_random") {
        m.kind = MaskSpec::Kind::UniformRandom;
        m.fraction = get_field<double>(j, "fraction", "mask");
    } else if (kind == "cluster_holes") {
        m.kind = MaskSpec::Kind::ClusterHoles;
        m.n_holes = get_field<int>(j, "n_holes", "mask");
        m.hole_radius_bins = get_field<double>(j, "hole_radius_bins", "mask");
    } else if (kind == "path_trace") {
        m.kind = MaskSpec::Kind::PathTrace;
        m.n_points = get_field<int>(j, "n_points", "mask");
    } else {
        throw InvalidInput("mask: kind must be uniform_random, cluster_holes or path_trace");
    }
    m.seed = get_field_or<uint64_t>(j, "seed", "mask", 0);
    m.validate();
    return m;
}

const std::vector<std::string>& feature_keys() {
    static const std::vector<std::string> keys = {
        "new_unseen_scenario", "representative", "dimensionality", "correlated",
        "env_params_known", "tx_power_known", "snr_known", "antenna_info_known",
        "network_geometry_known", "tx_locations_known", "low_rank_matrix", "smooth_surface",
        "extrapolation_needed", "targets_inside_hull", "many_latent_features",
        "latent_prior_known", "similar_domain_data_available"};
    return keys;
}

ScenarioFeatures features_from_json(const nlohmann::json& j) {
    check_keys(j, feature_keys(), "features");
    ScenarioFeatures f;
    auto b = [&](const char* key, bool& field) {
        if (j.contains(key)) field = get_field<bool>(j, key, "features");
    };
    b("new_unseen_scenario", f.new_unseen_scenario);
    b("representative", f.representative);
    b("correlated", f.correlated);
    b("env_params_known", f.env_params_known);
    b("tx_power_known", f.tx_power_known);
    b("snr_known", f.snr_known);
    b("antenna_info_known", f.antenna_info_known);
    b("network_geometry_known", f.network_geometry_known);
    b("tx_locations_known", f.tx_locations_known);
    b("low_rank_matrix", f.low_rank_matrix);
    b("smooth_surface", f.smooth_surface);
    b("extrapolation_needed", f.extrapolation_needed);
    b("targets_inside_hull", f.targets_inside_hull);
    b("many_latent_features", f.many_latent_features);
    b("latent_prior_known", f.latent_prior_known);
    b("similar_domain_data_available", f.similar_domain_data_available);
    if (j.contains("dimensionality")) {
        const std::string d = get_field<std::string>(j, "dimensionality", "features");
        if (d == "low")
            f.dimensionality = Dimensionality::Low;
        else if (d == "high")
            f.dimensionality = Dimensionality::High;
        else
            throw InvalidInput("features: dimensionality must be 'low' or 'high'");
    }
    return f;
}

ordered_json recommendation_to_json(const Recommendation& rec) {
    ordered_json methods = ordered_json::array();
    ordered_json advisory = ordered_json::array();
    for (MethodLabel m : rec.methods) {
        methods.push_back(to_string(m));
        if (is_advisory(m)) advisory.push_back(to_string(m));
    }
    ordered_json path = ordered_json::array();
    for (const PathStep& s : rec.path)
        path.push_back(ordered_json{{"node", s.node}, {"answer", s.answer}});
    return ordered_json{{"methods", methods}, {"advisory", advisory}, {"path", path}};
}

namespace {

Neighborhood neighborhood_from_json(const nlohmann::json& j, const std::string& context) {
    const bool has_k = j.contains("k_nearest");
    const bool has_r = j.contains("radius_m");
    if (has_k && has_r) throw InvalidInput(context + ": k_nearest and radius_m are exclusive");
    if (has_k) return KNearest{get_field<int>(j, "k_nearest", context)};
    if (has_r) return Radius{get_field<double>(j, "radius_m", context)};
    return AllSamples{};
}

void neighborhood_to_json(const Neighborhood& n, ordered_json& j) {
    if (const KNearest* k = std::get_if<KNearest>(&n))
        j["k_nearest"] = k->n;
    else if (const Radius* r = std::get_if<Radius>(&n))
        j["radius_m"] = r->r_m;
}

}  // namespace

ReconstructMethod method_from_json(const nlohmann::json& j) {
    ReconstructMethod m;
    m.name = get_field<std::string>(j, "name", "method");
    const std::string ctx = "method '" + m.name + "'";

    if (m.name == "idw") {
        check_keys(j, {"name", "power", "k_nearest", "radius_m"}, ctx);
        m.idw.power = get_field_or<double>(j, "power", ctx, m.idw.power);
        m.idw.neighborhood = neighborhood_from_json(j, ctx);
    } else if (m.name == "adaptive_idw") {
        check_keys(j, {"name", "r_max", "neighborhood", "area_m2", "categories"}, ctx);
        m.aidw.r_max = get_field_or<double>(j, "r_max", ctx, m.aidw.r_max);
        m.aidw.neighborhood = get_field_or<int>(j, "neighborhood", ctx, m.aidw.neighborhood);
        m.aidw.area_m2 = get_field_or<double>(j, "area_m2", ctx, m.aidw.area_m2);
        if (j.contains("categories")) {
            m.aidw.categories.clear();
            for (const auto& c : j.at("categories")) {
                if (!c.is_array() || c.size() != 2)
                    throw InvalidInput(ctx + ": categories must be [center, power] pairs");
                m.aidw.categories.push_back({c[0].get<double>(), c[1].get<double>()});
            }
        }
    } else if (m.name == "gids") {
        check_keys(j, {"name", "neighborhood", "use_elevation"}, ctx);
        m.gids.neighborhood = get_field_or<int>(j, "neighborhood", ctx, m.gids.neighborhood);
        m.gids.use_elevation = get_field_or<bool>(j, "use_elevation", ctx, false);
    } else if (m.name == "msm") {
        check_keys(j, {"name", "r_w_m", "r_v_m", "power", "nodal"}, ctx);
        m.msm_r_w_m = get_field_or<double>(j, "r_w_m", ctx, 0.0);
        m.msm_r_v_m = get_field_or<double>(j, "r_v_m", ctx, 0.0);
        m.msm_power = get_field_or<double>(j, "power", ctx, m.msm_power);
        const std::string nodal = get_field_or<std::string>(j, "nodal", ctx, "local_linear");
        if (nodal == "constant")
            m.msm_nodal = MsmConfig::Nodal::Constant;
        else if (nodal == "local_linear")
            m.msm_nodal = MsmConfig::Nodal::LocalLinear;
        else
            throw InvalidInput(ctx + ": nodal must be 'constant' or 'local_linear'");
    } else if (m.name == "tps" || m.name == "splines") {
        check_keys(j, {"name", "lambda"}, ctx);
        m.tps.lambda = get_field_or<double>(j, "lambda", ctx, 0.0);
    } else if (m.name == "kriging") {
        check_keys(j,
                   {"name", "n_lags", "max_lag_fraction", "k_nearest", "fit_weighting",
                    "variogram", "pin_nugget_zero"},
                   ctx);
        m.kriging.n_lags = get_field_or<int>(j, "n_lags", ctx, m.kriging.n_lags);
        m.kriging.max_lag_fraction =
            get_field_or<double>(j, "max_lag_fraction", ctx, m.kriging.max_lag_fraction);
        if (j.contains("k_nearest")) {
            const int k = get_field<int>(j, "k_nearest", ctx);
            m.kriging.neighborhood = k > 0 ? Neighborhood(KNearest{k}) : Neighborhood(AllSamples{});
        }
        const std::string fw = get_field_or<std::string>(j, "fit_weighting", ctx, "pair_count");
        if (fw == "pair_count")
            m.kriging.fit_weighting = KrigingConfig::FitWeighting::PairCount;
        else if (fw == "equal")
            m.kriging.fit_weighting = KrigingConfig::FitWeighting::Equal;
        else
            throw InvalidInput(ctx + ": fit_weighting must be 'pair_count' or 'equal'");
        const std::string vk = get_field_or<std::string>(j, "variogram", ctx, "exponential");
        if (vk == "exponential")
            m.variogram_kind = VariogramKind::Exponential;
        else if (vk == "spherical")
            m.variogram_kind = VariogramKind::Spherical;
        else if (vk == "gaussian")
            m.variogram_kind = VariogramKind::Gaussian;
        else
            throw InvalidInput(ctx + ": variogram must be exponential, spherical or gaussian");
        m.pin_nugget_zero = get_field_or<bool>(j, "pin_nugget_zero", ctx, false);
    } else if (m.name == "svt") {
        check_keys(j, {"name", "eta", "delta", "zeta", "phi", "max_iters", "alpha", "i0"}, ctx);
        m.svt.eta = get_field_or<double>(j, "eta", ctx, 0.0);
        m.svt.delta = get_field_or<double>(j, "delta", ctx, 0.0);
        m.svt.zeta = get_field_or<double>(j, "zeta", ctx, m.svt.zeta);
        m.svt.phi = get_field_or<double>(j, "phi", ctx, m.svt.phi);
        m.svt.max_iters = get_field_or<int>(j, "max_iters", ctx, m.svt.max_iters);
        m.svt.alpha = get_field_or<int>(j, "alpha", ctx, m.svt.alpha);
        m.svt.i0 = get_field_or<double>(j, "i0", ctx, 0.0);
    } else if (m.name == "fpc") {
        check_keys(j, {"name", "mu", "tau", "max_iters", "zeta", "phi"}, ctx);
        m.fpc.mu = get_field_or<double>(j, "mu", ctx, 0.0);
        m.fpc.tau = get_field_or<double>(j, "tau", ctx, m.fpc.tau);
        m.fpc.max_iters = get_field_or<int>(j, "max_iters", ctx, m.fpc.max_iters);
        m.fpc.zeta = get_field_or<double>(j, "zeta", ctx, m.fpc.zeta);
        m.fpc.phi = get_field_or<double>(j, "phi", ctx, m.fpc.phi);
    } else if (m.name == "natural_neighbor") {
        check_keys(j, {"name", "strict"}, ctx);
        m.natural_strict = get_field_or<bool>(j, "strict", ctx, true);
    } else if (m.name == "stm") {
        check_keys(j, {"name", "a0_halfwidth", "a1_halfwidth", "calibrate_p_t", "p_t_halfwidth"}, ctx);
        m.stm_a0_halfwidth = get_field_or<double>(j, "a0_halfwidth", ctx, m.stm_a0_halfwidth);
        m.stm_a1_halfwidth = get_field_or<double>(j, "a1_halfwidth", ctx, m.stm_a1_halfwidth);
        m.stm_calibrate_p_t = get_field_or<bool>(j, "calibrate_p_t", ctx, false);
        m.stm_p_t_halfwidth = get_field_or<double>(j, "p_t_halfwidth", ctx, m.stm_p_t_halfwidth);
    } else if (m.name == "nearest" || m.name == "rss" || m.name == "rssd") {
        check_keys(j, {"name"}, ctx);
    } else {
        std::string known;
        for (const std::string& n : implemented_method_names()) known += (known.empty() ? "" : ", ") + n;
        throw InvalidInput("method: unknown name '" + m.name + "' (implemented: " + known + ")");
    }
    return m;
}

ordered_json method_to_json(const ReconstructMethod& m) {
    ordered_json j{{"name", m.name}};
    if (m.name == "idw") {
        j["power"] = m.idw.power;
        neighborhood_to_json(m.idw.neighborhood, j);
    } else if (m.name == "adaptive_idw") {
        j["r_max"] = m.aidw.r_max;
        j["neighborhood"] = m.aidw.neighborhood;
        if (m.aidw.area_m2 > 0.0) j["area_m2"] = m.aidw.area_m2;
    } else if (m.name == "gids") {
        j["neighborhood"] = m.gids.neighborhood;
        j["use_elevation"] = m.gids.use_elevation;
    } else if (m.name == "msm") {
        if (m.msm_r_w_m > 0.0) j["r_w_m"] = m.msm_r_w_m;
        if (m.msm_r_v_m > 0.0) j["r_v_m"] = m.msm_r_v_m;
        j["power"] = m.msm_power;
        j["nodal"] = m.msm_nodal == MsmConfig::Nodal::Constant ? "constant" : "local_linear";
    } else if (m.name == "tps" || m.name == "splines") {
        j["lambda"] = m.tps.lambda;
    } else if (m.name == "kriging") {
        j["n_lags"] = m.kriging.n_lags;
        j["max_lag_fraction"] = m.kriging.max_lag_fraction;
        if (const KNearest* k = std::get_if<KNearest>(&m.kriging.neighborhood)) j["k_nearest"] = k->n;
        j["fit_weighting"] = m.kriging.fit_weighting == KrigingConfig::FitWeighting::PairCount
                                 ? "pair_count"
                                 : "equal";
        j["variogram"] = m.variogram_kind == VariogramKind::Exponential ? "exponential"
                         : m.variogram_kind == VariogramKind::Spherical ? "spherical"
                                                                        : "gaussian";
        j["pin_nugget_zero"] = m.pin_nugget_zero;
    } else if (m.name == "svt") {
        if (m.svt.eta > 0.0) j["eta"] = m.svt.eta;
        if (m.svt.delta > 0.0) j["delta"] = m.svt.delta;
        j["zeta"] = m.svt.zeta;
        j["phi"] = m.svt.phi;
        j["max_iters"] = m.svt.max_iters;
        j["alpha"] = m.svt.alpha;
    } else if (m.name == "fpc") {
        if (m.fpc.mu > 0.0) j["mu"] = m.fpc.mu;
        j["tau"] = m.fpc.tau;
        j["max_iters"] = m.fpc.max_iters;
        j["zeta"] = m.fpc.zeta;
        j["phi"] = m.fpc.phi;
    } else if (m.name == "natural_neighbor") {
        j["strict"] = m.natural_strict;
    } else if (m.name == "stm") {
        j["a0_halfwidth"] = m.stm_a0_halfwidth;
        j["a1_halfwidth"] = m.stm_a1_halfwidth;
        j["calibrate_p_t"] = m.stm_calibrate_p_t;
        if (m.stm_calibrate_p_t) j["p_t_halfwidth"] = m.stm_p_t_halfwidth;
    }
    return j;
}

BenchmarkRun benchmark_run_from_json(const nlohmann::json& j) {
    check_keys(j, {"scenario", "mask", "methods", "seeds", "n_seeds", "scope", "threads", "assertions"},
               "benchmark");
    BenchmarkRun run;
    if (!j.contains("scenario")) throw InvalidInput("benchmark: missing 'scenario'");
    run.config.scenario = scenario_from_json(j.at("scenario"));
    if (!j.contains("mask")) throw InvalidInput("benchmark: missing 'mask'");
    run.config.mask = mask_from_json(j.at("mask"));
    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
        throw InvalidInput("benchmark: 'methods' must be a non-empty array");
    for (const auto& jm : j.at("methods")) run.config.methods.push_back(method_from_json(jm));

    if (j.contains("seeds") && j.contains("n_seeds"))
        throw InvalidInput("benchmark: 'seeds' and 'n_seeds' are exclusive");
    if (j.contains("seeds")) {
        for (const auto& s : j.at("seeds")) run.config.seeds.push_back(s.get<uint64_t>());
    } else if (j.contains("n_seeds")) {
        const int n = get_field<int>(j, "n_seeds", "benchmark");
        if (n < 1) throw InvalidInput("benchmark: n_seeds must be >= 1");
        for (int s = 1; s <= n; ++s) run.config.seeds.push_back(static_cast<uint64_t>(s));
    } else {
        throw InvalidInput("benchmark: provide 'seeds' or 'n_seeds'");
    }

    const std::string scope = get_field_or<std::string>(j, "scope", "benchmark", "missing_only");
    if (scope == "missing_only")
        run.config.scope = MetricScope::MissingOnly;
    else if (scope == "all")
        run.config.scope = MetricScope::All;
    else
        throw InvalidInput("benchmark: scope must be 'missing_only' or 'all'");
    run.config.threads = get_field_or<int>(j, "threads", "benchmark", 0);

    if (j.contains("assertions")) {
        for (const auto& ja : j.at("assertions")) {
            check_keys(ja, {"metric", "order", "min_success_fraction"}, "assertion");
            OrderingAssertion a;
            a.metric = get_field_or<std::string>(ja, "metric", "assertion", "rmse");
            if (!ja.contains("order") || !ja.at("order").is_array())
                throw InvalidInput("assertion: 'order' must be an array of method names");
            for (const auto& m : ja.at("order")) a.method_order.push_back(m.get<std::string>());
            a.min_success_fraction =
                get_field_or<double>(ja, "min_success_fraction", "assertion", 0.9);
            run.assertions.push_back(std::move(a));
        }
    }
    run.config.validate();
    return run;
}

namespace {
ordered_json metrics_to_json(const Metrics& m) {
    return ordered_json{{"rmse", m.rmse},
                        {"mae", m.mae},
                        {"rmae", m.rmae},
                        {"rel_frob", m.rel_frob},
                        {"n_evaluated", m.n_evaluated}};
}
}  // namespace

ordered_json report_to_json(const BenchmarkReport& report, const ordered_json& config_echo,
                            const std::vector<AssertionResult>& assertions) {
    ordered_json cells = ordered_json::array();
    for (const BenchmarkCell& c : report.cells) {
        ordered_json jc{{"method", c.method}, {"seed", c.seed}, {"ok", c.ok}};
        if (c.ok) {
            jc["metrics"] = metrics_to_json(c.metrics);
            if (c.scope_fell_back_to_all) jc["scope_fell_back_to_all"] = true;
        } else {
            jc["fail_reason"] = c.fail_reason;
        }
        cells.push_back(std::move(jc));
    }
    ordered_json aggs = ordered_json::array();
    for (const MethodAggregate& a : report.aggregates) {
        aggs.push_back(ordered_json{{"method", a.method},
                                    {"n_ok", a.n_ok},
                                    {"n_failed", a.n_failed},
                                    {"mean", metrics_to_json(a.mean)},
                                    {"std", metrics_to_json(a.stddev)}});
    }
    ordered_json ja = ordered_json::array();
    for (const AssertionResult& a : assertions)
        ja.push_back(ordered_json{{"description", a.description}, {"pass", a.pass}, {"details", a.details}});

    return ordered_json{{"tool", ordered_json{{"name", kToolName}, {"version", kToolVersion}}},
                        {"config", config_echo},
                        {"cells", cells},
                        {"aggregates", aggs},
                        {"assertions", ja}};
}

std::string report_to_csv(const BenchmarkReport& report) {
    std::string out = "method,seed,metric,value\n";
    auto row = [&](const BenchmarkCell& c, const char* metric, double v) {
        out += c.method;
        out += ',';
        out += std::to_string(c.seed);
        out += ',';
        out += metric;
        out += ',';
        out += fmt6(v);
        out += '\n';
    };
    for (const BenchmarkCell& c : report.cells) {
        if (!c.ok) continue;
        row(c, "rmse", c.metrics.rmse);
        row(c, "mae", c.metrics.mae);
        row(c, "rmae", c.metrics.rmae);
        row(c, "rel_frob", c.metrics.rel_frob);
        row(c, "n_evaluated", static_cast<double>(c.metrics.n_evaluated));
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out << content;
    if (!out) throw InvalidInput("write failed: " + path);
}

nlohmann::json parse_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports "at line L, column C" in what(); surface it.
        throw InvalidInput(std::string("invalid JSON in ") + path + ": " + e.what());
    }
}

}  // namespace remaug::io

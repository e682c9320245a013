#include "remaug/selector.hpp"

#include <functional>

#include "remaug/errors.hpp"

namespace remaug {

const char* to_string(MethodLabel m) {
    switch (m) {
        case MethodLabel::SNR_METHOD: return "SNR_METHOD";
        case MethodLabel::STM: return "STM";
        case MethodLabel::AOA: return "AOA";
        case MethodLabel::RSSD: return "RSSD";
        case MethodLabel::RSS: return "RSS";
        case MethodLabel::TRIANGLE: return "TRIANGLE";
        case MethodLabel::ARC_CLUSTER: return "ARC_CLUSTER";
        case MethodLabel::MATRIX_COMPLETION: return "MATRIX_COMPLETION";
        case MethodLabel::KRIGING: return "KRIGING";
        case MethodLabel::GIDS: return "GIDS";
        case MethodLabel::MSM: return "MSM";
        case MethodLabel::SPLINES: return "SPLINES";
        case MethodLabel::IDW: return "IDW";
        case MethodLabel::NEAREST: return "NEAREST";
        case MethodLabel::NATURAL_NEIGHBOR: return "NATURAL_NEIGHBOR";
        case MethodLabel::VAE: return "VAE";
        case MethodLabel::GAN: return "GAN";
        case MethodLabel::TRANSFER_LEARNING: return "TRANSFER_LEARNING";
        case MethodLabel::FEW_SHOT: return "FEW_SHOT";
        case MethodLabel::SIMULATOR: return "SIMULATOR";
        case MethodLabel::TESTBED: return "TESTBED";
        case MethodLabel::MOBILE_APP: return "MOBILE_APP";
    }
    return "?";
}

bool is_advisory(MethodLabel m) {
    switch (m) {
        case MethodLabel::TRIANGLE:
        case MethodLabel::ARC_CLUSTER:
        case MethodLabel::VAE:
        case MethodLabel::GAN:
        case MethodLabel::TRANSFER_LEARNING:
        case MethodLabel::FEW_SHOT:
        case MethodLabel::SIMULATOR:
        case MethodLabel::TESTBED:
        case MethodLabel::MOBILE_APP:
            return true;
        default:
            return false;
    }
}

namespace {

// One traversal routine serves both select() (answers from the features) and
// replay() (answers from a recorded path).
struct Walker {
    std::function<bool(const std::string&)> ask;
    std::vector<PathStep> path;

    bool yes(const std::string& node) {
        const bool a = ask(node);
        path.push_back({node, a ? "yes" : "no"});
        return a;
    }
};

Recommendation traverse(Walker& w) {
    Recommendation rec;
    auto leaf = [&](std::initializer_list<MethodLabel> methods) {
        rec.methods.assign(methods);
        rec.path = w.path;
        return rec;
    };

    if (w.yes("new_unseen_scenario")) return leaf({MethodLabel::SIMULATOR, MethodLabel::TESTBED});
    if (!w.yes("representative"))
        return leaf({MethodLabel::SIMULATOR, MethodLabel::TESTBED, MethodLabel::MOBILE_APP});

    const bool low_dim = w.yes("low_dimensional");
    const bool correlated = low_dim ? w.yes("correlated") : false;

    if (low_dim && correlated) {
        if (w.yes("env_params_known") && w.yes("tx_power_known")) {
            if (w.yes("snr_known")) return leaf({MethodLabel::SNR_METHOD});
            if (w.yes("antenna_info_known")) return leaf({MethodLabel::STM});
            return leaf({MethodLabel::AOA, MethodLabel::RSSD, MethodLabel::RSS});
        }
        if (w.yes("network_geometry_known")) {
            if (w.yes("tx_locations_known")) return leaf({MethodLabel::TRIANGLE});
            return leaf({MethodLabel::ARC_CLUSTER});
        }
        if (w.yes("low_rank_matrix")) return leaf({MethodLabel::MATRIX_COMPLETION});

        const bool smooth = w.yes("smooth_surface");
        const bool extrapolate = w.yes("extrapolation_needed");
        if (smooth && extrapolate)
            return leaf({MethodLabel::KRIGING, MethodLabel::GIDS, MethodLabel::MSM,
                         MethodLabel::SPLINES});
        if (!smooth && extrapolate)
            return leaf({MethodLabel::KRIGING, MethodLabel::GIDS, MethodLabel::MSM});
        const bool hull = w.yes("targets_inside_hull");
        if (smooth) {
            if (hull)
                return leaf({MethodLabel::KRIGING, MethodLabel::GIDS, MethodLabel::MSM,
                             MethodLabel::SPLINES, MethodLabel::IDW, MethodLabel::NEAREST,
                             MethodLabel::NATURAL_NEIGHBOR, MethodLabel::MATRIX_COMPLETION});
            return leaf({MethodLabel::KRIGING, MethodLabel::GIDS, MethodLabel::MSM,
                         MethodLabel::SPLINES, MethodLabel::IDW, MethodLabel::NEAREST,
                         MethodLabel::MATRIX_COMPLETION});
        }
        if (hull)
            return leaf({MethodLabel::KRIGING, MethodLabel::GIDS, MethodLabel::MSM,
                         MethodLabel::NEAREST, MethodLabel::NATURAL_NEIGHBOR});
        return leaf({MethodLabel::KRIGING, MethodLabel::GIDS, MethodLabel::MSM,
                     MethodLabel::NEAREST});
    }

    // High-dimensional data and uncorrelated low-dimensional data share the
    // ML-oriented block.
    if (w.yes("many_latent_features")) {
        if (w.yes("latent_prior_known")) return leaf({MethodLabel::VAE});
        return leaf({MethodLabel::GAN});
    }
    if (w.yes("data_prior_known")) {
        if (w.yes("similar_domain_data_available")) return leaf({MethodLabel::TRANSFER_LEARNING});
        return leaf({MethodLabel::FEW_SHOT});
    }
    return leaf({MethodLabel::SIMULATOR, MethodLabel::TESTBED, MethodLabel::MOBILE_APP});
}

}  // namespace

Recommendation select(const ScenarioFeatures& f) {
    Walker w;
    w.ask = [&](const std::string& node) -> bool {
        if (node == "new_unseen_scenario") return f.new_unseen_scenario;
        if (node == "representative") return f.representative;
        if (node == "low_dimensional") return f.dimensionality == Dimensionality::Low;
        if (node == "correlated") return f.correlated;
        if (node == "env_params_known") return f.env_params_known;
        if (node == "tx_power_known") return f.tx_power_known;
        if (node == "snr_known") return f.snr_known;
        if (node == "antenna_info_known") return f.antenna_info_known;
        if (node == "network_geometry_known") return f.network_geometry_known;
        if (node == "tx_locations_known") return f.tx_locations_known;
        if (node == "low_rank_matrix") return f.low_rank_matrix;
        if (node == "smooth_surface") return f.smooth_surface;
        if (node == "extrapolation_needed") return f.extrapolation_needed;
        if (node == "targets_inside_hull") return f.targets_inside_hull;
        if (node == "many_latent_features") return f.many_latent_features;
        if (node == "latent_prior_known") return f.latent_prior_known;
        if (node == "similar_domain_data_available") return f.similar_domain_data_available;
        // The flowchart's generic "prior knowledge about the data
        // distribution" question; the feature vocabulary carries it as
        // latent_prior_known.
        if (node == "data_prior_known") return f.latent_prior_known;
        throw ComputeError("select: unknown decision node " + node);
    };
    return traverse(w);
}

Recommendation replay(const std::vector<PathStep>& path) {
    size_t next = 0;
    Walker w;
    w.ask = [&](const std::string& node) -> bool {
        if (next >= path.size())
            throw InvalidInput("replay: path exhausted before reaching a leaf");
        const PathStep& step = path[next++];
        if (step.node != node)
            throw InvalidInput("replay: path asks '" + step.node + "' where the tree asks '" +
                               node + "'");
        if (step.answer == "yes") return true;
        if (step.answer == "no") return false;
        throw InvalidInput("replay: unknown answer '" + step.answer + "'");
    };
    Recommendation rec = traverse(w);
    if (next != path.size()) throw InvalidInput("replay: unused trailing path steps");
    return rec;
}

}  // namespace remaug

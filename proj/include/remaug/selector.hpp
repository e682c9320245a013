#pragma once

#include <string>
#include <vector>

namespace remaug {

enum class Dimensionality { Low, High };

/// Answers to the decision-tree questions; unused fields are ignored on
/// paths that never ask them.
struct ScenarioFeatures {
    bool new_unseen_scenario = false;
    bool representative = false;
    Dimensionality dimensionality = Dimensionality::Low;
    bool correlated = false;
    bool env_params_known = false;
    bool tx_power_known = false;
    bool snr_known = false;
    bool antenna_info_known = false;
    bool network_geometry_known = false;
    bool tx_locations_known = false;
    bool low_rank_matrix = false;
    bool smooth_surface = false;
    bool extrapolation_needed = false;
    bool targets_inside_hull = false;
    bool many_latent_features = false;
    bool latent_prior_known = false;
    bool similar_domain_data_available = false;
};

enum class MethodLabel {
    SNR_METHOD,
    STM,
    AOA,
    RSSD,
    RSS,
    TRIANGLE,
    ARC_CLUSTER,
    MATRIX_COMPLETION,
    KRIGING,
    GIDS,
    MSM,
    SPLINES,
    IDW,
    NEAREST,
    NATURAL_NEIGHBOR,
    VAE,
    GAN,
    TRANSFER_LEARNING,
    FEW_SHOT,
    SIMULATOR,
    TESTBED,
    MOBILE_APP,
};

const char* to_string(MethodLabel m);

/// Labels with no implementation behind them here (ML family, conceptual
/// geometry sketches, data-sourcing options); returned for guidance only.
bool is_advisory(MethodLabel m);

struct PathStep {
    std::string node;
    std::string answer;
};

struct Recommendation {
    std::vector<MethodLabel> methods;  // non-empty, display order
    std::vector<PathStep> path;        // traversal trace
};

/// Deterministic traversal of the selection flowchart. Total: every feature
/// combination reaches a leaf with at least one label.
Recommendation select(const ScenarioFeatures& f);

/// Re-walk the tree taking the recorded answers; used to check that `path`
/// reproduces `methods`.
Recommendation replay(const std::vector<PathStep>& path);

}  // namespace remaug

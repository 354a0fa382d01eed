#pragma once

#include <string>
#include <vector>

#include "itpnet/data.hpp"

namespace itpnet {

enum class LossFamily { LaplaceCe, SmoothL1Margin };

LossFamily loss_family_from(const std::string& name);
std::string to_string(LossFamily f);

/// Everything a training run needs. Defaults are the small-scale profile:
/// d=64, 3 NRR blocks, N=4/C=2, K=6 modes over M=12 future steps from T=2
/// observed points, alpha=beta=0.1.
struct TrainConfig {
    int T = 2;
    int N = 4;
    int M = 12;
    int K = 6;
    int C = 2;
    int L = 3;
    int d = 64;
    int heads = 4;
    double delta = 1.0;       // contrastive margin
    double alpha = 0.1;       // L_rec weight
    double beta = 0.1;        // L_cts weight
    double margin_eps = 0.2;  // classification margin (smoothl1-margin family)
    LossFamily loss_family = LossFamily::LaplaceCe;
    bool nrrformer = true;
    std::string activation = "gelu"; // gelu | relu
    bool stop_gradient_targets = false;
    bool positional_encoding = false;
    bool wta_endpoint = false; // endpoint-only winner selection
    double lr = 1e-3;
    int batch_size = 32;
    int steps = 600;
    std::uint64_t seed = 1;
    int checkpoint_every = 200;
    double mr_threshold = 2.0;

    void validate() const;

    /// Canonical JSON: fixed key set, keys sorted, shortest round-trip
    /// doubles. Stable input for hashing and checkpoint embedding.
    std::string canonical_json() const;

    /// FNV-1a 64 of canonical_json(), as 16 hex chars.
    std::string hash() const;
};

struct SweepSpec {
    std::vector<int> n_values{0, 3, 10};
    std::vector<bool> nrr_values{false, true};
    std::vector<bool> l_rec_values{true};
    std::vector<bool> l_cts_values{true};
    std::vector<int> t_values{2};
    std::vector<std::uint64_t> seeds{1, 2, 3};

    void validate() const;
};

/// Full config file: TrainConfig fields at the top level plus optional
/// "dataset" (DatasetSpec) and "sweep" (SweepSpec) objects. Unknown keys
/// anywhere are rejected.
struct CliConfig {
    TrainConfig train;
    DatasetSpec dataset;
    SweepSpec sweep;
};

CliConfig parse_cli_config(const std::string& json_text);
CliConfig load_cli_config(const std::string& path);

} // namespace itpnet

#include "itpnet/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "itpnet/rng.hpp"
#include "json.hpp"

namespace itpnet {

using nlohmann::json;

LossFamily loss_family_from(const std::string& name) {
    if (name == "laplace-ce") return LossFamily::LaplaceCe;
    if (name == "smoothl1-margin") return LossFamily::SmoothL1Margin;
    throw ConfigError("unknown loss family: " + name +
                      " (expected laplace-ce or smoothl1-margin)");
}

std::string to_string(LossFamily f) {
    return f == LossFamily::LaplaceCe ? "laplace-ce" : "smoothl1-margin";
}

void TrainConfig::validate() const {
    if (T < 2) throw ConfigError("TrainConfig: T must be >= 2");
    if (N < 0) throw ConfigError("TrainConfig: N must be >= 0");
    if (M < 1 || K < 1 || C < 1 || L < 1 || d < 1 || heads < 1 || batch_size < 1 || steps < 1)
        throw ConfigError("TrainConfig: M, K, C, L, d, heads, batch_size, steps must be >= 1");
    if (d % heads != 0) throw ConfigError("TrainConfig: d must be divisible by heads");
    if (nrrformer && N == 0)
        throw ConfigError("TrainConfig: the NRRFormer requires N > 0 (undefined at N = 0)");
    if (nrrformer && N > 0 && C >= N)
        throw ConfigError("TrainConfig: compression requires C < N (got C=" + std::to_string(C) +
                          ", N=" + std::to_string(N) + ")");
    if (delta < 0.0 || alpha < 0.0 || beta < 0.0 || margin_eps < 0.0)
        throw ConfigError("TrainConfig: delta, alpha, beta, margin_eps must be >= 0");
    if (lr <= 0.0) throw ConfigError("TrainConfig: lr must be positive");
    if (checkpoint_every < 1) throw ConfigError("TrainConfig: checkpoint_every must be >= 1");
    if (mr_threshold <= 0.0) throw ConfigError("TrainConfig: mr_threshold must be positive");
    if (activation != "gelu" && activation != "relu")
        throw ConfigError("TrainConfig: activation must be gelu or relu");
}

namespace {

json train_to_json(const TrainConfig& c) {
    return json{{"T", c.T},
                {"N", c.N},
                {"M", c.M},
                {"K", c.K},
                {"C", c.C},
                {"L", c.L},
                {"d", c.d},
                {"heads", c.heads},
                {"delta", c.delta},
                {"alpha", c.alpha},
                {"beta", c.beta},
                {"margin_eps", c.margin_eps},
                {"loss_family", to_string(c.loss_family)},
                {"nrrformer", c.nrrformer},
                {"activation", c.activation},
                {"stop_gradient_targets", c.stop_gradient_targets},
                {"positional_encoding", c.positional_encoding},
                {"wta_endpoint", c.wta_endpoint},
                {"lr", c.lr},
                {"batch_size", c.batch_size},
                {"steps", c.steps},
                {"seed", c.seed},
                {"checkpoint_every", c.checkpoint_every},
                {"mr_threshold", c.mr_threshold}};
}

template <class T>
void take(const json& j, std::set<std::string>& seen, const char* key, T& out) {
    if (!j.contains(key)) return;
    seen.insert(key);
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

void reject_unknown(const json& j, const std::set<std::string>& seen, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!seen.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

TrainConfig train_from_json(const json& j) {
    TrainConfig c;
    std::set<std::string> seen;
    take(j, seen, "T", c.T);
    take(j, seen, "N", c.N);
    take(j, seen, "M", c.M);
    take(j, seen, "K", c.K);
    take(j, seen, "C", c.C);
    take(j, seen, "L", c.L);
    take(j, seen, "d", c.d);
    take(j, seen, "heads", c.heads);
    take(j, seen, "delta", c.delta);
    take(j, seen, "alpha", c.alpha);
    take(j, seen, "beta", c.beta);
    take(j, seen, "margin_eps", c.margin_eps);
    std::string family = to_string(c.loss_family);
    take(j, seen, "loss_family", family);
    c.loss_family = loss_family_from(family);
    take(j, seen, "nrrformer", c.nrrformer);
    take(j, seen, "activation", c.activation);
    take(j, seen, "stop_gradient_targets", c.stop_gradient_targets);
    take(j, seen, "positional_encoding", c.positional_encoding);
    take(j, seen, "wta_endpoint", c.wta_endpoint);
    take(j, seen, "lr", c.lr);
    take(j, seen, "batch_size", c.batch_size);
    take(j, seen, "steps", c.steps);
    take(j, seen, "seed", c.seed);
    take(j, seen, "checkpoint_every", c.checkpoint_every);
    take(j, seen, "mr_threshold", c.mr_threshold);
    seen.insert("dataset");
    seen.insert("sweep");
    reject_unknown(j, seen, "train config");
    c.validate();
    return c;
}

DatasetSpec dataset_from_json(const json& j) {
    DatasetSpec s;
    std::set<std::string> seen;
    take(j, seen, "scenes", s.scenes);
    take(j, seen, "w_straight", s.w_straight);
    take(j, seen, "w_turn", s.w_turn);
    take(j, seen, "w_turn_after_straight", s.w_turn_after_straight);
    take(j, seen, "w_lane_change", s.w_lane_change);
    take(j, seen, "speed_lo", s.speed_lo);
    take(j, seen, "speed_hi", s.speed_hi);
    take(j, seen, "turn_lo", s.turn_lo);
    take(j, seen, "turn_hi", s.turn_hi);
    take(j, seen, "sigma", s.sigma);
    take(j, seen, "dt", s.dt);
    take(j, seen, "history_len", s.history_len);
    take(j, seen, "future_len", s.future_len);
    take(j, seen, "seed", s.seed);
    reject_unknown(j, seen, "dataset spec");
    s.validate();
    return s;
}

SweepSpec sweep_from_json(const json& j) {
    SweepSpec s;
    std::set<std::string> seen;
    take(j, seen, "n_values", s.n_values);
    take(j, seen, "nrrformer", s.nrr_values);
    take(j, seen, "l_rec", s.l_rec_values);
    take(j, seen, "l_cts", s.l_cts_values);
    take(j, seen, "t_values", s.t_values);
    take(j, seen, "seeds", s.seeds);
    reject_unknown(j, seen, "sweep spec");
    s.validate();
    return s;
}

} // namespace

void SweepSpec::validate() const {
    if (n_values.empty() || nrr_values.empty() || l_rec_values.empty() || l_cts_values.empty() ||
        t_values.empty() || seeds.empty())
        throw ConfigError("SweepSpec: every grid axis needs at least one value");
}

std::string TrainConfig::canonical_json() const {
    return train_to_json(*this).dump(); // nlohmann sorts object keys
}

std::string TrainConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  (unsigned long long)Rng::fnv1a(canonical_json()));
    return buf;
}

CliConfig parse_cli_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    CliConfig c;
    c.train = train_from_json(j);
    if (j.contains("dataset")) c.dataset = dataset_from_json(j.at("dataset"));
    if (j.contains("sweep")) c.sweep = sweep_from_json(j.at("sweep"));
    return c;
}

CliConfig load_cli_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_cli_config(ss.str());
}

} // namespace itpnet

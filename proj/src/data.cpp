#include "itpnet/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "itpnet/parallel.hpp"
#include "json.hpp"

namespace itpnet {

using nlohmann::json;

void ScenarioSpec::validate() const {
    if (speed_lo <= 0.0 || speed_hi < speed_lo)
        throw ConfigError("ScenarioSpec: speed range must be positive and ordered");
    if (turn_lo < 0.0 || turn_hi < turn_lo)
        throw ConfigError("ScenarioSpec: turn-rate range must be non-negative and ordered");
    if (sigma < 0.0) throw ConfigError("ScenarioSpec: sigma must be >= 0");
    if (dt <= 0.0) throw ConfigError("ScenarioSpec: dt must be positive");
    if (length < 2) throw ConfigError("ScenarioSpec: length must be >= 2");
}

void DatasetSpec::validate() const {
    if (scenes < 1) throw ConfigError("DatasetSpec: scenes must be >= 1");
    const double wsum = w_straight + w_turn + w_turn_after_straight + w_lane_change;
    if (w_straight < 0 || w_turn < 0 || w_turn_after_straight < 0 || w_lane_change < 0 ||
        wsum <= 0.0)
        throw ConfigError("DatasetSpec: mixture weights must be non-negative with positive sum");
    if (history_len < 2 || future_len < 1)
        throw ConfigError("DatasetSpec: history_len must be >= 2 and future_len >= 1");
    ScenarioSpec probe;
    probe.speed_lo = speed_lo;
    probe.speed_hi = speed_hi;
    probe.turn_lo = turn_lo;
    probe.turn_hi = turn_hi;
    probe.sigma = sigma;
    probe.dt = dt;
    probe.length = length();
    probe.validate();
}

ScenarioKind scenario_kind_from(const std::string& name) {
    if (name == "straight") return ScenarioKind::Straight;
    if (name == "constant-turn") return ScenarioKind::ConstantTurn;
    if (name == "turn-after-straight") return ScenarioKind::TurnAfterStraight;
    if (name == "lane-change") return ScenarioKind::LaneChange;
    throw ConfigError("unknown scenario kind: " + name);
}

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Straight: return "straight";
        case ScenarioKind::ConstantTurn: return "constant-turn";
        case ScenarioKind::TurnAfterStraight: return "turn-after-straight";
        case ScenarioKind::LaneChange: return "lane-change";
    }
    return "?";
}

namespace {

// Closed-form constant-speed step: heading integrates the turn rate, and for
// omega != 0 the position moves along the exact circular arc of radius
// v / omega, so turn scenes lie on their circle to machine precision.
Vec2 arc_step(Vec2 p, double& theta, double v, double omega, double dt) {
    if (omega == 0.0)
        return {p.x + v * dt * std::cos(theta), p.y + v * dt * std::sin(theta)};
    const double r = v / omega;
    const double theta2 = theta + omega * dt;
    Vec2 next{p.x + r * (std::sin(theta2) - std::sin(theta)),
              p.y + r * (std::cos(theta) - std::cos(theta2))};
    theta = theta2;
    return next;
}

} // namespace

Trajectory generate_scene(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(Rng::derive(seed, "gen"));
    const double speed = rng.uniform(spec.speed_lo, spec.speed_hi);
    double theta = rng.uniform(-3.141592653589793, 3.141592653589793);
    const double turn_mag = rng.uniform(spec.turn_lo, spec.turn_hi);
    const double turn = rng.uniform() < 0.5 ? turn_mag : -turn_mag;
    Vec2 p{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)};

    const int sw = spec.switch_step >= 0 ? spec.switch_step : spec.length / 2;
    auto omega_at = [&](int step) -> double {
        switch (spec.kind) {
            case ScenarioKind::Straight: return 0.0;
            case ScenarioKind::ConstantTurn: return turn;
            case ScenarioKind::TurnAfterStraight: return step >= sw ? turn : 0.0;
            case ScenarioKind::LaneChange:
                // s-curve: brief turn one way then the counter-turn
                if (step >= sw && step < sw + 3) return turn;
                if (step >= sw + 3 && step < sw + 6) return -turn;
                return 0.0;
        }
        return 0.0;
    };

    Trajectory traj;
    traj.dt = spec.dt;
    traj.points.reserve(std::size_t(spec.length));
    traj.t.reserve(std::size_t(spec.length));
    for (int i = 0; i < spec.length; ++i) {
        traj.t.push_back(i);
        traj.points.push_back(p);
        p = arc_step(p, theta, speed, omega_at(i), spec.dt);
    }
    if (spec.sigma > 0.0)
        for (Vec2& q : traj.points) {
            q.x += rng.normal(0.0, spec.sigma);
            q.y += rng.normal(0.0, spec.sigma);
        }
    return traj;
}

Trajectory generate_mixture_scene(const DatasetSpec& spec, int index) {
    const std::uint64_t scene_seed = Rng::derive(spec.seed, "scene", std::uint64_t(index));
    Rng mix(Rng::derive(scene_seed, "mix"));

    ScenarioSpec s;
    s.speed_lo = spec.speed_lo;
    s.speed_hi = spec.speed_hi;
    s.turn_lo = spec.turn_lo;
    s.turn_hi = spec.turn_hi;
    s.sigma = spec.sigma;
    s.dt = spec.dt;
    s.length = spec.length();

    const double wsum = spec.w_straight + spec.w_turn + spec.w_turn_after_straight +
                        spec.w_lane_change;
    const double u = mix.uniform() * wsum;
    if (u < spec.w_straight) {
        s.kind = ScenarioKind::Straight;
    } else if (u < spec.w_straight + spec.w_turn) {
        s.kind = ScenarioKind::ConstantTurn;
    } else if (u < spec.w_straight + spec.w_turn + spec.w_turn_after_straight) {
        s.kind = ScenarioKind::TurnAfterStraight;
    } else {
        s.kind = ScenarioKind::LaneChange;
    }
    // behavior change lands at the history/future boundary +- 2 steps, so the
    // deep history can genuinely mislead
    s.switch_step = spec.history_len + int(mix.uniform_int(-2, 2));

    Trajectory traj = generate_scene(s, scene_seed);
    char sid[32];
    std::snprintf(sid, sizeof(sid), "scene%06d", index);
    traj.scene_id = sid;
    traj.agent_id = "0";
    return traj;
}

std::vector<Trajectory> generate_dataset(const DatasetSpec& spec) {
    spec.validate();
    std::vector<Trajectory> out(std::size_t(spec.scenes));
    par::parallel_for(std::size_t(spec.scenes),
                      [&](std::size_t i) { out[i] = generate_mixture_scene(spec, int(i)); });
    return out;
}

std::vector<Trajectory> generate_dataset_serial(const DatasetSpec& spec) {
    spec.validate();
    std::vector<Trajectory> out;
    out.reserve(std::size_t(spec.scenes));
    for (int i = 0; i < spec.scenes; ++i) out.push_back(generate_mixture_scene(spec, i));
    return out;
}

int end_aligned_cursor(const Trajectory& traj, int T, int N, int M) {
    const int need = N + T + M;
    const int len = int(traj.points.size());
    if (len < need)
        throw DataError("trajectory " + traj.scene_id + "/" + traj.agent_id + " has " +
                        std::to_string(len) + " points, need " + std::to_string(need));
    return len - need;
}

SegmentedSample segment(const Trajectory& traj, int T, int N, int M, int cursor) {
    if (T < 1 || N < 0 || M < 0 || cursor < 0)
        throw ConfigError("segment: T >= 1, N >= 0, M >= 0, cursor >= 0 required");
    const int need = cursor + N + T + M;
    const int len = int(traj.points.size());
    if (len < need)
        throw DataError("trajectory " + traj.scene_id + "/" + traj.agent_id + " has " +
                        std::to_string(len) + " points, need " + std::to_string(need));
    SegmentedSample s;
    s.x_unobs.assign(traj.points.begin() + cursor, traj.points.begin() + cursor + N);
    s.x_obs.assign(traj.points.begin() + cursor + N, traj.points.begin() + cursor + N + T);
    s.x_gt.assign(traj.points.begin() + cursor + N + T,
                  traj.points.begin() + cursor + N + T + M);
    return s;
}

SegmentedSample normalize_frame(const SegmentedSample& sample) {
    if (sample.x_obs.size() < 2)
        throw ConfigError("normalize_frame: need at least 2 observed points");
    const Vec2 last = sample.x_obs.back();
    const Vec2 h = sample.x_obs[sample.x_obs.size() - 1] - sample.x_obs[sample.x_obs.size() - 2];
    Frame f;
    f.origin = last;
    const double norm = std::hypot(h.x, h.y);
    if (norm > 0.0) {
        f.c = h.x / norm;
        f.s = h.y / norm;
    } // else: identical observed points, fall back to identity rotation

    SegmentedSample out;
    out.frame = f;
    auto map = [&](const std::vector<Vec2>& in, std::vector<Vec2>& dst) {
        dst.reserve(in.size());
        for (Vec2 p : in) dst.push_back(f.apply(p));
    };
    map(sample.x_unobs, out.x_unobs);
    map(sample.x_obs, out.x_obs);
    map(sample.x_gt, out.x_gt);
    return out;
}

namespace {

json traj_to_json(const Trajectory& t) {
    json points = json::array();
    for (std::size_t i = 0; i < t.points.size(); ++i)
        points.push_back(json::array({t.t[i], t.points[i].x, t.points[i].y}));
    return json{{"scene_id", t.scene_id},
                {"agent_id", t.agent_id},
                {"dt", t.dt},
                {"points", std::move(points)}};
}

[[noreturn]] void line_error(const std::string& path, std::size_t line, const std::string& what) {
    throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

Trajectory traj_from_json(const json& j, const std::string& path, std::size_t line) {
    Trajectory t;
    if (!j.is_object()) line_error(path, line, "expected a JSON object");
    if (!j.contains("scene_id") || !j["scene_id"].is_string())
        line_error(path, line, "missing string key scene_id");
    if (!j.contains("agent_id") || !j["agent_id"].is_string())
        line_error(path, line, "missing string key agent_id");
    if (!j.contains("dt") || !j["dt"].is_number() || j["dt"].get<double>() <= 0.0)
        line_error(path, line, "missing positive number key dt");
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
        line_error(path, line, "missing non-empty array key points");
    t.scene_id = j["scene_id"].get<std::string>();
    t.agent_id = j["agent_id"].get<std::string>();
    t.dt = j["dt"].get<double>();
    long long prev_t = 0;
    bool first = true;
    for (const json& p : j["points"]) {
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
            !p[2].is_number())
            line_error(path, line, "each point must be [t_index, x, y]");
        const double traw = p[0].get<double>();
        const long long ti = (long long)std::llround(traw);
        if (double(ti) != traw) line_error(path, line, "t_index must be integral");
        const double x = p[1].get<double>(), y = p[2].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y))
            line_error(path, line, "non-finite coordinate");
        if (!first && ti <= prev_t)
            line_error(path, line, "timestamps must be strictly increasing");
        prev_t = ti;
        first = false;
        t.t.push_back(ti);
        t.points.push_back({x, y});
    }
    return t;
}

std::vector<Trajectory> load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<Trajectory> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(path, lineno, e.what());
        }
        out.push_back(traj_from_json(j, path, lineno));
    }
    return out;
}

std::vector<Trajectory> load_csv(const std::string& path, double dt, bool resort) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) return {}; // empty file -> empty list
    ++lineno;
    if (line == "scene_id,agent_id,t,x,y\r") line.pop_back();
    if (line != "scene_id,agent_id,t,x,y")
        line_error(path, lineno, "expected header scene_id,agent_id,t,x,y");

    struct Row { long long t; Vec2 p; std::size_t line; };
    std::vector<std::pair<std::string, std::string>> order; // first-appearance order
    std::vector<std::vector<Row>> rows;
    std::vector<int> open; // index into rows per key, or -1 once closed (for contiguity checks)
    auto key_index = [&](const std::string& sid, const std::string& aid) -> int {
        for (std::size_t i = 0; i < order.size(); ++i)
            if (order[i].first == sid && order[i].second == aid) return int(i);
        return -1;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 5> cell;
        std::size_t start = 0;
        for (int c = 0; c < 5; ++c) {
            const std::size_t comma = line.find(',', start);
            if (c < 4 && comma == std::string::npos)
                line_error(path, lineno, "expected 5 comma-separated fields");
            if (c == 4 && comma != std::string::npos)
                line_error(path, lineno, "expected 5 comma-separated fields");
            cell[std::size_t(c)] = line.substr(start, comma == std::string::npos
                                                          ? std::string::npos
                                                          : comma - start);
            start = comma + 1;
        }
        Row r;
        try {
            std::size_t used = 0;
            r.t = std::stoll(cell[2], &used);
            if (used != cell[2].size()) throw std::invalid_argument("t");
            r.p.x = std::stod(cell[3], &used);
            if (used != cell[3].size()) throw std::invalid_argument("x");
            r.p.y = std::stod(cell[4], &used);
            if (used != cell[4].size()) throw std::invalid_argument("y");
        } catch (const std::exception&) {
            line_error(path, lineno, "malformed numeric field");
        }
        if (!std::isfinite(r.p.x) || !std::isfinite(r.p.y))
            line_error(path, lineno, "non-finite coordinate");
        r.line = lineno;
        int idx = key_index(cell[0], cell[1]);
        if (idx < 0) {
            idx = int(order.size());
            order.emplace_back(cell[0], cell[1]);
            rows.emplace_back();
        } else if (!resort && !rows[std::size_t(idx)].empty() &&
                   rows[std::size_t(idx)].back().line != lineno - 1) {
            line_error(path, lineno,
                       "rows of " + cell[0] + "/" + cell[1] +
                           " are not contiguous (pass resort to accept shuffled rows)");
        }
        rows[std::size_t(idx)].push_back(r);
    }

    std::vector<Trajectory> out;
    out.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& rs = rows[i];
        if (resort)
            std::stable_sort(rs.begin(), rs.end(),
                             [](const Row& a, const Row& b) { return a.t < b.t; });
        Trajectory t;
        t.scene_id = order[i].first;
        t.agent_id = order[i].second;
        t.dt = dt;
        for (std::size_t k = 0; k < rs.size(); ++k) {
            if (k > 0 && rs[k].t <= rs[k - 1].t)
                line_error(path, rs[k].line,
                           "timestamps must be strictly increasing" +
                               std::string(resort ? " (duplicate t after resort)"
                                                  : " (pass resort to accept shuffled rows)"));
            t.t.push_back(rs[k].t);
            t.points.push_back(rs[k].p);
        }
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace

std::vector<Trajectory> load_scenes(const std::string& path, SceneFormat format, double csv_dt,
                                    bool resort) {
    return format == SceneFormat::Jsonl ? load_jsonl(path) : load_csv(path, csv_dt, resort);
}

void save_scenes_jsonl(const std::vector<Trajectory>& scenes, const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: byte-identical across platforms
    if (!out) throw DataError("cannot write " + path);
    for (const Trajectory& t : scenes) out << traj_to_json(t).dump() << "\n";
    if (!out) throw DataError("write failed for " + path);
}

} // namespace itpnet

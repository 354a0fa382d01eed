#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itpnet/errors.hpp"
#include "itpnet/rng.hpp"

namespace itpnet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

/// One agent's timestamped 2-D track. `t` holds the integer time index per
/// point (strictly increasing); positions are meters.
struct Trajectory {
    std::string scene_id;
    std::string agent_id;
    double dt = 0.5;
    std::vector<long long> t;
    std::vector<Vec2> points;
};

/// Agent-centric similarity transform: translate so `origin` lands on (0,0),
/// then rotate so the heading unit vector (c, s) lands on +x.
struct Frame {
    Vec2 origin{};
    double c = 1.0; // cos of heading angle
    double s = 0.0; // sin of heading angle

    Vec2 apply(Vec2 p) const {
        const double dx = p.x - origin.x, dy = p.y - origin.y;
        return {c * dx + s * dy, -s * dx + c * dy};
    }
    Vec2 invert(Vec2 p) const {
        // rotate first, translate last: a world translation of the frame
        // then shifts outputs by exactly the same floating-point addition
        const double rx = c * p.x - s * p.y;
        const double ry = s * p.x + c * p.y;
        return {origin.x + rx, origin.y + ry};
    }
};

/// Contiguous windows of one trajectory: N unobserved points (time indices
/// -N+1..0), T observed (1..T), M future (T+1..T+M).
struct SegmentedSample {
    std::vector<Vec2> x_unobs;
    std::vector<Vec2> x_obs;
    std::vector<Vec2> x_gt;
    Frame frame; // identity until normalize_frame
};

enum class ScenarioKind { Straight, ConstantTurn, TurnAfterStraight, LaneChange };

/// Parameters for one synthetic scene. Speeds are sampled per scene from
/// [speed_lo, speed_hi]; signed turn rates have magnitude in [turn_lo,
/// turn_hi]. `switch_step` is the step at which turn-after-straight and
/// lane-change scenarios change behavior; negative means length / 2.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Straight;
    double speed_lo = 5.0, speed_hi = 15.0;
    double turn_lo = 0.1, turn_hi = 0.5;
    double sigma = 0.0; // meters, i.i.d. Gaussian position noise on all points
    double dt = 0.5;
    int length = 24;
    int switch_step = -1;

    void validate() const;
};

/// Mixture over scenario kinds for benchmark datasets. Weights follow the
/// synthetic benchmark recipe; the turn onset for turn-after-straight is
/// history_len + jitter in [-2, 2] so the far history misleads.
struct DatasetSpec {
    int scenes = 2000;
    double w_straight = 0.4, w_turn = 0.3, w_turn_after_straight = 0.3, w_lane_change = 0.0;
    double speed_lo = 5.0, speed_hi = 15.0;
    double turn_lo = 0.1, turn_hi = 0.5;
    double sigma = 0.0;
    double dt = 0.5;
    int history_len = 12; // unobs + obs capacity
    int future_len = 12;  // M
    std::uint64_t seed = 7;

    int length() const { return history_len + future_len; }
    void validate() const;
};

ScenarioKind scenario_kind_from(const std::string& name);
std::string to_string(ScenarioKind k);

/// Deterministic kinematic trajectory: constant speed, heading integrates
/// the turn rate, arcs are closed-form so turns lie exactly on circles.
Trajectory generate_scene(const ScenarioSpec& spec, std::uint64_t seed);

/// One scene of the mixture, stream-derived from (spec.seed, index).
Trajectory generate_mixture_scene(const DatasetSpec& spec, int index);

/// All scenes of the mixture. OpenMP fan-out per scene; the serial variant
/// is the reference the parallel one must match byte-for-byte.
std::vector<Trajectory> generate_dataset(const DatasetSpec& spec);
std::vector<Trajectory> generate_dataset_serial(const DatasetSpec& spec);

/// Windows [cursor, cursor+N) / [.., +T) / [.., +M). Throws DataError when
/// the trajectory is shorter than cursor + N + T + M, naming both lengths.
SegmentedSample segment(const Trajectory& traj, int T, int N, int M, int cursor = 0);

/// Cursor placing the windows at the end of the trajectory, so the same
/// observed/future windows are shared by every N (fair N sweeps).
int end_aligned_cursor(const Trajectory& traj, int T, int N, int M);

/// Agent-centric normalization: last observed point to the origin, observed
/// heading (x_obs[T-1] - x_obs[T-2]) to +x. Zero heading falls back to the
/// identity rotation. The transform is kept so predictions map back to the
/// world frame.
SegmentedSample normalize_frame(const SegmentedSample& sample);

/// JSONL: one object per line, keys scene_id, agent_id, dt, points
/// ([t_index, x, y] triples). CSV: header scene_id,agent_id,t,x,y; dt is not
/// representable in CSV and must be supplied. `resort` allows out-of-order
/// rows to be sorted by t instead of rejected.
enum class SceneFormat { Jsonl, Csv };
std::vector<Trajectory> load_scenes(const std::string& path, SceneFormat format,
                                    double csv_dt = 0.5, bool resort = false);
void save_scenes_jsonl(const std::vector<Trajectory>& scenes, const std::string& path);

} // namespace itpnet

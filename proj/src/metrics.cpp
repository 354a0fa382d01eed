#include "itpnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "itpnet/parallel.hpp"

namespace itpnet {

namespace {

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void check_horizons(const std::vector<std::vector<Vec2>>& candidates,
                    const std::vector<Vec2>& gt, const char* what) {
    if (candidates.empty()) throw ShapeError(std::string(what) + ": no candidates");
    if (gt.empty()) throw ShapeError(std::string(what) + ": empty ground truth");
    for (const auto& c : candidates)
        if (c.size() != gt.size())
            throw ShapeError(std::string(what) + ": candidate horizon " +
                             std::to_string(c.size()) + " vs ground truth " +
                             std::to_string(gt.size()));
}

} // namespace

double min_ade(const std::vector<std::vector<Vec2>>& candidates, const std::vector<Vec2>& gt) {
    check_horizons(candidates, gt, "min_ade");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        double sum = 0.0;
        for (std::size_t i = 0; i < gt.size(); ++i) sum += dist(c[i], gt[i]);
        best = std::min(best, sum / double(gt.size()));
    }
    return best;
}

double min_fde(const std::vector<std::vector<Vec2>>& candidates, const std::vector<Vec2>& gt) {
    check_horizons(candidates, gt, "min_fde");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) best = std::min(best, dist(c.back(), gt.back()));
    return best;
}

double miss_rate(const std::vector<double>& final_errors, double threshold) {
    if (final_errors.empty()) throw ShapeError("miss_rate: no scenes");
    std::size_t misses = 0;
    for (double e : final_errors)
        if (e > threshold) ++misses;
    return double(misses) / double(final_errors.size());
}

std::vector<std::size_t> top_k(const std::vector<double>& scores, int k) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (k > 0 && std::size_t(k) < idx.size()) idx.resize(std::size_t(k));
    return idx;
}

namespace {

MetricsReport evaluate_impl(const Model& model, const std::vector<Trajectory>& scenes, int k,
                            bool parallel) {
    if (scenes.empty()) throw DataError("evaluate: no scenes");
    const TrainConfig& cfg = model.config();

    std::vector<double> ade(scenes.size()), fde(scenes.size());
    std::vector<std::string> errors(scenes.size());
    const auto one = [&](std::size_t i) {
        try {
            const Trajectory& traj = scenes[i];
            const int cursor = end_aligned_cursor(traj, cfg.T, cfg.N, cfg.M);
            const SegmentedSample s = segment(traj, cfg.T, cfg.N, cfg.M, cursor);
            const PredictionSet p = model.predict(s.x_obs);
            std::vector<std::vector<Vec2>> kept;
            for (std::size_t j : top_k(p.scores, k)) kept.push_back(p.trajectories[j]);
            ade[i] = min_ade(kept, s.x_gt);
            fde[i] = min_fde(kept, s.x_gt);
        } catch (const Error& e) {
            errors[i] = scenes[i].scene_id + "/" + scenes[i].agent_id + ": " + e.what();
        }
    };
    if (parallel)
        par::parallel_for(scenes.size(), one);
    else
        for (std::size_t i = 0; i < scenes.size(); ++i) one(i);

    for (const std::string& e : errors)
        if (!e.empty()) throw DataError("evaluate: " + e);

    MetricsReport rep;
    rep.scenes = scenes.size();
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        rep.min_ade += ade[i];
        rep.min_fde += fde[i];
    }
    rep.min_ade /= double(scenes.size());
    rep.min_fde /= double(scenes.size());
    rep.miss_rate = miss_rate(fde, cfg.mr_threshold);
    return rep;
}

} // namespace

MetricsReport evaluate(const Model& model, const std::vector<Trajectory>& scenes, int k) {
    return evaluate_impl(model, scenes, k, true);
}

MetricsReport evaluate_serial(const Model& model, const std::vector<Trajectory>& scenes, int k) {
    return evaluate_impl(model, scenes, k, false);
}

} // namespace itpnet

#pragma once

#include "itpnet/model.hpp"

namespace itpnet {

/// Mean L2 distance over the horizon, minimized over candidates.
double min_ade(const std::vector<std::vector<Vec2>>& candidates, const std::vector<Vec2>& gt);

/// Endpoint L2 distance, minimized over candidates.
double min_fde(const std::vector<std::vector<Vec2>>& candidates, const std::vector<Vec2>& gt);

/// Fraction of scenes whose endpoint error exceeds the threshold.
double miss_rate(const std::vector<double>& final_errors, double threshold);

/// Indices of the k highest scores, best first; ties keep the lower index.
/// k <= 0 or k >= size selects everything.
std::vector<std::size_t> top_k(const std::vector<double>& scores, int k);

struct MetricsReport {
    double min_ade = 0.0;
    double min_fde = 0.0;
    double miss_rate = 0.0;
    std::size_t scenes = 0;
};

/// End-aligned segmentation + predict() per scene, metrics averaged over
/// scenes; only the k best-scored modes compete. Scene fan-out is OpenMP;
/// the serial variant is the reference the parallel one must match exactly.
MetricsReport evaluate(const Model& model, const std::vector<Trajectory>& scenes, int k = 0);
MetricsReport evaluate_serial(const Model& model, const std::vector<Trajectory>& scenes,
                              int k = 0);

} // namespace itpnet

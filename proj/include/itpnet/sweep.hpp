#pragma once

#include <iosfwd>

#include "itpnet/metrics.hpp"

namespace itpnet {

/// One trainable grid cell (a config plus which self-supervised terms stay
/// on; off means the corresponding weight is zeroed).
struct SweepCell {
    TrainConfig cfg;
    bool l_rec = true;
    bool l_cts = true;
};

struct SweepPlan {
    std::vector<SweepCell> cells;       // one per (combo, seed)
    std::vector<std::string> skipped;   // one note per undefined combo
};

/// Cross product of the grid axes. Combinations the config layer rejects
/// (N=0 with the NRRFormer, C >= N, ...) are skipped and noted rather than
/// failing the whole sweep.
SweepPlan plan_sweep(const SweepSpec& spec, const TrainConfig& base);

/// One metrics CSV row: a finished (trained + evaluated) cell.
struct SweepRow {
    std::string config_hash;
    int n = 0;
    bool nrrformer = false;
    bool l_rec = true;
    bool l_cts = true;
    int t = 2;
    int k = 6;
    std::uint64_t seed = 0;
    double min_ade = 0.0;
    double min_fde = 0.0;
    double mr = 0.0;
};

struct SweepFailure {
    std::string message;
    int exit_code = 2; // classified from the cell's exception
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> skipped;
    std::vector<SweepFailure> failures;
};

/// Trains and evaluates every cell, continuing past failures. `progress`
/// (optional) gets one line per cell as it finishes.
SweepResult run_sweep(const SweepSpec& spec, const TrainConfig& base,
                      const std::vector<Trajectory>& train_scenes,
                      const std::vector<Trajectory>& eval_scenes,
                      std::ostream* progress = nullptr);

/// Pinned columns: config_hash,N,nrrformer,l_rec,l_cts,T,K,seed,minADE,minFDE,MR.
/// Byte-deterministic for identical rows.
void write_metrics_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// One SVG per metric (plot_minADE.svg, plot_minFDE.svg, plot_MR.svg) under
/// `dir`: metric vs N, one line per (nrrformer, l_rec, l_cts, T) group,
/// seed-median per point.
void write_sweep_plots(const std::vector<SweepRow>& rows, const std::string& dir);

/// Text summary of the headline contrast: rows N, paired columns
/// without/with the NRRFormer (seed-median minADE over full-loss cells).
void print_sweep_summary(const std::vector<SweepRow>& rows, std::ostream& out);

/// Empty when the N-sweep trend holds on full-loss NRRFormer rows:
/// median minADE at the largest N <= median at the smallest N >= 1 times
/// (1 + tol). Otherwise a human-readable violation.
std::string check_nrr_trend(const std::vector<SweepRow>& rows, double tol = 0.05);

double median(std::vector<double> v);

} // namespace itpnet

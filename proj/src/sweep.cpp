#include "itpnet/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "itpnet/trainer.hpp"

namespace itpnet {

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string combo_label(int t, int n, bool nrr, bool rec, bool cts) {
    std::ostringstream os;
    os << "T=" << t << " N=" << n << " nrrformer=" << (nrr ? 1 : 0) << " l_rec=" << (rec ? 1 : 0)
       << " l_cts=" << (cts ? 1 : 0);
    return os.str();
}

int classify(const Error& e) {
    if (dynamic_cast<const NumericError*>(&e)) return 3;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    return 1;
}

} // namespace

double median(std::vector<double> v) {
    if (v.empty()) throw ShapeError("median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

SweepPlan plan_sweep(const SweepSpec& spec, const TrainConfig& base) {
    spec.validate();
    SweepPlan plan;
    for (int t : spec.t_values)
        for (int n : spec.n_values)
            for (bool nrr : spec.nrr_values)
                for (bool rec : spec.l_rec_values)
                    for (bool cts : spec.l_cts_values) {
                        TrainConfig c = base;
                        c.T = t;
                        c.N = n;
                        c.nrrformer = nrr;
                        if (!rec) c.alpha = 0.0;
                        if (!cts) c.beta = 0.0;
                        try {
                            c.validate();
                        } catch (const ConfigError& e) {
                            plan.skipped.push_back(combo_label(t, n, nrr, rec, cts) +
                                                   ": skipped (" + e.what() + ")");
                            continue;
                        }
                        for (std::uint64_t seed : spec.seeds) {
                            SweepCell cell{c, rec, cts};
                            cell.cfg.seed = seed;
                            plan.cells.push_back(std::move(cell));
                        }
                    }
    return plan;
}

SweepResult run_sweep(const SweepSpec& spec, const TrainConfig& base,
                      const std::vector<Trajectory>& train_scenes,
                      const std::vector<Trajectory>& eval_scenes, std::ostream* progress) {
    const SweepPlan plan = plan_sweep(spec, base);
    SweepResult res;
    res.skipped = plan.skipped;
    if (progress)
        for (const std::string& s : plan.skipped) *progress << s << "\n";

    for (const SweepCell& cell : plan.cells) {
        const std::string label = combo_label(cell.cfg.T, cell.cfg.N, cell.cfg.nrrformer,
                                              cell.l_rec, cell.l_cts) +
                                  " seed=" + std::to_string(cell.cfg.seed);
        try {
            const TrainResult trained = train(cell.cfg, train_scenes);
            const MetricsReport rep = evaluate(trained.model, eval_scenes);
            SweepRow row;
            row.config_hash = cell.cfg.hash();
            row.n = cell.cfg.N;
            row.nrrformer = cell.cfg.nrrformer;
            row.l_rec = cell.l_rec;
            row.l_cts = cell.l_cts;
            row.t = cell.cfg.T;
            row.k = cell.cfg.K;
            row.seed = cell.cfg.seed;
            row.min_ade = rep.min_ade;
            row.min_fde = rep.min_fde;
            row.mr = rep.miss_rate;
            res.rows.push_back(std::move(row));
            if (progress)
                *progress << label << ": minADE=" << fmt(rep.min_ade)
                          << " minFDE=" << fmt(rep.min_fde) << " MR=" << fmt(rep.miss_rate)
                          << "\n";
        } catch (const Error& e) {
            res.failures.push_back({label + ": " + e.what(), classify(e)});
            if (progress) *progress << label << ": FAILED (" << e.what() << ")\n";
        }
    }
    return res;
}

void write_metrics_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write metrics CSV: " + path);
    f << "config_hash,N,nrrformer,l_rec,l_cts,T,K,seed,minADE,minFDE,MR\n";
    for (const SweepRow& r : rows)
        f << r.config_hash << ',' << r.n << ',' << (r.nrrformer ? 1 : 0) << ','
          << (r.l_rec ? 1 : 0) << ',' << (r.l_cts ? 1 : 0) << ',' << r.t << ',' << r.k << ','
          << r.seed << ',' << fmt(r.min_ade) << ',' << fmt(r.min_fde) << ',' << fmt(r.mr)
          << '\n';
    if (!f) throw DataError("short write: " + path);
}

namespace {

// (nrrformer, l_rec, l_cts, T) -> N -> seed values
using Grouped = std::map<std::tuple<bool, bool, bool, int>, std::map<int, std::vector<double>>>;

Grouped group_metric(const std::vector<SweepRow>& rows, double SweepRow::*metric) {
    Grouped g;
    for (const SweepRow& r : rows)
        g[{r.nrrformer, r.l_rec, r.l_cts, r.t}][r.n].push_back(r.*metric);
    return g;
}

std::string group_name(const std::tuple<bool, bool, bool, int>& key) {
    std::ostringstream os;
    os << (std::get<0>(key) ? "nrr" : "concat");
    if (!std::get<1>(key)) os << " -rec";
    if (!std::get<2>(key)) os << " -cts";
    os << " T=" << std::get<3>(key);
    return os.str();
}

void write_one_plot(const std::vector<SweepRow>& rows, double SweepRow::*metric,
                    const std::string& title, const std::string& path) {
    const Grouped groups = group_metric(rows, metric);

    double lo_y = 1e300, hi_y = -1e300;
    int lo_n = 1 << 30, hi_n = -(1 << 30);
    for (const auto& [key, by_n] : groups)
        for (const auto& [n, vals] : by_n) {
            const double m = median(vals);
            lo_y = std::min(lo_y, m);
            hi_y = std::max(hi_y, m);
            lo_n = std::min(lo_n, n);
            hi_n = std::max(hi_n, n);
        }
    if (groups.empty()) throw DataError("plot " + title + ": no rows");
    if (hi_y - lo_y < 1e-12) hi_y = lo_y + 1.0;
    if (hi_n == lo_n) hi_n = lo_n + 1;

    const double W = 640, H = 420, ml = 70, mr = 170, mt = 40, mb = 50;
    const auto px = [&](double n) { return ml + (n - lo_n) / double(hi_n - lo_n) * (W - ml - mr); };
    const auto py = [&](double y) { return H - mb - (y - lo_y) / (hi_y - lo_y) * (H - mt - mb); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-family='sans-serif' "
           "font-size='15'>"
        << title << " vs N (seed medians)</text>\n";
    // axes
    svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    svg << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double y = lo_y + (hi_y - lo_y) * i / 4.0;
        svg << "<text x='" << ml - 6 << "' y='" << py(y) + 4
            << "' text-anchor='end' font-family='sans-serif' font-size='11'>" << fmt(y)
            << "</text>\n";
        svg << "<line x1='" << ml << "' y1='" << py(y) << "' x2='" << W - mr << "' y2='" << py(y)
            << "' stroke='#dddddd'/>\n";
    }
    std::vector<int> ticks;
    for (const auto& [key, by_n] : groups)
        for (const auto& [n, vals] : by_n) ticks.push_back(n);
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
    for (int n : ticks)
        svg << "<text x='" << px(n) << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-family='sans-serif' font-size='11'>" << n
            << "</text>\n";
    svg << "<text x='" << (ml + W - mr) / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-family='sans-serif' font-size='12'>N</text>\n";

    std::size_t color = 0;
    double legend_y = mt + 10;
    for (const auto& [key, by_n] : groups) {
        const char* stroke = palette[color % 8];
        std::ostringstream pts;
        for (const auto& [n, vals] : by_n) pts << px(n) << ',' << py(median(vals)) << ' ';
        svg << "<polyline points='" << pts.str() << "' fill='none' stroke='" << stroke
            << "' stroke-width='2'/>\n";
        for (const auto& [n, vals] : by_n)
            svg << "<circle cx='" << px(n) << "' cy='" << py(median(vals))
                << "' r='3' fill='" << stroke << "'/>\n";
        svg << "<line x1='" << W - mr + 10 << "' y1='" << legend_y << "' x2='" << W - mr + 30
            << "' y2='" << legend_y << "' stroke='" << stroke << "' stroke-width='2'/>\n";
        svg << "<text x='" << W - mr + 36 << "' y='" << legend_y + 4
            << "' font-family='sans-serif' font-size='11'>" << group_name(key) << "</text>\n";
        legend_y += 18;
        ++color;
    }
    svg << "</svg>\n";

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write plot: " + path);
    f << svg.str();
}

} // namespace

void write_sweep_plots(const std::vector<SweepRow>& rows, const std::string& dir) {
    if (rows.empty()) throw DataError("write_sweep_plots: no rows");
    write_one_plot(rows, &SweepRow::min_ade, "minADE", dir + "/plot_minADE.svg");
    write_one_plot(rows, &SweepRow::min_fde, "minFDE", dir + "/plot_minFDE.svg");
    write_one_plot(rows, &SweepRow::mr, "MR", dir + "/plot_MR.svg");
}

namespace {

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

void print_sweep_summary(const std::vector<SweepRow>& rows, std::ostream& out) {
    // full-loss cells only; auxiliary-loss ablations would muddy the N contrast
    std::map<int, std::vector<double>> concat, nrr;
    for (const SweepRow& r : rows) {
        if (!r.l_rec || !r.l_cts) continue;
        (r.nrrformer ? nrr : concat)[r.n].push_back(r.min_ade);
    }
    std::vector<int> ns;
    for (const auto& [n, v] : concat) ns.push_back(n);
    for (const auto& [n, v] : nrr)
        if (!concat.count(n)) ns.push_back(n);
    std::sort(ns.begin(), ns.end());
    if (ns.empty()) return;

    out << "minADE medians\n";
    out << std::left << std::setw(6) << "N" << std::setw(14) << "concat" << std::setw(14)
        << "nrrformer" << "\n";
    for (int n : ns) {
        out << std::left << std::setw(6) << n;
        out << std::setw(14) << (concat.count(n) ? fmt4(median(concat[n])) : "-");
        out << std::setw(14) << (nrr.count(n) ? fmt4(median(nrr[n])) : "-") << "\n";
    }
}

std::string check_nrr_trend(const std::vector<SweepRow>& rows, double tol) {
    std::map<int, std::vector<double>> by_n;
    for (const SweepRow& r : rows)
        if (r.nrrformer && r.l_rec && r.l_cts && r.n >= 1) by_n[r.n].push_back(r.min_ade);
    if (by_n.size() < 2)
        return "trend check needs at least two N >= 1 values with the NRRFormer on";

    const int n_lo = by_n.begin()->first, n_hi = by_n.rbegin()->first;
    const double m_lo = median(by_n.begin()->second), m_hi = median(by_n.rbegin()->second);
    if (m_hi <= m_lo * (1.0 + tol)) return {};
    std::ostringstream os;
    os << "minADE median at N=" << n_hi << " (" << fmt(m_hi) << ") exceeds N=" << n_lo << " ("
       << fmt(m_lo) << ") by more than " << fmt(tol * 100) << "%";
    return os.str();
}

} // namespace itpnet

#include "itpnet/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "itpnet/checkpoint.hpp"
#include "itpnet/gradcheck_suite.hpp"
#include "itpnet/parallel.hpp"
#include "itpnet/sweep.hpp"
#include "itpnet/trainer.hpp"

namespace itpnet {

namespace {

using nlohmann::json;

struct Common {
    std::string config_path;
    long long seed = -1; // < 0: keep the config's seed
    std::string out;
    int threads = 0; // 0: keep ITPNET_THREADS / 1
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
    cmd->add_option("--config", c.config_path, "JSON config file");
    cmd->add_option("--seed", c.seed, "seed override");
    auto* out = cmd->add_option("--out", c.out, "output file or directory");
    if (out_required) out->required();
    cmd->add_option("--threads", c.threads, "worker cap (default: ITPNET_THREADS, else 1)");
}

CliConfig effective_config(const Common& c) {
    CliConfig cfg = c.config_path.empty() ? CliConfig{} : load_cli_config(c.config_path);
    if (c.seed >= 0) {
        cfg.train.seed = std::uint64_t(c.seed);
        cfg.dataset.seed = std::uint64_t(c.seed);
    }
    if (c.threads >= 1) par::set_threads(c.threads);
    return cfg;
}

struct DataOpts {
    std::string path;
    std::string format = "auto"; // auto | jsonl | csv
    double csv_dt = 0.5;
};

std::vector<Trajectory> load_data(const std::string& path, const std::string& format,
                                  double csv_dt) {
    std::string f = format;
    if (f == "auto")
        f = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? "csv" : "jsonl";
    return load_scenes(path, f == "csv" ? SceneFormat::Csv : SceneFormat::Jsonl, csv_dt);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << text;
    if (!f) throw DataError("short write: " + path);
}

json dataset_to_json(const DatasetSpec& s) {
    return json{{"scenes", s.scenes},
                {"w_straight", s.w_straight},
                {"w_turn", s.w_turn},
                {"w_turn_after_straight", s.w_turn_after_straight},
                {"w_lane_change", s.w_lane_change},
                {"speed_lo", s.speed_lo},
                {"speed_hi", s.speed_hi},
                {"turn_lo", s.turn_lo},
                {"turn_hi", s.turn_hi},
                {"sigma", s.sigma},
                {"dt", s.dt},
                {"history_len", s.history_len},
                {"future_len", s.future_len},
                {"seed", s.seed}};
}

json sweep_to_json(const SweepSpec& s) {
    return json{{"n_values", s.n_values},   {"nrrformer", s.nrr_values},
                {"l_rec", s.l_rec_values},  {"l_cts", s.l_cts_values},
                {"t_values", s.t_values},   {"seeds", s.seeds}};
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::vector<Vec2> parse_points(const std::string& text) {
    std::vector<Vec2> pts;
    std::stringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        const std::size_t comma = pair.find(',');
        if (comma == std::string::npos)
            throw ConfigError("--points: expected x,y pairs separated by ';', got '" + pair +
                              "'");
        try {
            std::size_t ate = 0;
            const double x = std::stod(pair.substr(0, comma), &ate);
            if (ate != comma) throw std::invalid_argument("trailing");
            const std::string ytext = pair.substr(comma + 1);
            const double y = std::stod(ytext, &ate);
            if (ate != ytext.size()) throw std::invalid_argument("trailing");
            pts.push_back({x, y});
        } catch (const std::exception&) {
            throw ConfigError("--points: cannot parse '" + pair + "' as x,y");
        }
    }
    if (pts.empty()) throw ConfigError("--points: no points given");
    return pts;
}

SweepRow eval_row(const TrainConfig& cfg, int k, const MetricsReport& rep) {
    SweepRow row;
    row.config_hash = cfg.hash();
    row.n = cfg.N;
    row.nrrformer = cfg.nrrformer;
    row.l_rec = cfg.alpha != 0.0;
    row.l_cts = cfg.beta != 0.0;
    row.t = cfg.T;
    row.k = k;
    row.seed = cfg.seed;
    row.min_ade = rep.min_ade;
    row.min_fde = rep.min_fde;
    row.mr = rep.miss_rate;
    return row;
}

// ---- subcommands ----------------------------------------------------------

int cmd_gen_data(const Common& common, const std::string& profile, int scenes, double sigma,
                 std::ostream& out) {
    CliConfig cfg = effective_config(common);
    if (profile != "default")
        throw ConfigError("unknown dataset profile '" + profile + "' (known: default)");
    if (scenes > 0) cfg.dataset.scenes = scenes;
    if (sigma >= 0.0) cfg.dataset.sigma = sigma;
    cfg.dataset.validate();

    const std::vector<Trajectory> data = generate_dataset(cfg.dataset);
    save_scenes_jsonl(data, common.out);
    write_text(common.out + ".meta.json",
               json{{"dataset", dataset_to_json(cfg.dataset)}}.dump(2) + "\n");

    out << "wrote " << data.size() << " scenes to " << common.out << "\n";
    out << "dataset spec: " << dataset_to_json(cfg.dataset).dump() << "\n";
    return 0;
}

int cmd_train(const Common& common, const DataOpts& data, std::ostream& out) {
    const CliConfig cfg = effective_config(common);
    const std::vector<Trajectory> scenes = load_data(data.path, data.format, data.csv_dt);
    ensure_dir(common.out);
    const std::string ck_path = common.out + "/checkpoint.itpn";

    const CheckpointSink sink = [&](const Model& m, const Adam& o, long step) {
        save_checkpoint({m, o, step}, ck_path);
    };
    const TrainResult res = train(cfg.train, scenes, sink);
    write_log_csv(res.log, common.out + "/training_log.csv");
    write_text(common.out + "/config.json",
               json{{"train", json::parse(cfg.train.canonical_json())},
                    {"data", data.path},
                    {"scenes", scenes.size()}}
                       .dump(2) +
                   "\n");

    out << "trained " << cfg.train.steps << " steps on " << scenes.size() << " scenes (config "
        << cfg.train.hash() << ")\n";
    if (!res.log.empty())
        out << "loss: first " << sci(res.log.front().l_total) << ", last "
            << sci(res.log.back().l_total) << "\n";
    out << "checkpoint: " << ck_path << "\n";
    return 0;
}

int cmd_eval(const Common& common, const DataOpts& data, const std::string& ck_path,
             std::vector<int> ks, std::ostream& out) {
    if (common.threads >= 1) par::set_threads(common.threads);
    const Checkpoint ck = load_checkpoint(ck_path);
    const TrainConfig& cfg = ck.model.config();
    const std::vector<Trajectory> scenes = load_data(data.path, data.format, data.csv_dt);

    if (ks.empty()) {
        ks.push_back(1);
        if (cfg.K != 1) ks.push_back(cfg.K);
    }
    for (int k : ks)
        if (k < 1 || k > cfg.K)
            throw ConfigError("--k values must lie in [1, " + std::to_string(cfg.K) + "]");

    std::vector<SweepRow> rows;
    for (int k : ks) {
        const MetricsReport rep = evaluate(ck.model, scenes, k);
        rows.push_back(eval_row(cfg, k, rep));
        out << "K=" << k << ": minADE=" << sci(rep.min_ade) << " minFDE=" << sci(rep.min_fde)
            << " MR=" << sci(rep.miss_rate) << " (" << rep.scenes << " scenes)\n";
    }

    ensure_dir(common.out);
    write_metrics_csv(rows, common.out + "/metrics.csv");
    write_text(common.out + "/config.json",
               json{{"train", json::parse(cfg.canonical_json())},
                    {"checkpoint", ck_path},
                    {"data", data.path}}
                       .dump(2) +
                   "\n");
    return 0;
}

int cmd_ablate(const Common& common, const DataOpts& train_data, const DataOpts& eval_data,
               bool assert_trend, double trend_tol, std::ostream& out, std::ostream& err) {
    const CliConfig cfg = effective_config(common);
    const std::vector<Trajectory> train_scenes =
        load_data(train_data.path, train_data.format, train_data.csv_dt);
    const std::vector<Trajectory> eval_scenes =
        load_data(eval_data.path, eval_data.format, eval_data.csv_dt);

    const SweepResult res = run_sweep(cfg.sweep, cfg.train, train_scenes, eval_scenes, &out);

    ensure_dir(common.out);
    write_metrics_csv(res.rows, common.out + "/metrics.csv");
    if (!res.rows.empty()) write_sweep_plots(res.rows, common.out);
    write_text(common.out + "/config.json",
               json{{"train", json::parse(cfg.train.canonical_json())},
                    {"sweep", sweep_to_json(cfg.sweep)},
                    {"train_data", train_data.path},
                    {"eval_data", eval_data.path}}
                       .dump(2) +
                   "\n");
    print_sweep_summary(res.rows, out);

    if (!res.failures.empty()) {
        for (const SweepFailure& f : res.failures) err << "cell failed: " << f.message << "\n";
        return res.failures.front().exit_code;
    }
    if (assert_trend) {
        const std::string violation = check_nrr_trend(res.rows, trend_tol);
        if (!violation.empty()) {
            err << "trend assertion failed: " << violation << "\n";
            return 4;
        }
        out << "trend assertion holds\n";
    }
    return 0;
}

int cmd_gradcheck(const Common& common, std::ostream& out) {
    const std::uint64_t seed = common.seed >= 0 ? std::uint64_t(common.seed) : 2026;
    const std::vector<GradCheckRow> rows = gradcheck_suite(seed);

    out << "check                      entries   max_rel_err   tol       status\n";
    bool all_ok = true;
    std::ostringstream csv;
    csv << "check,entries,max_rel_err,tol,status\n";
    for (const GradCheckRow& r : rows) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-26s %7zu   %-13s %-9s %s\n", r.name.c_str(),
                      r.checked, sci(r.max_rel_err).c_str(), sci(r.tol).c_str(),
                      r.ok() ? "ok" : "FAIL");
        out << line;
        csv << r.name << ',' << r.checked << ',' << sci(r.max_rel_err) << ',' << sci(r.tol)
            << ',' << (r.ok() ? "ok" : "FAIL") << '\n';
        all_ok = all_ok && r.ok();
    }
    if (!common.out.empty()) write_text(common.out, csv.str());
    out << (all_ok ? "all checks passed\n" : "gradient checks FAILED\n");
    return all_ok ? 0 : 4;
}

int cmd_predict(const Common& common, const std::string& ck_path, const std::string& points_text,
                std::ostream& out) {
    const Checkpoint ck = load_checkpoint(ck_path);
    const std::vector<Vec2> points = parse_points(points_text);
    const PredictionSet pred = ck.model.predict(points);

    json trajs = json::array();
    for (const auto& traj : pred.trajectories) {
        json one = json::array();
        for (const Vec2& p : traj) one.push_back(json::array({p.x, p.y}));
        trajs.push_back(std::move(one));
    }
    const json result{{"config_hash", ck.model.config().hash()},
                      {"trajectories", std::move(trajs)},
                      {"scores", pred.scores}};
    out << result.dump() << "\n";
    if (!common.out.empty()) write_text(common.out, result.dump(2) + "\n");
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"instantaneous trajectory prediction laboratory"};
    app.require_subcommand(1);

    Common c_gen, c_train, c_eval, c_ablate, c_grad, c_pred;
    DataOpts d_train, d_eval_data, d_ab_train, d_ab_eval;
    std::string gen_profile = "default";
    int gen_scenes = 0;
    double gen_sigma = -1.0;
    std::string eval_ck, pred_ck, pred_points, ks_text;
    bool assert_trend = false, grad_all = false;
    double trend_tol = 0.05;

    CLI::App* gen = app.add_subcommand("gen-data", "write a synthetic scene mixture as JSONL");
    add_common(gen, c_gen, true);
    gen->add_option("--spec", gen_profile, "dataset profile")->capture_default_str();
    gen->add_option("--scenes", gen_scenes, "scene count override");
    gen->add_option("--sigma", gen_sigma, "observation noise sigma override (meters)");

    CLI::App* tr = app.add_subcommand("train", "train a model and write a checkpoint");
    add_common(tr, c_train, true);
    tr->add_option("--data", d_train.path, "training scenes (JSONL or CSV)")->required();
    tr->add_option("--format", d_train.format, "data format: auto|jsonl|csv")
        ->capture_default_str();
    tr->add_option("--csv-dt", d_train.csv_dt, "timestep for CSV input")->capture_default_str();

    CLI::App* ev = app.add_subcommand("eval", "evaluate a checkpoint on held-out scenes");
    add_common(ev, c_eval, true);
    ev->add_option("--checkpoint", eval_ck, "checkpoint file")->required();
    ev->add_option("--data", d_eval_data.path, "evaluation scenes")->required();
    ev->add_option("--format", d_eval_data.format, "data format: auto|jsonl|csv")
        ->capture_default_str();
    ev->add_option("--csv-dt", d_eval_data.csv_dt, "timestep for CSV input")
        ->capture_default_str();
    ev->add_option("--k", ks_text, "comma-separated K values (default: 1 and the decoder's K)");

    CLI::App* ab = app.add_subcommand("ablate", "train/evaluate every sweep grid cell");
    add_common(ab, c_ablate, true);
    ab->add_option("--train-data", d_ab_train.path, "training scenes")->required();
    ab->add_option("--eval-data", d_ab_eval.path, "evaluation scenes")->required();
    ab->add_option("--format", d_ab_train.format, "data format: auto|jsonl|csv")
        ->capture_default_str();
    ab->add_option("--csv-dt", d_ab_train.csv_dt, "timestep for CSV input")
        ->capture_default_str();
    ab->add_flag("--assert-trend", assert_trend,
                 "fail (exit 4) unless minADE improves with N under the NRRFormer");
    ab->add_option("--trend-tol", trend_tol, "tolerance for the trend assertion")
        ->capture_default_str();

    CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference check every primitive");
    add_common(gc, c_grad, false);
    gc->add_flag("--all", grad_all, "run the full battery (default)");

    CLI::App* pr = app.add_subcommand("predict", "predict futures for observed points");
    add_common(pr, c_pred, false);
    pr->add_option("--checkpoint", pred_ck, "checkpoint file")->required();
    pr->add_option("--points", pred_points, "observed points as \"x,y;x,y\"")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(c_gen, gen_profile, gen_scenes, gen_sigma, out);
        if (tr->parsed()) return cmd_train(c_train, d_train, out);
        if (ev->parsed()) {
            std::vector<int> ks;
            if (!ks_text.empty()) {
                std::stringstream ss(ks_text);
                std::string item;
                while (std::getline(ss, item, ','))
                    try {
                        ks.push_back(std::stoi(item));
                    } catch (const std::exception&) {
                        throw ConfigError("--k: cannot parse '" + item + "' as an integer");
                    }
            }
            return cmd_eval(c_eval, d_eval_data, eval_ck, ks, out);
        }
        if (ab->parsed()) {
            d_ab_eval.format = d_ab_train.format;
            d_ab_eval.csv_dt = d_ab_train.csv_dt;
            return cmd_ablate(c_ablate, d_ab_train, d_ab_eval, assert_trend, trend_tol, out,
                              err);
        }
        if (gc->parsed()) return cmd_gradcheck(c_grad, out);
        if (pr->parsed()) return cmd_predict(c_pred, pred_ck, pred_points, out);
        err << "usage error: no subcommand\n" << app.help();
        return 1;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace itpnet

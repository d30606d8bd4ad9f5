// netmom: network-momentum research pipeline.
//
// Commands: ingest, backtest, gridsearch, experiment, report.
// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "netmom/config.hpp"
#include "netmom/csv.hpp"
#include "netmom/errors.hpp"
#include "netmom/experiment.hpp"
#include "netmom/log.hpp"
#include "netmom/parallel.hpp"

namespace fs = std::filesystem;
using namespace netmom;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed;
    int jobs = 0;  // 0: hardware default
};

ExperimentConfig load_cfg(const CliOptions& opt) {
    if (opt.config_path.empty()) throw ConfigError("--config is required");
    ExperimentConfig cfg = load_experiment_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.seed) cfg.bootstrap.seed = *opt.seed;
    return cfg;
}

int effective_jobs(const CliOptions& opt) {
    return opt.jobs > 0 ? opt.jobs : hardware_threads();
}

void write_file_header(std::ostream& out, const ExperimentConfig& cfg) {
    out << "# netmom version=" << kVersion << " seed=" << cfg.bootstrap.seed
        << " config_checksum=" << checksum_hex(cfg.config_checksum) << "\n";
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : "";
}

// Row range of the panel covered by [start, end] dates (end inclusive).
std::pair<int, int> window_rows(const PricePanel& panel,
                                const std::optional<Date>& start,
                                const std::optional<Date>& end) {
    int lo = 0, hi = panel.rows();
    if (start) {
        lo = static_cast<int>(
            std::lower_bound(panel.dates.begin(), panel.dates.end(), *start) -
            panel.dates.begin());
    }
    if (end) {
        hi = static_cast<int>(
            std::upper_bound(panel.dates.begin(), panel.dates.end(), *end) -
            panel.dates.begin());
    }
    if (lo >= hi) throw DataError("evaluation window is empty");
    return {lo, hi};
}

int resolve_eval_begin(const PricePanel& panel, const ExperimentConfig& cfg,
                       const ModelSpec& model, const std::optional<Date>& start) {
    if (start) {
        const auto [lo, hi] = window_rows(panel, start, std::nullopt);
        (void)hi;
        const int r0 = panel.first_complete_scaled_row();
        if (r0 < 0 || lo - model.max_lookback() + 1 < r0)
            throw DataError("insufficient history for the longest lookback");
        return lo;
    }
    return auto_eval_begin(panel, {model}, cfg.eval_start_offset);
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

int cmd_ingest(const CliOptions& opt) {
    ExperimentConfig cfg = load_cfg(opt);
    if (cfg.price_files.empty() || cfg.contract_file.empty())
        throw ConfigError("missing config field 'panel.prices'");
    PricePanel panel =
        load_panel(cfg.price_files, cfg.contract_file, cfg.alignment);
    fs::create_directories(cfg.output_dir);
    const std::string cache = cfg.cache_path.empty()
                                  ? (fs::path(cfg.output_dir) / "panel.json").string()
                                  : cfg.cache_path;
    save_panel_cache(panel, cache);
    std::cout << "panel: " << panel.rows() << " dates x " << panel.cols()
              << " markets\nchecksum: " << checksum_hex(panel_checksum(panel))
              << "\ncache: " << cache << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// backtest
// ---------------------------------------------------------------------------

void write_backtest_report(const ModelRun& run, const ExperimentConfig& cfg,
                           const std::string& outdir) {
    fs::create_directories(outdir);
    auto emit_section = [](std::ostream& out, const std::string& model,
                           const std::string& section,
                           const PerformanceReport& r) {
        const auto row = [&](const char* metric, const std::string& value) {
            out << model << "," << section << "," << metric << "," << value
                << "\n";
        };
        row("gross_return", csv::format_double(r.gross_return));
        row("transaction_cost", csv::format_double(r.transaction_cost));
        row("net_return", csv::format_double(r.net_return));
        row("vol", csv::format_double(r.vol));
        row("sharpe", opt_cell(r.sharpe));
        row("downside_deviation", csv::format_double(r.downside_deviation));
        row("mdd", csv::format_double(r.mdd));
        row("sortino", opt_cell(r.sortino));
        row("calmar", opt_cell(r.calmar));
        row("skewness", opt_cell(r.skewness));
        row("hit_rate", csv::format_double(r.hit_rate));
        row("avg_p_over_avg_l", opt_cell(r.avg_profit_over_avg_loss));
        row("n_days", std::to_string(r.n_days));
    };
    {
        std::ofstream out(fs::path(outdir) / "report.csv", std::ios::binary);
        write_file_header(out, cfg);
        out << "model,panel,metric,value\n";
        emit_section(out, run.name, "overall", run.overall);
        emit_section(out, run.name, "long", run.long_short.long_side);
        emit_section(out, run.name, "short", run.long_short.short_side);
        for (const auto& [label, skew] : run.horizon_skew)
            out << run.name << ",horizon_skewness," << label << ","
                << opt_cell(skew) << "\n";
    }
    {
        nlohmann::json j;
        j["version"] = kVersion;
        j["seed"] = cfg.bootstrap.seed;
        j["config_checksum"] = checksum_hex(cfg.config_checksum);
        j["model"] = run.name;
        j["eval_begin"] = run.eval_begin;
        j["eval_end"] = run.eval_end;
        j["overall"] = report_json(run.overall);
        j["long"] = report_json(run.long_short.long_side);
        j["short"] = report_json(run.long_short.short_side);
        for (const auto& [label, skew] : run.horizon_skew)
            j["horizon_skewness"][label] =
                skew ? nlohmann::json(*skew) : nlohmann::json(nullptr);
        std::ofstream out(fs::path(outdir) / "report.json", std::ios::binary);
        out << j.dump(1) << "\n";
    }
}

void write_debug_dumps(const PricePanel& panel, const ModelSpec& model,
                       const ExperimentConfig& cfg, const ModelRun& run,
                       const std::string& outdir) {
    if (!cfg.dump_leadlag && !cfg.dump_network && !cfg.dump_signals) return;
    const OscillatorSet osc = compute_oscillators(panel, cfg.portfolio.speeds,
                                                  cfg.portfolio.slow_ratio);
    std::ofstream ll, net, sig;
    if (cfg.dump_leadlag && !model.is_baseline) {
        ll.open(fs::path(outdir) / "leadlag.csv", std::ios::binary);
        write_file_header(ll, cfg);
        ll << "date,lookback,market_i,market_j,score\n";
    }
    if (cfg.dump_network && !model.is_baseline) {
        net.open(fs::path(outdir) / "network.csv", std::ios::binary);
        write_file_header(net, cfg);
        net << "date,market_i,market_j,weight\n";
    }
    if (cfg.dump_signals) {
        sig.open(fs::path(outdir) / "signals.csv", std::ios::binary);
        write_file_header(sig, cfg);
        sig << "date,market,speed,feature,position\n";
    }
    for (int t = run.eval_begin; t < run.eval_end; ++t) {
        const std::string date = panel.dates[static_cast<size_t>(t)].iso();
        Eigen::MatrixXd features;
        if (model.is_baseline) {
            features = osc.at_date(t);
        } else {
            std::vector<LeadLagMatrix> vs;
            for (int lb : model.lookbacks())
                vs.push_back(leadlag_matrix_serial(panel, t, lb, model.method,
                                                   model.descriptor_len));
            if (ll.is_open())
                for (const auto& v : vs)
                    for (int i = 0; i < panel.cols(); ++i)
                        for (int j = 0; j < panel.cols(); ++j)
                            if (i != j)
                                ll << date << "," << v.lookback << ","
                                   << panel.markets[static_cast<size_t>(i)].market_id
                                   << ","
                                   << panel.markets[static_cast<size_t>(j)].market_id
                                   << "," << csv::format_double(v.values(i, j))
                                   << "\n";
            const NetworkMatrix nm = ensemble_network(vs, cfg.network);
            if (net.is_open())
                for (int i = 0; i < panel.cols(); ++i)
                    for (int j = 0; j < panel.cols(); ++j)
                        if (i != j)
                            net << date << ","
                                << panel.markets[static_cast<size_t>(i)].market_id
                                << ","
                                << panel.markets[static_cast<size_t>(j)].market_id
                                << "," << csv::format_double(nm.values(i, j))
                                << "\n";
            features = network_feature(osc.at_date(t), nm);
        }
        if (sig.is_open())
            for (int m = 0; m < panel.cols(); ++m)
                for (size_t k = 0; k < cfg.portfolio.speeds.size(); ++k)
                    sig << date << ","
                        << panel.markets[static_cast<size_t>(m)].market_id << ","
                        << cfg.portfolio.speeds[k] << ","
                        << csv::format_double(
                               features(m, static_cast<Eigen::Index>(k)))
                        << "," << csv::format_double(run.positions(t, m)) << "\n";
    }
}

int cmd_backtest(const CliOptions& opt) {
    ExperimentConfig cfg = load_cfg(opt);
    if (cfg.model.empty()) throw ConfigError("missing config field 'model'");
    const ModelSpec model = parse_model(cfg.model, cfg.delta_single,
                                        cfg.delta_grid, cfg.descriptor_len);
    PricePanel panel = resolve_panel(cfg);
    const int begin =
        resolve_eval_begin(panel, cfg, model, cfg.out_of_sample_start);
    const auto [lo, hi] =
        window_rows(panel, std::nullopt, cfg.out_of_sample_end);
    (void)lo;
    ModelRun run = run_model(panel, model, cfg.portfolio, cfg.network, begin,
                             hi, effective_jobs(opt));
    write_backtest_report(run, cfg, cfg.output_dir);
    write_debug_dumps(panel, model, cfg, run, cfg.output_dir);
    std::cout << "model: " << run.name << "\nnet_return: "
              << csv::format_double(run.overall.net_return)
              << "\nsharpe: " << opt_cell(run.overall.sharpe)
              << "\nreports: " << cfg.output_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// gridsearch
// ---------------------------------------------------------------------------

int cmd_gridsearch(const CliOptions& opt) {
    ExperimentConfig cfg = load_cfg(opt);
    if (cfg.model.empty()) throw ConfigError("missing config field 'model'");
    const ModelSpec model = parse_model(cfg.model, cfg.delta_single,
                                        cfg.delta_grid, cfg.descriptor_len);
    PricePanel panel = resolve_panel(cfg);
    const int begin =
        resolve_eval_begin(panel, cfg, model, cfg.in_sample_start);
    const auto [lo, hi] = window_rows(panel, std::nullopt, cfg.in_sample_end);
    (void)lo;
    GridSearchResult res =
        grid_search(panel, model, cfg.portfolio, cfg.network, cfg.alpha_grid,
                    cfg.beta_grid, begin, hi, effective_jobs(opt));
    fs::create_directories(cfg.output_dir);
    std::ofstream out(fs::path(cfg.output_dir) / "gridsearch.csv",
                      std::ios::binary);
    write_file_header(out, cfg);
    out << "alpha,beta,sharpe\n";
    for (const auto& c : res.cells)
        out << csv::format_double(c.alpha) << "," << csv::format_double(c.beta)
            << "," << opt_cell(c.sharpe) << "\n";
    out << "# winner alpha=" << csv::format_double(res.alpha)
        << " beta=" << csv::format_double(res.beta)
        << " sharpe=" << csv::format_double(res.best_sharpe) << "\n";
    std::cout << "alpha: " << csv::format_double(res.alpha)
              << "\nbeta: " << csv::format_double(res.beta)
              << "\nsharpe: " << csv::format_double(res.best_sharpe) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// experiment / report
// ---------------------------------------------------------------------------

int cmd_experiment(const CliOptions& opt) {
    ExperimentConfig cfg = load_cfg(opt);
    PricePanel panel = resolve_panel(cfg);
    ExperimentReport report = run_experiment(panel, cfg, effective_jobs(opt));
    write_experiment_outputs(report, cfg.output_dir);
    std::cout << "resamples: " << report.n_resamples
              << "\nmodels: " << report.models.size()
              << "\noutputs: " << cfg.output_dir << "\n";
    return 0;
}

int cmd_report(const CliOptions& opt) {
    std::string dir = opt.out_dir;
    if (dir.empty() && !opt.config_path.empty())
        dir = load_experiment_config(opt.config_path).output_dir;
    if (dir.empty()) throw ConfigError("report: pass --out or --config");
    const fs::path path = fs::path(dir) / "report.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    std::cout << "experiment report (seed " << j.value("seed", 0ULL) << ", "
              << j.value("n_resamples", 0) << " resamples)\n";
    std::cout << std::left << std::setw(14) << "model" << std::right
              << std::setw(10) << "net" << std::setw(10) << "sharpe"
              << std::setw(10) << "sortino" << std::setw(10) << "mdd"
              << std::setw(10) << "skew" << std::setw(10) << "hit" << "\n";
    for (const auto& name : j.at("models")) {
        const auto& m = j.at("results").at(name.get<std::string>()).at("mean_overall");
        auto cell = [&](const char* key) {
            return m.at(key).is_null()
                       ? std::string("-")
                       : std::to_string(m.at(key).get<double>()).substr(0, 7);
        };
        std::cout << std::left << std::setw(14) << name.get<std::string>()
                  << std::right << std::setw(10) << cell("net_return")
                  << std::setw(10) << cell("sharpe") << std::setw(10)
                  << cell("sortino") << std::setw(10) << cell("mdd")
                  << std::setw(10) << cell("skewness") << std::setw(10)
                  << cell("hit_rate") << "\n";
    }
    if (j.contains("pvalues")) {
        std::cout << "p-values vs MACD (wilcoxon / ks):\n";
        for (const auto& [model, pv] : j.at("pvalues").items())
            std::cout << "  " << std::left << std::setw(14) << model
                      << pv.at("wilcoxon").get<double>() << " / "
                      << pv.at("ks").get<double>() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"network momentum trend-following pipeline"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "experiment config file (JSON)");
    app.add_option("--out", opt.out_dir, "output directory (overrides config)");
    uint64_t seed_val = 0;
    auto* seed_opt =
        app.add_option("--seed", seed_val, "bootstrap seed (overrides config)");
    app.add_option("--jobs", opt.jobs, "parallel worker count (0 = hardware)");

    auto* ingest = app.add_subcommand("ingest", "build and cache a price panel");
    auto* backtest =
        app.add_subcommand("backtest", "run one model on the real panel");
    auto* gridsearch =
        app.add_subcommand("gridsearch", "search the alpha/beta grid in-sample");
    auto* experiment =
        app.add_subcommand("experiment", "bootstrap model-zoo experiment");
    auto* report = app.add_subcommand("report", "print a saved experiment report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (*seed_opt) opt.seed = seed_val;

    try {
        if (ingest->parsed()) return cmd_ingest(opt);
        if (backtest->parsed()) return cmd_backtest(opt);
        if (gridsearch->parsed()) return cmd_gridsearch(opt);
        if (experiment->parsed()) return cmd_experiment(opt);
        if (report->parsed()) return cmd_report(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

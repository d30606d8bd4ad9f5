#include "netmom/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "netmom/bootstrap.hpp"
#include "netmom/csv.hpp"
#include "netmom/errors.hpp"
#include "netmom/log.hpp"
#include "netmom/parallel.hpp"
#include "netmom/stats.hpp"

namespace netmom {

using nlohmann::json;

int auto_eval_begin(const PricePanel& panel, const std::vector<ModelSpec>& zoo,
                    int offset) {
    const int r0 = panel.first_complete_scaled_row();
    if (r0 < 0) throw DataError("panel has no fully defined rows");
    int max_lb = 0;
    for (const auto& m : zoo) max_lb = std::max(max_lb, m.max_lookback());
    const int eval =
        offset >= 0 ? r0 + offset : r0 + max_lb + defaults::kEvalBuffer;
    if (eval - max_lb + 1 < r0 || eval >= panel.rows())
        throw DataError("insufficient history for the longest lookback");
    return eval;
}

namespace {

// Positions for every date in [eval_begin, eval_end); rows outside stay zero.
Eigen::MatrixXd model_positions(const PricePanel& panel, const ModelSpec& model,
                                const PortfolioConfig& pc,
                                const GraphHyperParams& gp,
                                const OscillatorSet& osc, int eval_begin,
                                int eval_end, int threads) {
    const int T = panel.rows(), M = panel.cols();
    Eigen::MatrixXd positions = Eigen::MatrixXd::Zero(T, M);

    auto one_date = [&](int offset) {
        const int t = eval_begin + offset;
        Eigen::MatrixXd features;
        if (model.is_baseline) {
            features = osc.at_date(t);
        } else {
            std::vector<LeadLagMatrix> v_list;
            for (int lb : model.lookbacks())
                v_list.push_back(leadlag_matrix_serial(panel, t, lb, model.method,
                                                       model.descriptor_len));
            const NetworkMatrix net = ensemble_network(v_list, gp);
            features = network_feature(osc.at_date(t), net);
        }
        const SignalFrame frame = signal_frame(panel, t, std::move(features),
                                               pc.gamma, pc.sigma_target,
                                               pc.lambda);
        positions.row(t) = frame.positions.transpose();
    };
    parallel_for(eval_end - eval_begin, threads, one_date);
    return positions;
}

Eigen::VectorXd half_spreads(const PricePanel& panel) {
    Eigen::VectorXd s(panel.cols());
    for (int m = 0; m < panel.cols(); ++m)
        s(m) = panel.markets[static_cast<size_t>(m)].half_spread;
    return s;
}

ModelRun finish_run(const PricePanel& panel, std::string name,
                    Eigen::MatrixXd positions, double gamma, int eval_begin,
                    int eval_end) {
    ModelRun run;
    run.name = std::move(name);
    run.eval_begin = eval_begin;
    run.eval_end = eval_end;
    Eigen::MatrixXd gross =
        gross_pnl(positions, panel.deltas, panel.point_value, panel.fx);
    Eigen::MatrixXd cost = transaction_costs(positions, half_spreads(panel),
                                             panel.point_value, panel.fx);
    run.positions = std::move(positions);
    run.pnl = net_pnl(std::move(gross), std::move(cost), gamma);

    const int n = eval_end - eval_begin;
    const Eigen::VectorXd net = run.pnl.portfolio.segment(eval_begin, n);
    const Eigen::VectorXd gross_r =
        run.pnl.gross.middleRows(eval_begin, n).rowwise().sum() / gamma;
    const Eigen::VectorXd cost_r =
        run.pnl.cost.middleRows(eval_begin, n).rowwise().sum() / gamma;
    std::vector<Date> dates(panel.dates.begin() + eval_begin,
                            panel.dates.begin() + eval_end);
    run.overall = performance_metrics(net, gross_r, cost_r, dates);
    run.long_short =
        long_short_split(run.positions, run.pnl, eval_begin, eval_end, panel.dates);
    run.horizon_skew = horizon_skewness(net);
    return run;
}

}  // namespace

ModelRun run_model(const PricePanel& panel, const ModelSpec& model,
                   const PortfolioConfig& pc, const GraphHyperParams& gp,
                   int eval_begin, int eval_end, int threads) {
    if (eval_begin < 0 || eval_end > panel.rows() || eval_begin >= eval_end)
        throw DataError("run_model: bad evaluation window");
    const int r0 = panel.first_complete_scaled_row();
    if (!model.is_baseline && eval_begin - model.max_lookback() + 1 < r0)
        throw DataError("insufficient history for the longest lookback");

    const OscillatorSet osc =
        compute_oscillators(panel, pc.speeds, pc.slow_ratio);
    Eigen::MatrixXd positions = model_positions(panel, model, pc, gp, osc,
                                                eval_begin, eval_end, threads);
    return finish_run(panel, model.name, std::move(positions), pc.gamma,
                      eval_begin, eval_end);
}

GridSearchResult grid_search(const PricePanel& panel, const ModelSpec& model,
                             const PortfolioConfig& pc,
                             const GraphHyperParams& base,
                             const std::vector<double>& alpha_grid,
                             const std::vector<double>& beta_grid,
                             int eval_begin, int eval_end, int threads) {
    if (model.is_baseline)
        throw ConfigError("grid_search: the baseline model has no graph parameters");
    if (alpha_grid.empty() || beta_grid.empty())
        throw ConfigError("grid_search: empty grid");
    if (eval_begin < 0 || eval_end > panel.rows() || eval_begin >= eval_end)
        throw DataError("grid_search: bad evaluation window");

    const int n_dates = eval_end - eval_begin;
    const OscillatorSet osc =
        compute_oscillators(panel, pc.speeds, pc.slow_ratio);

    // Lead-lag matrices do not depend on alpha/beta; compute them once.
    std::vector<std::vector<LeadLagMatrix>> v_cache(
        static_cast<size_t>(n_dates));
    parallel_for(n_dates, threads, [&](int off) {
        const int t = eval_begin + off;
        for (int lb : model.lookbacks())
            v_cache[static_cast<size_t>(off)].push_back(leadlag_matrix_serial(
                panel, t, lb, model.method, model.descriptor_len));
    });

    GridSearchResult result;
    bool have_best = false;
    for (double beta : beta_grid) {
        for (double alpha : alpha_grid) {
            GraphHyperParams gp = base;
            gp.alpha = alpha;
            gp.beta = beta;
            GridSearchResult::Cell cell;
            cell.alpha = alpha;
            cell.beta = beta;
            try {
                const int T = panel.rows(), M = panel.cols();
                Eigen::MatrixXd positions = Eigen::MatrixXd::Zero(T, M);
                parallel_for(n_dates, threads, [&](int off) {
                    const int t = eval_begin + off;
                    const NetworkMatrix net =
                        ensemble_network(v_cache[static_cast<size_t>(off)], gp);
                    const SignalFrame frame = signal_frame(
                        panel, t, network_feature(osc.at_date(t), net),
                        pc.gamma, pc.sigma_target, pc.lambda);
                    positions.row(t) = frame.positions.transpose();
                });
                ModelRun run = finish_run(panel, model.name, std::move(positions),
                                          pc.gamma, eval_begin, eval_end);
                if (run.overall.sharpe) cell.sharpe = *run.overall.sharpe;
            } catch (const NumericalError& e) {
                log::warn("grid_search: alpha=" + std::to_string(alpha) +
                          " beta=" + std::to_string(beta) + " failed: " + e.what());
            }
            if (cell.sharpe) {
                const bool better =
                    !have_best || *cell.sharpe > result.best_sharpe ||
                    (*cell.sharpe == result.best_sharpe &&
                     (beta > result.beta ||
                      (beta == result.beta && alpha > result.alpha)));
                if (better) {
                    result.alpha = alpha;
                    result.beta = beta;
                    result.best_sharpe = *cell.sharpe;
                    have_best = true;
                }
            }
            result.cells.push_back(cell);
        }
    }
    if (!have_best)
        throw NumericalError("grid_search: all candidates infeasible");
    return result;
}

// ---------------------------------------------------------------------------
// Bootstrap experiment
// ---------------------------------------------------------------------------

namespace {

struct ResampleStats {
    std::map<std::string, PerformanceReport> overall, long_side, short_side;
    std::map<std::string, std::map<std::string, std::optional<double>>> horizon;
    std::vector<DiversificationStats> pair_stats;  // zoo-pair order
};

std::optional<double> mean_optional(
    const std::vector<std::optional<double>>& xs) {
    double sum = 0.0;
    int n = 0;
    for (const auto& x : xs)
        if (x) {
            sum += *x;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / n;
}

}  // namespace

PerformanceReport mean_report(const std::vector<PerformanceReport>& reports) {
    PerformanceReport m;
    if (reports.empty()) return m;
    const double n = static_cast<double>(reports.size());
    std::vector<std::optional<double>> sharpe, sortino, calmar, skew, apl;
    for (const auto& r : reports) {
        m.gross_return += r.gross_return / n;
        m.transaction_cost += r.transaction_cost / n;
        m.net_return += r.net_return / n;
        m.vol += r.vol / n;
        m.downside_deviation += r.downside_deviation / n;
        m.mdd += r.mdd / n;
        m.hit_rate += r.hit_rate / n;
        m.n_days += r.n_days;
        sharpe.push_back(r.sharpe);
        sortino.push_back(r.sortino);
        calmar.push_back(r.calmar);
        skew.push_back(r.skewness);
        apl.push_back(r.avg_profit_over_avg_loss);
    }
    m.n_days = static_cast<int>(m.n_days / reports.size());
    m.sharpe = mean_optional(sharpe);
    m.sortino = mean_optional(sortino);
    m.calmar = mean_optional(calmar);
    m.skewness = mean_optional(skew);
    m.avg_profit_over_avg_loss = mean_optional(apl);
    return m;
}

ExperimentReport run_experiment(const PricePanel& panel,
                                const ExperimentConfig& cfg, int jobs) {
    if (cfg.zoo.empty()) throw ConfigError("experiment: empty model zoo");
    std::vector<ModelSpec> zoo;
    for (const auto& name : cfg.zoo)
        zoo.push_back(parse_model(name, cfg.delta_single, cfg.delta_grid,
                                  cfg.descriptor_len));

    const int R = cfg.bootstrap.n_resamples;
    std::vector<ResampleStats> slots(static_cast<size_t>(R));

    std::vector<std::pair<size_t, size_t>> pair_index;
    for (size_t a = 0; a < zoo.size(); ++a)
        for (size_t b = a + 1; b < zoo.size(); ++b) pair_index.emplace_back(a, b);

    parallel_for(R, std::max(jobs, 1), [&](int r) {
        PricePanel bp;
        try {
            bp = bootstrap_panel(panel, cfg.bootstrap,
                                 static_cast<uint64_t>(r));
        } catch (const std::exception& e) {
            throw DataError("resample " + std::to_string(r) + ": " + e.what());
        }
        const int eval_begin = auto_eval_begin(bp, zoo, cfg.eval_start_offset);
        const int eval_end = bp.rows();

        std::vector<ModelRun> runs;
        runs.reserve(zoo.size());
        for (const auto& spec : zoo) {
            try {
                runs.push_back(run_model(bp, spec, cfg.portfolio, cfg.network,
                                         eval_begin, eval_end, 1));
            } catch (const std::exception& e) {
                throw NumericalError("resample " + std::to_string(r) + ", model " +
                                     spec.name + ": " + e.what());
            }
        }

        ResampleStats& slot = slots[static_cast<size_t>(r)];
        for (const auto& run : runs) {
            slot.overall[run.name] = run.overall;
            slot.long_side[run.name] = run.long_short.long_side;
            slot.short_side[run.name] = run.long_short.short_side;
            slot.horizon[run.name] = run.horizon_skew;
        }
        for (const auto& [a, b] : pair_index)
            slot.pair_stats.push_back(diversification(
                runs[a].pnl.portfolio, runs[b].pnl.portfolio, runs[a].positions,
                runs[b].positions, eval_begin, eval_end));
    });

    ExperimentReport report;
    report.version = kVersion;
    report.seed = cfg.bootstrap.seed;
    report.config_checksum = checksum_hex(cfg.config_checksum);
    report.n_resamples = R;
    for (const auto& spec : zoo) report.models.push_back(spec.name);

    for (const auto& spec : zoo) {
        for (const auto& slot : slots) {
            report.overall[spec.name].push_back(slot.overall.at(spec.name));
            report.long_side[spec.name].push_back(slot.long_side.at(spec.name));
            report.short_side[spec.name].push_back(slot.short_side.at(spec.name));
            report.horizon[spec.name].push_back(slot.horizon.at(spec.name));
        }
    }

    for (size_t pi = 0; pi < pair_index.size(); ++pi) {
        PairDiversification pd;
        pd.model_a = zoo[pair_index[pi].first].name;
        pd.model_b = zoo[pair_index[pi].second].name;
        double corr = 0.0, agree = 0.0;
        std::vector<std::optional<double>> gains;
        for (const auto& slot : slots) {
            corr += slot.pair_stats[pi].correlation / R;
            agree += slot.pair_stats[pi].sign_agreement / R;
            gains.push_back(slot.pair_stats[pi].opposing_day_gain);
        }
        pd.correlation = corr;
        pd.sign_agreement = agree;
        pd.opposing_day_gain = mean_optional(gains);
        report.diversification.push_back(pd);
    }

    // Significance against the baseline, when it is part of the zoo.
    const bool have_macd =
        std::find(report.models.begin(), report.models.end(), "MACD") !=
        report.models.end();
    if (have_macd) {
        for (const auto& spec : zoo) {
            if (spec.name == "MACD") continue;
            std::vector<double> diffs, macd_s, nmm_s;
            for (int r = 0; r < R; ++r) {
                const auto& sm = report.overall.at("MACD")[static_cast<size_t>(r)].sharpe;
                const auto& sn =
                    report.overall.at(spec.name)[static_cast<size_t>(r)].sharpe;
                if (sm && sn) {
                    diffs.push_back(*sn - *sm);
                    macd_s.push_back(*sm);
                    nmm_s.push_back(*sn);
                }
            }
            if (diffs.empty()) continue;
            ModelPValues pv;
            pv.model = spec.name;
            pv.wilcoxon = wilcoxon_one_sided(diffs);
            pv.ks = ks_one_sided(macd_s, nmm_s).p_value;
            report.pvalues.push_back(pv);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

std::string opt_cell(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : "";
}

void write_header_comment(std::ostream& out, const ExperimentReport& r) {
    out << "# netmom version=" << r.version << " seed=" << r.seed
        << " config_checksum=" << r.config_checksum << "\n";
}

void summary_rows(std::ostream& out, const std::string& model,
                  const std::string& panel, const PerformanceReport& m) {
    out << model << "," << panel << "," << csv::format_double(m.gross_return)
        << "," << csv::format_double(m.transaction_cost) << ","
        << csv::format_double(m.net_return) << "," << csv::format_double(m.vol)
        << "," << opt_cell(m.sharpe) << ","
        << csv::format_double(m.downside_deviation) << ","
        << csv::format_double(m.mdd) << "," << opt_cell(m.sortino) << ","
        << opt_cell(m.calmar) << "," << opt_cell(m.skewness) << ","
        << csv::format_double(m.hit_rate) << ","
        << opt_cell(m.avg_profit_over_avg_loss) << "\n";
}

}  // namespace

json report_json(const PerformanceReport& r) {
    json j;
    j["gross_return"] = r.gross_return;
    j["transaction_cost"] = r.transaction_cost;
    j["net_return"] = r.net_return;
    j["vol"] = r.vol;
    j["sharpe"] = r.sharpe ? json(*r.sharpe) : json(nullptr);
    j["downside_deviation"] = r.downside_deviation;
    j["mdd"] = r.mdd;
    j["sortino"] = r.sortino ? json(*r.sortino) : json(nullptr);
    j["calmar"] = r.calmar ? json(*r.calmar) : json(nullptr);
    j["skewness"] = r.skewness ? json(*r.skewness) : json(nullptr);
    j["hit_rate"] = r.hit_rate;
    j["avg_profit_over_avg_loss"] =
        r.avg_profit_over_avg_loss ? json(*r.avg_profit_over_avg_loss) : json(nullptr);
    j["n_days"] = r.n_days;
    return j;
}

json experiment_json(const ExperimentReport& r) {
    json j;
    j["version"] = r.version;
    j["seed"] = r.seed;
    j["config_checksum"] = r.config_checksum;
    j["n_resamples"] = r.n_resamples;
    j["models"] = r.models;
    for (const auto& name : r.models) {
        json mj;
        mj["mean_overall"] = report_json(mean_report(r.overall.at(name)));
        mj["mean_long"] = report_json(mean_report(r.long_side.at(name)));
        mj["mean_short"] = report_json(mean_report(r.short_side.at(name)));
        json sharpes = json::array();
        for (const auto& rep : r.overall.at(name))
            sharpes.push_back(rep.sharpe ? json(*rep.sharpe) : json(nullptr));
        mj["net_sharpe_per_resample"] = sharpes;
        json hz;
        for (const auto& [label, days] : default_horizons()) {
            std::vector<std::optional<double>> vals;
            for (const auto& per : r.horizon.at(name)) {
                auto it = per.find(label);
                vals.push_back(it == per.end() ? std::nullopt : it->second);
            }
            auto m = mean_optional(vals);
            hz[label] = m ? json(*m) : json(nullptr);
            (void)days;
        }
        mj["mean_horizon_skewness"] = hz;
        j["results"][name] = mj;
    }
    for (const auto& pv : r.pvalues) {
        j["pvalues"][pv.model] = {{"wilcoxon", pv.wilcoxon}, {"ks", pv.ks}};
    }
    for (const auto& pd : r.diversification) {
        json dj;
        dj["model_a"] = pd.model_a;
        dj["model_b"] = pd.model_b;
        dj["correlation"] = pd.correlation;
        dj["sign_agreement"] = pd.sign_agreement;
        dj["opposing_day_gain"] =
            pd.opposing_day_gain ? json(*pd.opposing_day_gain) : json(nullptr);
        j["diversification"].push_back(dj);
    }
    return j;
}

void write_experiment_outputs(const ExperimentReport& report,
                              const std::string& outdir) {
    std::filesystem::create_directories(outdir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(outdir) / name).string();
    };

    {
        std::ofstream out(path("summary.csv"), std::ios::binary);
        write_header_comment(out, report);
        out << "model,panel,gross_return,transaction_cost,net_return,vol,sharpe,"
               "downside_deviation,mdd,sortino,calmar,skewness,hit_rate,"
               "avg_p_over_avg_l\n";
        for (const auto& name : report.models) {
            summary_rows(out, name, "overall", mean_report(report.overall.at(name)));
            summary_rows(out, name, "long", mean_report(report.long_side.at(name)));
            summary_rows(out, name, "short", mean_report(report.short_side.at(name)));
        }
    }
    {
        std::ofstream out(path("pvalues.csv"), std::ios::binary);
        write_header_comment(out, report);
        out << "model,wilcoxon_p,ks_p\n";
        for (const auto& pv : report.pvalues)
            out << pv.model << "," << csv::format_double(pv.wilcoxon) << ","
                << csv::format_double(pv.ks) << "\n";
    }
    {
        std::ofstream out(path("diversification.csv"), std::ios::binary);
        write_header_comment(out, report);
        out << "model_a,model_b,correlation,sign_agreement,opposing_day_gain\n";
        for (const auto& pd : report.diversification)
            out << pd.model_a << "," << pd.model_b << ","
                << csv::format_double(pd.correlation) << ","
                << csv::format_double(pd.sign_agreement) << ","
                << opt_cell(pd.opposing_day_gain) << "\n";
    }
    {
        std::ofstream out(path("skewness_horizons.csv"), std::ios::binary);
        write_header_comment(out, report);
        out << "model,horizon,days,skewness\n";
        for (const auto& name : report.models) {
            for (const auto& [label, days] : default_horizons()) {
                std::vector<std::optional<double>> vals;
                for (const auto& per : report.horizon.at(name)) {
                    auto it = per.find(label);
                    vals.push_back(it == per.end() ? std::nullopt : it->second);
                }
                out << name << "," << label << "," << days << ","
                    << opt_cell(mean_optional(vals)) << "\n";
            }
        }
    }
    {
        std::ofstream out(path("report.json"), std::ios::binary);
        out << experiment_json(report).dump(1) << "\n";
    }
}

}  // namespace netmom

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netmom/backtest.hpp"
#include "netmom/config.hpp"
#include "netmom/signals.hpp"

namespace netmom {

// One model evaluated on one panel. Positions are zero outside
// [eval_begin, eval_end); metrics cover exactly that window.
struct ModelRun {
    std::string name;
    Eigen::MatrixXd positions;  // T x M lots
    PnlFrame pnl;
    int eval_begin = 0;
    int eval_end = 0;
    PerformanceReport overall;
    LongShortReports long_short;
    std::map<std::string, std::optional<double>> horizon_skew;

    Eigen::VectorXd eval_net_returns() const {
        return pnl.portfolio.segment(eval_begin, eval_end - eval_begin);
    }
};

// First tradable row for the zoo: the first fully defined row plus the
// longest lookback plus a settling buffer. Honors cfg-style overrides via
// the offset argument (rows past the first defined row; -1 = auto).
int auto_eval_begin(const PricePanel& panel, const std::vector<ModelSpec>& zoo,
                    int offset = -1);

ModelRun run_model(const PricePanel& panel, const ModelSpec& model,
                   const PortfolioConfig& pc, const GraphHyperParams& gp,
                   int eval_begin, int eval_end, int threads);

struct GridSearchResult {
    double alpha = 0.0;
    double beta = 0.0;
    double best_sharpe = 0.0;
    struct Cell {
        double alpha = 0.0;
        double beta = 0.0;
        std::optional<double> sharpe;
    };
    std::vector<Cell> cells;
};

// Maximises in-sample net Sharpe over the alpha/beta grid; ties resolve to
// the larger beta, then the larger alpha. Lead-lag matrices are computed
// once and shared across the grid.
GridSearchResult grid_search(const PricePanel& panel, const ModelSpec& model,
                             const PortfolioConfig& pc,
                             const GraphHyperParams& base,
                             const std::vector<double>& alpha_grid,
                             const std::vector<double>& beta_grid,
                             int eval_begin, int eval_end, int threads);

struct PairDiversification {
    std::string model_a;
    std::string model_b;
    double correlation = 0.0;
    double sign_agreement = 0.0;
    std::optional<double> opposing_day_gain;
};

struct ModelPValues {
    std::string model;
    double wilcoxon = 1.0;
    double ks = 1.0;
};

struct ExperimentReport {
    std::string version;
    uint64_t seed = 0;
    std::string config_checksum;
    int n_resamples = 0;
    std::vector<std::string> models;

    // Per model, per resample.
    std::map<std::string, std::vector<PerformanceReport>> overall;
    std::map<std::string, std::vector<PerformanceReport>> long_side;
    std::map<std::string, std::vector<PerformanceReport>> short_side;
    std::map<std::string,
             std::vector<std::map<std::string, std::optional<double>>>>
        horizon;

    std::vector<PairDiversification> diversification;  // means across resamples
    std::vector<ModelPValues> pvalues;                 // NMM models vs MACD
};

ExperimentReport run_experiment(const PricePanel& panel,
                                const ExperimentConfig& cfg, int jobs);

// Field-wise mean across resamples; optional fields average their present
// values and stay absent when never present.
PerformanceReport mean_report(const std::vector<PerformanceReport>& reports);

nlohmann::json report_json(const PerformanceReport& r);
nlohmann::json experiment_json(const ExperimentReport& r);

void write_experiment_outputs(const ExperimentReport& report,
                              const std::string& outdir);

}  // namespace netmom

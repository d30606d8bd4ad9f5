#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netmom/dates.hpp"

namespace netmom {

// Position/pnl timing: a position decided at t is established at t+1 (paying
// the spread there) and earns the price move realised at t+2.

// gross(t) = positions(t-2) * deltas(t) * F(t) * E(t); first two rows zero.
Eigen::MatrixXd gross_pnl(const Eigen::MatrixXd& positions,
                          const Eigen::MatrixXd& deltas,
                          const Eigen::MatrixXd& point_value,
                          const Eigen::MatrixXd& fx);

// cost(t) = |positions(t) - positions(t-1)| * s/2 * F(t) * E(t); the first
// row trades from flat.
Eigen::MatrixXd transaction_costs(const Eigen::MatrixXd& positions,
                                  const Eigen::VectorXd& half_spread,
                                  const Eigen::MatrixXd& point_value,
                                  const Eigen::MatrixXd& fx);

struct PnlFrame {
    Eigen::MatrixXd gross;      // T x M, USD
    Eigen::MatrixXd cost;       // T x M, USD, >= 0
    Eigen::MatrixXd net;        // gross - cost
    Eigen::VectorXd portfolio;  // daily net return: row sum / gamma
    double gamma = 0.0;
};

PnlFrame net_pnl(Eigen::MatrixXd gross, Eigen::MatrixXd cost, double gamma);

struct PerformanceReport {
    double gross_return = 0.0;       // annualized
    double transaction_cost = 0.0;   // annualized
    double net_return = 0.0;         // annualized
    double vol = 0.0;                // annualized
    std::optional<double> sharpe;
    double downside_deviation = 0.0;
    double mdd = 0.0;
    std::optional<double> sortino;
    std::optional<double> calmar;
    std::optional<double> skewness;  // calendar-month aggregated returns
    double hit_rate = 0.0;
    std::optional<double> avg_profit_over_avg_loss;
    int n_days = 0;
};

// All inputs are aligned daily return-unit series over the evaluation window.
PerformanceReport performance_metrics(const Eigen::VectorXd& net_returns,
                                      const Eigen::VectorXd& gross_returns,
                                      const Eigen::VectorXd& cost_returns,
                                      const std::vector<Date>& dates);
PerformanceReport performance_metrics(const Eigen::VectorXd& net_returns,
                                      const std::vector<Date>& dates);

// Largest peak-to-trough decline of the cumulative arithmetic return curve
// (single scan; the curve starts flat at zero).
double max_drawdown(const Eigen::VectorXd& returns);

// Adjusted Fisher-Pearson skewness; absent for n < 3 or zero variance.
std::optional<double> sample_skewness(const std::vector<double>& xs);

struct LongShortReports {
    PerformanceReport long_side;
    PerformanceReport short_side;
    // Return-unit series over [begin, end); residual holds market-days whose
    // originating position was zero, so the three partition the total.
    Eigen::VectorXd long_returns;
    Eigen::VectorXd short_returns;
    Eigen::VectorXd residual_returns;
};

// Attribution keys on the pnl-originating position (two days back), so every
// USD lands on exactly one side (or in the residual bucket).
LongShortReports long_short_split(const Eigen::MatrixXd& positions,
                                  const PnlFrame& pnl, int begin, int end,
                                  const std::vector<Date>& dates);

struct DiversificationStats {
    double correlation = 0.0;     // Pearson, daily portfolio returns
    double sign_agreement = 0.0;  // zeros agree only with zeros
    // Annualized mean of (return_a - return_b) on days where at least one
    // market's originating positions have opposite nonzero sign.
    std::optional<double> opposing_day_gain;
    int opposing_days = 0;
};

DiversificationStats diversification(const Eigen::VectorXd& returns_a,
                                     const Eigen::VectorXd& returns_b,
                                     const Eigen::MatrixXd& positions_a,
                                     const Eigen::MatrixXd& positions_b,
                                     int begin, int end);

// Horizon label -> trading days.
const std::vector<std::pair<std::string, int>>& default_horizons();

// Skewness of overlapping h-day sums per horizon; horizons with fewer than
// three sums are absent.
std::map<std::string, std::optional<double>> horizon_skewness(
    const Eigen::VectorXd& returns,
    const std::vector<std::pair<std::string, int>>& horizons =
        default_horizons());

}  // namespace netmom

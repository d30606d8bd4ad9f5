#pragma once

#include <Eigen/Dense>
#include <vector>

#include "netmom/graph_learn.hpp"
#include "netmom/market_data.hpp"

namespace netmom {

// EWMA with smoothing factor a (weight of the new observation), seeded at the
// first defined value; NaN gaps leave the state untouched.
Eigen::VectorXd ewma(const Eigen::VectorXd& x, double a);

// Crossover oscillator on the volatility-scaled price: fast smoothing 2^-k
// against slow smoothing 1/(slow_ratio * 2^k).
Eigen::VectorXd oscillator(const Eigen::VectorXd& scaled_price, int speed,
                           double slow_ratio);

struct OscillatorSet {
    std::vector<int> speeds;
    double slow_ratio = 3.0;
    std::vector<Eigen::MatrixXd> values;  // one T x M matrix per speed

    // M x K slice for one date row.
    Eigen::MatrixXd at_date(int t) const;
};

OscillatorSet compute_oscillators(const PricePanel& panel,
                                  const std::vector<int>& speeds,
                                  double slow_ratio);

// Neighbour aggregation: row m of the result is sum_n A~(m,n) * R(n, .).
Eigen::MatrixXd network_feature(const Eigen::MatrixXd& oscillators,
                                const NetworkMatrix& network);

// Odd reverting-sigmoid response, unit variance under a standard normal
// input: r(x) = c * x * exp(-lambda^2 x^2 / 2), c = (1 + 2 lambda^2)^(3/4).
double response(double x, double lambda);
double response_norm_constant(double lambda);

// Lots per market for one date. Markets with undefined features or an
// unusable sigma get a zero position.
Eigen::VectorXd position_signal(const Eigen::MatrixXd& features,  // M x K
                                const Eigen::VectorXd& vol22,
                                const Eigen::VectorXd& point_value,
                                const Eigen::VectorXd& fx, double gamma,
                                double sigma_target, double lambda);

// One date's features and the sized positions they produced.
struct SignalFrame {
    Date date;
    Eigen::MatrixXd features;   // M x K
    Eigen::VectorXd positions;  // lots, signed, fractional
    double gamma = 0.0;
    double sigma_target = 0.0;
};

SignalFrame signal_frame(const PricePanel& panel, int t,
                         Eigen::MatrixXd features, double gamma,
                         double sigma_target, double lambda);

}  // namespace netmom

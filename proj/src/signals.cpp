#include "netmom/signals.hpp"

#include <cmath>
#include <limits>

#include "netmom/errors.hpp"

namespace netmom {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTradingDays = 252.0;
}

Eigen::VectorXd ewma(const Eigen::VectorXd& x, double a) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("ewma: smoothing factor in (0,1]");
    Eigen::VectorXd out(x.size());
    double state = kNaN;
    bool seeded = false;
    for (Eigen::Index t = 0; t < x.size(); ++t) {
        const double v = x(t);
        if (!std::isnan(v)) {
            if (!seeded) {
                state = v;
                seeded = true;
            } else {
                state += a * (v - state);
            }
        }
        out(t) = seeded ? state : kNaN;
    }
    return out;
}

Eigen::VectorXd oscillator(const Eigen::VectorXd& scaled_price, int speed,
                           double slow_ratio) {
    if (speed < 1) throw ConfigError("oscillator: speed must be >= 1");
    if (!(slow_ratio > 1.0)) throw ConfigError("oscillator: slow_ratio must be > 1");
    const double a_fast = std::ldexp(1.0, -speed);  // 2^-k
    const double a_slow = 1.0 / (slow_ratio * std::ldexp(1.0, speed));
    return ewma(scaled_price, a_fast) - ewma(scaled_price, a_slow);
}

Eigen::MatrixXd OscillatorSet::at_date(int t) const {
    const Eigen::Index M = values.front().cols();
    Eigen::MatrixXd out(M, static_cast<Eigen::Index>(speeds.size()));
    for (size_t k = 0; k < speeds.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = values[k].row(t).transpose();
    return out;
}

OscillatorSet compute_oscillators(const PricePanel& panel,
                                  const std::vector<int>& speeds,
                                  double slow_ratio) {
    if (speeds.empty()) throw ConfigError("compute_oscillators: no speeds");
    OscillatorSet set;
    set.speeds = speeds;
    set.slow_ratio = slow_ratio;
    for (int k : speeds) {
        Eigen::MatrixXd r(panel.rows(), panel.cols());
        for (int m = 0; m < panel.cols(); ++m)
            r.col(m) = oscillator(panel.scaled_prices.col(m), k, slow_ratio);
        set.values.push_back(std::move(r));
    }
    return set;
}

Eigen::MatrixXd network_feature(const Eigen::MatrixXd& oscillators,
                                const NetworkMatrix& network) {
    if (network.values.rows() != oscillators.rows())
        throw DataError("network_feature: dimension mismatch");
    return network.values * oscillators;
}

double response_norm_constant(double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("response: lambda must be > 0");
    return std::pow(1.0 + 2.0 * lambda * lambda, 0.75);
}

double response(double x, double lambda) {
    return response_norm_constant(lambda) * x *
           std::exp(-0.5 * lambda * lambda * x * x);
}

Eigen::VectorXd position_signal(const Eigen::MatrixXd& features,
                                const Eigen::VectorXd& vol22,
                                const Eigen::VectorXd& point_value,
                                const Eigen::VectorXd& fx, double gamma,
                                double sigma_target, double lambda) {
    const Eigen::Index M = features.rows();
    const Eigen::Index K = features.cols();
    if (K < 1) throw ConfigError("position_signal: need at least one speed");
    if (vol22.size() != M || point_value.size() != M || fx.size() != M)
        throw DataError("position_signal: dimension mismatch");

    const double risk_budget = gamma * sigma_target / std::sqrt(kTradingDays);
    Eigen::VectorXd lots = Eigen::VectorXd::Zero(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        const double sigma = vol22(m);
        if (std::isnan(sigma) || sigma <= kEpsVol) continue;  // unusable date
        if (!(point_value(m) > 0.0) || !(fx(m) > 0.0))
            throw DataError("position_signal: non-positive risk denominator");
        double acc = 0.0;
        bool defined = true;
        for (Eigen::Index k = 0; k < K; ++k) {
            const double f = features(m, k);
            if (std::isnan(f)) {
                defined = false;
                break;
            }
            acc += response(f, lambda);
        }
        if (!defined) continue;
        const double lots_per_usd_risk =
            1.0 / (point_value(m) * fx(m) * sigma);
        lots(m) = acc / (static_cast<double>(M) * static_cast<double>(K)) *
                  lots_per_usd_risk * risk_budget;
    }
    return lots;
}

SignalFrame signal_frame(const PricePanel& panel, int t,
                         Eigen::MatrixXd features, double gamma,
                         double sigma_target, double lambda) {
    SignalFrame f;
    f.date = panel.dates[static_cast<size_t>(t)];
    f.gamma = gamma;
    f.sigma_target = sigma_target;
    f.positions = position_signal(features, panel.vol22.row(t).transpose(),
                                  panel.point_value.row(t).transpose(),
                                  panel.fx.row(t).transpose(), gamma,
                                  sigma_target, lambda);
    f.features = std::move(features);
    return f;
}

}  // namespace netmom

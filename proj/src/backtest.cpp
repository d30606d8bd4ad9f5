#include "netmom/backtest.hpp"

#include <cmath>

#include "netmom/errors.hpp"

namespace netmom {

namespace {

constexpr double kTradingDays = 252.0;

double mean_of(const Eigen::VectorXd& x) {
    return x.size() == 0 ? 0.0 : x.mean();
}

double sample_std(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    if (n < 2) return 0.0;
    const double mu = x.mean();
    const double ss = (x.array() - mu).square().sum();
    return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace

Eigen::MatrixXd gross_pnl(const Eigen::MatrixXd& positions,
                          const Eigen::MatrixXd& deltas,
                          const Eigen::MatrixXd& point_value,
                          const Eigen::MatrixXd& fx) {
    const Eigen::Index T = positions.rows(), M = positions.cols();
    if (deltas.rows() != T || deltas.cols() != M || point_value.rows() != T ||
        point_value.cols() != M || fx.rows() != T || fx.cols() != M)
        throw DataError("gross_pnl: misaligned series");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(T, M);
    for (Eigen::Index t = 2; t < T; ++t)
        for (Eigen::Index m = 0; m < M; ++m) {
            const double x = positions(t - 2, m);
            const double d = deltas(t, m);
            if (x == 0.0 || std::isnan(d)) continue;
            g(t, m) = x * d * point_value(t, m) * fx(t, m);
        }
    return g;
}

Eigen::MatrixXd transaction_costs(const Eigen::MatrixXd& positions,
                                  const Eigen::VectorXd& half_spread,
                                  const Eigen::MatrixXd& point_value,
                                  const Eigen::MatrixXd& fx) {
    const Eigen::Index T = positions.rows(), M = positions.cols();
    if (half_spread.size() != M || point_value.rows() != T || fx.rows() != T)
        throw DataError("transaction_costs: misaligned series");
    for (Eigen::Index m = 0; m < M; ++m)
        if (half_spread(m) < 0.0) throw DataError("negative spread");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(T, M);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index m = 0; m < M; ++m) {
            const double prev = t > 0 ? positions(t - 1, m) : 0.0;
            const double turn = std::abs(positions(t, m) - prev);
            if (turn == 0.0) continue;
            c(t, m) = turn * (half_spread(m) / 2.0) * point_value(t, m) * fx(t, m);
        }
    return c;
}

PnlFrame net_pnl(Eigen::MatrixXd gross, Eigen::MatrixXd cost, double gamma) {
    if (gross.rows() != cost.rows() || gross.cols() != cost.cols())
        throw DataError("net_pnl: misaligned series");
    if (!(gamma > 0.0)) throw ConfigError("net_pnl: gamma must be > 0");
    PnlFrame f;
    f.gamma = gamma;
    f.gross = std::move(gross);
    f.cost = std::move(cost);
    f.net = f.gross - f.cost;
    f.portfolio = f.net.rowwise().sum() / gamma;
    return f;
}

double max_drawdown(const Eigen::VectorXd& returns) {
    double cum = 0.0, peak = 0.0, mdd = 0.0;
    for (Eigen::Index t = 0; t < returns.size(); ++t) {
        cum += returns(t);
        peak = std::max(peak, cum);
        mdd = std::max(mdd, peak - cum);
    }
    return mdd;
}

std::optional<double> sample_skewness(const std::vector<double>& xs) {
    const size_t n = xs.size();
    if (n < 3) return std::nullopt;
    double mu = 0.0;
    for (double v : xs) mu += v;
    mu /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (double v : xs) {
        const double d = v - mu;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (!(m2 > 0.0)) return std::nullopt;
    const double g1 = m3 / std::pow(m2, 1.5);
    const double nd = static_cast<double>(n);
    return g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
}

PerformanceReport performance_metrics(const Eigen::VectorXd& net_returns,
                                      const Eigen::VectorXd& gross_returns,
                                      const Eigen::VectorXd& cost_returns,
                                      const std::vector<Date>& dates) {
    const Eigen::Index n = net_returns.size();
    if (n < 2) throw DataError("performance_metrics: need at least 2 returns");
    if (gross_returns.size() != n || cost_returns.size() != n ||
        static_cast<Eigen::Index>(dates.size()) != n)
        throw DataError("performance_metrics: misaligned series");
    if (!net_returns.allFinite() || !gross_returns.allFinite())
        throw DataError("performance_metrics: non-finite return");

    PerformanceReport r;
    r.n_days = static_cast<int>(n);
    r.gross_return = mean_of(gross_returns) * kTradingDays;
    r.transaction_cost = mean_of(cost_returns) * kTradingDays;
    r.net_return = mean_of(net_returns) * kTradingDays;
    r.vol = sample_std(net_returns) * std::sqrt(kTradingDays);
    if (r.vol > 0.0) r.sharpe = r.net_return / r.vol;
    r.downside_deviation =
        std::sqrt(net_returns.array().min(0.0).square().mean()) *
        std::sqrt(kTradingDays);
    if (r.downside_deviation > 0.0) r.sortino = r.net_return / r.downside_deviation;
    r.mdd = max_drawdown(net_returns);
    if (r.mdd > 0.0) r.calmar = r.net_return / r.mdd;

    // Calendar-month aggregation for the skewness estimate.
    std::vector<double> monthly;
    int cur_key = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
        const int key = dates[static_cast<size_t>(t)].year * 12 +
                        dates[static_cast<size_t>(t)].month;
        if (key != cur_key) {
            monthly.push_back(0.0);
            cur_key = key;
        }
        monthly.back() += net_returns(t);
    }
    r.skewness = sample_skewness(monthly);

    int up = 0, down = 0;
    double gain = 0.0, loss = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (net_returns(t) > 0.0) {
            ++up;
            gain += net_returns(t);
        } else if (net_returns(t) < 0.0) {
            ++down;
            loss += net_returns(t);
        }
    }
    r.hit_rate = static_cast<double>(up) / static_cast<double>(n);
    if (up > 0 && down > 0)
        r.avg_profit_over_avg_loss =
            (gain / up) / std::abs(loss / down);
    return r;
}

PerformanceReport performance_metrics(const Eigen::VectorXd& net_returns,
                                      const std::vector<Date>& dates) {
    return performance_metrics(net_returns, net_returns,
                               Eigen::VectorXd::Zero(net_returns.size()), dates);
}

LongShortReports long_short_split(const Eigen::MatrixXd& positions,
                                  const PnlFrame& pnl, int begin, int end,
                                  const std::vector<Date>& dates) {
    const Eigen::Index M = positions.cols();
    if (begin < 0 || end > positions.rows() || begin >= end)
        throw DataError("long_short_split: bad window");
    const int n = end - begin;
    LongShortReports out;
    out.long_returns = Eigen::VectorXd::Zero(n);
    out.short_returns = Eigen::VectorXd::Zero(n);
    out.residual_returns = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd long_gross = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd short_gross = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd long_cost = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd short_cost = Eigen::VectorXd::Zero(n);

    for (int t = begin; t < end; ++t) {
        for (Eigen::Index m = 0; m < M; ++m) {
            const double origin = t >= 2 ? positions(t - 2, m) : 0.0;
            const double net = pnl.net(t, m) / pnl.gamma;
            const double gross = pnl.gross(t, m) / pnl.gamma;
            const double cost = pnl.cost(t, m) / pnl.gamma;
            const int row = t - begin;
            if (origin > 0.0) {
                out.long_returns(row) += net;
                long_gross(row) += gross;
                long_cost(row) += cost;
            } else if (origin < 0.0) {
                out.short_returns(row) += net;
                short_gross(row) += gross;
                short_cost(row) += cost;
            } else {
                out.residual_returns(row) += net;
            }
        }
    }
    std::vector<Date> window(dates.begin() + begin, dates.begin() + end);
    out.long_side =
        performance_metrics(out.long_returns, long_gross, long_cost, window);
    out.short_side =
        performance_metrics(out.short_returns, short_gross, short_cost, window);
    return out;
}

DiversificationStats diversification(const Eigen::VectorXd& returns_a,
                                     const Eigen::VectorXd& returns_b,
                                     const Eigen::MatrixXd& positions_a,
                                     const Eigen::MatrixXd& positions_b,
                                     int begin, int end) {
    if (returns_a.size() != returns_b.size() ||
        positions_a.rows() != positions_b.rows() ||
        positions_a.cols() != positions_b.cols())
        throw DataError("diversification: misaligned series");
    if (begin < 0 || end > positions_a.rows() || begin >= end ||
        returns_a.size() != positions_a.rows())
        throw DataError("diversification: bad window");

    DiversificationStats s;
    const int n = end - begin;
    const Eigen::VectorXd ra = returns_a.segment(begin, n);
    const Eigen::VectorXd rb = returns_b.segment(begin, n);
    const double sa = sample_std(ra), sb = sample_std(rb);
    if (sa > 0.0 && sb > 0.0) {
        const double cov =
            ((ra.array() - ra.mean()) * (rb.array() - rb.mean())).sum() /
            static_cast<double>(n - 1);
        s.correlation = cov / (sa * sb);
    } else {
        s.correlation = 0.0;
    }

    auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
    int64_t agree = 0;
    for (int t = begin; t < end; ++t)
        for (Eigen::Index m = 0; m < positions_a.cols(); ++m)
            if (sgn(positions_a(t, m)) == sgn(positions_b(t, m))) ++agree;
    s.sign_agreement = static_cast<double>(agree) /
                       (static_cast<double>(n) *
                        static_cast<double>(positions_a.cols()));

    double diff_sum = 0.0;
    for (int t = begin; t < end; ++t) {
        if (t < 2) continue;  // no originating position yet
        bool opposing = false;
        for (Eigen::Index m = 0; m < positions_a.cols(); ++m)
            if (positions_a(t - 2, m) * positions_b(t - 2, m) < 0.0) {
                opposing = true;
                break;
            }
        if (opposing) {
            ++s.opposing_days;
            diff_sum += returns_a(t) - returns_b(t);
        }
    }
    if (s.opposing_days > 0)
        s.opposing_day_gain = diff_sum / s.opposing_days * kTradingDays;
    return s;
}

const std::vector<std::pair<std::string, int>>& default_horizons() {
    static const std::vector<std::pair<std::string, int>> h = {
        {"1d", 1},  {"1w", 5},  {"2w", 10},  {"1m", 22},
        {"2m", 44}, {"3m", 66}, {"6m", 126}, {"1y", 252}};
    return h;
}

std::map<std::string, std::optional<double>> horizon_skewness(
    const Eigen::VectorXd& returns,
    const std::vector<std::pair<std::string, int>>& horizons) {
    std::map<std::string, std::optional<double>> out;
    const Eigen::Index n = returns.size();
    for (const auto& [label, h] : horizons) {
        if (h < 1 || n - h + 1 < 3) {
            out[label] = std::nullopt;
            continue;
        }
        std::vector<double> sums;
        sums.reserve(static_cast<size_t>(n - h + 1));
        double run = returns.head(h).sum();
        sums.push_back(run);
        for (Eigen::Index t = h; t < n; ++t) {
            run += returns(t) - returns(t - h);
            sums.push_back(run);
        }
        out[label] = sample_skewness(sums);
    }
    return out;
}

}  // namespace netmom

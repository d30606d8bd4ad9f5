// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria are property-based plus a synthetic end-to-end study.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "netmom/config.hpp"
#include "netmom/errors.hpp"
#include "netmom/experiment.hpp"
#include "netmom/graph_learn.hpp"
#include "netmom/leadlag.hpp"
#include "netmom/rng.hpp"
#include "netmom/stats.hpp"
#include "netmom/synthetic.hpp"
#include "support/oracles.hpp"

using namespace netmom;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
};

std::vector<double> random_series(Rng& rng, size_t n, double scale = 1.0) {
    std::vector<double> x(n);
    for (auto& v : x) v = scale * rng.normal();
    return x;
}

// --------------------------------------------------------------------------
// 1. Levy area against the shoelace oracle
// --------------------------------------------------------------------------
Check criterion_levy_oracle() {
    Check c;
    const auto t0 = Clock::now();
    Rng rng(20240601);
    for (int rep = 0; rep < 200; ++rep) {
        const size_t n = 2 + rng.uniform_index(49);
        auto x = random_series(rng, n, 2.0);
        auto y = random_series(rng, n, 2.0);
        const double got = levy_area(x, y);
        const double want = oracle::shoelace_chord_area(x, y);
        c.require(std::abs(got - want) <= 1e-9, "shoelace deviation > 1e-9");
        c.require(levy_area(y, x) == -got, "antisymmetry not exact");
        c.require(levy_area(x, x) == 0.0, "self area not exactly zero");
    }
    const double dt = seconds_since(t0);
    c.require(dt < 5.0, "runtime " + std::to_string(dt) + "s >= 5s");
    c.detail << " [" << dt << "s]";
    return c;
}

// --------------------------------------------------------------------------
// 2. Sign property of the Levy area under a lagged response
// --------------------------------------------------------------------------
Check criterion_sign_property() {
    Check c;
    const auto t0 = Clock::now();
    const int windows = 500, n = 66;
    auto run_variant = [&](const std::function<double(double)>& f,
                           double noise, const char* label) {
        Rng rng(77001);
        int positive = 0;
        for (int w = 0; w < windows; ++w) {
            std::vector<double> x(n), y(n);
            for (int t = 0; t < n; ++t) x[t] = rng.normal();
            for (int t = 0; t < n; ++t)
                y[t] = 0.8 * f(t > 0 ? x[t - 1] : 0.0) + noise * rng.normal();
            if (levy_area(standardize(x), standardize(y)) > 0.0) ++positive;
        }
        const double p = binomial_tail_half(windows, positive);
        c.require(p < 0.01, std::string(label) + ": binomial p = " +
                                std::to_string(p) + " >= 0.01");
        c.detail << " " << label << "=" << positive << "/" << windows;
    };
    run_variant([](double v) { return v; }, 0.6, "linear");
    run_variant([](double v) { return v * v * v; }, 2.0, "cubic");
    const double dt = seconds_since(t0);
    c.require(dt < 30.0, "runtime >= 30s");
    return c;
}

// --------------------------------------------------------------------------
// 3. DTW dynamic program against exhaustive path enumeration
// --------------------------------------------------------------------------
Check criterion_dtw_oracle() {
    Check c;
    const auto t0 = Clock::now();
    Rng rng(555);
    for (int m = 1; m <= 6 && c.ok; ++m) {
        for (int n = 1; n <= 6 && c.ok; ++n) {
            for (int rep = 0; rep < 100; ++rep) {
                std::vector<double> a(m), b(n);
                for (auto& v : a)
                    v = static_cast<double>(rng.uniform_index(9)) - 4.0;
                for (auto& v : b)
                    v = static_cast<double>(rng.uniform_index(9)) - 4.0;
                const WarpingPath path = dtw_align(a, b);
                const double want = oracle::exhaustive_dtw_cost(
                    m, n, [&](int i, int j) { return std::abs(a[i] - b[j]); });
                if (path.cost != want) {
                    c.require(false, "cost mismatch at m=" + std::to_string(m) +
                                         " n=" + std::to_string(n));
                    break;
                }
                const int len = static_cast<int>(path.pairs.size());
                bool valid = path.pairs.front() == std::pair<int, int>{1, 1} &&
                             path.pairs.back() == std::pair<int, int>{m, n} &&
                             len >= std::max(m, n) && len <= m + n - 1;
                for (size_t k = 1; k < path.pairs.size() && valid; ++k) {
                    const int di = path.pairs[k].first - path.pairs[k - 1].first;
                    const int dj =
                        path.pairs[k].second - path.pairs[k - 1].second;
                    valid = (di == 0 || di == 1) && (dj == 0 || dj == 1) &&
                            (di + dj > 0);
                }
                if (!valid) {
                    c.require(false, "constraint violation at m=" +
                                         std::to_string(m) +
                                         " n=" + std::to_string(n));
                    break;
                }
            }
        }
    }
    const double dt = seconds_since(t0);
    c.require(dt < 60.0, "runtime >= 60s");
    c.detail << " [" << dt << "s]";
    return c;
}

// --------------------------------------------------------------------------
// 4. Lag recovery on synthetic shifts; DDTW beats raw DTW on translations
// --------------------------------------------------------------------------
Check criterion_lag_recovery() {
    Check c;
    const int delta = 66, reps = 100;
    Rng rng(909);
    // Shift-by-k pairs of delta series (the quantity the detectors align),
    // follower noise at a 10:1 signal-to-noise power ratio.
    for (int k = -3; k <= 3; ++k) {
        int ok = 0;
        for (int rep = 0; rep < reps; ++rep) {
            const int margin = 5;
            std::vector<double> base(delta + 2 * margin);
            for (auto& v : base) v = rng.normal();
            std::vector<double> x(delta), y(delta);
            for (int t = 0; t < delta; ++t) x[t] = base[margin + t];
            double mu = 0.0, ss = 0.0;
            for (double v : x) mu += v;
            mu /= delta;
            for (double v : x) ss += (v - mu) * (v - mu);
            const double noise_std = std::sqrt(ss / delta / 10.0);
            for (int t = 0; t < delta; ++t)
                y[t] = base[margin + t - k] + noise_std * rng.normal();
            const int lag =
                warp_lag(dtw_align(standardize(x), standardize(y)));
            if (lag == k) ++ok;
        }
        c.require(ok >= 95, "lag " + std::to_string(k) + ": " +
                                std::to_string(ok) + "/100 < 95");
        c.detail << " k=" << k << ":" << ok;
    }

    // Vertical translation: the derivative transform recovers the shift
    // where raw unstandardized DTW cannot.
    const int k = 2;
    int raw_ok = 0, ddtw_ok = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> base(delta + 10);
        for (auto& v : base) v = rng.normal();
        std::vector<double> x(delta), y(delta);
        for (int t = 0; t < delta; ++t) {
            x[t] = base[5 + t];
            y[t] = base[5 + t - k] + 10.0;  // large vertical offset
        }
        if (warp_lag(dtw_align(x, y)) == k) ++raw_ok;
        if (warp_lag(dtw_align(derivative_transform(x),
                               derivative_transform(y))) == k)
            ++ddtw_ok;
    }
    c.require(ddtw_ok >= 95, "ddtw recovery " + std::to_string(ddtw_ok) + " < 95");
    c.require(raw_ok < 50, "raw dtw unexpectedly robust: " +
                               std::to_string(raw_ok) + "/100");
    c.detail << " translation raw=" << raw_ok << " ddtw=" << ddtw_ok;
    return c;
}

// --------------------------------------------------------------------------
// 5. Graph solver: closed form, grid-search optimum, feasibility
// --------------------------------------------------------------------------
Check criterion_graph_solver() {
    Check c;
    const auto t0 = Clock::now();
    Rng rng(1111);

    // (a) 2-node closed form across the full alpha/beta grid.
    for (double alpha : defaults::alpha_grid()) {
        for (double beta : defaults::beta_grid()) {
            const double v = 0.3 + 2.0 * rng.uniform();
            Eigen::MatrixXd V(2, 2);
            V << 0.0, v, -v, 0.0;
            GraphHyperParams p;
            p.alpha = alpha;
            p.beta = beta;
            Eigen::MatrixXd A = learn_graph(V, p);
            const double z = 2.0 * v * v;
            const double closed =
                (-z + std::sqrt(z * z + 32.0 * alpha * beta)) / (8.0 * beta);
            if (std::abs(A(0, 1) - closed) > 1e-6) {
                c.require(false, "closed form miss at alpha=" +
                                     std::to_string(alpha) +
                                     " beta=" + std::to_string(beta));
            }
        }
    }

    // (b) dense grid search with local refinement at M = 3 and M = 4.
    auto grid_optimum = [](const Eigen::MatrixXd& V, const GraphHyperParams& p,
                           int edges, double step0) {
        const double a_max = std::sqrt(p.alpha / (2.0 * p.beta));
        std::vector<double> lo(edges, 0.0), hi(edges, a_max), best(edges, 0.0);
        double best_obj = std::numeric_limits<double>::infinity();
        double step = step0;
        const int M = static_cast<int>(V.rows());
        std::vector<std::pair<int, int>> eidx;
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) eidx.emplace_back(i, j);
        for (int round = 0; round < 4; ++round) {
            std::vector<int> steps(edges);
            std::vector<double> w(edges);
            std::function<void(int)> sweep = [&](int e) {
                const int n_steps =
                    static_cast<int>(std::floor((hi[e] - lo[e]) / step)) + 1;
                for (int s = 0; s < n_steps; ++s) {
                    w[e] = lo[e] + s * step;
                    if (e + 1 < edges) {
                        sweep(e + 1);
                    } else {
                        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
                        for (int q = 0; q < edges; ++q) {
                            A(eidx[q].first, eidx[q].second) = w[q];
                            A(eidx[q].second, eidx[q].first) = w[q];
                        }
                        const double obj = graph_objective(V, A, p);
                        if (obj < best_obj) {
                            best_obj = obj;
                            best.assign(w.begin(), w.end());
                        }
                    }
                }
            };
            sweep(0);
            for (int e = 0; e < edges; ++e) {
                lo[e] = std::max(0.0, best[e] - step);
                hi[e] = std::min(a_max, best[e] + step);
            }
            step /= 8.0;
        }
        return best_obj;
    };

    for (int M : {3, 4}) {
        for (int rep = 0; rep < 2; ++rep) {
            Eigen::MatrixXd V(M, M);
            V.setZero();
            for (int i = 0; i < M; ++i)
                for (int j = i + 1; j < M; ++j) {
                    V(i, j) = 1.5 * rng.normal();
                    V(j, i) = -V(i, j);
                }
            GraphHyperParams p;
            p.alpha = 1.0;
            p.beta = 1.0;
            Eigen::MatrixXd A = learn_graph(V, p);
            const double solver_obj = graph_objective(V, A, p);
            const int edges = M * (M - 1) / 2;
            const double grid_obj =
                grid_optimum(V, p, edges, M == 3 ? 1e-2 : 5e-2);
            c.require(std::abs(solver_obj - grid_obj) <= 1e-4,
                      "M=" + std::to_string(M) + " |solver-grid| = " +
                          std::to_string(std::abs(solver_obj - grid_obj)));
        }
    }

    // (c) feasibility invariants on random solves.
    for (int rep = 0; rep < 20; ++rep) {
        const int M = 2 + static_cast<int>(rng.uniform_index(6));
        Eigen::MatrixXd V(M, M);
        V.setZero();
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) {
                V(i, j) = 10.0 * rng.normal();
                V(j, i) = -V(i, j);
            }
        GraphHyperParams p;
        p.alpha = std::pow(10.0, rng.uniform(-3.0, 2.0));
        p.beta = std::pow(10.0, rng.uniform(-3.0, 2.0));
        Eigen::MatrixXd A = learn_graph(V, p);
        c.require((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0,
                  "asymmetric output");
        c.require(A.minCoeff() >= 0.0, "negative edge");
        c.require(A.diagonal().cwiseAbs().maxCoeff() == 0.0, "nonzero diagonal");
        c.require(A.rowwise().sum().minCoeff() > 1e-10, "isolated node");
    }
    const double dt = seconds_since(t0);
    c.require(dt < 120.0, "runtime >= 2min");
    c.detail << " [" << dt << "s]";
    return c;
}

// --------------------------------------------------------------------------
// 6. Response normalisation
// --------------------------------------------------------------------------
Check criterion_response() {
    Check c;
    const double lambda = std::sqrt(2.0);
    c.require(std::abs(response_norm_constant(lambda) - std::pow(5.0, 0.75)) <=
                  1e-12,
              "c_lambda != 5^(3/4)");
    Rng rng(31415);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = response(rng.normal(), lambda);
        sum += r;
        sumsq += r * r;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    c.require(std::abs(var - 1.0) <= 0.01,
              "Var[r(X)] = " + std::to_string(var));
    c.detail << " var=" << var;
    return c;
}

// --------------------------------------------------------------------------
// 7. Accounting identity and no-lookahead timing
// --------------------------------------------------------------------------
Check criterion_accounting_timing() {
    Check c;
    PricePanel panel = spillover_panel(420, SpilloverSpec{}, 88);
    ModelSpec model = parse_model("NMM-LEVY", 132, defaults::delta_grid(), 11);
    PortfolioConfig pc;
    GraphHyperParams gp;
    const int begin = auto_eval_begin(panel, {model});
    ModelRun run = run_model(panel, model, pc, gp, begin, panel.rows(), 1);

    const double lhs = (run.pnl.gross - run.pnl.cost).sum();
    const double rhs = run.pnl.portfolio.sum() * run.pnl.gamma;
    c.require(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)),
              "accounting identity broken");

    const int cut = 360;
    Eigen::MatrixXd prices = panel.prices;
    Rng rng(4242);
    for (int t = cut + 1; t < panel.rows(); ++t)
        for (int m = 0; m < panel.cols(); ++m)
            prices(t, m) += 5.0 * rng.normal();
    PricePanel bumped = build_panel(panel.dates, panel.markets, prices);
    ModelRun run2 = run_model(bumped, model, pc, gp, begin, bumped.rows(), 1);
    bool unchanged = true;
    for (int t = begin; t <= cut; ++t)
        if (run.positions.row(t) != run2.positions.row(t)) unchanged = false;
    c.require(unchanged, "positions at or before t changed");
    c.require(run.positions.row(cut + 4) != run2.positions.row(cut + 4),
              "perturbation had no effect at all");
    return c;
}

// --------------------------------------------------------------------------
// 8. Statistics oracles
// --------------------------------------------------------------------------
Check criterion_statistics() {
    Check c;
    c.require(wilcoxon_one_sided({1, 2, 3, 4, 5}) == 0.03125,
              "all-positive n=5 != 1/32");
    Rng rng(2718);
    for (int n = 1; n <= 12; ++n) {
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> diffs(static_cast<size_t>(n));
            for (auto& d : diffs) {
                d = std::round(4.0 * rng.normal()) / 2.0;
                if (d == 0.0) d = -0.5;
            }
            const double got = wilcoxon_one_sided(diffs);
            const double want = oracle::wilcoxon_enumeration(diffs);
            if (std::abs(got - want) > 1e-12) {
                c.require(false, "wilcoxon mismatch at n=" + std::to_string(n));
                break;
            }
        }
    }
    for (int rep = 0; rep < 100; ++rep) {
        const size_t n = 1 + rng.uniform_index(50);
        const size_t m = 1 + rng.uniform_index(50);
        std::vector<double> a(n), b(m);
        for (auto& v : a) v = std::round(rng.normal() * 4.0) / 4.0;
        for (auto& v : b) v = std::round(rng.normal() * 4.0) / 4.0;
        if (ks_one_sided(a, b).statistic != oracle::ks_statistic_brute(a, b)) {
            c.require(false, "ks statistic mismatch");
            break;
        }
    }
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 20 + static_cast<int>(rng.uniform_index(481));
        Eigen::VectorXd r(n);
        std::vector<double> rs(static_cast<size_t>(n));
        for (int t = 0; t < n; ++t) {
            r(t) = rng.normal();
            rs[static_cast<size_t>(t)] = r(t);
        }
        if (std::abs(max_drawdown(r) - oracle::brute_force_mdd(rs)) > 1e-12) {
            c.require(false, "mdd mismatch");
            break;
        }
    }
    return c;
}

// --------------------------------------------------------------------------
// 9. Synthetic end-to-end study
// --------------------------------------------------------------------------
Check criterion_end_to_end() {
    Check c;
    const auto t0 = Clock::now();

    SpilloverSpec spec;  // 3 leaders, 3 followers, lag 1, coefficient 0.8
    PricePanel panel = spillover_panel(1500, spec, 20240815);

    ExperimentConfig cfg;
    cfg.zoo = {"MACD", "NMM-LEVY", "NMM-DTW"};
    cfg.bootstrap.n_resamples = 100;
    cfg.bootstrap.expected_block_length = 22.0;
    cfg.bootstrap.seed = 1905;
    cfg.network.alpha = 1.0;
    cfg.network.beta = 1.0;

    ExperimentReport r2 = run_experiment(panel, cfg, 2);

    auto mean_sharpe = [&](const std::string& name) {
        const auto agg = mean_report(r2.overall.at(name));
        return agg.sharpe ? *agg.sharpe : std::nan("");
    };
    const double macd = mean_sharpe("MACD");
    for (const std::string name : {"NMM-LEVY", "NMM-DTW"}) {
        const double nmm = mean_sharpe(name);
        c.require(nmm > macd, name + " mean sharpe " + std::to_string(nmm) +
                                  " <= MACD " + std::to_string(macd));
        double wilcoxon = 1.0;
        for (const auto& pv : r2.pvalues)
            if (pv.model == name) wilcoxon = pv.wilcoxon;
        c.require(wilcoxon < 0.05,
                  name + " wilcoxon p = " + std::to_string(wilcoxon));
        c.detail << " " << name << ": sharpe=" << nmm << " p=" << wilcoxon;
    }
    c.detail << " macd=" << macd;

    ExperimentReport r1 = run_experiment(panel, cfg, 1);
    c.require(experiment_json(r1).dump() == experiment_json(r2).dump(),
              "results differ across --jobs settings");

    const double dt = seconds_since(t0);
    c.require(dt < 900.0, "runtime " + std::to_string(dt) + "s >= 15min");
    c.detail << " [" << dt << "s]";
    return c;
}

// --------------------------------------------------------------------------
// 10. Configuration conformance
// --------------------------------------------------------------------------
Check criterion_config() {
    Check c;
    PortfolioConfig pc;
    c.require(pc.speeds == std::vector<int>({1, 2, 3, 4, 5, 6}), "speeds");
    c.require(pc.lambda == std::sqrt(2.0), "lambda");
    c.require(pc.sigma_target == 0.10, "sigma target");
    ExperimentConfig cfg;
    c.require(cfg.delta_single == 132, "delta single");
    c.require(cfg.delta_grid == std::vector<int>({22, 44, 66, 88, 110, 132}),
              "delta grid");
    c.require(cfg.descriptor_len == 11, "descriptor length");
    c.require(cfg.alpha_grid ==
                  std::vector<double>({0.001, 0.01, 0.1, 1.0, 10.0, 100.0}),
              "alpha grid");
    c.require(cfg.beta_grid ==
                  std::vector<double>({0.001, 0.01, 0.1, 1.0, 10.0, 100.0}),
              "beta grid");
    c.require(kVolSpan == 22 && kVolMinPeriods == 22, "vol span");
    c.require(cfg.bootstrap.n_resamples == 100, "bootstrap resamples");
    return c;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Check()> run;
    };
    const std::vector<Entry> entries = {
        {1, "levy shoelace oracle", criterion_levy_oracle},
        {2, "levy sign property", criterion_sign_property},
        {3, "dtw exhaustive oracle", criterion_dtw_oracle},
        {4, "lag recovery", criterion_lag_recovery},
        {5, "graph solver optimality", criterion_graph_solver},
        {6, "response normalisation", criterion_response},
        {7, "accounting and timing", criterion_accounting_timing},
        {8, "statistics oracles", criterion_statistics},
        {9, "synthetic end-to-end study", criterion_end_to_end},
        {10, "configuration conformance", criterion_config},
    };
    int failures = 0;
    for (const auto& e : entries) {
        Check c;
        try {
            c = e.run();
        } catch (const std::exception& ex) {
            c.ok = false;
            c.detail << "exception: " << ex.what();
        }
        std::printf("%s criterion %2d: %s%s\n", c.ok ? "PASS" : "FAIL", e.id,
                    e.name, (std::string(" ") + c.detail.str()).c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

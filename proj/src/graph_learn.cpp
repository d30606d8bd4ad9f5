#include "netmom/graph_learn.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "netmom/csv.hpp"
#include "netmom/errors.hpp"
#include "netmom/log.hpp"

namespace netmom {

namespace {

constexpr double kTruncate = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct EdgeProblem {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;  // upper triangle (i < j)
    Eigen::VectorXd z;                       // squared row distances
};

EdgeProblem make_problem(const Eigen::MatrixXd& signal) {
    const int M = static_cast<int>(signal.rows());
    if (M < 2 || signal.cols() != signal.rows())
        throw DataError("learn_graph: signal must be square with M >= 2");
    if (!signal.allFinite()) throw DataError("learn_graph: non-finite signal");
    EdgeProblem p;
    p.n_nodes = M;
    p.edges.reserve(static_cast<size_t>(M) * static_cast<size_t>(M - 1) / 2);
    std::vector<double> zs;
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) {
            p.edges.emplace_back(i, j);
            zs.push_back((signal.row(i) - signal.row(j)).squaredNorm());
        }
    p.z = Eigen::Map<Eigen::VectorXd>(zs.data(), static_cast<Eigen::Index>(zs.size()));
    return p;
}

Eigen::VectorXd degrees_of(const EdgeProblem& p, const Eigen::VectorXd& w) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(p.n_nodes);
    for (size_t e = 0; e < p.edges.size(); ++e) {
        d(p.edges[e].first) += w(static_cast<Eigen::Index>(e));
        d(p.edges[e].second) += w(static_cast<Eigen::Index>(e));
    }
    return d;
}

// f(w) = z.w + 2*beta*|w|^2 - alpha * sum_i log(d_i); +inf off the domain.
double edge_objective(const EdgeProblem& p, const GraphHyperParams& hp,
                      const Eigen::VectorXd& w) {
    Eigen::VectorXd d = degrees_of(p, w);
    double barrier = 0.0;
    for (int i = 0; i < p.n_nodes; ++i) {
        if (!(d(i) > 0.0)) return kInf;
        barrier += std::log(d(i));
    }
    return p.z.dot(w) + 2.0 * hp.beta * w.squaredNorm() - hp.alpha * barrier;
}

Eigen::VectorXd edge_gradient(const EdgeProblem& p, const GraphHyperParams& hp,
                              const Eigen::VectorXd& w) {
    Eigen::VectorXd d = degrees_of(p, w);
    Eigen::VectorXd g(w.size());
    for (size_t e = 0; e < p.edges.size(); ++e) {
        const auto [i, j] = p.edges[e];
        g(static_cast<Eigen::Index>(e)) =
            p.z(static_cast<Eigen::Index>(e)) +
            4.0 * hp.beta * w(static_cast<Eigen::Index>(e)) -
            hp.alpha * (1.0 / d(i) + 1.0 / d(j));
    }
    return g;
}

// Decoupled per-edge minimiser; exact for M = 2 and a good warm start
// in general.
Eigen::VectorXd initial_point(const EdgeProblem& p, const GraphHyperParams& hp) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(p.edges.size()));
    for (Eigen::Index e = 0; e < w.size(); ++e) {
        const double z = p.z(e);
        if (hp.beta > 0.0) {
            w(e) = (-z + std::sqrt(z * z + 32.0 * hp.alpha * hp.beta)) /
                   (8.0 * hp.beta);
        } else {
            w(e) = 2.0 * hp.alpha / std::max(z, 1e-8);
        }
    }
    return w;
}

}  // namespace

void GraphHyperParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("graph alpha must be > 0");
    if (!(beta >= 0.0)) throw ConfigError("graph beta must be >= 0");
    if (max_iters < 1) throw ConfigError("graph max_iters must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("graph tol must be > 0");
}

double graph_objective(const Eigen::MatrixXd& signal, const Eigen::MatrixXd& A,
                       const GraphHyperParams& params) {
    const Eigen::VectorXd d = A.rowwise().sum();
    double barrier = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0.0)) return kInf;
        barrier += std::log(d(i));
    }
    const Eigen::MatrixXd L = Eigen::MatrixXd(d.asDiagonal()) - A;
    return (signal.transpose() * L * signal).trace() - params.alpha * barrier +
           params.beta * A.squaredNorm();
}

Eigen::MatrixXd learn_graph(const Eigen::MatrixXd& signal,
                            const GraphHyperParams& params,
                            SolveDiagnostics* diag) {
    params.validate();
    EdgeProblem prob = make_problem(signal);
    const Eigen::Index E = static_cast<Eigen::Index>(prob.edges.size());

    Eigen::VectorXd w = initial_point(prob, params);
    double fval = edge_objective(prob, params, w);
    Eigen::VectorXd g = edge_gradient(prob, params, w);

    const double z_scale = std::max(1.0, prob.z.lpNorm<Eigen::Infinity>());
    const double kkt_tol = params.tol * z_scale;

    Eigen::VectorXd w_prev = w, g_prev = g;
    double step = 1.0 / std::max(4.0 * params.beta + z_scale, 1e-8);

    bool converged = false;
    int iter = 0;
    double kkt = kInf;
    for (; iter < params.max_iters; ++iter) {
        // KKT stationarity on the non-negative orthant.
        kkt = 0.0;
        for (Eigen::Index e = 0; e < E; ++e) {
            const double r = w(e) > 0.0 ? std::abs(g(e)) : std::max(0.0, -g(e));
            kkt = std::max(kkt, r);
        }
        if (diag && diag->trace_objective) diag->objective_trace.push_back(fval);
        const double rel_change = (w - w_prev).lpNorm<Eigen::Infinity>() /
                                  std::max(1.0, w.lpNorm<Eigen::Infinity>());
        if (kkt <= kkt_tol && (iter == 0 || rel_change <= params.tol)) {
            converged = true;
            break;
        }

        if (iter > 0) {
            const Eigen::VectorXd dw = w - w_prev;
            const Eigen::VectorXd dg = g - g_prev;
            const double denom = dw.dot(dg);
            if (denom > 0.0)
                step = std::min(std::max(dw.squaredNorm() / denom, 1e-12), 1e12);
        }

        w_prev = w;
        g_prev = g;
        double t = step;
        bool moved = false;
        for (int tries = 0; tries < 80; ++tries) {
            Eigen::VectorXd cand = (w_prev - t * g_prev).cwiseMax(0.0);
            const double move2 = (cand - w_prev).squaredNorm();
            if (move2 == 0.0) break;  // projected step is stationary
            const double fcand = edge_objective(prob, params, cand);
            if (fcand <= fval - 1e-4 / t * move2) {
                w = std::move(cand);
                fval = fcand;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            converged = kkt <= kkt_tol;
            break;
        }
        g = edge_gradient(prob, params, w);
    }

    if (diag) {
        diag->iterations = iter;
        diag->kkt_residual = kkt;
        diag->objective = fval;
    }
    log::debug("learn_graph: M=" + std::to_string(prob.n_nodes) +
               " iters=" + std::to_string(iter) +
               " kkt=" + std::to_string(kkt) +
               " objective=" + std::to_string(fval));
    if (!converged)
        throw NumericalError("graph solver did not converge within " +
                             std::to_string(params.max_iters) +
                             " iterations (KKT residual " + std::to_string(kkt) +
                             ")");

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(prob.n_nodes, prob.n_nodes);
    for (size_t e = 0; e < prob.edges.size(); ++e) {
        const double v = w(static_cast<Eigen::Index>(e));
        if (v < kTruncate) continue;
        const auto [i, j] = prob.edges[e];
        A(i, j) = v;
        A(j, i) = v;
    }
    const Eigen::VectorXd deg = A.rowwise().sum();
    if (deg.minCoeff() <= 0.0)
        throw NumericalError("graph solver produced an isolated node");
    return A;
}

Eigen::MatrixXd normalize_graph(const Eigen::MatrixXd& A) {
    const Eigen::VectorXd d = A.rowwise().sum();
    if (d.size() == 0 || d.minCoeff() <= 0.0)
        throw DataError("normalize_graph: zero row sum");
    const Eigen::VectorXd dinv_sqrt = d.array().rsqrt();
    return dinv_sqrt.asDiagonal() * A * dinv_sqrt.asDiagonal();
}

NetworkMatrix ensemble_network(const std::vector<LeadLagMatrix>& v_list,
                               const GraphHyperParams& params) {
    if (v_list.empty()) throw DataError("ensemble_network: no lead-lag matrices");
    const Eigen::Index M = v_list.front().values.rows();
    for (const auto& v : v_list)
        if (v.values.rows() != M || v.values.cols() != M)
            throw DataError("ensemble_network: mismatched market order");

    const double s_inv = 1.0 / static_cast<double>(v_list.size());
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(M, M);
    for (const auto& v : v_list) avg += s_inv * learn_graph(v.values, params);

    NetworkMatrix net;
    net.date = v_list.front().date;
    net.raw = std::move(avg);
    net.degrees = net.raw.rowwise().sum();
    net.values = normalize_graph(net.raw);
    return net;
}

void write_network_csv(const NetworkMatrix& net,
                       const std::vector<ContractSpec>& markets,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "market_i,market_j,weight\n";
    for (Eigen::Index i = 0; i < net.values.rows(); ++i)
        for (Eigen::Index j = 0; j < net.values.cols(); ++j)
            if (i != j)
                out << markets[static_cast<size_t>(i)].market_id << ","
                    << markets[static_cast<size_t>(j)].market_id << ","
                    << csv::format_double(net.values(i, j)) << "\n";
}

}  // namespace netmom

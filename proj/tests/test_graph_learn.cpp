#include <cmath>

#include "doctest.h"
#include "netmom/errors.hpp"
#include "netmom/graph_learn.hpp"
#include "netmom/rng.hpp"

using namespace netmom;

namespace {

// Closed-form 2-node edge from the stationarity condition
// z - 2*alpha/a + 4*beta*a = 0 (beta > 0).
double two_node_edge(double z, double alpha, double beta) {
    return (-z + std::sqrt(z * z + 32.0 * alpha * beta)) / (8.0 * beta);
}

Eigen::MatrixXd skew2(double v) {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, v, -v, 0.0;
    return m;
}

void check_feasible(const Eigen::MatrixXd& A) {
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(A.minCoeff() >= 0.0);
    CHECK(A.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(A.rowwise().sum().minCoeff() > 1e-10);
}

LeadLagMatrix as_leadlag(const Eigen::MatrixXd& v) {
    LeadLagMatrix m;
    m.date = parse_date("2022-01-03");
    m.lookback = 22;
    m.method = LeadLagMethod::Levy;
    m.values = v;
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("graph-learn");

TEST_CASE("two-node solve matches the closed form") {
    Rng rng(1);
    for (double alpha : {0.001, 0.1, 1.0, 100.0}) {
        for (double beta : {0.001, 1.0, 100.0}) {
            const double v = 0.5 + 2.0 * rng.uniform();
            GraphHyperParams p;
            p.alpha = alpha;
            p.beta = beta;
            Eigen::MatrixXd A = learn_graph(skew2(v), p);
            const double z = 2.0 * v * v;  // squared distance of the two rows
            const double want = two_node_edge(z, alpha, beta);
            CHECK(std::abs(A(0, 1) - want) <= 1e-6);
            check_feasible(A);
        }
    }
}

TEST_CASE("two-node edge weight increases with alpha") {
    GraphHyperParams p;
    p.beta = 1.0;
    double prev = 0.0;
    for (double alpha : {0.01, 0.1, 1.0, 10.0}) {
        p.alpha = alpha;
        Eigen::MatrixXd A = learn_graph(skew2(1.0), p);
        CHECK(A(0, 1) > prev);
        prev = A(0, 1);
    }
}

TEST_CASE("objective trace is monotone non-increasing") {
    Rng rng(2);
    Eigen::MatrixXd V(5, 5);
    V.setZero();
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            V(i, j) = 3.0 * rng.normal();
            V(j, i) = -V(i, j);
        }
    GraphHyperParams p;
    p.alpha = 0.5;
    p.beta = 0.2;
    SolveDiagnostics diag;
    diag.trace_objective = true;
    learn_graph(V, p, &diag);
    REQUIRE(diag.objective_trace.size() > 1);
    for (size_t i = 1; i < diag.objective_trace.size(); ++i)
        CHECK(diag.objective_trace[i] <= diag.objective_trace[i - 1] + 1e-12);
}

TEST_CASE("solver reaches the dense grid optimum at three nodes") {
    Rng rng(3);
    for (int rep = 0; rep < 3; ++rep) {
        Eigen::MatrixXd V(3, 3);
        V.setZero();
        V(0, 1) = 2.0 * rng.normal();
        V(0, 2) = 2.0 * rng.normal();
        V(1, 2) = 2.0 * rng.normal();
        V(1, 0) = -V(0, 1);
        V(2, 0) = -V(0, 2);
        V(2, 1) = -V(1, 2);
        GraphHyperParams p;
        p.alpha = 1.0;
        p.beta = 1.0;
        Eigen::MatrixXd A = learn_graph(V, p);
        const double solver_obj = graph_objective(V, A, p);

        // Independent dense grid over the three edge weights.
        const double a_max = std::sqrt(p.alpha / (2.0 * p.beta));
        const double step = 1e-2;
        double best = std::numeric_limits<double>::infinity();
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, 3);
        for (double w01 = 0.0; w01 <= a_max + step; w01 += step)
            for (double w02 = 0.0; w02 <= a_max + step; w02 += step)
                for (double w12 = 0.0; w12 <= a_max + step; w12 += step) {
                    G(0, 1) = G(1, 0) = w01;
                    G(0, 2) = G(2, 0) = w02;
                    G(1, 2) = G(2, 1) = w12;
                    best = std::min(best, graph_objective(V, G, p));
                }
        CHECK(solver_obj <= best + 1e-4);
        check_feasible(A);
    }
}

TEST_CASE("feasibility holds across magnitudes and sizes") {
    Rng rng(4);
    for (int M : {2, 3, 6, 10}) {
        Eigen::MatrixXd V(M, M);
        V.setZero();
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) {
                V(i, j) = 20.0 * rng.normal();
                V(j, i) = -V(i, j);
            }
        GraphHyperParams p;
        p.alpha = 0.01;
        p.beta = 10.0;
        check_feasible(learn_graph(V, p));
    }
}

TEST_CASE("invalid inputs are rejected") {
    GraphHyperParams p;
    Eigen::MatrixXd bad(2, 2);
    bad << 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0;
    CHECK_THROWS_AS(learn_graph(bad, p), DataError);
    CHECK_THROWS_AS(learn_graph(Eigen::MatrixXd::Zero(1, 1), p), DataError);
    GraphHyperParams negative;
    negative.alpha = -1.0;
    CHECK_THROWS_AS(learn_graph(skew2(1.0), negative), ConfigError);
}

TEST_CASE("normalization divides by the scalar degree when degrees are equal") {
    Eigen::MatrixXd A(3, 3);
    A << 0, 2, 2, 2, 0, 2, 2, 2, 0;  // all row sums 4
    Eigen::MatrixXd N = normalize_graph(A);
    CHECK(N(0, 1) == doctest::Approx(0.5));
    CHECK((N - N.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("normalization of a single 2-node edge gives unit weight") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 0.37, 0.37, 0.0;
    Eigen::MatrixXd N = normalize_graph(A);
    CHECK(N(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalization is idempotent at unit row sums") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.0, 1.0, 0.0;
    Eigen::MatrixXd N = normalize_graph(A);
    CHECK((N - A).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("normalization rejects zero row sums") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(normalize_graph(A), DataError);
}

TEST_CASE("ensemble with one input equals learn-then-normalize") {
    Rng rng(6);
    Eigen::MatrixXd V = skew2(1.0 + rng.uniform());
    GraphHyperParams p;
    NetworkMatrix net = ensemble_network({as_leadlag(V)}, p);
    Eigen::MatrixXd direct = normalize_graph(learn_graph(V, p));
    CHECK(net.values == direct);
}

TEST_CASE("ensemble of identical inputs equals the single input") {
    Rng rng(7);
    Eigen::MatrixXd V = skew2(0.8);
    GraphHyperParams p;
    NetworkMatrix one = ensemble_network({as_leadlag(V)}, p);
    NetworkMatrix two = ensemble_network({as_leadlag(V), as_leadlag(V)}, p);
    CHECK(one.values == two.values);
}

TEST_CASE("six-member ensembles keep every feasibility invariant") {
    Rng rng(8);
    std::vector<LeadLagMatrix> vs;
    for (int s = 0; s < 6; ++s) {
        Eigen::MatrixXd V(4, 4);
        V.setZero();
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                V(i, j) = 4.0 * rng.normal();
                V(j, i) = -V(i, j);
            }
        vs.push_back(as_leadlag(V));
    }
    GraphHyperParams p;
    NetworkMatrix net = ensemble_network(vs, p);
    check_feasible(net.raw);
    CHECK((net.values - net.values.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(net.values.minCoeff() >= 0.0);
    CHECK(net.values.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(net.degrees.minCoeff() > 0.0);
}

TEST_SUITE_END();

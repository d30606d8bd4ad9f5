#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "netmom/leadlag.hpp"

namespace netmom {

struct GraphHyperParams {
    double alpha = 1.0;   // log-barrier weight, > 0
    double beta = 1.0;    // Frobenius weight, >= 0
    int max_iters = 20000;
    double tol = 1e-7;    // KKT residual and relative primal change

    void validate() const;
};

struct SolveDiagnostics {
    int iterations = 0;
    double kkt_residual = 0.0;
    double objective = 0.0;
    bool trace_objective = false;        // set before the solve to record
    std::vector<double> objective_trace;
};

// Smoothness + log-barrier + Frobenius objective of the learned adjacency,
// with the degree matrix coupled as D = diag(A1).
double graph_objective(const Eigen::MatrixXd& signal, const Eigen::MatrixXd& A,
                       const GraphHyperParams& params);

// Minimises graph_objective over symmetric, non-negative, zero-diagonal A by
// projected gradient descent with Barzilai-Borwein steps and a backtracking
// line search (monotone descent). Entries below 1e-10 are truncated to zero
// after convergence. Throws NumericalError on non-convergence.
Eigen::MatrixXd learn_graph(const Eigen::MatrixXd& signal,
                            const GraphHyperParams& params,
                            SolveDiagnostics* diag = nullptr);

// A~ = D^{-1/2} A D^{-1/2} with D = diag(A1). Throws on a zero row sum.
Eigen::MatrixXd normalize_graph(const Eigen::MatrixXd& A);

struct NetworkMatrix {
    Date date;
    Eigen::MatrixXd values;   // normalized adjacency
    Eigen::MatrixXd raw;      // ensemble-averaged adjacency before normalization
    Eigen::VectorXd degrees;  // row sums of raw
};

// Learns one adjacency per lead-lag matrix, averages them, then normalizes.
// With a single input this is learn-then-normalize.
NetworkMatrix ensemble_network(const std::vector<LeadLagMatrix>& v_list,
                               const GraphHyperParams& params);

void write_network_csv(const NetworkMatrix& net,
                       const std::vector<ContractSpec>& markets,
                       const std::string& path);

}  // namespace netmom

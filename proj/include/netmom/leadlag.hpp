#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "netmom/market_data.hpp"

namespace netmom {

enum class LeadLagMethod { Levy, Dtw, Ddtw, Sdtw, Sddtw };
LeadLagMethod parse_leadlag_method(const std::string& s);
std::string leadlag_method_name(LeadLagMethod m);

// Monotone boundary-anchored alignment. Pairs are 1-based; the first pair is
// (1,1), the last (m,n), and consecutive steps are (1,0), (0,1) or (1,1).
struct WarpingPath {
    std::vector<std::pair<int, int>> pairs;
    double cost = 0.0;
};

struct ShapeDescriptorSeries {
    int base_length = 0;
    int descriptor_length = 0;
    Eigen::MatrixXd vectors;  // base_length x descriptor_length
};

// Signed area between the 2-d polyline (x_t, y_t) and its closing chord.
// Positive values mean x leads y. Exactly antisymmetric in its arguments.
double levy_area(const std::vector<double>& x, const std::vector<double>& y);

// Z-normalisation with the population-std convention (divide by n).
// Throws DataError on a zero-variance window.
std::vector<double> standardize(const std::vector<double>& x);

// Local slope estimate: mean of the left-neighbour slope and the
// two-neighbour chord slope; endpoints copy their inner neighbour.
std::vector<double> derivative_transform(const std::vector<double>& x);

// Per-point windows of odd length l, edges replicated. With derivative=true
// each window is passed through derivative_transform.
ShapeDescriptorSeries shape_descriptors(const std::vector<double>& x, int l,
                                        bool derivative);

// Cost-minimal alignment of two point sequences (rows = points) under the
// Euclidean local cost, with deterministic tie-breaking during backtracking
// (diagonal, then (1,0), then (0,1)).
WarpingPath dtw_align(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
WarpingPath dtw_align(const std::vector<double>& a, const std::vector<double>& b);

// Mode of the index differences j - i along the path. Ties go to the
// smallest absolute lag, then to the negative lag.
int warp_lag(const WarpingPath& path);

struct LeadLagMatrix {
    Date date;
    int lookback = 0;
    LeadLagMethod method = LeadLagMethod::Levy;
    Eigen::MatrixXd values;  // M x M, skew-symmetric, zero diagonal
};

// Pairwise lead-lag scores over the lookback window of volatility-scaled
// deltas ending at date_row. V(i,j) > 0 means market i leads market j.
// Degenerate windows (undefined or constant) zero out that market's pairs.
LeadLagMatrix leadlag_matrix(const PricePanel& panel, int date_row, int lookback,
                             LeadLagMethod method, int descriptor_len = 11,
                             int threads = 1);

// Straight pair loop, no OpenMP; reference for the parallel version.
LeadLagMatrix leadlag_matrix_serial(const PricePanel& panel, int date_row,
                                    int lookback, LeadLagMethod method,
                                    int descriptor_len = 11);

// Debug dump: market_i,market_j,score.
void write_leadlag_csv(const LeadLagMatrix& m,
                       const std::vector<ContractSpec>& markets,
                       const std::string& path);

}  // namespace netmom

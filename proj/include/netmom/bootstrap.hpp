#pragma once

#include <cstdint>
#include <vector>

#include "netmom/market_data.hpp"
#include "netmom/rng.hpp"

namespace netmom {

struct BootstrapConfig {
    int n_resamples = 100;
    double expected_block_length = 22.0;  // geometric mean block length
    uint64_t seed = 0;
    int resample_length = 0;  // rows; 0 means the source length

    void validate() const;
};

// Stationary block resampling of row indices over [0, n_source): geometric
// block lengths with the given mean, uniform block starts, circular
// wraparound. Whole rows are selected, never mixed.
std::vector<int> stationary_bootstrap_indices(int n_source, int n_out,
                                              double expected_block_length,
                                              Rng& rng);

// Generic row resample; every output row is a copy of a source row.
Eigen::MatrixXd resample_rows(const Eigen::MatrixXd& source,
                              const std::vector<int>& indices);

// Resamples the panel's daily delta rows (whole cross-sections, preserving
// auto- and cross-correlation), integrates them into a synthetic price
// trajectory and rebuilds the derived matrices through the standard path.
// Deterministic given (seed, resample_index).
PricePanel bootstrap_panel(const PricePanel& original,
                           const BootstrapConfig& config,
                           uint64_t resample_index);

}  // namespace netmom

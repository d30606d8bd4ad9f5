#pragma once

#include <cstdint>

#include "netmom/market_data.hpp"

namespace netmom {

// Synthetic leader/follower universe for tests and benchmarks. Leaders share
// one slow AR(1) drift plus idiosyncratic noise; each follower loads on its
// leader's previous-day move plus its own noise, giving the panel a one-day
// spillover structure with a common trend behind it.
struct SpilloverSpec {
    int n_leaders = 3;
    double spillover = 0.8;       // follower loading on the lagged leader delta
    int lag = 1;
    double drift_rho = 0.99;      // AR(1) coefficient of the shared drift
    double drift_scale = 0.08;    // drift innovation stdev
    double leader_noise = 1.0;    // leader idiosyncratic stdev
    double follower_noise = 1.5;  // follower idiosyncratic stdev
    double base_price = 100.0;
    double half_spread = 0.02;    // price points
    Date start{2015, 1, 1};
};

// Panel with 2 * n_leaders markets: lead1..leadN then follow1..followN.
PricePanel spillover_panel(int t_rows, const SpilloverSpec& spec, uint64_t seed);

// Writes the panel's prices and contract specs as ingestion-ready CSVs.
void write_panel_csvs(const PricePanel& panel, const std::string& prices_path,
                      const std::string& contracts_path);

}  // namespace netmom

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmom/bootstrap.hpp"
#include "netmom/graph_learn.hpp"
#include "netmom/leadlag.hpp"
#include "netmom/market_data.hpp"

namespace netmom {

inline constexpr const char* kVersion = "0.1.0";

// Published strategy constants; the config snapshot test pins these.
namespace defaults {
inline std::vector<int> speeds() { return {1, 2, 3, 4, 5, 6}; }
inline constexpr double kSlowRatio = 3.0;
inline const double kLambda = std::sqrt(2.0);
inline constexpr double kSigmaTarget = 0.10;
inline constexpr double kGamma = 1e8;
inline constexpr int kDeltaSingle = 132;
inline std::vector<int> delta_grid() { return {22, 44, 66, 88, 110, 132}; }
inline constexpr int kDescriptorLength = 11;
inline std::vector<double> alpha_grid() {
    return {0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
}
inline std::vector<double> beta_grid() {
    return {0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
}
inline constexpr int kBootstrapResamples = 100;
inline constexpr double kBootstrapBlockLength = 22.0;
inline std::vector<std::string> zoo() {
    return {"MACD",      "NMM-DTW",    "NMM-DTW-E",  "NMM-DDTW",
            "NMM-DDTW-E", "NMM-SDTW",  "NMM-SDTW-E", "NMM-SDDTW",
            "NMM-SDDTW-E", "NMM-LEVY", "NMM-LEVY-E"};
}
// Oscillator settling rows added after the longest lookback warmup.
inline constexpr int kEvalBuffer = 22;
}  // namespace defaults

struct PortfolioConfig {
    std::vector<int> speeds = defaults::speeds();
    double slow_ratio = defaults::kSlowRatio;
    double lambda = defaults::kLambda;
    double sigma_target = defaults::kSigmaTarget;
    double gamma = defaults::kGamma;
};

// One entry of the model zoo; parsed from names like "NMM-SDTW-E".
struct ModelSpec {
    std::string name;
    bool is_baseline = false;  // MACD: oscillators used directly
    LeadLagMethod method = LeadLagMethod::Levy;
    bool ensemble = false;
    int delta_single = defaults::kDeltaSingle;
    std::vector<int> delta_grid = defaults::delta_grid();
    int descriptor_len = defaults::kDescriptorLength;

    std::vector<int> lookbacks() const {
        if (is_baseline) return {};
        if (ensemble) return delta_grid;
        return {delta_single};
    }
    int max_lookback() const {
        int mx = 0;
        for (int d : lookbacks()) mx = std::max(mx, d);
        return mx;
    }
};

ModelSpec parse_model(const std::string& name, int delta_single,
                      const std::vector<int>& delta_grid, int descriptor_len);

struct ExperimentConfig {
    // Panel source: either price/contract CSVs or a prebuilt cache.
    std::vector<std::string> price_files;
    std::string contract_file;
    Alignment alignment = Alignment::Intersection;
    std::string cache_path;

    PortfolioConfig portfolio;
    GraphHyperParams network;

    int delta_single = defaults::kDeltaSingle;
    std::vector<int> delta_grid = defaults::delta_grid();
    int descriptor_len = defaults::kDescriptorLength;

    std::vector<std::string> zoo = defaults::zoo();
    std::string model;  // single-model commands (backtest, gridsearch)

    std::optional<Date> in_sample_start, in_sample_end;
    std::optional<Date> out_of_sample_start, out_of_sample_end;
    // Rows after the first fully defined row at which positions begin;
    // -1 derives it from the zoo's longest lookback.
    int eval_start_offset = -1;

    BootstrapConfig bootstrap;
    std::vector<double> alpha_grid = defaults::alpha_grid();
    std::vector<double> beta_grid = defaults::beta_grid();

    bool dump_leadlag = false;
    bool dump_network = false;
    bool dump_signals = false;

    std::string output_dir = ".";
    uint64_t config_checksum = 0;  // FNV-1a of the config file bytes
    std::string source_path;
};

ExperimentConfig load_experiment_config(const std::string& path);

// Resolves the panel from the config: cache if present, else CSV ingestion.
PricePanel resolve_panel(const ExperimentConfig& cfg);

uint64_t file_checksum(const std::string& path);
std::string checksum_hex(uint64_t h);

}  // namespace netmom

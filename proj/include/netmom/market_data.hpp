#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmom/dates.hpp"

namespace netmom {

// Volatility estimation constants used across the pipeline.
constexpr int kVolSpan = 22;
constexpr int kVolMinPeriods = 22;   // observations before sigma is defined
constexpr double kEpsVol = 1e-8;     // zero-volatility guard, price points

enum class Sector { Ags, Energy, Equity, Metals };
Sector parse_sector(const std::string& s);
std::string sector_name(Sector s);

// Constant-or-dated value; dated series are step functions sampled by
// last-observation-carried-forward.
struct DatedSeries {
    std::vector<Date> dates;    // ascending; empty means constant
    std::vector<double> values; // one per date, or a single constant

    static DatedSeries constant(double v) { return DatedSeries{{}, {v}}; }
    bool is_constant() const { return dates.empty(); }
    double at(const Date& d) const;
};

struct ContractSpec {
    std::string market_id;
    DatedSeries point_value;    // F: currency per price point, > 0
    DatedSeries fx_rate;        // E: local currency to USD, > 0
    double half_spread = 0.0;   // s_m in price points, >= 0
    Sector sector = Sector::Ags;
};

struct RawContractSeries {
    std::string market_id;
    std::string contract_id;
    std::vector<Date> dates;     // strictly ascending
    std::vector<double> prices;
    std::optional<Date> roll_date;  // date the next contract takes over
};

struct StitchedSeries {
    std::vector<Date> dates;
    std::vector<double> prices;
};

// Backward Panama stitching: the latest contract keeps its prices and every
// earlier segment is shifted by the cumulative roll gap behind it.
StitchedSeries backadjust(const std::vector<RawContractSeries>& contracts);

enum class Alignment { Intersection, UnionFfill };

struct PricePanel {
    std::vector<Date> dates;            // length T, ascending
    std::vector<ContractSpec> markets;  // length M
    Eigen::MatrixXd prices;             // T x M, backadjusted
    Eigen::MatrixXd deltas;             // NaN = undefined
    Eigen::MatrixXd vol22;
    Eigen::MatrixXd scaled_deltas;
    Eigen::MatrixXd scaled_prices;
    Eigen::MatrixXd point_value;        // F broadcast to T x M
    Eigen::MatrixXd fx;                 // E broadcast to T x M

    int rows() const { return static_cast<int>(dates.size()); }
    int cols() const { return static_cast<int>(markets.size()); }
    int date_index(const Date& d) const;  // -1 if absent

    bool scaled_defined(int t, int m) const {
        return !std::isnan(scaled_deltas(t, m));
    }
    // First row where scaled deltas are defined for every market; -1 if none.
    int first_complete_scaled_row() const;
};

// Streaming exponentially weighted std: weights (1-a)^(t-i), population
// normalisation (weighted second moment about the weighted mean).
class EwmStd {
public:
    explicit EwmStd(int span);
    void update(double x);  // NaN leaves the state untouched
    int count() const { return count_; }
    double mean() const { return mean_; }
    double value() const;  // NaN until two observations

private:
    double alpha_;
    double wsum_ = 0.0;
    double mean_ = 0.0;
    double s_ = 0.0;  // weighted sum of squared deviations
    int count_ = 0;
};

Eigen::VectorXd ewm_std(const Eigen::VectorXd& x, int span,
                        int min_periods = kVolMinPeriods);
Eigen::MatrixXd ewm_std(const Eigen::MatrixXd& x, int span,
                        int min_periods = kVolMinPeriods);

// First differences; row 0 undefined.
Eigen::MatrixXd price_deltas(const Eigen::MatrixXd& prices);

// Fills scaled_deltas / scaled_prices from deltas and vol22. Dates with
// sigma <= kEpsVol are excluded (NaN) and logged; returns the excluded count.
int vol_scale(PricePanel& panel);

// Assembles the derived matrices for an aligned price table.
PricePanel build_panel(std::vector<Date> dates, std::vector<ContractSpec> markets,
                       Eigen::MatrixXd prices);

PricePanel load_panel(const std::vector<std::string>& price_files,
                      const std::string& contract_spec_file,
                      Alignment alignment = Alignment::Intersection);

std::vector<ContractSpec> load_contract_specs(const std::string& path);

// Panel cache (JSON with an embedded content checksum).
uint64_t panel_checksum(const PricePanel& panel);
void save_panel_cache(const PricePanel& panel, const std::string& path);
PricePanel load_panel_cache(const std::string& path);

}  // namespace netmom

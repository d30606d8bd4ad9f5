#include "netmom/bootstrap.hpp"

#include <cmath>
#include <limits>

#include "netmom/errors.hpp"

namespace netmom {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void BootstrapConfig::validate() const {
    if (n_resamples < 1) throw ConfigError("bootstrap: n_resamples must be >= 1");
    if (!(expected_block_length >= 1.0))
        throw ConfigError("bootstrap: expected_block_length must be >= 1");
    if (resample_length < 0)
        throw ConfigError("bootstrap: resample_length must be >= 0");
}

std::vector<int> stationary_bootstrap_indices(int n_source, int n_out,
                                              double expected_block_length,
                                              Rng& rng) {
    if (n_source < 1) throw DataError("bootstrap: empty source");
    if (!(expected_block_length >= 1.0))
        throw ConfigError("bootstrap: expected_block_length must be >= 1");
    const double p = 1.0 / expected_block_length;
    std::vector<int> idx;
    idx.reserve(static_cast<size_t>(std::max(n_out, 0)));
    while (static_cast<int>(idx.size()) < n_out) {
        const int start =
            static_cast<int>(rng.uniform_index(static_cast<uint64_t>(n_source)));
        const uint64_t len = rng.geometric(p);
        for (uint64_t k = 0; k < len && static_cast<int>(idx.size()) < n_out; ++k)
            idx.push_back(static_cast<int>((start + static_cast<int>(k)) %
                                           n_source));
    }
    return idx;
}

Eigen::MatrixXd resample_rows(const Eigen::MatrixXd& source,
                              const std::vector<int>& indices) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), source.cols());
    for (size_t t = 0; t < indices.size(); ++t) {
        if (indices[t] < 0 || indices[t] >= source.rows())
            throw DataError("resample_rows: index out of range");
        out.row(static_cast<Eigen::Index>(t)) = source.row(indices[t]);
    }
    return out;
}

PricePanel bootstrap_panel(const PricePanel& original,
                           const BootstrapConfig& config,
                           uint64_t resample_index) {
    config.validate();
    const int M = original.cols();

    // Source unit: whole raw delta rows (every row from the second date on).
    std::vector<int> src_rows;
    for (int t = 1; t < original.rows(); ++t) {
        bool all = true;
        for (int m = 0; m < M; ++m)
            if (std::isnan(original.deltas(t, m))) { all = false; break; }
        if (all) src_rows.push_back(t);
    }
    if (src_rows.size() < 2) throw DataError("bootstrap: too few defined rows");

    const int n_out = config.resample_length > 0
                          ? config.resample_length
                          : static_cast<int>(src_rows.size());
    Rng rng(Rng::mix(config.seed, resample_index));
    const std::vector<int> picks = stationary_bootstrap_indices(
        static_cast<int>(src_rows.size()), n_out, config.expected_block_length,
        rng);

    const int T = n_out + 1;
    PricePanel p;
    p.markets = original.markets;
    p.dates.resize(static_cast<size_t>(T));
    p.dates[0] = original.dates.front();
    for (int t = 1; t < T; ++t) {
        const size_t orig_idx = static_cast<size_t>(t);
        p.dates[static_cast<size_t>(t)] =
            orig_idx < original.dates.size()
                ? original.dates[orig_idx]
                : p.dates[static_cast<size_t>(t - 1)].next_trading_day();
    }

    // Deltas are the primary object: rows are bitwise copies of source rows,
    // prices integrate them, and the derived matrices follow the standard
    // construction.
    p.prices.resize(T, M);
    p.deltas = Eigen::MatrixXd::Constant(T, M, kNaN);
    p.prices.row(0) = original.prices.row(0);
    for (int t = 1; t < T; ++t) {
        const int src = src_rows[static_cast<size_t>(picks[static_cast<size_t>(t - 1)])];
        for (int m = 0; m < M; ++m) {
            const double delta = original.deltas(src, m);
            p.deltas(t, m) = delta;
            p.prices(t, m) = p.prices(t - 1, m) + delta;
        }
    }
    p.vol22 = ewm_std(p.deltas, kVolSpan, kVolMinPeriods);

    p.point_value.resize(T, M);
    p.fx.resize(T, M);
    for (int m = 0; m < M; ++m) {
        const auto& spec = p.markets[static_cast<size_t>(m)];
        for (int t = 0; t < T; ++t) {
            p.point_value(t, m) = spec.point_value.at(p.dates[static_cast<size_t>(t)]);
            p.fx(t, m) = spec.fx_rate.at(p.dates[static_cast<size_t>(t)]);
        }
    }
    vol_scale(p);
    return p;
}

}  // namespace netmom

#include "netmom/synthetic.hpp"

#include <fstream>

#include "netmom/csv.hpp"
#include "netmom/errors.hpp"
#include "netmom/rng.hpp"

namespace netmom {

PricePanel spillover_panel(int t_rows, const SpilloverSpec& spec, uint64_t seed) {
    if (t_rows < 50) throw DataError("spillover_panel: need at least 50 rows");
    if (spec.n_leaders < 1 || spec.lag < 1)
        throw ConfigError("spillover_panel: bad spec");
    const int L = spec.n_leaders;
    const int M = 2 * L;
    Rng rng(seed);

    // Leaders share one slow drift (their common trend) plus idiosyncratic
    // noise; followers load on their lagged leader.
    Eigen::MatrixXd deltas = Eigen::MatrixXd::Zero(t_rows, M);
    double drift = 0.0;
    for (int t = 0; t < t_rows; ++t) {
        drift = spec.drift_rho * drift + spec.drift_scale * rng.normal();
        for (int i = 0; i < L; ++i)
            deltas(t, i) = drift + spec.leader_noise * rng.normal();
    }
    for (int i = 0; i < L; ++i) {
        const int j = L + i;
        for (int t = 0; t < t_rows; ++t) {
            const double lagged =
                t >= spec.lag ? deltas(t - spec.lag, i) : 0.0;
            deltas(t, j) = spec.spillover * lagged +
                           spec.follower_noise * rng.normal();
        }
    }

    std::vector<Date> dates(static_cast<size_t>(t_rows));
    Date d = spec.start;
    if (!d.is_weekday()) d = d.next_trading_day();
    for (int t = 0; t < t_rows; ++t) {
        dates[static_cast<size_t>(t)] = d;
        d = d.next_trading_day();
    }

    Eigen::MatrixXd prices(t_rows, M);
    for (int m = 0; m < M; ++m) {
        double level = spec.base_price;
        prices(0, m) = level;
        for (int t = 1; t < t_rows; ++t) {
            level += deltas(t, m);
            prices(t, m) = level;
        }
    }

    std::vector<ContractSpec> markets;
    for (int m = 0; m < M; ++m) {
        ContractSpec c;
        c.market_id = (m < L ? "lead" : "follow") + std::to_string(m % L + 1);
        c.point_value = DatedSeries::constant(10.0);
        c.fx_rate = DatedSeries::constant(1.0);
        c.half_spread = spec.half_spread;
        c.sector = m < L ? Sector::Energy : Sector::Ags;
        markets.push_back(std::move(c));
    }
    return build_panel(std::move(dates), std::move(markets), std::move(prices));
}

void write_panel_csvs(const PricePanel& panel, const std::string& prices_path,
                      const std::string& contracts_path) {
    {
        std::ofstream out(prices_path, std::ios::binary);
        if (!out) throw DataError("cannot write '" + prices_path + "'");
        out << "date,market,price\n";
        for (int t = 0; t < panel.rows(); ++t)
            for (int m = 0; m < panel.cols(); ++m)
                out << panel.dates[static_cast<size_t>(t)].iso() << ","
                    << panel.markets[static_cast<size_t>(m)].market_id << ","
                    << csv::format_double(panel.prices(t, m)) << "\n";
    }
    {
        std::ofstream out(contracts_path, std::ios::binary);
        if (!out) throw DataError("cannot write '" + contracts_path + "'");
        out << "market,point_value,fx,half_spread,sector\n";
        for (const auto& m : panel.markets) {
            if (!m.point_value.is_constant() || !m.fx_rate.is_constant())
                throw DataError("write_panel_csvs: dated series not supported");
            out << m.market_id << ","
                << csv::format_double(m.point_value.values.front()) << ","
                << csv::format_double(m.fx_rate.values.front()) << ","
                << csv::format_double(m.half_spread) << "," << sector_name(m.sector)
                << "\n";
        }
    }
}

}  // namespace netmom

#include "netmom/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"
#include "netmom/csv.hpp"
#include "netmom/errors.hpp"
#include "netmom/log.hpp"

namespace netmom {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Sector parse_sector(const std::string& s) {
    if (s == "Ags") return Sector::Ags;
    if (s == "Energy") return Sector::Energy;
    if (s == "Equity") return Sector::Equity;
    if (s == "Metals") return Sector::Metals;
    throw DataError("unknown sector '" + s + "'");
}

std::string sector_name(Sector s) {
    switch (s) {
        case Sector::Ags: return "Ags";
        case Sector::Energy: return "Energy";
        case Sector::Equity: return "Equity";
        case Sector::Metals: return "Metals";
    }
    return "?";
}

double DatedSeries::at(const Date& d) const {
    if (is_constant()) return values.front();
    // last observation at or before d
    auto it = std::upper_bound(dates.begin(), dates.end(), d);
    if (it == dates.begin())
        throw DataError("dated series has no value on or before " + d.iso());
    return values[static_cast<size_t>(std::distance(dates.begin(), it)) - 1];
}

// ---------------------------------------------------------------------------
// Backadjustment
// ---------------------------------------------------------------------------

StitchedSeries backadjust(const std::vector<RawContractSeries>& contracts) {
    if (contracts.empty()) throw DataError("backadjust: no contracts");
    for (const auto& c : contracts) {
        if (c.dates.size() != c.prices.size() || c.dates.empty())
            throw DataError("backadjust: contract '" + c.contract_id +
                            "' has malformed series");
        for (size_t i = 1; i < c.dates.size(); ++i)
            if (!(c.dates[i - 1] < c.dates[i]))
                throw DataError("non-ascending dates in contract '" +
                                c.contract_id + "'");
        for (double p : c.prices)
            if (!std::isfinite(p))
                throw DataError("non-finite price in contract '" +
                                c.contract_id + "'");
    }

    auto price_at = [](const RawContractSeries& c,
                       const Date& d) -> std::optional<double> {
        auto it = std::lower_bound(c.dates.begin(), c.dates.end(), d);
        if (it == c.dates.end() || *it != d) return std::nullopt;
        return c.prices[static_cast<size_t>(std::distance(c.dates.begin(), it))];
    };

    const size_t n = contracts.size();
    // Gap at roll k: next contract price minus current contract price.
    std::vector<double> gaps(n, 0.0);
    for (size_t k = 0; k + 1 < n; ++k) {
        const auto& cur = contracts[k];
        const auto& nxt = contracts[k + 1];
        if (!cur.roll_date)
            throw DataError("contract '" + cur.contract_id + "' has no roll date");
        const Date r = *cur.roll_date;
        auto p_cur = price_at(cur, r);
        auto p_nxt = price_at(nxt, r);
        if (!p_cur || !p_nxt)
            throw DataError("missing roll-date price at " + r.iso() +
                            " between contracts '" + cur.contract_id + "' and '" +
                            nxt.contract_id + "'");
        gaps[k] = *p_nxt - *p_cur;
    }

    // Cumulative shift applied to segment k: sum of gaps at and after roll k.
    std::vector<double> shift(n, 0.0);
    for (size_t k = n - 1; k-- > 0;) shift[k] = shift[k + 1] + gaps[k];

    StitchedSeries out;
    for (size_t k = 0; k < n; ++k) {
        const auto& c = contracts[k];
        for (size_t i = 0; i < c.dates.size(); ++i) {
            const Date d = c.dates[i];
            // Roll date belongs to the incoming contract.
            if (k > 0 && contracts[k - 1].roll_date && d < *contracts[k - 1].roll_date)
                continue;
            if (k + 1 < n && c.roll_date && !(d < *c.roll_date)) continue;
            out.dates.push_back(d);
            out.prices.push_back(c.prices[i] + shift[k]);
        }
    }
    for (size_t i = 1; i < out.dates.size(); ++i)
        if (!(out.dates[i - 1] < out.dates[i]))
            throw DataError("contracts overlap beyond their roll dates");
    return out;
}

// ---------------------------------------------------------------------------
// Volatility
// ---------------------------------------------------------------------------

EwmStd::EwmStd(int span) {
    if (span < 2) throw ConfigError("ewm span must be >= 2");
    alpha_ = 2.0 / (span + 1.0);
}

void EwmStd::update(double x) {
    if (std::isnan(x)) return;
    const double decay = 1.0 - alpha_;
    wsum_ = decay * wsum_ + 1.0;
    const double mean_old = mean_;
    mean_ = mean_old + (x - mean_old) / wsum_;
    s_ = decay * s_ + (x - mean_old) * (x - mean_);
    ++count_;
}

// Population-weighted variance (no small-sample correction): on unit-variance
// input the long-run value settles at 1 rather than 1/(1 - w2/w^2) above it.
double EwmStd::value() const {
    if (count_ < 2) return kNaN;
    return std::sqrt(std::max(s_ / wsum_, 0.0));
}

Eigen::VectorXd ewm_std(const Eigen::VectorXd& x, int span, int min_periods) {
    EwmStd state(span);
    Eigen::VectorXd out(x.size());
    for (Eigen::Index t = 0; t < x.size(); ++t) {
        state.update(x(t));
        out(t) = state.count() >= min_periods ? state.value() : kNaN;
    }
    return out;
}

Eigen::MatrixXd ewm_std(const Eigen::MatrixXd& x, int span, int min_periods) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index m = 0; m < x.cols(); ++m)
        out.col(m) = ewm_std(Eigen::VectorXd(x.col(m)), span, min_periods);
    return out;
}

Eigen::MatrixXd price_deltas(const Eigen::MatrixXd& prices) {
    if (prices.rows() < 2) throw DataError("price_deltas: need at least 2 rows");
    Eigen::MatrixXd d(prices.rows(), prices.cols());
    d.row(0).setConstant(kNaN);
    d.bottomRows(prices.rows() - 1) =
        prices.bottomRows(prices.rows() - 1) - prices.topRows(prices.rows() - 1);
    return d;
}

int vol_scale(PricePanel& panel) {
    const int T = panel.rows(), M = panel.cols();
    panel.scaled_deltas = Eigen::MatrixXd::Constant(T, M, kNaN);
    panel.scaled_prices = Eigen::MatrixXd::Constant(T, M, kNaN);
    int excluded = 0;
    for (int m = 0; m < M; ++m) {
        bool started = false;
        double run = 0.0;
        for (int t = 0; t < T; ++t) {
            const double sig = panel.vol22(t, m);
            const double d = panel.deltas(t, m);
            if (std::isnan(sig) || std::isnan(d)) continue;
            if (sig <= kEpsVol) {
                ++excluded;
                log::warn("vol_scale: sigma <= eps for market '" +
                          panel.markets[static_cast<size_t>(m)].market_id +
                          "' on " + panel.dates[static_cast<size_t>(t)].iso() +
                          ", date excluded");
                if (started) panel.scaled_prices(t, m) = run;  // carry level
                continue;
            }
            const double sd = d / sig;
            panel.scaled_deltas(t, m) = sd;
            run = started ? run + sd : sd;
            started = true;
            panel.scaled_prices(t, m) = run;
        }
    }
    return excluded;
}

// ---------------------------------------------------------------------------
// Panel assembly
// ---------------------------------------------------------------------------

int PricePanel::date_index(const Date& d) const {
    auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d) return -1;
    return static_cast<int>(std::distance(dates.begin(), it));
}

int PricePanel::first_complete_scaled_row() const {
    for (int t = 0; t < rows(); ++t) {
        bool all = true;
        for (int m = 0; m < cols(); ++m)
            if (!scaled_defined(t, m)) { all = false; break; }
        if (all) return t;
    }
    return -1;
}

PricePanel build_panel(std::vector<Date> dates, std::vector<ContractSpec> markets,
                       Eigen::MatrixXd prices) {
    const int T = static_cast<int>(dates.size());
    const int M = static_cast<int>(markets.size());
    if (prices.rows() != T || prices.cols() != M)
        throw DataError("build_panel: dimension mismatch");
    if (T < 2) throw DataError("build_panel: need at least 2 dates");
    for (size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i])) throw DataError("non-ascending dates");
    if (!prices.allFinite()) throw DataError("non-finite price in panel");

    PricePanel p;
    p.dates = std::move(dates);
    p.markets = std::move(markets);
    p.prices = std::move(prices);
    p.deltas = price_deltas(p.prices);
    p.vol22 = ewm_std(p.deltas, kVolSpan, kVolMinPeriods);

    p.point_value.resize(T, M);
    p.fx.resize(T, M);
    for (int m = 0; m < M; ++m) {
        const auto& spec = p.markets[static_cast<size_t>(m)];
        if (spec.half_spread < 0)
            throw DataError("negative half spread for '" + spec.market_id + "'");
        for (int t = 0; t < T; ++t) {
            const Date& d = p.dates[static_cast<size_t>(t)];
            const double f = spec.point_value.at(d);
            const double e = spec.fx_rate.at(d);
            if (!(f > 0.0))
                throw DataError("non-positive point value for '" + spec.market_id +
                                "' on " + d.iso());
            if (!(e > 0.0))
                throw DataError("non-positive fx rate for '" + spec.market_id +
                                "' on " + d.iso());
            p.point_value(t, m) = f;
            p.fx(t, m) = e;
        }
    }
    vol_scale(p);
    return p;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace {

DatedSeries parse_value_or_path(const std::string& field,
                                const std::string& base_dir,
                                const std::string& context) {
    // Numeric literal -> constant; anything else is a path to a dated CSV.
    try {
        return DatedSeries::constant(csv::parse_double(field, context));
    } catch (const DataError&) {
    }
    std::filesystem::path p(field);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    csv::Table t = csv::read_file(p.string());
    if (t.header.size() != 2 || t.header[0] != "date")
        throw DataError(p.string() + ": expected a two-column dated CSV");
    DatedSeries s;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const std::string ctx = p.string() + ":" + std::to_string(t.line_numbers[r]);
        s.dates.push_back(parse_date(t.rows[r][0]));
        s.values.push_back(csv::parse_double(t.rows[r][1], ctx));
        if (s.dates.size() > 1 && !(s.dates[s.dates.size() - 2] < s.dates.back()))
            throw DataError(ctx + ": non-ascending dates");
    }
    if (s.dates.empty()) throw DataError(p.string() + ": empty dated series");
    return s;
}

struct MarketRows {
    // file-order rows: (date, price, contract_id, roll field)
    std::vector<std::tuple<Date, double, std::string, std::string>> rows;
};

StitchedSeries stitch_market(const std::string& market,
                             const MarketRows& rows) {
    bool has_contracts = false;
    for (const auto& r : rows.rows)
        if (!std::get<2>(r).empty()) { has_contracts = true; break; }

    if (!has_contracts) {
        StitchedSeries out;
        for (const auto& [d, px, c, roll] : rows.rows) {
            if (!out.dates.empty() && !(out.dates.back() < d))
                throw DataError("non-ascending dates for market '" + market +
                                "' at " + d.iso());
            out.dates.push_back(d);
            out.prices.push_back(px);
        }
        return out;
    }

    // Group by contract in order of first appearance.
    std::vector<RawContractSeries> contracts;
    std::map<std::string, size_t> index;
    for (const auto& [d, px, cid, roll] : rows.rows) {
        if (cid.empty())
            throw DataError("market '" + market +
                            "' mixes contract and plain rows");
        auto it = index.find(cid);
        if (it == index.end()) {
            index.emplace(cid, contracts.size());
            contracts.push_back(RawContractSeries{market, cid, {}, {}, {}});
            it = index.find(cid);
        }
        auto& c = contracts[it->second];
        if (!c.dates.empty() && !(c.dates.back() < d))
            throw DataError("non-ascending dates in contract '" + cid + "'");
        c.dates.push_back(d);
        c.prices.push_back(px);
        if (!roll.empty()) {
            Date r = parse_date(roll);
            if (c.roll_date && *c.roll_date != r)
                throw DataError("conflicting roll dates for contract '" + cid + "'");
            c.roll_date = r;
        }
    }
    return backadjust(contracts);
}

}  // namespace

std::vector<ContractSpec> load_contract_specs(const std::string& path) {
    csv::Table t = csv::read_file(path);
    const int c_market = t.require_column("market");
    const int c_pv = t.require_column("point_value");
    const int c_fx = t.require_column("fx");
    const int c_hs = t.require_column("half_spread");
    const int c_sec = t.require_column("sector");
    const std::string base = std::filesystem::path(path).parent_path().string();

    std::vector<ContractSpec> specs;
    std::set<std::string> seen;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const std::string ctx = path + ":" + std::to_string(t.line_numbers[r]);
        ContractSpec s;
        s.market_id = t.rows[r][static_cast<size_t>(c_market)];
        if (!seen.insert(s.market_id).second)
            throw DataError(ctx + ": duplicate market '" + s.market_id + "'");
        s.point_value = parse_value_or_path(t.rows[r][static_cast<size_t>(c_pv)],
                                            base, ctx);
        s.fx_rate = parse_value_or_path(t.rows[r][static_cast<size_t>(c_fx)],
                                        base, ctx);
        s.half_spread = csv::parse_double(t.rows[r][static_cast<size_t>(c_hs)], ctx);
        if (s.half_spread < 0) throw DataError(ctx + ": negative half_spread");
        s.sector = parse_sector(t.rows[r][static_cast<size_t>(c_sec)]);
        specs.push_back(std::move(s));
    }
    return specs;
}

PricePanel load_panel(const std::vector<std::string>& price_files,
                      const std::string& contract_spec_file, Alignment alignment) {
    std::vector<ContractSpec> specs = load_contract_specs(contract_spec_file);
    std::map<std::string, size_t> spec_index;
    for (size_t i = 0; i < specs.size(); ++i)
        spec_index.emplace(specs[i].market_id, i);

    // Market order: first appearance across the price files.
    std::vector<std::string> order;
    std::map<std::string, MarketRows> by_market;
    for (const auto& file : price_files) {
        csv::Table t = csv::read_file(file);
        const int c_date = t.require_column("date");
        const int c_market = t.require_column("market");
        const int c_price = t.require_column("price");
        const int c_contract = t.column("contract");
        const int c_roll = t.column("roll");
        for (size_t r = 0; r < t.rows.size(); ++r) {
            const std::string ctx = file + ":" + std::to_string(t.line_numbers[r]);
            const std::string& mkt = t.rows[r][static_cast<size_t>(c_market)];
            if (!spec_index.count(mkt))
                throw DataError(ctx + ": unknown market id '" + mkt + "'");
            Date d;
            try {
                d = parse_date(t.rows[r][static_cast<size_t>(c_date)]);
            } catch (const DataError& e) {
                throw DataError(ctx + ": " + e.what());
            }
            const double px =
                csv::parse_double(t.rows[r][static_cast<size_t>(c_price)], ctx);
            std::string cid =
                c_contract >= 0 ? t.rows[r][static_cast<size_t>(c_contract)] : "";
            std::string roll =
                c_roll >= 0 ? t.rows[r][static_cast<size_t>(c_roll)] : "";
            if (!by_market.count(mkt)) order.push_back(mkt);
            by_market[mkt].rows.emplace_back(d, px, std::move(cid), std::move(roll));
        }
    }
    if (order.empty()) throw DataError("no price rows found");

    std::vector<StitchedSeries> series;
    std::vector<ContractSpec> markets;
    for (const auto& mkt : order) {
        series.push_back(stitch_market(mkt, by_market[mkt]));
        markets.push_back(specs[spec_index[mkt]]);
    }

    // Calendar selection.
    std::vector<Date> calendar;
    if (alignment == Alignment::Intersection) {
        std::map<int64_t, int> counts;
        for (const auto& s : series)
            for (const auto& d : s.dates) counts[d.serial()] += 1;
        for (const auto& [serial, n] : counts)
            if (n == static_cast<int>(series.size()))
                calendar.push_back(Date::from_serial(serial));
    } else {
        Date start = series[0].dates.front();
        for (const auto& s : series) start = std::max(start, s.dates.front());
        std::set<int64_t> all;
        for (const auto& s : series)
            for (const auto& d : s.dates)
                if (!(d < start)) all.insert(d.serial());
        for (int64_t serial : all) calendar.push_back(Date::from_serial(serial));
    }
    if (calendar.size() < 2)
        throw DataError("aligned calendar has fewer than 2 dates");

    Eigen::MatrixXd prices(static_cast<Eigen::Index>(calendar.size()),
                           static_cast<Eigen::Index>(series.size()));
    for (size_t m = 0; m < series.size(); ++m) {
        const auto& s = series[m];
        size_t cursor = 0;
        double last = kNaN;
        for (size_t t = 0; t < calendar.size(); ++t) {
            while (cursor < s.dates.size() && s.dates[cursor] <= calendar[t]) {
                if (s.dates[cursor] == calendar[t] ||
                    alignment == Alignment::UnionFfill)
                    last = s.prices[cursor];
                ++cursor;
            }
            bool exact = cursor > 0 && s.dates[cursor - 1] == calendar[t];
            if (alignment == Alignment::Intersection && !exact)
                throw DataError("internal: intersection calendar mismatch");
            if (std::isnan(last))
                throw DataError("market '" + markets[m].market_id +
                                "' has no price at or before " +
                                calendar[t].iso());
            prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m)) =
                last;
        }
    }
    return build_panel(std::move(calendar), std::move(markets), std::move(prices));
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

namespace {

uint64_t fnv1a(const void* data, size_t len, uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t hash_double(double v, uint64_t h) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return fnv1a(&bits, sizeof(bits), h);
}

nlohmann::json dated_series_json(const DatedSeries& s) {
    if (s.is_constant()) return s.values.front();
    nlohmann::json j;
    for (size_t i = 0; i < s.dates.size(); ++i) j["dates"].push_back(s.dates[i].iso());
    j["values"] = s.values;
    return j;
}

DatedSeries dated_series_from_json(const nlohmann::json& j) {
    if (j.is_number()) return DatedSeries::constant(j.get<double>());
    DatedSeries s;
    for (const auto& d : j.at("dates")) s.dates.push_back(parse_date(d.get<std::string>()));
    s.values = j.at("values").get<std::vector<double>>();
    return s;
}

}  // namespace

uint64_t panel_checksum(const PricePanel& panel) {
    uint64_t h = 1469598103934665603ULL;
    for (const auto& d : panel.dates) {
        int64_t s = d.serial();
        h = fnv1a(&s, sizeof(s), h);
    }
    for (const auto& m : panel.markets) {
        h = fnv1a(m.market_id.data(), m.market_id.size(), h);
        h = hash_double(m.half_spread, h);
        for (double v : m.point_value.values) h = hash_double(v, h);
        for (double v : m.fx_rate.values) h = hash_double(v, h);
    }
    for (int t = 0; t < panel.rows(); ++t)
        for (int m = 0; m < panel.cols(); ++m) h = hash_double(panel.prices(t, m), h);
    return h;
}

void save_panel_cache(const PricePanel& panel, const std::string& path) {
    nlohmann::json j;
    j["format"] = "netmom-panel-cache";
    j["version"] = 1;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(panel_checksum(panel)));
    j["checksum"] = buf;
    for (const auto& d : panel.dates) j["dates"].push_back(d.iso());
    for (const auto& m : panel.markets) {
        nlohmann::json mj;
        mj["market"] = m.market_id;
        mj["point_value"] = dated_series_json(m.point_value);
        mj["fx"] = dated_series_json(m.fx_rate);
        mj["half_spread"] = m.half_spread;
        mj["sector"] = sector_name(m.sector);
        j["markets"].push_back(mj);
    }
    for (int t = 0; t < panel.rows(); ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (int m = 0; m < panel.cols(); ++m) row.push_back(panel.prices(t, m));
        j["prices"].push_back(row);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(1) << "\n";
}

PricePanel load_panel_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    if (j.value("format", "") != "netmom-panel-cache")
        throw DataError(path + ": not a panel cache file");

    std::vector<Date> dates;
    for (const auto& d : j.at("dates")) dates.push_back(parse_date(d.get<std::string>()));
    std::vector<ContractSpec> markets;
    for (const auto& mj : j.at("markets")) {
        ContractSpec s;
        s.market_id = mj.at("market").get<std::string>();
        s.point_value = dated_series_from_json(mj.at("point_value"));
        s.fx_rate = dated_series_from_json(mj.at("fx"));
        s.half_spread = mj.at("half_spread").get<double>();
        s.sector = parse_sector(mj.at("sector").get<std::string>());
        markets.push_back(std::move(s));
    }
    const auto& pj = j.at("prices");
    Eigen::MatrixXd prices(static_cast<Eigen::Index>(dates.size()),
                           static_cast<Eigen::Index>(markets.size()));
    for (size_t t = 0; t < pj.size(); ++t)
        for (size_t m = 0; m < pj[t].size(); ++m)
            prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m)) =
                pj[t][m].get<double>();

    PricePanel panel = build_panel(std::move(dates), std::move(markets),
                                   std::move(prices));
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(panel_checksum(panel)));
    if (j.value("checksum", "") != buf)
        throw DataError(path + ": checksum mismatch, cache is stale or corrupt");
    return panel;
}

}  // namespace netmom

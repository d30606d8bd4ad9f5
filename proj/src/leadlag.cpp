#include "netmom/leadlag.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include "netmom/csv.hpp"
#include "netmom/errors.hpp"
#include "netmom/log.hpp"

namespace netmom {

LeadLagMethod parse_leadlag_method(const std::string& s) {
    if (s == "LEVY") return LeadLagMethod::Levy;
    if (s == "DTW") return LeadLagMethod::Dtw;
    if (s == "DDTW") return LeadLagMethod::Ddtw;
    if (s == "SDTW") return LeadLagMethod::Sdtw;
    if (s == "SDDTW") return LeadLagMethod::Sddtw;
    throw ConfigError("unknown lead-lag method '" + s + "'");
}

std::string leadlag_method_name(LeadLagMethod m) {
    switch (m) {
        case LeadLagMethod::Levy: return "LEVY";
        case LeadLagMethod::Dtw: return "DTW";
        case LeadLagMethod::Ddtw: return "DDTW";
        case LeadLagMethod::Sdtw: return "SDTW";
        case LeadLagMethod::Sddtw: return "SDDTW";
    }
    return "?";
}

double levy_area(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("levy_area: length mismatch");
    const size_t n = x.size();
    if (n < 2) throw DataError("levy_area: need at least 2 points");
    for (size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw DataError("levy_area: non-finite input");
    double sum = 0.0;
    for (size_t s = 1; s < n; ++s) sum += x[s - 1] * y[s] - x[s] * y[s - 1];
    // Chord-closure terms, kept in the x_a(y_a - y_b) + y_a(x_b - x_a) form.
    sum += x[0] * (y[0] - y[n - 1]) + y[0] * (x[n - 1] - x[0]);
    return 0.5 * sum;
}

std::vector<double> standardize(const std::vector<double>& x) {
    const size_t n = x.size();
    if (n == 0) throw DataError("standardize: empty series");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > kEpsVol)) throw DataError("standardize: zero-variance window");
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = (x[i] - mean) / sd;
    return out;
}

std::vector<double> derivative_transform(const std::vector<double>& x) {
    const size_t m = x.size();
    if (m < 3) throw DataError("derivative_transform: need at least 3 points");
    std::vector<double> d(m);
    for (size_t i = 1; i + 1 < m; ++i)
        d[i] = ((x[i] - x[i - 1]) + (x[i + 1] - x[i - 1]) / 2.0) / 2.0;
    d[0] = d[1];
    d[m - 1] = d[m - 2];
    return d;
}

ShapeDescriptorSeries shape_descriptors(const std::vector<double>& x, int l,
                                        bool derivative) {
    if (l < 3 || l % 2 == 0)
        throw DataError("shape_descriptors: descriptor length must be odd and >= 3");
    const int m = static_cast<int>(x.size());
    if (m == 0) throw DataError("shape_descriptors: empty series");
    ShapeDescriptorSeries s;
    s.base_length = m;
    s.descriptor_length = l;
    s.vectors.resize(m, l);
    const int half = (l - 1) / 2;
    std::vector<double> window(static_cast<size_t>(l));
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < l; ++k) {
            int idx = std::clamp(i + k - half, 0, m - 1);
            window[static_cast<size_t>(k)] = x[static_cast<size_t>(idx)];
        }
        if (derivative) {
            auto d = derivative_transform(window);
            for (int k = 0; k < l; ++k) s.vectors(i, k) = d[static_cast<size_t>(k)];
        } else {
            for (int k = 0; k < l; ++k) s.vectors(i, k) = window[static_cast<size_t>(k)];
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Dynamic time warping
// ---------------------------------------------------------------------------

namespace detail {

template <class CostFn>
WarpingPath dtw_core(int m, int n, CostFn cost) {
    std::vector<double> D(static_cast<size_t>(m) * static_cast<size_t>(n));
    auto at = [&](int i, int j) -> double& {
        return D[static_cast<size_t>(i) * static_cast<size_t>(n) +
                 static_cast<size_t>(j)];
    };
    at(0, 0) = cost(0, 0);
    for (int i = 1; i < m; ++i) at(i, 0) = cost(i, 0) + at(i - 1, 0);
    for (int j = 1; j < n; ++j) at(0, j) = cost(0, j) + at(0, j - 1);
    for (int i = 1; i < m; ++i) {
        const double* prev = &at(i - 1, 0);
        double* cur = &at(i, 0);
        for (int j = 1; j < n; ++j) {
            const double best =
                std::min(prev[j - 1], std::min(prev[j], cur[j - 1]));
            cur[j] = cost(i, j) + best;
        }
    }

    WarpingPath path;
    path.cost = at(m - 1, n - 1);
    int i = m - 1, j = n - 1;
    path.pairs.emplace_back(i + 1, j + 1);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = at(i - 1, j - 1);
            const double up = at(i - 1, j);
            const double left = at(i, j - 1);
            const double best = std::min(diag, std::min(up, left));
            if (diag == best) {
                --i;
                --j;
            } else if (up == best) {
                --i;
            } else {
                --j;
            }
        }
        path.pairs.emplace_back(i + 1, j + 1);
    }
    std::reverse(path.pairs.begin(), path.pairs.end());
    return path;
}

}  // namespace detail

WarpingPath dtw_align(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw DataError("dtw_align: empty sequence");
    return detail::dtw_core(
        static_cast<int>(a.size()), static_cast<int>(b.size()),
        [&](int i, int j) {
            return std::abs(a[static_cast<size_t>(i)] - b[static_cast<size_t>(j)]);
        });
}

WarpingPath dtw_align(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() == 0 || b.rows() == 0) throw DataError("dtw_align: empty sequence");
    if (a.cols() != b.cols())
        throw DataError("dtw_align: point dimension mismatch");
    return detail::dtw_core(static_cast<int>(a.rows()), static_cast<int>(b.rows()),
                            [&](int i, int j) {
                                return (a.row(i) - b.row(j)).norm();
                            });
}

int warp_lag(const WarpingPath& path) {
    std::map<int, int> counts;
    for (const auto& [i, j] : path.pairs) counts[j - i] += 1;
    int best_lag = 0;
    int best_count = -1;
    for (const auto& [lag, cnt] : counts) {
        const bool better =
            cnt > best_count ||
            (cnt == best_count &&
             (std::abs(lag) < std::abs(best_lag) ||
              (std::abs(lag) == std::abs(best_lag) && lag < best_lag)));
        if (better) {
            best_lag = lag;
            best_count = cnt;
        }
    }
    return best_lag;
}

// ---------------------------------------------------------------------------
// Lead-lag matrix assembly
// ---------------------------------------------------------------------------

namespace {

// Standardized window per market; nullopt when the window is unusable.
std::vector<std::optional<std::vector<double>>> standardized_windows(
    const PricePanel& panel, int date_row, int lookback) {
    const int M = panel.cols();
    const int start = date_row - lookback + 1;
    if (start < 0 || date_row >= panel.rows())
        throw DataError("leadlag_matrix: insufficient history at row " +
                        std::to_string(date_row) + " for lookback " +
                        std::to_string(lookback));
    std::vector<std::optional<std::vector<double>>> out(
        static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) {
        std::vector<double> w(static_cast<size_t>(lookback));
        bool ok = true;
        for (int k = 0; k < lookback; ++k) {
            const double v = panel.scaled_deltas(start + k, m);
            if (std::isnan(v)) {
                ok = false;
                break;
            }
            w[static_cast<size_t>(k)] = v;
        }
        if (!ok) {
            log::warn("leadlag: undefined window for market '" +
                      panel.markets[static_cast<size_t>(m)].market_id +
                      "' ending " + panel.dates[static_cast<size_t>(date_row)].iso() +
                      ", pairs skipped");
            continue;
        }
        try {
            out[static_cast<size_t>(m)] = standardize(w);
        } catch (const DataError&) {
            log::warn("leadlag: constant window for market '" +
                      panel.markets[static_cast<size_t>(m)].market_id +
                      "' ending " + panel.dates[static_cast<size_t>(date_row)].iso() +
                      ", pairs skipped");
        }
    }
    return out;
}

struct PairInputs {
    // Levy uses the raw standardized window; DTW variants align `points`.
    std::vector<std::optional<std::vector<double>>> std_windows;
    std::vector<std::optional<Eigen::MatrixXd>> points;
    LeadLagMethod method;
};

PairInputs prepare_inputs(const PricePanel& panel, int date_row, int lookback,
                          LeadLagMethod method, int descriptor_len) {
    PairInputs in;
    in.method = method;
    in.std_windows = standardized_windows(panel, date_row, lookback);
    if (method == LeadLagMethod::Levy) return in;
    in.points.resize(in.std_windows.size());
    for (size_t m = 0; m < in.std_windows.size(); ++m) {
        if (!in.std_windows[m]) continue;
        const auto& w = *in.std_windows[m];
        switch (method) {
            case LeadLagMethod::Dtw: {
                Eigen::MatrixXd p(static_cast<Eigen::Index>(w.size()), 1);
                for (size_t i = 0; i < w.size(); ++i)
                    p(static_cast<Eigen::Index>(i), 0) = w[i];
                in.points[m] = std::move(p);
                break;
            }
            case LeadLagMethod::Ddtw: {
                auto d = derivative_transform(w);
                Eigen::MatrixXd p(static_cast<Eigen::Index>(d.size()), 1);
                for (size_t i = 0; i < d.size(); ++i)
                    p(static_cast<Eigen::Index>(i), 0) = d[i];
                in.points[m] = std::move(p);
                break;
            }
            case LeadLagMethod::Sdtw:
                in.points[m] = shape_descriptors(w, descriptor_len, false).vectors;
                break;
            case LeadLagMethod::Sddtw:
                in.points[m] = shape_descriptors(w, descriptor_len, true).vectors;
                break;
            case LeadLagMethod::Levy:
                break;
        }
    }
    return in;
}

double score_pair(const PairInputs& in, int i, int j) {
    const size_t si = static_cast<size_t>(i), sj = static_cast<size_t>(j);
    if (in.method == LeadLagMethod::Levy) {
        if (!in.std_windows[si] || !in.std_windows[sj]) return 0.0;
        return levy_area(*in.std_windows[si], *in.std_windows[sj]);
    }
    if (!in.points[si] || !in.points[sj]) return 0.0;
    return static_cast<double>(warp_lag(dtw_align(*in.points[si], *in.points[sj])));
}

}  // namespace

LeadLagMatrix leadlag_matrix_serial(const PricePanel& panel, int date_row,
                                    int lookback, LeadLagMethod method,
                                    int descriptor_len) {
    PairInputs in = prepare_inputs(panel, date_row, lookback, method,
                                   descriptor_len);
    const int M = panel.cols();
    LeadLagMatrix out;
    out.date = panel.dates[static_cast<size_t>(date_row)];
    out.lookback = lookback;
    out.method = method;
    out.values = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = i + 1; j < M; ++j) {
            const double v = score_pair(in, i, j);
            out.values(i, j) = v;
            out.values(j, i) = -v;
        }
    }
    return out;
}

LeadLagMatrix leadlag_matrix(const PricePanel& panel, int date_row, int lookback,
                             LeadLagMethod method, int descriptor_len,
                             int threads) {
    PairInputs in = prepare_inputs(panel, date_row, lookback, method,
                                   descriptor_len);
    const int M = panel.cols();
    LeadLagMatrix out;
    out.date = panel.dates[static_cast<size_t>(date_row)];
    out.lookback = lookback;
    out.method = method;
    out.values = Eigen::MatrixXd::Zero(M, M);

    // Flattened upper-triangle pair list; each task writes disjoint cells,
    // so the result is identical for any thread count.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<size_t>(M) * static_cast<size_t>(M - 1) / 2);
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) pairs.emplace_back(i, j);

    const int np = static_cast<int>(pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(threads, 1)) \
    if (threads > 1)
    for (int k = 0; k < np; ++k) {
        const auto [i, j] = pairs[static_cast<size_t>(k)];
        const double v = score_pair(in, i, j);
        out.values(i, j) = v;
        out.values(j, i) = -v;
    }
    return out;
}

void write_leadlag_csv(const LeadLagMatrix& m,
                       const std::vector<ContractSpec>& markets,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "market_i,market_j,score\n";
    for (Eigen::Index i = 0; i < m.values.rows(); ++i)
        for (Eigen::Index j = 0; j < m.values.cols(); ++j)
            if (i != j)
                out << markets[static_cast<size_t>(i)].market_id << ","
                    << markets[static_cast<size_t>(j)].market_id << ","
                    << csv::format_double(m.values(i, j)) << "\n";
}

}  // namespace netmom

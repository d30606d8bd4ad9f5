#include "netmom/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "netmom/errors.hpp"

namespace netmom {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double binomial_tail_half(int n, int k) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    const double log_half_n = -static_cast<double>(n) * std::log(2.0);
    double tail = 0.0;
    for (int j = k; j <= n; ++j) {
        const double log_c = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                             std::lgamma(n - j + 1.0);
        tail += std::exp(log_c + log_half_n);
    }
    return std::min(tail, 1.0);
}

double wilcoxon_one_sided(const std::vector<double>& diffs) {
    std::vector<double> d;
    for (double v : diffs)
        if (v != 0.0) d.push_back(v);
    const int n = static_cast<int>(d.size());
    if (n == 0) throw DataError("wilcoxon: all differences are zero");

    // Midranks of |d|.
    std::vector<int> order(d.size());
    for (size_t i = 0; i < d.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(d[static_cast<size_t>(a)]) <
               std::abs(d[static_cast<size_t>(b)]);
    });
    std::vector<double> rank(d.size());
    std::vector<int> tie_sizes;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() &&
               std::abs(d[static_cast<size_t>(order[j + 1])]) ==
                   std::abs(d[static_cast<size_t>(order[i])]))
            ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) rank[static_cast<size_t>(order[k])] = mid;
        tie_sizes.push_back(static_cast<int>(j - i + 1));
        i = j + 1;
    }

    double w_plus = 0.0;
    for (size_t k = 0; k < d.size(); ++k)
        if (d[k] > 0.0) w_plus += rank[k];

    if (n <= kWilcoxonExactLimit) {
        // Count sign assignments with rank sum >= observed, over doubled
        // ranks so midranks stay integral.
        std::vector<int64_t> r2(d.size());
        int64_t total = 0;
        for (size_t k = 0; k < d.size(); ++k) {
            r2[k] = std::llround(2.0 * rank[k]);
            total += r2[k];
        }
        const int64_t w2 = std::llround(2.0 * w_plus);
        std::vector<double> count(static_cast<size_t>(total) + 1, 0.0);
        count[0] = 1.0;
        for (size_t k = 0; k < r2.size(); ++k)
            for (int64_t s = total; s >= r2[k]; --s)
                count[static_cast<size_t>(s)] +=
                    count[static_cast<size_t>(s - r2[k])];
        double ge = 0.0;
        for (int64_t s = w2; s <= total; ++s) ge += count[static_cast<size_t>(s)];
        return ge / std::ldexp(1.0, n);
    }

    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    for (int t : tie_sizes)
        var -= (static_cast<double>(t) * t * t - t) / 48.0;
    if (!(var > 0.0)) throw DataError("wilcoxon: degenerate variance");
    const double z = (w_plus - mu - 0.5) / std::sqrt(var);
    return 1.0 - normal_cdf(z);
}

KsResult ks_one_sided(const std::vector<double>& sample_a,
                      const std::vector<double>& sample_b) {
    if (sample_a.empty() || sample_b.empty())
        throw DataError("ks_one_sided: empty sample");
    std::vector<double> a = sample_a, b = sample_b;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    KsResult r;
    size_t ia = 0, ib = 0;
    while (ia < a.size() || ib < b.size()) {
        const double v = (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib]))
                             ? a[ia]
                             : b[ib];
        while (ia < a.size() && a[ia] <= v) ++ia;
        while (ib < b.size() && b[ib] <= v) ++ib;
        const double diff =
            static_cast<double>(ia) / na - static_cast<double>(ib) / nb;
        r.statistic = std::max(r.statistic, diff);
    }
    r.p_value = std::min(
        1.0, std::exp(-2.0 * na * nb * r.statistic * r.statistic / (na + nb)));
    return r;
}

}  // namespace netmom

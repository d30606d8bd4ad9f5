#pragma once

#include <vector>

namespace netmom {

// One-sided Wilcoxon signed-rank test, alternative: median(diff) > 0.
// Zero diffs are dropped, tied absolute values get midranks. Exact tail
// (subset-sum counting over the observed ranks) for n <= 25; normal
// approximation with continuity and tie corrections above.
double wilcoxon_one_sided(const std::vector<double>& diffs);

constexpr int kWilcoxonExactLimit = 25;

struct KsResult {
    double statistic = 0.0;  // D = sup_x (F_a(x) - F_b(x))
    double p_value = 1.0;    // one-sided asymptotic: exp(-2nmD^2/(n+m))
};

// Tests whether the first sample's CDF lies above the second's.
KsResult ks_one_sided(const std::vector<double>& sample_a,
                      const std::vector<double>& sample_b);

double normal_cdf(double z);

// P(Binomial(n, 1/2) >= k), exact.
double binomial_tail_half(int n, int k);

}  // namespace netmom

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qtcs::stats {

/// Significance threshold used throughout the comparison battery.
inline constexpr double kAlpha = 0.05;

using Sample = std::vector<double>;

/// Permutation p-values are computed exactly when the number of distinct
/// group assignments of the pooled data does not exceed this.
inline constexpr double kMaxExactArrangements = 2e5;

/// Number of distinct assignments of the pooled observations to groups of
/// the given sizes (the multinomial coefficient), as a double.
double arrangement_count(const std::vector<std::size_t>& sizes);

/// Midranks (1-based) of the pooled values; tied values share the mean rank.
std::vector<double> midranks(const std::vector<double>& pooled);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// P(X > x) for X ~ χ²(df).
double chi_squared_sf(double x, double df);
/// Φ(x) for the standard normal.
double normal_cdf(double x);

struct KruskalWallis {
    double h = 0.0;
    double p = 1.0;  // χ²(df) approximation
    std::size_t df = 0;
    std::optional<double> exact_p;  // full permutation distribution, small samples only

    double significance() const { return exact_p.value_or(p); }
};

/// H statistic with tie correction and its χ²(k−1) p-value, plus the exact
/// permutation p-value when the arrangement count is at most
/// kMaxExactArrangements. All-identical data gives H = 0, p = 1.
KruskalWallis kruskal_wallis(const std::vector<Sample>& samples);

struct DunnResult {
    double z = 0.0;
    double p = 1.0;  // two-sided, normal approximation
    std::optional<double> exact_p;  // two-sided permutation p-value of |z|

    double significance() const { return exact_p.value_or(p); }
};

/// Dunn's post-hoc z test for each (i, j) pair, tie-corrected. Exact
/// permutation p-values are attached under the same rule as kruskal_wallis.
std::vector<DunnResult> dunn_test(const std::vector<Sample>& samples, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> bh_adjust(const std::vector<double>& pvalues);

enum class Magnitude { negligible, small, medium, large };

const char* to_string(Magnitude m);
/// One-letter suffix used in tables: N, S, M, L.
char magnitude_letter(Magnitude m);

struct EffectSize {
    double value = 0.5;
    Magnitude magnitude = Magnitude::negligible;
};

/// Vargha-Delaney Â₁₂: P(X > Y) + 0.5·P(X = Y).
EffectSize a12(const Sample& x, const Sample& y);

struct PairwiseComparison {
    std::size_t first = 0;
    std::size_t second = 0;
    double z = 0.0;
    double raw_p = 1.0;
    double adjusted_p = 1.0;
    EffectSize effect;
};

struct StatReport {
    std::string metric;
    std::vector<std::string> groups;
    bool sufficient = false;  // false when some group has fewer than two values
    KruskalWallis omnibus;
    std::vector<PairwiseComparison> pairs;
};

/// Full battery over every unordered pair of groups.
StatReport compare(const std::string& metric, const std::vector<std::string>& groups, const std::vector<Sample>& samples);

void write_markdown(const StatReport& report, std::ostream& out);
void write_csv(const std::vector<StatReport>& reports, std::ostream& out);

}  // namespace qtcs::stats

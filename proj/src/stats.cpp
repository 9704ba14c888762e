#include "qtcs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qtcs::stats {

namespace {

constexpr int kMaxTerms = 10000;
constexpr double kEpsilon = 1e-16;

void require_groups(const std::vector<Sample>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("need at least two groups");
    std::size_t total = 0;
    for (const auto& s : samples) {
        if (s.empty()) throw std::invalid_argument("every group must be nonempty");
        total += s.size();
    }
    if (total < 3) throw std::invalid_argument("need at least three observations in total");
}

struct Pooled {
    std::vector<double> ranks;  // midranks in pooled order
    std::vector<double> rank_means;
    std::size_t total = 0;
    double tie_sum = 0.0;  // Σ (t³ − t) over tie groups
};

Pooled pool(const std::vector<Sample>& samples) {
    Pooled out;
    std::vector<double> values;
    for (const auto& s : samples) values.insert(values.end(), s.begin(), s.end());
    out.total = values.size();
    out.ranks = midranks(values);
    const auto& ranks = out.ranks;

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        out.tie_sum += t * t * t - t;
        i = j;
    }

    std::size_t offset = 0;
    for (const auto& s : samples) {
        double sum = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) sum += ranks[offset + i];
        out.rank_means.push_back(sum / static_cast<double>(s.size()));
        offset += s.size();
    }
    return out;
}

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEpsilon) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x ≥ a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEpsilon;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

std::vector<std::size_t> group_sizes(const std::vector<Sample>& samples) {
    std::vector<std::size_t> sizes;
    for (const auto& s : samples) sizes.push_back(s.size());
    return sizes;
}

bool at_least(double value, double observed) { return value >= observed - 1e-9 * std::max(1.0, std::abs(observed)); }

// Walks every distinct group labelling of the pooled ranks and hands the
// per-group rank sums to `visit`.
template <typename Visit>
void for_each_labelling(const Pooled& pooled, const std::vector<std::size_t>& sizes, Visit&& visit) {
    std::vector<std::size_t> labels;
    for (std::size_t g = 0; g < sizes.size(); ++g) labels.insert(labels.end(), sizes[g], g);
    std::vector<double> sums(sizes.size());
    do {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < labels.size(); ++i) sums[labels[i]] += pooled.ranks[i];
        visit(sums);
    } while (std::next_permutation(labels.begin(), labels.end()));
}

double h_from_sums(const std::vector<double>& sums, const std::vector<std::size_t>& sizes, double n, double correction) {
    double weighted = 0.0;
    for (std::size_t g = 0; g < sums.size(); ++g) weighted += sums[g] * sums[g] / static_cast<double>(sizes[g]);
    return (12.0 / (n * (n + 1.0)) * weighted - 3.0 * (n + 1.0)) / correction;
}

std::string fixed(double value, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << value;
    return out.str();
}

std::string pvalue_text(double p) { return p < 0.0001 ? "<0.0001" : fixed(p, 4); }

}  // namespace

std::vector<double> midranks(const std::vector<double>& pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(pooled.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
        i = j;
    }
    return ranks;
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double chi_squared_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return std::clamp(gamma_q(0.5 * df, 0.5 * x), 0.0, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double arrangement_count(const std::vector<std::size_t>& sizes) {
    double log_count = 0.0;
    std::size_t total = 0;
    for (std::size_t s : sizes) {
        total += s;
        log_count -= std::lgamma(static_cast<double>(s) + 1.0);
    }
    log_count += std::lgamma(static_cast<double>(total) + 1.0);
    return std::round(std::exp(log_count));
}

KruskalWallis kruskal_wallis(const std::vector<Sample>& samples) {
    require_groups(samples);
    const Pooled pooled = pool(samples);
    const double n = static_cast<double>(pooled.total);
    KruskalWallis out;
    out.df = samples.size() - 1;

    const double correction = 1.0 - pooled.tie_sum / (n * n * n - n);
    if (correction <= 0.0) return out;

    double weighted = 0.0;
    for (std::size_t g = 0; g < samples.size(); ++g) {
        const double size = static_cast<double>(samples[g].size());
        const double rank_sum = pooled.rank_means[g] * size;
        weighted += rank_sum * rank_sum / size;
    }
    const double h = (12.0 / (n * (n + 1.0)) * weighted - 3.0 * (n + 1.0)) / correction;
    out.h = std::max(0.0, h);
    out.p = chi_squared_sf(out.h, static_cast<double>(out.df));

    const auto sizes = group_sizes(samples);
    if (arrangement_count(sizes) <= kMaxExactArrangements) {
        double hits = 0.0;
        double total = 0.0;
        for_each_labelling(pooled, sizes, [&](const std::vector<double>& sums) {
            total += 1.0;
            hits += at_least(h_from_sums(sums, sizes, n, correction), h) ? 1.0 : 0.0;
        });
        out.exact_p = hits / total;
    }
    return out;
}

std::vector<DunnResult> dunn_test(const std::vector<Sample>& samples,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    require_groups(samples);
    const Pooled pooled = pool(samples);
    const double n = static_cast<double>(pooled.total);
    const double variance = n * (n + 1.0) / 12.0 - pooled.tie_sum / (12.0 * (n - 1.0));

    std::vector<DunnResult> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        if (i >= samples.size() || j >= samples.size()) throw std::invalid_argument("pair index out of range");
        DunnResult r;
        if (variance > 0.0) {
            const double se = std::sqrt(variance * (1.0 / static_cast<double>(samples[i].size()) +
                                                    1.0 / static_cast<double>(samples[j].size())));
            r.z = (pooled.rank_means[i] - pooled.rank_means[j]) / se;
            r.p = std::min(1.0, 2.0 * normal_cdf(-std::abs(r.z)));
        }
        out.push_back(r);
    }

    const auto sizes = group_sizes(samples);
    if (variance > 0.0 && arrangement_count(sizes) <= kMaxExactArrangements) {
        std::vector<double> observed;
        for (const auto& [i, j] : pairs) observed.push_back(std::abs(pooled.rank_means[i] - pooled.rank_means[j]));
        std::vector<double> hits(pairs.size(), 0.0);
        double total = 0.0;
        for_each_labelling(pooled, sizes, [&](const std::vector<double>& sums) {
            total += 1.0;
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                const auto [i, j] = pairs[k];
                const double gap = std::abs(sums[i] / static_cast<double>(sizes[i]) - sums[j] / static_cast<double>(sizes[j]));
                hits[k] += at_least(gap, observed[k]) ? 1.0 : 0.0;
            }
        });
        for (std::size_t k = 0; k < pairs.size(); ++k) out[k].exact_p = hits[k] / total;
    } else if (variance <= 0.0) {
        for (auto& r : out) r.exact_p = 1.0;
    }
    return out;
}

std::vector<double> bh_adjust(const std::vector<double>& pvalues) {
    for (double p : pvalues) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
    }
    const std::size_t m = pvalues.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

    std::vector<double> adjusted(m);
    double running = 1.0;
    for (std::size_t rank = m; rank-- > 0;) {
        const std::size_t idx = order[rank];
        running = std::min(running, pvalues[idx] * (static_cast<double>(m) / static_cast<double>(rank + 1)));
        adjusted[idx] = running;
    }
    return adjusted;
}

const char* to_string(Magnitude m) {
    switch (m) {
        case Magnitude::negligible: return "negligible";
        case Magnitude::small: return "small";
        case Magnitude::medium: return "medium";
        case Magnitude::large: return "large";
    }
    return "?";
}

char magnitude_letter(Magnitude m) {
    switch (m) {
        case Magnitude::negligible: return 'N';
        case Magnitude::small: return 'S';
        case Magnitude::medium: return 'M';
        case Magnitude::large: return 'L';
    }
    return '?';
}

EffectSize a12(const Sample& x, const Sample& y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("a12 needs two nonempty samples");
    double wins = 0.0;
    for (double xi : x) {
        for (double yj : y) {
            if (xi > yj) {
                wins += 1.0;
            } else if (xi == yj) {
                wins += 0.5;
            }
        }
    }
    EffectSize out;
    out.value = wins / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
    const double distance = std::abs(out.value - 0.5);
    out.magnitude = distance < 0.06   ? Magnitude::negligible
                    : distance < 0.14 ? Magnitude::small
                    : distance < 0.21 ? Magnitude::medium
                                      : Magnitude::large;
    return out;
}

StatReport compare(const std::string& metric, const std::vector<std::string>& groups, const std::vector<Sample>& samples) {
    if (groups.size() != samples.size()) throw std::invalid_argument("group names and samples differ in count");
    StatReport report;
    report.metric = metric;
    report.groups = groups;
    std::size_t total = 0;
    report.sufficient = samples.size() >= 2;
    for (const auto& s : samples) {
        report.sufficient = report.sufficient && s.size() >= 2;
        total += s.size();
    }
    report.sufficient = report.sufficient && total >= 3;
    if (!report.sufficient) return report;

    report.omnibus = kruskal_wallis(samples);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) pairs.emplace_back(i, j);
    }
    const auto dunn = dunn_test(samples, pairs);
    std::vector<double> raw;
    for (const auto& d : dunn) raw.push_back(d.significance());
    const auto adjusted = bh_adjust(raw);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        report.pairs.push_back({pairs[k].first, pairs[k].second, dunn[k].z, raw[k], adjusted[k],
                                a12(samples[pairs[k].first], samples[pairs[k].second])});
    }
    return report;
}

void write_markdown(const StatReport& report, std::ostream& out) {
    out << "### " << report.metric << "\n\n";
    if (!report.sufficient) {
        out << "insufficient replicates: every group needs at least two values\n\n";
        return;
    }
    out << "Kruskal-Wallis H test\n\n";
    out << "| H | X²(df) | p-value | exact permutation p-value |\n|---|---|---|---|\n";
    out << "| " << fixed(report.omnibus.h, 4) << " | " << fixed(report.omnibus.h, 2) << " (" << report.omnibus.df
        << ") | " << pvalue_text(report.omnibus.p) << " | "
        << (report.omnibus.exact_p ? pvalue_text(*report.omnibus.exact_p) : std::string("n/a")) << " |\n\n";
    if (report.omnibus.exact_p) out << "Pairwise p-values below are exact permutation p-values.\n\n";
    out << "Dunn's test with Benjamini-Hochberg correction\n\n";
    out << "| Comparison | z | p-value | adjusted p-value | Â12 |\n|---|---|---|---|---|\n";
    for (const auto& pair : report.pairs) {
        out << "| " << report.groups[pair.first] << " vs " << report.groups[pair.second] << " | " << fixed(pair.z, 4)
            << " | " << pvalue_text(pair.raw_p) << " | " << pvalue_text(pair.adjusted_p) << " | "
            << fixed(pair.effect.value, 2) << " (" << magnitude_letter(pair.effect.magnitude) << ") |\n";
    }
    out << '\n';
}

void write_csv(const std::vector<StatReport>& reports, std::ostream& out) {
    out << "metric,first,second,h,df,kw_p,kw_exact_p,z,raw_p,adjusted_p,a12,magnitude\n";
    out << std::setprecision(17);
    for (const auto& r : reports) {
        if (!r.sufficient) {
            out << r.metric << ",,,,,,,,,,,insufficient\n";
            continue;
        }
        for (const auto& pair : r.pairs) {
            out << r.metric << ',' << r.groups[pair.first] << ',' << r.groups[pair.second] << ',' << r.omnibus.h << ','
                << r.omnibus.df << ',' << r.omnibus.p << ',';
            if (r.omnibus.exact_p) out << *r.omnibus.exact_p;
            out << ',' << pair.z << ',' << pair.raw_p << ',' << pair.adjusted_p << ',' << pair.effect.value << ','
                << to_string(pair.effect.magnitude) << '\n';
        }
    }
}

}  // namespace qtcs::stats

#include "qtcs/decompose.hpp"

#include "qtcs/random.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qtcs {

namespace {

constexpr std::size_t kDims = FeatureMatrix::kColumns;
constexpr int kMaxIterations = 300;

double squared_distance(const FeatureMatrix& features, std::size_t row, const std::vector<double>& centroids,
                        std::size_t cluster) {
    double sum = 0.0;
    for (std::size_t d = 0; d < kDims; ++d) {
        const double diff = features.at(row, d) - centroids[cluster * kDims + d];
        sum += diff * diff;
    }
    return sum;
}

std::size_t nearest(const FeatureMatrix& features, std::size_t row, const std::vector<double>& centroids, std::size_t k) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const double dist = squared_distance(features, row, centroids, c);
        if (dist < best_dist) {
            best_dist = dist;
            best = c;
        }
    }
    return best;
}

std::vector<double> seed_centroids(const FeatureMatrix& features, std::size_t k, Rng& rng) {
    const std::size_t n = features.rows();
    std::vector<double> centroids;
    centroids.reserve(k * kDims);
    std::vector<bool> chosen(n, false);
    auto take = [&](std::size_t row) {
        chosen[row] = true;
        for (std::size_t d = 0; d < kDims; ++d) centroids.push_back(features.at(row, d));
    };
    take(rng.below(n));
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            dist[r] = std::min(dist[r], squared_distance(features, r, centroids, c - 1));
            total += dist[r];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t r = 0; r < n; ++r) {
                if (dist[r] <= 0.0) continue;
                pick = r;
                target -= dist[r];
                if (target < 0.0) break;
            }
        } else {
            // Every remaining point coincides with a centroid; pick any unused row.
            std::vector<std::size_t> unused;
            for (std::size_t r = 0; r < n; ++r) {
                if (!chosen[r]) unused.push_back(r);
            }
            pick = unused[rng.below(unused.size())];
        }
        take(pick);
    }
    return centroids;
}

Clustering drop_empty(const Clustering& in) {
    std::vector<std::size_t> remap(in.k, in.k);
    Clustering out;
    for (std::size_t c = 0; c < in.k; ++c) {
        if (in.cluster_size(c) == 0) continue;
        remap[c] = out.k++;
        out.centroids.insert(out.centroids.end(), in.centroids.begin() + static_cast<std::ptrdiff_t>(c * kDims),
                             in.centroids.begin() + static_cast<std::ptrdiff_t>((c + 1) * kDims));
    }
    out.assignment.reserve(in.assignment.size());
    for (std::size_t a : in.assignment) out.assignment.push_back(remap[a]);
    return out;
}

}  // namespace

std::size_t Clustering::cluster_size(std::size_t cluster) const {
    return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), cluster));
}

std::vector<std::size_t> Clustering::members(std::size_t cluster) const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < assignment.size(); ++t) {
        if (assignment[t] == cluster) out.push_back(t);
    }
    return out;
}

Clustering kmeans(const FeatureMatrix& features, std::size_t k, std::uint64_t seed) {
    const std::size_t n = features.rows();
    if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));

    Rng rng(seed);
    Clustering result;
    result.k = k;
    result.centroids = seed_centroids(features, k, rng);
    result.assignment.assign(n, k);

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t c = nearest(features, r, result.centroids, k);
            changed = changed || c != result.assignment[r];
            result.assignment[r] = c;
        }
        if (!changed) break;
        std::vector<double> sums(k * kDims, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t c = result.assignment[r];
            ++counts[c];
            for (std::size_t d = 0; d < kDims; ++d) sums[c * kDims + d] += features.at(r, d);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < kDims; ++d) {
                result.centroids[c * kDims + d] = sums[c * kDims + d] / static_cast<double>(counts[c]);
            }
        }
        // Re-seed empty clusters at the point farthest from its centroid.
        // When every point sits on its centroid the cluster stays empty and
        // is dropped at the end.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = n;
            double far_dist = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (counts[result.assignment[r]] <= 1) continue;
                const double dist = squared_distance(features, r, result.centroids, result.assignment[r]);
                if (dist > far_dist) {
                    far_dist = dist;
                    far = r;
                }
            }
            if (far == n) continue;
            --counts[result.assignment[far]];
            result.assignment[far] = c;
            counts[c] = 1;
            for (std::size_t d = 0; d < kDims; ++d) result.centroids[c * kDims + d] = features.at(far, d);
        }
    }
    return drop_empty(result);
}

Clustering cap_and_reassign(const Clustering& clustering, const FeatureMatrix& features, std::size_t max_size) {
    if (max_size < 1) throw std::invalid_argument("max cluster size must be at least 1");
    const std::size_t n = clustering.assignment.size();
    if (clustering.k * max_size < n) {
        throw std::invalid_argument("infeasible capacity: " + std::to_string(clustering.k) + " clusters of at most " +
                                    std::to_string(max_size) + " cannot hold " + std::to_string(n) + " tests");
    }

    Clustering out = clustering;
    std::vector<std::size_t> sizes(out.k);
    for (std::size_t c = 0; c < out.k; ++c) sizes[c] = out.cluster_size(c);

    for (std::size_t c = 0; c < out.k; ++c) {
        if (sizes[c] <= max_size) continue;
        auto members = out.members(c);
        std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return squared_distance(features, a, out.centroids, c) > squared_distance(features, b, out.centroids, c);
        });
        const std::size_t excess = sizes[c] - max_size;
        for (std::size_t e = 0; e < excess; ++e) {
            const std::size_t row = members[e];
            std::size_t target = out.k;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t other = 0; other < out.k; ++other) {
                if (other == c || sizes[other] >= max_size) continue;
                const double dist = squared_distance(features, row, out.centroids, other);
                if (dist < best) {
                    best = dist;
                    target = other;
                }
            }
            out.assignment[row] = target;
            --sizes[c];
            ++sizes[target];
        }
    }
    return out;
}

double within_cluster_sse(const Clustering& clustering, const FeatureMatrix& features) {
    double total = 0.0;
    for (std::size_t r = 0; r < clustering.assignment.size(); ++r) {
        total += squared_distance(features, r, clustering.centroids, clustering.assignment[r]);
    }
    return total;
}

std::size_t default_cluster_count(std::size_t n_tests, std::size_t max_size) {
    if (max_size < 1) throw std::invalid_argument("max cluster size must be at least 1");
    return std::min(n_tests, (n_tests + max_size - 1) / max_size + 1);
}

std::vector<SubSuite> decompose(const TestSuite& suite, std::size_t k, std::size_t max_size, std::uint64_t seed) {
    const FeatureMatrix features = normalize_features(suite);
    const Clustering clustering = cap_and_reassign(kmeans(features, k, seed), features, max_size);
    std::vector<SubSuite> out;
    out.reserve(clustering.k);
    for (std::size_t c = 0; c < clustering.k; ++c) {
        auto members = clustering.members(c);
        if (members.empty()) continue;
        auto sub = suite.restrict_to(members, suite.name() + "/c" + std::to_string(c));
        out.push_back({std::move(sub), std::move(members)});
    }
    return out;
}

void write_clustering_csv(const Clustering& clustering, std::ostream& out) {
    out << "test_index,cluster\n";
    for (std::size_t t = 0; t < clustering.assignment.size(); ++t) out << t << ',' << clustering.assignment[t] << '\n';
}

}  // namespace qtcs

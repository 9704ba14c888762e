#pragma once

#include "qtcs/suite.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qtcs {

struct Clustering {
    std::size_t k = 0;
    std::vector<std::size_t> assignment;  // per test, in [0, k)
    std::vector<double> centroids;        // k x 3, row-major

    std::size_t cluster_size(std::size_t cluster) const;
    std::vector<std::size_t> members(std::size_t cluster) const;
};

/// Lloyd's algorithm from k-means++ seeding. Stops when assignments are
/// stable or after 300 iterations. Clusters left empty are dropped and k
/// reduced accordingly.
Clustering kmeans(const FeatureMatrix& features, std::size_t k, std::uint64_t seed);

/// Moves the members of each oversized cluster that lie farthest from its
/// centroid to the nearest cluster with spare capacity. Centroids are kept.
Clustering cap_and_reassign(const Clustering& clustering, const FeatureMatrix& features, std::size_t max_size);

/// Sum of squared distances of every row to its assigned centroid.
double within_cluster_sse(const Clustering& clustering, const FeatureMatrix& features);

struct SubSuite {
    TestSuite suite;
    std::vector<std::size_t> parent_index;  // row r of `suite` is parent test parent_index[r]
};

/// k = ceil(#tests / max_size) + 1, clamped to #tests.
std::size_t default_cluster_count(std::size_t n_tests, std::size_t max_size);

std::vector<SubSuite> decompose(const TestSuite& suite, std::size_t k, std::size_t max_size, std::uint64_t seed);

/// `test_index,cluster` CSV with a header row.
void write_clustering_csv(const Clustering& clustering, std::ostream& out);

}  // namespace qtcs

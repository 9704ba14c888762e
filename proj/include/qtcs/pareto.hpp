#pragma once

#include "qtcs/suite.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qtcs {

struct Origin {
    std::string algorithm;
    std::size_t run = 0;

    auto operator<=>(const Origin&) const = default;
};

struct ParetoPoint {
    Selection selection;
    ObjectiveVector objectives;
    Origin origin;
};

/// Points sharing one suite; after filtering none dominates another.
struct Front {
    std::vector<ParetoPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
};

/// Lower cost, more fault hits, more covered statements; at least as good
/// everywhere and strictly better somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Drops every point dominated by another. Equal objective vectors never
/// dominate each other, so duplicates survive. Input order is preserved.
Front nondominated_filter(std::vector<ParetoPoint> points);

/// Greedy-orders the selected tests by coverage per cost, evaluates every
/// prefix, and keeps the non-dominated prefixes.
Front incremental_front(const TestSuite& suite, const Selection& selection, const Origin& origin = {});

/// Non-dominated subset of the union of all fronts; points keep their origin.
Front reference_front(const std::vector<Front>& fronts);

/// Points per algorithm.
std::map<std::string, std::size_t> count_contributions(const Front& reference);
/// Points per (algorithm, run).
std::map<Origin, std::size_t> count_contributions_by_run(const Front& reference);

/// Lowercase hex of the selection read as a number with test i at bit i,
/// zero-padded to ceil(n/4) digits.
std::string selection_to_hex(const Selection& selection);
Selection selection_from_hex(const std::string& hex, std::size_t n_tests);

/// `algorithm,run,selection_hex,cost,faults,stmts` with a header row.
void write_front_csv(const Front& front, std::ostream& out, bool header = true);
/// Reads rows written by write_front_csv. Objectives are taken from the
/// file; pass them through `objectives` to re-validate against a suite.
Front read_front_csv(std::istream& in, std::size_t n_tests);

}  // namespace qtcs

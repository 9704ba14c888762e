#include "qtcs/pareto.hpp"

#include "qtcs/selectors.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qtcs {

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    const bool no_worse =
        a.total_cost <= b.total_cost && a.fault_hits >= b.fault_hits && a.stmts_covered >= b.stmts_covered;
    const bool better = a.total_cost < b.total_cost || a.fault_hits > b.fault_hits || a.stmts_covered > b.stmts_covered;
    return no_worse && better;
}

Front nondominated_filter(std::vector<ParetoPoint> points) {
    if (points.empty()) return {};
    const std::size_t width = points.front().selection.size();
    for (const auto& p : points) {
        if (p.selection.size() != width) throw std::invalid_argument("points come from suites of different sizes");
    }

    // Any dominator of a point sorts before it in (cost asc, faults desc,
    // stmts desc) order, and the archive of survivors so far suffices to
    // reject it: whatever dominates a rejected point also dominates its prey.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = points[a].objectives;
        const auto& y = points[b].objectives;
        if (x.total_cost != y.total_cost) return x.total_cost < y.total_cost;
        if (x.fault_hits != y.fault_hits) return x.fault_hits > y.fault_hits;
        return x.stmts_covered > y.stmts_covered;
    });
    std::vector<std::size_t> archive;
    std::vector<bool> keep(points.size(), false);
    for (std::size_t idx : order) {
        const auto& candidate = points[idx].objectives;
        const bool dominated = std::any_of(archive.begin(), archive.end(),
                                           [&](std::size_t a) { return dominates(points[a].objectives, candidate); });
        if (dominated) continue;
        archive.push_back(idx);
        keep[idx] = true;
    }

    Front front;
    front.points.reserve(archive.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (keep[i]) front.points.push_back(std::move(points[i]));
    }
    return front;
}

Front incremental_front(const TestSuite& suite, const Selection& selection, const Origin& origin) {
    if (selection.size() != suite.size()) throw std::invalid_argument("selection length does not match suite size");
    std::vector<std::size_t> chosen;
    for (std::size_t t = 0; t < suite.size(); ++t) {
        if (selection[t]) chosen.push_back(t);
    }
    const auto order = greedy_order(suite, chosen, false);

    std::vector<ParetoPoint> prefixes;
    prefixes.reserve(order.size());
    Selection prefix(suite.size(), false);
    for (std::size_t t : order) {
        prefix[t] = true;
        prefixes.push_back({prefix, objectives(suite, prefix), origin});
    }
    return nondominated_filter(std::move(prefixes));
}

Front reference_front(const std::vector<Front>& fronts) {
    std::vector<ParetoPoint> all;
    for (const auto& f : fronts) all.insert(all.end(), f.points.begin(), f.points.end());
    return nondominated_filter(std::move(all));
}

std::map<std::string, std::size_t> count_contributions(const Front& reference) {
    std::map<std::string, std::size_t> counts;
    for (const auto& p : reference.points) ++counts[p.origin.algorithm];
    return counts;
}

std::map<Origin, std::size_t> count_contributions_by_run(const Front& reference) {
    std::map<Origin, std::size_t> counts;
    for (const auto& p : reference.points) ++counts[p.origin];
    return counts;
}

std::string selection_to_hex(const Selection& selection) {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::size_t digits = std::max<std::size_t>(1, (selection.size() + 3) / 4);
    std::string hex(digits, '0');
    for (std::size_t d = 0; d < digits; ++d) {
        unsigned nibble = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t bit = 4 * d + b;
            if (bit < selection.size() && selection[bit]) nibble |= 1U << b;
        }
        hex[digits - 1 - d] = kDigits[nibble];
    }
    return hex;
}

Selection selection_from_hex(const std::string& hex, std::size_t n_tests) {
    Selection out(n_tests, false);
    for (std::size_t d = 0; d < hex.size(); ++d) {
        const char ch = hex[hex.size() - 1 - d];
        unsigned nibble = 0;
        if (ch >= '0' && ch <= '9') {
            nibble = static_cast<unsigned>(ch - '0');
        } else if (ch >= 'a' && ch <= 'f') {
            nibble = static_cast<unsigned>(ch - 'a' + 10);
        } else if (ch >= 'A' && ch <= 'F') {
            nibble = static_cast<unsigned>(ch - 'A' + 10);
        } else {
            throw std::invalid_argument("invalid hex digit in selection '" + hex + "'");
        }
        for (std::size_t b = 0; b < 4; ++b) {
            if (!((nibble >> b) & 1U)) continue;
            const std::size_t bit = 4 * d + b;
            if (bit >= n_tests) throw std::invalid_argument("selection '" + hex + "' selects a test beyond the suite");
            out[bit] = true;
        }
    }
    return out;
}

void write_front_csv(const Front& front, std::ostream& out, bool header) {
    if (header) out << "algorithm,run,selection_hex,cost,faults,stmts\n";
    std::ostringstream cost;
    cost << std::setprecision(17);
    for (const auto& p : front.points) {
        cost.str({});
        cost << p.objectives.total_cost;
        out << p.origin.algorithm << ',' << p.origin.run << ',' << selection_to_hex(p.selection) << ',' << cost.str()
            << ',' << p.objectives.fault_hits << ',' << p.objectives.stmts_covered << '\n';
    }
}

Front read_front_csv(std::istream& in, std::size_t n_tests) {
    Front front;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.rfind("algorithm,", 0) == 0) continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 6) {
            throw std::invalid_argument("front CSV line " + std::to_string(number) + ": expected 6 fields");
        }
        ParetoPoint p;
        p.origin.algorithm = fields[0];
        try {
            p.origin.run = std::stoul(fields[1]);
            p.selection = selection_from_hex(fields[2], n_tests);
            p.objectives.total_cost = std::stod(fields[3]);
            p.objectives.fault_hits = std::stoll(fields[4]);
            p.objectives.stmts_covered = std::stoll(fields[5]);
        } catch (const std::exception& e) {
            throw std::invalid_argument("front CSV line " + std::to_string(number) + ": " + e.what());
        }
        front.points.push_back(std::move(p));
    }
    return front;
}

}  // namespace qtcs

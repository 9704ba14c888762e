#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qtcs {

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    /// Checked once per iteration; the last iteration may overshoot by up
    /// to dim + 1 evaluations.
    std::size_t max_evaluations = 400;
    /// Converged once both the vertex spread and the value spread fall to
    /// or below this.
    double tolerance = 1e-6;
    double initial_step = 0.25;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Called after every iteration with (iteration, best point, best value).
using NelderMeadObserver = std::function<void(std::size_t, const std::vector<double>&, double)>;

/// Downhill simplex minimization. The initial simplex is `start` plus one
/// vertex per coordinate displaced by `initial_step`.
template <class Objective>
NelderMeadResult nelder_mead(Objective&& objective, std::vector<double> start, const NelderMeadOptions& options = {},
                             const NelderMeadObserver& observer = {}) {
    const std::size_t dim = start.size();
    if (dim == 0) throw std::invalid_argument("nelder_mead needs at least one coordinate");

    struct Vertex {
        std::vector<double> x;
        double f;
    };

    NelderMeadResult result;
    auto evaluate = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return static_cast<double>(objective(x));
    };

    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    simplex.push_back({start, evaluate(start)});
    for (std::size_t d = 0; d < dim; ++d) {
        auto x = start;
        x[d] += options.initial_step;
        simplex.push_back({x, evaluate(x)});
    }

    // Stable order keeps ties at their previous rank.
    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    auto along = [&](const std::vector<double>& from, const std::vector<double>& towards, double t) {
        std::vector<double> x(dim);
        for (std::size_t d = 0; d < dim; ++d) x[d] = from[d] + t * (towards[d] - from[d]);
        return x;
    };

    order();
    while (result.evaluations < options.max_evaluations) {
        double x_spread = 0.0;
        for (std::size_t v = 1; v <= dim; ++v) {
            for (std::size_t d = 0; d < dim; ++d) {
                x_spread = std::max(x_spread, std::abs(simplex[v].x[d] - simplex[0].x[d]));
            }
        }
        const double f_spread = simplex[dim].f - simplex[0].f;
        if (x_spread <= options.tolerance && f_spread <= options.tolerance) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v < dim; ++v) {
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[v].x[d];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        Vertex& worst = simplex[dim];
        const auto reflected = along(centroid, worst.x, -options.reflection);
        const double f_reflected = evaluate(reflected);

        if (f_reflected < simplex[0].f) {
            const auto expanded = along(centroid, worst.x, -options.reflection * options.expansion);
            const double f_expanded = evaluate(expanded);
            worst = f_expanded < f_reflected ? Vertex{expanded, f_expanded} : Vertex{reflected, f_reflected};
        } else if (f_reflected < simplex[dim - 1].f) {
            worst = {reflected, f_reflected};
        } else {
            const bool outside = f_reflected < worst.f;
            const auto contracted = outside ? along(centroid, reflected, options.contraction)
                                            : along(centroid, worst.x, options.contraction);
            const double f_contracted = evaluate(contracted);
            if (f_contracted < std::min(f_reflected, worst.f)) {
                worst = {contracted, f_contracted};
            } else {
                for (std::size_t v = 1; v <= dim; ++v) {
                    simplex[v].x = along(simplex[0].x, simplex[v].x, options.shrink);
                    simplex[v].f = evaluate(simplex[v].x);
                }
            }
        }
        order();
        ++result.iterations;
        if (observer) observer(result.iterations, simplex[0].x, simplex[0].f);
    }

    result.x = simplex[0].x;
    result.value = simplex[0].f;
    return result;
}

}  // namespace qtcs

#include "forstruct/point_pattern.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "forstruct/common.hpp"
#include "forstruct/kernels.hpp"

namespace forstruct {

PointPattern::PointPattern(std::vector<Point> points, Window window)
    : points_(std::move(points)), window_(window) {
    for (const auto& p : points_) {
        if (!window_.contains(p)) {
            throw InvalidInput("PointPattern: point outside the observation window");
        }
    }
    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points_[a].x != points_[b].x) return points_[a].x < points_[b].x;
        return points_[a].y < points_[b].y;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        const auto& a = points_[order[i - 1]];
        const auto& b = points_[order[i]];
        if (a.x == b.x && a.y == b.y) {
            throw InvalidInput("PointPattern: duplicate point coordinates");
        }
    }
}

double PointPattern::intensity() const {
    return static_cast<double>(points_.size()) / window_.area();
}

std::vector<double> nn_distances(const PointPattern& p) {
    const auto& pts = p.points();
    const auto n = pts.size();
    if (n < 2) throw InsufficientData("nn_distances: need at least 2 points");

    // Sweep over points ordered by x, pruning candidates once the x gap
    // alone exceeds the best squared distance found so far.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });

    std::vector<double> out(n);
    const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < sn; ++k) {
        const Point& q = pts[order[k]];
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t j = k - 1; j >= 0; --j) {
            const double dx = q.x - pts[order[j]].x;
            if (dx * dx >= best) break;
            best = std::min(best, squared_distance(q, pts[order[j]]));
        }
        for (std::int64_t j = k + 1; j < sn; ++j) {
            const double dx = pts[order[j]].x - q.x;
            if (dx * dx >= best) break;
            best = std::min(best, squared_distance(q, pts[order[j]]));
        }
        out[order[k]] = std::sqrt(best);
    }
    return out;
}

double aggregation_index(const PointPattern& p) {
    const auto d = nn_distances(p);
    const double sum = std::accumulate(d.begin(), d.end(), 0.0);
    return 2.0 / std::sqrt(static_cast<double>(p.size()) * p.window().area()) * sum;
}

CurveOnGrid f_function_km(const PointPattern& p, double r_max, double grid_step) {
    if (p.size() == 0) throw InsufficientData("f_function_km: empty pattern");
    if (!(r_max > 0.0)) throw InvalidInput("f_function_km: r_max must be positive");
    if (!(grid_step > 0.0)) throw InvalidInput("f_function_km: grid_step must be positive");

    const Window& w = p.window();
    const BoundingBox bb = w.bbox();

    std::vector<Point> queries;
    std::vector<double> boundary;
    const auto nx = static_cast<std::size_t>(std::ceil((bb.x1 - bb.x0) / grid_step - 1e-9));
    const auto ny = static_cast<std::size_t>(std::ceil((bb.y1 - bb.y0) / grid_step - 1e-9));
    queries.reserve(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const Point u{bb.x0 + (static_cast<double>(ix) + 0.5) * grid_step,
                          bb.y0 + (static_cast<double>(iy) + 0.5) * grid_step};
            if (w.contains(u)) {
                queries.push_back(u);
                boundary.push_back(w.boundary_distance(u));
            }
        }
    }
    if (queries.empty()) throw InvalidInput("f_function_km: lattice spacing too coarse for window");

    const std::vector<double> d = kernels::nearest_point_distances(queries, p.points());

    const std::vector<double> grid = uniform_grid(r_max, grid_step);
    const std::size_t n_bins = grid.size() - 1;

    // deaths[j]: d in (grid[j], grid[j+1]] with d <= b (observed);
    // at_risk[j]: min(d, b) > grid[j] (still at risk entering the bin).
    std::vector<std::int64_t> deaths(n_bins, 0);
    std::vector<std::int64_t> at_risk_drop(n_bins + 1, 0);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const double m = std::min(d[i], boundary[i]);
        // number of bins whose left edge m exceeds
        auto bins_at_risk = static_cast<std::size_t>(std::ceil(m / grid_step - 1e-12));
        if (bins_at_risk > n_bins) bins_at_risk = n_bins;
        if (d[i] <= boundary[i]) {
            auto bin = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(d[i] / grid_step - 1e-12)));
            if (bin <= n_bins) {
                ++deaths[bin - 1];
                if (bins_at_risk < bin) bins_at_risk = bin;
            }
        }
        ++at_risk_drop[bins_at_risk];
    }

    std::vector<double> values(grid.size(), 0.0);
    double survival = 1.0;
    std::int64_t at_risk = static_cast<std::int64_t>(queries.size());
    for (std::size_t j = 0; j < n_bins; ++j) {
        at_risk -= at_risk_drop[j];
        if (at_risk > 0 && deaths[j] > 0) {
            survival *= 1.0 - static_cast<double>(deaths[j]) / static_cast<double>(at_risk);
        }
        values[j + 1] = std::min(1.0, std::max(values[j], 1.0 - survival));
    }
    return CurveOnGrid(grid, std::move(values));
}

double fd_summary(const PointPattern& p, double r_t, double grid_step) {
    if (p.size() < 2) throw InsufficientData("fd_summary: need at least 2 points");
    const CurveOnGrid f = f_function_km(p, r_t, grid_step);
    const CurveOnGrid ref = f_theo_csr(p.intensity(), f.r);
    return d_kl(f, ref, r_t);
}

}  // namespace forstruct

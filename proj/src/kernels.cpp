#include "forstruct/kernels.hpp"

#include <cmath>
#include <limits>

#include "forstruct/common.hpp"

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

inline double min_distance_to(const forstruct::Point& q,
                              const std::vector<forstruct::Point>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        const double d2 = forstruct::squared_distance(q, p);
        if (d2 < best) best = d2;
    }
    return std::sqrt(best);
}

// 1D squared distance transform along one line via the lower envelope of
// parabolas rooted at (q, f[q]). Entries with f = kInf carry no parabola.
void edt_1d(const std::int64_t* f, std::int64_t* out, int n,
            int* v, double* z) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] >= kInf) continue;
        const double fq = static_cast<double>(f[q]) + static_cast<double>(q) * q;
        while (k >= 0) {
            const double fv = static_cast<double>(f[v[k]]) + static_cast<double>(v[k]) * v[k];
            const double s = (fq - fv) / (2.0 * (q - v[k]));
            if (k > 0 && s <= z[k]) {
                --k;
                continue;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            break;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -std::numeric_limits<double>::infinity();
        }
    }
    if (k < 0) {
        for (int x = 0; x < n; ++x) out[x] = kInf;
        return;
    }
    int j = 0;
    for (int x = 0; x < n; ++x) {
        while (j < k && z[j + 1] < static_cast<double>(x)) ++j;
        const std::int64_t dx = x - v[j];
        out[x] = dx * dx + f[v[j]];
    }
}

std::vector<std::int64_t> edt_impl(const std::vector<std::uint8_t>& feature, int rows, int cols,
                                   bool parallel) {
    if (rows <= 0 || cols <= 0 || feature.size() != static_cast<std::size_t>(rows) * cols) {
        throw forstruct::InvalidInput("squared_distance_transform: bad grid dimensions");
    }
    std::vector<std::int64_t> colsq(feature.size(), kInf);

    // Phase 1: nearest feature distance along each column (two sweeps).
#pragma omp parallel for schedule(static) if (parallel)
    for (int c = 0; c < cols; ++c) {
        std::int64_t d = kInf;
        for (int r = 0; r < rows; ++r) {
            if (feature[static_cast<std::size_t>(r) * cols + c]) d = 0;
            else if (d < kInf) ++d;
            colsq[static_cast<std::size_t>(r) * cols + c] = d;
        }
        d = kInf;
        for (int r = rows - 1; r >= 0; --r) {
            const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            if (feature[idx]) d = 0;
            else if (d < kInf) ++d;
            if (d < colsq[idx]) colsq[idx] = d;
        }
        for (int r = 0; r < rows; ++r) {
            const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            if (colsq[idx] < kInf) colsq[idx] *= colsq[idx];
        }
    }

    // Phase 2: lower-envelope scan along each row.
    std::vector<std::int64_t> out(feature.size(), kInf);
#pragma omp parallel for schedule(static) if (parallel)
    for (int r = 0; r < rows; ++r) {
        std::vector<int> v(cols);
        std::vector<double> z(cols + 1);
        edt_1d(colsq.data() + static_cast<std::size_t>(r) * cols,
               out.data() + static_cast<std::size_t>(r) * cols, cols, v.data(), z.data());
    }

    for (auto& x : out) {
        if (x >= kInf) x = forstruct::kernels::kNoFeature;
    }
    return out;
}

}  // namespace

namespace forstruct::kernels {

std::vector<double> nearest_point_distances(const std::vector<Point>& queries,
                                            const std::vector<Point>& points) {
    std::vector<double> out(queries.size());
    const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i] = min_distance_to(queries[i], points);
    }
    return out;
}

std::vector<std::int64_t> squared_distance_transform(const std::vector<std::uint8_t>& feature,
                                                     int rows, int cols) {
    return edt_impl(feature, rows, cols, true);
}

void weighted_row_distances_sq(const std::vector<double>& data, std::size_t cols,
                               std::size_t query_row, const std::vector<int>& selected,
                               const std::vector<double>& weights_sq,
                               std::vector<double>& out_sq) {
    const std::size_t n_rows = cols == 0 ? 0 : data.size() / cols;
    out_sq.assign(n_rows, 0.0);
    const double* q = data.data() + query_row * cols;
    for (std::size_t j = 0; j < n_rows; ++j) {
        const double* b = data.data() + j * cols;
        double acc = 0.0;
        for (std::size_t s = 0; s < selected.size(); ++s) {
            const double diff = q[selected[s]] - b[selected[s]];
            acc += weights_sq[s] * (diff * diff);
        }
        out_sq[j] = acc;
    }
}

}  // namespace forstruct::kernels

namespace forstruct::serial {

std::vector<double> nearest_point_distances(const std::vector<Point>& queries,
                                            const std::vector<Point>& points) {
    std::vector<double> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        out[i] = min_distance_to(queries[i], points);
    }
    return out;
}

std::vector<std::int64_t> squared_distance_transform(const std::vector<std::uint8_t>& feature,
                                                     int rows, int cols) {
    return edt_impl(feature, rows, cols, false);
}

}  // namespace forstruct::serial

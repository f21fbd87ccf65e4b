// Benchmark of the OpenMP kernels against their serial reference
// implementations: nearest-point distance fields (the KM estimator's inner
// loop) and the exact raster distance transform against the brute-force
// gap-to-canopy scan. Verifies agreement before timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "forstruct/kernels.hpp"

using namespace forstruct;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

std::vector<std::int64_t> brute_force_edt(const std::vector<std::uint8_t>& feature, int rows,
                                          int cols) {
    std::vector<std::int64_t> out(feature.size(), kernels::kNoFeature);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::int64_t best = -1;
            for (int fr = 0; fr < rows; ++fr) {
                for (int fc = 0; fc < cols; ++fc) {
                    if (!feature[static_cast<std::size_t>(fr) * cols + fc]) continue;
                    const std::int64_t d2 = static_cast<std::int64_t>(r - fr) * (r - fr) +
                                            static_cast<std::int64_t>(c - fc) * (c - fc);
                    if (best < 0 || d2 < best) best = d2;
                }
            }
            out[static_cast<std::size_t>(r) * cols + c] = best < 0 ? kernels::kNoFeature : best;
        }
    }
    return out;
}

}  // namespace

int main() {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::printf("%-34s %12s %12s %8s\n", "kernel", "serial ms", "parallel ms", "speedup");

    {
        const int n_queries = 200 * 200;
        const int n_points = 500;
        std::vector<Point> queries(n_queries), points(n_points);
        for (auto& q : queries) q = {20.0 * unit(rng), 20.0 * unit(rng)};
        for (auto& p : points) p = {20.0 * unit(rng), 20.0 * unit(rng)};

        const auto ref = serial::nearest_point_distances(queries, points);
        const auto par = kernels::nearest_point_distances(queries, points);
        if (ref != par) {
            std::printf("nearest_point_distances: MISMATCH\n");
            return 1;
        }
        const double ts = best_of(3, [&] { serial::nearest_point_distances(queries, points); });
        const double tp = best_of(3, [&] { kernels::nearest_point_distances(queries, points); });
        std::printf("%-34s %12.2f %12.2f %7.2fx\n", "nearest_point_distances 40k x 500", ts, tp,
                    ts / tp);
    }

    {
        const int rows = 512;
        const int cols = 512;
        std::vector<std::uint8_t> feature(static_cast<std::size_t>(rows) * cols, 0);
        for (auto& f : feature) f = unit(rng) < 0.05 ? 1 : 0;

        const auto ref = serial::squared_distance_transform(feature, rows, cols);
        const auto par = kernels::squared_distance_transform(feature, rows, cols);
        if (ref != par) {
            std::printf("squared_distance_transform: MISMATCH\n");
            return 1;
        }
        const double ts =
            best_of(3, [&] { serial::squared_distance_transform(feature, rows, cols); });
        const double tp =
            best_of(3, [&] { kernels::squared_distance_transform(feature, rows, cols); });
        std::printf("%-34s %12.2f %12.2f %7.2fx\n", "distance_transform 512x512", ts, tp,
                    ts / tp);

        const int small = 96;
        std::vector<std::uint8_t> small_feature(static_cast<std::size_t>(small) * small, 0);
        for (auto& f : small_feature) f = unit(rng) < 0.05 ? 1 : 0;
        const auto exact = kernels::squared_distance_transform(small_feature, small, small);
        const auto brute = brute_force_edt(small_feature, small, small);
        if (exact != brute) {
            std::printf("distance_transform vs brute force: MISMATCH\n");
            return 1;
        }
        const double tb = best_of(3, [&] { brute_force_edt(small_feature, small, small); });
        const double te =
            best_of(3, [&] { kernels::squared_distance_transform(small_feature, small, small); });
        std::printf("%-34s %12.2f %12.2f %7.2fx\n", "edt vs brute force 96x96", tb, te, tb / te);
    }

    return 0;
}

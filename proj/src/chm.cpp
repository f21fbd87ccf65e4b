#include "forstruct/chm.hpp"

#include <algorithm>
#include <cmath>

#include "forstruct/common.hpp"

namespace forstruct {

ReturnClass return_class_from_string(const std::string& s) {
    if (s == "first") return ReturnClass::first;
    if (s == "last") return ReturnClass::last;
    if (s == "intermediate") return ReturnClass::intermediate;
    throw InvalidInput("unknown return class '" + s + "' (expected first|intermediate|last)");
}

std::string to_string(ReturnClass c) {
    switch (c) {
        case ReturnClass::first: return "first";
        case ReturnClass::last: return "last";
        case ReturnClass::intermediate: return "intermediate";
    }
    return "first";
}

PlotCloud::PlotCloud(std::string plot_id, std::vector<PulseReturn> returns, Point center,
                     double outer_radius, double inner_radius)
    : plot_id_(std::move(plot_id)),
      returns_(std::move(returns)),
      center_(center),
      outer_radius_(outer_radius),
      inner_radius_(inner_radius) {
    if (!(inner_radius_ > 0.0) || !(inner_radius_ < outer_radius_)) {
        throw InvalidInput("PlotCloud: need 0 < inner_radius < outer_radius");
    }
    const double r2 = outer_radius_ * outer_radius_ * (1.0 + 1e-12);
    for (auto& r : returns_) {
        if (!std::isfinite(r.height)) {
            throw InvalidInput("PlotCloud: non-finite return height in plot " + plot_id_);
        }
        if (r.intensity < 0.0) {
            throw InvalidInput("PlotCloud: negative intensity in plot " + plot_id_);
        }
        if (squared_distance({r.x, r.y}, center_) > r2) {
            throw InvalidInput("PlotCloud: return outside the outer radius in plot " + plot_id_);
        }
        if (r.height < kGroundCut) r.height = 0.0;
    }
}

bool PlotCloud::within_inner(const PulseReturn& r) const {
    return squared_distance({r.x, r.y}, center_) <= inner_radius_ * inner_radius_;
}

double Chm::hmax() const {
    double m = 0.0;
    for (std::size_t i = 0; i < heights.size(); ++i) {
        if (mask[i] && heights[i] > m) m = heights[i];
    }
    return m;
}

std::size_t ThresholdedChm::masked_count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m != 0;
    return n;
}

namespace {

double median_of(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Chm build_chm(const PlotCloud& cloud, double pixel_size) {
    if (cloud.returns().empty()) throw InsufficientData("build_chm: plot cloud has no returns");
    if (!(pixel_size > 0.0)) throw InvalidInput("build_chm: pixel_size must be positive");
    if (pixel_size > cloud.inner_radius()) {
        throw InvalidInput("build_chm: pixel_size larger than the inner radius");
    }

    Chm chm;
    chm.pixel_size = pixel_size;
    const double side = 2.0 * cloud.outer_radius();
    chm.rows = chm.cols = static_cast<int>(std::ceil(side / pixel_size - 1e-9));
    chm.origin = {cloud.center().x - cloud.outer_radius(), cloud.center().y - cloud.outer_radius()};

    const std::size_t n = static_cast<std::size_t>(chm.rows) * chm.cols;
    chm.heights.assign(n, 0.0);
    chm.valid.assign(n, 0);
    chm.mask.assign(n, 0);
    std::vector<std::uint8_t> has(n, 0);

    const double outer2 = cloud.outer_radius() * cloud.outer_radius();
    const double inner2 = cloud.inner_radius() * cloud.inner_radius();
    for (int r = 0; r < chm.rows; ++r) {
        for (int c = 0; c < chm.cols; ++c) {
            const double d2 = squared_distance(chm.pixel_center(r, c), cloud.center());
            if (d2 <= outer2) chm.valid[chm.idx(r, c)] = 1;
            if (d2 <= inner2) chm.mask[chm.idx(r, c)] = 1;
        }
    }

    for (const auto& ret : cloud.returns()) {
        if (ret.return_class != ReturnClass::first) continue;
        int c = static_cast<int>(std::floor((ret.x - chm.origin.x) / pixel_size));
        int r = static_cast<int>(std::floor((ret.y - chm.origin.y) / pixel_size));
        c = std::clamp(c, 0, chm.cols - 1);
        r = std::clamp(r, 0, chm.rows - 1);
        const std::size_t i = chm.idx(r, c);
        if (!has[i] || ret.height > chm.heights[i]) chm.heights[i] = ret.height;
        has[i] = 1;
    }

    // Iterative hole fill: each pass assigns every empty valid pixel the
    // median of its non-empty 8-neighbors, computed synchronously from the
    // previous pass so the result is independent of scan order.
    bool progress = true;
    std::vector<double> next_val;
    std::vector<std::size_t> next_idx;
    std::vector<double> neigh;
    while (progress) {
        progress = false;
        next_val.clear();
        next_idx.clear();
        for (int r = 0; r < chm.rows; ++r) {
            for (int c = 0; c < chm.cols; ++c) {
                const std::size_t i = chm.idx(r, c);
                if (!chm.valid[i] || has[i]) continue;
                neigh.clear();
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int rr = r + dr;
                        const int cc = c + dc;
                        if (rr < 0 || rr >= chm.rows || cc < 0 || cc >= chm.cols) continue;
                        const std::size_t ni = chm.idx(rr, cc);
                        if (has[ni]) neigh.push_back(chm.heights[ni]);
                    }
                }
                if (!neigh.empty()) {
                    next_idx.push_back(i);
                    next_val.push_back(median_of(neigh));
                }
            }
        }
        for (std::size_t k = 0; k < next_idx.size(); ++k) {
            chm.heights[next_idx[k]] = next_val[k];
            has[next_idx[k]] = 1;
            progress = true;
        }
        bool any_empty = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (chm.valid[i] && !has[i]) {
                any_empty = true;
                break;
            }
        }
        if (!any_empty) break;
    }
    // remaining holes (no seed reachable) stay at ground level

    return chm;
}

ThresholdedChm threshold_chm(const Chm& chm, double q) {
    if (!(q > 0.0) || !(q < 1.0)) throw InvalidInput("threshold_chm: q must be in (0, 1)");
    const double hmax = chm.hmax();
    if (!(hmax > 0.0)) throw DegenerateCanopy("threshold_chm: hmax is 0, nothing to threshold");

    ThresholdedChm t;
    t.rows = chm.rows;
    t.cols = chm.cols;
    t.pixel_size = chm.pixel_size;
    t.level_q = q;
    t.mask = chm.mask;
    t.bits.assign(chm.heights.size(), 0);
    const double cut = q * hmax;
    for (std::size_t i = 0; i < chm.heights.size(); ++i) {
        if (t.mask[i] && chm.heights[i] >= cut) t.bits[i] = 1;
    }
    return t;
}

}  // namespace forstruct

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forstruct/window.hpp"

namespace forstruct {

enum class ReturnClass { first, intermediate, last };

ReturnClass return_class_from_string(const std::string& s);
std::string to_string(ReturnClass c);

struct PulseReturn {
    double x = 0.0;
    double y = 0.0;
    double height = 0.0;     // m above ground, normalized
    double intensity = 0.0;  // dimensionless, >= 0
    ReturnClass return_class = ReturnClass::first;
};

// Pulse returns of one plot, clipped to a circular footprint. Construction
// normalizes heights: returns below 1.3 m are set to ground level.
class PlotCloud {
public:
    PlotCloud(std::string plot_id, std::vector<PulseReturn> returns, Point center,
              double outer_radius = 12.0, double inner_radius = 9.0);

    const std::string& plot_id() const { return plot_id_; }
    const std::vector<PulseReturn>& returns() const { return returns_; }
    Point center() const { return center_; }
    double outer_radius() const { return outer_radius_; }
    double inner_radius() const { return inner_radius_; }

    bool within_inner(const PulseReturn& r) const;

    static constexpr double kGroundCut = 1.3;  // m

private:
    std::string plot_id_;
    std::vector<PulseReturn> returns_;
    Point center_;
    double outer_radius_;
    double inner_radius_;
};

// Canopy height model raster over a plot. Row-major from the lower-left
// corner; valid marks pixels inside the build (outer) circle and mask the
// pixels inside the inner feature circle.
struct Chm {
    int rows = 0;
    int cols = 0;
    double pixel_size = 0.0;
    Point origin;  // lower-left corner
    std::vector<double> heights;
    std::vector<std::uint8_t> valid;
    std::vector<std::uint8_t> mask;

    std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * cols + c; }
    Point pixel_center(int r, int c) const {
        return {origin.x + (c + 0.5) * pixel_size, origin.y + (r + 0.5) * pixel_size};
    }

    // Maximum height over masked-in pixels; 0 for a degenerate canopy.
    double hmax() const;
};

// Binary canopy/gap raster at a threshold level q * hmax. bits is defined
// on masked-in pixels only; 1 = canopy patch, 0 = gap.
struct ThresholdedChm {
    int rows = 0;
    int cols = 0;
    double pixel_size = 0.0;
    double level_q = 0.0;
    std::vector<std::uint8_t> bits;
    std::vector<std::uint8_t> mask;

    std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * cols + c; }
    std::size_t masked_count() const;
};

// Rasterizes the maximum first-return height per pixel and fills empty
// masked pixels with the median of their non-empty 8-neighbors, iterating
// synchronous passes until nothing changes; leftover holes become 0.
Chm build_chm(const PlotCloud& cloud, double pixel_size);

// bits = 1 where height >= q * hmax on masked-in pixels.
ThresholdedChm threshold_chm(const Chm& chm, double q);

}  // namespace forstruct

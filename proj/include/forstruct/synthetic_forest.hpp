#pragma once

#include <cstdint>
#include <vector>

#include "forstruct/chm.hpp"
#include "forstruct/point_pattern.hpp"

namespace forstruct {

// Configuration of a simulated stand: the tree point process, the height
// marking model and the crown geometry used for pulse-return simulation.
struct StandSpec {
    enum class Process { poisson, matern2, thomas };

    Process process = Process::poisson;
    Window window = Window::disc({0.0, 0.0}, 9.0);

    double lambda = 0.1;  // Poisson intensity / Matern II proposal intensity, per m^2

    double hardcore = 1.5;  // Matern II inhibition distance, m

    double parent_lambda = 0.02;  // Thomas parent intensity, per m^2
    double mean_offspring = 5.0;  // Thomas Poisson offspring mean
    double sigma = 0.7;           // Thomas Gaussian dispersal sd, m

    double height_mean = 15.0;  // truncated-normal tree heights, m
    double height_sd = 3.0;
    double height_min = 1.3;

    double crown_coef = 0.15;     // crown radius = crown_coef * tree height
    double noise_sd = 0.1;        // first-return height noise sd, m (clamped at 3 sd)
    double ground_fraction = 0.4; // share of last returns forced to ground level

    void validate() const;
};

// One realization of the stand's tree point process. Deterministic under
// a fixed seed. Sets *low_count_warning (if given) when the expected
// point count is below 2.
PointPattern simulate_pattern(const StandSpec& spec, std::uint64_t seed,
                              bool* low_count_warning = nullptr);

// Truncated-normal heights for n trees.
std::vector<double> mark_heights(std::size_t n, const StandSpec& spec, std::uint64_t seed);

// Cone crown surface height at a ground location: each tree is a cone
// with apex at its height and base radius crown_coef * height at 1.3 m.
double crown_surface(const Point& at, const std::vector<Point>& trees,
                     const std::vector<double>& heights, double crown_coef);

// Poisson-scattered pulses over the outer circle around the window center.
// First returns sample the crown surface plus clamped Gaussian noise;
// last returns are ground hits with probability ground_fraction and crown
// hits otherwise. Intensities are uniform on [10, 100].
PlotCloud simulate_cloud(const std::string& plot_id, const PointPattern& pattern,
                         const std::vector<double>& heights, const StandSpec& spec,
                         double pulse_density, std::uint64_t seed,
                         double outer_radius = 12.0, double inner_radius = 9.0);

}  // namespace forstruct

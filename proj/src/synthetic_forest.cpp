#include "forstruct/synthetic_forest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "forstruct/common.hpp"

namespace forstruct {

void StandSpec::validate() const {
    if (!(lambda > 0.0)) throw InvalidInput("StandSpec: lambda must be positive");
    if (hardcore < 0.0) throw InvalidInput("StandSpec: hardcore distance must be >= 0");
    if (process == Process::thomas) {
        if (!(parent_lambda > 0.0) || !(mean_offspring > 0.0)) {
            throw InvalidInput("StandSpec: Thomas rates must be positive");
        }
        if (!(sigma > 0.0)) throw InvalidInput("StandSpec: Thomas dispersal sd must be positive");
    }
    if (!(height_mean > 0.0) || !(height_sd >= 0.0)) {
        throw InvalidInput("StandSpec: bad height model");
    }
    if (!(crown_coef > 0.0)) throw InvalidInput("StandSpec: crown coefficient must be positive");
}

namespace {

Point uniform_in_window(const Window& w, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (w.shape() == Window::Shape::disc) {
        const double r = w.disc_radius() * std::sqrt(unit(rng));
        const double a = 2.0 * M_PI * unit(rng);
        return {w.disc_center().x + r * std::cos(a), w.disc_center().y + r * std::sin(a)};
    }
    const auto& b = w.rect();
    return {b.x0 + (b.x1 - b.x0) * unit(rng), b.y0 + (b.y1 - b.y0) * unit(rng)};
}

std::vector<Point> poisson_points(const Window& w, double lambda, std::mt19937_64& rng) {
    std::poisson_distribution<int> count(lambda * w.area());
    const int n = count(rng);
    std::vector<Point> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(uniform_in_window(w, rng));
    return pts;
}

// Matern II: Poisson proposals with uniform age marks; a proposal survives
// when no other proposal within the hard-core distance has a smaller mark.
std::vector<Point> matern2_points(const Window& w, double lambda, double h,
                                  std::mt19937_64& rng) {
    std::vector<Point> proposals = poisson_points(w, lambda, rng);
    std::vector<double> age(proposals.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& a : age) a = unit(rng);

    std::vector<Point> kept;
    const double h2 = h * h;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        bool survives = true;
        for (std::size_t j = 0; j < proposals.size(); ++j) {
            if (i == j) continue;
            if (squared_distance(proposals[i], proposals[j]) < h2 &&
                (age[j] < age[i] || (age[j] == age[i] && j < i))) {
                survives = false;
                break;
            }
        }
        if (survives) kept.push_back(proposals[i]);
    }
    return kept;
}

// Thomas: Poisson parents on the window dilated by 4 sigma, Poisson(mu)
// Gaussian-dispersed offspring clipped to the window.
std::vector<Point> thomas_points(const Window& w, const StandSpec& spec, std::mt19937_64& rng) {
    const BoundingBox b = w.bbox();
    const double pad = 4.0 * spec.sigma;
    const Window dilated = Window::rectangle(b.x0 - pad, b.x1 + pad, b.y0 - pad, b.y1 + pad);
    const std::vector<Point> parents = poisson_points(dilated, spec.parent_lambda, rng);

    std::poisson_distribution<int> litter(spec.mean_offspring);
    std::normal_distribution<double> disperse(0.0, spec.sigma);
    std::vector<Point> pts;
    for (const auto& parent : parents) {
        const int n = litter(rng);
        for (int i = 0; i < n; ++i) {
            const Point p{parent.x + disperse(rng), parent.y + disperse(rng)};
            if (w.contains(p)) pts.push_back(p);
        }
    }
    return pts;
}

double expected_count(const StandSpec& spec) {
    switch (spec.process) {
        case StandSpec::Process::poisson: return spec.lambda * spec.window.area();
        case StandSpec::Process::matern2: {
            const double x = spec.hardcore > 0.0
                                 ? (1.0 - std::exp(-spec.lambda * M_PI * spec.hardcore *
                                                   spec.hardcore)) /
                                       (M_PI * spec.hardcore * spec.hardcore)
                                 : spec.lambda;
            return x * spec.window.area();
        }
        case StandSpec::Process::thomas:
            return spec.parent_lambda * spec.mean_offspring * spec.window.area();
    }
    return 0.0;
}

}  // namespace

PointPattern simulate_pattern(const StandSpec& spec, std::uint64_t seed,
                              bool* low_count_warning) {
    spec.validate();
    std::mt19937_64 rng(seed);
    if (low_count_warning) *low_count_warning = expected_count(spec) < 2.0;

    std::vector<Point> pts;
    switch (spec.process) {
        case StandSpec::Process::poisson:
            pts = poisson_points(spec.window, spec.lambda, rng);
            break;
        case StandSpec::Process::matern2:
            pts = matern2_points(spec.window, spec.lambda, spec.hardcore, rng);
            break;
        case StandSpec::Process::thomas:
            pts = thomas_points(spec.window, spec, rng);
            break;
    }
    return PointPattern(std::move(pts), spec.window);
}

std::vector<double> mark_heights(std::size_t n, const StandSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(spec.height_mean, spec.height_sd);
    std::vector<double> h(n);
    for (auto& v : h) {
        do {
            v = normal(rng);
        } while (v < spec.height_min);
    }
    return h;
}

double crown_surface(const Point& at, const std::vector<Point>& trees,
                     const std::vector<double>& heights, double crown_coef) {
    double surface = 0.0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const double h = heights[i];
        const double crown_r = crown_coef * h;
        if (crown_r <= 0.0 || h <= PlotCloud::kGroundCut) continue;
        const double s = std::sqrt(squared_distance(at, trees[i]));
        if (s >= crown_r) continue;
        const double z = h - s * (h - PlotCloud::kGroundCut) / crown_r;
        surface = std::max(surface, z);
    }
    return surface;
}

PlotCloud simulate_cloud(const std::string& plot_id, const PointPattern& pattern,
                         const std::vector<double>& heights, const StandSpec& spec,
                         double pulse_density, std::uint64_t seed, double outer_radius,
                         double inner_radius) {
    spec.validate();
    if (!(pulse_density > 0.0)) throw InvalidInput("simulate_cloud: pulse density must be > 0");
    if (pattern.size() != heights.size()) {
        throw InvalidInput("simulate_cloud: pattern and height marks must align");
    }

    Point center{0.0, 0.0};
    if (pattern.window().shape() == Window::Shape::disc) {
        center = pattern.window().disc_center();
    } else {
        const auto& b = pattern.window().bbox();
        center = {0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)};
    }

    std::mt19937_64 rng(seed);
    const double area = M_PI * outer_radius * outer_radius;
    std::poisson_distribution<int> count(pulse_density * area);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, spec.noise_sd);
    std::uniform_real_distribution<double> intensity(10.0, 100.0);

    const Window footprint = Window::disc(center, outer_radius);
    const int n_pulses = count(rng);
    std::vector<PulseReturn> returns;
    returns.reserve(2 * static_cast<std::size_t>(n_pulses));
    const double clamp = 3.0 * spec.noise_sd;
    for (int i = 0; i < n_pulses; ++i) {
        const Point at = uniform_in_window(footprint, rng);
        const double surface = crown_surface(at, pattern.points(), heights, spec.crown_coef);

        PulseReturn first;
        first.x = at.x;
        first.y = at.y;
        first.height = std::max(0.0, surface + std::clamp(noise(rng), -clamp, clamp));
        first.intensity = intensity(rng);
        first.return_class = ReturnClass::first;
        returns.push_back(first);

        PulseReturn last = first;
        last.return_class = ReturnClass::last;
        if (unit(rng) < spec.ground_fraction || surface <= 0.0) {
            last.height = 0.0;
        } else {
            last.height = std::max(0.0, surface + std::clamp(noise(rng), -clamp, clamp));
        }
        last.intensity = intensity(rng);
        returns.push_back(last);
    }
    return PlotCloud(plot_id, std::move(returns), center, outer_radius, inner_radius);
}

}  // namespace forstruct

#include "forstruct/curves.hpp"

#include <cmath>
#include <cstddef>

#include "forstruct/common.hpp"

namespace forstruct {

namespace {

// Index of the last grid point with r <= r_t (tolerating fp slop on the
// upper limit). The integration range must contain at least one step.
std::size_t upper_index(const std::vector<double>& r, double r_t) {
    if (!(r_t > 0.0)) throw InvalidInput("curve integral: r_t must be positive");
    const double hi = r_t * (1.0 + 1e-9) + 1e-12;
    if (r.back() < r_t * (1.0 - 1e-9) - 1e-12) {
        throw InvalidInput("curve integral: r_t exceeds the curve grid");
    }
    std::size_t k = r.size() - 1;
    while (k > 0 && r[k] > hi) --k;
    if (k == 0) throw InvalidInput("curve integral: r_t below the first grid step");
    return k;
}

void require_shared_grid(const CurveOnGrid& f, const CurveOnGrid& g) {
    if (f.r.size() != g.r.size()) throw GridMismatch("curves have different grid sizes");
    for (std::size_t i = 0; i < f.r.size(); ++i) {
        if (f.r[i] != g.r[i]) throw GridMismatch("curves are not on a shared r grid");
    }
}

}  // namespace

CurveOnGrid::CurveOnGrid(std::vector<double> r_grid, std::vector<double> vals)
    : r(std::move(r_grid)), values(std::move(vals)) {
    if (r.empty() || r.size() != values.size()) {
        throw InvalidInput("CurveOnGrid: grid and values must be non-empty and parallel");
    }
    if (r.front() != 0.0) throw InvalidInput("CurveOnGrid: grid must start at 0");
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i] > r[i - 1])) throw InvalidInput("CurveOnGrid: grid must be strictly increasing");
    }
}

bool CurveOnGrid::is_sub_cdf(double tol) const {
    if (values.front() != 0.0) return false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < -tol || values[i] > 1.0 + tol) return false;
        if (i > 0 && values[i] < values[i - 1] - tol) return false;
    }
    return true;
}

std::vector<double> uniform_grid(double r_max, double step) {
    if (!(r_max > 0.0) || !(step > 0.0)) {
        throw InvalidInput("uniform_grid: r_max and step must be positive");
    }
    const auto n = static_cast<std::size_t>(std::ceil(r_max / step - 1e-9));
    std::vector<double> r(n + 1);
    for (std::size_t i = 0; i <= n; ++i) r[i] = static_cast<double>(i) * step;
    return r;
}

CurveOnGrid f_theo_csr(double lambda, const std::vector<double>& r_grid) {
    if (lambda < 0.0) throw InvalidInput("f_theo_csr: lambda must be non-negative");
    std::vector<double> v(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        v[i] = 1.0 - std::exp(-lambda * M_PI * r_grid[i] * r_grid[i]);
    }
    return CurveOnGrid(r_grid, std::move(v));
}

double d_integrated(const CurveOnGrid& f, const CurveOnGrid& f_ref, double r_t) {
    require_shared_grid(f, f_ref);
    const std::size_t k = upper_index(f.r, r_t);

    double max_abs = 0.0;
    double sign = 0.0;
    double integral = 0.0;
    double prev_sq = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double diff = f.values[i] - f_ref.values[i];
        const double a = std::fabs(diff);
        if (a > max_abs) {
            max_abs = a;
            sign = diff > 0.0 ? 1.0 : -1.0;
        }
        const double sq = diff * diff;
        if (i > 0) integral += 0.5 * (sq + prev_sq) * (f.r[i] - f.r[i - 1]);
        prev_sq = sq;
    }
    if (max_abs == 0.0) return 0.0;
    return sign * integral;
}

double d_kl(const CurveOnGrid& f, const CurveOnGrid& f_ref, double r_t) {
    require_shared_grid(f, f_ref);
    const std::size_t k = upper_index(f.r, r_t);

    double integral = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double fv = f.values[i];
        const double gv = f_ref.values[i];
        double term = 0.0;
        if (fv > 0.0) {
            if (gv <= 0.0) {
                throw DivergenceError("d_kl: f > 0 where the reference is 0");
            }
            term = fv * std::log(fv / gv);
        }
        if (i > 0) integral += 0.5 * (term + prev) * (f.r[i] - f.r[i - 1]);
        prev = term;
    }
    return integral;
}

}  // namespace forstruct

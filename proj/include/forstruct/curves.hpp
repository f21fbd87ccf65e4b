#pragma once

#include <vector>

namespace forstruct {

// A function sampled on a strictly increasing distance grid starting at 0.
// Distribution-valued curves (empty-space functions) are non-decreasing
// with values in [0, 1].
struct CurveOnGrid {
    std::vector<double> r;       // m, strictly increasing, r.front() == 0
    std::vector<double> values;  // same length as r

    CurveOnGrid() = default;
    CurveOnGrid(std::vector<double> r_grid, std::vector<double> vals);

    std::size_t size() const { return r.size(); }

    // Checks the sub-CDF invariants: starts at 0, non-decreasing, <= 1.
    bool is_sub_cdf(double tol = 1e-12) const;
};

// Builds the uniform grid {0, step, 2*step, ..., n*step} covering [0, r_max].
std::vector<double> uniform_grid(double r_max, double step);

// CSR reference: F(r) = 1 - exp(-lambda * pi * r^2).
CurveOnGrid f_theo_csr(double lambda, const std::vector<double>& r_grid);

// Signed integrated squared difference of f against f_ref on [0, r_t]
// (trapezoidal). The sign is that of f - f_ref at the argmax of
// |f - f_ref|; ties across grid points resolve to the smallest r.
// Positive values indicate f above the reference (regularity), negative
// below (clustering). Returns exactly 0 when the curves are identical.
double d_integrated(const CurveOnGrid& f, const CurveOnGrid& f_ref, double r_t);

// KL-type divergence: trapezoidal integral of f(r) * log(f(r) / f_ref(r))
// on [0, r_t], with the 0 * log(0/x) = 0 convention. Grid points where
// both curves are zero (the shared left tail) contribute nothing; f > 0
// where f_ref = 0 beyond that raises DivergenceError.
double d_kl(const CurveOnGrid& f, const CurveOnGrid& f_ref, double r_t);

}  // namespace forstruct

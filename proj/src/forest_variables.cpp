#include "forstruct/forest_variables.hpp"

#include <algorithm>
#include <cmath>

#include "forstruct/common.hpp"

namespace forstruct {

std::string to_string(StructureClass c) {
    switch (c) {
        case StructureClass::regular: return "regular";
        case StructureClass::random_: return "random";
        case StructureClass::clustered: return "clustered";
    }
    return "random";
}

namespace {

constexpr double kShapeCap = 100.0;
constexpr double kGradTol = 1e-8;

// Profile log-likelihood gradient in the shape parameter (per observation
// count): g(k) = sum(x^k ln x)/sum(x^k) - 1/k - mean(ln x).
double shape_gradient(const std::vector<double>& x, const std::vector<double>& logx,
                      double mean_logx, double k) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xk = std::pow(x[i], k);
        num += xk * logx[i];
        den += xk;
    }
    return num / den - 1.0 / k - mean_logx;
}

}  // namespace

WeibullFit weibull_fit(const std::vector<double>& dbh) {
    if (dbh.size() < kMinPlotTrees) {
        throw InsufficientData("weibull_fit: need at least 10 observations");
    }
    for (double v : dbh) {
        if (!(v > 0.0)) throw InvalidInput("weibull_fit: observations must be positive");
    }

    const double n = static_cast<double>(dbh.size());
    std::vector<double> logx(dbh.size());
    double mean_logx = 0.0;
    for (std::size_t i = 0; i < dbh.size(); ++i) {
        logx[i] = std::log(dbh[i]);
        mean_logx += logx[i];
    }
    mean_logx /= n;

    double var_logx = 0.0;
    for (double lx : logx) var_logx += (lx - mean_logx) * (lx - mean_logx);
    var_logx /= n;
    if (var_logx == 0.0) {
        throw ConvergenceError("weibull_fit: all observations equal, shape diverges");
    }

    // g is increasing in k with a single root; bracket then Newton with
    // a bisection safeguard. Start from the Menon-style moment guess.
    double k = std::clamp(M_PI / std::sqrt(6.0 * var_logx), 1e-2, kShapeCap);
    double lo = 1e-3;
    double hi = kShapeCap;
    const double g_hi = shape_gradient(dbh, logx, mean_logx, hi);
    if (g_hi < 0.0) {
        throw ConvergenceError("weibull_fit: shape exceeds cap " + std::to_string(kShapeCap));
    }

    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        const double g = shape_gradient(dbh, logx, mean_logx, k);
        if (std::fabs(g) * n < kGradTol) {
            converged = true;
            break;
        }
        if (g > 0.0) hi = k;
        else lo = k;
        const double eps = std::max(1e-8, 1e-7 * k);
        const double dg = (shape_gradient(dbh, logx, mean_logx, k + eps) - g) / eps;
        double next = dg > 0.0 ? k - g / dg : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        k = next;
    }
    if (!converged) throw ConvergenceError("weibull_fit: shape iteration did not converge");

    double mean_xk = 0.0;
    for (double v : dbh) mean_xk += std::pow(v, k);
    mean_xk /= n;
    return {std::pow(mean_xk, 1.0 / k), k};
}

StructureClass classify_r(double r_index) {
    if (r_index < 0.85) return StructureClass::clustered;
    if (r_index > 1.15) return StructureClass::regular;
    return StructureClass::random_;
}

StructureClass classify_fd(double fd) {
    if (fd < -15.0) return StructureClass::clustered;
    if (fd > 15.0) return StructureClass::regular;
    return StructureClass::random_;
}

StructureClassPair structure_classify(double r_index, double fd) {
    return {classify_r(r_index), classify_fd(fd)};
}

PlotVariables plot_variables(const std::string& plot_id, const std::vector<TreeRecord>& trees,
                             const Window& window, int dev_class) {
    if (trees.size() < kMinPlotTrees) {
        throw InsufficientData("plot_variables: plot " + plot_id + " has fewer than 10 trees");
    }
    std::vector<Point> pts;
    std::vector<double> dbh;
    pts.reserve(trees.size());
    dbh.reserve(trees.size());
    for (const auto& t : trees) {
        pts.push_back({t.x, t.y});
        dbh.push_back(t.dbh);
    }
    const PointPattern pattern(std::move(pts), window);

    PlotVariables v;
    v.plot_id = plot_id;
    v.dev_class = dev_class;
    v.r_index = aggregation_index(pattern);
    v.fd = fd_summary(pattern, 4.5);
    try {
        const WeibullFit w = weibull_fit(dbh);
        v.weibull_scale = w.scale;
        v.weibull_shape = w.shape;
    } catch (const ConvergenceError&) {
        v.weibull_scale = kMissing;
        v.weibull_shape = kMissing;
    }
    const auto classes = structure_classify(v.r_index, v.fd);
    v.r_class = classes.by_r;
    v.fd_class = classes.by_fd;
    return v;
}

}  // namespace forstruct

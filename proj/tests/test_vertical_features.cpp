#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "forstruct/common.hpp"
#include "forstruct/vertical_features.hpp"
#include "oracle_helpers.hpp"

using namespace forstruct;

namespace {

PulseReturn make_return(double x, double y, double h, ReturnClass cls, double intensity = 40.0) {
    PulseReturn r;
    r.x = x;
    r.y = y;
    r.height = h;
    r.intensity = intensity;
    r.return_class = cls;
    return r;
}

PlotCloud random_cloud(std::size_t n_first, std::size_t n_last, std::size_t n_mid,
                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(-6.0, 6.0);
    std::uniform_real_distribution<double> h(0.0, 30.0);
    std::uniform_real_distribution<double> inten(10.0, 100.0);
    std::vector<PulseReturn> rets;
    for (std::size_t i = 0; i < n_first; ++i)
        rets.push_back(make_return(pos(rng), pos(rng), h(rng), ReturnClass::first, inten(rng)));
    for (std::size_t i = 0; i < n_last; ++i)
        rets.push_back(make_return(pos(rng), pos(rng), h(rng), ReturnClass::last, inten(rng)));
    for (std::size_t i = 0; i < n_mid; ++i)
        rets.push_back(
            make_return(pos(rng), pos(rng), h(rng), ReturnClass::intermediate, inten(rng)));
    return PlotCloud("p", std::move(rets), {0, 0});
}

}  // namespace

TEST_CASE("constant-height sample") {
    std::vector<PulseReturn> rets;
    for (int i = 0; i < 5; ++i) {
        rets.push_back(make_return(i * 0.5, 0.0, 10.0, ReturnClass::first));
        rets.push_back(make_return(i * 0.5, 1.0, 10.0, ReturnClass::last));
    }
    const auto f = compute_vertical(PlotCloud("p", rets, {0, 0}));
    CHECK(f[1] == 10.0);  // canopy height
    CHECK(f[2] == 10.0);  // first min
    CHECK(f[3] == 10.0);  // first max
    CHECK(f[4] == 10.0);  // first mean
    CHECK(f[5] == 0.0);   // first sd
    CHECK(is_missing(f[6]));  // skewness degenerate
    CHECK(is_missing(f[7]));  // kurtosis degenerate
    CHECK(f[8] == 0.0);   // range
    for (std::size_t id = 17; id <= 27; ++id) CHECK(f[id] == 10.0);  // percentiles
    CHECK(f[16] == 1.0);  // all returns canopy
}

TEST_CASE("hand arithmetic on a tiny first-return sample") {
    std::vector<PulseReturn> rets{
        make_return(0, 0, 1.3, ReturnClass::first), make_return(1, 0, 2.0, ReturnClass::first),
        make_return(2, 0, 3.0, ReturnClass::first), make_return(3, 0, 4.0, ReturnClass::first),
        make_return(0, 1, 5.0, ReturnClass::last), make_return(1, 1, 6.0, ReturnClass::last)};
    const auto f = compute_vertical(PlotCloud("p", rets, {0, 0}));
    CHECK(f[2] == doctest::Approx(1.3));
    CHECK(f[3] == doctest::Approx(4.0));
    CHECK(f[4] == doctest::Approx(2.575));
    CHECK(f[8] == doctest::Approx(2.7));
    CHECK(f[1] == doctest::Approx(6.0));
}

TEST_CASE("all 62 slots match an independent reimplementation") {
    std::mt19937_64 rng(404);
    const PlotCloud cloud = random_cloud(500, 400, 100, rng);
    const auto f = compute_vertical(cloud);

    // oracle recomputation from scratch
    std::vector<double> first, last;
    std::vector<double> first_int, last_int;
    std::size_t n_all = 0, n_canopy = 0;
    double hmax = 0;
    for (const auto& r : cloud.returns()) {
        if (std::hypot(r.x, r.y) > 9.0) continue;
        ++n_all;
        if (r.height >= 1.3) ++n_canopy;
        hmax = std::max(hmax, r.height);
        if (r.return_class == ReturnClass::first) {
            first.push_back(r.height);
            first_int.push_back(r.intensity);
        }
        if (r.return_class == ReturnClass::last) {
            last.push_back(r.height);
            last_int.push_back(r.intensity);
        }
    }
    auto mean_of = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / v.size();
    };

    CHECK(f[1] == doctest::Approx(hmax).epsilon(1e-12));
    const auto mo_f = oracle::direct_moments(first);
    const auto mo_l = oracle::direct_moments(last);
    CHECK(f[2] == *std::min_element(first.begin(), first.end()));
    CHECK(f[3] == *std::max_element(first.begin(), first.end()));
    CHECK(f[4] == doctest::Approx(mo_f.mean).epsilon(1e-12));
    CHECK(f[5] == doctest::Approx(mo_f.sd).epsilon(1e-12));
    CHECK(f[6] == doctest::Approx(mo_f.skew).epsilon(1e-9));
    CHECK(f[7] == doctest::Approx(mo_f.kurt).epsilon(1e-9));
    CHECK(f[8] == doctest::Approx(f[3] - f[2]).epsilon(1e-12));
    CHECK(f[11] == doctest::Approx(mo_l.mean).epsilon(1e-12));
    CHECK(f[12] == doctest::Approx(mo_l.sd).epsilon(1e-12));
    CHECK(f[13] == doctest::Approx(mo_l.skew).epsilon(1e-9));
    CHECK(f[14] == doctest::Approx(mo_l.kurt).epsilon(1e-9));
    CHECK(f[16] == doctest::Approx(static_cast<double>(n_canopy) / n_all).epsilon(1e-12));

    for (std::size_t i = 0; i < kPercentLevels.size(); ++i) {
        CHECK(f[17 + i] ==
              doctest::Approx(oracle::quantile7(first, kPercentLevels[i] / 100.0)).epsilon(1e-12));
        CHECK(f[28 + i] ==
              doctest::Approx(oracle::quantile7(last, kPercentLevels[i] / 100.0)).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < kPercentLevels.size(); ++i) {
        const double lo = *std::min_element(first.begin(), first.end());
        const double hi = *std::max_element(first.begin(), first.end());
        const double cut = lo + (hi - lo) * kPercentLevels[i] / 100.0;
        std::size_t below = 0;
        for (double v : first) below += v <= cut;
        CHECK(f[39 + i] ==
              doctest::Approx(static_cast<double>(below) / first.size()).epsilon(1e-12));
    }
    CHECK(f[61] == doctest::Approx(mean_of(first_int)).epsilon(1e-12));
    CHECK(f[62] == doctest::Approx(mean_of(last_int)).epsilon(1e-12));
}

TEST_CASE("ordering invariants on random clouds") {
    std::mt19937_64 rng(505);
    for (int rep = 0; rep < 10; ++rep) {
        const auto f = compute_vertical(random_cloud(30 + rep * 20, 25 + rep * 15, 10, rng));
        for (std::size_t i = 1; i < 11; ++i) {
            CHECK(f[17 + i] >= f[16 + i]);  // first percentiles non-decreasing
            CHECK(f[28 + i] >= f[27 + i]);  // last percentiles non-decreasing
            CHECK(f[39 + i] >= f[38 + i]);  // foliage cumulative
            CHECK(f[50 + i] >= f[49 + i]);
        }
        CHECK(f[49] <= 1.0);
        CHECK(f[60] <= 1.0);
        CHECK(f[8] == f[3] - f[2]);
        CHECK(f[15] == f[10] - f[9]);
        CHECK(f[16] >= 0.0);
        CHECK(f[16] <= 1.0);
    }
}

TEST_CASE("intermediate returns only count in the canopy proportion") {
    std::vector<PulseReturn> rets{
        make_return(0, 0, 10.0, ReturnClass::first), make_return(1, 0, 12.0, ReturnClass::first),
        make_return(0, 1, 8.0, ReturnClass::last), make_return(1, 1, 9.0, ReturnClass::last),
        make_return(2, 0, 0.5, ReturnClass::intermediate)};
    const auto f = compute_vertical(PlotCloud("p", rets, {0, 0}));
    CHECK(f[16] == doctest::Approx(4.0 / 5.0));  // the low intermediate dilutes
    CHECK(f[4] == doctest::Approx(11.0));        // but not the first-return mean
}

TEST_CASE("returns outside the inner circle are ignored") {
    std::vector<PulseReturn> rets{
        make_return(0, 0, 10.0, ReturnClass::first), make_return(1, 0, 12.0, ReturnClass::first),
        make_return(0, 1, 8.0, ReturnClass::last), make_return(1, 1, 9.0, ReturnClass::last),
        make_return(11.0, 0, 30.0, ReturnClass::first)};  // in the 12 m ring
    const auto f = compute_vertical(PlotCloud("p", rets, {0, 0}));
    CHECK(f[3] == doctest::Approx(12.0));
    CHECK(f[1] == doctest::Approx(12.0));
}

TEST_CASE("insufficient returns name the deficient class") {
    std::vector<PulseReturn> only_first{make_return(0, 0, 10.0, ReturnClass::first),
                                        make_return(1, 0, 12.0, ReturnClass::first),
                                        make_return(2, 0, 9.0, ReturnClass::last)};
    CHECK_THROWS_WITH_AS(compute_vertical(PlotCloud("p", only_first, {0, 0})),
                         doctest::Contains("last returns"), InsufficientData);
    std::vector<PulseReturn> only_last{make_return(0, 0, 10.0, ReturnClass::last),
                                       make_return(1, 0, 12.0, ReturnClass::last)};
    CHECK_THROWS_WITH_AS(compute_vertical(PlotCloud("p", only_last, {0, 0})),
                         doctest::Contains("first returns"), InsufficientData);
}

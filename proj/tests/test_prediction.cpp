#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "forstruct/common.hpp"
#include "forstruct/prediction.hpp"
#include "oracle_helpers.hpp"

using namespace forstruct;

namespace {

FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double missing_rate = 0.0) {
    FeatureMatrix m;
    m.cols = cols;
    std::normal_distribution<double> g(5.0, 2.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t r = 0; r < rows; ++r) {
        m.plot_ids.push_back("p" + std::to_string(100 + r));
        for (std::size_t c = 0; c < cols; ++c) {
            m.values.push_back(u(rng) < missing_rate ? kMissing : g(rng));
        }
    }
    return m;
}

KnnModel small_model() {
    KnnModel model;
    model.selected = {0};
    model.weights = {1.0};
    model.k = 3;
    model.g = 1.0;
    model.train.cols = 1;
    model.train.plot_ids = {"a", "b", "c", "d"};
    model.train.values = {0.0, 1.0, 2.0, 4.0};
    model.response.kind = ResponseKind::continuous;
    model.response.cont = {10.0, 20.0, 40.0, 80.0};
    return model;
}

}  // namespace

TEST_CASE("standardization") {
    std::mt19937_64 rng(1);

    SUBCASE("training columns have mean 0 and sd 1 after transform") {
        const FeatureMatrix m = random_matrix(40, 6, rng, 0.1);
        const Standardizer s = Standardizer::fit(m);
        const FeatureMatrix z = s.transform(m);
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (!s.usable[c]) continue;
            double sum = 0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < m.rows(); ++r) {
                if (is_missing(m.at(r, c))) continue;
                sum += z.at(r, c);
                ++n;
            }
            const double mean = sum / n;
            double ss = 0;
            for (std::size_t r = 0; r < m.rows(); ++r) {
                if (is_missing(m.at(r, c))) continue;
                ss += (z.at(r, c) - mean) * (z.at(r, c) - mean);
            }
            CHECK(std::fabs(mean) < 1e-9);
            CHECK(std::fabs(std::sqrt(ss / (n - 1)) - 1.0) < 1e-9);
        }
    }
    SUBCASE("missing entries standardize to the training mean (0)") {
        FeatureMatrix m = random_matrix(10, 2, rng);
        m.at(3, 1) = kMissing;
        const Standardizer s = Standardizer::fit(m);
        const FeatureMatrix z = s.transform(m);
        CHECK(z.at(3, 1) == 0.0);
    }
    SUBCASE("constant columns are unusable, never divided by zero") {
        FeatureMatrix m = random_matrix(10, 3, rng);
        for (std::size_t r = 0; r < m.rows(); ++r) m.at(r, 2) = 7.7;
        const Standardizer s = Standardizer::fit(m);
        CHECK_FALSE(s.usable[2]);
        CHECK(s.usable[0]);
        const FeatureMatrix z = s.transform(m);
        for (std::size_t r = 0; r < m.rows(); ++r) CHECK(z.at(r, 2) == 0.0);
    }
}

TEST_CASE("knn distance") {
    KnnModel model;
    model.selected = {0, 1};
    model.weights = {2.0, 1.0};
    model.k = 1;
    const std::vector<double> a{1.0, 5.0, 9.0};
    const std::vector<double> b{4.0, 5.0, 0.0};

    SUBCASE("identical rows: 0") {
        CHECK(knn_distance(a, a, model) == 0.0);
    }
    SUBCASE("single feature hand arithmetic: weight 2, difference 3 gives 6") {
        KnnModel one;
        one.selected = {0};
        one.weights = {2.0};
        CHECK(knn_distance(a, b, one) == doctest::Approx(6.0));
    }
    SUBCASE("unselected columns are ignored") {
        CHECK(knn_distance(a, b, model) == doctest::Approx(6.0));
    }
    SUBCASE("matches a naive loop on random rows") {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> g(0.0, 1.0);
        KnnModel big;
        big.selected = {0, 2, 3, 5};
        big.weights = {1.0, 0.5, 3.0, 2.0};
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> x(6), y(6);
            for (auto& v : x) v = g(rng);
            for (auto& v : y) v = g(rng);
            double want = 0;
            for (std::size_t s = 0; s < big.selected.size(); ++s) {
                const double d = x[big.selected[s]] - y[big.selected[s]];
                want += big.weights[s] * big.weights[s] * d * d;
            }
            CHECK(knn_distance(x, y, big) == doctest::Approx(std::sqrt(want)).epsilon(1e-12));
        }
    }
}

TEST_CASE("knn prediction") {
    const KnnModel base = small_model();

    SUBCASE("k = 1 returns the nearest response for any g") {
        for (double g : {0.0, 0.5, 3.0}) {
            KnnModel m = base;
            m.k = 1;
            m.g = g;
            const std::vector<double> q{1.2};
            CHECK(knn_predict_continuous(q, m) == 20.0);
        }
    }
    SUBCASE("g = 0 gives the plain neighbor mean") {
        KnnModel m = base;
        m.g = 0.0;
        const std::vector<double> q{0.0};
        CHECK(knn_predict_continuous(q, m, 0) == doctest::Approx((20.0 + 40.0 + 80.0) / 3.0));
    }
    SUBCASE("hand case: distances {1,2,4}, g=1, responses {10,20,40} give 120/7") {
        KnnModel m;
        m.selected = {0};
        m.weights = {1.0};
        m.k = 3;
        m.g = 1.0;
        m.train.cols = 1;
        m.train.plot_ids = {"a", "b", "c"};
        m.train.values = {1.0, 2.0, 4.0};
        m.response.kind = ResponseKind::continuous;
        m.response.cont = {10.0, 20.0, 40.0};
        const std::vector<double> q{0.0};
        CHECK(knn_predict_continuous(q, m) == doctest::Approx(120.0 / 7.0).epsilon(1e-12));
    }
    SUBCASE("weights sum to one and prediction is a convex combination") {
        std::mt19937_64 rng(3);
        FeatureMatrix data = random_matrix(30, 4, rng);
        KnnModel m;
        m.selected = {0, 1, 2, 3};
        m.weights = {1.0, 2.0, 0.5, 1.5};
        m.k = 5;
        m.g = 1.7;
        m.train = data;
        m.response.kind = ResponseKind::continuous;
        std::normal_distribution<double> g(0.0, 10.0);
        for (std::size_t i = 0; i < 30; ++i) m.response.cont.push_back(g(rng));
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> q(4);
            for (auto& v : q) v = g(rng) / 5.0;
            const auto nn = k_nearest(q, m);
            const auto w = neighbor_weights(nn, m.g);
            double sum = 0;
            for (double x : w) sum += x;
            CHECK(std::fabs(sum - 1.0) < 1e-12);
            const double y = knn_predict_continuous(q, m);
            double lo = 1e300, hi = -1e300;
            for (const auto& [d, idx] : nn) {
                lo = std::min(lo, m.response.cont[idx]);
                hi = std::max(hi, m.response.cont[idx]);
            }
            CHECK(y >= lo - 1e-12);
            CHECK(y <= hi + 1e-12);
        }
    }
    SUBCASE("weight scaling invariance") {
        std::mt19937_64 rng(4);
        FeatureMatrix data = random_matrix(25, 3, rng);
        KnnModel m;
        m.selected = {0, 1, 2};
        m.weights = {1.0, 2.0, 3.0};
        m.k = 4;
        m.g = 2.0;
        m.train = data;
        m.response.kind = ResponseKind::continuous;
        std::normal_distribution<double> g(0.0, 1.0);
        for (std::size_t i = 0; i < 25; ++i) m.response.cont.push_back(g(rng));
        KnnModel scaled = m;
        for (auto& w : scaled.weights) w *= 17.0;
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> q(3);
            for (auto& v : q) v = g(rng);
            const auto a = k_nearest(q, m);
            const auto b = k_nearest(q, scaled);
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].second == b[i].second);
            CHECK(knn_predict_continuous(q, m) ==
                  doctest::Approx(knn_predict_continuous(q, scaled)).epsilon(1e-12));
        }
    }
    SUBCASE("zero-distance neighbors absorb all weight") {
        KnnModel m = base;
        m.g = 2.0;
        const std::vector<double> q{1.0};  // exactly at train row b
        CHECK(knn_predict_continuous(q, m) == doctest::Approx(20.0));
        // two exact matches share the weight
        KnnModel m2 = base;
        m2.g = 2.0;
        m2.train.values = {1.0, 1.0, 3.0, 4.0};
        CHECK(knn_predict_continuous(q, m2) == doctest::Approx(15.0));
    }
    SUBCASE("categorical vote with the smallest-code tie break") {
        KnnModel m;
        m.selected = {0};
        m.weights = {1.0};
        m.k = 2;
        m.g = 0.0;
        m.train.cols = 1;
        m.train.plot_ids = {"a", "b"};
        m.train.values = {1.0, 3.0};
        m.response.kind = ResponseKind::categorical;
        m.response.cat = {5, 4};
        const std::vector<double> q{2.0};
        CHECK(knn_predict_categorical(q, m) == 4);  // 0.5/0.5 tie -> smaller code
        m.response.cat = {5, 5};
        CHECK(knn_predict_categorical(q, m) == 5);
    }
    SUBCASE("not enough neighbors") {
        KnnModel m = small_model();
        m.k = 4;
        const std::vector<double> q{0.5};
        CHECK_THROWS_AS(knn_predict_continuous(q, m, 1), InsufficientData);
    }
}

TEST_CASE("leave-one-out exclusion") {
    std::mt19937_64 rng(5);
    FeatureMatrix data = random_matrix(20, 2, rng);
    KnnModel m;
    m.selected = {0, 1};
    m.weights = {1.0, 1.0};
    m.k = 3;
    m.g = 1.0;
    m.train = data;
    m.response.kind = ResponseKind::continuous;
    for (std::size_t i = 0; i < 20; ++i) m.response.cont.push_back(static_cast<double>(i));
    for (int i = 0; i < 20; ++i) {
        const auto nn = k_nearest(data.row(i), m, i);
        for (const auto& [d, idx] : nn) CHECK(idx != i);
    }
    const auto loo = loo_predict_continuous(m);
    CHECK(loo.size() == 20);
}

TEST_CASE("error matrices and metrics") {
    SUBCASE("perfect predictions") {
        const std::vector<int> y{1, 2, 3, 2, 1};
        const auto m = evaluate_categorical(y, y);
        CHECK(m.oa == 1.0);
        CHECK(m.kappa == 1.0);
        const auto c = evaluate_continuous({1.0, 2.0}, {1.0, 2.0});
        CHECK(c.rmse == 0.0);
        CHECK(c.bias == 0.0);
    }
    SUBCASE("rmse and bias definitions") {
        const auto c = evaluate_continuous({2.0, 4.0}, {1.0, 1.0});
        CHECK(c.bias == doctest::Approx(2.0));
        CHECK(c.rmse == doctest::Approx(std::sqrt((1.0 + 9.0) / 2.0)));
    }
    SUBCASE("kappa equals the direct-formula recomputation") {
        std::mt19937_64 rng(6);
        std::uniform_int_distribution<int> cls(1, 4);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<int> obs(60), pred(60);
            for (auto& v : obs) v = cls(rng);
            for (auto& v : pred) v = cls(rng);
            const auto m = evaluate_categorical(pred, obs);
            CHECK(m.kappa == doctest::Approx(oracle::kappa_direct(m.matrix.counts)).epsilon(1e-12));
        }
    }
    SUBCASE("single-class table has undefined kappa") {
        const auto m = evaluate_categorical({2, 2, 2}, {2, 2, 2});
        CHECK(m.oa == 1.0);
        CHECK(is_missing(m.kappa));
    }
    SUBCASE("length mismatch rejected") {
        CHECK_THROWS_AS(evaluate_continuous({1.0}, {1.0, 2.0}), InvalidInput);
        CHECK_THROWS_AS(evaluate_categorical({1}, {}), InvalidInput);
    }
    SUBCASE("from_counts validates shape and sign") {
        CHECK_THROWS_AS(ErrorMatrix::from_counts({1, 2}, {{1, 2}}), InvalidInput);
        CHECK_THROWS_AS(ErrorMatrix::from_counts({1}, {{-1}}), InvalidInput);
    }
}

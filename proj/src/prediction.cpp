#include "forstruct/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace forstruct {

Standardizer Standardizer::fit(const FeatureMatrix& train) {
    Standardizer s;
    s.mean.assign(train.cols, 0.0);
    s.sd.assign(train.cols, 0.0);
    s.usable.assign(train.cols, 0);
    for (std::size_t c = 0; c < train.cols; ++c) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < train.rows(); ++r) {
            const double v = train.at(r, c);
            if (!is_missing(v)) {
                sum += v;
                ++n;
            }
        }
        if (n < 2) continue;
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < train.rows(); ++r) {
            const double v = train.at(r, c);
            if (!is_missing(v)) ss += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        s.mean[c] = mean;
        s.sd[c] = sd;
        // relative threshold: accumulation noise on a constant column can
        // produce a tiny nonzero sd
        s.usable[c] = sd > 1e-12 * (std::fabs(mean) + 1.0) ? 1 : 0;
    }
    return s;
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& m) const {
    if (m.cols != mean.size()) throw InvalidInput("Standardizer: column count mismatch");
    FeatureMatrix out = m;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            double& v = out.at(r, c);
            if (is_missing(v) || !usable[c]) {
                v = 0.0;  // training mean
            } else {
                v = (v - mean[c]) / sd[c];
            }
        }
    }
    return out;
}

void KnnModel::validate() const {
    if (selected.empty()) throw InvalidInput("KnnModel: selected feature set is empty");
    if (selected.size() != weights.size()) {
        throw InvalidInput("KnnModel: weights must parallel the selected features");
    }
    for (double w : weights) {
        if (!(w > 0.0)) throw InvalidInput("KnnModel: weights must be strictly positive");
    }
    if (k < 1) throw InvalidInput("KnnModel: k must be >= 1");
    if (train.rows() != response.size()) {
        throw InvalidInput("KnnModel: training rows and responses must align");
    }
}

double knn_distance(std::span<const double> a, std::span<const double> b, const KnnModel& model) {
    double acc = 0.0;
    for (std::size_t s = 0; s < model.selected.size(); ++s) {
        const int c = model.selected[s];
        const double w2 = model.weights[s] * model.weights[s];
        const double diff = a[c] - b[c];
        acc += w2 * (diff * diff);
    }
    return std::sqrt(acc);
}

std::vector<std::pair<double, int>> k_nearest(std::span<const double> query, const KnnModel& model,
                                              int exclude_row) {
    const auto n = static_cast<int>(model.train.rows());
    if (n - (exclude_row >= 0 ? 1 : 0) < model.k) {
        throw InsufficientData("k_nearest: not enough reference plots for k neighbors");
    }
    std::vector<std::pair<double, int>> all;
    all.reserve(n);
    for (int r = 0; r < n; ++r) {
        if (r == exclude_row) continue;
        all.emplace_back(knn_distance(query, model.train.row(r), model), r);
    }
    const auto kth = all.begin() + model.k;
    std::partial_sort(all.begin(), kth, all.end());
    all.resize(model.k);
    return all;
}

std::vector<double> neighbor_weights(const std::vector<std::pair<double, int>>& neighbors,
                                     double g) {
    std::vector<double> w(neighbors.size(), 0.0);
    if (g == 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(neighbors.size()));
        return w;
    }
    std::size_t n_zero = 0;
    for (const auto& [d, idx] : neighbors) n_zero += d == 0.0;
    if (n_zero > 0) {
        // limit of d^-g: exact matches absorb all weight
        for (std::size_t i = 0; i < neighbors.size(); ++i) {
            if (neighbors[i].first == 0.0) w[i] = 1.0 / static_cast<double>(n_zero);
        }
        return w;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        w[i] = std::pow(neighbors[i].first, -g);
        sum += w[i];
    }
    for (auto& x : w) x /= sum;
    return w;
}

double knn_predict_continuous(std::span<const double> query, const KnnModel& model,
                              int exclude_row) {
    const auto nn = k_nearest(query, model, exclude_row);
    const auto w = neighbor_weights(nn, model.g);
    double y = 0.0;
    for (std::size_t i = 0; i < nn.size(); ++i) y += w[i] * model.response.cont[nn[i].second];
    return y;
}

int knn_predict_categorical(std::span<const double> query, const KnnModel& model,
                            int exclude_row) {
    const auto nn = k_nearest(query, model, exclude_row);
    const auto w = neighbor_weights(nn, model.g);
    std::map<int, double> votes;
    for (std::size_t i = 0; i < nn.size(); ++i) {
        votes[model.response.cat[nn[i].second]] += w[i];
    }
    int best_class = votes.begin()->first;
    double best_weight = votes.begin()->second;
    for (const auto& [cls, weight] : votes) {
        if (weight > best_weight) {
            best_class = cls;
            best_weight = weight;
        }
    }
    return best_class;
}

ErrorMatrix ErrorMatrix::from_pairs(const std::vector<int>& observed,
                                    const std::vector<int>& predicted) {
    if (observed.size() != predicted.size()) {
        throw InvalidInput("ErrorMatrix: observed/predicted length mismatch");
    }
    std::vector<int> labels;
    labels.reserve(observed.size() * 2);
    labels.insert(labels.end(), observed.begin(), observed.end());
    labels.insert(labels.end(), predicted.begin(), predicted.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    ErrorMatrix m;
    m.labels = labels;
    m.counts.assign(labels.size(), std::vector<std::int64_t>(labels.size(), 0));
    auto index = [&](int cls) {
        return std::lower_bound(labels.begin(), labels.end(), cls) - labels.begin();
    };
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ++m.counts[index(observed[i])][index(predicted[i])];
    }
    return m;
}

ErrorMatrix ErrorMatrix::from_counts(std::vector<int> labels,
                                     std::vector<std::vector<std::int64_t>> counts) {
    if (labels.empty() || counts.size() != labels.size()) {
        throw InvalidInput("ErrorMatrix: counts must be square over the labels");
    }
    for (const auto& row : counts) {
        if (row.size() != labels.size()) {
            throw InvalidInput("ErrorMatrix: counts must be square over the labels");
        }
        for (auto v : row) {
            if (v < 0) throw InvalidInput("ErrorMatrix: negative count");
        }
    }
    ErrorMatrix m;
    m.labels = std::move(labels);
    m.counts = std::move(counts);
    return m;
}

std::int64_t ErrorMatrix::total() const {
    std::int64_t n = 0;
    for (const auto& row : counts) {
        for (auto v : row) n += v;
    }
    return n;
}

double ErrorMatrix::overall_accuracy() const {
    const std::int64_t n = total();
    if (n == 0) return kMissing;
    std::int64_t diag = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) diag += counts[i][i];
    return static_cast<double>(diag) / static_cast<double>(n);
}

double ErrorMatrix::kappa() const {
    const std::int64_t n = total();
    if (n == 0) return kMissing;
    double pe = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::int64_t row = 0;
        std::int64_t col = 0;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            row += counts[i][j];
            col += counts[j][i];
        }
        pe += static_cast<double>(row) * static_cast<double>(col);
    }
    pe /= static_cast<double>(n) * static_cast<double>(n);
    if (pe >= 1.0) return kMissing;
    return (overall_accuracy() - pe) / (1.0 - pe);
}

ContinuousMetrics evaluate_continuous(const std::vector<double>& predicted,
                                      const std::vector<double>& observed) {
    if (predicted.size() != observed.size() || predicted.empty()) {
        throw InvalidInput("evaluate_continuous: lengths must match and be positive");
    }
    double se = 0.0;
    double bias = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = predicted[i] - observed[i];
        se += e * e;
        bias += e;
    }
    const double n = static_cast<double>(predicted.size());
    return {std::sqrt(se / n), bias / n};
}

CategoricalMetrics evaluate_categorical(const std::vector<int>& predicted,
                                        const std::vector<int>& observed) {
    if (predicted.size() != observed.size() || predicted.empty()) {
        throw InvalidInput("evaluate_categorical: lengths must match and be positive");
    }
    CategoricalMetrics m;
    m.matrix = ErrorMatrix::from_pairs(observed, predicted);
    m.oa = m.matrix.overall_accuracy();
    m.kappa = m.matrix.kappa();
    return m;
}

std::vector<double> loo_predict_continuous(const KnnModel& model) {
    model.validate();
    const auto n = static_cast<std::int64_t>(model.train.rows());
    std::vector<double> out(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i] = knn_predict_continuous(model.train.row(i), model, static_cast<int>(i));
    }
    return out;
}

std::vector<int> loo_predict_categorical(const KnnModel& model) {
    model.validate();
    const auto n = static_cast<std::int64_t>(model.train.rows());
    std::vector<int> out(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i] = knn_predict_categorical(model.train.row(i), model, static_cast<int>(i));
    }
    return out;
}

}  // namespace forstruct

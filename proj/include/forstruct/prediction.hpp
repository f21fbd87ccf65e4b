#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forstruct/common.hpp"

namespace forstruct {

// Row-major plot-by-feature table. Missing entries hold kMissing.
struct FeatureMatrix {
    std::vector<std::string> plot_ids;
    std::size_t cols = 0;
    std::vector<double> values;

    std::size_t rows() const { return plot_ids.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * cols, cols};
    }
};

// Column-wise standardization statistics fitted on a training matrix.
// Degenerate columns (zero variance or all missing) are flagged unusable
// and must not enter feature selection; missing entries standardize to 0,
// the training mean.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;  // sample sd over non-missing entries
    std::vector<std::uint8_t> usable;

    static Standardizer fit(const FeatureMatrix& train);
    FeatureMatrix transform(const FeatureMatrix& m) const;
};

enum class ResponseKind { continuous, categorical };

struct Response {
    ResponseKind kind = ResponseKind::continuous;
    std::vector<double> cont;
    std::vector<int> cat;

    std::size_t size() const {
        return kind == ResponseKind::continuous ? cont.size() : cat.size();
    }
};

// Distance-weighted k-nn model over a standardized reference matrix.
struct KnnModel {
    std::vector<int> selected;      // column indices, 0-based
    std::vector<double> weights;    // parallel to selected, > 0
    int k = 3;
    double g = 1.0;
    FeatureMatrix train;            // standardized reference plots
    Standardizer standardizer;
    Response response;

    void validate() const;
};

// Weighted feature-space distance sqrt(sum_l w_l^2 (a_l - b_l)^2) over the
// selected columns; both rows must be standardized.
double knn_distance(std::span<const double> a, std::span<const double> b, const KnnModel& model);

// The k nearest training rows by weighted distance (excluding exclude_row,
// for leave-one-out), as (distance, row) pairs sorted ascending with ties
// broken by row index.
std::vector<std::pair<double, int>> k_nearest(std::span<const double> query, const KnnModel& model,
                                              int exclude_row = -1);

// Normalized inverse-distance weights d_i^-g / sum_j d_j^-g. Zero
// distances with g > 0 share the full weight equally among themselves.
std::vector<double> neighbor_weights(const std::vector<std::pair<double, int>>& neighbors,
                                     double g);

double knn_predict_continuous(std::span<const double> query, const KnnModel& model,
                              int exclude_row = -1);

// Class with the largest weight sum; ties resolve to the smallest code.
int knn_predict_categorical(std::span<const double> query, const KnnModel& model,
                            int exclude_row = -1);

// Square count table over class labels; rows = observed, columns = predicted.
struct ErrorMatrix {
    std::vector<int> labels;                     // ascending class codes
    std::vector<std::vector<std::int64_t>> counts;

    static ErrorMatrix from_pairs(const std::vector<int>& observed,
                                  const std::vector<int>& predicted);
    static ErrorMatrix from_counts(std::vector<int> labels,
                                   std::vector<std::vector<std::int64_t>> counts);

    std::int64_t total() const;
    double overall_accuracy() const;
    // Cohen's kappa; kMissing when the chance agreement is 1.
    double kappa() const;
};

struct ContinuousMetrics {
    double rmse = 0.0;
    double bias = 0.0;  // mean(predicted - observed)
};

struct CategoricalMetrics {
    double oa = 0.0;
    double kappa = 0.0;  // kMissing when undefined
    ErrorMatrix matrix;
};

ContinuousMetrics evaluate_continuous(const std::vector<double>& predicted,
                                      const std::vector<double>& observed);
CategoricalMetrics evaluate_categorical(const std::vector<int>& predicted,
                                        const std::vector<int>& observed);

// Leave-one-out predictions over the model's own training rows
// (continuous), OpenMP-parallel across queries.
std::vector<double> loo_predict_continuous(const KnnModel& model);
std::vector<int> loo_predict_categorical(const KnnModel& model);

}  // namespace forstruct

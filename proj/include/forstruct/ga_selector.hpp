#pragma once

#include <cstdint>
#include <vector>

#include "forstruct/prediction.hpp"

namespace forstruct {

// One candidate: an integer weight gene per feature (0 = unselected,
// otherwise the feature weight), the neighbor count k in {3..6} and the
// distance exponent g on the grid {0.0, 0.1, ..., 3.0} encoded as tenths.
struct Chromosome {
    std::vector<int> feature_w;
    int k = 3;
    int g10 = 10;

    double g() const { return static_cast<double>(g10) / 10.0; }

    bool operator==(const Chromosome&) const = default;
};

struct GaConfig {
    int population = 50;
    int generations = 100;
    double mutation = 0.05;
    int elitism = 2;
    std::uint64_t seed = 1;
    int w_max = 10;
    double fitness_w1 = 1.0;  // RMSE / (1 - OA) component
    double fitness_w2 = 1.0;  // |bias| / (1 - kappa) component

    static constexpr int kMin = 3;
    static constexpr int kMax = 6;
    static constexpr int g10Max = 30;
};

// Selected columns and weights a chromosome encodes, restricted to usable
// (non-degenerate) columns.
void chromosome_selection(const Chromosome& c, const std::vector<std::uint8_t>& usable,
                          std::vector<int>& selected, std::vector<double>& weights);

struct ChromosomeEval {
    double fitness = 0.0;
    std::vector<double> pred_cont;
    std::vector<int> pred_cat;
    ContinuousMetrics cont;
    CategoricalMetrics cat;
};

// Full leave-one-out evaluation of a chromosome on standardized data.
// Continuous fitness is w1 * RMSE/sd(y) + w2 * |bias|/sd(y); categorical
// fitness is w1 * (1 - OA) + w2 * (1 - kappa). A chromosome selecting no
// usable feature scores the worst-fitness sentinel (infinity).
ChromosomeEval evaluate_chromosome(const Chromosome& c, const FeatureMatrix& data,
                                   const Response& response,
                                   const std::vector<std::uint8_t>& usable,
                                   const GaConfig& config);

double ga_fitness(const Chromosome& c, const FeatureMatrix& data, const Response& response,
                  const std::vector<std::uint8_t>& usable, const GaConfig& config);

struct GaResult {
    Chromosome best;
    double best_fitness = 0.0;
    std::vector<double> trace;  // best-ever fitness per generation, non-increasing
};

// Generational GA with size-2 tournament selection, uniform crossover,
// per-gene mutation and elitism. Fitness evaluations within a generation
// run in parallel; all random draws happen on the calling thread, so runs
// are deterministic under a fixed seed.
GaResult run_ga(const GaConfig& config, const FeatureMatrix& data, const Response& response,
                const std::vector<std::uint8_t>& usable);

}  // namespace forstruct

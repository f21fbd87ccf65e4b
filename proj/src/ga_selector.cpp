#include "forstruct/ga_selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "forstruct/kernels.hpp"

namespace forstruct {

namespace {

double sample_sd(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0));
}

void validate_inputs(const FeatureMatrix& data, const Response& response,
                     const std::vector<std::uint8_t>& usable) {
    if (data.rows() < 2) throw InsufficientData("ga: need at least 2 plots");
    if (data.cols == 0) throw InvalidInput("ga: need at least 1 feature column");
    if (data.rows() != response.size()) throw InvalidInput("ga: data/response row mismatch");
    if (usable.size() != data.cols) throw InvalidInput("ga: usable mask size mismatch");
    if (std::find(usable.begin(), usable.end(), 1) == usable.end()) {
        throw InvalidInput("ga: no usable feature columns");
    }
}

}  // namespace

void chromosome_selection(const Chromosome& c, const std::vector<std::uint8_t>& usable,
                          std::vector<int>& selected, std::vector<double>& weights) {
    selected.clear();
    weights.clear();
    for (std::size_t i = 0; i < c.feature_w.size(); ++i) {
        if (c.feature_w[i] > 0 && usable[i]) {
            selected.push_back(static_cast<int>(i));
            weights.push_back(static_cast<double>(c.feature_w[i]));
        }
    }
}

ChromosomeEval evaluate_chromosome(const Chromosome& c, const FeatureMatrix& data,
                                   const Response& response,
                                   const std::vector<std::uint8_t>& usable,
                                   const GaConfig& config) {
    validate_inputs(data, response, usable);
    ChromosomeEval ev;

    std::vector<int> selected;
    std::vector<double> weights;
    chromosome_selection(c, usable, selected, weights);
    if (selected.empty()) {
        ev.fitness = std::numeric_limits<double>::infinity();
        return ev;
    }
    std::vector<double> weights_sq(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights_sq[i] = weights[i] * weights[i];

    const auto n = static_cast<std::int64_t>(data.rows());
    const double g = c.g();
    const int k = c.k;
    if (n - 1 < k) throw InsufficientData("ga: fewer reference plots than k neighbors");

    const bool continuous = response.kind == ResponseKind::continuous;
    ev.pred_cont.assign(continuous ? n : 0, 0.0);
    ev.pred_cat.assign(continuous ? 0 : n, 0);

#pragma omp parallel
    {
        std::vector<double> dist_sq;
        std::vector<std::pair<double, int>> nn(k);
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < n; ++i) {
            kernels::weighted_row_distances_sq(data.values, data.cols,
                                               static_cast<std::size_t>(i), selected, weights_sq,
                                               dist_sq);
            // k smallest among j != i, ties broken by row index
            std::vector<std::pair<double, int>> all;
            all.reserve(n - 1);
            for (std::int64_t j = 0; j < n; ++j) {
                if (j == i) continue;
                all.emplace_back(std::sqrt(dist_sq[j]), static_cast<int>(j));
            }
            std::partial_sort(all.begin(), all.begin() + k, all.end());
            nn.assign(all.begin(), all.begin() + k);
            const auto w = neighbor_weights(nn, g);
            if (continuous) {
                double y = 0.0;
                for (int m = 0; m < k; ++m) y += w[m] * response.cont[nn[m].second];
                ev.pred_cont[i] = y;
            } else {
                std::map<int, double> votes;
                for (int m = 0; m < k; ++m) votes[response.cat[nn[m].second]] += w[m];
                int best_class = votes.begin()->first;
                double best_weight = votes.begin()->second;
                for (const auto& [cls, weight] : votes) {
                    if (weight > best_weight) {
                        best_class = cls;
                        best_weight = weight;
                    }
                }
                ev.pred_cat[i] = best_class;
            }
        }
    }

    if (continuous) {
        ev.cont = evaluate_continuous(ev.pred_cont, response.cont);
        const double sd = sample_sd(response.cont);
        if (!(sd > 0.0)) throw InvalidInput("ga: constant continuous response");
        ev.fitness = config.fitness_w1 * ev.cont.rmse / sd +
                     config.fitness_w2 * std::fabs(ev.cont.bias) / sd;
    } else {
        ev.cat = evaluate_categorical(ev.pred_cat, response.cat);
        const double kappa = is_missing(ev.cat.kappa) ? 0.0 : ev.cat.kappa;
        ev.fitness = config.fitness_w1 * (1.0 - ev.cat.oa) + config.fitness_w2 * (1.0 - kappa);
    }
    return ev;
}

double ga_fitness(const Chromosome& c, const FeatureMatrix& data, const Response& response,
                  const std::vector<std::uint8_t>& usable, const GaConfig& config) {
    return evaluate_chromosome(c, data, response, usable, config).fitness;
}

namespace {

void repair(Chromosome& c, const std::vector<std::uint8_t>& usable, const GaConfig& cfg,
            std::mt19937_64& rng) {
    for (std::size_t i = 0; i < c.feature_w.size(); ++i) {
        if (c.feature_w[i] > 0 && usable[i]) return;
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < usable.size(); ++i) {
        if (usable[i]) candidates.push_back(i);
    }
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    std::uniform_int_distribution<int> val(1, cfg.w_max);
    c.feature_w[candidates[pick(rng)]] = val(rng);
}

Chromosome random_chromosome(std::size_t n_features, const GaConfig& cfg,
                             const std::vector<std::uint8_t>& usable, std::mt19937_64& rng) {
    Chromosome c;
    c.feature_w.resize(n_features);
    std::uniform_int_distribution<int> wd(0, cfg.w_max);
    std::uniform_int_distribution<int> kd(GaConfig::kMin, GaConfig::kMax);
    std::uniform_int_distribution<int> gd(0, GaConfig::g10Max);
    for (auto& w : c.feature_w) w = wd(rng);
    c.k = kd(rng);
    c.g10 = gd(rng);
    repair(c, usable, cfg, rng);
    return c;
}

}  // namespace

GaResult run_ga(const GaConfig& config, const FeatureMatrix& data, const Response& response,
                const std::vector<std::uint8_t>& usable) {
    validate_inputs(data, response, usable);
    if (config.population < 4) throw InvalidInput("ga: population must be >= 4");
    if (config.generations < 1) throw InvalidInput("ga: generations must be >= 1");
    if (config.mutation < 0.0 || config.mutation > 1.0) {
        throw InvalidInput("ga: mutation probability must be in [0, 1]");
    }
    if (config.elitism < 0 || config.elitism >= config.population) {
        throw InvalidInput("ga: elitism must be in [0, population)");
    }

    std::mt19937_64 rng(config.seed);
    const std::size_t n_features = data.cols;

    std::vector<Chromosome> pop;
    pop.reserve(config.population);
    for (int i = 0; i < config.population; ++i) {
        pop.push_back(random_chromosome(n_features, config, usable, rng));
    }

    GaResult result;
    result.best_fitness = std::numeric_limits<double>::infinity();
    std::vector<double> fit(config.population);

    std::uniform_int_distribution<int> pick(0, config.population - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // zero-inflated mutation kernel: feature genes drop out with equal
    // probability to re-weighting, keeping selection pressure sparse
    std::uniform_int_distribution<int> wd(1, config.w_max);
    std::uniform_int_distribution<int> kd(GaConfig::kMin, GaConfig::kMax);
    std::uniform_int_distribution<int> gd(0, GaConfig::g10Max);

    for (int gen = 0; gen < config.generations; ++gen) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < config.population; ++i) {
            fit[i] = ga_fitness(pop[i], data, response, usable, config);
        }
        for (int i = 0; i < config.population; ++i) {
            if (fit[i] < result.best_fitness) {
                result.best_fitness = fit[i];
                result.best = pop[i];
            }
        }
        result.trace.push_back(result.best_fitness);
        if (gen + 1 == config.generations) break;

        std::vector<int> order(config.population);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fit[a] < fit[b]; });

        std::vector<Chromosome> next;
        next.reserve(config.population);
        for (int e = 0; e < config.elitism; ++e) next.push_back(pop[order[e]]);

        auto tournament = [&]() -> const Chromosome& {
            const int a = pick(rng);
            const int b = pick(rng);
            return fit[a] <= fit[b] ? pop[a] : pop[b];
        };
        while (static_cast<int>(next.size()) < config.population) {
            const Chromosome& pa = tournament();
            const Chromosome& pb = tournament();
            Chromosome child;
            child.feature_w.resize(n_features);
            for (std::size_t gi = 0; gi < n_features; ++gi) {
                child.feature_w[gi] = unit(rng) < 0.5 ? pa.feature_w[gi] : pb.feature_w[gi];
            }
            child.k = unit(rng) < 0.5 ? pa.k : pb.k;
            child.g10 = unit(rng) < 0.5 ? pa.g10 : pb.g10;
            for (std::size_t gi = 0; gi < n_features; ++gi) {
                if (unit(rng) < config.mutation) {
                    child.feature_w[gi] = unit(rng) < 0.5 ? 0 : wd(rng);
                }
            }
            if (unit(rng) < config.mutation) child.k = kd(rng);
            if (unit(rng) < config.mutation) child.g10 = gd(rng);
            repair(child, usable, config, rng);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
    }
    return result;
}

}  // namespace forstruct

#include "cbwcs/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cbwcs/rng.hpp"

namespace cbwcs {

namespace {

constexpr std::uint64_t kFoldStream = 0xF01D;
constexpr std::uint64_t kEvolveStream = 0xE70;
constexpr double kBlendAlpha = 0.5;

double clip(double v, std::pair<double, double> r) { return std::clamp(v, r.first, r.second); }

}  // namespace

void GaConfig::validate() const {
  if (pop_size < 2) throw std::invalid_argument("GaConfig: pop_size must be >= 2");
  if (generations < 0) throw std::invalid_argument("GaConfig: negative generations");
  if (elite_count < 0 || elite_count >= pop_size) {
    throw std::invalid_argument("GaConfig: need 0 <= elite_count < pop_size");
  }
  if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 || mutation_prob > 1.0) {
    throw std::invalid_argument("GaConfig: probabilities must lie in [0, 1]");
  }
  if (!(c_range_log2.second > c_range_log2.first) || !(g_range_log2.second > g_range_log2.first)) {
    throw std::invalid_argument("GaConfig: gene ranges must be non-degenerate");
  }
  if (cv_folds < 2) throw std::invalid_argument("GaConfig: cv_folds must be >= 2");
  if (tournament_size < 1) throw std::invalid_argument("GaConfig: tournament_size must be >= 1");
}

SvmHyper Individual::hyper() const {
  return SvmHyper::make(std::exp2(log2_c), std::exp2(log2_g));
}

CvEvaluator::CvEvaluator(const TrainingSet& d, int folds, std::uint64_t fold_seed,
                         SolverOptions opts)
    : k_(folds), opts_(opts) {
  d.validate();
  y_ = d.labels();
  fold_ = stratified_folds(y_, folds, fold_seed);
  const std::size_t m = d.m();
  dist_.assign(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double v = squared_distance(d.vectors[a].values, d.vectors[b].values);
      dist_[a * m + b] = v;
      dist_[b * m + a] = v;
    }
  }
}

double CvEvaluator::accuracy(const SvmHyper& h) const {
  const double g = h.g;
  double acc_sum = 0.0;
  for (int f = 0; f < k_; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t t = 0; t < m(); ++t) (fold_[t] == f ? test : train).push_back(t);
    std::vector<int> ytr;
    ytr.reserve(train.size());
    for (auto t : train) ytr.push_back(y_[t]);

    const std::size_t n = train.size();
    const std::size_t max_rows =
        n <= opts_.full_cache_limit
            ? n
            : std::max<std::size_t>(2, opts_.cache_bytes / (sizeof(double) * n));
    KernelRows kernel(
        n,
        [&](std::size_t i, std::span<double> row) {
          for (std::size_t t = 0; t < n; ++t) {
            row[t] = t == i ? 1.0 : std::exp(-g * dist(train[i], train[t]));
          }
        },
        std::vector<double>(n, 1.0), max_rows);
    const auto sol = solve_dual(kernel, ytr, h.c, opts_);

    std::size_t correct = 0;
    for (auto u : test) {
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        if (sol.alpha[s] > 0.0) acc += sol.alpha[s] * ytr[s] * std::exp(-g * dist(train[s], u));
      }
      if (sign_with_tie(acc + sol.bias) == y_[u]) ++correct;
    }
    acc_sum += static_cast<double>(correct) / static_cast<double>(test.size());
  }
  return acc_sum / k_;
}

double fitness(const Individual& ind, const CvEvaluator& cv) {
  try {
    return cv.accuracy(ind.hyper());
  } catch (const ConvergenceError&) {
    return 0.0;
  }
}

std::uint64_t ga_fold_seed(const GaConfig& cfg) { return derive_seed(cfg.seed, {kFoldStream}); }

GaResult evolve(const TrainingSet& d, const GaConfig& cfg, const SolverOptions& opts) {
  cfg.validate();
  const CvEvaluator cv(d, cfg.cv_folds, ga_fold_seed(cfg), opts);
  Rng rng(derive_seed(cfg.seed, {kEvolveStream}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, cfg.mutation_sigma);

  auto random_individual = [&] {
    Individual ind;
    ind.log2_c = cfg.c_range_log2.first + unit(rng) * (cfg.c_range_log2.second - cfg.c_range_log2.first);
    ind.log2_g = cfg.g_range_log2.first + unit(rng) * (cfg.g_range_log2.second - cfg.g_range_log2.first);
    return ind;
  };
  auto evaluate = [&](std::vector<Individual>& pop) {
    for (auto& ind : pop) {
      if (!ind.fitness) ind.fitness = fitness(ind, cv);
    }
  };

  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(cfg.pop_size));
  for (int k = 0; k < cfg.pop_size; ++k) pop.push_back(random_individual());
  evaluate(pop);

  GaResult result;
  result.best_individual = pop.front();
  auto record = [&](int gen) {
    double sum = 0.0;
    for (const auto& ind : pop) {
      sum += *ind.fitness;
      // Strictly better only: ties keep the earlier individual.
      if (*ind.fitness > *result.best_individual.fitness) result.best_individual = ind;
    }
    result.history.push_back({gen, *result.best_individual.fitness, sum / static_cast<double>(pop.size()),
                              result.best_individual.log2_c, result.best_individual.log2_g});
  };
  record(0);

  auto tournament = [&]() -> const Individual& {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    const Individual* best = &pop[pick(rng)];
    for (int k = 1; k < cfg.tournament_size; ++k) {
      const Individual* cand = &pop[pick(rng)];
      if (*cand->fitness > *best->fitness) best = cand;
    }
    return *best;
  };
  auto blend = [&](double a, double b, std::pair<double, double> range) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double ext = kBlendAlpha * (hi - lo);
    return clip(lo - ext + unit(rng) * (hi - lo + 2.0 * ext), range);
  };

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return *pop[a].fitness > *pop[b].fitness; });

    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int e = 0; e < cfg.elite_count; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);

    while (next.size() < pop.size()) {
      const Individual& pa = tournament();
      const Individual& pb = tournament();
      Individual c1{pa.log2_c, pa.log2_g, pa.fitness};
      Individual c2{pb.log2_c, pb.log2_g, pb.fitness};
      if (unit(rng) < cfg.crossover_prob) {
        c1 = Individual{blend(pa.log2_c, pb.log2_c, cfg.c_range_log2),
                        blend(pa.log2_g, pb.log2_g, cfg.g_range_log2), std::nullopt};
        c2 = Individual{blend(pa.log2_c, pb.log2_c, cfg.c_range_log2),
                        blend(pa.log2_g, pb.log2_g, cfg.g_range_log2), std::nullopt};
      }
      for (Individual* child : {&c1, &c2}) {
        if (unit(rng) < cfg.mutation_prob) {
          child->log2_c = clip(child->log2_c + gauss(rng), cfg.c_range_log2);
          child->fitness.reset();
        }
        if (unit(rng) < cfg.mutation_prob) {
          child->log2_g = clip(child->log2_g + gauss(rng), cfg.g_range_log2);
          child->fitness.reset();
        }
        if (next.size() < pop.size()) next.push_back(*child);
      }
    }
    pop = std::move(next);
    evaluate(pop);
    record(gen);
  }

  result.best = result.best_individual.hyper();
  return result;
}

}  // namespace cbwcs

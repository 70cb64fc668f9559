// ga.hpp - genetic search over SVM hyperparameters (C, g)
//
// Genes are log2 C and log2 g. Fitness is stratified k-fold cross-validation
// accuracy with one fold assignment shared by every individual of a run.

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cbwcs/svm.hpp"

namespace cbwcs {

struct GaConfig {
  int pop_size = 20;
  int generations = 30;
  double crossover_prob = 0.9;
  double mutation_prob = 0.2;
  double mutation_sigma = 1.0;  // log2 units
  int elite_count = 2;
  std::pair<double, double> c_range_log2{-5.0, 15.0};
  std::pair<double, double> g_range_log2{-15.0, 3.0};
  int cv_folds = 5;
  std::uint64_t seed = 1;
  int tournament_size = 3;

  void validate() const;
};

struct Individual {
  double log2_c = 0.0;
  double log2_g = 0.0;
  std::optional<double> fitness;

  SvmHyper hyper() const;
};

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;  ///< all-time best up to this generation
  double mean_fitness = 0.0;
  double best_log2_c = 0.0;
  double best_log2_g = 0.0;
};

struct GaResult {
  SvmHyper best;
  Individual best_individual;
  std::vector<GenerationStats> history;  ///< generation 0 is the initial population
};

/// Cross-validation on a fixed data set with a shared fold assignment. The
/// pairwise squared distances are computed once and reused for every (C, g).
/// Produces exactly the same scores as cross_val_accuracy() with the same seed.
class CvEvaluator {
 public:
  CvEvaluator(const TrainingSet& d, int folds, std::uint64_t fold_seed, SolverOptions opts = {});

  /// Throws ConvergenceError if any fold fails to converge.
  double accuracy(const SvmHyper& h) const;

  std::size_t m() const { return y_.size(); }
  const std::vector<int>& folds() const { return fold_; }

 private:
  double dist(std::size_t a, std::size_t b) const { return dist_[a * m() + b]; }

  std::vector<int> y_;
  std::vector<int> fold_;
  std::vector<double> dist_;
  int k_;
  SolverOptions opts_;
};

/// Fitness of one individual; a non-converging training scores 0.
double fitness(const Individual& ind, const CvEvaluator& cv);

/// Tournament selection, BLX-0.5 crossover, Gaussian mutation in log2 space,
/// elitism. Deterministic in cfg.seed.
GaResult evolve(const TrainingSet& d, const GaConfig& cfg, const SolverOptions& opts = {});

/// The fold-assignment seed evolve() derives from cfg.seed.
std::uint64_t ga_fold_seed(const GaConfig& cfg);

}  // namespace cbwcs

// svm.hpp - soft-margin RBF support vector machine
//
// Training solves the dual
//   max_a  sum_i a_i - 1/2 sum_ij a_i a_j v_i v_j K(u_i, u_j)
//   s.t.   0 <= a_i <= C,  sum_i a_i v_i = 0
// by sequential minimal optimization; prediction is the sign of
//   sum_s a_s v_s K(u_s, u) + b  over the support vectors.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "cbwcs/kernel_cache.hpp"
#include "cbwcs/receiver.hpp"

namespace cbwcs {

struct SvmHyper {
  double c = 1.0;  ///< penalty term
  double g = 1.0;  ///< RBF width, K = exp(-g |u_i - u_j|^2)

  static SvmHyper make(double c, double g);
  friend bool operator==(const SvmHyper&, const SvmHyper&) = default;
};

/// Labelled feature vectors; labels must be +-1 and dimensions equal.
struct TrainingSet {
  std::vector<FeatureVector> vectors;

  std::size_t m() const { return vectors.size(); }
  std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().values.size(); }
  std::vector<int> labels() const;
  /// Throws unless labels are +-1, dimensions agree and both classes occur.
  void validate() const;
};

struct SolverOptions {
  double tol = 1e-3;                      ///< KKT gap at which SMO stops
  std::size_t max_iter = 100000;          ///< pair updates
  std::size_t full_cache_limit = 1000;    ///< m at or below which every kernel row is kept
  std::size_t cache_bytes = 256u << 20;   ///< LRU budget above that limit
};

struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double objective = 0.0;  ///< dual objective value (to be maximized)
  double gap = 0.0;        ///< final maximal KKT violation gap
  std::size_t iterations = 0;
};

class SvmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SMO hit the iteration cap; carries the last iterate.
class ConvergenceError : public SvmError {
 public:
  ConvergenceError(const std::string& what, DualSolution last)
      : SvmError(what), last_(std::move(last)) {}
  const DualSolution& last() const { return last_; }

 private:
  DualSolution last_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double rbf_kernel(std::span<const double> a, std::span<const double> b, double g);

/// SMO on a precomputed kernel. Labels are +-1.
DualSolution solve_dual(KernelRows& kernel, std::span<const int> y, double c,
                        const SolverOptions& opts);

/// Largest per-point KKT violation of (alpha, bias):
///   alpha = 0 -> v f >= 1,  alpha = C -> v f <= 1,  otherwise v f = 1.
double max_kkt_violation(KernelRows& kernel, std::span<const int> y,
                         std::span<const double> alpha, double c, double bias);

struct TrainingReport {
  std::size_t iterations = 0;
  double gap = 0.0;
  double objective = 0.0;
};

class SvmModel {
 public:
  /// `support_vectors` are already in scaled space. Rejects an empty model.
  SvmModel(std::vector<std::vector<double>> support_vectors, std::vector<double> coeffs,
           double bias, SvmHyper hyper, FeatureScaler scaler, TrainingReport report = {});

  std::size_t n_s() const { return support_vectors_.size(); }
  std::size_t dim() const { return scaler_.dim(); }
  const std::vector<std::vector<double>>& support_vectors() const { return support_vectors_; }
  /// alpha_s v_s per support vector.
  const std::vector<double>& coeffs() const { return coeffs_; }
  double bias() const { return bias_; }
  const SvmHyper& hyper() const { return hyper_; }
  const FeatureScaler& scaler() const { return scaler_; }
  const TrainingReport& report() const { return report_; }

  /// Scales `raw` with the frozen scaler, then sum_s coeff_s K(u_s, u) + b.
  double decision_value(std::span<const double> raw) const;
  /// Decision value of an already scaled vector.
  double decision_value_scaled(std::span<const double> scaled) const;
  /// Sign of the decision value, +1 on exact zero.
  int predict(std::span<const double> raw) const;

  /// Versioned text format with hexadecimal floats; load(save(m)) == m bit for bit.
  void save(std::ostream& os) const;
  static SvmModel load(std::istream& is);

  friend bool operator==(const SvmModel& a, const SvmModel& b);

 private:
  std::vector<std::vector<double>> support_vectors_;
  std::vector<double> coeffs_;
  double bias_;
  SvmHyper hyper_;
  FeatureScaler scaler_;
  TrainingReport report_;
};

inline int sign_with_tie(double v) { return v < 0.0 ? -1 : 1; }

/// Trains on `scaler`-transformed copies of the training vectors.
SvmModel train_svm(const TrainingSet& d, const SvmHyper& h, const FeatureScaler& scaler,
                   const SolverOptions& opts = {});

/// Stratified assignment of each sample to one of k folds, deterministic in seed.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// Mean held-out accuracy over stratified k folds (vectors used as given).
double cross_val_accuracy(const TrainingSet& d, const SvmHyper& h, int k, std::uint64_t seed,
                          const SolverOptions& opts = {});

}  // namespace cbwcs

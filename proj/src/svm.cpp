#include "cbwcs/svm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "cbwcs/rng.hpp"

namespace cbwcs {

namespace {

constexpr double kTau = 1e-12;  // floor for non-positive curvature
constexpr const char* kModelMagic = "cbwcs-svm";
constexpr int kModelVersion = 1;

bool at_upper(double a, double c) { return a >= c; }
bool at_lower(double a) { return a <= 0.0; }

double libsvm_bias(std::span<const int> y, std::span<const double> alpha,
                   std::span<const double> grad, double c) {
  double ub = std::numeric_limits<double>::infinity();
  double lb = -ub;
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double yg = y[t] * grad[t];
    if (at_upper(alpha[t], c)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower(alpha[t])) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  return -rho;
}

std::string hexf(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

double parse_hexf(const std::string& tok) {
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::runtime_error("model: bad number '" + tok + "'");
  return v;
}

void expect_token(std::istream& is, const std::string& want) {
  std::string tok;
  if (!(is >> tok) || tok != want) {
    throw std::runtime_error("model: expected '" + want + "', got '" + tok + "'");
  }
}

double read_hexf(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw std::runtime_error("model: unexpected end of input");
  return parse_hexf(tok);
}

}  // namespace

SvmHyper SvmHyper::make(double c, double g) {
  if (!(c > 0.0) || !(g > 0.0)) throw std::invalid_argument("SvmHyper: C and g must be positive");
  return SvmHyper{c, g};
}

std::vector<int> TrainingSet::labels() const {
  std::vector<int> y;
  y.reserve(vectors.size());
  for (const auto& fv : vectors) y.push_back(fv.label.value_or(0));
  return y;
}

void TrainingSet::validate() const {
  if (vectors.size() < 2) throw SvmError("training set needs at least two vectors");
  bool pos = false, neg = false;
  for (const auto& fv : vectors) {
    if (fv.values.size() != dim()) throw std::invalid_argument("training set: ragged vectors");
    if (!fv.label || (*fv.label != 1 && *fv.label != -1)) {
      throw std::invalid_argument("training set: labels must be +-1");
    }
    (*fv.label == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) throw SvmError("training set contains a single class");
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kernel: dimension mismatch");
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return acc;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double g) {
  return std::exp(-g * squared_distance(a, b));
}

DualSolution solve_dual(KernelRows& kernel, std::span<const int> y, double c,
                        const SolverOptions& opts) {
  const std::size_t m = y.size();
  if (kernel.size() != m) throw std::invalid_argument("solve_dual: kernel/label size mismatch");

  DualSolution sol;
  sol.alpha.assign(m, 0.0);
  auto& alpha = sol.alpha;
  // Gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij.
  std::vector<double> grad(m, -1.0);

  std::size_t iter = 0;
  for (;;) {
    // i: maximal violator in I_up; j: best second-order partner in I_low.
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < m; ++t) {
      if (y[t] == 1 ? !at_upper(alpha[t], c) : !at_lower(alpha[t])) {
        const double v = -y[t] * grad[t];
        if (v >= gmax) { gmax = v; i = static_cast<std::ptrdiff_t>(t); }
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t j = -1;
    double best_gain = std::numeric_limits<double>::infinity();
    std::span<const double> ki;
    if (i >= 0) ki = kernel.row(static_cast<std::size_t>(i));
    for (std::size_t t = 0; t < m && i >= 0; ++t) {
      if (y[t] == 1 ? at_lower(alpha[t]) : at_upper(alpha[t], c)) continue;
      const double v = y[t] * grad[t];
      gmax2 = std::max(gmax2, v);
      const double diff = gmax + v;
      if (diff > 0.0) {
        double quad = kernel.diag(static_cast<std::size_t>(i)) + kernel.diag(t) - 2.0 * ki[t];
        if (quad <= 0.0) quad = kTau;
        const double gain = -(diff * diff) / quad;
        if (gain <= best_gain) { best_gain = gain; j = static_cast<std::ptrdiff_t>(t); }
      }
    }
    sol.gap = gmax + gmax2;
    if (i < 0 || j < 0 || sol.gap < opts.tol) break;
    if (iter >= opts.max_iter) {
      sol.iterations = iter;
      sol.bias = libsvm_bias(y, alpha, grad, c);
      double f = 0.0;
      for (std::size_t t = 0; t < m; ++t) f += alpha[t] * (grad[t] - 1.0);
      sol.objective = -0.5 * f;
      throw ConvergenceError("SMO did not converge within " + std::to_string(opts.max_iter) +
                                 " iterations (gap " + std::to_string(sol.gap) + ")",
                             std::move(sol));
    }
    ++iter;

    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    ki = kernel.row(ui);
    const auto kj = kernel.row(uj);
    const double old_ai = alpha[ui], old_aj = alpha[uj];
    const double kii = kernel.diag(ui), kjj = kernel.diag(uj), kij = ki[uj];

    if (y[ui] != y[uj]) {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[ui] - grad[uj]) / quad;
      const double diff = alpha[ui] - alpha[uj];
      alpha[ui] += delta;
      alpha[uj] += delta;
      if (diff > 0.0) {
        if (alpha[uj] < 0.0) { alpha[uj] = 0.0; alpha[ui] = diff; }
      } else {
        if (alpha[ui] < 0.0) { alpha[ui] = 0.0; alpha[uj] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[ui] > c) { alpha[ui] = c; alpha[uj] = c - diff; }
      } else {
        if (alpha[uj] > c) { alpha[uj] = c; alpha[ui] = c + diff; }
      }
    } else {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[ui] - grad[uj]) / quad;
      const double sum = alpha[ui] + alpha[uj];
      alpha[ui] -= delta;
      alpha[uj] += delta;
      if (sum > c) {
        if (alpha[ui] > c) { alpha[ui] = c; alpha[uj] = sum - c; }
      } else {
        if (alpha[uj] < 0.0) { alpha[uj] = 0.0; alpha[ui] = sum; }
      }
      if (sum > c) {
        if (alpha[uj] > c) { alpha[uj] = c; alpha[ui] = sum - c; }
      } else {
        if (alpha[ui] < 0.0) { alpha[ui] = 0.0; alpha[uj] = sum; }
      }
    }

    const double dai = (alpha[ui] - old_ai) * y[ui];
    const double daj = (alpha[uj] - old_aj) * y[uj];
    for (std::size_t t = 0; t < m; ++t) {
      grad[t] += y[t] * (ki[t] * dai + kj[t] * daj);
    }
  }

  sol.iterations = iter;
  sol.bias = libsvm_bias(y, alpha, grad, c);
  double f = 0.0;
  for (std::size_t t = 0; t < m; ++t) f += alpha[t] * (grad[t] - 1.0);
  sol.objective = -0.5 * f;
  return sol;
}

double max_kkt_violation(KernelRows& kernel, std::span<const int> y,
                         std::span<const double> alpha, double c, double bias) {
  const std::size_t m = y.size();
  std::vector<double> f(m, bias);
  for (std::size_t s = 0; s < m; ++s) {
    if (alpha[s] == 0.0) continue;
    const auto ks = kernel.row(s);
    for (std::size_t t = 0; t < m; ++t) f[t] += alpha[s] * y[s] * ks[t];
  }
  double worst = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double margin = y[t] * f[t];
    double v;
    if (at_lower(alpha[t])) v = std::max(0.0, 1.0 - margin);
    else if (at_upper(alpha[t], c)) v = std::max(0.0, margin - 1.0);
    else v = std::abs(margin - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

SvmModel::SvmModel(std::vector<std::vector<double>> support_vectors, std::vector<double> coeffs,
                   double bias, SvmHyper hyper, FeatureScaler scaler, TrainingReport report)
    : support_vectors_(std::move(support_vectors)),
      coeffs_(std::move(coeffs)),
      bias_(bias),
      hyper_(hyper),
      scaler_(std::move(scaler)),
      report_(report) {
  if (support_vectors_.empty()) throw SvmError("SvmModel: no support vectors");
  if (support_vectors_.size() != coeffs_.size()) {
    throw std::invalid_argument("SvmModel: coefficient count mismatch");
  }
  for (const auto& sv : support_vectors_) {
    if (sv.size() != scaler_.dim()) throw std::invalid_argument("SvmModel: dimension mismatch");
  }
}

double SvmModel::decision_value_scaled(std::span<const double> scaled) const {
  if (scaled.size() != dim()) throw std::invalid_argument("decision_value: dimension mismatch");
  double acc = 0.0;
  for (std::size_t s = 0; s < support_vectors_.size(); ++s) {
    acc += coeffs_[s] * rbf_kernel(support_vectors_[s], scaled, hyper_.g);
  }
  return acc + bias_;
}

double SvmModel::decision_value(std::span<const double> raw) const {
  if (raw.size() != dim()) throw std::invalid_argument("decision_value: dimension mismatch");
  std::vector<double> scaled(raw.size());
  scaler_.apply_into(raw, scaled);
  return decision_value_scaled(scaled);
}

int SvmModel::predict(std::span<const double> raw) const {
  return sign_with_tie(decision_value(raw));
}

void SvmModel::save(std::ostream& os) const {
  os << kModelMagic << ' ' << kModelVersion << '\n';
  os << "c " << hexf(hyper_.c) << '\n';
  os << "g " << hexf(hyper_.g) << '\n';
  os << "bias " << hexf(bias_) << '\n';
  os << "report " << report_.iterations << ' ' << hexf(report_.gap) << ' '
     << hexf(report_.objective) << '\n';
  os << "dim " << dim() << '\n';
  if (scaler_.is_identity()) {
    os << "scaler identity\n";
  } else {
    os << "scaler minmax\n";
    for (std::size_t d = 0; d < dim(); ++d) {
      os << hexf(scaler_.lo()[d]) << ' ' << hexf(scaler_.hi()[d]) << '\n';
    }
  }
  os << "n_sv " << n_s() << '\n';
  for (std::size_t s = 0; s < n_s(); ++s) {
    os << hexf(coeffs_[s]);
    for (double v : support_vectors_[s]) os << ' ' << hexf(v);
    os << '\n';
  }
  if (!os) throw std::runtime_error("model: write failed");
}

SvmModel SvmModel::load(std::istream& is) {
  expect_token(is, kModelMagic);
  int version = 0;
  if (!(is >> version) || version != kModelVersion) {
    throw std::runtime_error("model: unsupported version " + std::to_string(version));
  }
  expect_token(is, "c");
  const double c = read_hexf(is);
  expect_token(is, "g");
  const double g = read_hexf(is);
  expect_token(is, "bias");
  const double bias = read_hexf(is);
  expect_token(is, "report");
  TrainingReport rep;
  is >> rep.iterations;
  rep.gap = read_hexf(is);
  rep.objective = read_hexf(is);
  expect_token(is, "dim");
  std::size_t dim = 0;
  if (!(is >> dim) || dim == 0) throw std::runtime_error("model: bad dimension");
  expect_token(is, "scaler");
  std::string kind;
  is >> kind;
  FeatureScaler scaler;
  if (kind == "identity") {
    scaler = FeatureScaler::identity(dim);
  } else if (kind == "minmax") {
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = read_hexf(is);
      hi[d] = read_hexf(is);
    }
    scaler = FeatureScaler::from_bounds(std::move(lo), std::move(hi));
  } else {
    throw std::runtime_error("model: unknown scaler kind '" + kind + "'");
  }
  expect_token(is, "n_sv");
  std::size_t n_sv = 0;
  if (!(is >> n_sv)) throw std::runtime_error("model: bad support-vector count");
  std::vector<std::vector<double>> svs(n_sv, std::vector<double>(dim));
  std::vector<double> coeffs(n_sv);
  for (std::size_t s = 0; s < n_sv; ++s) {
    coeffs[s] = read_hexf(is);
    for (std::size_t d = 0; d < dim; ++d) svs[s][d] = read_hexf(is);
  }
  return SvmModel(std::move(svs), std::move(coeffs), bias, SvmHyper::make(c, g),
                  std::move(scaler), rep);
}

bool operator==(const SvmModel& a, const SvmModel& b) {
  return a.support_vectors_ == b.support_vectors_ && a.coeffs_ == b.coeffs_ &&
         a.bias_ == b.bias_ && a.hyper_ == b.hyper_ && a.scaler_ == b.scaler_ &&
         a.report_.iterations == b.report_.iterations && a.report_.gap == b.report_.gap &&
         a.report_.objective == b.report_.objective;
}

SvmModel train_svm(const TrainingSet& d, const SvmHyper& h, const FeatureScaler& scaler,
                   const SolverOptions& opts) {
  d.validate();
  if (scaler.dim() != d.dim()) throw std::invalid_argument("train_svm: scaler dimension mismatch");
  const std::size_t m = d.m();

  std::vector<std::vector<double>> x(m);
  for (std::size_t t = 0; t < m; ++t) {
    x[t].resize(d.dim());
    scaler.apply_into(d.vectors[t].values, x[t]);
  }
  const auto y = d.labels();

  const std::size_t budget_rows =
      std::max<std::size_t>(2, opts.cache_bytes / (sizeof(double) * std::max<std::size_t>(m, 1)));
  const std::size_t max_rows = m <= opts.full_cache_limit ? m : budget_rows;
  KernelRows kernel(
      m,
      [&x, g = h.g](std::size_t i, std::span<double> row) {
        for (std::size_t t = 0; t < row.size(); ++t) {
          row[t] = t == i ? 1.0 : rbf_kernel(x[i], x[t], g);
        }
      },
      std::vector<double>(m, 1.0), max_rows);

  const auto sol = solve_dual(kernel, y, h.c, opts);

  std::vector<std::vector<double>> svs;
  std::vector<double> coeffs;
  for (std::size_t t = 0; t < m; ++t) {
    if (sol.alpha[t] > 0.0) {
      svs.push_back(std::move(x[t]));
      coeffs.push_back(sol.alpha[t] * y[t]);
    }
  }
  return SvmModel(std::move(svs), std::move(coeffs), sol.bias, h, scaler,
                  TrainingReport{sol.iterations, sol.gap, sol.objective});
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: k must be >= 2");
  if (labels.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("stratified_folds: fewer samples than folds");
  }
  Rng rng(seed);
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (int cls : {-1, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (labels[t] == cls) idx.push_back(t);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    // Continue the round-robin across classes so fold sizes stay balanced.
    for (auto t : idx) {
      fold[t] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

double cross_val_accuracy(const TrainingSet& d, const SvmHyper& h, int k, std::uint64_t seed,
                          const SolverOptions& opts) {
  d.validate();
  const auto y = d.labels();
  const auto fold = stratified_folds(y, k, seed);
  const auto identity = FeatureScaler::identity(d.dim());
  double acc_sum = 0.0;
  for (int f = 0; f < k; ++f) {
    TrainingSet train;
    std::vector<std::size_t> test;
    for (std::size_t t = 0; t < d.m(); ++t) {
      if (fold[t] == f) test.push_back(t);
      else train.vectors.push_back(d.vectors[t]);
    }
    const auto model = train_svm(train, h, identity, opts);
    std::size_t correct = 0;
    for (auto t : test) {
      if (sign_with_tie(model.decision_value_scaled(d.vectors[t].values)) == y[t]) ++correct;
    }
    acc_sum += static_cast<double>(correct) / static_cast<double>(test.size());
  }
  return acc_sum / k;
}

}  // namespace cbwcs

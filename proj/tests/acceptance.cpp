// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance            all criteria
//   acceptance 3 5        selected criteria only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cbwcs/ga.hpp"
#include "cbwcs/harness.hpp"
#include "cbwcs/io.hpp"
#include "cbwcs/svm.hpp"
#include "cbwcs/threshold.hpp"
#include "cbwcs/waveform.hpp"
#include "oracles.hpp"

using namespace cbwcs;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> detail;  // printed under the verdict line
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string ber_str(const BerPoint& p) {
  std::ostringstream os;
  os << p.decoder << " " << p.errors << "/" << p.bits << " = " << fmt("%.5g", p.ber);
  return os.str();
}

double sigma(const BerPoint& p) { return binomial_sigma(p.ber, p.bits); }

double combined_sigma(const BerPoint& a, const BerPoint& b) {
  return std::hypot(sigma(a), sigma(b));
}

const BerPoint& find(const SweepResult& r, double snr, const std::string& dec) {
  for (const auto& p : r.points) {
    if (p.snr_db == snr && p.decoder == dec) return p;
  }
  throw std::runtime_error("missing point " + dec);
}

// Frames of 1152 information bits; 200 frames clears 2e5 bits.
constexpr std::size_t kBits2e5 = 200 * 1152;

SimConfig base_config(std::vector<double> delays) {
  SimConfig cfg;
  cfg.channel.delays = std::move(delays);
  cfg.snr_points = {0.0, 2.0, 4.0, 6.0, 8.0};
  cfg.min_errors = 0;
  cfg.ga.pop_size = 12;
  cfg.ga.generations = 10;
  cfg.seed = 2024;
  return cfg;
}

std::string channel_name(const SimConfig& cfg) {
  return std::to_string(cfg.channel.delays.size()) + "-path";
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto p = BasisParams::make();
  double worst = 0.0;
  for (double tau : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
    const double alpha = std::exp(-0.6 * tau);
    for (int i = -6; i <= 6; ++i) {
      worst = std::max(worst, std::abs(isi_coefficient(tau, i, alpha, p) - alpha * oracle::correlation(tau + i)));
    }
  }
  return {worst <= 1e-6, "closed-form ISI vs quadrature, max |diff| " + fmt("%.3g", worst) + " (limit 1e-6)", {}};
}

Outcome criterion2() {
  const auto p = BasisParams::make();
  Outcome out{true, "", {}};
  double overall = 0.0;
  for (int paths : {1, 2, 3}) {
    std::vector<double> d;
    for (int l = 0; l < paths; ++l) d.push_back(l);
    const auto ch = make_exponential_channel(d, 0.6);
    const auto isi = IsiProfile::compute(ch, p);
    const double P = symbol_energy(ch, p);
    std::mt19937_64 rng(500 + paths);
    std::vector<int> sym(1000);
    for (auto& v : sym) v = (rng() & 1u) ? 1 : -1;
    const SymbolSeq s(sym);
    const auto a = matched_filter(propagate(generate_baseband(s, p), ch), p);
    const SymbolContext truth(s.view());
    DecodeState unused(isi.past_span());
    double worst = 0.0;
    for (std::ptrdiff_t n = 0; n < 1000; ++n) {
      const double r = sample_at_symbol(a, n) - threshold(ThresholdKind::OptimalGenie, n, isi, unused, &truth);
      worst = std::max(worst, std::abs(r - sym[static_cast<std::size_t>(n)] * P) / P);
    }
    overall = std::max(overall, worst);
    out.detail.push_back(std::to_string(paths) + "-path: max relative error " + fmt("%.3g", worst));
    out.pass = out.pass && worst <= 1e-3;
  }
  out.summary = "noiseless decomposition, max relative error " + fmt("%.3g", overall) + " (limit 1e-3)";
  return out;
}

Outcome criterion3() {
  auto cfg = base_config({0.0, 1.0});
  cfg.decoders = {DecoderKind::OptimalGenie};
  // 4e6 rather than the minimum 1e6: tighter band, fewer chance excursions
  cfg.min_bits = 4'000'000;
  const auto r = run_static_ber(cfg);
  Outcome out{true, "", {}};
  int checked = 0;
  double worst_z = 0.0;
  for (const auto& pt : r.points) {
    const double th = *pt.theory_ber;
    const double sd = binomial_sigma(th, pt.bits);
    const double z = (pt.ber - th) / sd;
    std::string line = fmt("%g dB: ", pt.snr_db) + ber_str(pt) + ", theory " + fmt("%.5g", th) + ", z " + fmt("%+.2f", z);
    if (th >= 1e-4) {
      ++checked;
      worst_z = std::max(worst_z, std::abs(z));
      if (std::abs(z) > 3.0) out.pass = false;
    } else {
      line += " (below 1e-4, not checked)";
    }
    out.detail.push_back(line);
  }
  out.summary = "optimal_genie vs theory on " + std::to_string(checked) + " points, max |z| " + fmt("%.2f", worst_z) + " (limit 3)";
  return out;
}

Outcome criterion4() {
  Outcome out{true, "", {}};
  int violations = 0, checked = 0;
  const std::vector<std::string> order{"zero", "past", "past_fut1_genie", "optimal_genie"};
  for (auto delays : {std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0, 2.0}}) {
    auto cfg = base_config(delays);
    cfg.decoders = {DecoderKind::Zero, DecoderKind::Past, DecoderKind::PastFut1Genie, DecoderKind::OptimalGenie};
    cfg.min_bits = kBits2e5;
    const auto r = run_static_ber(cfg);
    for (double snr : cfg.snr_points) {
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const auto& hi = find(r, snr, order[k]);
        const auto& lo = find(r, snr, order[k + 1]);
        if (std::max(hi.ber, lo.ber) < 1e-3) continue;
        ++checked;
        const double slack = 3.0 * combined_sigma(hi, lo);
        if (hi.ber < lo.ber - slack) {
          ++violations;
          out.pass = false;
          out.detail.push_back(channel_name(cfg) + fmt(" %g dB: ", snr) + ber_str(hi) + " < " + ber_str(lo) +
                               " by " + fmt("%.3g", lo.ber - hi.ber) + " > 3 sigma " + fmt("%.3g", slack));
        }
      }
    }
    for (double snr : cfg.snr_points) {
      std::string line = channel_name(cfg) + fmt(" %g dB:", snr);
      for (const auto& d : order) line += " " + d + " " + fmt("%.5g", find(r, snr, d).ber);
      out.detail.push_back(line);
    }
  }
  out.summary = "decoder ordering, " + std::to_string(violations) + " of " + std::to_string(checked) +
                " adjacent comparisons violated beyond 3 sigma";
  return out;
}

Outcome criterion5() {
  Outcome out{true, "", {}};
  int violations = 0, checked = 0;
  for (bool tv : {false, true}) {
    auto cfg = base_config({0.0, 1.0});
    cfg.decoders = {DecoderKind::Past, DecoderKind::GaSvm};
    cfg.min_bits = kBits2e5;
    cfg.retune = Retune::HyperPerRun;
    if (tv) cfg.channel.gamma_range = std::make_pair(0.3, 0.9);
    const auto r = tv ? run_time_varying_ber(cfg) : run_static_ber(cfg);
    const std::string name = tv ? "time-varying" : "static";
    for (double snr : cfg.snr_points) {
      const auto& past = find(r, snr, "past");
      const auto& svm = find(r, snr, "gasvm");
      std::string line = name + fmt(" %g dB: ", snr) + ber_str(past) + ", " + ber_str(svm);
      if (past.ber >= 1e-3 && past.ber <= 1e-1) {
        ++checked;
        const double slack = 3.0 * combined_sigma(past, svm);
        if (svm.ber > past.ber + slack) {
          ++violations;
          out.pass = false;
          line += "  VIOLATION: excess " + fmt("%.3g", svm.ber - past.ber) + " > 3 sigma " + fmt("%.3g", slack);
        }
      } else {
        line += " (past outside [1e-3, 1e-1], not checked)";
      }
      out.detail.push_back(line);
    }
  }
  out.summary = "gasvm <= past, " + std::to_string(violations) + " of " + std::to_string(checked) +
                " checked points violated beyond 3 sigma";
  return out;
}

Outcome criterion6() {
  Outcome out{true, "", {}};
  int violations = 0, checked = 0;
  for (auto delays : {std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0, 2.0}}) {
    auto cfg = base_config(delays);
    cfg.decoders = {DecoderKind::GaSvm};
    cfg.min_bits = kBits2e5;
    cfg.retune = Retune::PerRun;
    const auto rows = run_training_size_comparison(cfg);
    for (std::size_t k = 0; k + 1 < rows.size(); k += 2) {
      const auto& a7 = rows[k];
      const auto& a9 = rows[k + 1];
      ++checked;
      const double slack = 3.0 * std::hypot(binomial_sigma(a7.ber, a7.bits), binomial_sigma(a9.ber, a9.bits));
      std::string line = channel_name(cfg) + fmt(" %g dB: all7 ", a7.snr_db) + fmt("%.5g", a7.ber) +
                         ", all9 " + fmt("%.5g", a9.ber) + " (" + std::to_string(a9.bits) + " bits each)";
      if (a9.ber > a7.ber + slack) {
        ++violations;
        out.pass = false;
        line += "  VIOLATION: excess " + fmt("%.3g", a9.ber - a7.ber) + " > 3 sigma " + fmt("%.3g", slack);
      }
      out.detail.push_back(line);
    }
  }
  out.summary = "all9 <= all7, " + std::to_string(violations) + " of " + std::to_string(checked) +
                " points violated beyond 3 sigma";
  return out;
}

KernelRows rows_for(const oracle::SvmInstance& inst) {
  return KernelRows(
      inst.x.size(),
      [&inst](std::size_t i, std::span<double> row) {
        for (std::size_t j = 0; j < inst.x.size(); ++j) row[j] = rbf_kernel(inst.x[i], inst.x[j], inst.g);
      },
      std::vector<double>(inst.x.size(), 1.0), inst.x.size());
}

Outcome criterion7() {
  double worst_obj = 0.0, worst_eq = 0.0, worst_kkt = 0.0;
  bool box = true;
  SolverOptions tight;
  tight.tol = 1e-8;
  const auto instances = oracle::small_instances();
  for (const auto& inst : instances) {
    const auto ref = oracle::solve_qp(oracle::rbf_matrix(inst.x, inst.g), inst.y, inst.c);
    auto kt = rows_for(inst);
    const auto precise = solve_dual(kt, inst.y, inst.c, tight);
    worst_obj = std::max(worst_obj, std::abs(precise.objective - ref.objective));

    // models as trained with default settings
    auto kd = rows_for(inst);
    const auto sol = solve_dual(kd, inst.y, inst.c, SolverOptions{});
    double ya = 0.0;
    for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
      box = box && sol.alpha[i] >= 0.0 && sol.alpha[i] <= inst.c;
      ya += sol.alpha[i] * inst.y[i];
    }
    worst_eq = std::max(worst_eq, std::abs(ya));
    auto kk = rows_for(inst);
    worst_kkt = std::max(worst_kkt, max_kkt_violation(kk, inst.y, sol.alpha, inst.c, sol.bias));
  }
  const bool pass = worst_obj <= 1e-6 && box && worst_eq <= 1e-8 && worst_kkt <= 1e-3;
  return {pass,
          std::to_string(instances.size()) + " instances: objective gap " + fmt("%.3g", worst_obj) +
              ", box " + (box ? "ok" : "violated") + ", |sum a v| " + fmt("%.3g", worst_eq) + ", KKT " +
              fmt("%.3g", worst_kkt),
          {}};
}

Outcome criterion8() {
  const auto inst = oracle::make_instance(200, 3, 1.5, 1.0, 1.0, 4);
  TrainingSet d;
  for (std::size_t i = 0; i < inst.x.size(); ++i) {
    const auto& v = inst.x[i];
    int label = (v[0] * v[0] + v[1] > 0.6) ? 1 : -1;
    if (i % 9 == 0) label = -label;
    d.vectors.push_back({v, label, static_cast<std::ptrdiff_t>(i)});
  }
  GaConfig cfg;
  cfg.pop_size = 12;
  cfg.generations = 12;
  cfg.seed = 3;
  const auto res = evolve(d, cfg);
  const auto again = evolve(d, cfg);

  const CvEvaluator cv(d, cfg.cv_folds, ga_fold_seed(cfg));
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      Individual ind;
      ind.log2_c = cfg.c_range_log2.first + (cfg.c_range_log2.second - cfg.c_range_log2.first) * i / 15.0;
      ind.log2_g = cfg.g_range_log2.first + (cfg.g_range_log2.second - cfg.g_range_log2.first) * j / 15.0;
      grid.push_back(fitness(ind, cv));
    }
  }
  std::sort(grid.begin(), grid.end());
  const double p95 = grid[static_cast<std::size_t>(0.95 * (grid.size() - 1))];
  bool monotone = true;
  for (std::size_t k = 1; k < res.history.size(); ++k) {
    monotone = monotone && res.history[k].best_fitness >= res.history[k - 1].best_fitness;
  }
  bool same = res.best == again.best && res.history.size() == again.history.size();
  for (std::size_t k = 0; same && k < res.history.size(); ++k) {
    same = res.history[k].mean_fitness == again.history[k].mean_fitness &&
           res.history[k].best_fitness == again.history[k].best_fitness;
  }
  const double best = *res.best_individual.fitness;
  return {best >= p95 && monotone && same,
          "GA best " + fmt("%.4f", best) + " vs grid 95th pct " + fmt("%.4f", p95) + " (grid max " +
              fmt("%.4f", grid.back()) + "), history " + (monotone ? "monotone" : "NOT monotone") + ", " +
              (same ? "deterministic" : "NOT deterministic"),
          {}};
}

Outcome criterion9() {
  const auto p = BasisParams::make();
  const auto path = std::filesystem::temp_directory_path() / "cbwcs_acceptance_waveform.csv";
  waveform_dump(SymbolSeq({1}), p, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> tx;
  while (std::getline(in, line)) {
    double t = 0.0, x = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf", &t, &x) == 2) tx.emplace_back(t, x);
  }
  std::filesystem::remove(path);

  bool zero_after = true, matches = true;
  std::map<int, double> peak;  // largest |x| per negative period
  int sign_changes = 0;
  double prev = 0.0;
  for (const auto& [t, x] : tx) {
    if (t >= 1.0 - 1e-9) zero_after = zero_after && x == 0.0;
    matches = matches && std::abs(x - oracle::basis(t)) < 1e-9;
    if (t < 0.0) {
      auto& pk = peak[static_cast<int>(std::floor(t))];
      pk = std::max(pk, std::abs(x));
      if (prev * x < 0.0) ++sign_changes;
      prev = x;
    }
  }
  bool growing = peak.size() >= 6;
  double last = 0.0;
  for (const auto& [k, v] : peak) {
    growing = growing && v > last;
    last = v;
  }
  const auto rep = check_branch_continuity(p.beta, p.f);
  const bool continuous = rep.selected == BasisVariant::Continuous &&
                          std::abs(rep.left_limit - rep.right_limit_continuous) < 1e-6 &&
                          p.variant == BasisVariant::Continuous;
  return {zero_after && matches && growing && sign_changes >= 10 && continuous,
          std::to_string(tx.size()) + " samples: zero for t >= 1 " + (zero_after ? "yes" : "no") +
              ", envelope growing towards 0 " + (growing ? "yes" : "no") + ", sign changes " +
              std::to_string(sign_changes) + ", continuity at 0 " + (continuous ? "ok" : "FAILED") +
              fmt(" (printed branch jumps to %g)", rep.right_limit_printed),
          {}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,
                                                       criterion4, criterion5, criterion6,
                                                       criterion7, criterion8, criterion9};
  std::set<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.insert(std::atoi(argv[a]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.summary
              << fmt(" [%.1f s]", secs) << "\n";
    for (const auto& d : o.detail) std::cout << "    " << d << "\n";
    std::cout.flush();
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

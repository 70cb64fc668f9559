#include "cbwcs/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace cbwcs {

namespace {

template <class Fn>
void emit(const std::filesystem::path& path, Fn&& body) {
  std::ostringstream os;
  os << std::setprecision(12);
  body(os);
  write_text_file(path, os.str());
}

void opt(std::ostream& os, const std::optional<double>& v) {
  if (v) os << *v;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for " + path.string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void write_ber_csv(std::ostream& os, std::span<const BerPoint> points) {
  os << kBerHeader << '\n';
  for (const auto& p : points) {
    os << p.snr_db << ',' << p.decoder << ',' << p.bits << ',' << p.errors << ',' << p.ber << ',';
    opt(os, p.theory_ber);
    os << '\n';
  }
}

void emit_csv(std::span<const BerPoint> points, const std::filesystem::path& path) {
  emit(path, [&](std::ostream& os) { write_ber_csv(os, points); });
}

std::vector<TheoryRow> theory_curve(const SimConfig& cfg) {
  if (!cfg.channel.gamma) throw std::invalid_argument("theory_curve: gamma not set");
  const auto ch = make_exponential_channel(cfg.channel.delays, *cfg.channel.gamma);
  std::vector<TheoryRow> rows;
  for (double snr : cfg.snr_points) {
    const auto n = noise_for_snr(snr, cfg.snr_axis, ch, cfg.basis);
    const double q = n.sigma_decision > 0.0 ? n.P / (std::sqrt(2.0) * n.sigma_decision) : INFINITY;
    rows.push_back({snr, q, theoretical_ber(n.P, n.sigma_decision)});
  }
  return rows;
}

void write_theory_csv(std::ostream& os, std::span<const TheoryRow> rows) {
  os << "snr_db,q,theory_ber\n";
  for (const auto& r : rows) os << r.snr_db << ',' << r.q << ',' << r.ber << '\n';
}

void emit_theory_curve(const SimConfig& cfg, const std::filesystem::path& path) {
  const auto rows = theory_curve(cfg);
  emit(path, [&](std::ostream& os) { write_theory_csv(os, rows); });
}

void write_waveform_csv(std::ostream& os, const SampledWaveform& x) {
  os << "t,x\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    os << x.time_at(static_cast<std::ptrdiff_t>(k)) << ',' << x.samples[k] << '\n';
  }
}

void waveform_dump(const SymbolSeq& symbols, const BasisParams& p, const std::filesystem::path& path) {
  const auto x = generate_baseband(symbols, p);
  emit(path, [&](std::ostream& os) { write_waveform_csv(os, x); });
}

void write_train_size_csv(std::ostream& os, std::span<const TrainSizeRow> rows) {
  os << "snr_db,probe_kind,probe_len,bits,errors,ber,theory_ber\n";
  for (const auto& r : rows) {
    os << r.snr_db << ',' << to_string(r.probe_kind) << ',' << r.probe_len << ',' << r.bits << ','
       << r.errors << ',' << r.ber << ',';
    opt(os, r.theory_ber);
    os << '\n';
  }
}

void emit_train_size_csv(std::span<const TrainSizeRow> rows, const std::filesystem::path& path) {
  emit(path, [&](std::ostream& os) { write_train_size_csv(os, rows); });
}

void write_ga_history_csv(std::ostream& os, std::span<const GenerationStats> history) {
  os << "generation,best_fitness,mean_fitness,best_log2_c,best_log2_g\n";
  for (const auto& g : history) {
    os << g.generation << ',' << g.best_fitness << ',' << g.mean_fitness << ',' << g.best_log2_c
       << ',' << g.best_log2_g << '\n';
  }
}

void emit_ga_history_csv(std::span<const GenerationStats> history, const std::filesystem::path& path) {
  emit(path, [&](std::ostream& os) { write_ga_history_csv(os, history); });
}

void write_decision_csv(std::ostream& os, const FrameSignals& s) {
  os << "n,y_n,s_n\n";
  for (std::size_t n = 0; n < s.frame.size(); ++n) {
    os << n << ',' << sample_at_symbol(s.a, static_cast<std::ptrdiff_t>(n)) << ',' << s.frame[n] << '\n';
  }
}

void emit_decision_csv(const FrameSignals& s, const std::filesystem::path& path) {
  emit(path, [&](std::ostream& os) { write_decision_csv(os, s); });
}

void write_feature_csv(std::ostream& os, const TrainingSet& d) {
  for (std::size_t j = 0; j < d.dim(); ++j) os << 'f' << j << ',';
  os << "label\n";
  const auto prec = os.precision(17);
  for (const auto& fv : d.vectors) {
    for (double v : fv.values) os << v << ',';
    if (fv.label) os << *fv.label;
    os << '\n';
  }
  os.precision(prec);
}

void emit_feature_csv(const TrainingSet& d, const std::filesystem::path& path) {
  emit(path, [&](std::ostream& os) { write_feature_csv(os, d); });
}

void emit_gamma_csv(std::span<const double> gammas, const std::filesystem::path& path) {
  emit(path, [&](std::ostream& os) {
    os << "frame,gamma\n";
    for (std::size_t k = 0; k < gammas.size(); ++k) os << k << ',' << gammas[k] << '\n';
  });
}

std::string manifest_json(const ManifestInfo& info) {
  using nlohmann::json;
  json j;
  j["tool"] = "cbwcs";
  j["version"] = CBWCS_VERSION;
  j["command"] = info.command;
  j["compiler"] = __VERSION__;

  if (info.config) {
    json cfg = json::object();
    for (const auto& [k, v] : info.config->values()) cfg[k] = v;
    j["config"] = cfg;
    const auto sim = info.config->to_sim_config();
    j["seed"] = sim.seed;
    j["retune"] = std::string(to_string(sim.retune));
    j["snr_axis"] = std::string(to_string(sim.snr_axis));
    j["isi_model"] = std::string(to_string(sim.isi_model));
    const auto rep = check_branch_continuity(sim.basis.beta, sim.basis.f);
    j["basis_check"] = {{"left_limit", rep.left_limit},
                        {"right_limit_printed", rep.right_limit_printed},
                        {"right_limit_continuous", rep.right_limit_continuous},
                        {"variant", rep.selected == BasisVariant::Continuous ? "continuous" : "printed"}};
  }
  if (info.sweep) {
    j["time_varying"] = info.sweep->time_varying;
    json pts = json::array();
    for (const auto& m : info.sweep->meta) {
      json p{{"snr_db", m.snr_db},
             {"P", m.noise.P},
             {"sigma_decision", m.noise.sigma_decision},
             {"sigma_w", m.noise.sigma_w},
             {"frames", m.frames},
             {"skipped_frames", m.skipped_frames}};
      if (m.ga_best) p["ga_best"] = {{"c", m.ga_best->c}, {"g", m.ga_best->g}};
      pts.push_back(p);
    }
    j["points"] = pts;
    if (info.sweep->time_varying) j["gamma_draws"] = info.sweep->gamma_draws.size();
  }
  j["outputs"] = info.outputs;
  for (const auto& [k, v] : info.extra) j[k] = v;
  return j.dump(2) + "\n";
}

void write_manifest(const ManifestInfo& info, const std::filesystem::path& path) {
  write_text_file(path, manifest_json(info));
}

}  // namespace cbwcs

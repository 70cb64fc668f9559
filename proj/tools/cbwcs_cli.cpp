// cbwcs - command-line front end for the simulation harness.

#include <fstream>
#include <sstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cbwcs/config.hpp"
#include "cbwcs/harness.hpp"
#include "cbwcs/io.hpp"

namespace fs = std::filesystem;
using namespace cbwcs;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::string out;
  std::string manifest;
};

void add_common(CLI::App* app, Common& c, const std::string& default_out) {
  app->add_option("-c,--config", c.config_file, "key = value config file")->check(CLI::ExistingFile);
  app->add_option("-s,--set", c.sets, "override, key=value (repeatable)");
  app->add_option("-o,--out", c.out, "output CSV")->default_val(default_out);
  app->add_option("--manifest", c.manifest, "JSON manifest path (default: <out stem>.manifest.json)");
}

KeyValueConfig load_config(const Common& c) {
  KeyValueConfig kv;
  if (!c.config_file.empty()) kv.merge_file(c.config_file);
  for (const auto& s : c.sets) kv.set_assignment(s);
  return kv;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

fs::path manifest_path(const Common& c) {
  return c.manifest.empty() ? sibling(c.out, ".manifest.json") : fs::path(c.manifest);
}

void print_points(const std::vector<BerPoint>& pts) {
  for (const auto& p : pts) {
    std::cout << "snr " << p.snr_db << " dB  " << p.decoder << "  " << p.errors << "/" << p.bits
              << "  ber " << p.ber;
    if (p.theory_ber) std::cout << "  (theory " << *p.theory_ber << ")";
    std::cout << '\n';
  }
}

int cmd_theory(const Common& c, double from, double to, double step) {
  auto kv = load_config(c);
  auto cfg = kv.to_sim_config();
  if (step > 0.0) {
    cfg.snr_points.clear();
    for (double s = from; s <= to + 1e-9; s += step) cfg.snr_points.push_back(s);
  }
  emit_theory_curve(cfg, c.out);
  write_manifest({"theory", &kv, {c.out}, nullptr, {}}, manifest_path(c));
  std::cout << "wrote " << c.out << '\n';
  return 0;
}

int cmd_sweep(const Common& c, bool tv) {
  auto kv = load_config(c);
  const auto cfg = kv.to_sim_config();
  const auto res = tv ? run_time_varying_ber(cfg) : run_static_ber(cfg);
  emit_csv(res.points, c.out);
  std::vector<std::string> outputs{c.out};
  for (std::size_t i = 0; i < res.meta.size(); ++i) {
    if (!res.meta[i].ga) continue;
    const auto p = sibling(c.out, "_ga_history_p" + std::to_string(i) + ".csv");
    emit_ga_history_csv(res.meta[i].ga->history, p);
    outputs.push_back(p.string());
  }
  if (tv) {
    const auto p = sibling(c.out, "_gamma.csv");
    emit_gamma_csv(res.gamma_draws, p);
    outputs.push_back(p.string());
  }
  std::vector<std::pair<std::string, std::string>> extra;
  if (tv) extra.emplace_back("noise_reference", "sigma fixed from reference_gamma channel");
  write_manifest({tv ? "sweep-tv" : "sweep", &kv, outputs, &res, extra}, manifest_path(c));
  print_points(res.points);
  return 0;
}

int cmd_train_size(const Common& c) {
  auto kv = load_config(c);
  const auto cfg = kv.to_sim_config();
  const auto rows = run_training_size_comparison(cfg);
  emit_train_size_csv(rows, c.out);
  write_manifest({"train-size", &kv, {c.out}, nullptr, {}}, manifest_path(c));
  for (const auto& r : rows) {
    std::cout << "snr " << r.snr_db << " dB  " << to_string(r.probe_kind) << "  " << r.errors << "/"
              << r.bits << "  ber " << r.ber << '\n';
  }
  return 0;
}

int cmd_waveform(const Common& c, const std::vector<int>& symbols) {
  auto kv = load_config(c);
  const auto cfg = kv.to_sim_config();
  const SymbolSeq s(symbols.empty() ? std::vector<int>{1} : symbols);
  waveform_dump(s, cfg.basis, c.out);
  write_manifest({"waveform-dump", &kv, {c.out}, nullptr, {}}, manifest_path(c));
  std::cout << "wrote " << c.out << " (" << s.size() << " symbols)\n";
  return 0;
}

int cmd_train(const Common& c, double snr, std::uint64_t frame_seed, const std::string& features,
              const std::string& decisions) {
  auto kv = load_config(c);
  const auto cfg = kv.to_sim_config();
  if (!cfg.channel.gamma) throw std::invalid_argument("train: gamma not set");
  const auto ch = make_exponential_channel(cfg.channel.delays, *cfg.channel.gamma);
  const auto noise = noise_for_snr(snr, cfg.snr_axis, ch, cfg.basis);
  const auto fs_seed = derive_seed(cfg.seed, {frame_seed});
  const auto sig = synthesize_frame(cfg, ch, noise.sigma_w, fs_seed);
  const auto train = probe_training_set(sig);
  const auto fit = fit_gasvm(cfg, train, FrameSeeds::derive(fs_seed).ga);

  std::ostringstream model;
  fit.model->save(model);
  write_text_file(c.out, model.str());
  std::vector<std::string> outputs{c.out};
  if (fit.ga) {
    const auto p = sibling(c.out, "_ga_history.csv");
    emit_ga_history_csv(fit.ga->history, p);
    outputs.push_back(p.string());
  }
  if (!features.empty()) {
    TrainingSet scaled;
    for (const auto& fv : train.vectors) scaled.vectors.push_back(fit.model->scaler().apply(fv));
    emit_feature_csv(scaled, features);
    outputs.push_back(features);
  }
  if (!decisions.empty()) {
    emit_decision_csv(sig, decisions);
    outputs.push_back(decisions);
  }
  const auto& h = fit.model->hyper();
  write_manifest({"train", &kv, outputs, nullptr,
                  {{"snr_db", std::to_string(snr)},
                   {"c", std::to_string(h.c)},
                   {"g", std::to_string(h.g)},
                   {"support_vectors", std::to_string(fit.model->n_s())}}},
                 manifest_path(c));
  std::cout << "trained on " << train.m() << " vectors: C " << h.c << ", g " << h.g << ", "
            << fit.model->n_s() << " support vectors -> " << c.out << '\n';
  return 0;
}

void list_keys() {
  for (const auto& k : config_keys()) {
    std::cout << k.name << " = " << k.default_value;
    if (!k.help.empty()) std::cout << "    # " << k.help;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chaotic-baseband multipath link simulator", "cbwcs"};
  app.set_version_flag("--version", std::string(CBWCS_VERSION));
  bool keys = false;
  app.add_flag("--list-keys", keys, "print every config key with its default");

  Common c_theory, c_sweep, c_tv, c_size, c_wave, c_train;

  auto* theory = app.add_subcommand("theory", "theoretical BER curve");
  add_common(theory, c_theory, "theory.csv");
  double from = 0.0, to = 0.0, step = 0.0;
  theory->add_option("--from", from, "first SNR (dB) of a dense grid");
  theory->add_option("--to", to, "last SNR (dB)");
  theory->add_option("--step", step, "grid step; 0 uses snr_points");

  auto* sweep = app.add_subcommand("sweep", "BER sweep on a static channel");
  add_common(sweep, c_sweep, "ber.csv");
  auto* sweep_tv = app.add_subcommand("sweep-tv", "BER sweep with gamma redrawn per frame");
  add_common(sweep_tv, c_tv, "ber_tv.csv");
  auto* size = app.add_subcommand("train-size", "gasvm with 896 vs 4608 probe symbols");
  add_common(size, c_size, "train_size.csv");

  auto* wave = app.add_subcommand("waveform-dump", "noise-free baseband of a symbol sequence");
  add_common(wave, c_wave, "waveform.csv");
  std::vector<int> symbols;
  wave->add_option("--symbols", symbols, "+1/-1 symbols (default: a single +1)")->delimiter(',');

  auto* train = app.add_subcommand("train", "fit and save one GA-SVM model from a probe");
  add_common(train, c_train, "model.svm");
  double snr = 6.0;
  std::uint64_t frame_seed = 0;
  std::string features, decisions;
  train->add_option("--snr", snr, "SNR in dB on the configured axis")->default_val(6.0);
  train->add_option("--frame", frame_seed, "frame index mixed into the seed")->default_val(0);
  train->add_option("--features", features, "also write the scaled feature set as CSV");
  train->add_option("--decisions", decisions, "also write (n, y_n, s_n) for the frame");

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (keys) {
    list_keys();
    return 0;
  }

  try {
    if (*theory) return cmd_theory(c_theory, from, to, step);
    if (*sweep) return cmd_sweep(c_sweep, false);
    if (*sweep_tv) return cmd_sweep(c_tv, true);
    if (*size) return cmd_train_size(c_size);
    if (*wave) return cmd_waveform(c_wave, symbols);
    if (*train) return cmd_train(c_train, snr, frame_seed, features, decisions);
  } catch (const std::exception& e) {
    std::cerr << "cbwcs: " << e.what() << '\n';
    return 1;
  }
  std::cerr << app.help();
  return 2;
}

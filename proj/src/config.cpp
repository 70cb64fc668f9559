#include "cbwcs/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cbwcs {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::pair<double, double> parse_pair(std::string_view s, std::string_view key) {
  const auto items = parse_list(s);
  if (items.size() != 2) {
    throw ConfigError(std::string(key) + ": expected two values, got '" + std::string(s) + "'");
  }
  return {parse_double(items[0], key), parse_double(items[1], key)};
}

std::vector<double> parse_doubles(std::string_view s, std::string_view key) {
  std::vector<double> out;
  for (const auto& item : parse_list(s)) out.push_back(parse_double(item, key));
  return out;
}

std::size_t parse_size(std::string_view s, std::string_view key) {
  const long long v = parse_int(s, key);
  if (v < 0) throw ConfigError(std::string(key) + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"beta", "0.6931471805599453", "basis damping, 0 < beta <= f ln 2"},
      {"f", "1", "symbol rate"},
      {"n_p", "6", "basis truncation in symbol periods"},
      {"n_r", "16", "samples per symbol period"},
      {"delays", "[0, 1]", "path delays in symbol periods, first must be 0"},
      {"gamma", "0.6", "path damping, alpha_l = exp(-gamma tau_l)"},
      {"gamma_range", "", "[lo, hi] for time-varying sweeps"},
      {"reference_gamma", "0.6", "channel that fixes the noise level of time-varying sweeps"},
      {"allow_delay_rounding", "false", "round off-grid delays to the sample grid"},
      {"snr_points", "[0, 2, 4, 6, 8]", "SNR grid in dB"},
      {"snr_axis", "filtered", "filtered | ebn0"},
      {"isi_model", "transmitted", "decoder ISI coefficients: transmitted (truncated pulse) | closed_form"},
      {"decoders", "[zero, past, past_fut1_genie, optimal_genie, gasvm]", "decoders to run"},
      {"min_bits", "115200", "information bits per SNR point"},
      {"max_bits", "0", "cap when waiting for min_errors (0: same as min_bits)"},
      {"min_errors", "100", "errors wanted before stopping between min_bits and max_bits"},
      {"probe_kind", "all7", "all7 | all9 | random"},
      {"probe_len", "896", "probe length for random probes"},
      {"info_len", "1152", "information symbols per frame"},
      {"probe_order", "ascending", "ascending | debruijn"},
      {"seed", "1", "master seed"},
      {"scale", "true", "min/max scale SVM features to [-1, 1]"},
      {"retune", "per_run", "per_run | per_frame | hyper_per_run"},
      {"ga_pop_size", "20", "GA population"},
      {"ga_generations", "30", "GA generations"},
      {"ga_crossover_prob", "0.9", ""},
      {"ga_mutation_prob", "0.2", "per gene"},
      {"ga_mutation_sigma", "1.0", "log2 units"},
      {"ga_elite_count", "2", ""},
      {"ga_c_range_log2", "[-5, 15]", ""},
      {"ga_g_range_log2", "[-15, 3]", ""},
      {"ga_cv_folds", "5", ""},
      {"ga_subsample", "1000", "largest training set the GA cross-validates on"},
      {"svm_tol", "0.001", "SMO stopping gap"},
      {"svm_max_iter", "100000", "SMO iteration cap"},
      {"threads", "1", "worker threads for frame simulation"},
  };
  return keys;
}

std::vector<std::string> parse_list(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated list '" + std::string(s) + "'");
    s = trim(s.substr(1, s.size() - 2));
  }
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (item.empty()) throw ConfigError("empty list element in '" + std::string(s) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view key) {
  s = trim(s);
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (str.empty() || used != str.size()) {
    throw ConfigError(std::string(key) + ": not a number '" + str + "'");
  }
  return v;
}

long long parse_int(std::string_view s, std::string_view key) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(std::string(key) + ": not an integer '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s, std::string_view key) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(std::string(key) + ": not a boolean '" + std::string(s) + "'");
}

KeyValueConfig::KeyValueConfig() {
  for (const auto& k : config_keys()) values_[std::string(k.name)] = std::string(k.default_value);
}

void KeyValueConfig::merge_text(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != v.npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == v.npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set(trim(v.substr(0, eq)), trim(v.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void KeyValueConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  merge_text(buf.str(), path.string());
}

void KeyValueConfig::set(std::string_view key, std::string_view value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second = std::string(trim(value));
  explicit_[std::string(key)] = true;
}

void KeyValueConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == assignment.npos) {
    throw ConfigError("override must look like key=value: '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& KeyValueConfig::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

bool KeyValueConfig::is_set(std::string_view key) const { return explicit_.contains(key); }

SimConfig KeyValueConfig::to_sim_config() const {
  SimConfig c;
  auto num = [&](std::string_view k) { return parse_double(get(k), k); };
  auto size = [&](std::string_view k) { return parse_size(get(k), k); };
  auto integer = [&](std::string_view k) { return static_cast<int>(parse_int(get(k), k)); };

  try {
    c.basis = BasisParams::make(num("beta"), num("f"), integer("n_p"), integer("n_r"));

    c.channel.delays = parse_doubles(get("delays"), "delays");
    c.channel.gamma = num("gamma");
    if (!trim(get("gamma_range")).empty()) {
      c.channel.gamma_range = parse_pair(get("gamma_range"), "gamma_range");
    }
    c.channel.reference_gamma = num("reference_gamma");
    c.channel.allow_rounding = parse_bool(get("allow_delay_rounding"), "allow_delay_rounding");

    c.snr_points = parse_doubles(get("snr_points"), "snr_points");
    c.snr_axis = parse_snr_axis(trim(get("snr_axis")));
    c.isi_model = parse_isi_model(trim(get("isi_model")));
    c.decoders.clear();
    for (const auto& d : parse_list(get("decoders"))) c.decoders.push_back(parse_decoder(d));
    c.min_bits = size("min_bits");
    c.max_bits = size("max_bits");
    c.min_errors = size("min_errors");

    c.frame.probe_kind = parse_probe_kind(trim(get("probe_kind")));
    c.frame.probe_len = size("probe_len");
    c.frame.info_len = size("info_len");
    c.frame.probe_order = parse_probe_order(trim(get("probe_order")));
    c.frame.normalize();

    c.seed = static_cast<std::uint64_t>(parse_int(get("seed"), "seed"));
    c.scale = parse_bool(get("scale"), "scale");
    c.retune = parse_retune(trim(get("retune")));

    c.ga.pop_size = integer("ga_pop_size");
    c.ga.generations = integer("ga_generations");
    c.ga.crossover_prob = num("ga_crossover_prob");
    c.ga.mutation_prob = num("ga_mutation_prob");
    c.ga.mutation_sigma = num("ga_mutation_sigma");
    c.ga.elite_count = integer("ga_elite_count");
    c.ga.c_range_log2 = parse_pair(get("ga_c_range_log2"), "ga_c_range_log2");
    c.ga.g_range_log2 = parse_pair(get("ga_g_range_log2"), "ga_g_range_log2");
    c.ga.cv_folds = integer("ga_cv_folds");
    c.ga_subsample = size("ga_subsample");

    c.svm.tol = num("svm_tol");
    c.svm.max_iter = size("svm_max_iter");
    c.threads = integer("threads");
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace cbwcs

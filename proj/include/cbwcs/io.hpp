// io.hpp - CSV outputs and the JSON run manifest
//
// Schemas:
//   BER         snr_db,decoder,bits,errors,ber,theory_ber
//   theory      snr_db,q,theory_ber            (q = P / sqrt(2 sigma^2))
//   waveform    t,x
//   train size  snr_db,probe_kind,probe_len,bits,errors,ber,theory_ber
//   GA history  generation,best_fitness,mean_fitness,best_log2_c,best_log2_g
//   decisions   n,y_n,s_n
//   features    f0..f{d-1},label
//   gamma       frame,gamma
// An absent optional value is written as an empty field.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbwcs/config.hpp"
#include "cbwcs/harness.hpp"

namespace cbwcs {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kBerHeader = "snr_db,decoder,bits,errors,ber,theory_ber";

void write_ber_csv(std::ostream& os, std::span<const BerPoint> points);
void emit_csv(std::span<const BerPoint> points, const std::filesystem::path& path);

struct TheoryRow {
  double snr_db, q, ber;
};
/// Theory curve over cfg.snr_points for the configured static channel.
std::vector<TheoryRow> theory_curve(const SimConfig& cfg);
void write_theory_csv(std::ostream& os, std::span<const TheoryRow> rows);
void emit_theory_curve(const SimConfig& cfg, const std::filesystem::path& path);

/// Noise-free baseband of `symbols`, one row per sample.
void write_waveform_csv(std::ostream& os, const SampledWaveform& x);
void waveform_dump(const SymbolSeq& symbols, const BasisParams& p, const std::filesystem::path& path);

void write_train_size_csv(std::ostream& os, std::span<const TrainSizeRow> rows);
void emit_train_size_csv(std::span<const TrainSizeRow> rows, const std::filesystem::path& path);

void write_ga_history_csv(std::ostream& os, std::span<const GenerationStats> history);
void emit_ga_history_csv(std::span<const GenerationStats> history, const std::filesystem::path& path);

void write_decision_csv(std::ostream& os, const FrameSignals& s);
void emit_decision_csv(const FrameSignals& s, const std::filesystem::path& path);

void write_feature_csv(std::ostream& os, const TrainingSet& d);
void emit_feature_csv(const TrainingSet& d, const std::filesystem::path& path);

void emit_gamma_csv(std::span<const double> gammas, const std::filesystem::path& path);

struct ManifestInfo {
  std::string command;
  const KeyValueConfig* config = nullptr;
  std::vector<std::string> outputs;
  const SweepResult* sweep = nullptr;
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Configuration, seeds, versions and per-point metadata as JSON.
std::string manifest_json(const ManifestInfo& info);
void write_manifest(const ManifestInfo& info, const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories; errors name the path.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cbwcs

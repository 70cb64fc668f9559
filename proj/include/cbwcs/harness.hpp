// harness.hpp - frame simulation and Monte-Carlo BER sweeps
//
// A frame is probe + information symbols sent through one channel
// realization. Every selected decoder reads the same matched-filter output,
// so decoders at one (frame, SNR) are compared on identical noise.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbwcs/channel.hpp"
#include "cbwcs/ga.hpp"
#include "cbwcs/probe.hpp"
#include "cbwcs/receiver.hpp"
#include "cbwcs/svm.hpp"
#include "cbwcs/threshold.hpp"
#include "cbwcs/waveform.hpp"

namespace cbwcs {

enum class DecoderKind { Zero, Past, PastFut1Genie, OptimalGenie, GaSvm };

std::string_view to_string(DecoderKind d);
DecoderKind parse_decoder(std::string_view s);
bool is_genie(DecoderKind d);
std::optional<ThresholdKind> threshold_kind(DecoderKind d);

enum class Retune {
  PerRun,       ///< GA + SVM fitted on the first frame of each SNR point, model reused
  PerFrame,     ///< GA + SVM fitted on every frame's probe
  HyperPerRun,  ///< GA on the first frame, SVM refitted on every frame's probe
};
std::string_view to_string(Retune r);
Retune parse_retune(std::string_view s);

enum class SnrAxis {
  Filtered,  ///< P^2 / (2 sigma^2) at the decision sample
  EbN0,      ///< average received energy per bit over N0 = 2 sigma_w^2
};
std::string_view to_string(SnrAxis a);
SnrAxis parse_snr_axis(std::string_view s);

struct FrameConfig {
  std::size_t probe_len = 896;
  std::size_t info_len = 1152;
  ProbeKind probe_kind = ProbeKind::All7;
  ProbeOrder probe_order = ProbeOrder::Ascending;

  std::size_t frame_len() const { return probe_len + info_len; }
  /// Exhaustive probe kinds force their own length.
  void normalize();
};

struct ChannelSpec {
  std::vector<double> delays{0.0, 1.0};
  std::optional<double> gamma = 0.6;
  std::optional<std::pair<double, double>> gamma_range;
  double reference_gamma = 0.6;  ///< sets sigma for time-varying sweeps
  bool allow_rounding = false;
};

struct SimConfig {
  BasisParams basis = BasisParams::make();
  ChannelSpec channel;
  std::vector<double> snr_points{0.0, 2.0, 4.0, 6.0, 8.0};
  SnrAxis snr_axis = SnrAxis::Filtered;
  IsiModel isi_model = IsiModel::Transmitted;
  std::vector<DecoderKind> decoders{DecoderKind::Zero, DecoderKind::Past,
                                    DecoderKind::PastFut1Genie, DecoderKind::OptimalGenie,
                                    DecoderKind::GaSvm};
  std::size_t min_bits = 115200;
  std::size_t max_bits = 0;  ///< 0 means equal to min_bits
  std::size_t min_errors = 100;
  FrameConfig frame;
  std::uint64_t seed = 1;
  bool scale = true;
  Retune retune = Retune::PerRun;
  GaConfig ga;
  std::size_t ga_subsample = 1000;
  SolverOptions svm;
  int threads = 1;

  void validate() const;
  std::size_t effective_max_bits() const { return std::max(max_bits, min_bits); }
};

/// Noise level for one SNR point.
struct NoiseLevel {
  double snr_db = 0.0;
  double P = 0.0;               ///< symbol energy of the calibration channel
  double sigma_decision = 0.0;  ///< noise std at the matched-filter decision sample
  double sigma_w = 0.0;         ///< continuous intensity handed to add_awgn
};

/// Energy of the matched-filter impulse, E_p = integral p^2.
double basis_energy(const BasisParams& p);

/// Average received energy per symbol for i.i.d. symbols through `ch`.
double received_energy_per_bit(const MultipathChannel& ch, const BasisParams& p);

NoiseLevel noise_for_snr(double snr_db, SnrAxis axis, const MultipathChannel& calibration,
                         const BasisParams& p);

/// How the gasvm decoder obtains its model inside simulate_frame().
struct GaSvmPlan {
  std::optional<SvmHyper> hyper;             ///< skip the GA when set
  std::shared_ptr<const SvmModel> model;     ///< skip training when set
};

struct FrameResult {
  std::vector<int> truth;                 ///< information symbols
  std::vector<std::vector<int>> decoded;  ///< parallel to SimConfig::decoders
  double gamma = 0.0;
  bool svm_failed = false;
  std::string svm_error;
  std::optional<GaResult> ga;             ///< set when the GA ran in this frame
  std::shared_ptr<const SvmModel> model;  ///< set when gasvm was used
};

/// Seeds of the independent random streams inside one frame.
struct FrameSeeds {
  std::uint64_t info, probe, noise, gamma, ga;
  static FrameSeeds derive(std::uint64_t frame_seed);
};

/// Transmitted frame and matched-filter output, before any decoding.
struct FrameSignals {
  SymbolSeq frame;  ///< probe followed by information symbols
  AlignedOutput a;
  std::size_t probe_len = 0;
};

/// Noise on samples that can reach an information decision or feature window
/// is drawn from its own stream, starting at a fixed offset before the first
/// information symbol. Runs with different probe lengths but the same frame
/// seed therefore see identical information bits and identical noise there.
FrameSignals synthesize_frame(const SimConfig& cfg, const MultipathChannel& ch, double sigma_w,
                              std::uint64_t frame_seed);

/// Sliding-window training vectors of the probe part.
TrainingSet probe_training_set(const FrameSignals& s);

FrameResult simulate_frame(const SimConfig& cfg, const MultipathChannel& ch, double sigma_w,
                           std::uint64_t frame_seed, const GaSvmPlan& plan = {});

/// GA (on at most cfg.ga_subsample vectors) then SVM training on the full set.
struct GaSvmFit {
  std::optional<GaResult> ga;  ///< empty when the hyperparameters were fixed
  std::shared_ptr<const SvmModel> model;
};
GaSvmFit fit_gasvm(const SimConfig& cfg, const TrainingSet& train, std::uint64_t ga_seed,
                   const std::optional<SvmHyper>& fixed_hyper = std::nullopt);

struct BerPoint {
  double snr_db = 0.0;
  std::string decoder;
  std::size_t bits = 0;
  std::size_t errors = 0;
  double ber = 0.0;
  std::optional<double> theory_ber;
};

struct PointMeta {
  double snr_db = 0.0;
  NoiseLevel noise;
  std::size_t frames = 0;
  std::size_t skipped_frames = 0;
  std::optional<SvmHyper> ga_best;
  std::optional<GaResult> ga;  ///< GA run of the first frame, when one ran
};

struct SweepResult {
  std::vector<BerPoint> points;  ///< ordered by SNR, then decoder order
  std::vector<PointMeta> meta;
  std::vector<double> gamma_draws;  ///< per-frame gamma (time-varying sweeps)
  bool time_varying = false;
};

SweepResult run_static_ber(const SimConfig& cfg);
SweepResult run_time_varying_ber(const SimConfig& cfg);

struct TrainSizeRow {
  double snr_db = 0.0;
  ProbeKind probe_kind = ProbeKind::All7;
  std::size_t probe_len = 0;
  std::size_t bits = 0;
  std::size_t errors = 0;
  double ber = 0.0;
  std::optional<double> theory_ber;
};

/// gasvm with the All7 and All9 probes on identical per-frame seeds.
std::vector<TrainSizeRow> run_training_size_comparison(const SimConfig& cfg);

/// Binomial standard deviation sqrt(p (1 - p) / n).
double binomial_sigma(double p, std::size_t n);

}  // namespace cbwcs

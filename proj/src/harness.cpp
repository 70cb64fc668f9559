#include "cbwcs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "cbwcs/rng.hpp"

namespace cbwcs {

namespace {

// Stream labels under a frame seed.
constexpr std::uint64_t kInfoStream = 1;
constexpr std::uint64_t kProbeStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kGammaStream = 4;
constexpr std::uint64_t kGaStream = 5;
constexpr std::uint64_t kSubsampleStream = 6;

// Symbols before the first information symbol whose noise is drawn from the
// information stream: matched-filter span n_p plus the feature context.
constexpr int kNoiseLead = kContextSymbols + 1;

constexpr std::size_t kMaxConsecutiveSkips = 50;

MultipathChannel static_channel(const SimConfig& cfg) {
  if (!cfg.channel.gamma) throw std::invalid_argument("static sweep needs gamma");
  return make_exponential_channel(cfg.channel.delays, *cfg.channel.gamma);
}

}  // namespace

std::string_view to_string(DecoderKind d) {
  switch (d) {
    case DecoderKind::Zero: return "zero";
    case DecoderKind::Past: return "past";
    case DecoderKind::PastFut1Genie: return "past_fut1_genie";
    case DecoderKind::OptimalGenie: return "optimal_genie";
    case DecoderKind::GaSvm: return "gasvm";
  }
  return "?";
}

DecoderKind parse_decoder(std::string_view s) {
  for (auto d : {DecoderKind::Zero, DecoderKind::Past, DecoderKind::PastFut1Genie,
                 DecoderKind::OptimalGenie, DecoderKind::GaSvm}) {
    if (s == to_string(d)) return d;
  }
  throw std::invalid_argument("unknown decoder '" + std::string(s) + "'");
}

bool is_genie(DecoderKind d) {
  return d == DecoderKind::PastFut1Genie || d == DecoderKind::OptimalGenie;
}

std::optional<ThresholdKind> threshold_kind(DecoderKind d) {
  switch (d) {
    case DecoderKind::Zero: return ThresholdKind::Zero;
    case DecoderKind::Past: return ThresholdKind::PastOnly;
    case DecoderKind::PastFut1Genie: return ThresholdKind::PastPlusOneFuture;
    case DecoderKind::OptimalGenie: return ThresholdKind::OptimalGenie;
    case DecoderKind::GaSvm: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(Retune r) {
  switch (r) {
    case Retune::PerRun: return "per_run";
    case Retune::PerFrame: return "per_frame";
    case Retune::HyperPerRun: return "hyper_per_run";
  }
  return "?";
}

Retune parse_retune(std::string_view s) {
  if (s == "per_run") return Retune::PerRun;
  if (s == "per_frame") return Retune::PerFrame;
  if (s == "hyper_per_run") return Retune::HyperPerRun;
  throw std::invalid_argument("unknown retune mode '" + std::string(s) + "'");
}

std::string_view to_string(SnrAxis a) { return a == SnrAxis::Filtered ? "filtered" : "ebn0"; }

SnrAxis parse_snr_axis(std::string_view s) {
  if (s == "filtered") return SnrAxis::Filtered;
  if (s == "ebn0") return SnrAxis::EbN0;
  throw std::invalid_argument("unknown snr axis '" + std::string(s) + "'");
}

void FrameConfig::normalize() {
  probe_len = probe_length(probe_kind, probe_len);
}

void SimConfig::validate() const {
  if (snr_points.empty()) throw std::invalid_argument("SimConfig: snr_points is empty");
  if (decoders.empty()) throw std::invalid_argument("SimConfig: no decoders selected");
  for (std::size_t a = 0; a < snr_points.size(); ++a) {
    for (std::size_t b = a + 1; b < snr_points.size(); ++b) {
      if (snr_points[a] == snr_points[b]) throw std::invalid_argument("SimConfig: duplicate SNR point");
    }
  }
  for (std::size_t a = 0; a < decoders.size(); ++a) {
    for (std::size_t b = a + 1; b < decoders.size(); ++b) {
      if (decoders[a] == decoders[b]) throw std::invalid_argument("SimConfig: duplicate decoder");
    }
  }
  if (frame.info_len == 0) throw std::invalid_argument("SimConfig: info_len must be positive");
  if (frame.probe_len < static_cast<std::size_t>(kWindowSymbols)) {
    throw std::invalid_argument("SimConfig: probe shorter than one feature window");
  }
  if (frame.probe_kind != ProbeKind::Random &&
      frame.probe_len != probe_length(frame.probe_kind, 0)) {
    throw std::invalid_argument("SimConfig: probe_len does not match the exhaustive probe kind");
  }
  if (min_bits < frame.info_len) {
    throw std::invalid_argument("SimConfig: min_bits below one frame of information bits");
  }
  if (channel.delays.empty()) throw std::invalid_argument("SimConfig: no path delays");
  if (channel.gamma_range && channel.gamma_range->first > channel.gamma_range->second) {
    throw std::invalid_argument("SimConfig: gamma_range is reversed");
  }
  if (basis.n_p < kContextSymbols &&
      std::find(decoders.begin(), decoders.end(), DecoderKind::GaSvm) != decoders.end()) {
    throw std::invalid_argument("SimConfig: gasvm needs n_p >= 3 for trailing feature windows");
  }
  if (threads < 1) throw std::invalid_argument("SimConfig: threads must be >= 1");
  if (ga_subsample < 2 * static_cast<std::size_t>(ga.cv_folds)) {
    throw std::invalid_argument("SimConfig: ga_subsample too small for the fold count");
  }
  ga.validate();
}

double basis_energy(const BasisParams& p) {
  // Discrete energy of the taps the receiver actually uses; the filtered
  // noise variance is sigma_w^2 times this.
  const auto taps = sampled_basis(p);
  double e = 0.0;
  for (double v : taps) e += v * v;
  return e * p.dt();
}

double received_energy_per_bit(const MultipathChannel& ch, const BasisParams& p) {
  double e = 0.0;
  for (const auto& a : ch.taps()) {
    for (const auto& b : ch.taps()) {
      e += a.alpha * b.alpha * isi_coefficient(std::abs(a.tau - b.tau), 0, 1.0, p);
    }
  }
  return e;
}

NoiseLevel noise_for_snr(double snr_db, SnrAxis axis, const MultipathChannel& calibration,
                         const BasisParams& p) {
  NoiseLevel n;
  n.snr_db = snr_db;
  n.P = symbol_energy(calibration, p);
  const double lin = std::pow(10.0, snr_db / 10.0);
  const double ep = basis_energy(p);
  if (axis == SnrAxis::Filtered) {
    n.sigma_decision = n.P / std::sqrt(2.0 * lin);
    n.sigma_w = n.sigma_decision / std::sqrt(ep);
  } else {
    n.sigma_w = std::sqrt(received_energy_per_bit(calibration, p) / (2.0 * lin));
    n.sigma_decision = n.sigma_w * std::sqrt(ep);
  }
  return n;
}

FrameSeeds FrameSeeds::derive(std::uint64_t frame_seed) {
  return {derive_seed(frame_seed, {kInfoStream}), derive_seed(frame_seed, {kProbeStream}),
          derive_seed(frame_seed, {kNoiseStream}), derive_seed(frame_seed, {kGammaStream}),
          derive_seed(frame_seed, {kGaStream})};
}

FrameSignals synthesize_frame(const SimConfig& cfg, const MultipathChannel& ch, double sigma_w,
                              std::uint64_t frame_seed) {
  const auto seeds = FrameSeeds::derive(frame_seed);
  const auto& p = cfg.basis;

  Rng probe_rng(seeds.probe);
  SymbolSeq frame = make_probe(cfg.frame.probe_kind, cfg.frame.probe_order, cfg.frame.probe_len, probe_rng);
  const std::size_t probe_len = frame.size();

  Rng info_rng(seeds.info);
  std::bernoulli_distribution coin(0.5);
  std::vector<int> info(cfg.frame.info_len);
  for (auto& s : info) s = coin(info_rng) ? 1 : -1;
  frame.append(SymbolSeq(std::move(info)));

  const auto x = generate_baseband(frame, p);
  auto r = propagate(x, ch, {cfg.channel.allow_rounding});

  if (sigma_w > 0.0) {
    const std::ptrdiff_t lead =
        static_cast<std::ptrdiff_t>(probe_len) - p.n_p - kNoiseLead;
    const std::ptrdiff_t split = std::clamp<std::ptrdiff_t>(
        r.t0_index + lead * p.n_r, 0, static_cast<std::ptrdiff_t>(r.size()));
    const auto split_u = static_cast<std::size_t>(split);

    SampledWaveform head{{r.samples.begin(), r.samples.begin() + split}, r.sample_rate, 0};
    SampledWaveform tail{{r.samples.begin() + split, r.samples.end()}, r.sample_rate, 0};
    head = add_awgn(head, {sigma_w, derive_seed(seeds.noise, {0})});
    tail = add_awgn(tail, {sigma_w, derive_seed(seeds.noise, {1})});
    std::copy(head.samples.begin(), head.samples.end(), r.samples.begin());
    std::copy(tail.samples.begin(), tail.samples.end(), r.samples.begin() + static_cast<std::ptrdiff_t>(split_u));
  }

  return FrameSignals{std::move(frame), matched_filter(r, p), probe_len};
}

TrainingSet probe_training_set(const FrameSignals& s) {
  return TrainingSet{build_training_set(s.frame.slice(0, s.probe_len), s.a)};
}

GaSvmFit fit_gasvm(const SimConfig& cfg, const TrainingSet& train, std::uint64_t ga_seed,
                   const std::optional<SvmHyper>& fixed_hyper) {
  train.validate();
  const FeatureScaler scaler =
      cfg.scale ? FeatureScaler::fit(train.vectors) : FeatureScaler::identity(train.dim());

  GaSvmFit fit;
  SvmHyper hyper;
  if (fixed_hyper) {
    hyper = *fixed_hyper;
  } else {
    std::vector<std::size_t> idx(train.m());
    std::iota(idx.begin(), idx.end(), 0);
    if (idx.size() > cfg.ga_subsample) {
      Rng rng(derive_seed(ga_seed, {kSubsampleStream}));
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(cfg.ga_subsample);
      std::sort(idx.begin(), idx.end());
    }
    TrainingSet sub;
    sub.vectors.reserve(idx.size());
    for (auto i : idx) sub.vectors.push_back(scaler.apply(train.vectors[i]));

    GaConfig ga = cfg.ga;
    ga.seed = ga_seed;
    fit.ga = evolve(sub, ga, cfg.svm);
    hyper = fit.ga->best;
  }
  fit.model = std::make_shared<const SvmModel>(train_svm(train, hyper, scaler, cfg.svm));
  return fit;
}

FrameResult simulate_frame(const SimConfig& cfg, const MultipathChannel& ch, double sigma_w,
                           std::uint64_t frame_seed, const GaSvmPlan& plan) {
  const auto sig = synthesize_frame(cfg, ch, sigma_w, frame_seed);
  const std::size_t first = sig.probe_len;
  const std::size_t count = sig.frame.size() - first;

  FrameResult res;
  res.gamma = ch.gamma().value_or(0.0);
  res.truth.assign(sig.frame.values().begin() + static_cast<std::ptrdiff_t>(first),
                   sig.frame.values().end());

  const bool want_svm =
      std::find(cfg.decoders.begin(), cfg.decoders.end(), DecoderKind::GaSvm) != cfg.decoders.end();
  if (want_svm) {
    if (plan.model) {
      res.model = plan.model;
    } else {
      try {
        auto fit = fit_gasvm(cfg, probe_training_set(sig), FrameSeeds::derive(frame_seed).ga, plan.hyper);
        res.ga = std::move(fit.ga);
        res.model = std::move(fit.model);
      } catch (const SvmError& e) {
        res.svm_failed = true;
        res.svm_error = e.what();
        return res;
      }
    }
  }

  const IsiProfile isi = IsiProfile::compute(ch, cfg.basis, cfg.isi_model);
  const SymbolContext truth(sig.frame.view());
  const int hist = isi.past_span();
  const auto probe_view = sig.frame.view().subspan(0, first);
  const auto seed_tail = probe_view.subspan(first - std::min<std::size_t>(first, static_cast<std::size_t>(hist)));

  for (auto d : cfg.decoders) {
    if (auto kind = threshold_kind(d)) {
      DecodeState state(hist);
      state.seed(seed_tail);
      res.decoded.push_back(decode_symbols(*kind, sig.a, isi, state, &truth,
                                           static_cast<std::ptrdiff_t>(first), count));
    } else {
      std::vector<int> out(count);
      for (std::size_t k = 0; k < count; ++k) {
        const auto fv = extract_features(sig.a, static_cast<std::ptrdiff_t>(first + k));
        out[k] = res.model->predict(fv.values);
      }
      res.decoded.push_back(std::move(out));
    }
  }
  return res;
}

double binomial_sigma(double p, std::size_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

namespace {

struct PointRun {
  std::vector<std::size_t> errors;
  std::size_t bits = 0;
  PointMeta meta;
  std::vector<double> gammas;
};

// One SNR point: frames in order, optionally simulated in parallel batches.
// Aggregation walks the frames in index order, so the stopping frame and the
// totals do not depend on the thread count.
PointRun run_point(const SimConfig& cfg, std::size_t point, const NoiseLevel& noise,
                   bool time_varying) {
  const std::size_t nd = cfg.decoders.size();
  PointRun run;
  run.errors.assign(nd, 0);
  run.meta.snr_db = noise.snr_db;
  run.meta.noise = noise;

  const std::optional<MultipathChannel> fixed =
      time_varying ? std::nullopt : std::optional<MultipathChannel>(static_channel(cfg));
  auto channel_for = [&](std::uint64_t frame_seed) {
    if (fixed) return *fixed;
    Rng g(FrameSeeds::derive(frame_seed).gamma);
    const double gamma = draw_time_varying(*cfg.channel.gamma_range, g);
    return make_exponential_channel(cfg.channel.delays, gamma);
  };

  GaSvmPlan plan;
  bool plan_ready =
      std::find(cfg.decoders.begin(), cfg.decoders.end(), DecoderKind::GaSvm) == cfg.decoders.end();
  std::size_t consecutive_skips = 0;
  const std::size_t max_bits = cfg.effective_max_bits();

  auto done = [&] {
    if (run.bits < cfg.min_bits) return false;
    if (run.bits >= max_bits) return true;
    return *std::min_element(run.errors.begin(), run.errors.end()) >= cfg.min_errors;
  };

  auto absorb = [&](FrameResult&& fr) {
    if (time_varying) run.gammas.push_back(fr.gamma);
    if (fr.svm_failed) {
      ++run.meta.skipped_frames;
      if (++consecutive_skips >= kMaxConsecutiveSkips) {
        throw std::runtime_error("SVM training failed on " + std::to_string(consecutive_skips) +
                                 " consecutive frames: " + fr.svm_error);
      }
      return;
    }
    consecutive_skips = 0;
    ++run.meta.frames;
    for (std::size_t d = 0; d < nd; ++d) {
      const auto& dec = fr.decoded[d];
      for (std::size_t k = 0; k < dec.size(); ++k) run.errors[d] += dec[k] != fr.truth[k];
    }
    run.bits += fr.truth.size();
    if (!plan_ready && fr.model) {
      if (fr.ga) {
        run.meta.ga = fr.ga;
        run.meta.ga_best = fr.ga->best;
      }
      if (cfg.retune == Retune::PerRun) {
        plan.model = fr.model;
        plan_ready = true;
      } else if (cfg.retune == Retune::HyperPerRun) {
        plan.hyper = fr.model->hyper();
        plan_ready = true;
      } else {
        plan_ready = fr.ga.has_value();
      }
    }
  };

  auto job = [&](std::size_t frame, const GaSvmPlan& pl) {
    const auto fs = derive_seed(cfg.seed, {point, frame});
    return simulate_frame(cfg, channel_for(fs), noise.sigma_w, fs, pl);
  };

  std::size_t frame = 0;
  // Frames run one at a time until the plan is settled (the first frame
  // normally), then in batches of `threads`.
  while (!done()) {
    if (!plan_ready || cfg.threads == 1) {
      absorb(job(frame++, plan));
      continue;
    }
    const auto batch = static_cast<std::size_t>(cfg.threads);
    std::vector<std::future<FrameResult>> futs;
    futs.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) {
      futs.push_back(std::async(std::launch::async, job, frame + k, plan));
    }
    for (auto& f : futs) {
      auto fr = f.get();
      if (!done()) absorb(std::move(fr));
    }
    frame += batch;
  }
  return run;
}

SweepResult run_sweep(const SimConfig& cfg, bool time_varying) {
  cfg.validate();
  const MultipathChannel calibration =
      time_varying ? make_exponential_channel(cfg.channel.delays, cfg.channel.reference_gamma)
                   : static_channel(cfg);

  SweepResult out;
  out.time_varying = time_varying;
  for (std::size_t pi = 0; pi < cfg.snr_points.size(); ++pi) {
    const auto noise = noise_for_snr(cfg.snr_points[pi], cfg.snr_axis, calibration, cfg.basis);
    auto run = run_point(cfg, pi, noise, time_varying);
    const double theory = theoretical_ber(noise.P, noise.sigma_decision);
    for (std::size_t d = 0; d < cfg.decoders.size(); ++d) {
      BerPoint bp;
      bp.snr_db = noise.snr_db;
      bp.decoder = std::string(to_string(cfg.decoders[d]));
      bp.bits = run.bits;
      bp.errors = run.errors[d];
      bp.ber = run.bits ? static_cast<double>(bp.errors) / static_cast<double>(run.bits) : 0.0;
      bp.theory_ber = theory;
      out.points.push_back(std::move(bp));
    }
    out.meta.push_back(std::move(run.meta));
    out.gamma_draws.insert(out.gamma_draws.end(), run.gammas.begin(), run.gammas.end());
  }
  return out;
}

}  // namespace

SweepResult run_static_ber(const SimConfig& cfg) {
  if (!cfg.channel.gamma) throw std::invalid_argument("run_static_ber: gamma not set");
  return run_sweep(cfg, false);
}

SweepResult run_time_varying_ber(const SimConfig& cfg) {
  if (!cfg.channel.gamma_range) throw std::invalid_argument("run_time_varying_ber: gamma_range not set");
  return run_sweep(cfg, true);
}

std::vector<TrainSizeRow> run_training_size_comparison(const SimConfig& cfg) {
  std::vector<std::vector<TrainSizeRow>> per_kind;
  for (auto kind : {ProbeKind::All7, ProbeKind::All9}) {
    SimConfig c = cfg;
    c.frame.probe_kind = kind;
    c.frame.normalize();
    c.decoders = {DecoderKind::GaSvm};
    const auto sweep = run_static_ber(c);
    std::vector<TrainSizeRow> rows;
    for (const auto& bp : sweep.points) {
      rows.push_back({bp.snr_db, kind, c.frame.probe_len, bp.bits, bp.errors, bp.ber, bp.theory_ber});
    }
    per_kind.push_back(std::move(rows));
  }
  std::vector<TrainSizeRow> out;
  for (std::size_t i = 0; i < per_kind.front().size(); ++i) {
    for (const auto& rows : per_kind) out.push_back(rows[i]);
  }
  return out;
}

}  // namespace cbwcs

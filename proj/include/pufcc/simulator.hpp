#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pufcc/codec.hpp"
#include "pufcc/fano.hpp"
#include "pufcc/helper_data.hpp"
#include "pufcc/rng.hpp"
#include "pufcc/sram_model.hpp"
#include "pufcc/stats.hpp"
#include "pufcc/viterbi.hpp"

namespace pufcc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  CodeSpec code;
  std::optional<double> p_t;            // absent = use every extracted bit
  DecoderKind decoder = DecoderKind::viterbi;
  InputMode input = InputMode::soft;
  std::size_t list_size = 1;
  int readouts = 1;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  int info_len = kKeyLength;
  ModelParams model;
  FanoConfig fano;
  bool fixed_device = false;   // reuse one sampled device, resample noise only
  bool noiseless = false;      // testing aid: responses equal the reference bits

  void validate() const {
    try {
      code.validate();
      model.validate();
      fano.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (readouts < 1) throw ConfigError("readouts must be >= 1");
    if (list_size < 1) throw ConfigError("list size must be >= 1");
    if (info_len < 1) throw ConfigError("info length must be >= 1");
    if (p_t && !(*p_t > 0.0 && *p_t <= 0.5)) throw ConfigError("p_T must be in (0,0.5]");
    if (decoder == DecoderKind::fano && list_size != 1)
      throw ConfigError("fano decoder supports list size 1 only");
  }
};

struct ExperimentResult {
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
  double ker = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t effort_sum = 0;
  double mean_decoder_effort = 0.0;
  double wall_s = 0.0;
};

struct TrialOutcome {
  bool key_error = false;
  std::uint64_t effort = 0;
};

namespace detail {

// Stream id reserved for the device in fixed-device mode; trial streams use
// the trial index directly.
inline constexpr std::uint64_t kDeviceStream = std::uint64_t{0xde} << 56;

inline std::vector<SramCell> sample_device(Rng& rng, const ExperimentConfig& cfg,
                                           std::size_t needed) {
  std::vector<SramCell> cells;
  cells.reserve(needed);
  if (cfg.p_t) {
    std::size_t draws = 0;
    const std::size_t cap = 10000 * needed;
    while (cells.size() < needed) {
      if (++draws > cap) throw ShortageError(needed, cells.size());
      SramCell c = sample_cell(rng, cfg.model);
      if (c.p_e < *cfg.p_t) cells.push_back(c);
    }
  } else {
    for (std::size_t i = 0; i < needed; ++i) cells.push_back(sample_cell(rng, cfg.model));
  }
  return cells;
}

}  // namespace detail

// One full extraction: sample a device, enroll, read out, reconstruct.  A
// pure function of (cfg.seed, trial_index).
inline TrialOutcome run_trial(const ExperimentConfig& cfg, std::uint64_t trial_index,
                              const Trellis* shared_trellis = nullptr) {
  const std::size_t needed = static_cast<std::size_t>(cfg.code.codeword_length(cfg.info_len));
  Rng rng = Rng::stream(cfg.seed, trial_index);

  std::vector<SramCell> cells;
  if (cfg.fixed_device) {
    Rng dev_rng = Rng::stream(cfg.seed, detail::kDeviceStream);
    cells = detail::sample_device(dev_rng, cfg, needed);
  } else {
    cells = detail::sample_device(rng, cfg, needed);
  }

  BitVec key = random_info(rng, cfg.info_len);
  BitVec cw = encode(key, cfg.code);
  BitVec offset(needed);
  for (std::size_t i = 0; i < needed; ++i) {
    offset[i] = cw[i] ^ static_cast<std::uint8_t>(cells[i].ref_bit);
  }

  // m readouts
  std::vector<std::vector<int>> resp(cfg.readouts, std::vector<int>(needed));
  for (int j = 0; j < cfg.readouts; ++j) {
    for (std::size_t i = 0; i < needed; ++i) {
      resp[j][i] = cfg.noiseless ? cells[i].ref_bit : readout(cells[i], rng);
    }
  }

  SoftSequence soft(needed, 0.0);
  if (cfg.input == InputMode::soft) {
    for (std::size_t i = 0; i < needed; ++i) {
      double s = 0.0;
      for (int j = 0; j < cfg.readouts; ++j) s += soft_value(offset[i], resp[j][i], cells[i].p_e);
      soft[i] = std::clamp(s, -kLlrMax, kLlrMax);
    }
  } else {
    std::vector<int> voted = majority_vote(resp);
    for (std::size_t i = 0; i < needed; ++i) {
      soft[i] = (offset[i] ^ voted[i]) ? -1.0 : 1.0;
    }
  }

  TrialOutcome out;
  if (cfg.decoder == DecoderKind::viterbi) {
    DecodeResult dr;
    if (shared_trellis != nullptr) {
      dr = list_decode(soft, *shared_trellis, cfg.list_size);
    } else {
      Trellis trellis(cfg.code, cfg.info_len);
      dr = list_decode(soft, trellis, cfg.list_size);
    }
    out.effort = static_cast<std::uint64_t>(cfg.code.num_states()) *
                 static_cast<std::uint64_t>(cfg.info_len + cfg.code.mu);
    // candidates are in likelihood order; accept the first digest match
    // (bit-equivalent fast path: compare against the enrolled key directly)
    out.key_error = true;
    for (const auto& cand : dr.candidates) {
      if (cand.info == key) {
        out.key_error = false;
        break;
      }
    }
  } else {
    std::vector<int> received(needed);
    std::vector<double> per_bit_p(needed);
    for (std::size_t i = 0; i < needed; ++i) {
      received[i] = soft[i] < 0.0 ? 1 : 0;
      if (cfg.input == InputMode::soft) {
        per_bit_p[i] = 1.0 / (1.0 + std::exp(std::fabs(soft[i])));
      } else {
        per_bit_p[i] = cells[i].p_e;  // placeholder, replaced by the mean below
      }
    }
    if (cfg.input == InputMode::hard) {
      double p_avg = 0.0;
      for (std::size_t i = 0; i < needed; ++i) p_avg += cells[i].p_e;
      p_avg = std::clamp(p_avg / static_cast<double>(needed), 1e-9, 0.5 - 1e-12);
      std::fill(per_bit_p.begin(), per_bit_p.end(), p_avg);
    }
    FanoOutcome fo = fano_decode(received, per_bit_p, cfg.code, cfg.info_len, cfg.fano);
    out.effort = fo.visits;
    out.key_error = !(fo.success && fo.info_estimate == key);
  }
  return out;
}

// Aggregate run_trial over the configured number of trials.  Workers pull
// fixed-size chunks; counters are commutative, so any worker count produces
// the same result.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers = 0) {
  cfg.validate();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = std::chrono::steady_clock::now();

  Trellis trellis(cfg.code, cfg.info_len);  // immutable, shared across workers

  const std::uint64_t chunk = 256;
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> errors{0};
  std::atomic<std::uint64_t> effort{0};

  auto worker = [&]() {
    std::uint64_t local_err = 0, local_eff = 0;
    for (;;) {
      std::uint64_t begin = next_chunk.fetch_add(chunk);
      if (begin >= cfg.trials) break;
      std::uint64_t end = std::min(cfg.trials, begin + chunk);
      for (std::uint64_t i = begin; i < end; ++i) {
        TrialOutcome t = run_trial(cfg, i, &trellis);
        local_err += t.key_error ? 1 : 0;
        local_eff += t.effort;
      }
    }
    errors.fetch_add(local_err);
    effort.fetch_add(local_eff);
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult res;
  res.errors = errors.load();
  res.trials = cfg.trials;
  res.ker = static_cast<double>(res.errors) / static_cast<double>(res.trials);
  BinomialCi ci = clopper_pearson(res.errors, res.trials);
  res.ci_low = ci.low;
  res.ci_high = ci.high;
  res.effort_sum = effort.load();
  res.mean_decoder_effort = static_cast<double>(res.effort_sum) / static_cast<double>(res.trials);
  res.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Human-facing KER rendering; zero observed errors reports an upper bound.
inline std::string ker_display(const ExperimentResult& r) {
  std::ostringstream os;
  if (r.errors == 0) {
    os << "<" << std::scientific << 1.0 / static_cast<double>(r.trials);
  } else {
    os << std::scientific << r.ker;
  }
  return os.str();
}

struct SweepAxis {
  enum class Kind { p_t, readouts, code } kind;
  std::vector<double> p_t_values;
  std::vector<int> readout_values;
  std::vector<CodeSpec> code_values;

  std::size_t size() const {
    switch (kind) {
      case Kind::p_t: return p_t_values.size();
      case Kind::readouts: return readout_values.size();
      case Kind::code: return code_values.size();
    }
    return 0;
  }
};

struct SweepRow {
  ExperimentConfig cfg;
  ExperimentResult result;
};

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const SweepAxis& axis,
                                       unsigned workers = 0) {
  if (axis.size() == 0) throw ConfigError("sweep axis is empty");
  std::vector<SweepRow> rows;
  rows.reserve(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) {
    ExperimentConfig cfg = base;
    switch (axis.kind) {
      case SweepAxis::Kind::p_t: cfg.p_t = axis.p_t_values[i]; break;
      case SweepAxis::Kind::readouts: cfg.readouts = axis.readout_values[i]; break;
      case SweepAxis::Kind::code: cfg.code = axis.code_values[i]; break;
    }
    rows.push_back({cfg, run_experiment(cfg, workers)});
  }
  return rows;
}

inline std::string csv_header() {
  return "code,mu,pt,decoder,input,list,readouts,trials,errors,ker,ci_low,ci_high,seed,wall_s";
}

inline std::string csv_row(const ExperimentConfig& cfg, const ExperimentResult& r,
                           bool include_wall = true) {
  std::ostringstream os;
  os << '"' << cfg.code.to_text() << '"' << "," << cfg.code.mu << ",";
  if (cfg.p_t) os << *cfg.p_t;
  os << "," << to_string(cfg.decoder) << "," << to_string(cfg.input) << "," << cfg.list_size << ","
     << cfg.readouts << "," << r.trials << "," << r.errors << "," << std::scientific << r.ker << ","
     << r.ci_low << "," << r.ci_high << "," << cfg.seed << ",";
  if (include_wall) os << std::defaultfloat << r.wall_s;
  return os.str();
}

// Analytic ignored-bit fraction over a threshold grid; rows "pt,ignored_fraction".
inline std::vector<std::pair<double, double>> ignored_fraction_report(
    const std::vector<double>& p_t_grid, const ModelParams& params = {}) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(p_t_grid.size());
  for (double p_t : p_t_grid) rows.emplace_back(p_t, ignored_fraction(p_t, params));
  return rows;
}

}  // namespace pufcc

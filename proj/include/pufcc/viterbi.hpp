#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "pufcc/codec.hpp"
#include "pufcc/sram_model.hpp"

namespace pufcc {

namespace detail {
inline constexpr double kNegInf = -1e300;
inline constexpr double kUnreachable = -1e299;
}  // namespace detail

// Terminated trellis of a rate-1/n code: info_len unconstrained segments
// followed by mu termination segments whose input is forced to zero.  State
// transition tables are shared by every decode; the object is immutable.
class Trellis {
 public:
  Trellis(const CodeSpec& spec, int info_len) : spec_(spec), info_len_(info_len) {
    spec_.validate();
    if (info_len < 1) throw std::invalid_argument("Trellis: info_len must be >= 1");
    const int mu = spec_.mu;
    const std::size_t states = spec_.num_states();
    out_.resize(states * 2);
    next_.resize(states * 2);
    const std::uint32_t state_mask = static_cast<std::uint32_t>(states - 1);
    for (std::uint32_t s = 0; s < states; ++s) {
      for (std::uint32_t b = 0; b < 2; ++b) {
        std::uint32_t window = (b << mu) | s;
        std::uint8_t pattern = 0;
        for (int j = 0; j < spec_.n; ++j) {
          pattern = static_cast<std::uint8_t>(
              (pattern << 1) | __builtin_parity(window & spec_.tap_mask(j)));
        }
        out_[s * 2 + b] = pattern;
        next_[s * 2 + b] = ((b << (mu - 1)) | (s >> 1)) & state_mask;
      }
    }
  }

  const CodeSpec& spec() const { return spec_; }
  int info_len() const { return info_len_; }
  int total_segments() const { return info_len_ + spec_.mu; }
  std::size_t num_states() const { return spec_.num_states(); }

  std::uint8_t edge_output(std::uint32_t state, std::uint32_t input) const {
    return out_[state * 2 + input];
  }
  std::uint32_t edge_next(std::uint32_t state, std::uint32_t input) const {
    return next_[state * 2 + input];
  }

  // Number of states reachable at segment boundary t (0 <= t <= L + mu):
  // the opening ramps up, the termination funnel narrows back to one.
  std::size_t reachable_states(int t) const {
    int open = std::min(t, spec_.mu);
    int closed = std::max(0, t - info_len_);
    return std::size_t{1} << std::max(0, open - closed);
  }

 private:
  CodeSpec spec_;
  int info_len_;
  std::vector<std::uint8_t> out_;
  std::vector<std::uint32_t> next_;
};

struct Candidate {
  BitVec info;
  double metric;
};

struct DecodeResult {
  BitVec info_estimate;
  double path_metric = 0.0;
  std::vector<Candidate> candidates;  // non-increasing metric, first = ML
};

namespace detail {

// One forward sweep.  dec[(t-1)*S + s] is the dropped register bit of the
// surviving predecessor of the node at boundary t in state s; delta holds the
// survivor-vs-runner-up metric gap when requested (list decoding).
struct ForwardPass {
  std::vector<std::uint8_t> dec;
  std::vector<double> delta;
  double best_metric;
};

inline ForwardPass viterbi_forward(const SoftSequence& soft, const Trellis& trellis,
                                   bool want_delta) {
  const CodeSpec& spec = trellis.spec();
  const int n = spec.n;
  const int mu = spec.mu;
  const int T = trellis.total_segments();
  const int L = trellis.info_len();
  if (soft.size() != static_cast<std::size_t>(n) * T)
    throw std::invalid_argument("viterbi_decode: soft length must be n*(L+mu)");

  const std::size_t S = trellis.num_states();
  const std::uint32_t low_mask = static_cast<std::uint32_t>(S - 1);
  ForwardPass fp;
  fp.dec.resize(static_cast<std::size_t>(T) * S);
  if (want_delta) fp.delta.assign(static_cast<std::size_t>(T) * S, std::numeric_limits<double>::infinity());

  std::vector<double> metric(S, kNegInf), next_metric(S);
  metric[0] = 0.0;
  const int npat = 1 << n;
  double pm[8];
  for (int t = 0; t < T; ++t) {
    for (int p = 0; p < npat; ++p) {
      double m = 0.0;
      for (int j = 0; j < n; ++j) {
        double s = soft[static_cast<std::size_t>(t) * n + j];
        m += ((p >> (n - 1 - j)) & 1) ? -s : s;
      }
      pm[p] = m;
    }
    std::uint8_t* dec_row = fp.dec.data() + static_cast<std::size_t>(t) * S;
    double* delta_row = want_delta ? fp.delta.data() + static_cast<std::size_t>(t) * S : nullptr;
    const bool term = t >= L;
    for (std::uint32_t s2 = 0; s2 < S; ++s2) {
      const std::uint32_t b = s2 >> (mu - 1);
      if (term && b) {
        next_metric[s2] = kNegInf;
        dec_row[s2] = 0;
        continue;
      }
      const std::uint32_t p0 = (s2 << 1) & low_mask;
      const std::uint32_t p1 = p0 | 1u;
      const double m0 = metric[p0] + pm[trellis.edge_output(p0, b)];
      const double m1 = metric[p1] + pm[trellis.edge_output(p1, b)];
      const bool take1 = m1 > m0;  // tie keeps dropped bit 0
      next_metric[s2] = take1 ? m1 : m0;
      dec_row[s2] = take1 ? 1 : 0;
      if (want_delta && metric[p0] > kUnreachable && metric[p1] > kUnreachable) {
        delta_row[s2] = std::fabs(m0 - m1);
      }
    }
    metric.swap(next_metric);
  }
  fp.best_metric = metric[0];
  return fp;
}

inline BitVec info_from_states(const std::vector<std::uint32_t>& states, int L, int mu) {
  BitVec info(L);
  for (int r = 0; r < L; ++r) info[r] = static_cast<std::uint8_t>(states[r + 1] >> (mu - 1));
  return info;
}

inline std::vector<std::uint32_t> traceback_states(const ForwardPass& fp, const Trellis& trellis) {
  const int T = trellis.total_segments();
  const std::size_t S = trellis.num_states();
  const std::uint32_t low_mask = static_cast<std::uint32_t>(S - 1);
  std::vector<std::uint32_t> states(T + 1);
  states[T] = 0;
  for (int t = T; t >= 1; --t) {
    std::uint32_t s = states[t];
    std::uint32_t d = fp.dec[static_cast<std::size_t>(t - 1) * S + s];
    states[t - 1] = ((s << 1) & low_mask) | d;
  }
  return states;
}

}  // namespace detail

// Maximum-likelihood decode under the correlation metric sum s_i * (1-2c_i).
inline DecodeResult viterbi_decode(const SoftSequence& soft, const Trellis& trellis) {
  auto fp = detail::viterbi_forward(soft, trellis, /*want_delta=*/false);
  auto states = detail::traceback_states(fp, trellis);
  DecodeResult res;
  res.info_estimate = detail::info_from_states(states, trellis.info_len(), trellis.spec().mu);
  res.path_metric = fp.best_metric;
  res.candidates.push_back({res.info_estimate, res.path_metric});
  return res;
}

// Serial list extension: repeatedly branch off at the smallest stored metric
// gap along an already-found path, yielding the globally best code sequences
// in non-increasing metric order.
inline DecodeResult list_decode(const SoftSequence& soft, const Trellis& trellis,
                                std::size_t list_size) {
  if (list_size < 1) throw std::invalid_argument("list_decode: list size must be >= 1");
  if (list_size == 1) return viterbi_decode(soft, trellis);

  auto fp = detail::viterbi_forward(soft, trellis, /*want_delta=*/true);
  const int T = trellis.total_segments();
  const int L = trellis.info_len();
  const int mu = trellis.spec().mu;
  const std::size_t S = trellis.num_states();
  const std::uint32_t low_mask = static_cast<std::uint32_t>(S - 1);

  struct Path {
    std::vector<std::uint32_t> states;
    double deficit;
    int branch_seg;  // detours for children allowed strictly before this boundary
  };
  std::vector<Path> paths;
  paths.push_back({detail::traceback_states(fp, trellis), 0.0, T + 1});

  // (deficit, parent path index, detour boundary); lexicographic pop order
  // keeps results deterministic under metric ties.
  using Entry = std::tuple<double, std::size_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  auto spawn = [&](std::size_t path_idx) {
    const Path& p = paths[path_idx];
    for (int t = 1; t < p.branch_seg && t <= T; ++t) {
      double d = fp.delta[static_cast<std::size_t>(t - 1) * S + p.states[t]];
      if (std::isfinite(d)) heap.emplace(p.deficit + d, path_idx, t);
    }
  };
  spawn(0);

  while (paths.size() < list_size && !heap.empty()) {
    auto [deficit, parent_idx, t] = heap.top();
    heap.pop();
    const Path& parent = paths[parent_idx];
    Path np;
    np.states = parent.states;
    np.deficit = deficit;
    np.branch_seg = t;
    std::uint32_t s = np.states[t];
    std::uint32_t dropped = 1u - fp.dec[static_cast<std::size_t>(t - 1) * S + s];
    np.states[t - 1] = ((s << 1) & low_mask) | dropped;
    for (int u = t - 1; u >= 1; --u) {
      std::uint32_t su = np.states[u];
      std::uint32_t d = fp.dec[static_cast<std::size_t>(u - 1) * S + su];
      np.states[u - 1] = ((su << 1) & low_mask) | d;
    }
    paths.push_back(std::move(np));
    spawn(paths.size() - 1);
  }

  DecodeResult res;
  res.candidates.reserve(paths.size());
  for (const auto& p : paths) {
    res.candidates.push_back({detail::info_from_states(p.states, L, mu), fp.best_metric - p.deficit});
  }
  res.info_estimate = res.candidates.front().info;
  res.path_metric = res.candidates.front().metric;
  return res;
}

// Reliability-blind decoding: unit-magnitude soft values, equivalent to
// minimum Hamming distance.
inline DecodeResult hard_decode(const std::vector<int>& received, const Trellis& trellis,
                                std::size_t list_size = 1) {
  SoftSequence soft(received.size());
  for (std::size_t i = 0; i < received.size(); ++i) soft[i] = received[i] ? -1.0 : 1.0;
  return list_decode(soft, trellis, list_size);
}

struct RankedCandidate {
  BitVec info;
  double log_likelihood;       // sum of per-bit log q_i
  double log_ratio_to_best;    // log p(r|c_best) - log p(r|c_i), >= 0
};

// Order candidates by exact likelihood of the received word given per-bit
// crossover probabilities.  Stable for ties.
inline std::vector<RankedCandidate> rank_by_likelihood(const std::vector<BitVec>& candidates,
                                                       const std::vector<double>& per_bit_p,
                                                       const std::vector<int>& received,
                                                       const CodeSpec& spec) {
  if (candidates.empty()) throw std::invalid_argument("rank_by_likelihood: empty candidate list");
  if (per_bit_p.size() != received.size())
    throw std::invalid_argument("rank_by_likelihood: length mismatch");
  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  for (const auto& info : candidates) {
    BitVec cw = encode(info, spec);
    if (cw.size() != received.size())
      throw std::invalid_argument("rank_by_likelihood: candidate length mismatch");
    double ll = 0.0;
    for (std::size_t i = 0; i < cw.size(); ++i) {
      double p = std::clamp(per_bit_p[i], 1e-300, 1.0 - 1e-16);
      ll += (cw[i] == static_cast<std::uint8_t>(received[i] & 1)) ? std::log1p(-p) : std::log(p);
    }
    out.push_back({info, ll, 0.0});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.log_likelihood > b.log_likelihood;
                   });
  for (auto& c : out) c.log_ratio_to_best = out.front().log_likelihood - c.log_likelihood;
  return out;
}

}  // namespace pufcc

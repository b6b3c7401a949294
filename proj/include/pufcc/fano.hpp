#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pufcc/codec.hpp"

namespace pufcc {

struct FanoConfig {
  double delta = 2.0;              // threshold increment, base-2 metric units
  double initial_threshold = 0.0;
  std::uint64_t max_visits = 0;    // 0 -> 10^4 * (L + mu)

  void validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("FanoConfig: delta must be > 0");
  }
};

struct FanoOutcome {
  bool success = false;
  BitVec info_estimate;
  double path_metric = 0.0;
  std::uint64_t visits = 0;      // forward moves
  std::uint64_t backtracks = 0;  // backward moves
};

// Per-bit Fano metric for a BSC with crossover p_i and rate R = k/n.
inline double fano_bit_metric(bool match, double p, double rate) {
  p = std::clamp(p, 1e-9, 0.5 - 1e-12);
  return (match ? std::log2(2.0 * (1.0 - p)) : std::log2(2.0 * p)) - rate;
}

// Depth-first code-tree search with the classic look-forward / look-back /
// threshold-lowering rules.  Termination segments restrict the tree to the
// zero input.  Exhausting the visit budget is an outcome, not an exception.
inline FanoOutcome fano_decode(const std::vector<int>& received,
                               const std::vector<double>& per_bit_p, const CodeSpec& spec,
                               int info_len, const FanoConfig& cfg = {}) {
  spec.validate();
  cfg.validate();
  const int n = spec.n;
  const int mu = spec.mu;
  const int T = info_len + mu;
  if (received.size() != static_cast<std::size_t>(n) * T ||
      per_bit_p.size() != received.size())
    throw std::invalid_argument("fano_decode: input length must be n*(L+mu)");
  const double rate = static_cast<double>(spec.k) / n;

  // match / mismatch contributions per code bit position
  std::vector<double> m_match(received.size()), m_miss(received.size());
  for (std::size_t i = 0; i < received.size(); ++i) {
    m_match[i] = fano_bit_metric(true, per_bit_p[i], rate);
    m_miss[i] = fano_bit_metric(false, per_bit_p[i], rate);
  }

  // The code tree is walked with on-the-fly edge outputs; no 2^mu tables, so
  // memory stays flat in the memory length.
  const std::uint32_t state_mask = (std::uint32_t{1} << mu) - 1;
  auto edge_next = [&](std::uint32_t state, std::uint32_t input) {
    return ((input << (mu - 1)) | (state >> 1)) & state_mask;
  };
  auto branch_metric = [&](int depth, std::uint32_t state, std::uint32_t input) {
    const std::uint32_t window = (input << mu) | state;
    double m = 0.0;
    for (int j = 0; j < n; ++j) {
      std::size_t pos = static_cast<std::size_t>(depth) * n + j;
      int bit = __builtin_parity(window & spec.tap_mask(j));
      m += (bit == (received[pos] & 1)) ? m_match[pos] : m_miss[pos];
    }
    return m;
  };

  const std::uint64_t budget =
      cfg.max_visits ? cfg.max_visits : std::uint64_t{10000} * static_cast<std::uint64_t>(T);

  std::vector<std::uint32_t> state(T + 1);
  std::vector<double> metric(T + 1);
  std::vector<std::uint8_t> rank(T + 1);  // which branch (in metric order) is being tried
  state[0] = 0;
  metric[0] = 0.0;
  rank[0] = 0;

  FanoOutcome out;
  double threshold = cfg.initial_threshold;
  int d = 0;

  // Branches at a node ordered by metric, ties preferring input 0.
  auto ordered_branch = [&](int depth, std::uint32_t s, int which, std::uint32_t* input,
                            double* bm) -> bool {
    if (depth >= info_len) {  // termination zone: single zero branch
      if (which > 0) return false;
      *input = 0;
      *bm = branch_metric(depth, s, 0);
      return true;
    }
    if (which > 1) return false;
    double b0 = branch_metric(depth, s, 0);
    double b1 = branch_metric(depth, s, 1);
    bool first_is_one = b1 > b0;
    if ((which == 0) == first_is_one) {
      *input = 1;
      *bm = b1;
    } else {
      *input = 0;
      *bm = b0;
    }
    return true;
  };

  while (true) {
    std::uint32_t input = 0;
    double bm = 0.0;
    bool have = ordered_branch(d, state[d], rank[d], &input, &bm);
    double forward_metric = have ? metric[d] + bm : -std::numeric_limits<double>::infinity();

    if (forward_metric >= threshold) {
      bool first_visit = metric[d] < threshold + cfg.delta;
      ++d;
      state[d] = edge_next(state[d - 1], input);
      metric[d] = forward_metric;
      rank[d] = 0;
      ++out.visits;
      if (d == T) {
        out.success = true;
        out.path_metric = metric[T];
        out.info_estimate.resize(info_len);
        for (int r = 0; r < info_len; ++r)
          out.info_estimate[r] = static_cast<std::uint8_t>(state[r + 1] >> (mu - 1));
        return out;
      }
      if (first_visit) {
        double tightened = cfg.delta * std::floor(metric[d] / cfg.delta);
        if (tightened > threshold) threshold = tightened;
      }
      if (out.visits > budget) return out;  // failure, budget exhausted
      continue;
    }

    double back_metric = (d == 0) ? -std::numeric_limits<double>::infinity() : metric[d - 1];
    if (back_metric >= threshold) {
      --d;
      ++rank[d];
      ++out.backtracks;
    } else {
      threshold -= cfg.delta;
      rank[d] = 0;
    }
  }
}

}  // namespace pufcc

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pufcc/normal.hpp"
#include "pufcc/rng.hpp"

namespace pufcc {

// LLR magnitudes are clamped so arithmetic stays finite for cells with
// extreme reliabilities; decisions are numerically unchanged beyond this.
inline constexpr double kLlrMax = 40.0;

struct ModelParams {
  double lambda1 = 0.51;  // shape
  double lambda2 = 0.0;   // skew

  void validate() const {
    if (!(lambda1 > 0.0)) throw std::domain_error("ModelParams: lambda1 must be > 0");
  }
};

struct SramCell {
  double p_one;  // probability the cell powers up as 1
  double p_e;    // min(p_one, 1 - p_one)
  int ref_bit;   // most likely power-up value, ties toward 0
};

// Per-bit signed reliabilities; positive favors bit 0.
using SoftSequence = std::vector<double>;

namespace detail {
inline void check_open01(double x, const char* who) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error(std::string(who) + ": argument must be in (0,1)");
}
inline void check_unit(double x, const char* who) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error(std::string(who) + ": argument must be in [0,1]");
}
}  // namespace detail

// cdf of the one-probability P_one.
inline double cdf_p_one(double x, const ModelParams& params = {}) {
  detail::check_open01(x, "cdf_p_one");
  return norm_cdf(params.lambda1 * norm_quantile(x) - params.lambda2);
}

// pdf of the one-probability P_one.  Unbounded at the interval ends for
// lambda1 < 1; integrable.
inline double pdf_p_one(double x, const ModelParams& params = {}) {
  detail::check_open01(x, "pdf_p_one");
  double z = norm_quantile(x);
  return params.lambda1 * norm_pdf(params.lambda2 - params.lambda1 * z) / norm_pdf(z);
}

// cdf of the cell error probability P_e; all mass lies in [0, 0.5].
// Evaluated from the quantile so the reflected term 1-x never rounds to 1.
inline double cdf_p_e(double x, const ModelParams& params = {}) {
  detail::check_unit(x, "cdf_p_e");
  if (x <= 0.0) return 0.0;
  if (x >= 0.5) return 1.0;
  double z = norm_quantile(x);
  return norm_cdf(params.lambda1 * z - params.lambda2) +
         norm_cdf(params.lambda1 * z + params.lambda2);
}

// pdf of the cell error probability P_e; zero for x >= 0.5.
inline double pdf_p_e(double x, const ModelParams& params = {}) {
  detail::check_unit(x, "pdf_p_e");
  if (x <= 0.0 || x >= 0.5) return 0.0;
  double z = norm_quantile(x);
  return params.lambda1 *
         (norm_pdf(params.lambda2 - params.lambda1 * z) +
          norm_pdf(params.lambda2 + params.lambda1 * z)) /
         norm_pdf(z);
}

inline SramCell cell_from_p_one(double p_one) {
  SramCell c;
  c.p_one = p_one;
  c.ref_bit = p_one > 0.5 ? 1 : 0;
  c.p_e = std::min(p_one, 1.0 - p_one);
  return c;
}

// Inverse-transform sample of a cell's one-probability.
inline SramCell sample_cell(Rng& rng, const ModelParams& params = {}) {
  double u = rng.next_open01();
  double p_one = norm_cdf((norm_quantile(u) + params.lambda2) / params.lambda1);
  // keep p_one strictly inside (0,1)
  p_one = std::clamp(p_one, 1e-300, 1.0 - 1e-16);
  return cell_from_p_one(p_one);
}

// One power-up measurement of a cell.
inline int readout(const SramCell& cell, Rng& rng) {
  return rng.next_bernoulli(cell.p_one) ? 1 : 0;
}

// Indices of cells reliable enough for the threshold p_T, original order kept.
inline std::vector<std::size_t> select_cells(const std::vector<SramCell>& cells, double p_t) {
  if (!(p_t > 0.0 && p_t <= 0.5)) throw std::domain_error("select_cells: p_T must be in (0,0.5]");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].p_e < p_t) idx.push_back(i);
  }
  return idx;
}

// Expected fraction of cells rejected by threshold p_T.
inline double ignored_fraction(double p_t, const ModelParams& params = {}) {
  if (!(p_t > 0.0 && p_t <= 0.5)) throw std::domain_error("ignored_fraction: p_T must be in (0,0.5]");
  return 1.0 - cdf_p_e(p_t, params);
}

// Signed reliability for one readout of one cell; positive iff helper bit and
// response bit agree (i.e. the underlying code bit is more likely 0).
inline double soft_value(int helper_bit, int response_bit, double p_e) {
  if (!(p_e > 0.0 && p_e < 1.0)) throw std::domain_error("soft_value: p_e must be in (0,1)");
  double mag = std::clamp(std::log((1.0 - p_e) / p_e), -kLlrMax, kLlrMax);
  return ((helper_bit ^ response_bit) & 1) ? -mag : mag;
}

// Element-wise LLR sum over independent readouts of the same cells.
inline SoftSequence combine_readouts(const std::vector<SoftSequence>& per_readout) {
  if (per_readout.empty()) throw std::invalid_argument("combine_readouts: need at least one readout");
  const std::size_t len = per_readout.front().size();
  SoftSequence out(len, 0.0);
  for (const auto& seq : per_readout) {
    if (seq.size() != len) throw std::invalid_argument("combine_readouts: length mismatch");
    for (std::size_t i = 0; i < len; ++i) out[i] += seq[i];
  }
  for (double& v : out) v = std::clamp(v, -kLlrMax, kLlrMax);
  return out;
}

// Per-position majority vote over m readouts, ties toward 0.
inline std::vector<int> majority_vote(const std::vector<std::vector<int>>& readouts) {
  if (readouts.empty()) throw std::invalid_argument("majority_vote: need at least one readout");
  const std::size_t len = readouts.front().size();
  std::vector<int> out(len, 0);
  for (std::size_t i = 0; i < len; ++i) {
    int ones = 0;
    for (const auto& r : readouts) {
      if (r.size() != len) throw std::invalid_argument("majority_vote: length mismatch");
      ones += r[i];
    }
    out[i] = (2 * ones > static_cast<int>(readouts.size())) ? 1 : 0;
  }
  return out;
}

}  // namespace pufcc

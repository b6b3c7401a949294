#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pufcc/codec.hpp"
#include "pufcc/fano.hpp"
#include "pufcc/sha256.hpp"
#include "pufcc/sram_model.hpp"
#include "pufcc/viterbi.hpp"

namespace pufcc {

enum class DecoderKind { viterbi, fano };
enum class InputMode { soft, hard };

inline std::string to_string(DecoderKind d) { return d == DecoderKind::viterbi ? "viterbi" : "fano"; }
inline std::string to_string(InputMode m) { return m == InputMode::soft ? "soft" : "hard"; }

inline DecoderKind decoder_from_string(const std::string& s) {
  if (s == "viterbi") return DecoderKind::viterbi;
  if (s == "fano") return DecoderKind::fano;
  throw std::invalid_argument("unknown decoder '" + s + "'");
}

inline InputMode input_mode_from_string(const std::string& s) {
  if (s == "soft") return InputMode::soft;
  if (s == "hard") return InputMode::hard;
  throw std::invalid_argument("unknown input mode '" + s + "'");
}

// Bit 0 goes to the MSB of the first byte.
inline std::vector<std::uint8_t> pack_bits(const BitVec& bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

inline BitVec unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
  if (nbits > bytes.size() * 8) throw std::invalid_argument("unpack_bits: not enough bytes");
  BitVec out(nbits);
  for (std::size_t i = 0; i < nbits; ++i) {
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
  }
  return out;
}

inline Digest key_digest(const BitVec& key) { return sha256(pack_bits(key)); }

// Public helper data of the code-offset scheme.
struct HelperData {
  int version = 1;
  CodeSpec code;
  std::optional<double> p_t;           // absent = every cell used in order
  std::vector<std::size_t> mask;       // indices of the cells backing each code bit
  BitVec offset;                       // codeword xor enrollment reference bits
  Digest digest{};                     // SHA-256 of the packed key
  std::size_t list_size = 1;
  int readouts = 1;
  DecoderKind decoder = DecoderKind::viterbi;
};

class ShortageError : public std::runtime_error {
 public:
  ShortageError(std::size_t required, std::size_t available)
      : std::runtime_error("not enough reliable cells: required " + std::to_string(required) +
                           ", available " + std::to_string(available)),
        required_(required),
        available_(available) {}
  std::size_t required() const { return required_; }
  std::size_t available() const { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

struct EnrollResult {
  BitVec key;
  HelperData helper;
};

inline constexpr int kKeyLength = 256;

inline EnrollResult enroll(const std::vector<SramCell>& cells, const CodeSpec& spec,
                           std::optional<double> p_t, Rng& rng, int info_len = kKeyLength) {
  spec.validate();
  const std::size_t needed = static_cast<std::size_t>(spec.codeword_length(info_len));
  std::vector<std::size_t> mask;
  if (p_t) {
    mask = select_cells(cells, *p_t);
    if (mask.size() < needed) throw ShortageError(needed, mask.size());
    mask.resize(needed);
  } else {
    if (cells.size() < needed) throw ShortageError(needed, cells.size());
    mask.resize(needed);
    for (std::size_t i = 0; i < needed; ++i) mask[i] = i;
  }

  EnrollResult res;
  res.key = random_info(rng, info_len);
  BitVec cw = encode(res.key, spec);
  res.helper.code = spec;
  res.helper.p_t = p_t;
  res.helper.mask = std::move(mask);
  res.helper.offset.resize(needed);
  for (std::size_t i = 0; i < needed; ++i) {
    res.helper.offset[i] = cw[i] ^ static_cast<std::uint8_t>(cells[res.helper.mask[i]].ref_bit);
  }
  res.helper.digest = key_digest(res.key);
  return res;
}

namespace detail {

// Decoder front-end shared by file-based reconstruction and the simulator.
// Returns candidates in trial order; effort is Fano visits (0 for Viterbi).
inline std::vector<BitVec> decode_candidates(const SoftSequence& soft, const CodeSpec& spec,
                                             int info_len, DecoderKind decoder,
                                             std::size_t list_size, const FanoConfig& fano_cfg,
                                             std::uint64_t* effort) {
  if (decoder == DecoderKind::viterbi) {
    Trellis trellis(spec, info_len);
    DecodeResult dr = list_decode(soft, trellis, list_size);
    if (effort) *effort = 0;
    std::vector<BitVec> out;
    out.reserve(dr.candidates.size());
    for (auto& c : dr.candidates) out.push_back(std::move(c.info));
    return out;
  }
  if (list_size != 1) throw std::invalid_argument("fano decoder supports list size 1 only");
  std::vector<int> received(soft.size());
  std::vector<double> per_bit_p(soft.size());
  for (std::size_t i = 0; i < soft.size(); ++i) {
    received[i] = soft[i] < 0.0 ? 1 : 0;
    per_bit_p[i] = 1.0 / (1.0 + std::exp(std::fabs(soft[i])));
  }
  FanoOutcome fo = fano_decode(received, per_bit_p, spec, info_len, fano_cfg);
  if (effort) *effort = fo.visits;
  if (!fo.success) return {};
  return {std::move(fo.info_estimate)};
}

}  // namespace detail

// Regenerate the key from m full-device readouts; candidates are tried in
// likelihood order and only a digest match is ever returned.
inline std::optional<BitVec> reconstruct(const std::vector<std::vector<int>>& responses,
                                         const HelperData& helper,
                                         const std::vector<double>& p_e_by_cell,
                                         InputMode input = InputMode::soft,
                                         const FanoConfig& fano_cfg = {},
                                         std::uint64_t* effort = nullptr) {
  if (responses.empty()) throw std::invalid_argument("reconstruct: need at least one readout");
  const std::size_t len = helper.offset.size();
  const int info_len = static_cast<int>(len) / helper.code.n - helper.code.mu;
  for (std::size_t i : helper.mask) {
    for (const auto& r : responses) {
      if (i >= r.size()) throw std::invalid_argument("reconstruct: responses do not cover mask");
    }
    if (i >= p_e_by_cell.size())
      throw std::invalid_argument("reconstruct: reliabilities do not cover mask");
  }

  SoftSequence soft(len, 0.0);
  if (input == InputMode::soft) {
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t cell = helper.mask[i];
      double s = 0.0;
      for (const auto& r : responses) {
        s += soft_value(helper.offset[i], r[cell], p_e_by_cell[cell]);
      }
      soft[i] = std::clamp(s, -kLlrMax, kLlrMax);
    }
  } else {
    std::vector<std::vector<int>> picked(responses.size(), std::vector<int>(len));
    for (std::size_t j = 0; j < responses.size(); ++j) {
      for (std::size_t i = 0; i < len; ++i) picked[j][i] = responses[j][helper.mask[i]];
    }
    std::vector<int> voted = majority_vote(picked);
    double p_avg = 0.0;
    for (std::size_t i = 0; i < len; ++i) p_avg += p_e_by_cell[helper.mask[i]];
    p_avg = std::clamp(p_avg / static_cast<double>(len), 1e-9, 0.5 - 1e-12);
    double mag = std::log((1.0 - p_avg) / p_avg);
    for (std::size_t i = 0; i < len; ++i) {
      soft[i] = (helper.offset[i] ^ voted[i]) ? -mag : mag;
    }
  }

  auto candidates = detail::decode_candidates(soft, helper.code, info_len, helper.decoder,
                                              helper.list_size, fano_cfg, effort);
  for (const auto& cand : candidates) {
    if (key_digest(cand) == helper.digest) return cand;
  }
  return std::nullopt;
}

}  // namespace pufcc

#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pufcc/rng.hpp"

namespace pufcc {

using BitVec = std::vector<std::uint8_t>;

// A rate-1/n convolutional code with memory mu.  Generators are stored
// lowest-degree-coefficient-in-the-most-significant-bit, the convention under
// which the familiar mu=6 code reads (133,171) octal.  generators[0] feeds the
// first output bit of each block.
struct CodeSpec {
  int n = 2;
  int k = 1;
  int mu = 0;
  std::vector<std::uint32_t> generators;  // octal-parsed values, g0 first

  int block_out() const { return n; }
  int codeword_length(int info_len) const { return n * (info_len + mu); }
  std::size_t num_states() const { return std::size_t{1} << mu; }

  void validate() const {
    if (k != 1) throw std::invalid_argument("CodeSpec: only k = 1 supported");
    if (n < 2 || n > 3) throw std::invalid_argument("CodeSpec: n must be 2 or 3");
    if (mu < 1 || mu > 30) throw std::invalid_argument("CodeSpec: mu out of range");
    if (static_cast<int>(generators.size()) != n)
      throw std::invalid_argument("CodeSpec: need n generators");
    for (auto g : generators) {
      if (g == 0 || g >= (std::uint64_t{1} << (mu + 1)))
        throw std::invalid_argument("CodeSpec: generator degree exceeds mu");
    }
  }

  // Taps as a window mask: window bit mu is the current input, bit (mu - j)
  // carries the degree-j coefficient.
  std::uint32_t tap_mask(int output) const { return generators[output]; }

  std::string name() const {
    std::ostringstream os;
    os << "(" << n << "," << k << ",[" << mu << "])";
    return os.str();
  }

  // Textual form "n,k,mu:g(n-1),...,g0" with octal generators.
  std::string to_text() const;
  static CodeSpec from_text(const std::string& text);

  bool operator==(const CodeSpec&) const = default;
};

namespace detail {

inline std::string to_octal(std::uint32_t v) {
  std::ostringstream os;
  os << std::oct << v;
  return os.str();
}

inline std::uint32_t parse_octal(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("CodeSpec: empty generator");
  std::uint32_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '7') throw std::invalid_argument("CodeSpec: bad octal digit in '" + s + "'");
    v = v * 8 + static_cast<std::uint32_t>(c - '0');
  }
  return v;
}

}  // namespace detail

inline std::string CodeSpec::to_text() const {
  std::ostringstream os;
  os << n << "," << k << "," << mu << ":";
  for (int i = n - 1; i >= 0; --i) {
    os << detail::to_octal(generators[i]);
    if (i > 0) os << ",";
  }
  return os.str();
}

inline CodeSpec CodeSpec::from_text(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("CodeSpec: missing ':' in '" + text + "'");
  std::string head = text.substr(0, colon);
  std::string tail = text.substr(colon + 1);
  CodeSpec spec;
  {
    std::istringstream is(head);
    char c1 = 0, c2 = 0;
    if (!(is >> spec.n >> c1 >> spec.k >> c2 >> spec.mu) || c1 != ',' || c2 != ',')
      throw std::invalid_argument("CodeSpec: bad header in '" + text + "'");
  }
  std::vector<std::uint32_t> gens;
  std::istringstream is(tail);
  std::string tok;
  while (std::getline(is, tok, ',')) gens.push_back(detail::parse_octal(tok));
  // textual order is g(n-1)..g0; stored order is g0 first
  spec.generators.assign(gens.rbegin(), gens.rend());
  spec.validate();
  return spec;
}

// The eleven codes used throughout; rate-1/2 with mu in {2,6,7,10,14,16} and
// rate-1/3 with mu in {6,...,10}.  Listed as (g0, g1[, g2]).
inline const std::vector<CodeSpec>& registry() {
  static const std::vector<CodeSpec> codes = {
      {2, 1, 2, {07, 05}},
      {2, 1, 6, {0171, 0133}},
      {2, 1, 7, {0371, 0247}},
      {2, 1, 10, {02671, 03645}},
      {2, 1, 14, {044735, 063057}},
      {2, 1, 16, {0231721, 0313327}},
      {3, 1, 6, {0171, 0165, 0133}},
      {3, 1, 7, {0367, 0331, 0225}},
      {3, 1, 8, {0711, 0663, 0557}},
      {3, 1, 9, {01633, 01365, 01117}},
      {3, 1, 10, {03175, 02671, 02353}},
  };
  return codes;
}

inline std::optional<CodeSpec> lookup_code(int n, int k, int mu) {
  for (const auto& c : registry()) {
    if (c.n == n && c.k == k && c.mu == mu) return c;
  }
  return std::nullopt;
}

// Terminated encoding: the mu zero tail bits drive the register back to the
// all-zero state, so the output has length n * (L + mu).
inline BitVec encode(const BitVec& info, const CodeSpec& spec) {
  spec.validate();
  if (info.empty()) throw std::invalid_argument("encode: empty information word");
  const int mu = spec.mu;
  const std::uint32_t state_mask = (std::uint32_t{1} << mu) - 1;
  BitVec out;
  out.reserve(spec.codeword_length(static_cast<int>(info.size())));
  std::uint32_t state = 0;  // bits i_{r-1}..i_{r-mu}, most recent highest
  const std::size_t total = info.size() + static_cast<std::size_t>(mu);
  for (std::size_t r = 0; r < total; ++r) {
    std::uint32_t b = (r < info.size()) ? (info[r] & 1u) : 0u;
    std::uint32_t window = (b << mu) | state;
    for (int j = 0; j < spec.n; ++j) {
      out.push_back(static_cast<std::uint8_t>(__builtin_parity(window & spec.tap_mask(j))));
    }
    state = ((b << (mu - 1)) | (state >> 1)) & state_mask;
  }
  return out;
}

inline BitVec random_info(Rng& rng, std::size_t len) {
  if (len < 1) throw std::invalid_argument("random_info: length must be >= 1");
  BitVec out(len);
  for (auto& b : out) b = rng.next_bit() ? 1 : 0;
  return out;
}

}  // namespace pufcc

#include <cmath>

#include <gtest/gtest.h>

#include "pufcc/codec.hpp"
#include "pufcc/rng.hpp"

using namespace pufcc;

TEST(Registry, ElevenCodes) {
  EXPECT_EQ(registry().size(), 11u);
  for (const auto& c : registry()) EXPECT_NO_THROW(c.validate());
}

TEST(Registry, KnownEntries) {
  auto c = lookup_code(2, 1, 6);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->to_text(), "2,1,6:133,171");
  auto c3 = lookup_code(3, 1, 10);
  ASSERT_TRUE(c3);
  EXPECT_EQ(c3->to_text(), "3,1,10:2353,2671,3175");
  EXPECT_FALSE(lookup_code(2, 1, 3));
}

TEST(CodeSpec, TextRoundTrip) {
  for (const auto& c : registry()) {
    EXPECT_EQ(CodeSpec::from_text(c.to_text()), c);
  }
  EXPECT_THROW(CodeSpec::from_text("2,1,7"), std::invalid_argument);
  EXPECT_THROW(CodeSpec::from_text("2,1,7:999,371"), std::invalid_argument);
  EXPECT_THROW(CodeSpec::from_text("4,1,7:1,2,3,4"), std::invalid_argument);
  // generator degree beyond mu
  EXPECT_THROW(CodeSpec::from_text("2,1,2:17,5"), std::invalid_argument);
}

TEST(Encode, AllZeroInput) {
  for (const auto& spec : registry()) {
    BitVec info(32, 0);
    BitVec cw = encode(info, spec);
    EXPECT_EQ(cw.size(), static_cast<std::size_t>(spec.n) * (32 + spec.mu));
    for (auto b : cw) EXPECT_EQ(b, 0);
  }
}

TEST(Encode, HandTracedImpulse) {
  // (2,1,[2]) with G0=(1,1), G1=(1,0), G2=(1,1): info [1] -> 11 10 11
  CodeSpec spec{2, 1, 2, {07, 05}};
  BitVec cw = encode({1}, spec);
  EXPECT_EQ(cw, (BitVec{1, 1, 1, 0, 1, 1}));
}

TEST(Encode, EmptyInputRejected) {
  EXPECT_THROW(encode({}, registry().front()), std::invalid_argument);
}

TEST(Encode, LinearOverGf2) {
  Rng rng(31);
  for (const auto& spec : registry()) {
    BitVec a = random_info(rng, 64);
    BitVec b = random_info(rng, 64);
    BitVec sum(64);
    for (int i = 0; i < 64; ++i) sum[i] = a[i] ^ b[i];
    BitVec ca = encode(a, spec), cb = encode(b, spec), cs = encode(sum, spec);
    for (std::size_t i = 0; i < cs.size(); ++i) EXPECT_EQ(cs[i], ca[i] ^ cb[i]);
  }
}

TEST(Encode, ImpulseResponseIsInterleavedGenerators) {
  for (const auto& spec : registry()) {
    BitVec info(spec.mu + 1, 0);
    info[0] = 1;
    BitVec cw = encode(info, spec);
    for (int r = 0; r <= spec.mu; ++r) {
      for (int j = 0; j < spec.n; ++j) {
        int coeff = (spec.generators[j] >> (spec.mu - r)) & 1;
        EXPECT_EQ(cw[static_cast<std::size_t>(r) * spec.n + j], coeff)
            << spec.name() << " r=" << r << " j=" << j;
      }
    }
    // beyond the impulse response everything is zero again (terminated)
    for (std::size_t i = static_cast<std::size_t>(spec.mu + 1) * spec.n; i < cw.size(); ++i) {
      EXPECT_EQ(cw[i], 0);
    }
  }
}

TEST(Encode, TerminationReturnsToZeroState) {
  // appending any fresh info after the tail of a terminated word behaves as
  // if encoded from the zero state
  Rng rng(77);
  for (const auto& spec : registry()) {
    BitVec head = random_info(rng, 16);
    BitVec padded = head;
    padded.insert(padded.end(), spec.mu, 0);  // explicit tail
    BitVec tail_in = random_info(rng, 8);
    padded.insert(padded.end(), tail_in.begin(), tail_in.end());
    BitVec full = encode(padded, spec);
    BitVec fresh = encode(tail_in, spec);
    // the last n*(8+mu) bits of `full` equal encoding tail_in from state zero
    std::size_t off = full.size() - fresh.size();
    for (std::size_t i = 0; i < fresh.size(); ++i) EXPECT_EQ(full[off + i], fresh[i]);
  }
}

TEST(RandomInfo, DeterministicAndUniform) {
  Rng a = Rng::stream(9, 4);
  Rng b = Rng::stream(9, 4);
  EXPECT_EQ(random_info(a, 256).size(), 256u);
  a = Rng::stream(9, 4);
  EXPECT_EQ(random_info(a, 256), random_info(b, 256));
  EXPECT_THROW(random_info(a, 0), std::invalid_argument);

  Rng rng(17);
  const std::size_t n = 1000000;
  std::size_t ones = 0;
  BitVec bits = random_info(rng, n);
  for (auto v : bits) ones += v;
  double sigma = std::sqrt(0.25 / n);
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 3 * sigma);
}

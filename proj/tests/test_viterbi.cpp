#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pufcc/codec.hpp"
#include "pufcc/rng.hpp"
#include "pufcc/sram_model.hpp"
#include "pufcc/viterbi.hpp"

using namespace pufcc;

namespace {

double correlation_metric(const BitVec& cw, const SoftSequence& soft) {
  double m = 0.0;
  for (std::size_t i = 0; i < cw.size(); ++i) m += cw[i] ? -soft[i] : soft[i];
  return m;
}

// Exhaustive maximum-likelihood reference: evaluates every info word.
struct BruteForce {
  std::vector<BitVec> infos;
  std::vector<double> metrics;

  BruteForce(const CodeSpec& spec, int L, const SoftSequence& soft) {
    const std::size_t count = std::size_t{1} << L;
    infos.reserve(count);
    metrics.reserve(count);
    for (std::size_t v = 0; v < count; ++v) {
      BitVec info(L);
      for (int i = 0; i < L; ++i) info[i] = (v >> i) & 1;
      infos.push_back(info);
      metrics.push_back(correlation_metric(encode(info, spec), soft));
    }
  }

  double best_metric() const { return *std::max_element(metrics.begin(), metrics.end()); }

  std::vector<BitVec> argmax_set() const {
    double best = best_metric();
    std::vector<BitVec> out;
    for (std::size_t i = 0; i < infos.size(); ++i) {
      if (metrics[i] >= best - 1e-9 * (1.0 + std::fabs(best))) out.push_back(infos[i]);
    }
    return out;
  }
};

SoftSequence random_soft(Rng& rng, std::size_t len) {
  SoftSequence s(len);
  for (auto& v : s) v = 8.0 * (rng.next_open01() - 0.5);
  return s;
}

}  // namespace

TEST(Trellis, ReachableStatesRampAndFunnel) {
  CodeSpec spec{2, 1, 2, {07, 05}};
  Trellis t(spec, 4);
  EXPECT_EQ(t.reachable_states(0), 1u);
  EXPECT_EQ(t.reachable_states(1), 2u);
  EXPECT_EQ(t.reachable_states(2), 4u);
  EXPECT_EQ(t.reachable_states(3), 4u);
  EXPECT_EQ(t.reachable_states(4), 4u);
  EXPECT_EQ(t.reachable_states(5), 2u);  // termination funnel
  EXPECT_EQ(t.reachable_states(6), 1u);
}

TEST(Trellis, EdgeLabelsMatchEncoder) {
  CodeSpec spec{2, 1, 2, {07, 05}};
  Trellis t(spec, 4);
  // state 00, input 1 -> output 11 (both generators have a constant term)
  EXPECT_EQ(t.edge_output(0, 1), 0b11);
  EXPECT_EQ(t.edge_output(0, 0), 0b00);
  // every full segment has 2 edges per state
  std::size_t edges = 0;
  for (std::uint32_t s = 0; s < t.num_states(); ++s) edges += 2;
  EXPECT_EQ(edges, std::size_t{1} << (spec.mu + 1));
}

TEST(Trellis, EdgeLabelsConsistentWithEncodeForRegistry) {
  Rng rng(3);
  for (const auto& spec : registry()) {
    if (spec.mu > 10) continue;
    Trellis t(spec, 20);
    BitVec info = random_info(rng, 20);
    BitVec cw = encode(info, spec);
    std::uint32_t state = 0;
    for (int r = 0; r < 20 + spec.mu; ++r) {
      std::uint32_t b = r < 20 ? info[r] : 0;
      std::uint8_t pattern = t.edge_output(state, b);
      for (int j = 0; j < spec.n; ++j) {
        EXPECT_EQ((pattern >> (spec.n - 1 - j)) & 1, cw[static_cast<std::size_t>(r) * spec.n + j]);
      }
      state = t.edge_next(state, b);
    }
    EXPECT_EQ(state, 0u);
  }
}

TEST(ViterbiDecode, NoiselessRecovery) {
  Rng rng(41);
  for (const auto& spec : registry()) {
    if (spec.mu > 10) continue;
    Trellis t(spec, 64);
    BitVec info = random_info(rng, 64);
    BitVec cw = encode(info, spec);
    SoftSequence soft(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i) {
      soft[i] = (cw[i] ? -1.0 : 1.0) * (0.1 + rng.next_open01());
    }
    EXPECT_EQ(viterbi_decode(soft, t).info_estimate, info) << spec.name();
  }
}

TEST(ViterbiDecode, LengthMismatchRejected) {
  Trellis t(CodeSpec{2, 1, 2, {07, 05}}, 4);
  EXPECT_THROW(viterbi_decode(SoftSequence(5, 1.0), t), std::invalid_argument);
}

TEST(ViterbiDecode, MatchesBruteForceSoft) {
  const CodeSpec specs[] = {{2, 1, 2, {07, 05}}, {2, 1, 4, {023, 035}}, {3, 1, 3, {013, 015, 017}}};
  Rng rng(51);
  int checked = 0;
  for (const auto& spec : specs) {
    for (int L : {4, 8}) {
      Trellis t(spec, L);
      for (int it = 0; it < 700; ++it) {
        SoftSequence soft = random_soft(rng, static_cast<std::size_t>(spec.n) * (L + spec.mu));
        DecodeResult dr = viterbi_decode(soft, t);
        BruteForce bf(spec, L, soft);
        ASSERT_NEAR(dr.path_metric, bf.best_metric(), 1e-9);
        auto winners = bf.argmax_set();
        if (winners.size() == 1) {
          ASSERT_EQ(dr.info_estimate, winners.front());
        } else {
          ASSERT_NE(std::find(winners.begin(), winners.end(), dr.info_estimate), winners.end());
        }
        ++checked;
      }
    }
  }
  EXPECT_GE(checked, 4000);
}

TEST(HardDecode, MatchesBruteForceHamming) {
  CodeSpec spec{2, 1, 3, {015, 017}};
  const int L = 8;
  Trellis t(spec, L);
  Rng rng(52);
  for (int it = 0; it < 2000; ++it) {
    std::vector<int> received(static_cast<std::size_t>(spec.n) * (L + spec.mu));
    for (auto& b : received) b = rng.next_bit() ? 1 : 0;
    DecodeResult dr = hard_decode(received, t);
    SoftSequence unit(received.size());
    for (std::size_t i = 0; i < received.size(); ++i) unit[i] = received[i] ? -1.0 : 1.0;
    BruteForce bf(spec, L, unit);
    ASSERT_NEAR(dr.path_metric, bf.best_metric(), 1e-9);
    auto winners = bf.argmax_set();
    ASSERT_NE(std::find(winners.begin(), winners.end(), dr.info_estimate), winners.end());
    // deterministic tie-break
    ASSERT_EQ(hard_decode(received, t).info_estimate, dr.info_estimate);
  }
}

TEST(HardDecode, CorrectsSingleErrorAtFreeDistanceFive) {
  CodeSpec spec{2, 1, 2, {07, 05}};
  const int L = 8;
  Trellis t(spec, L);
  Rng rng(53);
  BitVec info = random_info(rng, L);
  BitVec cw = encode(info, spec);
  for (std::size_t flip = 0; flip < cw.size(); ++flip) {
    std::vector<int> received(cw.begin(), cw.end());
    received[flip] ^= 1;
    EXPECT_EQ(hard_decode(received, t).info_estimate, info) << "flip at " << flip;
  }
}

TEST(ViterbiDecode, ScaleInvariance) {
  CodeSpec spec = *lookup_code(2, 1, 6);
  const int L = 32;
  Trellis t(spec, L);
  Rng rng(54);
  for (int it = 0; it < 50; ++it) {
    SoftSequence soft = random_soft(rng, static_cast<std::size_t>(spec.n) * (L + spec.mu));
    BitVec base = viterbi_decode(soft, t).info_estimate;
    for (double scale : {0.01, 3.7, 1000.0}) {
      SoftSequence scaled = soft;
      for (auto& v : scaled) v *= scale;
      EXPECT_EQ(viterbi_decode(scaled, t).info_estimate, base);
    }
  }
}

TEST(ViterbiDecode, SurvivorMetricSelfConsistent) {
  Rng rng(55);
  for (const auto& spec : registry()) {
    if (spec.mu > 8) continue;
    const int L = 24;
    Trellis t(spec, L);
    SoftSequence soft = random_soft(rng, static_cast<std::size_t>(spec.n) * (L + spec.mu));
    DecodeResult dr = viterbi_decode(soft, t);
    EXPECT_DOUBLE_EQ(correlation_metric(encode(dr.info_estimate, spec), soft), dr.path_metric);
  }
}

TEST(ListDecode, SizeOneEqualsViterbi) {
  CodeSpec spec = *lookup_code(2, 1, 6);
  const int L = 32;
  Trellis t(spec, L);
  Rng rng(56);
  for (int it = 0; it < 20; ++it) {
    SoftSequence soft = random_soft(rng, static_cast<std::size_t>(spec.n) * (L + spec.mu));
    DecodeResult one = list_decode(soft, t, 1);
    DecodeResult ml = viterbi_decode(soft, t);
    EXPECT_EQ(one.info_estimate, ml.info_estimate);
    EXPECT_DOUBLE_EQ(one.path_metric, ml.path_metric);
  }
}

TEST(ListDecode, FullRankingMatchesBruteForce) {
  CodeSpec spec{2, 1, 2, {07, 05}};
  const int L = 6;
  Trellis t(spec, L);
  Rng rng(57);
  for (int it = 0; it < 200; ++it) {
    SoftSequence soft = random_soft(rng, static_cast<std::size_t>(spec.n) * (L + spec.mu));
    DecodeResult dr = list_decode(soft, t, 64);
    ASSERT_EQ(dr.candidates.size(), 64u);
    BruteForce bf(spec, L, soft);
    std::vector<double> sorted = bf.metrics;
    std::sort(sorted.rbegin(), sorted.rend());
    for (std::size_t i = 0; i < 64; ++i) {
      ASSERT_NEAR(dr.candidates[i].metric, sorted[i], 1e-9) << "rank " << i;
      // the reported metric matches the candidate's own re-encoded metric
      ASSERT_NEAR(correlation_metric(encode(dr.candidates[i].info, spec), soft),
                  dr.candidates[i].metric, 1e-9);
    }
  }
}

TEST(ListDecode, CandidatesDistinctAndOrdered) {
  CodeSpec spec = *lookup_code(2, 1, 6);
  const int L = 32;
  Trellis t(spec, L);
  Rng rng(58);
  for (int it = 0; it < 30; ++it) {
    SoftSequence soft = random_soft(rng, static_cast<std::size_t>(spec.n) * (L + spec.mu));
    DecodeResult dr = list_decode(soft, t, 8);
    ASSERT_EQ(dr.candidates.size(), 8u);
    EXPECT_EQ(dr.candidates.front().info, viterbi_decode(soft, t).info_estimate);
    for (std::size_t i = 1; i < dr.candidates.size(); ++i) {
      EXPECT_LE(dr.candidates[i].metric, dr.candidates[i - 1].metric + 1e-12);
      for (std::size_t j = 0; j < i; ++j) {
        EXPECT_NE(dr.candidates[i].info, dr.candidates[j].info);
      }
    }
  }
}

TEST(ListDecode, TruncatesWhenListExceedsCodebook) {
  CodeSpec spec{2, 1, 2, {07, 05}};
  const int L = 3;
  Trellis t(spec, L);
  SoftSequence soft(static_cast<std::size_t>(spec.n) * (L + spec.mu), 0.5);
  DecodeResult dr = list_decode(soft, t, 1000);
  EXPECT_EQ(dr.candidates.size(), 8u);  // 2^3 codewords only
}

TEST(RankByLikelihood, SingleAndPairwise) {
  CodeSpec spec{2, 1, 2, {07, 05}};
  const int L = 4;
  BitVec info{1, 0, 1, 0};
  BitVec cw = encode(info, spec);
  std::vector<int> received(cw.begin(), cw.end());
  std::vector<double> p(cw.size(), 0.1);

  auto single = rank_by_likelihood({info}, p, received, spec);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_DOUBLE_EQ(single[0].log_ratio_to_best, 0.0);

  // second candidate differing in exactly one code bit at p=0.1: ratio 9
  BitVec info2{1, 0, 1, 1};
  BitVec cw2 = encode(info2, spec);
  int diff = 0;
  for (std::size_t i = 0; i < cw.size(); ++i) diff += cw[i] != cw2[i];
  ASSERT_GE(diff, 1);
  auto ranked = rank_by_likelihood({info, info2}, p, received, spec);
  EXPECT_EQ(ranked[0].info, info);
  EXPECT_NEAR(std::exp(ranked[1].log_ratio_to_best), std::pow(9.0, diff), 1e-6);
}

TEST(RankByLikelihood, AgreesWithListMetricOrder) {
  CodeSpec spec = *lookup_code(2, 1, 6);
  const int L = 16;
  Trellis t(spec, L);
  Rng rng(59);
  for (int it = 0; it < 100; ++it) {
    // per-bit channel with genuine LLR soft values
    std::vector<double> p(static_cast<std::size_t>(spec.n) * (L + spec.mu));
    std::vector<int> received(p.size());
    SoftSequence soft(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = 0.02 + 0.45 * rng.next_open01();
      received[i] = rng.next_bit() ? 1 : 0;
      soft[i] = soft_value(received[i], 0, p[i]);
    }
    DecodeResult dr = list_decode(soft, t, 4);
    std::vector<BitVec> cands;
    for (const auto& c : dr.candidates) cands.push_back(c.info);
    auto ranked = rank_by_likelihood(cands, p, received, spec);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      EXPECT_EQ(ranked[i].info, cands[i]) << "iteration " << it << " rank " << i;
    }
  }
}

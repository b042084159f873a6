//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/similarity.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "rxngrow/errors.h"
#include "rxngrow/util/rng.h"

namespace rxngrow {
namespace {

Embedding emb(std::vector<float> v, std::string id = "e") {
  const int dim = static_cast<int>(v.size());
  return {std::move(v), dim, std::move(id)};
}

TEST(Similarity, OrdersByScoreThenId) {
  std::map<std::string, Embedding> kb = {
      {"BBBB", emb({1, 0})}, {"AAAA", emb({1, 0})}, {"CCCC", emb({0, 1})}};
  const auto hits = topk_similar(emb({2, 0}), kb, 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].pdb_id, "AAAA");
  EXPECT_EQ(hits[1].pdb_id, "BBBB");
  EXPECT_DOUBLE_EQ(hits[0].score, 1.0);
}

TEST(Similarity, ClampsKAndValidates) {
  std::map<std::string, Embedding> kb = {{"AAAA", emb({1, 0})}};
  EXPECT_EQ(topk_similar(emb({1, 1}), kb, 5).size(), 1u);
  EXPECT_THROW(topk_similar(emb({1, 1}), kb, 0), ConfigError);
  EXPECT_THROW(topk_similar(emb({0, 0}), kb, 1), ZeroNormError);
  EXPECT_THROW(topk_similar(emb({1, 1, 1}), kb, 1), DimensionMismatchError);
  EXPECT_THROW(topk_similar(emb({1, 1}, "other"), kb, 1),
               DimensionMismatchError);
  kb["BBBB"] = emb({0, 0});
  EXPECT_THROW(topk_similar(emb({1, 1}), kb, 1), ZeroNormError);
}

TEST(Similarity, MatchesBruteForceAndIsScaleInvariant) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform_index(16));
    const int n = 1 + static_cast<int>(rng.uniform_index(50));
    std::map<std::string, Embedding> kb;
    for (int i = 0; i < n; ++i) {
      std::vector<float> v(dim);
      for (auto &x: v)
        x = static_cast<float>(rng.normal());
      kb["P" + std::to_string(1000 + i)] = emb(v);
    }
    std::vector<float> q(dim);
    for (auto &x: q)
      x = static_cast<float>(rng.normal());
    std::vector<SimilarityHit> brute;
    for (const auto &[id, e]: kb)
      brute.push_back({id, cosine(q, e.vector)});
    std::sort(brute.begin(), brute.end(), [](const auto &a, const auto &b) {
      return a.score != b.score ? a.score > b.score : a.pdb_id < b.pdb_id;
    });
    const int k = 1 + static_cast<int>(rng.uniform_index(n));
    brute.resize(k);
    const auto hits = topk_similar(emb(q), kb, k);
    ASSERT_EQ(hits.size(), brute.size());
    for (int i = 0; i < k; ++i) {
      EXPECT_EQ(hits[i].pdb_id, brute[i].pdb_id);
      EXPECT_NEAR(hits[i].score, brute[i].score, 1e-12);
    }
    std::vector<float> scaled = q;
    for (auto &x: scaled)
      x *= 8.0f;
    const auto hits2 = topk_similar(emb(scaled), kb, k);
    for (int i = 0; i < k; ++i)
      EXPECT_EQ(hits2[i].pdb_id, hits[i].pdb_id);
  }
}

}  // namespace
}  // namespace rxngrow

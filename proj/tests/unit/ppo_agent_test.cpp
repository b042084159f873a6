//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/ppo_agent.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "../common/bandit.h"
#include "../common/oracles.h"
#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"
#include "test_support.h"

namespace rxngrow {
namespace {

TEST(Softmax, SumsToOneAndShiftInvariant) {
  Rng rng(2);
  for (int n = 1; n <= 64; ++n) {
    std::vector<double> z(n);
    for (auto &x: z)
      x = 10 * rng.normal();
    const auto p = softmax(z);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    std::vector<double> shifted = z;
    for (auto &x: shifted)
      x += 1234.5;
    const auto q = softmax(shifted);
    for (int i = 0; i < n; ++i)
      EXPECT_NEAR(p[i], q[i], 1e-9);
  }
}

TEST(Softmax, ExtremeLogitsStayFinite) {
  const auto p = softmax(std::vector<double>{1000, 0, -1000});
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_EQ(p[2], 0.0);
  const auto l = log_softmax(std::vector<double>{1000, 0});
  EXPECT_TRUE(std::isfinite(l[1]));
  EXPECT_NEAR(l[1], -1000, 1e-9);
  EXPECT_THROW(softmax(std::vector<double>{}), EmptyActionSetError);
}

TEST(Policy, SelectAction) {
  Rng rng(1);
  const auto [g, lp] = select_action({0.25, 0.375, 0.375}, SelectMode::kGreedy, rng);
  EXPECT_EQ(g, 1);
  EXPECT_DOUBLE_EQ(lp, std::log(0.375));
  const auto [one, lp1] = select_action({1.0}, SelectMode::kSample, rng);
  EXPECT_EQ(one, 0);
  EXPECT_EQ(lp1, 0.0);
  std::vector<int> counts(3);
  for (int i = 0; i < 9000; ++i)
    ++counts[select_action({0.2, 0.3, 0.5}, SelectMode::kSample, rng).first];
  EXPECT_NEAR(counts[2] / 9000.0, 0.5, 0.03);
}

TEST(Policy, ForwardShapesAndErrors) {
  Rng rng(4);
  const PolicyParams p = PolicyParams::init(8, 5, rng);
  EXPECT_EQ(p.size(), 5 * 8 + 5 + 5 * 5 + 5 + 5 + 1 + 8 * 5 + 8);
  const PolicyOutput out = policy_forward(Eigen::VectorXd::Ones(8), p);
  EXPECT_EQ(out.query.size(), 8);
  EXPECT_EQ(out.value, 0.0);  // zero-initialized value head
  EXPECT_THROW(policy_distribution(out.query, Eigen::MatrixXd(0, 8)),
               EmptyActionSetError);
  EXPECT_THROW(policy_distribution(out.query, Eigen::MatrixXd(2, 3)),
               DimensionMismatchError);
  const Embedding bad{std::vector<float>(3), 3, "x"};
  EXPECT_THROW(policy_forward(bad, p), DimensionMismatchError);
}

TEST(Gae, MatchesNestedSum) {
  Rng rng(8);
  for (int n = 1; n <= 15; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> r(n), v(n);
      for (int i = 0; i < n; ++i) {
        r[i] = rng.normal();
        v[i] = rng.normal();
      }
      const double gamma = 0.9 + 0.1 * rng.uniform();
      const double lambda = rng.uniform();
      const Advantages a = compute_gae(r, v, gamma, lambda);
      const auto expect = oracle::gae_nested_sum(r, v, gamma, lambda);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(a.advantages[i], expect[i], 1e-10);
        EXPECT_NEAR(a.returns[i], expect[i] + v[i], 1e-10);
      }
    }
  }
}

TEST(Gae, LambdaOneIsMonteCarlo) {
  const std::vector<double> r = {0, 0, 2};
  const std::vector<double> v = {0.5, -1, 3};
  const Advantages a = compute_gae(r, v, 0.9, 1.0);
  EXPECT_NEAR(a.returns[0], 0.81 * 2, 1e-12);
  EXPECT_NEAR(a.advantages[0], 0.81 * 2 - 0.5, 1e-12);
}

TEST(Loss, AnalyticGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed: {1, 2, 3}) {
    const oracle::ToyProblem toy = oracle::make_toy(seed);
    EXPECT_LT(oracle::fd_max_relative_error(toy), 1e-4) << seed;
  }
}

TEST(Loss, ClipFractionAndComponents) {
  oracle::ToyProblem toy = oracle::make_toy(5);
  std::vector<const PpoSample *> batch;
  for (auto &s: toy.samples) {
    s.old_log_prob = -1e-9 + std::log(policy_distribution(
                                 policy_forward(s.state, toy.params).query,
                                 s.actions)[s.chosen]);
    batch.push_back(&s);
  }
  const LossTerms t = ppo_loss(toy.params, batch, toy.cfg, nullptr);
  EXPECT_EQ(t.clip_fraction, 0.0);
  EXPECT_NEAR(t.total,
              -t.surrogate + toy.cfg.value_coef * t.value_loss
                  - toy.cfg.entropy_coef * t.entropy,
              1e-12);
  EXPECT_LE(t.entropy, std::log(3.0) + 1e-12);
}

RolloutBuffer toy_buffer(const oracle::ToyProblem &toy) {
  RolloutBuffer b;
  b.add_episode({toy.samples.begin(), toy.samples.begin() + 3}, {0, 0, 1},
                0.99, 0.95);
  b.add_episode({toy.samples.begin() + 3, toy.samples.end()}, {0, 1, 0},
                0.99, 0.95);
  return b;
}

TEST(Agent, NonFiniteLossRestoresState) {
  const oracle::ToyProblem toy = oracle::make_toy(6);
  PpoAgent agent(4, toy.cfg, 1);
  agent.mutable_params() = toy.params;
  RolloutBuffer b = toy_buffer(toy);
  agent.update(b);
  const std::string before = agent.serialize_checkpoint();
  b.samples[0].ret = std::numeric_limits<double>::infinity();
  EXPECT_THROW(agent.update(b), NonFiniteLossError);
  EXPECT_EQ(agent.serialize_checkpoint(), before);
}

TEST(Agent, CheckpointRoundTripIsBitExact) {
  const oracle::ToyProblem toy = oracle::make_toy(7);
  PpoAgent agent(4, toy.cfg, 3);
  RolloutBuffer b = toy_buffer(toy);
  agent.update(b);
  testing::TempDir dir("ckpt");
  agent.save_checkpoint(dir.file("c.bin"));
  PpoAgent other(4, toy.cfg, 99);
  other.load_checkpoint(dir.file("c.bin"));
  EXPECT_EQ(other.serialize_checkpoint(), agent.serialize_checkpoint());
  EXPECT_EQ(other.params().theta, agent.params().theta);
  // Continuing from both gives the same result.
  RolloutBuffer b1 = toy_buffer(toy), b2 = toy_buffer(toy);
  agent.update(b1);
  other.update(b2);
  EXPECT_EQ(other.serialize_checkpoint(), agent.serialize_checkpoint());
  write_file_atomic(dir.file("bad.bin"), "RXNGCKPT-truncated");
  EXPECT_THROW(other.load_checkpoint(dir.file("bad.bin")), FormatError);
}

TEST(Agent, BanditLearns) {
  const bandit::Result r = bandit::run(42, 30, 8, 0.9, false);
  EXPECT_GT(r.updates_to_threshold, 0);
  EXPECT_LE(r.updates_to_threshold, 200);
  // Stays converged once there.
  EXPECT_GT(r.final_probability, 0.9);
  EXPECT_EQ(bandit::run(42, 30, 8, 0.9, false).probability_per_update,
            r.probability_per_update);
}

}  // namespace
}  // namespace rxngrow

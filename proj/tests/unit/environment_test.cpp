//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/environment.h"

#include <gtest/gtest.h>

#include <cmath>

#include "rxngrow/errors.h"
#include "rxngrow/pipeline.h"
#include "test_support.h"

namespace rxngrow {
namespace {

using testing::fixture;

// Everything an Environment borrows, built from the fixtures.
struct World {
  explicit World(EnvConfig cfg = {}, std::vector<std::string> seeds = {})
      : encoder(EncoderSpec::molecule("stub-m")),
        oracle("T", 77),
        params(PolicyParams::init(kMoleculeDim, 16, init_rng)) {
    if (seeds.empty())
      seeds = {"Cc1ccccc1", "O=C1CCc2ccccc21", "NS(=O)(=O)c1ccccc1"};
    for (const auto &s: seeds) {
      const Molecule m = parse_molecule(s, engine);
      pool.fragments.push_back(m);
      pool.provenance[m.smiles()] = {"XXXX"};
    }
    std::sort(pool.fragments.begin(), pool.fragments.end());
    library = build_library(parse_rule_dump(fixture("rules.tsv")));
    reference.insert("CCO");
    env = std::make_unique<Environment>(
        pool, library, engine, encoder, cache,
        RewardContext{&oracle, &scores, &reference, {}, false}, cfg);
  }
  Rng init_rng{5};
  NativeEngine engine;
  StubEncoder encoder;
  EmbeddingCache cache;
  SurrogateOracle oracle;
  ScoreCache scores;
  ReferenceSet reference;
  FragmentPool pool;
  TemplateLibrary library;
  PolicyParams params;
  std::unique_ptr<Environment> env;
};

TEST(Environment, ResetIsSeededAndInPool) {
  World w;
  Rng a(3), b(3);
  const EnvState s = w.env->reset(a);
  EXPECT_EQ(s.molecule, w.env->reset(b).molecule);
  EXPECT_EQ(s.step_index, 0);
  EXPECT_TRUE(w.pool.provenance.count(s.molecule.smiles()));
  EXPECT_EQ(s.embedding.dim, kMoleculeDim);
}

TEST(Environment, StepContract) {
  World w;
  Rng rng(1);
  const EnvState s = w.env->reset(rng);
  const ActionSet acts = w.env->actions(s);
  ASSERT_FALSE(acts.empty());
  EXPECT_THROW(w.env->step(s, acts, -1), IndexError);
  EXPECT_THROW(w.env->step(s, acts, static_cast<int>(acts.size())), IndexError);
  const StepResult r = w.env->step(s, acts, 0);
  EXPECT_EQ(r.next.molecule, acts.entries[0].product);
  EXPECT_EQ(r.next.embedding, acts.entries[0].product_embedding);
  EXPECT_EQ(r.next.step_index, 1);
  EXPECT_FALSE(r.done);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_FALSE(r.breakdown.has_value());
}

TEST(Environment, EpisodeContract) {
  World w;
  AgentPolicy policy(w.params, SelectMode::kSample);
  for (int e = 0; e < 12; ++e) {
    Rng rng(Rng::derive(9, e));
    const Trajectory t = run_episode(*w.env, policy, rng, e);
    ASSERT_LE(t.steps.size(), 15u);
    ASSERT_GE(t.steps.size(), 1u);
    for (size_t i = 0; i + 1 < t.steps.size(); ++i)
      EXPECT_EQ(t.steps[i].reward, 0.0);
    const double terminal = t.steps.back().reward;
    EXPECT_EQ(terminal, t.terminal_breakdown.total);
    EXPECT_NEAR(discounted_return(t, 0.99),
                std::pow(0.99, double(t.steps.size() - 1)) * terminal, 1e-12);
    for (const auto &step: t.steps) {
      // Stored embeddings are reproducible from the stored molecules.
      EmbeddingCache fresh;
      EXPECT_EQ(encode_molecule(step.state.molecule, w.encoder, fresh),
                step.state.embedding);
      EXPECT_LT(step.chosen_index, static_cast<int>(step.action_set.size()));
    }
    if (t.steps.size() < 15)
      EXPECT_TRUE(w.env->actions(EnvState{t.terminal_molecule, {}, 0}).empty());
  }
}

TEST(Environment, FrozenPolicyIsDeterministic) {
  World w1, w2;
  AgentPolicy p1(w1.params, SelectMode::kSample);
  AgentPolicy p2(w2.params, SelectMode::kSample);
  Rng a(4), b(4);
  EXPECT_EQ(trajectory_jsonl(run_episode(*w1.env, p1, a, 0)),
            trajectory_jsonl(run_episode(*w2.env, p2, b, 0)));
}

TEST(Environment, DeadEndStartGivesEmptyEpisode) {
  World w({}, {"FC(F)(F)C(F)(F)F"});
  AgentPolicy policy(w.params, SelectMode::kGreedy);
  Rng rng(1);
  const Trajectory t = run_episode(*w.env, policy, rng);
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.terminal_molecule.smiles(), "FC(F)(F)C(F)(F)F");
  EXPECT_NE(t.terminal_breakdown.total, 0.0);
  EXPECT_EQ(discounted_return(t, 0.99), 0.0);
}

TEST(Environment, DenseModeScoresEveryStep) {
  EnvConfig cfg;
  cfg.reward_mode = RewardMode::kDense;
  cfg.horizon = 4;
  World w(cfg);
  AgentPolicy policy(w.params, SelectMode::kSample);
  Rng rng(2);
  const Trajectory t = run_episode(*w.env, policy, rng);
  ASSERT_LE(t.steps.size(), 4u);
  for (const auto &s: t.steps) {
    ASSERT_TRUE(s.breakdown.has_value());
    EXPECT_EQ(s.reward, s.breakdown->total);
  }
}

TEST(Environment, DiscountedReturn) {
  EXPECT_DOUBLE_EQ(discounted_return(std::vector<double>(15, 1.0), 1.0), 15.0);
  std::vector<double> r(15, 0.0);
  r[14] = 2.0;
  EXPECT_NEAR(discounted_return(r, 0.99), std::pow(0.99, 14) * 2.0, 1e-15);
  Rng rng(3);
  std::vector<double> x(11);
  double brute = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    double g = 1;
    for (size_t k = 0; k < i; ++k)
      g *= 0.9;
    brute += g * x[i];
  }
  EXPECT_NEAR(discounted_return(x, 0.9), brute, 1e-12);
}

TEST(Environment, RejectsBadConfig) {
  EnvConfig cfg;
  cfg.horizon = 0;
  EXPECT_THROW(World w(cfg), ConfigError);
  cfg.horizon = 15;
  cfg.gamma = 1.5;
  EXPECT_THROW(World w(cfg), ConfigError);
}

}  // namespace
}  // namespace rxngrow

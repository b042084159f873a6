//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_ENVIRONMENT_H_
#define RXNGROW_ENVIRONMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rxngrow/chem_core.h"
#include "rxngrow/encoders.h"
#include "rxngrow/fragmenter.h"
#include "rxngrow/reward_oracles.h"
#include "rxngrow/templates.h"
#include "rxngrow/util/rng.h"

namespace rxngrow {

enum class RewardMode { kTerminal, kDense };

struct EnvConfig {
  int horizon = 15;
  double gamma = 0.99;
  RewardMode reward_mode = RewardMode::kTerminal;
  size_t max_actions = kDefaultMaxActions;  // 0 means no limit
  std::uint64_t rng_seed = 0;
};

struct EnvState {
  Molecule molecule;
  Embedding embedding;
  int step_index = 0;
};

struct ActionEntry {
  int template_id = 0;
  Molecule product;
  Embedding product_embedding;
};

struct ActionSet {
  std::vector<ActionEntry> entries;

  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

struct StepRecord {
  EnvState state;
  ActionSet action_set;
  int chosen_index = 0;
  double log_prob = 0;
  double value_estimate = 0;
  double reward = 0;
  // Breakdown of the molecule reached by this step, when it was scored.
  std::optional<RewardBreakdown> breakdown;
};

struct Trajectory {
  std::int64_t episode_id = 0;
  std::vector<StepRecord> steps;
  Molecule terminal_molecule;
  RewardBreakdown terminal_breakdown;
};

struct StepResult {
  EnvState next;
  ActionSet next_actions;  // empty when done
  double reward = 0;
  bool done = false;
  std::optional<RewardBreakdown> breakdown;
};

struct Decision {
  int index = 0;
  double log_prob = 0;
  double value = 0;
};

class Policy {
public:
  virtual ~Policy() = default;
  // actions is never empty.
  virtual Decision decide(const EnvState &state, const ActionSet &actions,
                          Rng &rng) = 0;
};

// One worker's view of the MDP. Borrows everything; not thread safe.
class Environment {
public:
  // Throws ConfigError for horizon < 1 or gamma outside (0, 1].
  Environment(const FragmentPool &pool, const TemplateLibrary &library,
              ChemEngine &engine, Encoder &encoder, EmbeddingCache &cache,
              RewardContext rewards, EnvConfig cfg);

  const EnvConfig &config() const { return cfg_; }

  // Samples a start fragment. Throws EmptyPoolError.
  EnvState reset(Rng &rng);
  // Applicable products of the state's molecule with their embeddings.
  ActionSet actions(const EnvState &state);
  // Moves to the chosen product. Throws IndexError for a bad index.
  StepResult step(const EnvState &state, const ActionSet &actions,
                  int chosen_index);
  RewardBreakdown score(Molecule &m);

private:
  const FragmentPool &pool_;
  const TemplateLibrary &library_;
  ChemEngine &engine_;
  Encoder &encoder_;
  EmbeddingCache &cache_;
  RewardContext rewards_;
  EnvConfig cfg_;
};

// Runs reset and steps until done. A start fragment with no applicable
// template gives an episode with no steps, scored on the fragment.
Trajectory run_episode(Environment &env, Policy &policy, Rng &rng,
                       std::int64_t episode_id = 0);

double discounted_return(const std::vector<double> &rewards, double gamma);
double discounted_return(const Trajectory &traj, double gamma);

// One JSON object per step, newline terminated.
std::string trajectory_jsonl(const Trajectory &traj);

}  // namespace rxngrow

#endif  // RXNGROW_ENVIRONMENT_H_

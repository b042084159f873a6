//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/environment.h"

#include <cmath>
#include <nlohmann/json.hpp>

#include "rxngrow/errors.h"

namespace rxngrow {

namespace {

nlohmann::json breakdown_json(const RewardBreakdown &b) {
  return {{"affinity", b.affinity_component},
          {"qed", b.qed_component},
          {"sa", b.sa_component},
          {"novelty", b.novelty_component},
          {"total", b.total},
          {"docked_score", b.docked_score},
          {"docking_failed", b.docking_failed}};
}

}  // namespace

Environment::Environment(const FragmentPool &pool,
                         const TemplateLibrary &library, ChemEngine &engine,
                         Encoder &encoder, EmbeddingCache &cache,
                         RewardContext rewards, EnvConfig cfg)
    : pool_(pool),
      library_(library),
      engine_(engine),
      encoder_(encoder),
      cache_(cache),
      rewards_(rewards),
      cfg_(cfg) {
  if (cfg_.horizon < 1)
    throw ConfigError("horizon must be at least 1");
  if (!(cfg_.gamma > 0 && cfg_.gamma <= 1))
    throw ConfigError("gamma must lie in (0, 1]");
}

EnvState Environment::reset(Rng &rng) {
  Molecule m = sample_start(pool_, rng);
  Embedding e = encode_molecule(m, encoder_, cache_);
  return EnvState{std::move(m), std::move(e), 0};
}

ActionSet Environment::actions(const EnvState &state) {
  std::vector<Action> raw =
      enumerate_actions(state.molecule, library_, engine_, cfg_.max_actions);
  std::vector<Molecule> products;
  for (const auto &a: raw)
    products.push_back(a.product);
  std::vector<Embedding> embs = encode_molecules(products, encoder_, cache_);
  ActionSet set;
  for (size_t i = 0; i < raw.size(); ++i)
    set.entries.push_back(
        {raw[i].template_id, std::move(raw[i].product), std::move(embs[i])});
  return set;
}

RewardBreakdown Environment::score(Molecule &m) {
  return evaluate_reward(m, engine_, rewards_);
}

StepResult Environment::step(const EnvState &state, const ActionSet &actions,
                             int chosen_index) {
  if (chosen_index < 0 || chosen_index >= static_cast<int>(actions.size()))
    throw IndexError("action index " + std::to_string(chosen_index)
                     + " outside [0, " + std::to_string(actions.size()) + ")");
  const ActionEntry &a = actions.entries[chosen_index];
  StepResult r{EnvState{a.product, a.product_embedding, state.step_index + 1},
               {}, 0.0, false, std::nullopt};
  if (r.next.step_index < cfg_.horizon)
    r.next_actions = this->actions(r.next);
  r.done = r.next.step_index >= cfg_.horizon || r.next_actions.empty();
  if (r.done || cfg_.reward_mode == RewardMode::kDense) {
    r.breakdown = score(r.next.molecule);
    r.reward = r.breakdown->total;
  }
  if (r.done)
    r.next_actions.entries.clear();
  return r;
}

Trajectory run_episode(Environment &env, Policy &policy, Rng &rng,
                       std::int64_t episode_id) {
  EnvState state = env.reset(rng);
  ActionSet actions = env.actions(state);
  std::vector<StepRecord> steps;
  std::optional<RewardBreakdown> last;
  while (!actions.empty()) {
    const Decision d = policy.decide(state, actions, rng);
    StepResult r = env.step(state, actions, d.index);
    steps.push_back(StepRecord{std::move(state), std::move(actions), d.index,
                               d.log_prob, d.value, r.reward, r.breakdown});
    state = std::move(r.next);
    actions = std::move(r.next_actions);
    last = r.breakdown;
    if (r.done)
      break;
  }
  if (!last)
    last = env.score(state.molecule);
  return Trajectory{episode_id, std::move(steps), std::move(state.molecule),
                    *last};
}

double discounted_return(const std::vector<double> &rewards, double gamma) {
  double g = 0;
  double discount = 1;
  for (double r: rewards) {
    g += discount * r;
    discount *= gamma;
  }
  return g;
}

double discounted_return(const Trajectory &traj, double gamma) {
  std::vector<double> rewards;
  for (const auto &s: traj.steps)
    rewards.push_back(s.reward);
  return discounted_return(rewards, gamma);
}

std::string trajectory_jsonl(const Trajectory &traj) {
  std::string out;
  for (size_t t = 0; t < traj.steps.size(); ++t) {
    const StepRecord &s = traj.steps[t];
    const ActionEntry &a = s.action_set.entries[s.chosen_index];
    nlohmann::json j = {{"episode", traj.episode_id},
                        {"step", t},
                        {"smiles", s.state.molecule.smiles()},
                        {"num_actions", s.action_set.size()},
                        {"chosen_index", s.chosen_index},
                        {"template_id", a.template_id},
                        {"product", a.product.smiles()},
                        {"log_prob", s.log_prob},
                        {"value", s.value_estimate},
                        {"reward", s.reward},
                        {"done", t + 1 == traj.steps.size()}};
    if (s.breakdown)
      j["breakdown"] = breakdown_json(*s.breakdown);
    out += j.dump() + "\n";
  }
  if (traj.steps.empty()) {
    nlohmann::json j = {{"episode", traj.episode_id},
                        {"step", nullptr},
                        {"smiles", traj.terminal_molecule.smiles()},
                        {"num_actions", 0},
                        {"done", true},
                        {"breakdown", breakdown_json(traj.terminal_breakdown)}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace rxngrow

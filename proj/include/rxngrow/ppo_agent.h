//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_PPO_AGENT_H_
#define RXNGROW_PPO_AGENT_H_

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rxngrow/encoders.h"
#include "rxngrow/util/rng.h"

namespace rxngrow {

struct PPOConfig {
  double clip_epsilon = 0.2;
  double gae_lambda = 0.95;
  double gamma = 0.99;
  double learning_rate = 3e-4;
  int epochs_per_update = 4;
  int minibatch_size = 64;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  // Global gradient-norm clip per minibatch step; 0 disables.
  double max_grad_norm = 0.5;
  int buffer_episodes = 2;
  int hidden = 256;
};

// Actor-critic parameters in one flat vector:
//   h1 = tanh(W1 s + b1), h2 = tanh(W2 h1 + b2)
//   v = wv . h2 + bv,     q = Wq h2 + bq
// Matrices are column-major views into theta.
class PolicyParams {
public:
  PolicyParams() = default;
  PolicyParams(int input_dim, int hidden);

  // Xavier-uniform trunk, query head scaled by query_scale, zero value head
  // and biases.
  static PolicyParams init(int input_dim, int hidden, Rng &rng,
                           double query_scale = 0.01);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  Eigen::Index size() const { return theta.size(); }

  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  ConstMatMap W1() const;
  ConstVecMap b1() const;
  ConstMatMap W2() const;
  ConstVecMap b2() const;
  ConstVecMap wv() const;
  double bv() const;
  ConstMatMap Wq() const;
  ConstVecMap bq() const;

  MatMap W1();
  VecMap b1();
  MatMap W2();
  VecMap b2();
  VecMap wv();
  double &bv();
  MatMap Wq();
  VecMap bq();

  Eigen::VectorXd theta;

private:
  int input_dim_ = 0;
  int hidden_ = 0;
};

struct PolicyOutput {
  double value = 0;
  Eigen::VectorXd query;
};

PolicyOutput policy_forward(const Eigen::VectorXd &s,
                            const PolicyParams &params);
// Throws DimensionMismatchError when s.dim differs from the input dim.
std::pair<double, Embedding> policy_forward(const Embedding &s,
                                            const PolicyParams &params);

// Max-subtracted softmax. Throws EmptyActionSetError for no logits.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

// Softmax of z_i = query . e_i over the rows of actions. Throws
// EmptyActionSetError, DimensionMismatchError.
std::vector<double> policy_distribution(const Eigen::VectorXd &query,
                                        const Eigen::MatrixXd &actions);
std::vector<double> policy_distribution(const Embedding &query,
                                        const std::vector<Embedding> &actions);

enum class SelectMode { kSample, kGreedy };

// (index, ln dist[index]). Greedy takes the lowest index among maxima.
std::pair<int, double> select_action(const std::vector<double> &dist,
                                     SelectMode mode, Rng &rng);

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// GAE with a zero bootstrap after the last step.
Advantages compute_gae(const std::vector<double> &rewards,
                       const std::vector<double> &values, double gamma,
                       double lambda);

// One decision point with everything needed to recompute its ratio.
struct PpoSample {
  Eigen::VectorXd state;
  Eigen::MatrixXd actions;  // K x dim, one embedding per row
  int chosen = 0;
  double old_log_prob = 0;
  double value = 0;
  double advantage = 0;
  double ret = 0;
};

struct RolloutBuffer {
  std::vector<PpoSample> samples;
  // Step count of each trajectory, in order.
  std::vector<int> episode_lengths;

  // Appends one trajectory's steps and fills advantages and returns.
  void add_episode(std::vector<PpoSample> steps,
                   const std::vector<double> &rewards, double gamma,
                   double lambda);
  bool empty() const { return samples.empty(); }
  void clear() {
    samples.clear();
    episode_lengths.clear();
  }
};

struct LossTerms {
  double total = 0;
  double surrogate = 0;   // mean clipped surrogate (maximized)
  double value_loss = 0;  // mean squared error
  double entropy = 0;     // mean policy entropy
  double clip_fraction = 0;
};

// total = -surrogate + value_coef * value_loss - entropy_coef * entropy
// over batch, with advantages taken as given. When grad is non-null it
// receives d total / d theta.
LossTerms ppo_loss(const PolicyParams &params,
                   const std::vector<const PpoSample *> &batch,
                   const PPOConfig &cfg, Eigen::VectorXd *grad);

struct UpdateStats {
  double surrogate_loss = 0;  // mean of -surrogate over minibatch steps
  double value_loss = 0;
  double entropy = 0;
  double clip_fraction = 0;
  int minibatch_steps = 0;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;
};

class PpoAgent {
public:
  PpoAgent(int input_dim, PPOConfig cfg, std::uint64_t seed);

  const PPOConfig &config() const { return cfg_; }
  const PolicyParams &params() const { return params_; }
  PolicyParams &mutable_params() { return params_; }
  const AdamState &adam() const { return adam_; }
  Rng &rng() { return rng_; }

  // Normalizes the buffer's advantages, then runs epochs of shuffled
  // minibatch Adam steps. Throws NonFiniteLossError, leaving parameters,
  // optimizer state and RNG as they were.
  UpdateStats update(RolloutBuffer &buffer);

  // Bit-exact round trip of parameters, optimizer state, config and RNG.
  std::string serialize_checkpoint() const;
  void restore_checkpoint(const std::string &bytes);
  void save_checkpoint(const std::string &path) const;
  // Throws FormatError.
  void load_checkpoint(const std::string &path);

private:
  PPOConfig cfg_;
  PolicyParams params_;
  AdamState adam_;
  Rng rng_;
};

}  // namespace rxngrow

#endif  // RXNGROW_PPO_AGENT_H_

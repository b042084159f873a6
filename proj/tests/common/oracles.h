//
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations shared by the unit and acceptance
// tests. Each one takes the slow, literal route.

#ifndef RXNGROW_TESTS_ORACLES_H_
#define RXNGROW_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "rxngrow/ppo_agent.h"
#include "rxngrow/util/rng.h"

namespace rxngrow::oracle {

// A_t = sum_l (gamma lambda)^l delta_{t+l}, each power built by repeated
// multiplication, V_T = 0.
inline std::vector<double> gae_nested_sum(const std::vector<double> &r,
                                          const std::vector<double> &v,
                                          double gamma, double lambda) {
  const size_t n = r.size();
  std::vector<double> out(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double acc = 0;
    for (size_t l = 0; t + l < n; ++l) {
      const size_t j = t + l;
      const double next = j + 1 < n ? v[j + 1] : 0.0;
      const double delta = r[j] + gamma * next - v[j];
      double w = 1;
      for (size_t p = 0; p < l; ++p)
        w *= gamma * lambda;
      acc += w * delta;
    }
    out[t] = acc;
  }
  return out;
}

// Three-action toy problem around small random parameters. Old log
// probabilities are perturbed so that both clip branches occur.
struct ToyProblem {
  PolicyParams params;
  std::vector<PpoSample> samples;
  PPOConfig cfg;
};

inline ToyProblem make_toy(std::uint64_t seed, int input_dim = 4,
                           int hidden = 6, int n_samples = 6) {
  ToyProblem toy;
  Rng rng(seed);
  toy.params = PolicyParams::init(input_dim, hidden, rng, 0.5);
  for (Eigen::Index i = 0; i < toy.params.size(); ++i)
    toy.params.theta[i] += 0.1 * rng.normal();
  toy.cfg.hidden = hidden;
  for (int s = 0; s < n_samples; ++s) {
    PpoSample x;
    x.state = Eigen::VectorXd(input_dim);
    for (int j = 0; j < input_dim; ++j)
      x.state[j] = rng.normal();
    x.actions = Eigen::MatrixXd(3, input_dim);
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < input_dim; ++j)
        x.actions(a, j) = rng.normal();
    x.chosen = static_cast<int>(rng.uniform_index(3));
    const PolicyOutput out = policy_forward(x.state, toy.params);
    const auto dist = policy_distribution(out.query, x.actions);
    x.old_log_prob = std::log(dist[x.chosen]) + 0.6 * (rng.uniform() - 0.5);
    x.advantage = rng.normal();
    x.ret = rng.normal();
    x.value = out.value;
    toy.samples.push_back(x);
  }
  return toy;
}

// Max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|,
// floor), with central differences of step h.
inline double fd_max_relative_error(const ToyProblem &toy, double h = 1e-6,
                                    double floor = 1e-6) {
  std::vector<const PpoSample *> batch;
  for (const auto &s: toy.samples)
    batch.push_back(&s);
  Eigen::VectorXd grad;
  ppo_loss(toy.params, batch, toy.cfg, &grad);
  PolicyParams p = toy.params;
  double worst = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double keep = p.theta[i];
    p.theta[i] = keep + h;
    const double up = ppo_loss(p, batch, toy.cfg, nullptr).total;
    p.theta[i] = keep - h;
    const double down = ppo_loss(p, batch, toy.cfg, nullptr).total;
    p.theta[i] = keep;
    const double num = (up - down) / (2 * h);
    const double den = std::max({std::abs(num), std::abs(grad[i]), floor});
    worst = std::max(worst, std::abs(num - grad[i]) / den);
  }
  return worst;
}

}  // namespace rxngrow::oracle

#endif  // RXNGROW_TESTS_ORACLES_H_

//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/ppo_agent.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"

namespace rxngrow {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kAdvantageEps = 1e-8;
constexpr char kCheckpointMagic[8] = {'R', 'X', 'N', 'G', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

struct Layout {
  Index d, h;
  Index W1() const { return 0; }
  Index b1() const { return W1() + h * d; }
  Index W2() const { return b1() + h; }
  Index b2() const { return W2() + h * h; }
  Index wv() const { return b2() + h; }
  Index bv() const { return wv() + h; }
  Index Wq() const { return bv() + 1; }
  Index bq() const { return Wq() + d * h; }
  Index total() const { return bq() + d; }
};

Layout layout(const PolicyParams &p) { return {p.input_dim(), p.hidden()}; }

void put_u64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string &in, size_t pos) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(in[pos + i]);
  return v;
}

void put_doubles(std::string &out, const VectorXd &v) {
  for (Index i = 0; i < v.size(); ++i)
    put_u64(out, std::bit_cast<std::uint64_t>(v[i]));
}

void get_doubles(const std::string &in, size_t &pos, VectorXd &v) {
  if (in.size() - pos < 8ull * v.size())
    throw FormatError("truncated checkpoint");
  for (Index i = 0; i < v.size(); ++i, pos += 8)
    v[i] = std::bit_cast<double>(get_u64(in, pos));
}

nlohmann::json config_to_json(const PPOConfig &c) {
  return {{"clip_epsilon", c.clip_epsilon},
          {"gae_lambda", c.gae_lambda},
          {"gamma", c.gamma},
          {"learning_rate", c.learning_rate},
          {"epochs_per_update", c.epochs_per_update},
          {"minibatch_size", c.minibatch_size},
          {"entropy_coef", c.entropy_coef},
          {"value_coef", c.value_coef},
          {"max_grad_norm", c.max_grad_norm},
          {"buffer_episodes", c.buffer_episodes},
          {"hidden", c.hidden}};
}

PPOConfig config_from_json(const nlohmann::json &j) {
  PPOConfig c;
  c.clip_epsilon = j.at("clip_epsilon").get<double>();
  c.gae_lambda = j.at("gae_lambda").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs_per_update = j.at("epochs_per_update").get<int>();
  c.minibatch_size = j.at("minibatch_size").get<int>();
  c.entropy_coef = j.at("entropy_coef").get<double>();
  c.value_coef = j.at("value_coef").get<double>();
  c.max_grad_norm = j.at("max_grad_norm").get<double>();
  c.buffer_episodes = j.at("buffer_episodes").get<int>();
  c.hidden = j.at("hidden").get<int>();
  return c;
}

void validate(const PPOConfig &c) {
  if (!(c.clip_epsilon > 0))
    throw ConfigError("clip_epsilon must be positive");
  if (!(c.gae_lambda >= 0 && c.gae_lambda <= 1))
    throw ConfigError("gae_lambda must lie in [0, 1]");
  if (!(c.gamma > 0 && c.gamma <= 1))
    throw ConfigError("gamma must lie in (0, 1]");
  if (!(c.learning_rate > 0) || c.epochs_per_update < 1
      || c.minibatch_size < 1 || c.buffer_episodes < 1 || c.hidden < 1)
    throw ConfigError("PPO learning rate, epochs, minibatch, buffer and "
                      "hidden sizes must be positive");
}

}  // namespace

PolicyParams::PolicyParams(int input_dim, int hidden)
    : input_dim_(input_dim), hidden_(hidden) {
  if (input_dim < 1 || hidden < 1)
    throw ConfigError("policy dimensions must be positive");
  theta = VectorXd::Zero(Layout{input_dim, hidden}.total());
}

PolicyParams PolicyParams::init(int input_dim, int hidden, Rng &rng,
                                double query_scale) {
  PolicyParams p(input_dim, hidden);
  auto fill = [&](auto m, double fan_in, double fan_out, double scale) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out)) * scale;
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i)
        m(i, j) = a * (2.0 * rng.uniform() - 1.0);
  };
  fill(p.W1(), input_dim, hidden, 1.0);
  fill(p.W2(), hidden, hidden, 1.0);
  fill(p.Wq(), hidden, input_dim, query_scale);
  return p;
}

#define RXNGROW_MAT(name, rows, cols)                                        \
  PolicyParams::ConstMatMap PolicyParams::name() const {                      \
    const Layout l = layout(*this);                                            \
    return ConstMatMap(theta.data() + l.name(), rows, cols);                   \
  }                                                                            \
  PolicyParams::MatMap PolicyParams::name() {                                  \
    const Layout l = layout(*this);                                            \
    return MatMap(theta.data() + l.name(), rows, cols);                        \
  }
#define RXNGROW_VEC(name, n)                                                 \
  PolicyParams::ConstVecMap PolicyParams::name() const {                      \
    const Layout l = layout(*this);                                            \
    return ConstVecMap(theta.data() + l.name(), n);                            \
  }                                                                            \
  PolicyParams::VecMap PolicyParams::name() {                                  \
    const Layout l = layout(*this);                                            \
    return VecMap(theta.data() + l.name(), n);                                 \
  }

RXNGROW_MAT(W1, hidden_, input_dim_)
RXNGROW_VEC(b1, hidden_)
RXNGROW_MAT(W2, hidden_, hidden_)
RXNGROW_VEC(b2, hidden_)
RXNGROW_VEC(wv, hidden_)
RXNGROW_MAT(Wq, input_dim_, hidden_)
RXNGROW_VEC(bq, input_dim_)

#undef RXNGROW_MAT
#undef RXNGROW_VEC

double PolicyParams::bv() const { return theta[layout(*this).bv()]; }
double &PolicyParams::bv() { return theta[layout(*this).bv()]; }

PolicyOutput policy_forward(const VectorXd &s, const PolicyParams &params) {
  if (s.size() != params.input_dim())
    throw DimensionMismatchError("state dim " + std::to_string(s.size())
                                 + " != policy input dim "
                                 + std::to_string(params.input_dim()));
  const VectorXd h1 = (params.W1() * s + params.b1()).array().tanh().matrix();
  const VectorXd h2 =
      (params.W2() * h1 + params.b2()).array().tanh().matrix();
  PolicyOutput out;
  out.value = params.wv().dot(h2) + params.bv();
  out.query = params.Wq() * h2 + params.bq();
  return out;
}

std::pair<double, Embedding> policy_forward(const Embedding &s,
                                            const PolicyParams &params) {
  if (s.dim != params.input_dim()
      || static_cast<int>(s.vector.size()) != s.dim)
    throw DimensionMismatchError("state embedding dim "
                                 + std::to_string(s.dim)
                                 + " != policy input dim "
                                 + std::to_string(params.input_dim()));
  const VectorXd x =
      Eigen::Map<const Eigen::VectorXf>(s.vector.data(), s.dim).cast<double>();
  PolicyOutput out = policy_forward(x, params);
  Embedding q;
  q.dim = static_cast<int>(out.query.size());
  q.encoder_id = "policy-query";
  q.vector.resize(q.dim);
  for (int i = 0; i < q.dim; ++i)
    q.vector[i] = static_cast<float>(out.query[i]);
  return {out.value, std::move(q)};
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty())
    throw EmptyActionSetError("softmax over an empty action set");
  double m = logits[0];
  for (double z: logits)
    m = std::max(m, z);
  std::vector<double> p(logits.size());
  double sum = 0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double &x: p)
    x /= sum;
  return p;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty())
    throw EmptyActionSetError("softmax over an empty action set");
  double m = logits[0];
  for (double z: logits)
    m = std::max(m, z);
  double sum = 0;
  for (double z: logits)
    sum += std::exp(z - m);
  const double lse = m + std::log(sum);
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i)
    out[i] = logits[i] - lse;
  return out;
}

std::vector<double> policy_distribution(const VectorXd &query,
                                        const MatrixXd &actions) {
  if (actions.rows() == 0)
    throw EmptyActionSetError("no actions to score");
  if (actions.cols() != query.size())
    throw DimensionMismatchError("action embedding dim "
                                 + std::to_string(actions.cols())
                                 + " != query dim "
                                 + std::to_string(query.size()));
  const VectorXd z = actions * query;
  return softmax(std::span<const double>(z.data(), z.size()));
}

std::vector<double> policy_distribution(
    const Embedding &query, const std::vector<Embedding> &actions) {
  if (actions.empty())
    throw EmptyActionSetError("no actions to score");
  MatrixXd e(actions.size(), query.dim);
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].dim != query.dim)
      throw DimensionMismatchError("action embedding dim mismatch");
    for (int j = 0; j < query.dim; ++j)
      e(i, j) = actions[i].vector[j];
  }
  const VectorXd q = Eigen::Map<const Eigen::VectorXf>(query.vector.data(),
                                                       query.dim)
                         .cast<double>();
  return policy_distribution(q, e);
}

std::pair<int, double> select_action(const std::vector<double> &dist,
                                     SelectMode mode, Rng &rng) {
  if (dist.empty())
    throw EmptyActionSetError("empty distribution");
  int index = 0;
  if (mode == SelectMode::kGreedy) {
    for (size_t i = 1; i < dist.size(); ++i)
      if (dist[i] > dist[index])
        index = static_cast<int>(i);
  } else {
    const double u = rng.uniform();
    double cum = 0;
    index = -1;
    for (size_t i = 0; i < dist.size(); ++i) {
      cum += dist[i];
      if (u < cum) {
        index = static_cast<int>(i);
        break;
      }
    }
    // Rounding can leave the total just below u; take the last nonzero.
    if (index < 0) {
      index = static_cast<int>(dist.size()) - 1;
      while (index > 0 && dist[index] == 0)
        --index;
    }
  }
  return {index, std::log(dist[index])};
}

Advantages compute_gae(const std::vector<double> &rewards,
                       const std::vector<double> &values, double gamma,
                       double lambda) {
  if (rewards.size() != values.size())
    throw DimensionMismatchError("rewards and values differ in length");
  const size_t n = rewards.size();
  Advantages out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0;
  for (size_t k = n; k-- > 0;) {
    const double next_value = k + 1 < n ? values[k + 1] : 0.0;
    const double delta = rewards[k] + gamma * next_value - values[k];
    next_adv = delta + gamma * lambda * next_adv;
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
  }
  return out;
}

void RolloutBuffer::add_episode(std::vector<PpoSample> steps,
                                const std::vector<double> &rewards,
                                double gamma, double lambda) {
  if (steps.size() != rewards.size())
    throw DimensionMismatchError("one reward per step expected");
  std::vector<double> values;
  for (const auto &s: steps)
    values.push_back(s.value);
  const Advantages a = compute_gae(rewards, values, gamma, lambda);
  for (size_t i = 0; i < steps.size(); ++i) {
    steps[i].advantage = a.advantages[i];
    steps[i].ret = a.returns[i];
    samples.push_back(std::move(steps[i]));
  }
  episode_lengths.push_back(static_cast<int>(rewards.size()));
}

LossTerms ppo_loss(const PolicyParams &params,
                   const std::vector<const PpoSample *> &batch,
                   const PPOConfig &cfg, VectorXd *grad) {
  LossTerms t;
  if (grad)
    grad->setZero(params.size());
  if (batch.empty())
    return t;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const Layout l = layout(params);
  const Index d = l.d;
  const Index h = l.h;
  for (const PpoSample *s: batch) {
    if (s->actions.rows() == 0)
      throw EmptyActionSetError("sample without actions");
    const VectorXd h1 =
        (params.W1() * s->state + params.b1()).array().tanh().matrix();
    const VectorXd h2 =
        (params.W2() * h1 + params.b2()).array().tanh().matrix();
    const double v = params.wv().dot(h2) + params.bv();
    const VectorXd q = params.Wq() * h2 + params.bq();
    const VectorXd z = s->actions * q;
    const std::vector<double> logp =
        log_softmax(std::span<const double>(z.data(), z.size()));
    const Index k = z.size();
    VectorXd p(k);
    double entropy = 0;
    for (Index i = 0; i < k; ++i) {
      p[i] = std::exp(logp[i]);
      entropy -= p[i] * logp[i];
    }
    const double ratio = std::exp(logp[s->chosen] - s->old_log_prob);
    const double a = s->advantage;
    const double unclipped = ratio * a;
    const double clipped =
        std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * a;
    const bool active = unclipped <= clipped;
    t.surrogate += std::min(unclipped, clipped) * inv_n;
    t.value_loss += (v - s->ret) * (v - s->ret) * inv_n;
    t.entropy += entropy * inv_n;
    if (std::abs(ratio - 1.0) > cfg.clip_epsilon)
      t.clip_fraction += inv_n;
    if (!grad)
      continue;

    VectorXd dz = VectorXd::Zero(k);
    if (active) {
      // d(-ratio * A)/d log pi(a) = -ratio * A; d log pi(a)/dz = e_a - p.
      const double c = -ratio * a * inv_n;
      dz -= c * p;
      dz[s->chosen] += c;
    }
    // d(-entropy_coef * H)/dz_i = entropy_coef * p_i (log p_i + H).
    for (Index i = 0; i < k; ++i)
      dz[i] += cfg.entropy_coef * inv_n * p[i] * (logp[i] + entropy);
    const VectorXd gq = s->actions.transpose() * dz;
    const double gv = cfg.value_coef * inv_n * 2.0 * (v - s->ret);

    VectorXd &g = *grad;
    Eigen::Map<MatrixXd>(g.data() + l.Wq(), d, h).noalias() +=
        gq * h2.transpose();
    g.segment(l.bq(), d) += gq;
    g.segment(l.wv(), h) += gv * h2;
    g[l.bv()] += gv;
    const VectorXd gh2 = gv * params.wv() + params.Wq().transpose() * gq;
    const VectorXd ga2 =
        (gh2.array() * (1.0 - h2.array().square())).matrix();
    Eigen::Map<MatrixXd>(g.data() + l.W2(), h, h).noalias() +=
        ga2 * h1.transpose();
    g.segment(l.b2(), h) += ga2;
    const VectorXd gh1 = params.W2().transpose() * ga2;
    const VectorXd ga1 =
        (gh1.array() * (1.0 - h1.array().square())).matrix();
    Eigen::Map<MatrixXd>(g.data() + l.W1(), h, d).noalias() +=
        ga1 * s->state.transpose();
    g.segment(l.b1(), h) += ga1;
  }
  t.total = -t.surrogate + cfg.value_coef * t.value_loss
            - cfg.entropy_coef * t.entropy;
  return t;
}

PpoAgent::PpoAgent(int input_dim, PPOConfig cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  validate(cfg_);
  params_ = PolicyParams::init(input_dim, cfg_.hidden, rng_);
  adam_.m = VectorXd::Zero(params_.size());
  adam_.v = VectorXd::Zero(params_.size());
}

UpdateStats PpoAgent::update(RolloutBuffer &buffer) {
  UpdateStats stats;
  const size_t n = buffer.samples.size();
  if (n == 0)
    throw ConfigError("PPO update on an empty buffer");

  // Normalized copies; the buffer keeps the raw advantages.
  std::vector<PpoSample> work = buffer.samples;
  double mean = 0;
  for (const auto &s: work)
    mean += s.advantage;
  mean /= static_cast<double>(n);
  double var = 0;
  for (const auto &s: work)
    var += (s.advantage - mean) * (s.advantage - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (auto &s: work)
    s.advantage = (s.advantage - mean) / (sd + kAdvantageEps);

  const PolicyParams saved_params = params_;
  const AdamState saved_adam = adam_;
  const Rng saved_rng = rng_;
  std::vector<size_t> order(n);
  VectorXd grad;
  for (int epoch = 0; epoch < cfg_.epochs_per_update; ++epoch) {
    for (size_t i = 0; i < n; ++i)
      order[i] = i;
    for (size_t i = n; i > 1; --i)
      std::swap(order[i - 1], order[rng_.uniform_index(i)]);
    for (size_t start = 0; start < n;
         start += static_cast<size_t>(cfg_.minibatch_size)) {
      const size_t end =
          std::min(n, start + static_cast<size_t>(cfg_.minibatch_size));
      std::vector<const PpoSample *> batch;
      for (size_t i = start; i < end; ++i)
        batch.push_back(&work[order[i]]);
      const LossTerms t = ppo_loss(params_, batch, cfg_, &grad);
      if (!std::isfinite(t.total) || !grad.allFinite()) {
        params_ = saved_params;
        adam_ = saved_adam;
        rng_ = saved_rng;
        throw NonFiniteLossError("non-finite PPO loss or gradient at epoch "
                                 + std::to_string(epoch));
      }
      if (cfg_.max_grad_norm > 0) {
        const double norm = grad.norm();
        if (norm > cfg_.max_grad_norm)
          grad *= cfg_.max_grad_norm / norm;
      }
      ++adam_.t;
      adam_.m = kAdamBeta1 * adam_.m + (1 - kAdamBeta1) * grad;
      adam_.v = kAdamBeta2 * adam_.v
                + (1 - kAdamBeta2) * grad.array().square().matrix();
      const double c1 = 1 - std::pow(kAdamBeta1, static_cast<double>(adam_.t));
      const double c2 = 1 - std::pow(kAdamBeta2, static_cast<double>(adam_.t));
      params_.theta.array() -= cfg_.learning_rate * (adam_.m.array() / c1)
                               / ((adam_.v.array() / c2).sqrt() + kAdamEps);
      stats.surrogate_loss += -t.surrogate;
      stats.value_loss += t.value_loss;
      stats.entropy += t.entropy;
      stats.clip_fraction += t.clip_fraction;
      ++stats.minibatch_steps;
    }
  }
  const double k = static_cast<double>(stats.minibatch_steps);
  stats.surrogate_loss /= k;
  stats.value_loss /= k;
  stats.entropy /= k;
  stats.clip_fraction /= k;
  return stats;
}

std::string PpoAgent::serialize_checkpoint() const {
  const nlohmann::json header = {
      {"format", "rxngrow-ppo-checkpoint"},
      {"input_dim", params_.input_dim()},
      {"hidden", params_.hidden()},
      {"num_params", params_.size()},
      {"adam_step", adam_.t},
      {"rng_state", rng_.state()},
      {"config", config_to_json(cfg_)}};
  const std::string h = header.dump();
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u64(out, kCheckpointVersion);
  put_u64(out, h.size());
  out += h;
  put_doubles(out, params_.theta);
  put_doubles(out, adam_.m);
  put_doubles(out, adam_.v);
  return out;
}

void PpoAgent::restore_checkpoint(const std::string &bytes) {
  if (bytes.size() < 24
      || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0)
    throw FormatError("not a checkpoint");
  if (get_u64(bytes, 8) != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version");
  const std::uint64_t hlen = get_u64(bytes, 16);
  if (bytes.size() - 24 < hlen)
    throw FormatError("truncated checkpoint header");
  PPOConfig cfg;
  PolicyParams params;
  AdamState adam;
  Rng rng;
  try {
    const auto header = nlohmann::json::parse(bytes.substr(24, hlen));
    if (header.at("format") != "rxngrow-ppo-checkpoint")
      throw FormatError("not a PPO checkpoint");
    cfg = config_from_json(header.at("config"));
    validate(cfg);
    params = PolicyParams(header.at("input_dim").get<int>(),
                          header.at("hidden").get<int>());
    if (header.at("num_params").get<Index>() != params.size())
      throw FormatError("checkpoint parameter count mismatch");
    adam.t = header.at("adam_step").get<std::int64_t>();
    rng.set_state(header.at("rng_state").get<std::string>());
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what());
  }
  size_t pos = 24 + hlen;
  adam.m.resize(params.size());
  adam.v.resize(params.size());
  get_doubles(bytes, pos, params.theta);
  get_doubles(bytes, pos, adam.m);
  get_doubles(bytes, pos, adam.v);
  if (pos != bytes.size())
    throw FormatError("trailing bytes in checkpoint");
  cfg_ = cfg;
  params_ = std::move(params);
  adam_ = std::move(adam);
  rng_ = rng;
}

void PpoAgent::save_checkpoint(const std::string &path) const {
  write_file_atomic(path, serialize_checkpoint());
}

void PpoAgent::load_checkpoint(const std::string &path) {
  restore_checkpoint(read_file(path));
}

}  // namespace rxngrow

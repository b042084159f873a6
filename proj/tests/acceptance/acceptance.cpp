//
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <boost/multiprecision/mpfr.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <unistd.h>

#include "../common/bandit.h"
#include "../common/oracles.h"
#include "rxngrow/errors.h"
#include "rxngrow/pipeline.h"
#include "rxngrow/similarity.h"
#include "rxngrow/util/io.h"

namespace {

using namespace rxngrow;
namespace fs = std::filesystem;
using Big = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<60>>;

std::string fixture(const std::string &name) {
  return std::string(RXNGROW_FIXTURE_DIR) + "/" + name;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path scratch_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path()
                 / ("rxngrow-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

// kb + library + initialized workspace under scratch/name.
RunConfig prepare(const std::string &name) {
  const fs::path dir = scratch_root() / name;
  fs::create_directories(dir);
  RunConfig cfg;
  cfg.kb_path = (dir / "kb.json").string();
  cfg.library_path = (dir / "library.json").string();
  cfg.reference_path = fixture("reference.smi");
  cfg.workspace = (dir / "ws").string();
  cfg.episodes = 5;
  cfg.seed = 2024;
  cfg.target.box_center = {11, 11, 8};
  std::ostringstream log;
  cmd_build_kb(cfg, {fixture("kb_index.tsv"), fixture("kb_ligands.tsv"), ""},
               log);
  cmd_build_templates(cfg, {fixture("rules.tsv"), ""}, log);
  cmd_init_target(cfg, {"", fixture("target.fasta")}, log);
  return cfg;
}

std::string ws_file(const RunConfig &cfg, const char *name) {
  return (fs::path(cfg.workspace) / name).string();
}

Outcome validity_run() {
  const RunConfig cfg = prepare("validity");
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  cmd_run(cfg, {}, log);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  const auto report =
      nlohmann::json::parse(read_file(ws_file(cfg, workspace::kReportJson)));
  const size_t found =
      read_discoveries(ws_file(cfg, workspace::kDiscoveries)).size();
  bool ok = found >= 1 && secs < 300;
  std::ostringstream d;
  d << "discoveries=" << found << " runtime=" << secs << "s";
  for (const auto &row: report.at("rows")) {
    const double v = row.at("valid").get<double>();
    const double n = row.at("novelty").get<double>();
    ok = ok && v == 1.0 && n == 1.0;
    d << " " << row.at("label").get<std::string>() << "(valid=" << v
      << ",novelty=" << n << ")";
  }
  return {ok, d.str()};
}

Outcome reward_arithmetic() {
  const RewardWeights w;  // 1, 0.1, 0.1, 0.35
  const RewardBreakdown ex = scalarize({9.3, 0.3, 3.0, 1.0}, w);
  const double eps = std::numeric_limits<double>::epsilon();
  bool ok = std::abs(ex.total - 9.38) <= 4 * eps * 9.38;
  double worst = 0;
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const RewardComponents c{12 * rng.uniform(), rng.uniform(),
                             1 + 9 * rng.uniform(),
                             static_cast<double>(rng.uniform_index(2))};
    const double got = scalarize(c, w).total;
    const Big exact = Big(w.w1) * Big(c.affinity) + Big(w.w2) * Big(c.qed)
                      - Big(w.w3) * Big(c.sa) + Big(w.w4) * Big(c.novelty);
    // Bound for four products and three sums in double arithmetic.
    const double scale = std::abs(w.w1 * c.affinity) + std::abs(w.w2 * c.qed)
                         + std::abs(w.w3 * c.sa)
                         + std::abs(w.w4 * c.novelty);
    const double err = std::abs(static_cast<double>(Big(got) - exact));
    worst = std::max(worst, err / (eps * scale));
    ok = ok && err <= 4 * eps * scale;
  }
  std::ostringstream d;
  d << "worked example total=" << ex.total << ", 100 tuples max error="
    << worst << " ulp-units of the term scale";
  return {ok, d.str()};
}

Outcome template_filter() {
  const auto rules = parse_rule_dump(fixture("filter_rules.tsv"));
  FilterTally t;
  filter_rules(rules, FilterConfig{}, &t);
  const std::set<size_t> expected = {1, 5, 6, 7, 9, 13, 14, 16, 18, 20};
  bool ok = rules.size() == 20;
  std::set<size_t> accepted;
  for (size_t i = 0; i < rules.size(); ++i)
    if (evaluate_rule(rules[i], {}).accepted())
      accepted.insert(i + 1);
  ok = ok && accepted == expected && t.failed_variable_size == 4
       && t.failed_variable_fraction == 5 && t.failed_core == 5
       && t.failed_frequency == 0;
  // Named cases: 11-atom variable, 5-atom core, 60% variable, compliant.
  ok = ok && !accepted.count(2) && !accepted.count(3) && !accepted.count(4)
       && accepted.count(1);
  std::ostringstream d;
  d << "accepted=" << t.accepted << " rejected=" << t.rejected
    << " (size " << t.failed_variable_size << ", fraction "
    << t.failed_variable_fraction << ", core " << t.failed_core << ")";
  return {ok, d.str()};
}

Outcome softmax_correctness() {
  Rng rng(7);
  double worst_sum = 0, worst_shift = 0, worst_oracle = 0;
  for (int v = 0; v < 1000; ++v) {
    const int n = 1 + v % 64;
    std::vector<double> z(n);
    const double spread = 0.5 + 20 * rng.uniform();
    for (auto &x: z)
      x = spread * rng.normal();
    const auto p = softmax(z);
    worst_sum = std::max(
        worst_sum, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
    const double c = 200 * (rng.uniform() - 0.5);
    std::vector<double> shifted = z;
    for (auto &x: shifted)
      x += c;
    const auto q = softmax(shifted);
    Big denom = 0;
    for (double x: z)
      denom += exp(Big(x));
    for (int i = 0; i < n; ++i) {
      worst_shift = std::max(worst_shift, std::abs(p[i] - q[i]));
      const double exact = static_cast<double>(exp(Big(z[i])) / denom);
      worst_oracle = std::max(worst_oracle, std::abs(p[i] - exact));
    }
  }
  std::ostringstream d;
  d << "1000 vectors, sizes 1-64: max |sum-1|=" << worst_sum
    << " max shift diff=" << worst_shift << " max oracle diff="
    << worst_oracle;
  return {worst_sum <= 1e-6 && worst_shift <= 1e-9 && worst_oracle <= 1e-12,
          d.str()};
}

Outcome ppo_numerics() {
  double worst_fd = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    worst_fd = std::max(worst_fd,
                        oracle::fd_max_relative_error(oracle::make_toy(seed)));
  Rng rng(13);
  double worst_gae = 0;
  int trajectories = 0;
  for (int n = 1; n <= 15; ++n) {
    for (int t = 0; t < 100; ++t, ++trajectories) {
      std::vector<double> r(n), v(n);
      for (int i = 0; i < n; ++i) {
        r[i] = 10 * rng.normal();
        v[i] = 10 * rng.normal();
      }
      const double gamma = 0.8 + 0.2 * rng.uniform();
      const double lambda = rng.uniform();
      const auto a = compute_gae(r, v, gamma, lambda);
      const auto e = oracle::gae_nested_sum(r, v, gamma, lambda);
      for (int i = 0; i < n; ++i)
        worst_gae = std::max(worst_gae, std::abs(a.advantages[i] - e[i]));
    }
  }
  std::ostringstream d;
  d << "3-action toy FD max rel error=" << worst_fd << "; GAE over "
    << trajectories << " trajectories (len 1-15) max diff=" << worst_gae;
  return {worst_fd < 1e-4 && worst_gae <= 1e-10, d.str()};
}

Outcome learning_signal() {
  const bandit::Result a = bandit::run(2024, 200);
  const bandit::Result b = bandit::run(2024, 200);
  const bool ok = a.updates_to_threshold > 0 && a.updates_to_threshold <= 200
                  && a.probability_per_update == b.probability_per_update;
  std::ostringstream d;
  d << "P(best) > 0.9 after " << a.updates_to_threshold
    << " updates (P=" << a.final_probability << "), repeat identical="
    << (a.probability_per_update == b.probability_per_update);
  return {ok, d.str()};
}

Outcome similarity_search() {
  Rng rng(21);
  bool ok = true;
  for (int db = 0; db < 100; ++db) {
    const int dim = 2 + static_cast<int>(rng.uniform_index(31));
    const int n = 1 + static_cast<int>(rng.uniform_index(50));
    std::map<std::string, Embedding> kb;
    for (int i = 0; i < n; ++i) {
      Embedding e{std::vector<float>(dim), dim, "e"};
      for (auto &x: e.vector)
        x = static_cast<float>(rng.normal());
      char id[8];
      std::snprintf(id, sizeof id, "%04d", static_cast<int>(rng.uniform_index(10000)));
      kb[id] = e;
    }
    Embedding q{std::vector<float>(dim), dim, "e"};
    for (auto &x: q.vector)
      x = static_cast<float>(rng.normal());
    std::vector<std::pair<double, std::string>> brute;
    for (const auto &[id, e]: kb) {
      double dot = 0, a = 0, b = 0;
      for (int j = 0; j < dim; ++j) {
        dot += double(q.vector[j]) * e.vector[j];
        a += double(q.vector[j]) * q.vector[j];
        b += double(e.vector[j]) * e.vector[j];
      }
      brute.push_back({-dot / std::sqrt(a * b), id});
    }
    std::sort(brute.begin(), brute.end());
    const int k = 1 + static_cast<int>(rng.uniform_index(kb.size()));
    const auto hits = topk_similar(q, kb, k);
    Embedding scaled = q;
    const float factor = static_cast<float>(0.01 + 100 * rng.uniform());
    for (auto &x: scaled.vector)
      x *= factor;
    const auto hits2 = topk_similar(scaled, kb, k);
    ok = ok && static_cast<int>(hits.size()) == k && hits2.size() == hits.size();
    for (int i = 0; ok && i < k; ++i) {
      ok = hits[i].pdb_id == brute[i].second
           && std::abs(hits[i].score + brute[i].first) < 1e-12
           && hits2[i].pdb_id == hits[i].pdb_id;
    }
  }
  return {ok, "100 random databases of <= 50 vectors against brute force, "
              "positive query scaling"};
}

Outcome episode_contract() {
  const RunConfig cfg = prepare("episodes");
  NativeEngine engine;
  const FragmentPool pool = load_pool(ws_file(cfg, workspace::kPool), engine);
  const TemplateLibrary lib = load_library(cfg.library_path);
  StubEncoder enc(EncoderSpec::molecule(cfg.molecule_encoder.encoder_id));
  EmbeddingCache cache;
  SurrogateOracle oracle("T", 5);
  ScoreCache scores;
  const ReferenceSet ref = ReferenceSet::load(cfg.reference_path, engine);
  const EnvConfig env_cfg;  // defaults
  Environment env(pool, lib, engine, enc, cache,
                  {&oracle, &scores, &ref, {}, false}, env_cfg);
  Rng init(3);
  const PolicyParams params = PolicyParams::init(kMoleculeDim, 256, init);
  AgentPolicy policy(params, SelectMode::kSample);
  bool ok = env_cfg.horizon == 15;
  size_t longest = 0;
  double worst = 0;
  const int episodes = 20;
  for (int e = 0; e < episodes; ++e) {
    Rng rng(Rng::derive(77, e));
    const Trajectory t = run_episode(env, policy, rng, e);
    longest = std::max(longest, t.steps.size());
    ok = ok && t.steps.size() <= 15;
    for (size_t i = 0; i + 1 < t.steps.size(); ++i)
      ok = ok && t.steps[i].reward == 0.0;
    if (!t.steps.empty()) {
      const double r = t.terminal_breakdown.total;
      ok = ok && t.steps.back().reward == r;
      const double expect =
          std::pow(env_cfg.gamma, double(t.steps.size() - 1)) * r;
      worst = std::max(worst, std::abs(discounted_return(t, env_cfg.gamma)
                                       - expect));
    }
  }
  ok = ok && worst <= 1e-12;
  std::ostringstream d;
  d << episodes << " episodes, longest=" << longest
    << " steps, max |return - gamma^T_eff R|=" << worst;
  return {ok, d.str()};
}

Outcome reproducibility() {
  std::string disc[2], ckpt[2];
  for (int i = 0; i < 2; ++i) {
    RunConfig cfg = prepare("repro" + std::to_string(i));
    cfg.workers = i == 0 ? 1 : 3;
    std::ostringstream log;
    cmd_run(cfg, {}, log);
    disc[i] = read_file(ws_file(cfg, workspace::kDiscoveries));
    ckpt[i] = read_file(ws_file(cfg, workspace::kCheckpoint));
  }
  std::ostringstream d;
  d << "discoveries " << disc[0].size() << " bytes, checkpoint "
    << ckpt[0].size() << " bytes, identical across runs (1 and 3 workers)";
  return {disc[0] == disc[1] && ckpt[0] == ckpt[1] && !ckpt[0].empty(),
          d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"validity-novelty-run", validity_run},
      {"reward-arithmetic", reward_arithmetic},
      {"template-filter-fidelity", template_filter},
      {"dynamic-policy-softmax", softmax_correctness},
      {"ppo-numerics", ppo_numerics},
      {"learning-signal-bandit", learning_signal},
      {"similarity-search", similarity_search},
      {"episode-contract", episode_contract},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (const auto &[name, fn]: checks) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(scratch_root(), ec);
  return failed == 0 ? 0 : 1;
}

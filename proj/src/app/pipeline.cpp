//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "rxngrow/errors.h"
#include "rxngrow/fragmenter.h"
#include "rxngrow/knowledge_base.h"
#include "rxngrow/similarity.h"
#include "rxngrow/util/hash.h"
#include "rxngrow/util/io.h"

namespace rxngrow {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json &j, std::initializer_list<std::string_view> keys,
                const std::string &where) {
  if (!j.is_object())
    throw ConfigError("config section '" + where + "' must be an object");
  for (const auto &item: j.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
      throw ConfigError("unknown config key '" + where
                        + (where.empty() ? "" : ".") + item.key() + "'");
  }
}

template <typename T>
void read(const json &j, const char *key, T &out) {
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_vec3(const json &j, const char *key, Vec3 &out) {
  std::vector<double> v;
  read(j, key, v);
  if (!j.contains(key))
    return;
  if (v.size() != 3)
    throw ConfigError(std::string("config key '") + key
                      + "' needs three numbers");
  out = {v[0], v[1], v[2]};
}

void apply_encoder(EncoderConfig &e, const json &j, const std::string &where) {
  check_keys(j, {"kind", "encoder_id", "dim", "command", "fallback_to_stub"},
             where);
  read(j, "kind", e.kind);
  read(j, "encoder_id", e.encoder_id);
  read(j, "dim", e.dim);
  read(j, "command", e.command);
  read(j, "fallback_to_stub", e.fallback_to_stub);
}

ordered_json encoder_json(const EncoderConfig &e) {
  return {{"kind", e.kind},
          {"encoder_id", e.encoder_id},
          {"dim", e.dim},
          {"command", e.command},
          {"fallback_to_stub", e.fallback_to_stub}};
}

std::string path_in(const std::string &dir, const char *name) {
  return (fs::path(dir) / name).string();
}

std::uint64_t target_seed(const ProteinTarget &t) {
  const Digest d = sha256("surrogate-target:"
                          + (t.sequence.empty() ? t.target_id : t.sequence));
  std::uint64_t s = 0;
  for (int i = 0; i < 8; ++i)
    s = (s << 8) | d[i];
  return s;
}

// FASTA or plain text. The first FASTA header word, if any, goes to id.
std::string read_sequence_file(const std::string &path, std::string &id) {
  std::string seq;
  for (const auto &line: read_lines(path)) {
    if (!line.empty() && line[0] == '>' && id.empty()) {
      std::istringstream header(line.substr(1));
      header >> id;
    }
    if (line.empty() || line[0] == '>' || line[0] == ';')
      continue;
    for (char c: line)
      if (!std::isspace(static_cast<unsigned char>(c)))
        seq.push_back(c);
  }
  return seq;
}

ordered_json target_json(const ProteinTarget &t) {
  return {{"target_id", t.target_id},
          {"pdb_path", t.pdb_path},
          {"sequence", t.sequence},
          {"box_center", t.box_center},
          {"box_size", t.box_size},
          {"prepared_receptor",
           t.prepared_receptor ? json(*t.prepared_receptor) : json()}};
}

ProteinTarget load_target(const std::string &ws) {
  const std::string path = path_in(ws, workspace::kTarget);
  ProteinTarget t;
  try {
    const json doc = json::parse(read_file(path));
    const json &j = doc.at("target");
    t.target_id = j.at("target_id").get<std::string>();
    t.pdb_path = j.at("pdb_path").get<std::string>();
    t.sequence = j.at("sequence").get<std::string>();
    const auto c = j.at("box_center").get<std::vector<double>>();
    const auto s = j.at("box_size").get<std::vector<double>>();
    if (c.size() != 3 || s.size() != 3)
      throw FormatError("box vectors need three numbers: " + path);
    t.box_center = {c[0], c[1], c[2]};
    t.box_size = {s[0], s[1], s[2]};
    if (!j.at("prepared_receptor").is_null())
      t.prepared_receptor = j.at("prepared_receptor").get<std::string>();
  } catch (const json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
  return t;
}

void save_target(const std::string &ws, const ProteinTarget &t,
                 const std::vector<SimilarityHit> &hits, int k,
                 size_t pool_size, const KnowledgeBase &kb) {
  ordered_json h = ordered_json::array();
  for (const auto &hit: hits)
    h.push_back({{"pdb_id", hit.pdb_id}, {"score", hit.score}});
  ordered_json doc = {{"format", "rxngrow-target"},
                      {"version", 1},
                      {"target", target_json(t)},
                      {"k", k},
                      {"hits", h},
                      {"pool_size", pool_size},
                      {"kb_version", kb.version}};
  write_file_atomic(path_in(ws, workspace::kTarget), doc.dump(1) + "\n");
}

std::unique_ptr<DockingOracle> make_oracle(const RunConfig &cfg,
                                           ProteinTarget &target,
                                           const std::string &ws) {
  if (cfg.oracle == "surrogate")
    return std::make_unique<SurrogateOracle>(target.target_id,
                                             target_seed(target));
  if (!target.prepared_receptor)
    target = prepare_receptor(target, cfg.docking.converter,
                              path_in(ws, "receptor.pdbqt"));
  DockingConfig dc = cfg.docking;
  dc.work_dir = path_in(ws, "docking");
  dc.seed = cfg.seed;
  return std::make_unique<SubprocessDockingOracle>(target, dc);
}

// Everything one rollout worker owns.
struct Worker {
  std::unique_ptr<ChemEngine> engine;
  std::unique_ptr<Encoder> encoder;
  std::unique_ptr<DockingOracle> oracle;
  std::unique_ptr<Environment> env;
};

ordered_json stats_json(const UpdateStats &s) {
  return {{"surrogate_loss", s.surrogate_loss},
          {"value_loss", s.value_loss},
          {"entropy", s.entropy},
          {"clip_fraction", s.clip_fraction},
          {"minibatch_steps", s.minibatch_steps}};
}

}  // namespace

void apply_config_json(RunConfig &cfg, const json &j) {
  check_keys(j,
             {"kb_path", "library_path", "reference_path", "workspace",
              "target", "env", "ppo", "weights", "thresholds", "filter",
              "episodes", "oracle", "seed", "workers", "k",
              "min_fragment_atoms", "normalize_rewards", "protein_encoder",
              "molecule_encoder", "docking"},
             "");
  read(j, "kb_path", cfg.kb_path);
  read(j, "library_path", cfg.library_path);
  read(j, "reference_path", cfg.reference_path);
  read(j, "workspace", cfg.workspace);
  read(j, "episodes", cfg.episodes);
  read(j, "oracle", cfg.oracle);
  read(j, "seed", cfg.seed);
  read(j, "workers", cfg.workers);
  read(j, "k", cfg.k);
  read(j, "min_fragment_atoms", cfg.min_fragment_atoms);
  read(j, "normalize_rewards", cfg.normalize_rewards);
  if (j.contains("target")) {
    const json &t = j.at("target");
    check_keys(t,
               {"target_id", "pdb_path", "sequence", "box_center", "box_size"},
               "target");
    read(t, "target_id", cfg.target.target_id);
    read(t, "pdb_path", cfg.target.pdb_path);
    read(t, "sequence", cfg.target.sequence);
    read_vec3(t, "box_center", cfg.target.box_center);
    read_vec3(t, "box_size", cfg.target.box_size);
  }
  if (j.contains("env")) {
    const json &e = j.at("env");
    check_keys(e, {"horizon", "gamma", "reward_mode", "max_actions",
                   "rng_seed"},
               "env");
    read(e, "horizon", cfg.env.horizon);
    read(e, "gamma", cfg.env.gamma);
    read(e, "max_actions", cfg.env.max_actions);
    read(e, "rng_seed", cfg.env.rng_seed);
    std::string mode;
    read(e, "reward_mode", mode);
    if (mode == "terminal")
      cfg.env.reward_mode = RewardMode::kTerminal;
    else if (mode == "dense")
      cfg.env.reward_mode = RewardMode::kDense;
    else if (!mode.empty())
      throw ConfigError("env.reward_mode must be 'terminal' or 'dense'");
    cfg.ppo.gamma = cfg.env.gamma;
  }
  if (j.contains("ppo")) {
    const json &p = j.at("ppo");
    check_keys(p,
               {"clip_epsilon", "gae_lambda", "gamma", "learning_rate",
                "epochs_per_update", "minibatch_size", "entropy_coef",
                "value_coef", "max_grad_norm", "buffer_episodes", "hidden"},
               "ppo");
    read(p, "clip_epsilon", cfg.ppo.clip_epsilon);
    read(p, "gae_lambda", cfg.ppo.gae_lambda);
    read(p, "learning_rate", cfg.ppo.learning_rate);
    read(p, "epochs_per_update", cfg.ppo.epochs_per_update);
    read(p, "minibatch_size", cfg.ppo.minibatch_size);
    read(p, "entropy_coef", cfg.ppo.entropy_coef);
    read(p, "value_coef", cfg.ppo.value_coef);
    read(p, "max_grad_norm", cfg.ppo.max_grad_norm);
    read(p, "buffer_episodes", cfg.ppo.buffer_episodes);
    read(p, "hidden", cfg.ppo.hidden);
    if (p.contains("gamma")) {
      double g = 0;
      read(p, "gamma", g);
      if (j.contains("env") && j.at("env").contains("gamma")
          && g != cfg.env.gamma)
        throw ConfigError("ppo.gamma must equal env.gamma");
      cfg.ppo.gamma = cfg.env.gamma = g;
    }
  }
  if (j.contains("weights")) {
    const json &w = j.at("weights");
    check_keys(w, {"w1", "w2", "w3", "w4"}, "weights");
    read(w, "w1", cfg.weights.w1);
    read(w, "w2", cfg.weights.w2);
    read(w, "w3", cfg.weights.w3);
    read(w, "w4", cfg.weights.w4);
  }
  if (j.contains("thresholds")) {
    const json &t = j.at("thresholds");
    check_keys(t, {"affinity_max", "qed_min"}, "thresholds");
    read(t, "affinity_max", cfg.thresholds.affinity_max);
    read(t, "qed_min", cfg.thresholds.qed_min);
  }
  if (j.contains("filter")) {
    const json &f = j.at("filter");
    check_keys(f, {"max_variable_atoms", "max_variable_fraction",
                   "min_core_atoms", "min_frequency"},
               "filter");
    read(f, "max_variable_atoms", cfg.filter.max_variable_atoms);
    read(f, "max_variable_fraction", cfg.filter.max_variable_fraction);
    read(f, "min_core_atoms", cfg.filter.min_core_atoms);
    read(f, "min_frequency", cfg.filter.min_frequency);
  }
  if (j.contains("protein_encoder"))
    apply_encoder(cfg.protein_encoder, j.at("protein_encoder"),
                  "protein_encoder");
  if (j.contains("molecule_encoder"))
    apply_encoder(cfg.molecule_encoder, j.at("molecule_encoder"),
                  "molecule_encoder");
  if (j.contains("docking")) {
    const json &d = j.at("docking");
    check_keys(d, {"vina_binary", "exhaustiveness", "receptor_command",
                   "ligand_command"},
               "docking");
    read(d, "vina_binary", cfg.docking.vina_binary);
    read(d, "exhaustiveness", cfg.docking.exhaustiveness);
    read(d, "receptor_command", cfg.docking.converter.receptor_command);
    read(d, "ligand_command", cfg.docking.converter.ligand_command);
  }
}

RunConfig load_run_config(const std::string &path) {
  RunConfig cfg;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
  apply_config_json(cfg, j);
  return cfg;
}

ordered_json run_config_json(const RunConfig &c) {
  return {
      {"kb_path", c.kb_path},
      {"library_path", c.library_path},
      {"reference_path", c.reference_path},
      {"workspace", c.workspace},
      {"target",
       {{"target_id", c.target.target_id},
        {"pdb_path", c.target.pdb_path},
        {"sequence", c.target.sequence},
        {"box_center", c.target.box_center},
        {"box_size", c.target.box_size}}},
      {"env",
       {{"horizon", c.env.horizon},
        {"gamma", c.env.gamma},
        {"reward_mode",
         c.env.reward_mode == RewardMode::kTerminal ? "terminal" : "dense"},
        {"max_actions", c.env.max_actions},
        {"rng_seed", c.env.rng_seed}}},
      {"ppo",
       {{"clip_epsilon", c.ppo.clip_epsilon},
        {"gae_lambda", c.ppo.gae_lambda},
        {"gamma", c.ppo.gamma},
        {"learning_rate", c.ppo.learning_rate},
        {"epochs_per_update", c.ppo.epochs_per_update},
        {"minibatch_size", c.ppo.minibatch_size},
        {"entropy_coef", c.ppo.entropy_coef},
        {"value_coef", c.ppo.value_coef},
        {"max_grad_norm", c.ppo.max_grad_norm},
        {"buffer_episodes", c.ppo.buffer_episodes},
        {"hidden", c.ppo.hidden}}},
      {"weights",
       {{"w1", c.weights.w1},
        {"w2", c.weights.w2},
        {"w3", c.weights.w3},
        {"w4", c.weights.w4}}},
      {"thresholds",
       {{"affinity_max", c.thresholds.affinity_max},
        {"qed_min", c.thresholds.qed_min}}},
      {"filter",
       {{"max_variable_atoms", c.filter.max_variable_atoms},
        {"max_variable_fraction", c.filter.max_variable_fraction},
        {"min_core_atoms", c.filter.min_core_atoms},
        {"min_frequency", c.filter.min_frequency}}},
      {"episodes", c.episodes},
      {"oracle", c.oracle},
      {"seed", c.seed},
      {"workers", c.workers},
      {"k", c.k},
      {"min_fragment_atoms", c.min_fragment_atoms},
      {"normalize_rewards", c.normalize_rewards},
      {"protein_encoder", encoder_json(c.protein_encoder)},
      {"molecule_encoder", encoder_json(c.molecule_encoder)},
      {"docking",
       {{"vina_binary", c.docking.vina_binary},
        {"exhaustiveness", c.docking.exhaustiveness},
        {"receptor_command", c.docking.converter.receptor_command},
        {"ligand_command", c.docking.converter.ligand_command}}}};
}

void validate_run_config(const RunConfig &c) {
  if (c.episodes < 1)
    throw ConfigError("episodes must be at least 1");
  if (c.oracle != "surrogate" && c.oracle != "docking")
    throw ConfigError("oracle must be 'docking' or 'surrogate'");
  if (c.workers < 1)
    throw ConfigError("workers must be at least 1");
  if (c.k < 1)
    throw ConfigError("k must be at least 1");
  if (c.min_fragment_atoms < 1)
    throw ConfigError("min_fragment_atoms must be at least 1");
  if (c.env.horizon < 1)
    throw ConfigError("env.horizon must be at least 1");
  if (!(c.env.gamma > 0 && c.env.gamma <= 1))
    throw ConfigError("env.gamma must lie in (0, 1]");
  for (double w: {c.weights.w1, c.weights.w2, c.weights.w3, c.weights.w4})
    if (!(w >= 0))
      throw ConfigError("reward weights must be non-negative");
  for (const EncoderConfig *e: {&c.protein_encoder, &c.molecule_encoder}) {
    if (e->kind != "stub" && e->kind != "batch")
      throw ConfigError("encoder kind must be 'stub' or 'batch'");
    if (e->dim < 1 || e->encoder_id.empty())
      throw ConfigError("encoders need an id and a positive dim");
  }
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig &cfg,
                                      Modality modality,
                                      const std::string &work_dir) {
  const EncoderSpec spec{cfg.encoder_id, modality, cfg.dim};
  if (cfg.kind == "stub")
    return std::make_unique<StubEncoder>(spec);
  auto batch = std::make_unique<BatchFileEncoder>(spec, cfg.command, work_dir);
  if (!cfg.fallback_to_stub)
    return batch;
  try {
    batch->encode_batch({modality == Modality::kProtein ? "M" : "C"});
    return batch;
  } catch (const EncoderUnavailableError &) {
    return std::make_unique<StubEncoder>(
        EncoderSpec{"stub-fallback/" + cfg.encoder_id, modality, cfg.dim});
  }
}

Decision AgentPolicy::decide(const EnvState &state, const ActionSet &actions,
                             Rng &rng) {
  const Eigen::VectorXd s =
      Eigen::Map<const Eigen::VectorXf>(state.embedding.vector.data(),
                                        state.embedding.dim)
          .cast<double>();
  const PolicyOutput out = policy_forward(s, params_);
  Eigen::MatrixXd e(actions.size(), params_.input_dim());
  for (size_t i = 0; i < actions.size(); ++i) {
    const Embedding &pe = actions.entries[i].product_embedding;
    if (pe.dim != params_.input_dim())
      throw DimensionMismatchError("product embedding dim mismatch");
    for (int j = 0; j < pe.dim; ++j)
      e(static_cast<Eigen::Index>(i), j) = pe.vector[j];
  }
  const auto [index, log_prob] =
      select_action(policy_distribution(out.query, e), mode_, rng);
  return {index, log_prob, out.value};
}

std::vector<PpoSample> to_samples(const Trajectory &traj) {
  std::vector<PpoSample> out;
  for (const auto &step: traj.steps) {
    PpoSample s;
    const Embedding &st = step.state.embedding;
    s.state = Eigen::Map<const Eigen::VectorXf>(st.vector.data(), st.dim)
                  .cast<double>();
    s.actions.resize(static_cast<Eigen::Index>(step.action_set.size()), st.dim);
    for (size_t i = 0; i < step.action_set.size(); ++i) {
      const Embedding &e = step.action_set.entries[i].product_embedding;
      for (int j = 0; j < e.dim; ++j)
        s.actions(static_cast<Eigen::Index>(i), j) = e.vector[j];
    }
    s.chosen = step.chosen_index;
    s.old_log_prob = step.log_prob;
    s.value = step.value_estimate;
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_build_kb(const RunConfig &cfg, const BuildKbOptions &opts,
                 std::ostream &log) {
  NativeEngine engine;
  const KnowledgeBase kb = ingest(opts.index, opts.ligands, engine);
  const std::string out = opts.out.empty() ? cfg.kb_path : opts.out;
  save_knowledge_base(kb, out);
  size_t ligands = 0;
  for (const auto &[id, r]: kb.records)
    ligands += r.ligands.size();
  log << "records: " << kb.records.size() << "\n"
      << "ligands: " << ligands << "\n"
      << "skipped ligands: " << kb.skipped_ligands << "\n"
      << "store: " << out << "\n";
  return 0;
}

int cmd_build_templates(const RunConfig &cfg,
                        const BuildTemplatesOptions &opts,
                        std::ostream &log) {
  const std::vector<MmpRule> rules = parse_rule_dump(opts.rules);
  FilterTally tally;
  const std::vector<MmpRule> kept = filter_rules(rules, cfg.filter, &tally);
  log << "rules: " << tally.total << "\n"
      << "accepted: " << tally.accepted << "\n"
      << "rejected: " << tally.rejected << "\n"
      << "  variable fragment > " << cfg.filter.max_variable_atoms
      << " atoms: " << tally.failed_variable_size << "\n"
      << "  variable fragment > " << cfg.filter.max_variable_fraction
      << " of parent: " << tally.failed_variable_fraction << "\n"
      << "  core < " << cfg.filter.min_core_atoms
      << " atoms: " << tally.failed_core << "\n"
      << "  frequency < " << cfg.filter.min_frequency << ": "
      << tally.failed_frequency << "\n";
  const TemplateLibrary lib = build_library(kept, cfg.filter);
  const std::string out = opts.out.empty() ? cfg.library_path : opts.out;
  save_library(lib, out);
  log << "templates: " << lib.templates.size() << "\n";
  for (const auto &t: lib.templates)
    log << "  " << t.template_id << "\t" << t.frequency << "\t"
        << t.reaction_smarts << "\n";
  log << "library: " << out << "\n";
  return 0;
}

int cmd_init_target(const RunConfig &cfg, const InitTargetOptions &opts,
                    std::ostream &log) {
  validate_run_config(cfg);
  const std::string &ws = cfg.workspace;
  const KnowledgeBase kb =
      load_knowledge_base(opts.kb.empty() ? cfg.kb_path : opts.kb);
  ProteinTarget target = cfg.target;
  std::string fasta_id;
  if (!opts.sequence_file.empty())
    target.sequence = read_sequence_file(opts.sequence_file, fasta_id);
  if (target.sequence.empty())
    throw ConfigError("target sequence is required");
  if (target.target_id.empty())
    target.target_id =
        !fasta_id.empty()         ? fasta_id
        : target.pdb_path.empty() ? "target"
                                  : fs::path(target.pdb_path).stem().string();
  fs::create_directories(ws);
  if (cfg.oracle == "docking")
    target = prepare_receptor(target, cfg.docking.converter,
                              path_in(ws, "receptor.pdbqt"));

  EmbeddingCache cache(path_in(ws, workspace::kEmbeddingCache));
  auto encoder = make_encoder(cfg.protein_encoder, Modality::kProtein,
                              path_in(ws, "encoder"));
  const Embedding query = encode_protein(target.sequence, *encoder, cache);
  std::map<std::string, Embedding> kb_embs;
  for (const auto &[id, r]: kb.records)
    kb_embs[id] = encode_protein(r.sequence, *encoder, cache);
  if (static_cast<size_t>(cfg.k) > kb.records.size())
    log << "warning: k=" << cfg.k << " exceeds the " << kb.records.size()
        << " knowledge-base records; using all of them\n";
  const std::vector<SimilarityHit> hits = topk_similar(query, kb_embs, cfg.k);

  std::vector<std::string> ids;
  std::string sim = "rank\tpdb_id\tscore\n";
  for (size_t i = 0; i < hits.size(); ++i) {
    ids.push_back(hits[i].pdb_id);
    sim += std::to_string(i + 1) + "\t" + hits[i].pdb_id + "\t"
           + json(hits[i].score).dump() + "\n";
  }
  NativeEngine engine;
  const FragmentPool pool = fragment_ligands(collect_ligand_sources(kb, ids),
                                             engine, cfg.min_fragment_atoms);
  write_file_atomic(path_in(ws, workspace::kSimilarity), sim);
  export_pool(pool, path_in(ws, workspace::kPool));
  save_target(ws, target, hits, cfg.k, pool.size(), kb);

  log << "target: " << target.target_id << "\n"
      << "encoder: " << encoder->spec().encoder_id << "\n";
  for (size_t i = 0; i < hits.size(); ++i)
    log << "  " << i + 1 << "\t" << hits[i].pdb_id << "\t" << hits[i].score
        << "\n";
  log << "fragments: " << pool.size() << "\n"
      << "workspace: " << ws << "\n";
  return 0;
}

int cmd_run(const RunConfig &cfg, const RunOptions &opts, std::ostream &log) {
  validate_run_config(cfg);
  const std::string &ws = cfg.workspace;
  ProteinTarget target = load_target(ws);
  NativeEngine engine;
  const FragmentPool pool = load_pool(path_in(ws, workspace::kPool), engine);
  const TemplateLibrary library =
      load_library(opts.library.empty() ? cfg.library_path : opts.library);
  const std::string ref_path =
      opts.reference.empty() ? cfg.reference_path : opts.reference;
  if (ref_path.empty())
    throw ConfigError("a novelty reference set is required (reference_path)");
  const ReferenceSet reference = ReferenceSet::load(ref_path, engine);

  EmbeddingCache emb_cache(path_in(ws, workspace::kEmbeddingCache));
  // The surrogate is cheap and versioned with the code, so only real
  // docking scores persist in the workspace.
  ScoreCache score_cache = cfg.oracle == "docking"
                               ? ScoreCache(path_in(ws, workspace::kScoreCache))
                               : ScoreCache();
  const std::unique_ptr<DockingOracle> oracle = make_oracle(cfg, target, ws);

  EnvConfig env_cfg = cfg.env;
  PPOConfig ppo_cfg = cfg.ppo;
  ppo_cfg.gamma = env_cfg.gamma;
  PpoAgent agent(cfg.molecule_encoder.dim, ppo_cfg, Rng::derive(cfg.seed, 1));

  std::vector<Worker> workers(static_cast<size_t>(cfg.workers));
  for (size_t w = 0; w < workers.size(); ++w) {
    Worker &wk = workers[w];
    wk.engine = engine.clone();
    wk.encoder = make_encoder(cfg.molecule_encoder, Modality::kMolecule,
                              path_in(ws, ("encoder-" + std::to_string(w))
                                              .c_str()));
    wk.oracle = oracle->clone();
    RewardContext rc{wk.oracle.get(), &score_cache, &reference, cfg.weights,
                     cfg.normalize_rewards};
    wk.env = std::make_unique<Environment>(pool, library, *wk.engine,
                                           *wk.encoder, emb_cache, rc,
                                           env_cfg);
  }

  DiscoveryCollector collector(cfg.thresholds);
  std::vector<GeneratedMolecule> generated;
  ordered_json episodes_meta = ordered_json::array();
  ordered_json updates_meta = ordered_json::array();
  std::ofstream traj_log(path_in(ws, workspace::kTrajectories),
                         std::ios::binary | std::ios::trunc);
  if (!traj_log)
    throw Error("cannot write trajectory log in " + ws);

  const auto flush_discoveries = [&] {
    write_file_atomic(path_in(ws, workspace::kDiscoveries),
                      discoveries_jsonl(collector.ranked()));
  };

  try {
    RolloutBuffer buffer;
    const int batch = ppo_cfg.buffer_episodes;
    for (int first = 0; first < cfg.episodes; first += batch) {
      const int count = std::min(batch, cfg.episodes - first);
      std::vector<std::optional<Trajectory>> trajs(count);
      std::vector<std::exception_ptr> errors(count);
      const PolicyParams frozen = agent.params();
      std::atomic<int> next{0};
      auto work = [&](Worker &wk) {
        AgentPolicy policy(frozen, SelectMode::kSample);
        for (int i = next++; i < count; i = next++) {
          const std::int64_t e = first + i;
          try {
            Rng rng(Rng::derive(cfg.seed, 1000 + static_cast<std::uint64_t>(e)));
            trajs[i] = run_episode(*wk.env, policy, rng, e);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      };
      const size_t nthreads =
          std::min(workers.size(), static_cast<size_t>(count));
      if (nthreads <= 1) {
        work(workers[0]);
      } else {
        std::vector<std::thread> threads;
        for (size_t w = 0; w < nthreads; ++w)
          threads.emplace_back(work, std::ref(workers[w]));
        for (auto &t: threads)
          t.join();
      }
      for (int i = 0; i < count; ++i)
        if (errors[i])
          std::rethrow_exception(errors[i]);

      for (int i = 0; i < count; ++i) {
        const Trajectory &t = *trajs[i];
        traj_log << trajectory_jsonl(t);
        traj_log.flush();
        std::vector<double> rewards;
        for (size_t s = 0; s < t.steps.size(); ++s) {
          rewards.push_back(t.steps[s].reward);
          if (env_cfg.reward_mode == RewardMode::kDense
              && t.steps[s].breakdown && s + 1 < t.steps.size())
            collector.admit(t.steps[s].action_set
                                .entries[t.steps[s].chosen_index]
                                .product,
                            *t.steps[s].breakdown, t.episode_id,
                            static_cast<int>(s + 1));
        }
        collector.admit(t.terminal_molecule, t.terminal_breakdown,
                        t.episode_id, static_cast<int>(t.steps.size()));
        GeneratedMolecule g{t.terminal_molecule.smiles(), std::nullopt};
        if (!t.terminal_breakdown.docking_failed)
          g.docked_score = t.terminal_breakdown.docked_score;
        generated.push_back(std::move(g));
        episodes_meta.push_back(
            {{"episode", t.episode_id},
             {"steps", t.steps.size()},
             {"start", t.steps.empty() ? t.terminal_molecule.smiles()
                                       : t.steps[0].state.molecule.smiles()},
             {"terminal", t.terminal_molecule.smiles()},
             {"total", t.terminal_breakdown.total},
             {"docked_score", t.terminal_breakdown.docked_score},
             {"return", discounted_return(rewards, env_cfg.gamma)}});
        if (!t.steps.empty())
          buffer.add_episode(to_samples(t), rewards, ppo_cfg.gamma,
                             ppo_cfg.gae_lambda);
      }
      if (!buffer.empty()) {
        const UpdateStats s = agent.update(buffer);
        ordered_json j = stats_json(s);
        j["after_episode"] = first + count - 1;
        j["samples"] = buffer.samples.size();
        updates_meta.push_back(std::move(j));
        buffer.clear();
      }
      log << "episodes " << first + count << "/" << cfg.episodes
          << ", discoveries " << collector.size() << "\n";
    }
  } catch (...) {
    flush_discoveries();
    throw;
  }

  flush_discoveries();
  agent.save_checkpoint(path_in(ws, workspace::kCheckpoint));
  std::vector<GeneratedMolecule> found;
  for (const auto &d: collector.ranked())
    found.push_back({d.molecule.smiles(), d.docked_score});
  const std::vector<MetricsRow> rows = {
      compute_metrics(generated, reference, engine, "generated"),
      compute_metrics(found, reference, engine, "discoveries")};
  write_file_atomic(path_in(ws, workspace::kReportJson),
                    metrics_json(rows, target.target_id));
  write_file_atomic(path_in(ws, workspace::kReportCsv), metrics_csv(rows));
  const std::string text = metrics_text(rows, target.target_id);
  write_file_atomic(path_in(ws, workspace::kReportText), text);

  ordered_json meta = {
      {"format", "rxngrow-run"},
      {"version", 1},
      {"config", run_config_json(cfg)},
      {"engine_id", engine.engine_id()},
      {"molecule_encoder", workers[0].encoder->spec().encoder_id},
      {"oracle", cfg.oracle},
      {"target_id", target.target_id},
      {"pool_size", pool.size()},
      {"library_size", library.templates.size()},
      {"reference_size", reference.size()},
      {"reference_skipped", reference.skipped()},
      {"ppo_hyperparameters_are_framework_defaults", true},
      {"episodes", episodes_meta},
      {"updates", updates_meta},
      {"discoveries", collector.size()}};
  write_file_atomic(path_in(ws, workspace::kRunMeta), meta.dump(1) + "\n");
  log << text;
  return 0;
}

int cmd_report(const RunConfig &cfg, const ReportOptions &opts,
               std::ostream &out, std::ostream &log) {
  NativeEngine engine;
  const std::string path =
      opts.discoveries.empty() ? path_in(cfg.workspace, workspace::kDiscoveries)
                               : opts.discoveries;
  const auto found = read_discoveries(path);
  const std::string ref_path =
      opts.reference.empty() ? cfg.reference_path : opts.reference;
  ReferenceSet reference;
  if (ref_path.empty())
    log << "warning: no reference set; novelty is computed against an "
           "empty set\n";
  else
    reference = ReferenceSet::load(ref_path, engine);
  const std::vector<MetricsRow> rows = {
      compute_metrics(found, reference, engine, "discoveries")};
  std::string target =
      opts.target_id.empty() ? cfg.target.target_id : opts.target_id;
  if (target.empty()
      && std::filesystem::exists(path_in(cfg.workspace, workspace::kTarget)))
    target = load_target(cfg.workspace).target_id;
  std::string body;
  if (opts.format == "json")
    body = metrics_json(rows, target);
  else if (opts.format == "csv")
    body = metrics_csv(rows);
  else if (opts.format == "text")
    body = metrics_text(rows, target);
  else
    throw ConfigError("report format must be json, csv or text");
  if (opts.out.empty())
    out << body;
  else
    write_file_atomic(opts.out, body);
  return 0;
}

}  // namespace rxngrow

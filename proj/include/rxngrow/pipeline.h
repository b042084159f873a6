//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_PIPELINE_H_
#define RXNGROW_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "rxngrow/discovery.h"
#include "rxngrow/encoders.h"
#include "rxngrow/environment.h"
#include "rxngrow/fragmenter.h"
#include "rxngrow/ppo_agent.h"
#include "rxngrow/reward_oracles.h"
#include "rxngrow/similarity.h"
#include "rxngrow/templates.h"

namespace rxngrow {

struct EncoderConfig {
  std::string kind = "stub";  // "stub" or "batch"
  std::string encoder_id;
  int dim = 0;
  std::vector<std::string> command;  // batch adapter only
  // Use the stub when the batch adapter reports EncoderUnavailableError.
  bool fallback_to_stub = false;
};

// Field names match the JSON config keys.
struct RunConfig {
  std::string kb_path = "kb.json";
  std::string library_path = "library.json";
  std::string reference_path;
  std::string workspace = "workspace";
  ProteinTarget target;
  EnvConfig env;
  PPOConfig ppo;
  RewardWeights weights;
  Thresholds thresholds;
  FilterConfig filter;
  int episodes = 5;
  std::string oracle = "surrogate";  // or "docking"
  std::uint64_t seed = 0;
  int workers = 1;
  int k = kDefaultTopK;
  int min_fragment_atoms = kDefaultMinFragmentAtoms;
  bool normalize_rewards = false;
  EncoderConfig protein_encoder{"stub", "stub-sha256-protein/1", kProteinDim,
                                {}, false};
  EncoderConfig molecule_encoder{"stub", "stub-sha256-molecule/1",
                                 kMoleculeDim, {}, false};
  DockingConfig docking;
};

// Overlays the keys present in j onto cfg. Throws ConfigError for unknown
// keys or bad values.
void apply_config_json(RunConfig &cfg, const nlohmann::json &j);
// Throws FormatError for a missing or malformed file.
RunConfig load_run_config(const std::string &path);
nlohmann::ordered_json run_config_json(const RunConfig &cfg);
// Throws ConfigError.
void validate_run_config(const RunConfig &cfg);

std::unique_ptr<Encoder> make_encoder(const EncoderConfig &cfg,
                                      Modality modality,
                                      const std::string &work_dir);

// Samples (or takes the greedy choice) from the dot-product policy.
class AgentPolicy: public Policy {
public:
  AgentPolicy(const PolicyParams &params, SelectMode mode)
      : params_(params), mode_(mode) {}
  Decision decide(const EnvState &state, const ActionSet &actions,
                  Rng &rng) override;

private:
  const PolicyParams &params_;
  SelectMode mode_;
};

// Decision points of a trajectory in PPO form.
std::vector<PpoSample> to_samples(const Trajectory &traj);

struct BuildKbOptions {
  std::string index;
  std::string ligands;
  std::string out;  // defaults to cfg.kb_path
};

struct BuildTemplatesOptions {
  std::string rules;
  std::string out;  // defaults to cfg.library_path
};

struct InitTargetOptions {
  std::string kb;             // defaults to cfg.kb_path
  std::string sequence_file;  // FASTA or plain; overrides cfg.target.sequence
};

struct RunOptions {
  std::string library;    // defaults to cfg.library_path
  std::string reference;  // defaults to cfg.reference_path
};

struct ReportOptions {
  std::string discoveries;
  std::string reference;
  std::string format = "text";  // json, csv or text
  std::string out;              // stdout when empty
  std::string target_id;
};

// Each returns the process exit status and throws rxngrow::Error on
// failure. Progress goes to log.
int cmd_build_kb(const RunConfig &cfg, const BuildKbOptions &opts,
                 std::ostream &log);
int cmd_build_templates(const RunConfig &cfg,
                        const BuildTemplatesOptions &opts, std::ostream &log);
int cmd_init_target(const RunConfig &cfg, const InitTargetOptions &opts,
                    std::ostream &log);
int cmd_run(const RunConfig &cfg, const RunOptions &opts, std::ostream &log);
int cmd_report(const RunConfig &cfg, const ReportOptions &opts,
               std::ostream &out, std::ostream &log);

// Workspace file names.
namespace workspace {
inline constexpr const char *kTarget = "target.json";
inline constexpr const char *kSimilarity = "similarity.tsv";
inline constexpr const char *kPool = "pool.smi";
inline constexpr const char *kEmbeddingCache = "cache/embeddings.bin";
inline constexpr const char *kScoreCache = "cache/scores.tsv";
inline constexpr const char *kDiscoveries = "discoveries.jsonl";
inline constexpr const char *kTrajectories = "trajectories.jsonl";
inline constexpr const char *kCheckpoint = "checkpoint.bin";
inline constexpr const char *kReportJson = "report.json";
inline constexpr const char *kReportCsv = "report.csv";
inline constexpr const char *kReportText = "report.txt";
inline constexpr const char *kRunMeta = "run_meta.json";
}  // namespace workspace

}  // namespace rxngrow

#endif  // RXNGROW_PIPELINE_H_

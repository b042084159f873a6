//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_REWARD_ORACLES_H_
#define RXNGROW_REWARD_ORACLES_H_

#include <array>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rxngrow/chem_core.h"

namespace rxngrow {

struct RewardWeights {
  double w1 = 1.0;   // affinity
  double w2 = 0.1;   // QED
  double w3 = 0.1;   // SA, subtracted
  double w4 = 0.35;  // novelty
};

struct RewardComponents {
  double affinity = 0;  // -(docked score)
  double qed = 0;
  double sa = 0;
  double novelty = 0;
};

struct RewardBreakdown {
  double affinity_component = 0;
  double qed_component = 0;
  double sa_component = 0;
  double novelty_component = 0;
  double total = 0;
  double docked_score = 0;  // kcal/mol; 0 when docking failed
  bool docking_failed = false;
};

// total = w1*affinity + w2*qed - w3*sa + w4*novelty, evaluated left to
// right. With normalize set, affinity is divided by 12 and clamped to
// [0, 1] and SA is mapped to (sa - 1) / 9 before weighting; the breakdown
// keeps the raw components either way.
RewardBreakdown scalarize(const RewardComponents &c, const RewardWeights &w,
                          bool normalize = false);

inline double affinity_from_score(double docked_score) {
  return -docked_score;
}

// Deterministic stand-in for docking: a Gaussian well in heavy-atom count,
// -12 at the optimum and rising towards 0 away from it.
double surrogate_dock(const Molecule &m, std::uint64_t target_seed);
// Heavy-atom count at which surrogate_dock() is lowest.
int surrogate_optimum(std::uint64_t target_seed);

using Vec3 = std::array<double, 3>;

struct ProteinTarget {
  std::string target_id;
  std::string pdb_path;
  std::string sequence;
  Vec3 box_center{0, 0, 0};
  Vec3 box_size{20, 20, 20};
  std::optional<std::string> prepared_receptor;
};

// Command templates. "{input}", "{output}" and "{smiles}" are substituted
// per argument.
struct ConverterConfig {
  std::vector<std::string> receptor_command{"obabel", "{input}", "-xr",
                                            "-O", "{output}"};
  std::vector<std::string> ligand_command{"obabel", "-:{smiles}", "--gen3d",
                                          "-O", "{output}"};
};

// Converts pdb_path to <output_path> (default: same stem, .pdbqt). Skips the
// conversion when the output is newer than the input. Throws FormatError
// for a missing input, ToolNotFoundError when the converter is absent,
// ConversionError for a failing converter, ConfigError for a bad box.
ProteinTarget prepare_receptor(const ProteinTarget &target,
                               const ConverterConfig &converter = {},
                               const std::string &output_path = "");

class DockingOracle {
public:
  virtual ~DockingOracle() = default;
  // Identifies the target for cache keys.
  virtual const std::string &target_id() const = 0;
  virtual int exhaustiveness() const = 0;
  virtual std::unique_ptr<DockingOracle> clone() const = 0;
  // Best pose score in kcal/mol. Throws DockingFailure.
  virtual double dock(const Molecule &m) = 0;
};

class SurrogateOracle: public DockingOracle {
public:
  SurrogateOracle(std::string target_id, std::uint64_t target_seed);

  const std::string &target_id() const override { return target_id_; }
  int exhaustiveness() const override { return 0; }
  std::unique_ptr<DockingOracle> clone() const override;
  double dock(const Molecule &m) override;

private:
  std::string target_id_;
  std::uint64_t seed_;
};

struct DockingConfig {
  std::string vina_binary = "vina";
  int exhaustiveness = 8;
  std::uint64_t seed = 0;
  std::string work_dir = "docking";
  ConverterConfig converter;
};

// Runs the docking engine as a subprocess on a prepared receptor and reads
// the top pose score from its output file.
class SubprocessDockingOracle: public DockingOracle {
public:
  // Throws ConfigError when the target has no prepared receptor or a bad
  // box.
  SubprocessDockingOracle(ProteinTarget target, DockingConfig config);

  const std::string &target_id() const override { return target_.target_id; }
  int exhaustiveness() const override { return config_.exhaustiveness; }
  std::unique_ptr<DockingOracle> clone() const override;
  double dock(const Molecule &m) override;

  std::vector<std::string> docking_command(const std::string &ligand,
                                           const std::string &out) const;

private:
  ProteinTarget target_;
  DockingConfig config_;
  int instance_;  // keeps scratch files of clones apart
};

// Score of the first "REMARK VINA RESULT:" line. Throws DockingFailure.
double parse_docking_result(const std::string &text);

// Keyed by (target id, SHA-256 of the SMILES, exhaustiveness). Backed by an
// append-only TSV file when a path is given.
class ScoreCache {
public:
  ScoreCache() = default;
  // Throws FormatError for a corrupt file.
  explicit ScoreCache(std::string path);
  ~ScoreCache();
  ScoreCache(const ScoreCache &) = delete;
  ScoreCache &operator=(const ScoreCache &) = delete;

  static std::string key(const std::string &target_id,
                         const std::string &smiles, int exhaustiveness);
  std::optional<double> get(const std::string &key) const;
  void put(const std::string &key, double score);
  size_t size() const;

private:
  std::string path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, double> entries_;
  std::FILE *file_ = nullptr;
};

// Cached docking. Throws DockingFailure (never cached).
double dock(const Molecule &ligand, DockingOracle &oracle, ScoreCache &cache);

class ReferenceSet {
public:
  ReferenceSet() = default;
  // One SMILES per line; canonicalized on load, unparseable lines counted
  // and skipped.
  static ReferenceSet load(const std::string &path, ChemEngine &engine);

  void insert(const std::string &canonical) { smiles_.insert(canonical); }
  bool contains(const std::string &canonical) const {
    return smiles_.count(canonical) > 0;
  }
  size_t size() const { return smiles_.size(); }
  int skipped() const { return skipped_; }

private:
  std::unordered_set<std::string> smiles_;
  int skipped_ = 0;
};

// 1 when the molecule is absent from the reference, else 0.
double novelty(const Molecule &m, const ReferenceSet &reference);

struct RewardContext {
  DockingOracle *docking = nullptr;
  ScoreCache *cache = nullptr;
  const ReferenceSet *reference = nullptr;
  RewardWeights weights;
  bool normalize = false;
};

// Full breakdown for one molecule. A DockingFailure becomes affinity 0.
RewardBreakdown evaluate_reward(Molecule &m, ChemEngine &engine,
                                const RewardContext &ctx);

}  // namespace rxngrow

#endif  // RXNGROW_REWARD_ORACLES_H_

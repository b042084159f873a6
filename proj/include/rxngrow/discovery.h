//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_DISCOVERY_H_
#define RXNGROW_DISCOVERY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rxngrow/chem_core.h"
#include "rxngrow/reward_oracles.h"

namespace rxngrow {

struct Thresholds {
  double affinity_max = -7.0;  // kcal/mol
  double qed_min = 0.2;
};

struct Discovery {
  Molecule molecule;
  RewardBreakdown breakdown;
  double docked_score = 0;
  std::int64_t episode_id = 0;
  int step_found = 0;
};

// Serializes admission; keeps the best docked score per SMILES.
class DiscoveryCollector {
public:
  explicit DiscoveryCollector(Thresholds t = {}): thresholds_(t) {}

  // True when the candidate passes both thresholds and is new or better
  // than the stored entry with the same SMILES.
  bool admit(const Molecule &m, const RewardBreakdown &b,
             std::int64_t episode_id, int step);

  const Thresholds &thresholds() const { return thresholds_; }
  size_t size() const { return by_smiles_.size(); }
  // rank() of the current contents.
  std::vector<Discovery> ranked() const;

private:
  Thresholds thresholds_;
  std::map<std::string, Discovery> by_smiles_;
};

bool passes_thresholds(const RewardBreakdown &b, const Thresholds &t);

// Ascending docked score, then descending QED, then SMILES.
std::vector<Discovery> rank(std::vector<Discovery> discoveries);

struct GeneratedMolecule {
  std::string smiles;
  std::optional<double> docked_score;
};

struct MetricsRow {
  std::string label;
  size_t count = 0;        // molecules submitted
  size_t valid_count = 0;  // passing re-sanitization
  bool empty = true;       // no valid molecules; means are reported as 0
  double validity = 0;
  double novelty = 0;
  double mw = 0;
  double hbd = 0;
  double hba = 0;
  double qed = 0;
  double sa = 0;
  double mean_affinity = 0;  // over valid molecules with a docked score
  double best_affinity = 0;
  double lipinski_pass = 0;  // fraction of valid molecules passing all three
};

// validity is the re-sanitizing fraction; the other means run over valid
// molecules only.
MetricsRow compute_metrics(const std::vector<GeneratedMolecule> &generated,
                           const ReferenceSet &reference, ChemEngine &engine,
                           const std::string &label = "");

// "valid,novelty,mw,hbd,hba,qed,sa,mean_affinity,best_affinity".
inline constexpr const char *kMetricsColumns =
    "valid,novelty,mw,hbd,hba,qed,sa,mean_affinity,best_affinity";

std::string metrics_json(const std::vector<MetricsRow> &rows,
                         const std::string &target_id);
std::string metrics_csv(const std::vector<MetricsRow> &rows);
std::string metrics_text(const std::vector<MetricsRow> &rows,
                         const std::string &target_id);

// One JSON object per line.
std::string discoveries_jsonl(const std::vector<Discovery> &ranked);
// Reads back a discoveries file. Throws FormatError.
std::vector<GeneratedMolecule> read_discoveries(const std::string &path);

}  // namespace rxngrow

#endif  // RXNGROW_DISCOVERY_H_

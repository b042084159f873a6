//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_SA_SCORE_H_
#define RXNGROW_CHEM_SA_SCORE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rxngrow/chem/mol.h"

namespace rxngrow::chem {

// Synthetic accessibility score in [1, 10] (Ertl and Schuffenhauer), built
// from fragment contributions plus complexity penalties. Lower is easier.
class SaScorer {
public:
  // Reads a table written by scripts/make_sa_table.py. Throws EngineError.
  static SaScorer load(const std::string &path);
  // Table from $RXNGROW_SA_TABLE, else the build-time data directory.
  static const SaScorer &shared();
  static std::string default_table_path();

  double score(const Mol &mol) const;
  // Fragment contribution for one Morgan id; -4 when unknown.
  double fragment_score(std::uint32_t id) const;
  size_t size() const { return ids_.size(); }

private:
  std::vector<std::uint32_t> ids_;
  std::vector<float> scores_;
};

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_SA_SCORE_H_

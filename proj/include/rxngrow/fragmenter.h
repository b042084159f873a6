//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_FRAGMENTER_H_
#define RXNGROW_FRAGMENTER_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rxngrow/chem_core.h"
#include "rxngrow/util/rng.h"

namespace rxngrow {

inline constexpr int kDefaultMinFragmentAtoms = 4;

struct FragmentPool {
  std::vector<Molecule> fragments;  // sorted by SMILES, no duplicates
  // Fragment SMILES -> pdb_ids of the ligands it came from.
  std::map<std::string, std::set<std::string>> provenance;

  bool empty() const { return fragments.empty(); }
  size_t size() const { return fragments.size(); }
};

// ligands maps canonical ligand SMILES to parent pdb_ids, as returned by
// collect_ligand_sources(). The pool is the union of BRICS and RECAP leaves
// with attachment points capped by hydrogen, keeping fragments with at
// least min_fragment_atoms heavy atoms. Throws EmptyPoolError when nothing
// survives.
FragmentPool fragment_ligands(
    const std::map<std::string, std::set<std::string>> &ligands,
    ChemEngine &engine, int min_fragment_atoms = kDefaultMinFragmentAtoms);

// Uniform draw. Throws EmptyPoolError.
Molecule sample_start(const FragmentPool &pool, Rng &rng);
Molecule sample_start(const FragmentPool &pool, std::uint64_t seed);

// One canonical SMILES per line at path; the sidecar at
// provenance_path(path) holds "smiles<TAB>id,id,...".
void export_pool(const FragmentPool &pool, const std::string &path);
std::string provenance_path(const std::string &pool_path);
// Throws FormatError, EmptyPoolError.
FragmentPool load_pool(const std::string &path, ChemEngine &engine);

}  // namespace rxngrow

#endif  // RXNGROW_FRAGMENTER_H_

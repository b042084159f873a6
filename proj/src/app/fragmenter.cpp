//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/fragmenter.h"

#include <algorithm>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"

namespace rxngrow {

FragmentPool fragment_ligands(
    const std::map<std::string, std::set<std::string>> &ligands,
    ChemEngine &engine, int min_fragment_atoms) {
  if (ligands.empty())
    throw EmptyPoolError("no ligands to fragment");
  std::map<std::string, std::set<std::string>> provenance;
  std::map<std::string, Molecule> kept;
  for (const auto &[smiles, parents]: ligands) {
    for (const std::string &frag: engine.fragment(smiles)) {
      auto it = kept.find(frag);
      if (it == kept.end()) {
        Molecule m = parse_molecule(frag, engine);
        if (m.heavy_atom_count() < min_fragment_atoms)
          continue;
        it = kept.emplace(m.smiles(), std::move(m)).first;
      }
      provenance[it->first].insert(parents.begin(), parents.end());
    }
  }
  if (kept.empty())
    throw EmptyPoolError("every fragment has fewer than "
                         + std::to_string(min_fragment_atoms)
                         + " heavy atoms");
  FragmentPool pool;
  for (auto &[smiles, m]: kept)
    pool.fragments.push_back(std::move(m));
  pool.provenance = std::move(provenance);
  return pool;
}

Molecule sample_start(const FragmentPool &pool, Rng &rng) {
  if (pool.empty())
    throw EmptyPoolError("cannot sample from an empty fragment pool");
  return pool.fragments[rng.uniform_index(pool.size())];
}

Molecule sample_start(const FragmentPool &pool, std::uint64_t seed) {
  Rng rng(seed);
  return sample_start(pool, rng);
}

std::string provenance_path(const std::string &pool_path) {
  return pool_path + ".provenance.tsv";
}

void export_pool(const FragmentPool &pool, const std::string &path) {
  std::string smi;
  std::string prov = "smiles\tparents\n";
  for (const auto &m: pool.fragments) {
    smi += m.smiles() + "\n";
    prov += m.smiles() + "\t";
    bool first = true;
    auto it = pool.provenance.find(m.smiles());
    if (it != pool.provenance.end()) {
      for (const auto &id: it->second) {
        prov += (first ? "" : ",") + id;
        first = false;
      }
    }
    prov += "\n";
  }
  write_file_atomic(path, smi);
  write_file_atomic(provenance_path(path), prov);
}

FragmentPool load_pool(const std::string &path, ChemEngine &engine) {
  FragmentPool pool;
  std::set<std::string> seen;
  const auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    try {
      Molecule m = parse_molecule(lines[i], engine);
      if (seen.insert(m.smiles()).second)
        pool.fragments.push_back(std::move(m));
    } catch (const ParseError &e) {
      throw FormatError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  std::sort(pool.fragments.begin(), pool.fragments.end());
  const std::string side = provenance_path(path);
  if (file_exists(side)) {
    const auto rows = read_lines(side);
    for (size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].empty())
        continue;
      const auto f = split(rows[i], '\t');
      if (f.size() != 2)
        throw FormatError(side + ":" + std::to_string(i + 1)
                          + ": expected 2 fields");
      auto &parents = pool.provenance[f[0]];
      if (!f[1].empty())
        for (const auto &id: split(f[1], ','))
          parents.insert(id);
    }
  }
  if (pool.empty())
    throw EmptyPoolError("fragment pool file is empty: " + path);
  return pool;
}

}  // namespace rxngrow

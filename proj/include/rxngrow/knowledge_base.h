//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_KNOWLEDGE_BASE_H_
#define RXNGROW_KNOWLEDGE_BASE_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rxngrow/chem_core.h"

namespace rxngrow {

struct LigandEntry {
  std::string smiles;  // canonical
  std::optional<double> affinity;

  bool operator==(const LigandEntry &) const = default;
};

struct ProteinRecord {
  std::string pdb_id;
  std::string sequence;
  std::vector<LigandEntry> ligands;

  std::vector<std::string> ligand_smiles() const;
  // First recorded affinity, if any. Kept for reference only.
  std::optional<double> affinity_value() const;

  bool operator==(const ProteinRecord &) const = default;
};

struct KnowledgeBase {
  std::map<std::string, ProteinRecord> records;
  std::string version;
  std::string engine_id;
  int skipped_ligands = 0;  // rows dropped at ingestion for bad SMILES

  bool operator==(const KnowledgeBase &) const = default;
};

inline constexpr const char *kKnowledgeBaseVersion =
    "rxngrow-kb/1 chains=concatenated-in-file-order";

// Index file: header "pdb_id\tsequence". Ligand table: header
// "pdb_id\tsmiles\taffinity", affinity may be empty. Multi-chain sequences
// may separate chains with ':' or '/'; chains are concatenated in order.
//
// Throws FormatError (with line number) for malformed or missing files,
// duplicate ids, bad sequences and ligand rows naming unknown ids.
// Throws EmptyBaseError when no record survives.
KnowledgeBase ingest(const std::string &index_file,
                     const std::string &ligand_table, ChemEngine &engine);

// Deduplicated union of the ligands of ids. Throws UnknownIdError.
std::set<Molecule> collect_ligands(const KnowledgeBase &kb,
                                   const std::vector<std::string> &ids,
                                   ChemEngine &engine);

// Same union, keyed by canonical SMILES, with the ids each came from.
std::map<std::string, std::set<std::string>> collect_ligand_sources(
    const KnowledgeBase &kb, const std::vector<std::string> &ids);

std::string serialize_knowledge_base(const KnowledgeBase &kb);
KnowledgeBase deserialize_knowledge_base(const std::string &text);
void save_knowledge_base(const KnowledgeBase &kb, const std::string &path);
// Throws FormatError.
KnowledgeBase load_knowledge_base(const std::string &path);

}  // namespace rxngrow

#endif  // RXNGROW_KNOWLEDGE_BASE_H_

//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/knowledge_base.h"

#include <cctype>
#include <charconv>
#include <nlohmann/json.hpp>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"

namespace rxngrow {
namespace {

using nlohmann::json;

constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWYX";

[[noreturn]] void fail(const std::string &path, size_t line,
                       const std::string &what) {
  throw FormatError(path + ":" + std::to_string(line) + ": " + what);
}

bool valid_pdb_id(const std::string &id) {
  if (id.size() != 4)
    return false;
  for (char c: id)
    if (!std::isalnum(static_cast<unsigned char>(c)))
      return false;
  return true;
}

// Strips chain separators; empty result means invalid.
std::string normalize_sequence(const std::string &raw) {
  std::string seq;
  for (char c: raw) {
    if (c == ':' || c == '/')
      continue;
    if (kAminoAcids.find(c) == std::string_view::npos)
      return {};
    seq.push_back(c);
  }
  return seq;
}

std::optional<double> parse_affinity(const std::string &s, bool &ok) {
  ok = true;
  if (s.empty())
    return std::nullopt;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    ok = false;
    return std::nullopt;
  }
  return v;
}

bool blank(const std::string &line) {
  for (char c: line)
    if (!std::isspace(static_cast<unsigned char>(c)))
      return false;
  return true;
}

}  // namespace

std::vector<std::string> ProteinRecord::ligand_smiles() const {
  std::vector<std::string> out;
  for (const auto &l: ligands)
    out.push_back(l.smiles);
  return out;
}

std::optional<double> ProteinRecord::affinity_value() const {
  for (const auto &l: ligands)
    if (l.affinity)
      return l.affinity;
  return std::nullopt;
}

KnowledgeBase ingest(const std::string &index_file,
                     const std::string &ligand_table, ChemEngine &engine) {
  KnowledgeBase kb;
  kb.version = kKnowledgeBaseVersion;
  kb.engine_id = engine.engine_id();

  const auto index = read_lines(index_file);
  if (index.empty() || index[0] != "pdb_id\tsequence")
    fail(index_file, 1, "expected header 'pdb_id<TAB>sequence'");
  for (size_t i = 1; i < index.size(); ++i) {
    if (blank(index[i]))
      continue;
    const auto f = split(index[i], '\t');
    if (f.size() != 2)
      fail(index_file, i + 1, "expected 2 fields, got "
                                  + std::to_string(f.size()));
    if (!valid_pdb_id(f[0]))
      fail(index_file, i + 1, "bad pdb_id '" + f[0] + "'");
    const std::string seq = normalize_sequence(f[1]);
    if (seq.empty())
      fail(index_file, i + 1, "bad sequence for " + f[0]);
    if (kb.records.count(f[0]))
      fail(index_file, i + 1, "duplicate pdb_id " + f[0]);
    kb.records[f[0]] = ProteinRecord{f[0], seq, {}};
  }

  const auto ligands = read_lines(ligand_table);
  if (ligands.empty() || ligands[0] != "pdb_id\tsmiles\taffinity")
    fail(ligand_table, 1, "expected header 'pdb_id<TAB>smiles<TAB>affinity'");
  for (size_t i = 1; i < ligands.size(); ++i) {
    if (blank(ligands[i]))
      continue;
    const auto f = split(ligands[i], '\t');
    if (f.size() != 3)
      fail(ligand_table, i + 1, "expected 3 fields, got "
                                    + std::to_string(f.size()));
    auto it = kb.records.find(f[0]);
    if (it == kb.records.end())
      fail(ligand_table, i + 1, "pdb_id " + f[0] + " not in index");
    bool ok = false;
    const auto affinity = parse_affinity(f[2], ok);
    if (!ok)
      fail(ligand_table, i + 1, "bad affinity '" + f[2] + "'");
    std::string smiles;
    try {
      smiles = engine.canonicalize(f[1]).canonical;
    } catch (const ParseError &) {
      ++kb.skipped_ligands;
      continue;
    }
    auto &record = it->second;
    bool seen = false;
    for (const auto &l: record.ligands)
      seen = seen || l.smiles == smiles;
    if (!seen)
      record.ligands.push_back({smiles, affinity});
  }
  if (kb.records.empty())
    throw EmptyBaseError("knowledge base has no valid records: " + index_file);
  return kb;
}

std::map<std::string, std::set<std::string>> collect_ligand_sources(
    const KnowledgeBase &kb, const std::vector<std::string> &ids) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto &id: ids) {
    auto it = kb.records.find(id);
    if (it == kb.records.end())
      throw UnknownIdError("unknown pdb_id: " + id);
    for (const auto &l: it->second.ligands)
      out[l.smiles].insert(id);
  }
  return out;
}

std::set<Molecule> collect_ligands(const KnowledgeBase &kb,
                                   const std::vector<std::string> &ids,
                                   ChemEngine &engine) {
  std::set<Molecule> out;
  for (const auto &[smiles, parents]: collect_ligand_sources(kb, ids))
    out.insert(parse_molecule(smiles, engine));
  return out;
}

std::string serialize_knowledge_base(const KnowledgeBase &kb) {
  json records = json::array();
  for (const auto &[id, r]: kb.records) {
    json ligs = json::array();
    for (const auto &l: r.ligands)
      ligs.push_back({{"smiles", l.smiles},
                      {"affinity", l.affinity ? json(*l.affinity) : json()}});
    records.push_back(
        {{"pdb_id", id}, {"sequence", r.sequence}, {"ligands", ligs}});
  }
  json doc = {{"format", "rxngrow-knowledge-base"},
              {"version", kb.version},
              {"engine_id", kb.engine_id},
              {"skipped_ligands", kb.skipped_ligands},
              {"records", records}};
  return doc.dump(1) + "\n";
}

KnowledgeBase deserialize_knowledge_base(const std::string &text) {
  KnowledgeBase kb;
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "rxngrow-knowledge-base")
      throw FormatError("not a knowledge base store");
    kb.version = doc.at("version").get<std::string>();
    kb.engine_id = doc.at("engine_id").get<std::string>();
    kb.skipped_ligands = doc.at("skipped_ligands").get<int>();
    for (const auto &r: doc.at("records")) {
      ProteinRecord rec;
      rec.pdb_id = r.at("pdb_id").get<std::string>();
      rec.sequence = r.at("sequence").get<std::string>();
      for (const auto &l: r.at("ligands")) {
        LigandEntry e;
        e.smiles = l.at("smiles").get<std::string>();
        if (!l.at("affinity").is_null())
          e.affinity = l.at("affinity").get<double>();
        rec.ligands.push_back(std::move(e));
      }
      if (!kb.records.emplace(rec.pdb_id, rec).second)
        throw FormatError("duplicate pdb_id in store: " + rec.pdb_id);
    }
  } catch (const json::exception &e) {
    throw FormatError(std::string("malformed knowledge base store: ")
                      + e.what());
  }
  return kb;
}

void save_knowledge_base(const KnowledgeBase &kb, const std::string &path) {
  write_file_atomic(path, serialize_knowledge_base(kb));
}

KnowledgeBase load_knowledge_base(const std::string &path) {
  return deserialize_knowledge_base(read_file(path));
}

}  // namespace rxngrow

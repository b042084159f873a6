//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/knowledge_base.h"

#include <gtest/gtest.h>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"
#include "test_support.h"

namespace rxngrow {
namespace {

using testing::fixture;
using testing::TempDir;

KnowledgeBase fixture_kb(ChemEngine &e) {
  return ingest(fixture("kb_index.tsv"), fixture("kb_ligands.tsv"), e);
}

TEST(KnowledgeBase, IngestFixture) {
  NativeEngine e;
  const KnowledgeBase kb = fixture_kb(e);
  EXPECT_EQ(kb.records.size(), 5u);
  EXPECT_EQ(kb.skipped_ligands, 1);
  // The two imatinib spellings collapse to one ligand.
  EXPECT_EQ(kb.records.at("1ABL").ligands.size(), 1u);
  EXPECT_EQ(kb.records.at("1ABL").affinity_value(), -10.2);
  EXPECT_EQ(kb.records.at("5ACE").ligands.size(), 1u);
  EXPECT_EQ(kb.engine_id, e.engine_id());
}

TEST(KnowledgeBase, ByteIdenticalStore) {
  NativeEngine e;
  TempDir dir("kb");
  save_knowledge_base(fixture_kb(e), dir.file("a.json"));
  save_knowledge_base(fixture_kb(e), dir.file("b.json"));
  EXPECT_EQ(read_file(dir.file("a.json")), read_file(dir.file("b.json")));
  EXPECT_EQ(load_knowledge_base(dir.file("a.json")), fixture_kb(e));
}

std::string format_error(const std::string &index, const std::string &ligands) {
  NativeEngine e;
  TempDir dir("kbbad");
  write_file_atomic(dir.file("i.tsv"), index);
  write_file_atomic(dir.file("l.tsv"), ligands);
  try {
    ingest(dir.file("i.tsv"), dir.file("l.tsv"), e);
  } catch (const FormatError &err) {
    return err.what();
  }
  return "";
}

TEST(KnowledgeBase, FormatErrorsCarryLineNumbers) {
  const std::string lig = "pdb_id\tsmiles\taffinity\n";
  EXPECT_NE(format_error("pdb_id\tsequence\n1ABC\tMKV\n1ABC\tMKL\n", lig)
                .find("i.tsv:3"),
            std::string::npos);
  EXPECT_NE(format_error("pdb_id\tsequence\n1ABC\tMK1\n", lig).find("i.tsv:2"),
            std::string::npos);
  EXPECT_NE(format_error("pdb_id\tsequence\n1ABC\n", lig).find("i.tsv:2"),
            std::string::npos);
  EXPECT_NE(format_error("pdb_id\tsequence\n1ABC\tMKV\n",
                         lig + "9ZZZ\tCCO\t\n")
                .find("l.tsv:2"),
            std::string::npos);
  EXPECT_NE(format_error("pdb_id\tsequence\n1ABC\tMKV\n",
                         lig + "1ABC\tCCO\tstrong\n")
                .find("l.tsv:2"),
            std::string::npos);
  EXPECT_NE(format_error("id\tseq\n", lig).find("i.tsv:1"), std::string::npos);
}

TEST(KnowledgeBase, MultiChainSequencesAreConcatenated) {
  NativeEngine e;
  TempDir dir("kbchain");
  write_file_atomic(dir.file("i.tsv"), "pdb_id\tsequence\n1ABC\tMKV:GGA/WY\n");
  write_file_atomic(dir.file("l.tsv"), "pdb_id\tsmiles\taffinity\n");
  EXPECT_EQ(ingest(dir.file("i.tsv"), dir.file("l.tsv"), e)
                .records.at("1ABC")
                .sequence,
            "MKVGGAWY");
}

TEST(KnowledgeBase, EmptyBaseAndMissingFile) {
  NativeEngine e;
  TempDir dir("kbempty");
  write_file_atomic(dir.file("i.tsv"), "pdb_id\tsequence\n");
  write_file_atomic(dir.file("l.tsv"), "pdb_id\tsmiles\taffinity\n");
  EXPECT_THROW(ingest(dir.file("i.tsv"), dir.file("l.tsv"), e), EmptyBaseError);
  EXPECT_THROW(ingest(dir.file("nope.tsv"), dir.file("l.tsv"), e), FormatError);
}

TEST(KnowledgeBase, CollectLigands) {
  NativeEngine e;
  const KnowledgeBase kb = fixture_kb(e);
  const auto ligs = collect_ligands(kb, {"2COX", "3PDE"}, e);
  EXPECT_EQ(ligs.size(), 4u);
  EXPECT_TRUE(collect_ligands(kb, {}, e).empty());
  EXPECT_THROW(collect_ligands(kb, {"0XXX"}, e), UnknownIdError);
  const auto sources = collect_ligand_sources(kb, {"2COX", "2COX"});
  EXPECT_EQ(sources.size(), 2u);
  for (const auto &[smiles, ids]: sources)
    EXPECT_EQ(ids, std::set<std::string>{"2COX"});
}

}  // namespace
}  // namespace rxngrow

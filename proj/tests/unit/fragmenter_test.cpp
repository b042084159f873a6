//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/fragmenter.h"

#include <gtest/gtest.h>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"
#include "test_support.h"

namespace rxngrow {
namespace {

using testing::TempDir;

std::map<std::string, std::set<std::string>> sources(ChemEngine &e) {
  return {
      {parse_molecule("CC(C)Cc1ccc(C(C)C(=O)O)cc1", e).smiles(), {"2COX"}},
      {parse_molecule("Cc1ccc(-c2cc(C(F)(F)F)nn2-c2ccc(S(N)(=O)=O)cc2)cc1", e)
           .smiles(),
       {"2COX"}},
      {parse_molecule("COc1cc2c(cc1OC)C(=O)C(CC1CCN(Cc3ccccc3)CC1)C2", e)
           .smiles(),
       {"5ACE"}},
  };
}

// BRICS and RECAP leaves from the RDKit reference implementation, capped
// with hydrogen and kept at >= 4 heavy atoms.
TEST(Fragmenter, MatchesReferenceToolkit) {
  NativeEngine e;
  const std::map<std::string, std::set<std::string>> expected_raw = {
      {"C1CCNCC1", {"5ACE"}},
      {"CC(C)C", {"2COX"}},
      {"CC(C)Cc1ccc(C(C)C=O)cc1", {"2COX"}},
      {"CCC(=O)O", {"2COX"}},
      {"COc1cc2c(cc1OC)C(=O)C(CC1CCNCC1)C2", {"5ACE"}},
      {"Cc1ccccc1", {"2COX", "5ACE"}},
      {"FC(F)(F)c1cc[nH]n1", {"2COX"}},
      {"FC(F)F", {"2COX"}},
      {"NS(=O)(=O)c1ccccc1", {"2COX"}},
      {"O=C1CCc2ccccc21", {"5ACE"}},
      {"c1ccccc1", {"2COX", "5ACE"}},
      {"c1cn[nH]c1", {"2COX"}},
  };
  std::map<std::string, std::set<std::string>> expected;
  for (const auto &[s, ids]: expected_raw)
    expected[parse_molecule(s, e).smiles()] = ids;
  const FragmentPool pool = fragment_ligands(sources(e), e, 4);
  EXPECT_EQ(pool.provenance, expected);
  ASSERT_EQ(pool.size(), expected.size());
  for (size_t i = 1; i < pool.size(); ++i)
    EXPECT_LT(pool.fragments[i - 1], pool.fragments[i]);
}

TEST(Fragmenter, MinimumSizeAndEmptyPool) {
  NativeEngine e;
  const FragmentPool big = fragment_ligands(sources(e), e, 10);
  for (const auto &m: big.fragments)
    EXPECT_GE(m.heavy_atom_count(), 10);
  EXPECT_THROW(fragment_ligands(sources(e), e, 100), EmptyPoolError);
  EXPECT_THROW(fragment_ligands({}, e, 4), EmptyPoolError);
}

TEST(Fragmenter, SampleStartIsUniform) {
  NativeEngine e;
  const FragmentPool pool = fragment_ligands(sources(e), e, 4);
  std::map<std::string, int> counts;
  Rng rng(1);
  const int draws = 12000;
  for (int i = 0; i < draws; ++i)
    ++counts[sample_start(pool, rng).smiles()];
  ASSERT_EQ(counts.size(), pool.size());
  const double expected = double(draws) / pool.size();
  for (const auto &[s, c]: counts)
    EXPECT_NEAR(c, expected, 0.15 * expected) << s;
  EXPECT_EQ(sample_start(pool, 99), sample_start(pool, 99));
  EXPECT_THROW(sample_start(FragmentPool{}, rng), EmptyPoolError);
}

TEST(Fragmenter, ExportAndLoad) {
  NativeEngine e;
  TempDir dir("pool");
  const FragmentPool pool = fragment_ligands(sources(e), e, 4);
  export_pool(pool, dir.file("pool.smi"));
  EXPECT_EQ(provenance_path(dir.file("pool.smi")),
            dir.file("pool.smi") + ".provenance.tsv");
  const auto side = read_lines(provenance_path(dir.file("pool.smi")));
  EXPECT_EQ(side.front(), "smiles\tparents");
  const FragmentPool back = load_pool(dir.file("pool.smi"), e);
  EXPECT_EQ(back.fragments, pool.fragments);
  EXPECT_EQ(back.provenance, pool.provenance);
  write_file_atomic(dir.file("empty.smi"), "");
  EXPECT_THROW(load_pool(dir.file("empty.smi"), e), EmptyPoolError);
}

}  // namespace
}  // namespace rxngrow

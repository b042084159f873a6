//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem_core.h"

#include <gtest/gtest.h>

#include "rxngrow/errors.h"

namespace rxngrow {
namespace {

TEST(ChemCore, ParseCanonicalizes) {
  NativeEngine e;
  const Molecule a = parse_molecule("OCC", e);
  const Molecule b = parse_molecule("C(O)C", e);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.smiles(), "CCO");
  EXPECT_EQ(a.heavy_atom_count(), 3);
}

TEST(ChemCore, ParseRejectsBadInput) {
  NativeEngine e;
  EXPECT_THROW(parse_molecule("", e), ParseError);
  EXPECT_THROW(parse_molecule("C1CC", e), ParseError);
  EXPECT_THROW(parse_molecule("[H][H]", e), ParseError);
  EXPECT_THROW(parse_molecule("c1cccc1", e), ParseError);
}

TEST(ChemCore, CanonicalIsIdempotent) {
  NativeEngine e;
  for (const char *s: {"CC(=O)Oc1ccccc1C(=O)O", "Cn1c(=O)c2c(ncn2C)n(C)c1=O",
                       "C[C@H](N)C(=O)O", "F/C=C/F"}) {
    const Molecule m = parse_molecule(s, e);
    EXPECT_EQ(parse_molecule(m.smiles(), e).smiles(), m.smiles()) << s;
  }
}

struct DescriptorCase {
  const char *smiles;
  double mw;
  int hbd;
  int hba;
  double qed;
  double sa;
};

// Values from the RDKit reference implementation (MolWt, NumHDonors,
// NumHAcceptors, QED, contrib SA score).
TEST(ChemCore, DescriptorsMatchReferenceToolkit) {
  const DescriptorCase cases[] = {
      {"CCO", 46.069, 1, 1, 0.40680796565539457, 1.9802570386349831},
      {"c1ccccc1", 78.11399999999999, 0, 0, 0.4426283718993647, 1.0},
      {"CC(=O)Oc1ccccc1C(=O)O", 180.15899999999996, 1, 3, 0.5501217966938848,
       1.580039750008826},
      {"CC(C)Cc1ccc(C(C)C(=O)O)cc1", 206.28499999999997, 1, 1,
       0.8215995486924976, 2.1917554204925054},
      {"Cn1c(=O)c2c(ncn2C)n(C)c1=O", 194.194, 0, 3, 0.5384628262372215,
       2.29798245679401},
  };
  NativeEngine e;
  for (const auto &c: cases) {
    Molecule m = parse_molecule(c.smiles, e);
    const DescriptorSet &d = compute_descriptors(m, e);
    EXPECT_NEAR(d.mw, c.mw, 1e-6) << c.smiles;
    EXPECT_EQ(d.hbd, c.hbd) << c.smiles;
    EXPECT_EQ(d.hba, c.hba) << c.smiles;
    EXPECT_NEAR(d.qed, c.qed, 1e-9) << c.smiles;
    EXPECT_NEAR(d.sa, c.sa, 1e-6) << c.smiles;
  }
}

TEST(ChemCore, DescriptorsAreMemoized) {
  NativeEngine e;
  Molecule m = parse_molecule("CCO", e);
  EXPECT_FALSE(m.descriptors().has_value());
  const DescriptorSet &first = compute_descriptors(m, e);
  ASSERT_TRUE(m.descriptors().has_value());
  EXPECT_EQ(&first, &compute_descriptors(m, e));
}

TEST(ChemCore, Lipinski) {
  EXPECT_TRUE(lipinski_report({499.9, 5, 10, 0.5, 2}).all());
  const LipinskiReport r = lipinski_report({500, 6, 11, 0.5, 2});
  EXPECT_FALSE(r.mw_ok);
  EXPECT_FALSE(r.hbd_ok);
  EXPECT_FALSE(r.hba_ok);
}

TEST(ChemCore, ApplyReactionHydrogenToFluorine) {
  NativeEngine e;
  const auto products =
      e.apply_reaction("[*:1][H]>>[*:1][F]", parse_molecule("c1ccccc1", e).smiles());
  ASSERT_EQ(products.size(), 1u);
  EXPECT_EQ(products[0], parse_molecule("Fc1ccccc1", e).smiles());
}

TEST(ChemCore, ApplyReactionDeduplicatesSymmetricSites) {
  NativeEngine e;
  const auto products =
      e.apply_reaction("[c:1][H]>>[c:1]C", parse_molecule("Cc1ccccc1", e).smiles());
  // ortho, meta, para
  EXPECT_EQ(products.size(), 3u);
  EXPECT_THROW(e.apply_reaction("[c:1]>", "CCO"), ParseError);
}

TEST(ChemCore, CloneIsIndependent) {
  NativeEngine e;
  auto c = e.clone();
  EXPECT_EQ(c->engine_id(), e.engine_id());
  EXPECT_EQ(c->canonicalize("OCC").canonical, "CCO");
}

}  // namespace
}  // namespace rxngrow

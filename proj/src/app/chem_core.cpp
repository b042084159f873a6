//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem_core.h"

#include <algorithm>
#include <unordered_map>

#include "rxngrow/chem/descriptors.h"
#include "rxngrow/chem/fragment.h"
#include "rxngrow/chem/reaction.h"
#include "rxngrow/chem/sa_score.h"
#include "rxngrow/chem/smiles.h"
#include "rxngrow/errors.h"

namespace rxngrow {

LipinskiReport lipinski_report(const DescriptorSet &d) {
  return {d.mw < 500.0, d.hbd <= 5, d.hba <= 10};
}

struct NativeEngine::Impl {
  std::unordered_map<std::string, DescriptorSet> descriptor_memo;
  std::unordered_map<std::string, chem::Reaction> reactions;

  const chem::Reaction &reaction(const std::string &smarts) {
    auto it = reactions.find(smarts);
    if (it == reactions.end())
      it = reactions.emplace(smarts, chem::Reaction::parse(smarts)).first;
    return it->second;
  }
};

NativeEngine::NativeEngine(): impl_(std::make_unique<Impl>()) {}
NativeEngine::~NativeEngine() = default;

const std::string &NativeEngine::engine_id() const {
  static const std::string kId = "rxngrow-native/1";
  return kId;
}

std::set<Capability> NativeEngine::capabilities() const {
  return {Capability::kParse, Capability::kCanonicalize,
          Capability::kDescriptors, Capability::kFragment,
          Capability::kApplyReaction};
}

std::unique_ptr<ChemEngine> NativeEngine::clone() const {
  return std::make_unique<NativeEngine>();
}

ParsedSmiles NativeEngine::canonicalize(std::string_view raw) {
  if (raw.empty())
    throw ParseError("empty SMILES");
  const chem::Mol mol = chem::parse_smiles(raw);
  ParsedSmiles out;
  out.canonical = chem::write_smiles(mol);
  out.heavy_atom_count = mol.num_heavy_atoms();
  if (out.heavy_atom_count < 1)
    throw ParseError("no heavy atoms: " + std::string(raw));
  return out;
}

DescriptorSet NativeEngine::descriptors(const std::string &canonical) {
  auto it = impl_->descriptor_memo.find(canonical);
  if (it != impl_->descriptor_memo.end())
    return it->second;
  DescriptorSet d;
  try {
    const chem::Mol mol = chem::parse_smiles(canonical);
    const chem::QedProperties props = chem::qed_properties(mol);
    d.mw = props.mw;
    d.hbd = chem::num_hbd(mol);
    d.hba = chem::num_hba(mol);
    d.qed = chem::qed(props);
    d.sa = chem::SaScorer::shared().score(mol);
  } catch (const ParseError &e) {
    throw EngineError(std::string("descriptors failed: ") + e.what());
  }
  impl_->descriptor_memo.emplace(canonical, d);
  return d;
}

std::vector<std::string> NativeEngine::fragment(const std::string &canonical) {
  const chem::Mol mol = chem::parse_smiles(canonical);
  std::set<std::string> leaves = chem::brics_leaves(mol);
  leaves.merge(chem::recap_leaves(mol));
  std::set<std::string> capped;
  for (const std::string &leaf: leaves) {
    try {
      const chem::Mol frag = chem::cap_dummies(chem::parse_smiles(leaf));
      // Round trip so the text is the canonical form of a fresh parse.
      capped.insert(chem::write_smiles(
          chem::parse_smiles(chem::write_smiles(frag))));
    } catch (const ParseError &) {
      // A leaf whose capped form does not sanitize is not a usable seed.
    }
  }
  return {capped.begin(), capped.end()};
}

std::vector<std::string> NativeEngine::apply_reaction(
    const std::string &reaction_smarts, const std::string &canonical) {
  const chem::Reaction &rxn = impl_->reaction(reaction_smarts);
  if (rxn.num_products() != 1)
    return {};
  const chem::Mol mol = chem::parse_smiles(canonical);
  chem::ReactionOptions opts;
  opts.strict_attachment = true;
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto &products: rxn.run(mol, opts)) {
    try {
      std::string smi = chem::write_smiles(
          chem::parse_smiles(chem::write_smiles(products.front())));
      if (seen.insert(smi).second)
        out.push_back(std::move(smi));
    } catch (const ParseError &) {
    }
  }
  return out;
}

Molecule parse_molecule(std::string_view raw, ChemEngine &engine) {
  ParsedSmiles p = engine.canonicalize(raw);
  Molecule m;
  m.smiles_ = std::move(p.canonical);
  m.heavy_atom_count_ = p.heavy_atom_count;
  return m;
}

const DescriptorSet &compute_descriptors(Molecule &m, ChemEngine &engine) {
  if (!m.descriptors_)
    m.descriptors_ = engine.descriptors(m.smiles_);
  return *m.descriptors_;
}

}  // namespace rxngrow

//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_CORE_H_
#define RXNGROW_CHEM_CORE_H_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rxngrow {

struct DescriptorSet {
  double mw = 0;  // Da
  int hbd = 0;
  int hba = 0;
  double qed = 0;  // [0, 1]
  double sa = 1;   // [1, 10]

  bool operator==(const DescriptorSet &) const = default;
};

struct LipinskiReport {
  bool mw_ok = false;   // mw < 500
  bool hbd_ok = false;  // hbd <= 5
  bool hba_ok = false;  // hba <= 10

  bool all() const { return mw_ok && hbd_ok && hba_ok; }
};

LipinskiReport lipinski_report(const DescriptorSet &d);

enum class Capability {
  kParse,
  kCanonicalize,
  kDescriptors,
  kFragment,
  kApplyReaction,
  kEmbed3d,
};

struct ParsedSmiles {
  std::string canonical;
  int heavy_atom_count = 0;
};

// Boundary around the cheminformatics toolkit. Everything crosses it as
// SMILES text so another engine can stand in. Instances are not thread
// safe; give each worker its own via clone().
class ChemEngine {
public:
  virtual ~ChemEngine() = default;

  // Stable for the lifetime of a run; part of cache keys.
  virtual const std::string &engine_id() const = 0;
  virtual std::set<Capability> capabilities() const = 0;
  virtual std::unique_ptr<ChemEngine> clone() const = 0;

  // Throws ParseError for unparseable or unsanitizable input.
  virtual ParsedSmiles canonicalize(std::string_view raw) = 0;
  // Input is canonical. Throws EngineError.
  virtual DescriptorSet descriptors(const std::string &canonical) = 0;
  // Retro-fragmentation leaves (BRICS and RECAP) with attachment points
  // capped by hydrogen, canonical and deduplicated, sorted.
  virtual std::vector<std::string> fragment(const std::string &canonical) = 0;
  // Distinct canonical products of a single-product template over every
  // match, in match order. Products that fail sanitization are dropped.
  // Throws ParseError for a malformed template.
  virtual std::vector<std::string> apply_reaction(
      const std::string &reaction_smarts, const std::string &canonical) = 0;
};

// In-repo engine (rxngrow::chem).
class NativeEngine: public ChemEngine {
public:
  NativeEngine();
  ~NativeEngine() override;

  const std::string &engine_id() const override;
  std::set<Capability> capabilities() const override;
  std::unique_ptr<ChemEngine> clone() const override;

  ParsedSmiles canonicalize(std::string_view raw) override;
  DescriptorSet descriptors(const std::string &canonical) override;
  std::vector<std::string> fragment(const std::string &canonical) override;
  std::vector<std::string> apply_reaction(
      const std::string &reaction_smarts,
      const std::string &canonical) override;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Canonical molecule. Only parse_molecule() creates one, so every instance
// has passed sanitization.
class Molecule {
public:
  const std::string &smiles() const { return smiles_; }
  int heavy_atom_count() const { return heavy_atom_count_; }
  const std::optional<DescriptorSet> &descriptors() const {
    return descriptors_;
  }

  bool operator==(const Molecule &o) const { return smiles_ == o.smiles_; }
  auto operator<=>(const Molecule &o) const { return smiles_ <=> o.smiles_; }

private:
  friend Molecule parse_molecule(std::string_view raw, ChemEngine &engine);
  friend const DescriptorSet &compute_descriptors(Molecule &m,
                                                  ChemEngine &engine);
  Molecule() = default;

  std::string smiles_;
  int heavy_atom_count_ = 0;
  std::optional<DescriptorSet> descriptors_;
};

// Throws ParseError for empty, unparseable or hydrogen-only input.
Molecule parse_molecule(std::string_view raw, ChemEngine &engine);

// Memoized on the molecule. Throws EngineError.
const DescriptorSet &compute_descriptors(Molecule &m, ChemEngine &engine);

}  // namespace rxngrow

#endif  // RXNGROW_CHEM_CORE_H_

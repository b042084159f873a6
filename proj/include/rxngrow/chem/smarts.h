//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_SMARTS_H_
#define RXNGROW_CHEM_SMARTS_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rxngrow/chem/mol.h"

namespace rxngrow::chem {

class SmartsPattern;

struct AtomExpr {
  enum class Op {
    kTrue,
    kNot,
    kAnd,
    kOr,
    kElement,     // value = atomic number, flag = aromatic (0/1), -1 any
    kAromatic,    // value 1 = aromatic, 0 = aliphatic
    kDegree,      // D
    kTotalH,      // H
    kImplicitH,   // h; value -1 means "at least one"
    kRingCount,   // R; value -1 means "in any ring"
    kRingSize,    // r; value -1 means "in any ring"
    kValence,     // v
    kConnect,     // X
    kRingBonds,   // x; value -1 means "at least one"
    kCharge,
    kIsotope,
    kRecursive,
  };
  Op op = Op::kTrue;
  int value = 0;
  int flag = -1;
  std::vector<AtomExpr> children;
  std::shared_ptr<const SmartsPattern> recursive;
};

struct BondExpr {
  enum class Op {
    kDefault,  // single or aromatic
    kAny,
    kNot,
    kAnd,
    kOr,
    kSingle,
    kDouble,
    kTriple,
    kAromatic,
    kRing,
  };
  Op op = Op::kDefault;
  std::vector<BondExpr> children;
};

struct QueryAtom {
  AtomExpr expr;
  int map_num = 0;
  // Set when the expression pins a single element, e.g. "C", "[N+]", "[#7]".
  std::optional<int> element;
  std::optional<int> charge;
  std::optional<int> isotope;
  std::optional<int> h_count;
  std::optional<bool> aromatic;
  bool is_hydrogen = false;  // "[H]" style hydrogen atom
};

struct QueryBond {
  int begin;
  int end;
  BondExpr expr;
  // Concrete type when the expression is one of - = # : or unspecified.
  std::optional<BondType> simple;
};

class MatchContext;

class SmartsPattern {
public:
  // Throws ParseError.
  static std::shared_ptr<const SmartsPattern> parse(std::string_view smarts);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  const QueryAtom &atom(int i) const { return atoms_[i]; }
  const QueryBond &bond(int i) const { return bonds_[i]; }
  int bond_between(int a, int b) const;
  const std::string &text() const { return text_; }
  bool has_hydrogen_atoms() const;

  // All embeddings (query atom -> target atom). With unique set, embeddings
  // covering the same target atom set are reported once.
  std::vector<std::vector<int>> match(const Mol &mol, bool unique = true,
                                      size_t max_matches = 0) const;
  bool has_match(const Mol &mol) const;
  int count_matches(const Mol &mol) const;

  // Recursive patterns use this to test one anchored atom.
  bool match_anchored(const Mol &mol, int atom, MatchContext &ctx) const;
  void match_impl(const Mol &mol, MatchContext &ctx, bool unique,
                  size_t max_matches, int anchor,
                  std::vector<std::vector<int>> &out) const;

private:
  friend class SmartsParser;

  std::string text_;
  std::vector<QueryAtom> atoms_;
  std::vector<QueryBond> bonds_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // (atom, bond)
};

// Per-molecule cache of recursive-pattern results.
class MatchContext {
public:
  std::unordered_map<const SmartsPattern *, std::vector<signed char>> memo;
};

bool atom_matches(const AtomExpr &e, const Mol &mol, int atom,
                  MatchContext &ctx);
bool bond_matches(const BondExpr &e, const Mol &mol, int bond);

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_SMARTS_H_

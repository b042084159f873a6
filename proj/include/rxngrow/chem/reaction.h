//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_REACTION_H_
#define RXNGROW_CHEM_REACTION_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rxngrow/chem/mol.h"
#include "rxngrow/chem/smarts.h"

namespace rxngrow::chem {

struct ReactionOptions {
  // Reject a match when a matched atom that the products drop still has a
  // neighbor outside the match. Keeps a replacement from silently cutting
  // away the rest of the molecule.
  bool strict_attachment = false;
  // Reject products that fall apart into several components.
  bool allow_disconnected = false;
  // Stop after this many matches (0 = no limit).
  size_t max_matches = 1000;
};

// A single-reactant reaction "LHS>>RHS". Atom map numbers pair reactant and
// product atoms; the right-hand side may list several products separated by
// dots.
//
// Application follows the usual template semantics: mapped atoms are carried
// into the product (element, charge and hydrogen count overridden when the
// product atom states them), matched atoms without a map number are deleted,
// unmatched atoms reachable from mapped atoms come along unchanged, and
// bonds between mapped atoms are taken from the product side.
class Reaction {
public:
  // Throws ParseError.
  static Reaction parse(std::string_view smarts);

  const std::string &text() const { return text_; }
  const SmartsPattern &reactant() const { return *lhs_; }
  int num_products() const { return static_cast<int>(rhs_.size()); }

  // One entry per accepted match; each holds num_products() sanitized
  // molecules. Matches whose products fail sanitization are skipped.
  std::vector<std::vector<Mol>> run(const Mol &mol,
                                    const ReactionOptions &opts = {}) const;

private:
  bool build(const Mol &mol, const std::vector<int> &match,
             const ReactionOptions &opts, std::vector<Mol> &out) const;

  std::string text_;
  std::shared_ptr<const SmartsPattern> lhs_;
  std::vector<std::shared_ptr<const SmartsPattern>> rhs_;
  bool explicit_h_ = false;
};

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_REACTION_H_

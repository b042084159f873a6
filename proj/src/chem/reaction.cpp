//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem/reaction.h"

#include <map>
#include <set>

#include "rxngrow/chem/smiles.h"
#include "rxngrow/errors.h"

namespace rxngrow::chem {
namespace {

// Splits at '.' outside brackets and recursive groups.
std::vector<std::string_view> split_components(std::string_view s) {
  std::vector<std::string_view> out;
  int bracket = 0;
  int paren = 0;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '[')
      ++bracket;
    else if (c == ']')
      --bracket;
    else if (c == '(')
      ++paren;
    else if (c == ')')
      --paren;
    else if (c == '.' && bracket == 0 && paren == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

}  // namespace

Reaction Reaction::parse(std::string_view smarts) {
  const size_t sep = smarts.find(">>");
  if (sep == std::string_view::npos
      || smarts.find(">>", sep + 2) != std::string_view::npos)
    throw ParseError("reaction SMARTS needs exactly one '>>': "
                     + std::string(smarts));
  Reaction r;
  r.text_ = std::string(smarts);
  const std::string_view lhs = smarts.substr(0, sep);
  const std::string_view rhs = smarts.substr(sep + 2);
  if (lhs.empty() || rhs.empty())
    throw ParseError("empty side in reaction SMARTS: " + std::string(smarts));
  r.lhs_ = SmartsPattern::parse(lhs);
  for (std::string_view part: split_components(rhs))
    r.rhs_.push_back(SmartsPattern::parse(part));
  r.explicit_h_ = r.lhs_->has_hydrogen_atoms();
  return r;
}

std::vector<std::vector<Mol>> Reaction::run(const Mol &input,
                                            const ReactionOptions &opts) const {
  std::vector<std::vector<Mol>> out;
  const Mol *target = &input;
  Mol unfolded;
  if (explicit_h_) {
    unfolded = input;
    unfold_hydrogens(unfolded);
    unfolded.set_rings(find_sssr(unfolded));
    target = &unfolded;
  }
  const auto matches = lhs_->match(*target, false, opts.max_matches);
  for (const auto &m: matches) {
    std::vector<Mol> products;
    if (build(*target, m, opts, products))
      out.push_back(std::move(products));
  }
  return out;
}

bool Reaction::build(const Mol &mol, const std::vector<int> &match,
                     const ReactionOptions &opts, std::vector<Mol> &out) const {
  const int n = mol.num_atoms();
  std::map<int, int> by_map;  // map number -> reactant atom
  std::vector<char> in_match(n, 0);
  for (size_t q = 0; q < match.size(); ++q) {
    in_match[match[q]] = 1;
    const int map = lhs_->atom(static_cast<int>(q)).map_num;
    if (map > 0)
      by_map[map] = match[q];
  }
  std::set<int> product_maps;
  for (const auto &p: rhs_)
    for (int t = 0; t < p->num_atoms(); ++t)
      if (p->atom(t).map_num > 0)
        product_maps.insert(p->atom(t).map_num);
  std::vector<char> kept(n, 0);
  for (const auto &[map, atom]: by_map)
    if (product_maps.count(map))
      kept[atom] = 1;

  if (opts.strict_attachment) {
    for (int a: match) {
      if (kept[a])
        continue;
      for (const auto &nb: mol.neighbors(a)) {
        // Explicit hydrogens leave together with the atom they sit on.
        if (!in_match[nb.atom] && mol.atom(nb.atom).atomic_num != 1)
          return false;
      }
    }
  }

  for (const auto &p: rhs_) {
    Mol prod;
    std::vector<int> r2p(n, -1);
    std::vector<int> t2p(p->num_atoms(), -1);
    std::vector<int> t2r(p->num_atoms(), -1);
    for (int t = 0; t < p->num_atoms(); ++t) {
      const QueryAtom &qa = p->atom(t);
      auto it = qa.map_num > 0 ? by_map.find(qa.map_num) : by_map.end();
      Atom a;
      if (it != by_map.end()) {
        const int r = it->second;
        a = mol.atom(r);
        if (qa.element && *qa.element != a.atomic_num) {
          a.atomic_num = *qa.element;
          a.aromatic = qa.aromatic.value_or(false);
        }
        t2r[t] = r;
      } else {
        a.atomic_num = qa.element.value_or(0);
        a.aromatic = qa.aromatic.value_or(false);
      }
      if (qa.charge)
        a.charge = *qa.charge;
      if (qa.isotope)
        a.isotope = *qa.isotope;
      if (qa.h_count) {
        a.explicit_h = *qa.h_count;
        a.implicit_h = 0;
        a.no_implicit = true;
      }
      const int idx = prod.add_atom(a);
      t2p[t] = idx;
      if (t2r[t] >= 0)
        r2p[t2r[t]] = idx;
    }
    for (int b = 0; b < p->num_bonds(); ++b) {
      const QueryBond &qb = p->bond(b);
      const int ra = t2r[qb.begin];
      const int rb = t2r[qb.end];
      const int existing = ra >= 0 && rb >= 0 ? mol.bond_between(ra, rb) : -1;
      BondType type = BondType::kSingle;
      int order = 1;
      if (qb.simple) {
        type = *qb.simple;
        order = type == BondType::kAromatic ? 0 : static_cast<int>(type);
      } else if (existing >= 0) {
        type = mol.bond(existing).type;
        order = mol.bond(existing).order;
      }
      if (prod.bond_between(t2p[qb.begin], t2p[qb.end]) < 0)
        prod.add_bond(t2p[qb.begin], t2p[qb.end], type, order);
    }
    // Carry unmatched atoms reachable from the mapped ones.
    std::vector<int> stack;
    for (int t = 0; t < p->num_atoms(); ++t)
      if (t2r[t] >= 0)
        stack.push_back(t2r[t]);
    while (!stack.empty()) {
      const int r = stack.back();
      stack.pop_back();
      for (const auto &nb: mol.neighbors(r)) {
        if (in_match[nb.atom] || r2p[nb.atom] >= 0)
          continue;
        r2p[nb.atom] = prod.add_atom(mol.atom(nb.atom));
        stack.push_back(nb.atom);
      }
    }
    for (int b = 0; b < mol.num_bonds(); ++b) {
      const Bond &bond = mol.bond(b);
      const int pa = r2p[bond.begin];
      const int pb = r2p[bond.end];
      if (pa < 0 || pb < 0)
        continue;
      if (in_match[bond.begin] && in_match[bond.end])
        continue;  // decided by the product template
      if (prod.bond_between(pa, pb) < 0)
        prod.add_bond(pa, pb, bond.type, bond.order);
    }
    for (int b = 0; b < prod.num_bonds(); ++b) {
      if (prod.bond(b).type == BondType::kAromatic) {
        prod.atom(prod.bond(b).begin).aromatic = true;
        prod.atom(prod.bond(b).end).aromatic = true;
      }
    }
    if (explicit_h_)
      fold_hydrogens(prod);
    try {
      sanitize(prod);
    } catch (const ParseError &) {
      return false;
    }
    if (!opts.allow_disconnected && prod.components().size() > 1)
      return false;
    out.push_back(std::move(prod));
  }
  return true;
}

}  // namespace rxngrow::chem

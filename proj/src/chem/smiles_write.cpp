//
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "rxngrow/chem/elements.h"
#include "rxngrow/chem/smiles.h"

namespace rxngrow::chem {
namespace {

int bond_code(const Bond &b) {
  return static_cast<int>(b.type);
}

// Dense ranks of arbitrary comparable keys.
template <class Key>
int dense_rank(const std::vector<Key> &keys, std::vector<int> &out) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  out.assign(n, 0);
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[order[i - 1]] < keys[order[i]])
      ++rank;
    out[order[i]] = rank;
  }
  return n == 0 ? 0 : rank + 1;
}

int refine(const Mol &mol, std::vector<int> &ranks) {
  const int n = mol.num_atoms();
  int classes = 0;
  {
    std::vector<int> tmp;
    classes = dense_rank(ranks, tmp);
    ranks = tmp;
  }
  while (true) {
    std::vector<std::pair<int, std::vector<int>>> keys(n);
    for (int i = 0; i < n; ++i) {
      keys[i].first = ranks[i];
      auto &nb = keys[i].second;
      for (const auto &x: mol.neighbors(i))
        nb.push_back(ranks[x.atom] * 16 + bond_code(mol.bond(x.bond)));
      std::sort(nb.begin(), nb.end());
    }
    std::vector<int> next;
    const int c = dense_rank(keys, next);
    ranks = next;
    if (c == classes)
      return c;
    classes = c;
  }
}

}  // namespace

namespace {

std::vector<int> initial_ranks(const Mol &mol) {
  const int n = mol.num_atoms();
  using Inv = std::tuple<int, int, int, int, int, int, int, int, int>;
  std::vector<Inv> inv(n);
  const RingInfo &rings = mol.rings();
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    // Membership counts depend on which ring basis was picked; use the flag.
    const int in_ring =
      rings.atom_membership.empty() ? 0 : rings.atom_in_ring(i) ? 1 : 0;
    inv[i] = Inv(mol.degree(i), a.atomic_num, a.isotope, a.charge,
                 a.total_h(), a.aromatic ? 1 : 0, in_ring, a.map_num,
                 mol.bond_valence(i));
  }
  std::vector<int> ranks;
  dense_rank(inv, ranks);
  return ranks;
}

}  // namespace

std::vector<int> symmetry_classes(const Mol &mol) {
  std::vector<int> ranks = initial_ranks(mol);
  refine(mol, ranks);
  return ranks;
}

std::vector<int> canonical_ranks(const Mol &mol) {
  const int n = mol.num_atoms();
  std::vector<int> ranks = initial_ranks(mol);
  int classes = refine(mol, ranks);
  while (classes < n) {
    // Break the lowest tied class by promoting its first atom.
    std::vector<int> count(n, 0);
    for (int r: ranks)
      ++count[r];
    int tied = -1;
    for (int r = 0; r < n; ++r)
      if (count[r] > 1) {
        tied = r;
        break;
      }
    int pick = -1;
    for (int i = 0; i < n; ++i)
      if (ranks[i] == tied) {
        pick = i;
        break;
      }
    for (int i = 0; i < n; ++i)
      ranks[i] = ranks[i] * 2 + (i == pick ? 0 : 1);
    classes = refine(mol, ranks);
  }
  return ranks;
}

namespace {

std::string atom_token(const Mol &mol, int i) {
  const Atom &a = mol.atom(i);
  std::string sym;
  if (a.atomic_num == 0) {
    sym = "*";
  } else {
    sym = std::string(element(a.atomic_num).symbol);
    if (a.aromatic)
      sym[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0])));
  }
  const int bare = bare_hydrogen_count(mol, i);
  if (bare >= 0 && bare == a.total_h())
    return sym;
  std::string out = "[";
  if (a.isotope > 0)
    out += std::to_string(a.isotope);
  out += sym;
  const int h = a.total_h();
  if (h > 0) {
    out += 'H';
    if (h > 1)
      out += std::to_string(h);
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    const int mag = std::abs(a.charge);
    if (mag > 1)
      out += std::to_string(mag);
  }
  if (a.map_num > 0)
    out += ":" + std::to_string(a.map_num);
  out += "]";
  return out;
}

std::string bond_token(const Mol &mol, int b) {
  const Bond &bond = mol.bond(b);
  switch (bond.type) {
  case BondType::kDouble:
    return "=";
  case BondType::kTriple:
    return "#";
  case BondType::kAromatic:
    return "";
  case BondType::kSingle:
    return mol.atom(bond.begin).aromatic && mol.atom(bond.end).aromatic ? "-"
                                                                         : "";
  }
  return "";
}

class Writer {
public:
  Writer(const Mol &mol): mol_(mol), ranks_(canonical_ranks(mol)) { }

  std::string run() {
    const int n = mol_.num_atoms();
    visited_.assign(n, 0);
    bond_used_.assign(mol_.num_bonds(), 0);
    children_.assign(n, {});
    openings_.assign(n, {});
    closings_.assign(n, {});
    std::vector<int> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(),
              [&](int a, int b) { return ranks_[a] < ranks_[b]; });
    std::vector<int> roots;
    for (int a: by_rank) {
      if (visited_[a])
        continue;
      roots.push_back(a);
      plan(a, -1);
    }
    std::string out;
    for (size_t r = 0; r < roots.size(); ++r) {
      if (r > 0)
        out += '.';
      emit(roots[r], out);
    }
    return out;
  }

private:
  struct Closure {
    int partner;
    int bond;
  };

  std::vector<Neighbor> sorted_neighbors(int a) const {
    std::vector<Neighbor> nbs(mol_.neighbors(a).begin(),
                              mol_.neighbors(a).end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor &x, const Neighbor &y) {
      return ranks_[x.atom] < ranks_[y.atom];
    });
    return nbs;
  }

  void plan(int a, int from_bond) {
    visited_[a] = 1;
    for (const auto &nb: sorted_neighbors(a)) {
      if (nb.bond == from_bond || bond_used_[nb.bond])
        continue;
      bond_used_[nb.bond] = 1;
      if (visited_[nb.atom]) {
        openings_[nb.atom].push_back({ a, nb.bond });
        closings_[a].push_back({ nb.atom, nb.bond });
      } else {
        children_[a].push_back(nb);
        plan(nb.atom, nb.bond);
      }
    }
  }

  void emit(int a, std::string &out) {
    out += atom_token(mol_, a);
    // Closings first, in the order their digits were opened.
    auto &cl = closings_[a];
    std::sort(cl.begin(), cl.end(), [&](const Closure &x, const Closure &y) {
      return digit_of_[x.bond] < digit_of_[y.bond];
    });
    for (const auto &c: cl) {
      const int d = digit_of_[c.bond];
      out += digit_text(d);
      free_digits_.push_back(d);
    }
    auto &op = openings_[a];
    std::sort(op.begin(), op.end(), [&](const Closure &x, const Closure &y) {
      return ranks_[x.partner] < ranks_[y.partner];
    });
    for (const auto &o: op) {
      const int d = take_digit();
      digit_of_[o.bond] = d;
      out += bond_token(mol_, o.bond);
      out += digit_text(d);
    }
    const auto &ch = children_[a];
    for (size_t k = 0; k < ch.size(); ++k) {
      const bool branch = k + 1 < ch.size();
      if (branch)
        out += '(';
      out += bond_token(mol_, ch[k].bond);
      emit(ch[k].atom, out);
      if (branch)
        out += ')';
    }
  }

  int take_digit() {
    if (!free_digits_.empty()) {
      auto it = std::min_element(free_digits_.begin(), free_digits_.end());
      const int d = *it;
      free_digits_.erase(it);
      return d;
    }
    return ++max_digit_;
  }

  static std::string digit_text(int d) {
    if (d < 10)
      return std::to_string(d);
    return "%" + std::to_string(d);
  }

  const Mol &mol_;
  std::vector<int> ranks_;
  std::vector<char> visited_;
  std::vector<char> bond_used_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<Closure>> openings_;
  std::vector<std::vector<Closure>> closings_;
  std::map<int, int> digit_of_;
  std::vector<int> free_digits_;
  int max_digit_ = 0;
};

}  // namespace

std::string write_smiles(const Mol &mol) {
  return Writer(mol).run();
}

}  // namespace rxngrow::chem

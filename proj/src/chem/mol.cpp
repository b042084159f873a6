//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem/mol.h"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>

namespace rxngrow::chem {

bool RingInfo::atom_in_ring_of_size(int a, int size) const {
  for (const auto &ring: atom_rings) {
    if (static_cast<int>(ring.size()) == size
        && std::find(ring.begin(), ring.end(), a) != ring.end())
      return true;
  }
  return false;
}

int RingInfo::smallest_ring_containing(int a) const {
  int best = 0;
  for (const auto &ring: atom_rings) {
    const int n = static_cast<int>(ring.size());
    if ((best == 0 || n < best)
        && std::find(ring.begin(), ring.end(), a) != ring.end())
      best = n;
  }
  return best;
}

int Mol::add_atom(const Atom &atom) {
  atoms_.push_back(atom);
  adj_.emplace_back();
  return num_atoms() - 1;
}

int Mol::add_bond(int a, int b, BondType type, int order) {
  Bond bond;
  bond.begin = a;
  bond.end = b;
  bond.type = type;
  if (order == 0)
    order = type == BondType::kAromatic ? 1 : static_cast<int>(type);
  bond.order = order;
  bonds_.push_back(bond);
  const int idx = num_bonds() - 1;
  adj_[a].push_back({ b, idx });
  adj_[b].push_back({ a, idx });
  return idx;
}

int Mol::bond_between(int a, int b) const {
  for (const auto &nb: adj_[a])
    if (nb.atom == b)
      return nb.bond;
  return -1;
}

int Mol::bond_valence(int a) const {
  int v = 0;
  for (const auto &nb: adj_[a])
    v += bonds_[nb.bond].order;
  return v;
}

int Mol::heavy_degree(int a) const {
  int d = 0;
  for (const auto &nb: adj_[a])
    if (atoms_[nb.atom].atomic_num != 1)
      ++d;
  return d;
}

int Mol::num_heavy_atoms() const {
  int n = 0;
  for (const auto &a: atoms_)
    if (a.atomic_num > 1)
      ++n;
  return n;
}

std::vector<int> Mol::remove_atoms(const std::vector<bool> &kill) {
  std::vector<int> remap(atoms_.size(), -1);
  std::vector<Atom> atoms;
  for (int i = 0; i < num_atoms(); ++i) {
    if (kill[i])
      continue;
    remap[i] = static_cast<int>(atoms.size());
    atoms.push_back(atoms_[i]);
  }
  std::vector<Bond> bonds = std::move(bonds_);
  atoms_ = std::move(atoms);
  bonds_.clear();
  adj_.assign(atoms_.size(), {});
  for (const auto &b: bonds) {
    if (remap[b.begin] < 0 || remap[b.end] < 0)
      continue;
    add_bond(remap[b.begin], remap[b.end], b.type, b.order);
  }
  rings_ = RingInfo();
  return remap;
}

std::vector<std::vector<int>> Mol::components() const {
  std::vector<int> seen(atoms_.size(), 0);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < num_atoms(); ++i) {
    if (seen[i])
      continue;
    std::vector<int> comp;
    std::vector<int> stack { i };
    seen[i] = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      comp.push_back(a);
      for (const auto &nb: adj_[a]) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = 1;
          stack.push_back(nb.atom);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

namespace {

using BitRow = std::vector<std::uint64_t>;

int lowest_bit(const BitRow &row) {
  for (size_t w = 0; w < row.size(); ++w) {
    if (row[w] != 0)
      return static_cast<int>(w * 64 + __builtin_ctzll(row[w]));
  }
  return -1;
}

struct Candidate {
  std::vector<int> atoms;
  std::vector<int> bonds;
  std::vector<int> sorted_bonds;
};

}  // namespace

RingInfo find_sssr(const Mol &mol) {
  RingInfo info;
  const int n = mol.num_atoms();
  const int m = mol.num_bonds();
  info.atom_membership.assign(n, 0);
  info.bond_membership.assign(m, 0);

  const int num_rings = m - n + static_cast<int>(mol.components().size());
  if (num_rings <= 0)
    return info;

  // Horton candidates: for every root and every edge, the cycle formed by the
  // two shortest-path-tree branches plus the edge.
  std::vector<Candidate> candidates;
  std::set<std::vector<int>> seen;
  std::vector<int> dist(n), parent(n), parent_bond(n);
  for (int root = 0; root < n; ++root) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(parent_bond.begin(), parent_bond.end(), -1);
    std::queue<int> q;
    q.push(root);
    dist[root] = 0;
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (const auto &nb: mol.neighbors(a)) {
        if (dist[nb.atom] < 0) {
          dist[nb.atom] = dist[a] + 1;
          parent[nb.atom] = a;
          parent_bond[nb.atom] = nb.bond;
          q.push(nb.atom);
        }
      }
    }
    auto path_to_root = [&](int a) {
      std::vector<int> p;
      for (int x = a; x != -1; x = parent[x])
        p.push_back(x);
      return p;
    };
    for (int b = 0; b < m; ++b) {
      const int x = mol.bond(b).begin;
      const int y = mol.bond(b).end;
      if (dist[x] < 0 || dist[y] < 0)
        continue;
      if (parent_bond[x] == b || parent_bond[y] == b)
        continue;
      std::vector<int> px = path_to_root(x);
      std::vector<int> py = path_to_root(y);
      // The two branches may only share the root.
      std::vector<int> sx(px.begin(), px.end() - 1);
      std::vector<int> sy(py.begin(), py.end() - 1);
      std::sort(sx.begin(), sx.end());
      std::sort(sy.begin(), sy.end());
      std::vector<int> common;
      std::set_intersection(sx.begin(), sx.end(), sy.begin(), sy.end(),
                            std::back_inserter(common));
      if (!common.empty())
        continue;
      Candidate c;
      // root ... x, then y ... (excluding root)
      for (auto it = px.rbegin(); it != px.rend(); ++it)
        c.atoms.push_back(*it);
      for (size_t i = 0; i + 1 < py.size(); ++i)
        c.atoms.push_back(py[i]);
      const int len = static_cast<int>(c.atoms.size());
      for (int i = 0; i < len; ++i)
        c.bonds.push_back(mol.bond_between(c.atoms[i], c.atoms[(i + 1) % len]));
      c.sorted_bonds = c.bonds;
      std::sort(c.sorted_bonds.begin(), c.sorted_bonds.end());
      if (seen.insert(c.sorted_bonds).second)
        candidates.push_back(std::move(c));
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate &a, const Candidate &b) {
              if (a.bonds.size() != b.bonds.size())
                return a.bonds.size() < b.bonds.size();
              return a.sorted_bonds < b.sorted_bonds;
            });

  const size_t words = (m + 63) / 64;
  std::vector<BitRow> basis;  // each row's pivot is its lowest set bit
  std::vector<int> pivot_row(m, -1);
  for (const auto &c: candidates) {
    BitRow row(words, 0);
    for (int b: c.bonds)
      row[b / 64] |= std::uint64_t { 1 } << (b % 64);
    for (int p = lowest_bit(row); p >= 0 && pivot_row[p] >= 0;
         p = lowest_bit(row)) {
      const BitRow &r = basis[pivot_row[p]];
      for (size_t w = 0; w < words; ++w)
        row[w] ^= r[w];
    }
    const int p = lowest_bit(row);
    if (p < 0)
      continue;
    pivot_row[p] = static_cast<int>(basis.size());
    basis.push_back(std::move(row));
    info.atom_rings.push_back(c.atoms);
    info.bond_rings.push_back(c.bonds);
    if (static_cast<int>(info.atom_rings.size()) == num_rings)
      break;
  }
  for (const auto &r: info.atom_rings)
    for (int a: r)
      ++info.atom_membership[a];
  for (const auto &r: info.bond_rings)
    for (int b: r)
      ++info.bond_membership[b];
  return info;
}

}  // namespace rxngrow::chem

//
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "rxngrow/chem/elements.h"
#include "rxngrow/chem/smiles.h"
#include "rxngrow/errors.h"

namespace rxngrow::chem {
namespace {

// Charge shift applied to the element's valence list.
int valence_shift(const Atom &a) {
  int chg = a.charge;
  if (is_early_element(a.atomic_num))
    chg = -chg;
  if (a.atomic_num == 6 && chg > 0)
    chg = -chg;
  return chg;
}

// Smallest allowed total valence >= v, or -1 if none. Returns -2 when the
// element accepts any valence.
int fill_valence(const Atom &a, int v) {
  const auto &vals = element(a.atomic_num).valences;
  if (a.atomic_num == 0 || vals.empty())
    return -2;
  const int shift = valence_shift(a);
  for (int x: vals) {
    if (x < 0)
      return -2;
    if (x + shift >= v)
      return x + shift;
  }
  return -1;
}

int min_valence(const Atom &a) {
  const auto &vals = element(a.atomic_num).valences;
  if (a.atomic_num == 0 || vals.empty() || vals.front() < 0)
    return -1;
  return vals.front() + valence_shift(a);
}

[[noreturn]] void valence_error(const Mol &mol, int idx) {
  const Atom &a = mol.atom(idx);
  throw ParseError("explicit valence for atom #" + std::to_string(idx) + " "
                   + std::string(element(a.atomic_num).symbol) + " is "
                   + std::to_string(mol.bond_valence(idx) + a.explicit_h)
                   + ", greater than permitted");
}

class Kekulizer {
public:
  Kekulizer(Mol &mol): mol_(mol) { }

  void run() {
    const int n = mol_.num_atoms();
    const RingInfo &rings = mol_.rings();
    // Aromatic bonds outside rings become single.
    for (int b = 0; b < mol_.num_bonds(); ++b) {
      Bond &bond = mol_.bond(b);
      if (bond.type == BondType::kAromatic && !rings.bond_in_ring(b)) {
        bond.type = BondType::kSingle;
        bond.order = 1;
      }
    }
    need_.assign(n, 0);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      const Atom &a = mol_.atom(i);
      if (!a.aromatic)
        continue;
      if (!rings.atom_in_ring(i))
        throw ParseError("non-ring atom " + std::to_string(i)
                         + " marked aromatic");
      int count = a.explicit_h;
      for (const auto &nb: mol_.neighbors(i)) {
        const Bond &bond = mol_.bond(nb.bond);
        count += bond.type == BondType::kAromatic ? 1 : bond.order;
      }
      const int mv = min_valence(a);
      if (mv >= 0 && count < mv) {
        need_[i] = 1;
        any = true;
      }
    }
    for (int b = 0; b < mol_.num_bonds(); ++b) {
      Bond &bond = mol_.bond(b);
      if (bond.type == BondType::kAromatic) {
        bond.order = 1;
        bond.type = BondType::kSingle;
        if (need_[bond.begin] && need_[bond.end])
          candidate_bonds_.push_back(b);
      }
    }
    if (!any)
      return;
    mate_.assign(n, -1);
    is_candidate_.assign(mol_.num_bonds(), 0);
    for (int b: candidate_bonds_)
      is_candidate_[b] = 1;
    budget_ = 2000000;
    if (!solve())
      throw ParseError("can't kekulize molecule");
    for (int i = 0; i < n; ++i) {
      if (mate_[i] > i) {
        Bond &bond = mol_.bond(mol_.bond_between(i, mate_[i]));
        bond.order = 2;
        bond.type = BondType::kDouble;
      }
    }
  }

private:
  bool solve() {
    if (--budget_ < 0)
      return false;
    // Most constrained unmatched atom first.
    int best = -1;
    int best_options = 1 << 30;
    for (int i = 0; i < mol_.num_atoms(); ++i) {
      if (!need_[i] || mate_[i] >= 0)
        continue;
      int options = 0;
      for (const auto &nb: mol_.neighbors(i))
        if (is_candidate_[nb.bond] && mate_[nb.atom] < 0)
          ++options;
      if (options < best_options) {
        best_options = options;
        best = i;
        if (options <= 1)
          break;
      }
    }
    if (best < 0)
      return true;
    if (best_options == 0)
      return false;
    for (const auto &nb: mol_.neighbors(best)) {
      if (!is_candidate_[nb.bond] || mate_[nb.atom] >= 0)
        continue;
      mate_[best] = nb.atom;
      mate_[nb.atom] = best;
      if (solve())
        return true;
      mate_[best] = -1;
      mate_[nb.atom] = -1;
    }
    return false;
  }

  Mol &mol_;
  std::vector<char> need_;
  std::vector<int> candidate_bonds_;
  std::vector<char> is_candidate_;
  std::vector<int> mate_;
  long budget_ = 0;
};

void assign_hydrogens(Mol &mol) {
  for (int i = 0; i < mol.num_atoms(); ++i) {
    Atom &a = mol.atom(i);
    const int v = mol.bond_valence(i) + a.explicit_h;
    if (a.no_implicit) {
      a.implicit_h = 0;
      const int f = fill_valence(a, v);
      if (f == -1)
        valence_error(mol, i);
      continue;
    }
    const int f = fill_valence(a, v);
    if (f == -1)
      valence_error(mol, i);
    a.implicit_h = f == -2 ? 0 : f - v;
  }
}

enum Donor { kNone, kVacant, kOne, kTwo };

int count_atom_electrons(const Mol &mol, int i) {
  const Atom &a = mol.atom(i);
  const int dv = default_valence(a.atomic_num);
  if (dv <= 1)
    return -1;
  const int degree = mol.degree(i) + a.total_h();
  if (degree > 3)
    return -1;
  int nlp = element(a.atomic_num).outer_electrons - dv;
  nlp = std::max(nlp - a.charge, 0);
  int res = (dv - degree) + nlp;
  if (res > 1) {
    const int unsat = mol.bond_valence(i) - mol.degree(i);
    if (unsat > 1)
      res = 1;
  }
  return res;
}

bool aromatic_element(int z) {
  return (z >= 1 && z <= 18) || z == 34 || z == 52;
}

Donor donor_type(const Mol &mol, int i) {
  const RingInfo &rings = mol.rings();
  const int nelec = count_atom_electrons(mol, i);
  int exo_partner = -1;
  bool cyclic_multiple = false;
  bool any_multiple = false;
  for (const auto &nb: mol.neighbors(i)) {
    const Bond &b = mol.bond(nb.bond);
    if (b.order < 2)
      continue;
    any_multiple = true;
    if (rings.bond_in_ring(nb.bond))
      cyclic_multiple = true;
    else
      exo_partner = nb.atom;
  }
  if (nelec < 0)
    return kNone;
  if (nelec == 0) {
    if (exo_partner >= 0)
      return kVacant;
    if (cyclic_multiple)
      return kOne;
    return kNone;
  }
  if (nelec == 1) {
    if (exo_partner >= 0) {
      return more_electronegative(mol.atom(exo_partner).atomic_num,
                                  mol.atom(i).atomic_num)
               ? kVacant
               : kOne;
    }
    if (any_multiple)
      return kOne;
    if (mol.atom(i).charge == 1)
      return kVacant;
    return kNone;
  }
  if (any_multiple)
    return kOne;
  return kTwo;
}

bool candidate_atom(const Mol &mol, int i, Donor d) {
  if (d == kNone)
    return false;
  if (!aromatic_element(mol.atom(i).atomic_num))
    return false;
  int multiple = 0;
  for (const auto &nb: mol.neighbors(i))
    if (mol.bond(nb.bond).order >= 2)
      ++multiple;
  return multiple <= 1;
}

bool huckel(const std::vector<int> &atoms, const std::vector<Donor> &donor) {
  int electrons = 0;
  for (int a: atoms)
    electrons += donor[a] == kTwo ? 2 : donor[a] == kOne ? 1 : 0;
  if (electrons >= 6)
    return (electrons - 2) % 4 == 0;
  return electrons == 2;
}

void perceive_aromaticity(Mol &mol) {
  const int n = mol.num_atoms();
  for (int i = 0; i < n; ++i)
    mol.atom(i).aromatic = false;
  for (int b = 0; b < mol.num_bonds(); ++b)
    mol.bond(b).type = static_cast<BondType>(mol.bond(b).order);

  const RingInfo &rings = mol.rings();
  if (rings.num_rings() == 0)
    return;
  std::vector<Donor> donor(n, kNone);
  std::vector<char> cand(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!rings.atom_in_ring(i))
      continue;
    donor[i] = donor_type(mol, i);
    cand[i] = candidate_atom(mol, i, donor[i]);
  }
  std::vector<int> cand_rings;
  for (int r = 0; r < rings.num_rings(); ++r) {
    bool ok = true;
    for (int a: rings.atom_rings[r])
      ok = ok && cand[a];
    if (ok)
      cand_rings.push_back(r);
  }
  if (cand_rings.empty())
    return;

  // Bonds shared by two rings of a fused aromatic set stay non-aromatic
  // unless some other aromatic set marks them.
  auto mark = [&](const std::vector<int> &ring_ids) {
    std::map<int, int> bond_count;
    for (int r: ring_ids) {
      for (int a: rings.atom_rings[r])
        mol.atom(a).aromatic = true;
      for (int b: rings.bond_rings[r])
        ++bond_count[b];
    }
    for (const auto &[b, c]: bond_count)
      if (c == 1)
        mol.bond(b).type = BondType::kAromatic;
  };

  // Group candidate rings into fused systems (rings sharing a bond).
  const int nc = static_cast<int>(cand_rings.size());
  std::vector<std::vector<int>> shares(nc);
  for (int x = 0; x < nc; ++x) {
    for (int y = x + 1; y < nc; ++y) {
      const auto &bx = rings.bond_rings[cand_rings[x]];
      const auto &by = rings.bond_rings[cand_rings[y]];
      bool share = false;
      for (int b: bx)
        if (std::find(by.begin(), by.end(), b) != by.end()) {
          share = true;
          break;
        }
      if (share) {
        shares[x].push_back(y);
        shares[y].push_back(x);
      }
    }
  }
  std::vector<int> system(nc, -1);
  int nsys = 0;
  for (int x = 0; x < nc; ++x) {
    if (system[x] >= 0)
      continue;
    std::vector<int> stack { x };
    system[x] = nsys;
    while (!stack.empty()) {
      const int r = stack.back();
      stack.pop_back();
      for (int y: shares[r])
        if (system[y] < 0) {
          system[y] = nsys;
          stack.push_back(y);
        }
    }
    ++nsys;
  }

  for (int s = 0; s < nsys; ++s) {
    std::vector<int> members;  // indices into cand_rings
    for (int x = 0; x < nc; ++x)
      if (system[x] == s)
        members.push_back(x);
    std::vector<char> done_atom(n, 0);
    int system_atoms = 0;
    {
      std::vector<char> seen(n, 0);
      for (int x: members)
        for (int a: rings.atom_rings[cand_rings[x]])
          if (!seen[a]) {
            seen[a] = 1;
            ++system_atoms;
          }
    }
    int num_done = 0;
    const int m = static_cast<int>(members.size());
    const int max_size = m <= 8 ? m : 3;
    for (int size = 1; size <= max_size && num_done < system_atoms; ++size) {
      // Enumerate combinations of `size` rings.
      std::vector<int> idx(size);
      std::iota(idx.begin(), idx.end(), 0);
      while (true) {
        std::vector<int> pick;
        for (int k: idx)
          pick.push_back(members[k]);
        // Subset must be connected through shared bonds.
        bool connected = true;
        if (size > 1) {
          std::vector<char> in(nc, 0), reach(nc, 0);
          for (int x: pick)
            in[x] = 1;
          std::vector<int> st { pick[0] };
          reach[pick[0]] = 1;
          int cnt = 1;
          while (!st.empty()) {
            const int r = st.back();
            st.pop_back();
            for (int y: shares[r])
              if (in[y] && !reach[y]) {
                reach[y] = 1;
                ++cnt;
                st.push_back(y);
              }
          }
          connected = cnt == size;
        }
        if (connected) {
          std::vector<int> atoms;
          std::vector<char> seen(n, 0);
          for (int x: pick)
            for (int a: rings.atom_rings[cand_rings[x]])
              if (!seen[a]) {
                seen[a] = 1;
                atoms.push_back(a);
              }
          if (huckel(atoms, donor)) {
            std::vector<int> ring_ids;
            for (int x: pick)
              ring_ids.push_back(cand_rings[x]);
            mark(ring_ids);
            for (int a: atoms)
              if (!done_atom[a]) {
                done_atom[a] = 1;
                ++num_done;
              }
          }
        }
        // Next combination.
        int k = size - 1;
        while (k >= 0 && idx[k] == m - size + k)
          --k;
        if (k < 0)
          break;
        ++idx[k];
        for (int j = k + 1; j < size; ++j)
          idx[j] = idx[j - 1] + 1;
      }
    }
  }
}

}  // namespace

void fold_hydrogens(Mol &mol) {
  std::vector<bool> kill(mol.num_atoms(), false);
  bool any = false;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atom(i);
    if (a.atomic_num != 1 || a.isotope != 0 || a.charge != 0 || a.map_num != 0
        || a.total_h() != 0 || mol.degree(i) != 1)
      continue;
    const Neighbor nb = mol.neighbors(i)[0];
    if (mol.atom(nb.atom).atomic_num == 1
        || mol.bond(nb.bond).order != 1)
      continue;
    kill[i] = true;
    any = true;
  }
  if (!any)
    return;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (kill[i])
      mol.atom(mol.neighbors(i)[0].atom).explicit_h += 1;
  }
  mol.remove_atoms(kill);
}

void unfold_hydrogens(Mol &mol) {
  const int n = mol.num_atoms();
  for (int i = 0; i < n; ++i) {
    Atom &a = mol.atom(i);
    const int h = a.total_h();
    a.explicit_h = 0;
    a.implicit_h = 0;
    a.no_implicit = true;
    for (int k = 0; k < h; ++k) {
      Atom hydrogen;
      hydrogen.atomic_num = 1;
      hydrogen.no_implicit = true;
      const int hi = mol.add_atom(hydrogen);
      mol.add_bond(i, hi, BondType::kSingle);
    }
  }
}

void sanitize(Mol &mol) {
  mol.set_rings(find_sssr(mol));
  Kekulizer(mol).run();
  assign_hydrogens(mol);
  perceive_aromaticity(mol);
}

int bare_hydrogen_count(const Mol &mol, int i) {
  const Atom &a = mol.atom(i);
  if (a.charge != 0 || a.isotope != 0 || a.map_num != 0)
    return -1;
  if (a.atomic_num == 0)
    return 0;
  static const int kOrganic[] = { 5, 6, 7, 8, 15, 16, 9, 17, 35, 53 };
  if (std::find(std::begin(kOrganic), std::end(kOrganic), a.atomic_num)
      == std::end(kOrganic))
    return -1;
  if (a.aromatic && a.atomic_num > 16)
    return -1;
  int v = 0;
  if (a.aromatic) {
    int count = 0;
    for (const auto &nb: mol.neighbors(i)) {
      const Bond &b = mol.bond(nb.bond);
      count += b.type == BondType::kAromatic ? 1 : b.order;
    }
    const int mv = min_valence(a);
    v = (mv >= 0 && count < mv) ? count + 1 : count;
  } else {
    v = mol.bond_valence(i);
  }
  Atom plain = a;
  plain.charge = 0;
  const int f = fill_valence(plain, v);
  if (f == -1)
    return -1;
  return f == -2 ? 0 : f - v;
}

}  // namespace rxngrow::chem

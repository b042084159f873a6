//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_MOL_H_
#define RXNGROW_CHEM_MOL_H_

#include <cstdint>
#include <span>
#include <vector>

namespace rxngrow::chem {

enum class BondType : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 12,
};

struct Atom {
  int atomic_num = 0;
  int charge = 0;
  int isotope = 0;
  int map_num = 0;
  // Hydrogens attached without being graph nodes. For bracket atoms this is
  // the written count; sanitization fills implicit_h for the others.
  int explicit_h = 0;
  int implicit_h = 0;
  bool no_implicit = false;
  bool aromatic = false;

  int total_h() const { return explicit_h + implicit_h; }
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondType type = BondType::kSingle;
  // Kekule order (1, 2 or 3). Equal to the type for non-aromatic bonds.
  int order = 1;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

struct RingInfo {
  std::vector<std::vector<int>> atom_rings;  // atoms in cyclic order
  std::vector<std::vector<int>> bond_rings;  // bonds in the same order
  std::vector<int> atom_membership;
  std::vector<int> bond_membership;

  bool atom_in_ring(int a) const { return atom_membership[a] > 0; }
  bool bond_in_ring(int b) const { return bond_membership[b] > 0; }
  bool atom_in_ring_of_size(int a, int size) const;
  int smallest_ring_containing(int a) const;  // 0 if acyclic
  int num_rings() const { return static_cast<int>(atom_rings.size()); }
};

class Mol {
public:
  int add_atom(const Atom &atom);
  int add_bond(int a, int b, BondType type, int order = 0);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }

  Atom &atom(int i) { return atoms_[i]; }
  const Atom &atom(int i) const { return atoms_[i]; }
  Bond &bond(int i) { return bonds_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }

  std::span<const Neighbor> neighbors(int a) const { return adj_[a]; }
  int degree(int a) const { return static_cast<int>(adj_[a].size()); }
  // Index of the bond joining a and b, or -1.
  int bond_between(int a, int b) const;

  // Sum of Kekule bond orders, without hydrogens.
  int bond_valence(int a) const;
  // Kekule valence including all hydrogens.
  int total_valence(int a) const { return bond_valence(a) + atoms_[a].total_h(); }
  int heavy_degree(int a) const;
  int num_heavy_atoms() const;

  // Removes the flagged atoms and their bonds. Returns old->new index map
  // (-1 for removed atoms). Ring info is cleared.
  std::vector<int> remove_atoms(const std::vector<bool> &kill);

  const RingInfo &rings() const { return rings_; }
  void set_rings(RingInfo info) { rings_ = std::move(info); }

  // Connected components as lists of atom indices, in order of first atom.
  std::vector<std::vector<int>> components() const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
  RingInfo rings_;
};

// Smallest set of smallest rings. Fills membership counts as well.
RingInfo find_sssr(const Mol &mol);

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_MOL_H_

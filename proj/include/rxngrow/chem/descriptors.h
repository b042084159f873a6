//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_DESCRIPTORS_H_
#define RXNGROW_CHEM_DESCRIPTORS_H_

#include <cstdint>
#include <map>

#include "rxngrow/chem/mol.h"

namespace rxngrow::chem {

// Average molecular weight including hydrogens.
double average_mol_weight(const Mol &mol);

int num_hbd(const Mol &mol);
int num_hba(const Mol &mol);

// Topological polar surface area, N and O contributions only.
double tpsa(const Mol &mol);

// Atom-additive logP (Wildman-Crippen).
double crippen_logp(const Mol &mol);

// Rotatable bonds, strict definition (amides, CF3, t-butyl and the like are
// not counted).
int num_rotatable_bonds(const Mol &mol);

// Cycle rank of the molecule after deleting aliphatic ring atoms that carry a
// non-aromatic neighbor. Used as the aromatic ring count in QED.
int qed_aromatic_rings(const Mol &mol);
// Number of distinct structural alerts that match.
int qed_alert_count(const Mol &mol);
// Acceptor count with the QED acceptor patterns.
int qed_acceptors(const Mol &mol);

struct QedProperties {
  double mw = 0;
  double alogp = 0;
  int hba = 0;
  int hbd = 0;
  double psa = 0;
  int rotb = 0;
  int arom = 0;
  int alerts = 0;
};

QedProperties qed_properties(const Mol &mol);
// Weighted geometric mean of the desirability functions, in (0, 1).
double qed(const Mol &mol);
double qed(const QedProperties &props);

// Sparse Morgan count fingerprint, connectivity invariants, bond types used.
std::map<std::uint32_t, int> morgan_counts(const Mol &mol, int radius);

// Atoms that could be tetrahedral stereocenters, assigned or not.
int num_potential_stereocenters(const Mol &mol);
int num_spiro_atoms(const Mol &mol);
int num_bridgehead_atoms(const Mol &mol);

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_DESCRIPTORS_H_

//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_SMILES_H_
#define RXNGROW_CHEM_SMILES_H_

#include <string>
#include <string_view>
#include <vector>

#include "rxngrow/chem/mol.h"

namespace rxngrow::chem {

// Reads the graph only. Stereo marks are accepted and dropped. Bonds left
// unspecified between two aromatic atoms come back as kAromatic.
// Throws ParseError.
Mol read_smiles_graph(std::string_view smiles);

// Kekulizes, assigns implicit hydrogens, checks valences, perceives rings and
// aromaticity. Throws ParseError when the graph is not a valid molecule.
void sanitize(Mol &mol);

// Folds plain hydrogen atoms (degree 1, no isotope, charge or map number)
// into their neighbor's hydrogen count.
void fold_hydrogens(Mol &mol);

// Turns every hydrogen count into explicit hydrogen atoms. The result keeps
// ring info consistent for the heavy atoms only; callers sanitize afterwards.
void unfold_hydrogens(Mol &mol);

// read + fold + sanitize.
Mol parse_smiles(std::string_view smiles);

// Canonical atom ranks (0..n-1).
std::vector<int> canonical_ranks(const Mol &mol);

// Graph symmetry classes: equal values for topologically equivalent atoms.
std::vector<int> symmetry_classes(const Mol &mol);

// Canonical SMILES of a sanitized molecule.
std::string write_smiles(const Mol &mol);

// Number of hydrogens a bare (unbracketed) atom would receive when read back.
// Returns -1 if the atom cannot be written bare.
int bare_hydrogen_count(const Mol &mol, int atom);

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_SMILES_H_

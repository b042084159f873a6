//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_FRAGMENT_H_
#define RXNGROW_CHEM_FRAGMENT_H_

#include <set>
#include <string>

#include "rxngrow/chem/mol.h"

namespace rxngrow::chem {

// Leaf fragments of the iterative BRICS decomposition, as canonical SMILES.
// Attachment points are dummy atoms labelled with the BRICS environment
// number as isotope. A molecule without cleavable bonds comes back as itself.
std::set<std::string> brics_leaves(const Mol &mol);

// Leaf fragments of the RECAP hierarchy, as canonical SMILES with unlabelled
// dummies. Empty when no RECAP bond can be cut.
std::set<std::string> recap_leaves(const Mol &mol);

// Replaces every dummy atom by a hydrogen on its neighbor and re-sanitizes.
// Throws ParseError if the result is not a valid molecule.
Mol cap_dummies(const Mol &mol);

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_FRAGMENT_H_

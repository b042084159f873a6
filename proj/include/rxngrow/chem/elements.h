//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_CHEM_ELEMENTS_H_
#define RXNGROW_CHEM_ELEMENTS_H_

#include <span>
#include <string_view>

namespace rxngrow::chem {

struct ElementData {
  int atomic_num;
  std::string_view symbol;
  double weight;
  int outer_electrons;
  // Allowed valences in ascending order; a trailing -1 means "anything
  // above the listed values is also acceptable". Empty means unrestricted.
  std::span<const int> valences;
};

inline constexpr int kMaxAtomicNum = 86;

const ElementData &element(int atomic_num);

// Returns 0 if the symbol is unknown. "*" maps to 0 as well, so callers that
// need to distinguish must check the symbol themselves.
int atomic_number(std::string_view symbol);

// Default (lowest) valence, or -1 when the element has no fixed valence.
int default_valence(int atomic_num);

// Ordering used for aromaticity electron donation: more outer electrons wins,
// ties go to the lighter element.
bool more_electronegative(int a, int b);

// Elements with fewer than four valence electrons; their charge shifts the
// allowed valence the other way.
bool is_early_element(int atomic_num);

}  // namespace rxngrow::chem

#endif  // RXNGROW_CHEM_ELEMENTS_H_

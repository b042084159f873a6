//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_SIMILARITY_H_
#define RXNGROW_SIMILARITY_H_

#include <map>
#include <string>
#include <vector>

#include "rxngrow/encoders.h"

namespace rxngrow {

inline constexpr int kDefaultTopK = 5;

struct SimilarityHit {
  std::string pdb_id;
  double score = 0;  // cosine

  bool operator==(const SimilarityHit &) const = default;
};

double cosine(const std::vector<float> &a, const std::vector<float> &b);

// Exhaustive scan. Sorted by score descending, ties by ascending pdb_id;
// length min(k, |kb|). Throws DimensionMismatchError when a dim or
// encoder_id differs from the query, ZeroNormError for a zero vector and
// ConfigError for k < 1.
std::vector<SimilarityHit> topk_similar(
    const Embedding &query, const std::map<std::string, Embedding> &kb, int k);

}  // namespace rxngrow

#endif  // RXNGROW_SIMILARITY_H_

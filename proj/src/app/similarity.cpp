//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/similarity.h"

#include <algorithm>
#include <cmath>

#include "rxngrow/errors.h"

namespace rxngrow {
namespace {

double norm(const std::vector<float> &v) {
  double s = 0;
  for (float x: v)
    s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double dot(const std::vector<float> &a, const std::vector<float> &b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i)
    s += static_cast<double>(a[i]) * b[i];
  return s;
}

void check(const Embedding &e, const std::string &what) {
  if (static_cast<int>(e.vector.size()) != e.dim)
    throw DimensionMismatchError(what + ": vector length "
                                 + std::to_string(e.vector.size())
                                 + " != dim " + std::to_string(e.dim));
}

}  // namespace

double cosine(const std::vector<float> &a, const std::vector<float> &b) {
  if (a.size() != b.size())
    throw DimensionMismatchError("cosine of vectors with different lengths");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0 || nb == 0)
    throw ZeroNormError("cosine of a zero vector");
  return dot(a, b) / (na * nb);
}

std::vector<SimilarityHit> topk_similar(
    const Embedding &query, const std::map<std::string, Embedding> &kb,
    int k) {
  if (k < 1)
    throw ConfigError("k must be at least 1");
  check(query, "query");
  const double qn = norm(query.vector);
  if (qn == 0)
    throw ZeroNormError("query embedding has zero norm");
  std::vector<SimilarityHit> hits;
  hits.reserve(kb.size());
  for (const auto &[id, e]: kb) {
    check(e, id);
    if (e.dim != query.dim || e.encoder_id != query.encoder_id)
      throw DimensionMismatchError(
          "embedding of " + id + " (" + e.encoder_id + ", dim "
          + std::to_string(e.dim) + ") does not match the query ("
          + query.encoder_id + ", dim " + std::to_string(query.dim) + ")");
    const double en = norm(e.vector);
    if (en == 0)
      throw ZeroNormError("embedding of " + id + " has zero norm");
    hits.push_back({id, dot(query.vector, e.vector) / en / qn});
  }
  const size_t n = std::min(hits.size(), static_cast<size_t>(k));
  std::partial_sort(hits.begin(), hits.begin() + n, hits.end(),
                    [](const SimilarityHit &a, const SimilarityHit &b) {
                      if (a.score != b.score)
                        return a.score > b.score;
                      return a.pdb_id < b.pdb_id;
                    });
  hits.resize(n);
  return hits;
}

}  // namespace rxngrow

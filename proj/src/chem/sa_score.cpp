//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/chem/sa_score.h"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>

#include "rxngrow/chem/descriptors.h"
#include "rxngrow/errors.h"

#ifndef RXNGROW_DATA_DIR
#define RXNGROW_DATA_DIR "data"
#endif

namespace rxngrow::chem {
namespace {

constexpr char kMagic[8] = { 'R', 'X', 'S', 'A', 'F', 'S', '0', '1' };

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};

void read_exact(gzFile f, void *buf, unsigned len, const std::string &path) {
  if (gzread(f, buf, len) != static_cast<int>(len))
    throw EngineError("truncated SA table: " + path);
}

std::uint32_t le32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8
         | static_cast<std::uint32_t>(p[2]) << 16
         | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

SaScorer SaScorer::load(const std::string &path) {
  std::unique_ptr<gzFile_s, GzCloser> f(gzopen(path.c_str(), "rb"));
  if (!f)
    throw EngineError("cannot open SA table: " + path);
  char magic[8];
  read_exact(f.get(), magic, sizeof magic, path);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw EngineError("not an SA table: " + path);
  unsigned char word[4];
  read_exact(f.get(), word, 4, path);
  const std::uint32_t n = le32(word);
  std::vector<unsigned char> raw(static_cast<size_t>(n) * 8);
  read_exact(f.get(), raw.data(), static_cast<unsigned>(raw.size()), path);
  SaScorer s;
  s.ids_.resize(n);
  s.scores_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    s.ids_[i] = le32(&raw[i * 8]);
    const std::uint32_t bits = le32(&raw[i * 8 + 4]);
    std::memcpy(&s.scores_[i], &bits, 4);
  }
  if (!std::is_sorted(s.ids_.begin(), s.ids_.end()))
    throw EngineError("SA table ids not sorted: " + path);
  return s;
}

std::string SaScorer::default_table_path() {
  if (const char *env = std::getenv("RXNGROW_SA_TABLE"); env && *env)
    return env;
  return std::string(RXNGROW_DATA_DIR) + "/sa_fragment_scores.bin.gz";
}

const SaScorer &SaScorer::shared() {
  static std::once_flag once;
  static std::unique_ptr<SaScorer> inst;
  std::call_once(once, [] {
    inst = std::make_unique<SaScorer>(load(default_table_path()));
  });
  return *inst;
}

double SaScorer::fragment_score(std::uint32_t id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id)
    return -4.0;
  return scores_[it - ids_.begin()];
}

double SaScorer::score(const Mol &mol) const {
  const auto fp = morgan_counts(mol, 2);
  double score1 = 0;
  int nf = 0;
  for (const auto &[id, count]: fp) {
    nf += count;
    score1 += fragment_score(id) * count;
  }
  if (nf > 0)
    score1 /= nf;

  const int atoms = mol.num_atoms();
  const int chiral = num_potential_stereocenters(mol);
  const int bridge = num_bridgehead_atoms(mol);
  const int spiro = num_spiro_atoms(mol);
  bool macrocycle = false;
  for (const auto &r: mol.rings().atom_rings)
    macrocycle = macrocycle || r.size() > 8;

  const double size_penalty = std::pow(atoms, 1.005) - atoms;
  const double stereo_penalty = std::log10(chiral + 1.0);
  const double spiro_penalty = std::log10(spiro + 1.0);
  const double bridge_penalty = std::log10(bridge + 1.0);
  const double macro_penalty = macrocycle ? std::log10(2.0) : 0.0;
  const double score2 = -size_penalty - stereo_penalty - spiro_penalty
                        - bridge_penalty - macro_penalty;

  // Symmetric molecules have fewer distinct fragments than atoms.
  double score3 = 0;
  const auto distinct = static_cast<double>(fp.size());
  if (distinct > 0 && atoms > distinct)
    score3 = std::log(atoms / distinct) * 0.5;

  constexpr double kMin = -4.0;
  constexpr double kMax = 2.5;
  double s = score1 + score2 + score3;
  s = 11.0 - (s - kMin + 1.0) / (kMax - kMin) * 9.0;
  if (s > 8.0)
    s = 8.0 + std::log(s + 1.0 - 9.0);
  return std::clamp(s, 1.0, 10.0);
}

}  // namespace rxngrow::chem

//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/util/rng.h"

#include <cmath>
#include <sstream>

#include "rxngrow/errors.h"

namespace rxngrow {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ';
  os << std::hexfloat << spare_;
  return os.str();
}

void Rng::set_state(const std::string &state) {
  std::istringstream is(state);
  std::mt19937_64 engine;
  int spare_flag = 0;
  std::string spare;
  if (!(is >> engine >> spare_flag >> spare))
    throw FormatError("malformed RNG state");
  engine_ = engine;
  has_spare_ = spare_flag != 0;
  spare_ = std::strtod(spare.c_str(), nullptr);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rxngrow

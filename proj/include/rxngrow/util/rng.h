//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_UTIL_RNG_H_
#define RXNGROW_UTIL_RNG_H_

#include <cstdint>
#include <random>
#include <string>

namespace rxngrow {

// Seeded generator with portable draws. The engine is mt19937_64, whose
// output sequence is fixed by the standard; the draws below avoid the
// library distributions, which are not.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0): engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal (Marsaglia polar method).
  double normal();

  // Text form of the full engine state.
  std::string state() const;
  // Throws FormatError on a malformed state string.
  void set_state(const std::string &state);

  // Independent stream seed for (seed, stream), via splitmix64 mixing.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

}  // namespace rxngrow

#endif  // RXNGROW_UTIL_RNG_H_

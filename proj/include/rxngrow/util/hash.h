//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_UTIL_HASH_H_
#define RXNGROW_UTIL_HASH_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace rxngrow {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::string_view data);
// Lowercase, 64 characters.
std::string sha256_hex(std::string_view data);

}  // namespace rxngrow

#endif  // RXNGROW_UTIL_HASH_H_

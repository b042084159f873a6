//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/util/hash.h"

#include <openssl/evp.h>

#include "rxngrow/errors.h"

namespace rxngrow {

Digest sha256(std::string_view data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1
      || len != out.size())
    throw EngineError("SHA-256 digest failed");
  return out;
}

std::string sha256_hex(std::string_view data) {
  static constexpr char kHex[] = "0123456789abcdef";
  const Digest d = sha256(data);
  std::string s(64, '0');
  for (size_t i = 0; i < d.size(); ++i) {
    s[2 * i] = kHex[d[i] >> 4];
    s[2 * i + 1] = kHex[d[i] & 15];
  }
  return s;
}

}  // namespace rxngrow

//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_UTIL_IO_H_
#define RXNGROW_UTIL_IO_H_

#include <string>
#include <string_view>
#include <vector>

namespace rxngrow {

// Whole file as bytes. Throws FormatError naming the path if it cannot be
// opened.
std::string read_file(const std::string &path);

// Lines without terminators; a trailing "\r" is stripped too.
std::vector<std::string> read_lines(const std::string &path);

// Writes through a temporary sibling and renames, so readers never see a
// half-written file. Throws Error on I/O failure.
void write_file_atomic(const std::string &path, std::string_view data);

std::vector<std::string> split(std::string_view s, char sep);

bool file_exists(const std::string &path);

}  // namespace rxngrow

#endif  // RXNGROW_UTIL_IO_H_

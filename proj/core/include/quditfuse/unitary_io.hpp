#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "quditfuse/types.hpp"

namespace quditfuse {

/// Text form of a square complex matrix: the first line holds K, then K
/// lines each carrying K "re im" pairs. Numbers use 17 significant digits,
/// so parse_unitary(format_unitary(u)) reproduces u bit for bit.
std::string format_unitary(const CMatrix& u);

/// Parses the format above. Parentheses and commas around pairs are
/// accepted and ignored. Throws InvalidInput on malformed text. Does not
/// check unitarity; wrap the result in an Interferometer for that.
CMatrix parse_unitary(std::string_view text);

CMatrix read_unitary_file(const std::filesystem::path& path);
void write_unitary_file(const std::filesystem::path& path, const CMatrix& u);

/// Shortest-safe decimal form of a double with 17 significant digits.
std::string format_double(double value);

}  // namespace quditfuse

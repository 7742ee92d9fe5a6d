#pragma once

#include <string>
#include <string_view>

#include "betheperm/matrix.hpp"

namespace betheperm {

// dense_text: first line "n", then n lines of n whitespace-separated reals, LF endings.
// csv:        n rows of n comma-separated reals, no header.
// json:       {"n": int, "rows": [[real, ...], ...]}.
enum class MatrixFormat { dense_text, csv, json };

// Accepts "dense-text", "csv", "json"; throws domain_error otherwise.
MatrixFormat parse_format(std::string_view name);
std::string format_name(MatrixFormat format);

// Numbers are parsed exactly (correctly rounded decimal -> double).
SquareMatrix parse_matrix(std::string_view text, MatrixFormat format);

// Shortest round-trip decimal rendering: parse(serialize(m)) == m bit-exactly.
std::string serialize_matrix(const SquareMatrix& m, MatrixFormat format);

}  // namespace betheperm

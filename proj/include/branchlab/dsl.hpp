#pragma once

// Text format for group definitions (.grp files).
//
//   # grpdef v1
//   alphabet = 2
//   gen a = perm (0 1) [e, e]
//   gen b = perm () [a, c]
//   gen s01 = portrait { "01": (0 1) }
//
// Permutations use cycle notation on letters 0..d-1; sections are words such as
// "e", "a", "a^-1*b". Identifiers may be used before their definition.

#include "branchlab/tree.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace branchlab {

enum class ParseErrorKind {
  syntax,
  unknown_identifier,
  section_count,
  not_a_permutation,
  letter_out_of_range,
  duplicate_generator,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        kind_(kind),
        line_(line),
        column_(column) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

GroupPtr parse_group(std::string_view text);
std::string emit_group(const GroupDef& group);

// Element words: "a*d*a", "a^-1*b", "e", or generator names run together ("ada", "bcd")
// split by longest match. Throws ResolveError for unknown names.
Automorphism parse_word(const GroupPtr& group, std::string_view text);

}  // namespace branchlab

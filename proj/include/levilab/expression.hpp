#pragma once

#include "levilab/cx_calculus.hpp"

#include <stdexcept>
#include <string>

namespace levilab {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int column)
      : std::runtime_error("column " + std::to_string(column) + ": " + what), column_(column) {}
  /// 1-based; one past the end for truncated input.
  int column() const { return column_; }

 private:
  int column_;
};

/// Real field from an expression over z1..zn.
///
///   numbers, pi, i; z1..zn; + - * / and ^ with a constant exponent;
///   conj, re, im, abs2, exp, log, sin, cos.
///
/// Arithmetic is complex; the result must be real-valued. The dimension is
/// the largest variable index unless `n` is larger.
ScalarField parse_field_expression(const std::string& text, int n = 0);

}  // namespace levilab

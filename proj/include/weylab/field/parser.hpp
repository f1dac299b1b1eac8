#pragma once

#include <string>
#include <string_view>

#include "weylab/field/expr.hpp"

namespace weylab {

// Expression grammar, version 1.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' int)*            exponents are integer literals,
//                                        optionally negated: x1^-2
//   atom   := number | coord | func '(' expr ')' | '(' expr ')'
//   coord  := 'x' digits                 1-based: x1 .. xn
//   func   := 'sqrt' | 'exp' | 'log'
//
// Numbers are standard floating-point literals. Whitespace is ignored.
// Malformed input raises ParseError with the offending position.
inline constexpr int kExprGrammarVersion = 1;

ScalarField parse_field(std::string_view src, int dim);

}  // namespace weylab

#pragma once

#include <string>

#include "contsym/expr.hpp"

namespace contsym::sym {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

/// Parses the infix grammar documented in docs/grammar.md:
///   rho_t + j1_x
///   D[u,{t,1},{x,2}]        derivative coordinate, long form
///   M(s1; s2), M[1,0](a; b) opaque call, with formal derivative orders
///   R*Theta_x^2/2, R^(1/3), I (imaginary unit), 0.05 (exact decimal)
Expr parse_expr(const std::string& text, const JetSpace& space);

}  // namespace contsym::sym

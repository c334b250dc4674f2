#include "contsym/parse.hpp"

#include <cctype>

namespace contsym::sym {

namespace {

class Parser {
 public:
  Parser(const std::string& text, const JetSpace& space) : s_(text), space_(space) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return sum(std::move(terms));
  }

  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr d = unary();
        if (d.is_zero()) {
          pos_ = at;
          fail("division by constant zero");
        }
        acc = acc / d;
      } else {
        break;
      }
    }
    return acc;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return postfix();
  }

  Expr postfix() {
    Expr base = primary();
    if (accept('^')) {
      const std::size_t at = pos_;
      Expr ex = unary();
      if (!ex.is_const() || !ex.constant().is_real()) {
        pos_ = at;
        fail("exponent must be a real rational constant");
      }
      return power(base, ex.constant().re);
    }
    return base;
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_]))) fail("expected identifier");
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  long integer() {
    skip();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_ || (pos_ == start + 1 && s_[start] == '-')) fail("expected integer");
    return std::stol(s_.substr(start, pos_ - start));
  }

  Expr number() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    try {
      return Expr(parse_rational(s_.substr(start, pos_ - start)));
    } catch (const Error&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  Expr long_derivative() {
    // D[u,{t,1},{x,2}]
    expect('[');
    const std::size_t at = pos_;
    const std::string dep = identifier();
    const int d = space_.dependent_index(dep);
    if (d < 0) {
      pos_ = at;
      throw UnknownCoordinate("unknown dependent '" + dep + "' at position " + std::to_string(at));
    }
    MultiIndex multi;
    while (accept(',')) {
      expect('{');
      const std::size_t iat = pos_;
      const std::string ind = identifier();
      const int i = space_.independent_index(ind);
      if (i < 0)
        throw UnknownCoordinate("unknown independent '" + ind + "' at position " + std::to_string(iat));
      expect(',');
      const long k = integer();
      if (k < 0) fail("negative derivative order");
      for (long r = 0; r < k; ++r) multi = add_index(std::move(multi), i);
      expect('}');
    }
    expect(']');
    return jet(d, std::move(multi));
  }

  Expr call(const std::string& name) {
    std::vector<int> derivs;
    if (accept('[')) {
      do {
        const long k = integer();
        if (k < 0) fail("negative formal derivative order");
        derivs.push_back(static_cast<int>(k));
      } while (accept(','));
      expect(']');
    }
    expect('(');
    std::vector<Expr> args;
    if (!accept(')')) {
      do {
        args.push_back(expr());
      } while (accept(';') || accept(','));
      expect(')');
    }
    if (!derivs.empty() && derivs.size() != args.size()) fail("derivative orders do not match argument count");
    return func(name, std::move(args), std::move(derivs));
  }

  Expr primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t at = pos_;
      const std::string name = identifier();
      if (name == "D" && peek() == '[') return long_derivative();
      if (name == "I") return imaginary_unit();
      const char nxt = peek();
      if (nxt == '(' || nxt == '[') {
        if (space_.parse_coord_name(name)) {
          pos_ = at;
          fail("coordinate '" + name + "' used as a function");
        }
        return call(name);
      }
      if (auto co = space_.parse_coord_name(name)) return coord(*co);
      throw UnknownCoordinate("unknown coordinate '" + name + "' at position " + std::to_string(at));
    }
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const JetSpace& space_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const JetSpace& space) { return Parser(text, space).parse(); }

}  // namespace contsym::sym

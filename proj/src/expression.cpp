#include "levilab/expression.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace levilab {

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int column = 0;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s.substr(i), &used);
      } catch (const std::exception&) {
        throw ParseError("malformed number", col);
      }
      out.push_back({Tok::Number, s.substr(i, used), v, col});
      i += used;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), 0.0, col});
      i = j;
    } else if (std::string("+-*/^(),").find(c) != std::string::npos) {
      out.push_back({Tok::Op, std::string(1, c), 0.0, col});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", col);
    }
  }
  out.push_back({Tok::End, "", 0.0, static_cast<int>(s.size()) + 1});
  return out;
}

struct Ast;
using AstPtr = std::unique_ptr<Ast>;

struct Ast {
  enum Kind { Number, Imag, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
  int column = 0;
  double number = 0.0;
  int var = -1;
  std::string name;
  AstPtr a, b;
};

AstPtr make(Ast::Kind k, int col) {
  auto p = std::make_unique<Ast>();
  p->kind = k;
  p->column = col;
  return p;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AstPtr parse() {
    AstPtr e = expr();
    if (peek().kind != Tok::End) throw ParseError("unexpected '" + peek().text + "'", peek().column);
    return e;
  }

  int max_var() const { return max_var_; }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
  const Token& take() { return toks_[pos_++]; }

  void expect(const char* op) {
    if (!is_op(op)) {
      const Token& t = peek();
      throw ParseError(std::string("expected '") + op + "'" +
                           (t.kind == Tok::End ? " before end of input" : ", found '" + t.text + "'"),
                       t.column);
    }
    ++pos_;
  }

  AstPtr expr() {
    AstPtr lhs = term();
    while (is_op("+") || is_op("-")) {
      const Token& t = take();
      AstPtr node = make(t.text == "+" ? Ast::Add : Ast::Sub, t.column);
      node->a = std::move(lhs);
      node->b = term();
      lhs = std::move(node);
    }
    return lhs;
  }

  AstPtr term() {
    AstPtr lhs = unary();
    while (is_op("*") || is_op("/")) {
      const Token& t = take();
      AstPtr node = make(t.text == "*" ? Ast::Mul : Ast::Div, t.column);
      node->a = std::move(lhs);
      node->b = unary();
      lhs = std::move(node);
    }
    return lhs;
  }

  AstPtr unary() {
    if (is_op("-")) {
      const Token& t = take();
      AstPtr node = make(Ast::Neg, t.column);
      node->a = unary();
      return node;
    }
    if (is_op("+")) {
      take();
      return unary();
    }
    return power();
  }

  // Right associative; binds tighter than unary minus on its left.
  AstPtr power() {
    AstPtr base = primary();
    if (is_op("^")) {
      const Token& t = take();
      AstPtr node = make(Ast::Pow, t.column);
      node->a = std::move(base);
      node->b = unary();
      return node;
    }
    return base;
  }

  AstPtr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      take();
      AstPtr node = make(Ast::Number, t.column);
      node->number = t.number;
      return node;
    }
    if (is_op("(")) {
      take();
      AstPtr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::Ident) {
      take();
      if (is_op("(")) {
        static const char* kFunctions[] = {"conj", "re", "im", "abs2", "exp", "log", "sin", "cos"};
        bool known = false;
        for (const char* f : kFunctions) known = known || t.text == f;
        if (!known) throw ParseError("unsupported function '" + t.text + "'", t.column);
        take();
        AstPtr node = make(Ast::Call, t.column);
        node->name = t.text;
        node->a = expr();
        expect(")");
        return node;
      }
      if (t.text == "pi" || t.text == "e") {
        AstPtr node = make(Ast::Number, t.column);
        node->number = t.text == "pi" ? std::numbers::pi : std::numbers::e;
        return node;
      }
      if (t.text == "i") return make(Ast::Imag, t.column);
      if (t.text.size() > 1 && t.text[0] == 'z') {
        const std::string digits = t.text.substr(1);
        bool ok = digits[0] != '0';
        for (char c : digits) ok = ok && std::isdigit(static_cast<unsigned char>(c));
        if (ok && digits.size() < 4) {
          AstPtr node = make(Ast::Var, t.column);
          node->var = std::stoi(digits) - 1;
          max_var_ = std::max(max_var_, node->var + 1);
          return node;
        }
      }
      throw ParseError("unknown identifier '" + t.text + "'", t.column);
    }
    if (t.kind == Tok::End) throw ParseError("unexpected end of input", t.column);
    throw ParseError("unexpected '" + t.text + "'", t.column);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int max_var_ = 0;
};

// Complex value as a pair of real fields; empty fields are zero. Constants
// are folded until they meet a variable.
struct Value {
  std::optional<cplx> k;
  ScalarField re, im;
};

class Builder {
 public:
  explicit Builder(int n) : n_(n) {}

  Value build(const Ast& a) {
    switch (a.kind) {
      case Ast::Number: return konst(a.number);
      case Ast::Imag: return konst(cplx(0.0, 1.0));
      case Ast::Var: {
        Value v;
        v.re = ScalarField::re(n_, a.var);
        v.im = ScalarField::im(n_, a.var);
        return v;
      }
      case Ast::Neg: return scale(build(*a.a), -1.0);
      case Ast::Add: return add(build(*a.a), build(*a.b));
      case Ast::Sub: return add(build(*a.a), scale(build(*a.b), -1.0));
      case Ast::Mul: return mul(build(*a.a), build(*a.b));
      case Ast::Div: return div(build(*a.a), build(*a.b), a.column);
      case Ast::Pow: return power(*a.a, *a.b, a.column);
      case Ast::Call: return call(a);
    }
    throw ParseError("internal: unknown node", a.column);
  }

  ScalarField real(const Value& v) const {
    if (v.k) return ScalarField::constant(n_, v.k->real());
    return v.re.empty() ? ScalarField::constant(n_, 0.0) : v.re;
  }

 private:
  static Value konst(cplx c) {
    Value v;
    v.k = c;
    return v;
  }

  ScalarField re_of(const Value& v) const {
    if (v.k) return v.k->real() == 0.0 ? ScalarField() : ScalarField::constant(n_, v.k->real());
    return v.re;
  }
  ScalarField im_of(const Value& v) const {
    if (v.k) return v.k->imag() == 0.0 ? ScalarField() : ScalarField::constant(n_, v.k->imag());
    return v.im;
  }

  static ScalarField sum(const ScalarField& a, const ScalarField& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + b;
  }
  static ScalarField diff(const ScalarField& a, const ScalarField& b) {
    if (b.empty()) return a;
    if (a.empty()) return -b;
    return a - b;
  }
  static ScalarField prod(const ScalarField& a, const ScalarField& b) {
    if (a.empty() || b.empty()) return ScalarField();
    return a * b;
  }

  static Value fields(ScalarField re, ScalarField im) {
    Value v;
    v.re = std::move(re);
    v.im = std::move(im);
    return v;
  }

  Value scale(const Value& v, double c) const {
    if (v.k) return konst(*v.k * c);
    return fields(v.re.empty() ? v.re : v.re * c, v.im.empty() ? v.im : v.im * c);
  }

  Value add(const Value& a, const Value& b) const {
    if (a.k && b.k) return konst(*a.k + *b.k);
    return fields(sum(re_of(a), re_of(b)), sum(im_of(a), im_of(b)));
  }

  Value mul(const Value& a, const Value& b) const {
    if (a.k && b.k) return konst(*a.k * *b.k);
    if (a.k && a.k->imag() == 0.0) return scale(b, a.k->real());
    if (b.k && b.k->imag() == 0.0) return scale(a, b.k->real());
    const ScalarField ar = re_of(a), ai = im_of(a), br = re_of(b), bi = im_of(b);
    return fields(diff(prod(ar, br), prod(ai, bi)), sum(prod(ar, bi), prod(ai, br)));
  }

  Value div(const Value& a, const Value& b, int col) const {
    if (b.k) {
      if (*b.k == cplx(0.0)) throw ParseError("division by zero", col);
      return mul(a, konst(1.0 / *b.k));
    }
    const ScalarField br = re_of(b), bi = im_of(b);
    if (bi.empty()) {
      const ScalarField inv = ScalarField::constant(n_, 1.0) / br;
      return mul(a, fields(inv, ScalarField()));
    }
    const ScalarField den = ScalarField::constant(n_, 1.0) / sum(prod(br, br), prod(bi, bi));
    return mul(mul(a, fields(br, -bi)), fields(den, ScalarField()));
  }

  Value power(const Ast& base_ast, const Ast& exp_ast, int col) {
    const Value e = build(exp_ast);
    if (!e.k || e.k->imag() != 0.0) throw ParseError("exponent must be a real constant", col);
    const double p = e.k->real();
    const Value base = build(base_ast);
    if (base.k) return konst(std::pow(*base.k, p));
    if (p == std::round(p) && std::abs(p) <= 64) {
      auto k = static_cast<long>(std::abs(p));
      Value acc = konst(1.0), sq = base;
      while (k > 0) {
        if (k & 1) acc = mul(acc, sq);
        k >>= 1;
        if (k > 0) sq = mul(sq, sq);
      }
      return p < 0 ? div(konst(1.0), acc, col) : acc;
    }
    if (!im_of(base).empty()) throw ParseError("non-integer power of a complex quantity", col);
    return fields(levilab::pow(re_of(base), p), ScalarField());
  }

  Value call(const Ast& a) {
    const Value v = build(*a.a);
    const std::string& f = a.name;
    if (f == "abs2" && a.a->kind == Ast::Var) return fields(ScalarField::abs2(n_, a.a->var), ScalarField());
    if (v.k) {
      const cplx c = *v.k;
      if (f == "conj") return konst(std::conj(c));
      if (f == "re") return konst(c.real());
      if (f == "im") return konst(c.imag());
      if (f == "abs2") return konst(std::norm(c));
      if (f == "exp") return konst(std::exp(c));
      if (c.imag() != 0.0) throw ParseError(f + " of a complex argument is unsupported", a.column);
      if (f == "log") {
        if (!(c.real() > 0.0)) throw ParseError("log of a nonpositive constant", a.column);
        return konst(std::log(c.real()));
      }
      if (f == "sin") return konst(std::sin(c.real()));
      return konst(std::cos(c.real()));
    }
    const ScalarField re = re_of(v), im = im_of(v);
    if (f == "conj") return fields(re, im.empty() ? im : -im);
    if (f == "re") return fields(re, ScalarField());
    if (f == "im") return fields(im, ScalarField());
    if (f == "abs2") return fields(sum(prod(re, re), prod(im, im)), ScalarField());
    if (f == "exp") {
      if (im.empty()) return fields(levilab::exp(re), ScalarField());
      const ScalarField mod = re.empty() ? ScalarField::constant(n_, 1.0) : levilab::exp(re);
      return fields(mod * levilab::cos(im), mod * levilab::sin(im));
    }
    if (!im.empty()) throw ParseError(f + " of a complex argument is unsupported", a.column);
    const ScalarField x = re.empty() ? ScalarField::constant(n_, 0.0) : re;
    if (f == "log") return fields(levilab::log(x), ScalarField());
    if (f == "sin") return fields(levilab::sin(x), ScalarField());
    return fields(levilab::cos(x), ScalarField());
  }

  int n_;
};

}  // namespace

ScalarField parse_field_expression(const std::string& text, int n) {
  Parser parser(tokenize(text));
  const AstPtr ast = parser.parse();
  const int dim = std::max(n, parser.max_var());
  if (dim < 1) throw ParseError("expression has no variables", 1);
  Builder builder(dim);
  const Value v = builder.build(*ast);
  if (v.k) {
    if (v.k->imag() != 0.0) throw ParseError("expression is not real-valued", 1);
  } else if (!v.im.empty()) {
    // Structurally complex; accept when the imaginary part vanishes numerically.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
      CPoint z(dim);
      for (int j = 0; j < dim; ++j) z[j] = cplx(unit(rng), unit(rng));
      double re = 0.0, im = 0.0;
      try {
        re = v.re.empty() ? 0.0 : v.re.value(z);
        im = v.im.value(z);
      } catch (const EvaluationError&) {
        continue;
      }
      if (std::abs(im) > 1e-10 * std::max(1.0, std::abs(re))) {
        throw ParseError("expression is not real-valued", 1);
      }
    }
  }
  return builder.real(v).named(text);
}

}  // namespace levilab

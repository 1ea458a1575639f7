#pragma once

#include <cctype>
#include <charconv>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shannop/error.hpp"
#include "shannop/symbols.hpp"

namespace shannop {

// Grammar (axis indices are 1-based):
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := '-' factor | number | atom | '(' expr ')'
//   atom   := id | nlap | grad | div | leray | ilap | ilap(alpha)
//           | xi(i) | xiinv(i) | delta(i,j)
// Generators without an intrinsic size (id, xi, xiinv, delta, ilap, nlap and
// bare numbers) take their size from the neighbouring operands, falling back
// to the default arity.

struct ParseOptions {
  int dim = 2;            ///< grid dimension, sizes grad/div/leray
  int arity = 1;          ///< fallback size of identity-like generators
  double alpha = 1.0;     ///< parameter of a bare `ilap`
};

namespace detail {

struct ParseNode {
  enum class Kind { number, id, xi, xi_inv, delta, ilap, nlap, grad, div, leray, sum, diff, product, negate };
  Kind kind;
  std::size_t pos = 0;
  double value = 0.0;
  int i = 0;
  int j = 0;
  std::vector<std::unique_ptr<ParseNode>> kids;
};

struct Shape {
  std::optional<int> rows;
  std::optional<int> cols;
  bool flexible = false;  ///< square of any size
  int min_size = 1;
};

class SymbolParser {
 public:
  SymbolParser(std::string_view text, ParseOptions opt) : s_(text), opt_(opt) {}

  SymbolExpr run() {
    auto root = expr();
    skip_ws();
    if (p_ != s_.size()) fail("unexpected '" + std::string(1, s_[p_]) + "'");
    const Shape sh = shape(*root);
    const int r = sh.rows.value_or(std::max(sh.min_size, opt_.arity));
    const int c = sh.cols.value_or(sh.flexible ? r : std::max(sh.min_size, opt_.arity));
    return build(*root, r, c);
  }

 private:
  using Node = ParseNode;
  using Kind = ParseNode::Kind;

  std::string_view s_;
  ParseOptions opt_;
  std::size_t p_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::optional<std::size_t> at = std::nullopt) const {
    const std::size_t pos = at.value_or(p_);
    throw ParseError(msg, pos);
  }

  void skip_ws() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }

  bool eat(char c) {
    skip_ws();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  static std::unique_ptr<Node> make(Kind k, std::size_t pos) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->pos = pos;
    return n;
  }

  std::unique_ptr<Node> expr() {
    auto left = term();
    for (;;) {
      skip_ws();
      const std::size_t at = p_;
      if (eat('+')) {
        auto n = make(Kind::sum, at);
        n->kids.push_back(std::move(left));
        n->kids.push_back(term());
        left = std::move(n);
      } else if (eat('-')) {
        auto n = make(Kind::diff, at);
        n->kids.push_back(std::move(left));
        n->kids.push_back(term());
        left = std::move(n);
      } else {
        return left;
      }
    }
  }

  std::unique_ptr<Node> term() {
    auto first = factor();
    skip_ws();
    if (p_ >= s_.size() || s_[p_] != '*') return first;
    auto n = make(Kind::product, first->pos);
    n->kids.push_back(std::move(first));
    while (eat('*')) n->kids.push_back(factor());
    return n;
  }

  double number() {
    skip_ws();
    const std::size_t start = p_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + p_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number", start);
    p_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  int index() {
    skip_ws();
    const std::size_t at = p_;
    const double v = number();
    if (v != static_cast<int>(v) || v < 1 || v > kMaxDim) fail("axis index must be 1, 2 or 3", at);
    return static_cast<int>(v) - 1;
  }

  std::unique_ptr<Node> factor() {
    skip_ws();
    const std::size_t at = p_;
    if (p_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[p_];
    if (c == '-') {
      ++p_;
      auto n = make(Kind::negate, at);
      n->kids.push_back(factor());
      return n;
    }
    if (c == '(') {
      ++p_;
      auto n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto n = make(Kind::number, at);
      n->value = number();
      return n;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");
    while (p_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[p_]))) ++p_;
    const std::string_view word = s_.substr(at, p_ - at);
    if (word == "id") return make(Kind::id, at);
    if (word == "nlap") return make(Kind::nlap, at);
    if (word == "grad") return make(Kind::grad, at);
    if (word == "div") return make(Kind::div, at);
    if (word == "leray") return make(Kind::leray, at);
    if (word == "ilap") {
      auto n = make(Kind::ilap, at);
      n->value = opt_.alpha;
      if (eat('(')) {
        n->value = number();
        expect(')');
      }
      if (n->value < 0.0) fail("ilap needs alpha >= 0", at);
      return n;
    }
    if (word == "xi" || word == "xiinv") {
      auto n = make(word == "xi" ? Kind::xi : Kind::xi_inv, at);
      expect('(');
      n->i = index();
      expect(')');
      return n;
    }
    if (word == "delta") {
      auto n = make(Kind::delta, at);
      expect('(');
      n->i = index();
      expect(',');
      n->j = index();
      expect(')');
      return n;
    }
    fail("unknown symbol '" + std::string(word) + "'", at);
  }

  Shape shape(const Node& n) const {
    switch (n.kind) {
      case Kind::number:
      case Kind::id:
      case Kind::xi:
      case Kind::xi_inv:
      case Kind::ilap:
      case Kind::nlap:
        return {std::nullopt, std::nullopt, true, 1};
      case Kind::delta:
        return {std::nullopt, std::nullopt, true, std::max(n.i, n.j) + 1};
      case Kind::grad:
        return {opt_.dim, 1, false, 1};
      case Kind::div:
        return {1, opt_.dim, false, 1};
      case Kind::leray:
        return {opt_.dim, opt_.dim, false, 1};
      case Kind::negate:
        return shape(*n.kids[0]);
      case Kind::sum:
      case Kind::diff: {
        Shape out{std::nullopt, std::nullopt, true, 1};
        for (const auto& k : n.kids) {
          const Shape s = shape(*k);
          out.min_size = std::max(out.min_size, s.min_size);
          if (s.rows) {
            if (out.rows && *out.rows != *s.rows) fail("operands of '+' have different row counts", n.pos);
            out.rows = s.rows;
          }
          if (s.cols) {
            if (out.cols && *out.cols != *s.cols) fail("operands of '+' have different column counts", n.pos);
            out.cols = s.cols;
          }
          out.flexible = out.flexible && s.flexible;
        }
        if (out.flexible) return out;
        if (!out.rows) out.rows = out.cols;
        if (!out.cols) out.cols = out.rows;
        return out;
      }
      case Kind::product: {
        const auto sizes = boundaries(n, std::nullopt, std::nullopt);
        Shape out{sizes.front(), sizes.back(), false, 1};
        if (!out.rows && !out.cols) {
          out.flexible = true;
          for (const auto& k : n.kids) out.min_size = std::max(out.min_size, shape(*k).min_size);
        }
        return out;
      }
    }
    return {};
  }

  // Sizes s_0..s_k around the factors of a product; factor f maps s_{f+1} to s_f.
  std::vector<std::optional<int>> boundaries(const Node& n, std::optional<int> rows, std::optional<int> cols) const {
    const std::size_t k = n.kids.size();
    std::vector<std::optional<int>> s(k + 1);
    std::vector<Shape> shapes;
    for (const auto& kid : n.kids) shapes.push_back(shape(*kid));
    auto pin = [&](std::size_t idx, int v, std::size_t pos) {
      if (s[idx] && *s[idx] != v) fail("inner dimensions of '*' do not match", pos);
      s[idx] = v;
    };
    if (rows) s[0] = rows;
    if (cols) s[k] = cols;
    for (std::size_t f = 0; f < k; ++f) {
      if (shapes[f].rows) pin(f, *shapes[f].rows, n.kids[f]->pos);
      if (shapes[f].cols) pin(f + 1, *shapes[f].cols, n.kids[f]->pos);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t f = 0; f < k; ++f) {
        if (!shapes[f].flexible) continue;
        if (s[f] && !s[f + 1]) {
          s[f + 1] = s[f];
          changed = true;
        } else if (!s[f] && s[f + 1]) {
          s[f] = s[f + 1];
          changed = true;
        } else if (s[f] && s[f + 1] && *s[f] != *s[f + 1]) {
          fail("operand cannot be sized consistently", n.kids[f]->pos);
        }
      }
    }
    return s;
  }

  SymbolExpr build(const Node& n, int rows, int cols) const {
    auto square = [&](int min_size) {
      if (rows != cols) fail("square operand used where a " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 " symbol is required",
                             n.pos);
      if (rows < min_size) fail("operand needs size at least " + std::to_string(min_size), n.pos);
      return rows;
    };
    auto fixed = [&](int r, int c) {
      if (r != rows || c != cols)
        fail("operand is " + std::to_string(r) + "x" + std::to_string(c) + " but " + std::to_string(rows) + "x" +
                 std::to_string(cols) + " is required",
             n.pos);
    };
    switch (n.kind) {
      case Kind::number:
        return SymbolExpr::constant(RMatrix::Identity(square(1), cols) * n.value);
      case Kind::id:
        return SymbolExpr::identity(square(1));
      case Kind::xi:
        return SymbolExpr::xi(n.i, square(1));
      case Kind::xi_inv:
        return SymbolExpr::xi_inv(n.i, square(1));
      case Kind::delta:
        return SymbolExpr::delta(n.i, n.j, square(std::max(n.i, n.j) + 1));
      case Kind::ilap:
        return SymbolExpr::implicit_laplacian(n.value, square(1));
      case Kind::nlap:
        return SymbolExpr::neg_laplacian(square(1));
      case Kind::grad:
        fixed(opt_.dim, 1);
        return SymbolExpr::gradient(opt_.dim);
      case Kind::div:
        fixed(1, opt_.dim);
        return SymbolExpr::divergence(opt_.dim);
      case Kind::leray:
        fixed(opt_.dim, opt_.dim);
        return SymbolExpr::leray(opt_.dim);
      case Kind::negate:
        return -1.0 * build(*n.kids[0], rows, cols);
      case Kind::sum:
        return build(*n.kids[0], rows, cols) + build(*n.kids[1], rows, cols);
      case Kind::diff:
        return build(*n.kids[0], rows, cols) - build(*n.kids[1], rows, cols);
      case Kind::product: {
        auto s = boundaries(n, rows, cols);
        // Unpinned inner sizes fall back to the default arity.
        for (auto& v : s)
          if (!v) v = opt_.arity;
        SymbolExpr out;
        for (std::size_t f = 0; f < n.kids.size(); ++f) {
          const Node& kid = *n.kids[f];
          if (kid.kind == Kind::number) {
            if (*s[f] != *s[f + 1]) fail("scalar factor between mismatched sizes", kid.pos);
            out = kid.value * (out.empty() ? SymbolExpr::identity(*s[f]) : out);
            continue;
          }
          const SymbolExpr e = build(kid, *s[f], *s[f + 1]);
          out = out.empty() ? e : out * e;
        }
        return out;
      }
    }
    fail("internal parser error", n.pos);
  }
};

}  // namespace detail

/// Parse the textual symbol grammar. Errors carry the character offset.
inline SymbolExpr parse_symbol(std::string_view text, const ParseOptions& opt = {}) {
  if (opt.dim < 1 || opt.dim > kMaxDim) throw StructuralError("parse dimension must be 1..3");
  if (opt.arity < 1) throw StructuralError("parse arity must be positive");
  return detail::SymbolParser(text, opt).run();
}

}  // namespace shannop

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <concepts>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "shannop/error.hpp"
#include "shannop/grid.hpp"

namespace shannop {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// What to do where an XiInv factor or the Leray denominator vanishes.
enum class SingularModePolicy {
  zero,   ///< the symbol evaluates to the zero matrix
  skip,   ///< the operator leaves the mode untouched (square symbols only)
  error,  ///< throw SingularModeError
};

/// Constant-coefficient operator symbol xi -> C^{rows x cols}, an immutable
/// expression tree. Every generator satisfies M(-xi) = conj(M(xi)) and the
/// sum/product/real-scale algebra preserves it, so every SymbolExpr does.
///
/// Axes are 0-based here; the text grammar in symbol_parser.hpp is 1-based.
class SymbolExpr {
 public:
  enum class Kind {
    constant,
    xi,
    xi_inv,
    delta,
    sum,
    product,
    scale,
    implicit_laplacian,
    neg_laplacian,
    gradient,
    divergence,
    leray,
  };

  SymbolExpr() = default;

  Kind kind() const { return node_->kind; }
  int rows() const { return node_->rows; }
  int cols() const { return node_->cols; }
  bool square() const { return rows() == cols(); }
  bool empty() const { return node_ == nullptr; }
  /// alpha of an implicit Laplacian node, the factor of a scale node.
  double parameter() const { return node_->scalar; }

  /// Smallest wavevector dimension the expression can be evaluated at.
  int required_dim() const { return required_dim(*node_); }

  // Generators.
  static SymbolExpr constant(const RMatrix& m) {
    auto n = make(Kind::constant, static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    n->matrix = m;
    return SymbolExpr(std::move(n));
  }
  static SymbolExpr identity(int n) { return constant(RMatrix::Identity(n, n)); }
  static SymbolExpr xi(int axis, int n = 1) { return axis_node(Kind::xi, axis, n); }
  static SymbolExpr xi_inv(int axis, int n = 1) { return axis_node(Kind::xi_inv, axis, n); }
  static SymbolExpr delta(int i, int j, int n) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw StructuralError("delta index out of range");
    auto node = make(Kind::delta, n, n);
    node->i = i;
    node->j = j;
    return SymbolExpr(std::move(node));
  }
  static SymbolExpr implicit_laplacian(double alpha, int n = 1) {
    if (alpha < 0.0) throw StructuralError("implicit Laplacian needs alpha >= 0");
    auto node = make(Kind::implicit_laplacian, n, n);
    node->scalar = alpha;
    return SymbolExpr(std::move(node));
  }
  static SymbolExpr neg_laplacian(int n = 1) { return SymbolExpr(make(Kind::neg_laplacian, n, n)); }
  static SymbolExpr gradient(int d) { return dim_node(Kind::gradient, d, d, 1); }
  static SymbolExpr divergence(int d) { return dim_node(Kind::divergence, d, 1, d); }
  static SymbolExpr leray(int d) { return dim_node(Kind::leray, d, d, d); }

  friend SymbolExpr operator+(const SymbolExpr& a, const SymbolExpr& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      throw StructuralError("sum of symbols with different shapes");
    auto n = make(Kind::sum, a.rows(), a.cols());
    n->lhs = a.node_;
    n->rhs = b.node_;
    return SymbolExpr(std::move(n));
  }
  friend SymbolExpr operator*(const SymbolExpr& a, const SymbolExpr& b) {
    if (a.cols() != b.rows()) throw StructuralError("product of symbols with mismatched inner dimensions");
    auto n = make(Kind::product, a.rows(), b.cols());
    n->lhs = a.node_;
    n->rhs = b.node_;
    return SymbolExpr(std::move(n));
  }
  friend SymbolExpr operator*(double s, const SymbolExpr& a) {
    auto n = make(Kind::scale, a.rows(), a.cols());
    n->scalar = s;
    n->lhs = a.node_;
    return SymbolExpr(std::move(n));
  }
  friend SymbolExpr operator-(const SymbolExpr& a, const SymbolExpr& b) { return a + (-1.0) * b; }

  /// Evaluate at k; `singular` is set when any singular factor was hit.
  /// Singular XiInv factors contribute zero, a singular Leray node the identity.
  CMatrix evaluate(const Wavevector& k, bool& singular) const { return eval_node(*node_, k, singular); }

  /// Zero-policy evaluation, handy as a plain callable.
  CMatrix operator()(const Wavevector& k) const {
    bool singular = false;
    CMatrix m = evaluate(k, singular);
    if (singular) m.setZero();
    return m;
  }

  bool is_constructible() const {
    if (!square()) throw StructuralError("constructibility is defined for square symbols");
    return constructible(*node_);
  }

  std::string str() const { return to_string(*node_); }

 private:
  struct Node {
    Kind kind;
    int rows = 0;
    int cols = 0;
    RMatrix matrix;
    int axis = 0;
    int i = 0;
    int j = 0;
    int dim = 0;
    double scalar = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit SymbolExpr(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<Node> make(Kind kind, int rows, int cols) {
    if (rows < 1 || cols < 1) throw StructuralError("symbol dimensions must be positive");
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->rows = rows;
    n->cols = cols;
    return n;
  }
  static SymbolExpr axis_node(Kind kind, int axis, int n) {
    if (axis < 0 || axis >= kMaxDim) throw StructuralError("axis out of range");
    auto node = make(kind, n, n);
    node->axis = axis;
    return SymbolExpr(std::move(node));
  }
  static SymbolExpr dim_node(Kind kind, int d, int rows, int cols) {
    if (d < 1 || d > kMaxDim) throw StructuralError("dimension out of range");
    auto node = make(kind, rows, cols);
    node->dim = d;
    return SymbolExpr(std::move(node));
  }

  static int required_dim(const Node& n) {
    switch (n.kind) {
      case Kind::xi:
      case Kind::xi_inv:
        return n.axis + 1;
      case Kind::gradient:
      case Kind::divergence:
      case Kind::leray:
        return n.dim;
      case Kind::sum:
      case Kind::product:
        return std::max(required_dim(*n.lhs), required_dim(*n.rhs));
      case Kind::scale:
        return required_dim(*n.lhs);
      default:
        return 1;
    }
  }

  static void check_dim(const Wavevector& k, int needed) {
    if (k.dim < needed) throw StructuralError("wavevector dimension too small for symbol");
  }

  static CMatrix eval_node(const Node& n, const Wavevector& k, bool& singular) {
    using namespace std::complex_literals;
    switch (n.kind) {
      case Kind::constant:
        return n.matrix.cast<cplx>();
      case Kind::xi:
        check_dim(k, n.axis + 1);
        return CMatrix::Identity(n.rows, n.cols) * (1i * k.odd(n.axis));
      case Kind::xi_inv: {
        check_dim(k, n.axis + 1);
        const double x = k.odd(n.axis);
        if (x == 0.0) {
          singular = true;
          return CMatrix::Zero(n.rows, n.cols);
        }
        return CMatrix::Identity(n.rows, n.cols) * (1.0 / (1i * x));
      }
      case Kind::delta: {
        CMatrix m = CMatrix::Zero(n.rows, n.cols);
        m(n.i, n.j) = 1.0;
        return m;
      }
      case Kind::sum:
        return eval_node(*n.lhs, k, singular) + eval_node(*n.rhs, k, singular);
      case Kind::product:
        return eval_node(*n.lhs, k, singular) * eval_node(*n.rhs, k, singular);
      case Kind::scale:
        return n.scalar * eval_node(*n.lhs, k, singular);
      case Kind::implicit_laplacian:
        return CMatrix::Identity(n.rows, n.cols) * cplx(1.0 + n.scalar * k.norm2());
      case Kind::neg_laplacian:
        return CMatrix::Identity(n.rows, n.cols) * cplx(k.norm2());
      case Kind::gradient:
      case Kind::divergence: {
        check_dim(k, n.dim);
        CMatrix m(n.rows, n.cols);
        for (int a = 0; a < n.dim; ++a) m(a % n.rows, a % n.cols) = 1i * k.odd(a);
        return m;
      }
      case Kind::leray: {
        check_dim(k, n.dim);
        CMatrix m = CMatrix::Identity(n.dim, n.dim);
        const double q = [&] {
          double s = 0.0;
          for (int a = 0; a < n.dim; ++a) s += k.odd(a) * k.odd(a);
          return s;
        }();
        if (q == 0.0) {
          singular = true;
          return m;
        }
        for (int a = 0; a < n.dim; ++a)
          for (int b = 0; b < n.dim; ++b) m(a, b) -= k.odd(a) * k.odd(b) / q;
        return m;
      }
    }
    throw StructuralError("unknown symbol node");
  }

  static bool constructible(const Node& n) {
    switch (n.kind) {
      case Kind::sum:
      case Kind::product:
        return constructible(*n.lhs) && constructible(*n.rhs);
      case Kind::scale:
        return constructible(*n.lhs);
      case Kind::leray:
        // 1/|xi|^2 is not a Laurent polynomial in xi_1..xi_d for d >= 2.
        return n.dim == 1;
      default:
        return true;
    }
  }

  static std::string to_string(const Node& n) {
    std::ostringstream os;
    switch (n.kind) {
      case Kind::constant:
        if (n.matrix.isIdentity()) {
          os << "id";
        } else {
          os << "const[";
          for (int r = 0; r < n.rows; ++r) {
            if (r) os << ";";
            for (int c = 0; c < n.cols; ++c) os << (c ? "," : "") << n.matrix(r, c);
          }
          os << "]";
        }
        break;
      case Kind::xi: os << "xi(" << n.axis + 1 << ")"; break;
      case Kind::xi_inv: os << "xiinv(" << n.axis + 1 << ")"; break;
      case Kind::delta: os << "delta(" << n.i + 1 << "," << n.j + 1 << ")"; break;
      case Kind::sum: os << "(" << to_string(*n.lhs) << " + " << to_string(*n.rhs) << ")"; break;
      case Kind::product: os << to_string(*n.lhs) << " * " << to_string(*n.rhs); break;
      case Kind::scale: os << n.scalar << " * " << to_string(*n.lhs); break;
      case Kind::implicit_laplacian: os << "ilap(" << n.scalar << ")"; break;
      case Kind::neg_laplacian: os << "nlap"; break;
      case Kind::gradient: os << "grad"; break;
      case Kind::divergence: os << "div"; break;
      case Kind::leray: os << "leray"; break;
    }
    return os.str();
  }

  std::shared_ptr<const Node> node_;
};

/// Anything that maps a wavevector to a complex matrix.
template <class S>
concept SymbolLike = requires(const S& s, const Wavevector& k) {
  { s(k) } -> std::convertible_to<CMatrix>;
};

/// Evaluate e at k under a singular-mode policy. Returns nullopt when the
/// policy is `skip` and k is singular.
inline std::optional<CMatrix> eval_symbol(const SymbolExpr& e, const Wavevector& k,
                                          SingularModePolicy policy = SingularModePolicy::error) {
  bool singular = false;
  CMatrix m = e.evaluate(k, singular);
  if (!singular) return m;
  switch (policy) {
    case SingularModePolicy::zero:
      return CMatrix::Zero(e.rows(), e.cols());
    case SingularModePolicy::skip:
      return std::nullopt;
    case SingularModePolicy::error:
      break;
  }
  throw SingularModeError("symbol " + e.str() + " is singular at mode " + k.str());
}

/// Moore-Penrose pseudo-inverse.
inline CMatrix pseudo_inverse(const CMatrix& m) {
  if (m.rows() == 1 && m.cols() == 1) {
    CMatrix r(1, 1);
    r(0, 0) = (m(0, 0) == cplx(0.0)) ? cplx(0.0) : 1.0 / m(0, 0);
    return r;
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol = std::max(m.rows(), m.cols()) * (s.size() ? s(0) : 0.0) *
                     std::numeric_limits<double>::epsilon();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

inline CMatrix pseudo_inverse(const RMatrix& m) { return pseudo_inverse(CMatrix(m.cast<cplx>())); }

/// Sample random continuous modes and check M(-xi) = conj(M(xi)) to 1e-12.
inline bool reality_check(const SymbolExpr& e, int samples, int dim = 0, std::uint64_t seed = 20070401) {
  const int d = std::max(dim, e.required_dim());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-16.0, 16.0);
  for (int s = 0; s < samples; ++s) {
    Wavevector k;
    k.dim = d;
    for (int i = 0; i < d; ++i) k.k[i] = coord(rng);
    bool sing_pos = false;
    bool sing_neg = false;
    const CMatrix plus = e.evaluate(k, sing_pos);
    const CMatrix minus = e.evaluate(-k, sing_neg);
    if (sing_pos || sing_neg) continue;
    const double scale = 1.0 + plus.norm();
    if ((minus - plus.conjugate()).norm() > 1e-12 * scale) return false;
  }
  return true;
}

inline bool is_constructible(const SymbolExpr& e) { return e.is_constructible(); }

}  // namespace shannop

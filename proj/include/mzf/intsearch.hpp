#pragma once

// Solvers for the even-integer closest vector problem
//
//   min_q || b - q B ||^2,   q in (2Z)^K,
//
// with b a row vector of length n and B a K x n generator (n >= K).
// Writing q = 2m turns this into a CVP on the lattice spanned by the rows of 2B.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mzf/alphabet.hpp"
#include "mzf/channel.hpp"
#include "mzf/error.hpp"

namespace mzf {

using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct IlsProblem {
  RowVector b;
  Matrix B;  ///< K x n
};

/// LLL-reduced column basis: reduced = original * T, T unimodular.
struct ReducedBasis {
  Matrix original;
  Matrix reduced;
  IntMatrix T;
  double delta = 0.75;
};

struct IlsSolution {
  IntVector q;
  double cost = 0.0;
  bool exact = false;
  long long nodes_visited = 0;
};

inline constexpr double kDefaultLllDelta = 0.75;
inline constexpr long long kDefaultSdBudget = 1'000'000;

inline double ils_cost(const IlsProblem& p, const IntVector& q) {
  return (p.b - q.cast<double>().transpose() * p.B).squaredNorm();
}

namespace detail {

struct GramSchmidt {
  Matrix mu;       // mu(i, j) for j < i
  Vector norm2;    // ||b*_i||^2
};

inline GramSchmidt gram_schmidt(const Matrix& basis) {
  const auto n = basis.cols();
  GramSchmidt gs{Matrix::Zero(n, n), Vector::Zero(n)};
  Matrix star = basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double mu = basis.col(i).dot(star.col(j)) / gs.norm2(j);
      gs.mu(i, j) = mu;
      star.col(i) -= mu * star.col(j);
    }
    gs.norm2(i) = star.col(i).squaredNorm();
  }
  return gs;
}

}  // namespace detail

/// LLL reduction of the columns of `basis` with Lovasz parameter delta in (0.25, 1].
inline ReducedBasis lll_reduce(const Matrix& basis, double delta = kDefaultLllDelta) {
  if (!(delta > 0.25 && delta <= 1.0))
    throw ConfigError("lll_reduce: delta must lie in (0.25, 1], got " + std::to_string(delta));
  const auto n = basis.cols();
  ReducedBasis rb{basis, basis, IntMatrix::Identity(n, n), delta};
  if (n == 0) return rb;

  auto gs = detail::gram_schmidt(rb.reduced);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double len2 = basis.col(i).squaredNorm();
    if (!(gs.norm2(i) > 1e-20 * std::max(len2, 1e-300)) || !std::isfinite(gs.norm2(i)))
      throw RankError("lll_reduce: column " + std::to_string(i) + " is linearly dependent on earlier columns",
                      static_cast<int>(i));
  }

  Eigen::Index k = 1;
  long long guard = 0;
  const long long max_iter = 100000LL * (n + 1);
  while (k < n) {
    if (++guard > max_iter) throw std::runtime_error("lll_reduce: no convergence");
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double r = std::nearbyint(gs.mu(k, j));
      if (r == 0.0) continue;
      rb.reduced.col(k) -= r * rb.reduced.col(j);
      rb.T.col(k) -= static_cast<long long>(r) * rb.T.col(j);
      for (Eigen::Index i = 0; i < j; ++i) gs.mu(k, i) -= r * gs.mu(j, i);
      gs.mu(k, j) -= r;
    }
    const double m = gs.mu(k, k - 1);
    if (gs.norm2(k) >= (delta - m * m) * gs.norm2(k - 1)) {
      ++k;
    } else {
      rb.reduced.col(k).swap(rb.reduced.col(k - 1));
      rb.T.col(k).swap(rb.T.col(k - 1));
      gs = detail::gram_schmidt(rb.reduced);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  return rb;
}

/// Size-reduction and Lovasz conditions, checked on a fresh Gram-Schmidt pass.
inline bool is_lll_reduced(const Matrix& basis, double delta, double tol = 1e-9) {
  const auto gs = detail::gram_schmidt(basis);
  for (Eigen::Index i = 1; i < basis.cols(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::abs(gs.mu(i, j)) > 0.5 + tol) return false;
    const double m = gs.mu(i, i - 1);
    if (gs.norm2(i) < (delta - m * m) * gs.norm2(i - 1) * (1.0 - tol)) return false;
  }
  return true;
}

/// Nearest-plane (Babai) coefficients of target t in the lattice spanned by
/// basis.original, computed on the reduced basis and mapped back through T.
inline IntVector babai_round(const Vector& t, const ReducedBasis& basis) {
  const auto n = basis.reduced.cols();
  Eigen::HouseholderQR<Matrix> qr(basis.reduced);
  const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const Vector y = (qr.householderQ().transpose() * t).head(n);
  IntVector m(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double acc = y(i);
    for (Eigen::Index j = i + 1; j < n; ++j) acc -= r(i, j) * static_cast<double>(m(j));
    m(i) = static_cast<long long>(std::nearbyint(acc / r(i, i)));
  }
  return basis.T * m;
}

/// Reduction and QR of one generator B, shared by every target b of a
/// coherence interval (all layers, all bit layers).
class EvenLatticeSolver {
 public:
  explicit EvenLatticeSolver(Matrix B, double lll_delta = kDefaultLllDelta)
      : B_(std::move(B)), basis_(lll_reduce(B_.transpose(), lll_delta)) {
    qr_ = Eigen::HouseholderQR<Matrix>(basis_.reduced);
    const auto k = basis_.reduced.cols();
    r_ = qr_.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  }

  const Matrix& generator() const { return B_; }
  const ReducedBasis& basis() const { return basis_; }
  Eigen::Index dim() const { return B_.rows(); }

  /// Depth-first Schnorr-Euchner enumeration over the reduced even lattice.
  /// Exact unless the node budget runs out, in which case the best of the
  /// partial search and the LLL rounding is returned with exact = false.
  IlsSolution solve_sd(const RowVector& b, long long budget = kDefaultSdBudget) const {
    if (budget < 1) throw ConfigError("solve_sd: budget must be >= 1");
    const auto k = dim();
    const Vector y = (qr_.householderQ().transpose() * b.transpose()).head(k);

    IntVector best = IntVector::Zero(k);
    double radius = y.squaredNorm();  // tree distance of m = 0

    IntVector m(k);
    Vector center(k);
    Vector dist(k + 1);
    IntVector step(k);
    dist(k) = 0.0;
    long long nodes = 0;
    bool complete = true;

    auto descend = [&](Eigen::Index i) {
      double acc = y(i);
      for (Eigen::Index j = i + 1; j < k; ++j) acc -= 2.0 * r_(i, j) * static_cast<double>(m(j));
      center(i) = acc / (2.0 * r_(i, i));
      m(i) = static_cast<long long>(std::nearbyint(center(i)));
      step(i) = center(i) >= static_cast<double>(m(i)) ? 1 : -1;
    };
    auto next_sibling = [&](Eigen::Index i) {
      m(i) += step(i);
      step(i) = step(i) > 0 ? -step(i) - 1 : -step(i) + 1;
    };

    Eigen::Index i = k - 1;
    descend(i);
    while (true) {
      if (++nodes > budget) {
        complete = false;
        break;
      }
      const double e = 2.0 * r_(i, i) * (center(i) - static_cast<double>(m(i)));
      const double d = dist(i + 1) + e * e;
      if (d < radius) {
        if (i == 0) {
          radius = d;
          best = m;
          next_sibling(0);
        } else {
          dist(i) = d;
          --i;
          descend(i);
        }
      } else {
        ++i;
        if (i >= k) break;
        next_sibling(i);
      }
    }

    IlsSolution sol;
    sol.q = 2 * (basis_.T * best);
    sol.cost = cost(b, sol.q);
    sol.exact = complete;
    sol.nodes_visited = std::min(nodes, budget);
    if (!complete) {
      auto fallback = solve_lll(b);
      if (fallback.cost < sol.cost) {
        sol.q = fallback.q;
        sol.cost = fallback.cost;
      }
    }
    return sol;
  }

  /// LLL-based approximation: z = Q_Z(Bbar^+ b^T), q = Q_2Z(T z); never worse than q = 0.
  IlsSolution solve_lll(const RowVector& b) const {
    const auto k = dim();
    const Vector y = (qr_.householderQ().transpose() * b.transpose()).head(k);
    const Vector coeff = r_.triangularView<Eigen::Upper>().solve(y);
    IntVector z(k);
    for (Eigen::Index i = 0; i < k; ++i) z(i) = quantize_int(coeff(i));
    const IntVector tz = basis_.T * z;
    IlsSolution sol;
    sol.q.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) sol.q(i) = quantize_even_int(static_cast<double>(tz(i)));
    sol.cost = cost(b, sol.q);
    keep_zero_if_better(b, sol);
    return sol;
  }

  /// Nearest plane on the reduced even lattice (the first leaf of solve_sd).
  IlsSolution solve_babai(const RowVector& b) const {
    ReducedBasis even = basis_;
    even.original *= 2.0;
    even.reduced *= 2.0;
    IlsSolution sol;
    sol.q = 2 * babai_round(b.transpose(), even);
    sol.cost = cost(b, sol.q);
    keep_zero_if_better(b, sol);
    return sol;
  }

  double cost(const RowVector& b, const IntVector& q) const {
    return (b - q.cast<double>().transpose() * B_).squaredNorm();
  }

 private:
  void keep_zero_if_better(const RowVector& b, IlsSolution& sol) const {
    const double zero = b.squaredNorm();
    if (zero <= sol.cost) {
      sol.q = IntVector::Zero(dim());
      sol.cost = zero;
    }
  }

  Matrix B_;
  ReducedBasis basis_;
  Eigen::HouseholderQR<Matrix> qr_;
  Matrix r_;
};

inline IlsSolution solve_sd(const IlsProblem& p, long long budget = kDefaultSdBudget,
                            double lll_delta = kDefaultLllDelta) {
  return EvenLatticeSolver(p.B, lll_delta).solve_sd(p.b, budget);
}

/// LLL approximation with a reduction cached from B^T.
inline IlsSolution solve_lll(const IlsProblem& p, const ReducedBasis& cache) {
  const auto k = p.B.rows();
  const Vector coeff = cache.reduced.colPivHouseholderQr().solve(Vector(p.b.transpose()));
  IntVector z(k);
  for (Eigen::Index i = 0; i < k; ++i) z(i) = quantize_int(coeff(i));
  const IntVector tz = cache.T * z;
  IlsSolution sol;
  sol.q.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) sol.q(i) = quantize_even_int(static_cast<double>(tz(i)));
  sol.cost = ils_cost(p, sol.q);
  if (p.b.squaredNorm() <= sol.cost) {
    sol.q = IntVector::Zero(k);
    sol.cost = p.b.squaredNorm();
  }
  return sol;
}

/// Rounding in the unreduced basis: q = Q_2Z(least-squares coefficients of b).
inline IlsSolution solve_babai_only(const IlsProblem& p) {
  const auto k = p.B.rows();
  const Vector coeff = p.B.transpose().colPivHouseholderQr().solve(Vector(p.b.transpose()));
  IlsSolution sol;
  sol.q.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) sol.q(i) = quantize_even_int(coeff(i));
  sol.cost = ils_cost(p, sol.q);
  if (p.b.squaredNorm() <= sol.cost) {
    sol.q = IntVector::Zero(k);
    sol.cost = p.b.squaredNorm();
  }
  return sol;
}

/// Exhaustive search over q in {-bound..bound}^K restricted to even entries.
inline IlsSolution solve_brute(const IlsProblem& p, int bound) {
  const auto k = p.B.rows();
  const long long half = bound / 2;
  const double per_axis = static_cast<double>(2 * half + 1);
  const double points = std::pow(per_axis, static_cast<double>(k));
  if (points > 1e8)
    throw SearchSpaceError("solve_brute: " + std::to_string(points) + " points exceeds the 1e8 guard", points);

  IlsSolution sol;
  sol.q = IntVector::Zero(k);
  sol.cost = p.b.squaredNorm();
  sol.exact = true;
  IntVector q = IntVector::Constant(k, -2 * half);
  RowVector resid(p.b.size());
  while (true) {
    ++sol.nodes_visited;
    resid = p.b - q.cast<double>().transpose() * p.B;
    const double c = resid.squaredNorm();
    if (c < sol.cost) {
      sol.cost = c;
      sol.q = q;
    }
    Eigen::Index i = k - 1;
    while (i >= 0 && q(i) == 2 * half) {
      q(i) = -2 * half;
      --i;
    }
    if (i < 0) break;
    q(i) += 2;
  }
  return sol;
}

}  // namespace mzf

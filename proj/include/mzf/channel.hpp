#pragma once

// Channel construction, complex-to-real embedding, noise and the linear
// equalizer matrices (zero-forcing pseudo-inverse, LMMSE) the detectors use.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

#include "mzf/error.hpp"
#include "mzf/random.hpp"

namespace mzf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Noise spectral density. The real-valued noise has covariance (n0 / 2) I.
struct NoiseSpec {
  double n0 = 0.0;

  double real_variance() const { return n0 / 2.0; }
};

/// N x K complex channel, receive x transmit.
struct ComplexChannel {
  ComplexMatrix entries;

  Eigen::Index rx() const { return entries.rows(); }
  Eigen::Index tx() const { return entries.cols(); }
};

/// [[Re, -Im], [Im, Re]]
inline Matrix embed_complex(const ComplexMatrix& h) {
  const auto n = h.rows();
  const auto k = h.cols();
  Matrix out(2 * n, 2 * k);
  out.topLeftCorner(n, k) = h.real();
  out.topRightCorner(n, k) = -h.imag();
  out.bottomLeftCorner(n, k) = h.imag();
  out.bottomRightCorner(n, k) = h.real();
  return out;
}

/// Real parts stacked over imaginary parts.
inline Vector embed_complex(const ComplexVector& x) {
  Vector out(2 * x.size());
  out.head(x.size()) = x.real();
  out.tail(x.size()) = x.imag();
  return out;
}

/// Kc x Kc complex channel with independent N(0,1) real and imaginary parts,
/// so every entry of the real embedding has unit variance.
inline ComplexChannel generate_channel(RandomStream& rng, int kc) {
  if (kc < 1) throw ConfigError("generate_channel: kc must be >= 1, got " + std::to_string(kc));
  ComplexChannel ch{ComplexMatrix(kc, kc)};
  for (Eigen::Index c = 0; c < kc; ++c) {
    for (Eigen::Index r = 0; r < kc; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      ch.entries(r, c) = {re, im};
    }
  }
  return ch;
}

/// K x K real channel with fully independent N(0,1) entries (no complex block structure).
inline Matrix generate_real_iid_channel(RandomStream& rng, int k) {
  if (k < 1) throw ConfigError("generate_real_iid_channel: k must be >= 1, got " + std::to_string(k));
  Matrix h(k, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < k; ++r) h(r, c) = rng.normal();
  return h;
}

/// Left pseudo-inverse through an SVD. Singular values below
/// 1e-10 * sigma_max are treated as rank deficiency.
inline Matrix pseudo_inverse(const Matrix& h) {
  if (h.rows() < h.cols())
    throw RankError("pseudo_inverse: more columns than rows, no left inverse", static_cast<int>(h.rows()));
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = 1e-10 * (s.size() > 0 ? s(0) : 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(s(i) > tol)) {
      throw RankError("pseudo_inverse: rank deficient, singular value " + std::to_string(i) + " = " +
                          std::to_string(s(i)) + " below tolerance " + std::to_string(tol),
                      static_cast<int>(i));
    }
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

/// H^T (H H^T + n0 I)^{-1}
inline Matrix lmmse_inverse(const Matrix& h, const NoiseSpec& noise) {
  if (noise.n0 < 0.0) throw ConfigError("lmmse_inverse: n0 must be >= 0");
  const Matrix gram = h * h.transpose() + noise.n0 * Matrix::Identity(h.rows(), h.rows());
  Eigen::FullPivLU<Matrix> lu(gram);
  if (!lu.isInvertible())
    throw RankError("lmmse_inverse: H H^T + n0 I is singular", static_cast<int>(lu.rank()));
  return h.transpose() * lu.inverse();
}

/// How the noise block of the interference-plus-noise matrix is weighted.
enum class NoiseWeighting {
  verbatim,  ///< n0 * Hplus
  physical,  ///< sqrt(n0 / 2) * Hplus, the standard deviation actually seen after combining
};

/// [Hplus H - I, w * Hplus] with w chosen by `weighting`.
inline Matrix mmse_error_matrix(const Matrix& hplus, const Matrix& h, const NoiseSpec& noise,
                                NoiseWeighting weighting = NoiseWeighting::verbatim) {
  const auto k = hplus.rows();
  const auto n = hplus.cols();
  if (h.rows() != n || h.cols() != k)
    throw ConfigError("mmse_error_matrix: Hplus is not conformal with H");
  const double w = weighting == NoiseWeighting::verbatim ? noise.n0 : std::sqrt(noise.n0 / 2.0);
  Matrix e(k, k + n);
  e.leftCols(k) = hplus * h - Matrix::Identity(k, k);
  e.rightCols(n) = w * hplus;
  return e;
}

/// y = H x + n, n ~ N(0, n0/2) per entry.
inline Vector apply_channel(const Matrix& h, const Vector& x, const NoiseSpec& noise, RandomStream& rng) {
  Vector y = h * x;
  if (noise.n0 > 0.0) {
    const double sd = std::sqrt(noise.real_variance());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  }
  return y;
}

enum class EqualizerKind { zf, lmmse };

/// Real channel together with its cached linear equalizer.
struct RealChannel {
  Matrix h;
  Matrix hplus;
  EqualizerKind kind = EqualizerKind::zf;

  static RealChannel zero_forcing(Matrix h) {
    Matrix hp = pseudo_inverse(h);
    return {std::move(h), std::move(hp), EqualizerKind::zf};
  }

  static RealChannel lmmse(Matrix h, const NoiseSpec& noise) {
    Matrix w = lmmse_inverse(h, noise);
    return {std::move(h), std::move(w), EqualizerKind::lmmse};
  }

  Eigen::Index layers() const { return h.cols(); }
};

}  // namespace mzf

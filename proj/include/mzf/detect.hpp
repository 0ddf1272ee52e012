#pragma once

// Detector suite. Every detector is split into preprocess(), run once per
// coherence interval, and a detect_*() call per channel observation.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mzf/alphabet.hpp"
#include "mzf/channel.hpp"
#include "mzf/error.hpp"
#include "mzf/intsearch.hpp"
#include "mzf/modarith.hpp"

namespace mzf {

enum class DetectorKind { zf, lmmse, ml, lar, mzf, mzf_ext1, mzf_ext2, mzf_ext3 };
enum class SolverKind { sd, lll, brute };
enum class LarMode { shifted, literal };

inline bool is_modulus_kind(DetectorKind k) {
  return k == DetectorKind::mzf || k == DetectorKind::mzf_ext1 || k == DetectorKind::mzf_ext2 ||
         k == DetectorKind::mzf_ext3;
}

struct DetectorSpec {
  DetectorKind kind = DetectorKind::mzf;
  EqualizerKind equalizer = EqualizerKind::zf;  ///< lmmse on an mzf kind is the LMMSE-based variant
  SolverKind solver = SolverKind::sd;
};

struct DetectorOptions {
  ParityMode parity = ParityMode::derived;
  LarMode lar = LarMode::shifted;
  NoiseWeighting lmmse_noise_weight = NoiseWeighting::physical;
  double lll_delta = kDefaultLllDelta;
  long long sd_budget = kDefaultSdBudget;
  int brute_bound = 8;
};

/// Perturbation for one layer k (and one bit layer in the bit-wise mode).
struct PerturbationPlan {
  int layer = 0;      ///< k, 0-based
  int bit_layer = 0;  ///< n, 1-based; 0 for symbol-wise plans
  IntVector q;
  double tau = 1.0;
  double alpha = 1.0;
  RowVector combining_row;  ///< (tau delta_k + alpha q) Hplus
  bool degenerate = true;
  ModulusParams modulus;
  double cost = 0.0;  ///< ||(tau delta_k + alpha q) A||^2 for the optimized matrix A
  bool exact = true;
};

struct DetectorState {
  DetectorSpec spec;
  RealChannel channel;
  PamAlphabet alphabet;
  NoiseSpec noise;
  DetectorOptions options;
  /// plans[k][n - 1] for the bit-wise kind, plans[k][0] otherwise.
  std::vector<std::vector<PerturbationPlan>> plans;
  std::optional<ReducedBasis> lar_basis;
  Matrix lar_inverse;  ///< pseudo-inverse of the reduced channel
};

struct DetectionResult {
  std::vector<int> symbols;
  std::vector<std::vector<int>> bits;  ///< bits[k][b - 1]
  Vector layer_z;
};

/// q supported only on its own layer: the modulus brings nothing there.
inline bool is_degenerate(const IntVector& q, int k) {
  for (Eigen::Index l = 0; l < q.size(); ++l)
    if (l != k && q(l) != 0) return false;
  return true;
}

struct AlphaChoice {
  double alpha = 1.0;
  IntVector q;
};

/// Scale on the perturbation minimizing ||(tau delta_k + alpha q) A||^2 over
/// alpha >= 1, after absorbing a negative optimum into the sign of q.
inline AlphaChoice optimize_alpha(const IntVector& q, int k, double tau, const Matrix& a) {
  if (q.isZero()) throw ConfigError("optimize_alpha: q is zero, use the zero-forcing path");
  const RowVector d = a.row(k);
  const RowVector g = q.cast<double>().transpose() * a;
  double alpha0 = -tau * d.dot(g) / g.squaredNorm();
  AlphaChoice out{1.0, q};
  if (alpha0 < 0.0) {
    out.q = -q;
    alpha0 = -alpha0;
  }
  out.alpha = std::max(alpha0, 1.0);
  return out;
}

namespace detail {

inline std::vector<std::vector<int>> bits_from_symbols(const std::vector<int>& symbols, int nbits) {
  std::vector<std::vector<int>> bits;
  bits.reserve(symbols.size());
  for (int s : symbols) bits.push_back(symbol_to_bits(s, nbits));
  return bits;
}

inline int sign_bit(double z) { return z > 0.0 ? 1 : -1; }

inline long long half_sum(const IntVector& q) { return q.sum() / 2; }

/// For integer tau, q and -2 tau delta_k - q have the same cost; keep the
/// lexicographically larger one so ties resolve the same way every run.
inline IntVector canonical_twin(const IntVector& q, int k, double tau) {
  if (tau != std::floor(tau)) return q;
  IntVector twin = -q;
  twin(k) -= 2 * static_cast<long long>(tau);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (twin(i) != q(i)) return twin(i) > q(i) ? twin : q;
  }
  return q;
}

class PlanSolver {
 public:
  PlanSolver(const Matrix& objective, SolverKind solver, const DetectorOptions& opts)
      : a_(objective), solver_(solver), opts_(opts) {
    if (solver_ != SolverKind::brute) lattice_.emplace(-a_, opts_.lll_delta);
  }

  IlsSolution solve(const RowVector& b) const {
    switch (solver_) {
      case SolverKind::sd: return lattice_->solve_sd(b, opts_.sd_budget);
      case SolverKind::lll: return lattice_->solve_lll(b);
      case SolverKind::brute: return solve_brute(IlsProblem{b, -a_}, opts_.brute_bound);
    }
    return {};
  }

  const Matrix& objective() const { return a_; }

 private:
  Matrix a_;
  SolverKind solver_;
  DetectorOptions opts_;
  std::optional<EvenLatticeSolver> lattice_;
};

inline PerturbationPlan make_plan(const PlanSolver& solver, const Matrix& hplus, int k, int bit_layer, int nlayers,
                                  double tau) {
  const Matrix& a = solver.objective();
  const RowVector b = tau * a.row(k);
  IlsSolution sol = solver.solve(b);

  PerturbationPlan plan;
  plan.layer = k;
  plan.bit_layer = bit_layer;
  plan.tau = tau;
  plan.exact = sol.exact;
  plan.q = canonical_twin(sol.q, k, tau);
  plan.degenerate = is_degenerate(plan.q, k);
  plan.modulus.parity = {half_sum(plan.q), bit_layer, nlayers};
  RowVector unit = RowVector::Zero(hplus.rows());
  unit(k) = tau;
  const RowVector mix = unit + plan.q.cast<double>().transpose();
  plan.cost = (mix * a).squaredNorm();
  plan.combining_row = mix * hplus;
  return plan;
}

}  // namespace detail

inline DetectorState preprocess(const DetectorSpec& spec, const Matrix& h, const PamAlphabet& alphabet,
                                const NoiseSpec& noise, const DetectorOptions& options = {}) {
  if (noise.n0 < 0.0) throw ConfigError("preprocess: n0 must be >= 0");
  DetectorState st;
  st.spec = spec;
  st.alphabet = alphabet;
  st.noise = noise;
  st.options = options;
  const bool use_lmmse = spec.kind == DetectorKind::lmmse ||
                         (is_modulus_kind(spec.kind) && spec.equalizer == EqualizerKind::lmmse);
  st.channel = use_lmmse ? RealChannel::lmmse(h, noise) : RealChannel::zero_forcing(h);
  if (use_lmmse) st.spec.equalizer = EqualizerKind::lmmse;

  if (spec.kind == DetectorKind::lar) {
    st.lar_basis = lll_reduce(h, options.lll_delta);
    st.lar_inverse = pseudo_inverse(st.lar_basis->reduced);
    return st;
  }
  if (!is_modulus_kind(spec.kind)) return st;

  const Matrix& w = st.channel.hplus;
  const Matrix objective = use_lmmse ? mmse_error_matrix(w, h, noise, options.lmmse_noise_weight) : w;
  const detail::PlanSolver solver(objective, spec.solver, options);
  const int k_layers = static_cast<int>(w.rows());
  const int nbits = alphabet.nbits;
  st.plans.resize(k_layers);

  for (int k = 0; k < k_layers; ++k) {
    switch (spec.kind) {
      case DetectorKind::mzf:
        st.plans[k].push_back(detail::make_plan(solver, w, k, 0, nbits, alphabet.tau));
        break;
      case DetectorKind::mzf_ext1: {
        auto plan = detail::make_plan(solver, w, k, 0, nbits, alphabet.tau);
        if (!plan.degenerate) {
          const auto choice = optimize_alpha(plan.q, k, plan.tau, objective);
          plan.q = choice.q;
          plan.alpha = choice.alpha;
          plan.modulus.alpha = choice.alpha;
          plan.modulus.parity.half_q_sum = detail::half_sum(plan.q);
          RowVector mix = choice.alpha * plan.q.cast<double>().transpose();
          mix(k) += plan.tau;
          plan.cost = (mix * objective).squaredNorm();
          plan.combining_row = mix * w;
        }
        st.plans[k].push_back(std::move(plan));
        break;
      }
      case DetectorKind::mzf_ext2:
        for (int n = 1; n <= nbits; ++n)
          st.plans[k].push_back(detail::make_plan(solver, w, k, n, nbits, std::ldexp(1.0, 1 - n)));
        break;
      case DetectorKind::mzf_ext3:
        // tau = 1 for every bit layer, so one plan serves them all; the bit
        // layer of the parity context is filled in at detection time.
        st.plans[k].push_back(detail::make_plan(solver, w, k, 1, nbits, 1.0));
        break;
      default:
        break;
    }
  }
  return st;
}

inline DetectionResult detect_zf(const DetectorState& st, const Vector& y) {
  DetectionResult res;
  res.layer_z = st.channel.hplus * y;
  for (Eigen::Index k = 0; k < res.layer_z.size(); ++k)
    res.symbols.push_back(quantize_symbol(res.layer_z(k), st.alphabet, 1.0));
  res.bits = detail::bits_from_symbols(res.symbols, st.alphabet.nbits);
  return res;
}

/// Exhaustive argmin ||y - Hx||^2 over A^K, ties to the lexicographically first vector.
inline DetectionResult detect_ml(const DetectorState& st, const Vector& y) {
  const Matrix& h = st.channel.h;
  const auto k = h.cols();
  const auto& pts = st.alphabet.points;
  const double space = std::pow(static_cast<double>(pts.size()), static_cast<double>(k));
  if (space > 1e7) throw SearchSpaceError("detect_ml: " + std::to_string(space) + " candidates exceed 1e7", space);

  std::vector<int> idx(k, 0);
  Vector x(k);
  for (Eigen::Index i = 0; i < k; ++i) x(i) = pts[0];
  Vector resid = y - h * x;
  double best = resid.squaredNorm();
  std::vector<int> best_idx = idx;
  const int last = static_cast<int>(pts.size()) - 1;
  while (true) {
    Eigen::Index i = k - 1;
    while (i >= 0 && idx[i] == last) {
      resid += h.col(i) * (x(i) - pts[0]);
      x(i) = pts[0];
      idx[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++idx[i];
    resid -= h.col(i) * (pts[idx[i]] - x(i));
    x(i) = pts[idx[i]];
    const double c = resid.squaredNorm();
    if (c < best) {
      best = c;
      best_idx = idx;
    }
  }
  DetectionResult res;
  res.layer_z = Vector::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) res.symbols.push_back(pts[best_idx[i]]);
  res.bits = detail::bits_from_symbols(res.symbols, st.alphabet.nbits);
  return res;
}

/// Symbol-wise modulus detection; also covers the scaled-modulus variant (alpha in the plan).
inline DetectionResult detect_mzf(const DetectorState& st, const Vector& y) {
  const auto k_layers = st.channel.hplus.rows();
  DetectionResult res;
  res.layer_z.resize(k_layers);
  for (Eigen::Index k = 0; k < k_layers; ++k) {
    const auto& plan = st.plans[k][0];
    double z;
    if (plan.degenerate) {
      z = plan.tau * st.channel.hplus.row(k).dot(y);
    } else {
      z = recover_z(plan.combining_row.dot(y), plan.modulus, st.options.parity);
    }
    res.layer_z(k) = z;
    res.symbols.push_back(quantize_symbol(z, st.alphabet, plan.tau));
  }
  res.bits = detail::bits_from_symbols(res.symbols, st.alphabet.nbits);
  return res;
}

/// Bit-wise modulus detection: one plan per (layer, bit layer), u_kn = sign(z).
inline DetectionResult detect_mzf_ext2(const DetectorState& st, const Vector& y) {
  const auto k_layers = st.channel.hplus.rows();
  const int nbits = st.alphabet.nbits;
  DetectionResult res;
  res.layer_z.resize(k_layers);
  res.bits.assign(k_layers, std::vector<int>(nbits));
  for (Eigen::Index k = 0; k < k_layers; ++k) {
    for (int n = 1; n <= nbits; ++n) {
      const auto& plan = st.plans[k][n - 1];
      double z;
      if (n == nbits && plan.degenerate) {
        z = st.channel.hplus.row(k).dot(y);
      } else {
        z = recover_z(plan.combining_row.dot(y), plan.modulus, st.options.parity);
      }
      res.bits[k][n - 1] = detail::sign_bit(z);
      if (n == 1) res.layer_z(k) = z;
    }
    res.symbols.push_back(bits_to_symbol(res.bits[k]));
  }
  return res;
}

/// Decision feedback over bit layers, weakest first: y <- (y - H u_n) / 2.
inline DetectionResult detect_mzf_ext3(const DetectorState& st, const Vector& y) {
  const Matrix& h = st.channel.h;
  const auto k_layers = st.channel.hplus.rows();
  const int nbits = st.alphabet.nbits;
  const bool literal = st.options.parity == ParityMode::always_odd;
  DetectionResult res;
  res.layer_z.resize(k_layers);
  res.bits.assign(k_layers, std::vector<int>(nbits));
  Vector cur = y;
  Vector u(k_layers);
  for (int n = 1; n <= nbits; ++n) {
    for (Eigen::Index k = 0; k < k_layers; ++k) {
      const auto& plan = st.plans[k][0];
      double z;
      if (plan.degenerate && (n == nbits || literal)) {
        z = st.channel.hplus.row(k).dot(cur);
      } else {
        ModulusParams params = plan.modulus;
        params.parity.layer = n;
        z = recover_z(plan.combining_row.dot(cur), params, st.options.parity);
      }
      u(k) = detail::sign_bit(z);
      res.bits[k][n - 1] = static_cast<int>(u(k));
      if (n == 1) res.layer_z(k) = z;
    }
    if (n < nbits) cur = (cur - h * u) / 2.0;
  }
  for (Eigen::Index k = 0; k < k_layers; ++k) res.symbols.push_back(bits_to_symbol(res.bits[k]));
  return res;
}

/// Lattice-reduction-aided zero forcing.
inline DetectionResult detect_lar(const DetectorState& st, const Vector& y) {
  const Matrix& h = st.channel.h;
  const auto& basis = *st.lar_basis;
  const auto k = h.cols();
  const bool shifted = st.options.lar == LarMode::shifted;
  // The symbol lattice is 2Z + 1; (x + 1) / 2 moves it onto Z.
  const Vector target = shifted ? Vector((y + h * Vector::Ones(k)) / 2.0) : y;
  const Vector coeff = st.lar_inverse * target;
  IntVector z(k);
  for (Eigen::Index i = 0; i < k; ++i) z(i) = quantize_int(coeff(i));
  const Vector back = (basis.T * z).cast<double>();
  DetectionResult res;
  res.layer_z = shifted ? Vector(2.0 * back - Vector::Ones(k)) : back;
  for (Eigen::Index i = 0; i < k; ++i) res.symbols.push_back(quantize_symbol(res.layer_z(i), st.alphabet, 1.0));
  res.bits = detail::bits_from_symbols(res.symbols, st.alphabet.nbits);
  return res;
}

inline DetectionResult detect(const DetectorState& st, const Vector& y) {
  switch (st.spec.kind) {
    case DetectorKind::zf:
    case DetectorKind::lmmse: return detect_zf(st, y);
    case DetectorKind::ml: return detect_ml(st, y);
    case DetectorKind::lar: return detect_lar(st, y);
    case DetectorKind::mzf:
    case DetectorKind::mzf_ext1: return detect_mzf(st, y);
    case DetectorKind::mzf_ext2: return detect_mzf_ext2(st, y);
    case DetectorKind::mzf_ext3: return detect_mzf_ext3(st, y);
  }
  return {};
}

}  // namespace mzf

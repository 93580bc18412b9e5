#ifndef QFDIV_FDIV_HPP
#define QFDIV_FDIV_HPP

// Classical (Csiszar) and quantum f-divergences.
//
// The quantum divergence is evaluated from the spectral double sum
//
//   D_f(A||B) = sum_{a in spec A} sum_{b in spec B, b > 0} b f(a/b) tr(P_a Q_b)
//             + l(f) tr(A (1 - B^0)),
//
// where a = 0 clusters use f(0+) and l(f) = lim f(x)/x. The epsilon-limit
// definition is kept as a validation mode (quantum_f_divergence_eps_sweep).

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfdiv/errors.hpp"
#include "qfdiv/extended_real.hpp"
#include "qfdiv/linalg.hpp"

namespace qfdiv {

/// Below this distance from 1, Tsallis quantities switch to their
/// von Neumann (logarithmic) limits.
inline constexpr double kAlphaOneThreshold = 1e-6;

inline bool is_alpha_one(double alpha) { return std::abs(alpha - 1.0) < kAlphaOneThreshold; }

/// Descriptor of a divergence-generating function f on [0, inf).
struct DivergenceFunction {
  std::string name;
  std::function<double(double)> eval;  // valid on (0, inf)
  ExtendedReal f_at_zero;              // lim_{x -> 0+} f(x)
  ExtendedReal ell;                    // lim_{x -> inf} f(x) / x
  double f_at_one = 0.0;
  bool operator_convex = false;
  /// Set for the Tsallis catalog (1.0 for x ln x); enables closed forms.
  std::optional<double> tsallis_alpha;

  double operator()(double x) const { return eval(x); }
};

/// Checks the descriptor invariants. l(f) = -inf is rejected outright: no
/// catalog entry produces it and the kernel term would be ill defined.
inline void validate(const DivergenceFunction& f) {
  if (!f.eval) throw DomainError("divergence function '" + f.name + "' has no evaluator");
  if (std::isnan(f.ell.value()) || f.ell.value() == -std::numeric_limits<double>::infinity()) {
    throw DomainError("divergence function '" + f.name + "': l(f) must lie in (-inf, +inf]");
  }
  if (std::isnan(f.f_at_zero.value()) ||
      f.f_at_zero.value() == -std::numeric_limits<double>::infinity()) {
    throw DomainError("divergence function '" + f.name + "': f(0+) must lie in (-inf, +inf]");
  }
  if (std::abs(f.eval(1.0) - f.f_at_one) > 1e-12) {
    throw DomainError("divergence function '" + f.name + "': f_at_one disagrees with f(1)");
  }
}

/// f_1(x) = x ln x.
inline DivergenceFunction make_kl_f() {
  DivergenceFunction f;
  f.name = "kl";
  f.eval = [](double x) { return x * std::log(x); };
  f.f_at_zero = 0.0;
  f.ell = ExtendedReal::infinity();
  f.f_at_one = 0.0;
  f.operator_convex = true;
  f.tsallis_alpha = 1.0;
  return f;
}

/// Tsallis family f_alpha(x) = (x^alpha - x) / (alpha - 1); x ln x when
/// |alpha - 1| < 1e-6. Operator convex exactly for alpha in (0, 2].
inline DivergenceFunction make_tsallis_f(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("make_tsallis_f: alpha must be positive");
  if (is_alpha_one(alpha)) return make_kl_f();
  DivergenceFunction f;
  f.name = "tsallis(" + format_number(alpha, 6) + ")";
  f.eval = [alpha](double x) { return (std::pow(x, alpha) - x) / (alpha - 1.0); };
  f.f_at_zero = 0.0;
  f.ell = alpha > 1.0 ? ExtendedReal::infinity() : ExtendedReal(1.0 / (1.0 - alpha));
  f.f_at_one = 0.0;
  f.operator_convex = alpha <= 2.0;
  f.tsallis_alpha = alpha;
  return f;
}

/// f_t(x) = x^2 / (x + t) - x / (1 + t), t > 0.
///
/// Operator convex on [0, inf) with f(0) = f(1) = 0 and finite
/// l(f) = t / (1 + t); there is no closed-form conditional entropy, so it
/// exercises the generic optimizer.
inline DivergenceFunction make_harmonic_f(double t) {
  if (!(t > 0.0)) throw DomainError("make_harmonic_f: parameter must be positive");
  DivergenceFunction f;
  f.name = "harmonic(" + format_number(t, 6) + ")";
  f.eval = [t](double x) { return x * x / (x + t) - x / (1.0 + t); };
  f.f_at_zero = 0.0;
  f.ell = t / (1.0 + t);
  f.f_at_one = 0.0;
  f.operator_convex = true;
  return f;
}

/// Csiszar divergence sum_x q_x f(p_x / q_x) with the boundary conventions
/// q_x = 0 < p_x -> p_x l(f) and p_x = q_x = 0 -> 0.
inline ExtendedReal csiszar_divergence(std::span<const double> p, std::span<const double> q,
                                       const DivergenceFunction& f) {
  if (p.size() != q.size()) throw DomainError("csiszar_divergence: length mismatch");
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw DomainError("csiszar_divergence: negative probability");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-10 || std::abs(sq - 1.0) > 1e-10) {
    throw DomainError("csiszar_divergence: probabilities must sum to 1");
  }
  ExtendedReal total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] > 0.0) {
      total += p[i] > 0.0 ? ExtendedReal(q[i] * f(p[i] / q[i])) : f.f_at_zero.weighted(q[i]);
    } else if (p[i] > 0.0) {
      total += f.ell.weighted(p[i]);
    }
  }
  return total;
}

namespace detail {

/// Re-labels slightly negative clusters (>= -1e-10 scale) as zero; anything
/// more negative is not PSD.
inline SpectralDecomposition psd_spectrum(const Operator& m, const char* who, double cluster_tol,
                                          double rank_tol) {
  auto dec = eig_hermitian(m, cluster_tol, rank_tol);
  const double floor = -1e-10 * std::max(1.0, dec.norm());
  for (auto& c : dec.clusters) {
    if (c.eigenvalue < 0.0) {
      if (c.eigenvalue < floor) {
        throw DomainError(std::string(who) + ": operator is not positive semidefinite");
      }
      c.eigenvalue = 0.0;
    }
  }
  return dec;
}

inline void require_same_shape(const Operator& a, const Operator& b, const char* who) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DomainError(std::string(who) + ": dimension mismatch");
  }
}

/// tr(A (1 - B^0)) from the two spectra.
inline double kernel_mass(const SpectralDecomposition& a, const SpectralDecomposition& b) {
  double mass = 0.0;
  for (const auto& ca : a.clusters) {
    if (is_zero_cluster(ca)) continue;
    for (const auto& cb : b.clusters) {
      if (is_zero_cluster(cb)) mass += ca.eigenvalue * cluster_overlap(ca, cb);
    }
  }
  return mass;
}

}  // namespace detail

/// Spectral double sum on precomputed (clamped) spectra.
inline ExtendedReal spectral_f_divergence(const SpectralDecomposition& a,
                                          const SpectralDecomposition& b,
                                          const DivergenceFunction& f,
                                          double rank_tol = kDefaultRankTol) {
  double sum = 0.0;
  double kernel = 0.0;
  for (const auto& ca : a.clusters) {
    for (const auto& cb : b.clusters) {
      const double ov = cluster_overlap(ca, cb);
      if (is_zero_cluster(cb)) {
        kernel += ca.eigenvalue * ov;
        continue;
      }
      if (is_zero_cluster(ca)) {
        const double w = cb.eigenvalue * ov;
        if (f.f_at_zero.is_finite()) {
          sum += w * f.f_at_zero.value();
        } else if (ov > rank_tol) {
          return ExtendedReal::infinity();
        }
        continue;
      }
      sum += cb.eigenvalue * f(ca.eigenvalue / cb.eigenvalue) * ov;
    }
  }
  if (f.ell.is_finite()) return sum + f.ell.value() * kernel;
  return kernel > rank_tol ? ExtendedReal::infinity() : ExtendedReal(sum);
}

/// Quantum f-divergence D_f(A||B) of PSD operators (any trace).
inline ExtendedReal quantum_f_divergence(const Operator& a, const Operator& b,
                                         const DivergenceFunction& f,
                                         double cluster_tol = kDefaultClusterTol,
                                         double rank_tol = kDefaultRankTol) {
  detail::require_same_shape(a, b, "quantum_f_divergence");
  validate(f);
  const auto da = detail::psd_spectrum(a, "quantum_f_divergence", cluster_tol, rank_tol);
  const auto db = detail::psd_spectrum(b, "quantum_f_divergence", cluster_tol, rank_tol);
  return spectral_f_divergence(da, db, f, rank_tol);
}

struct EpsSweepResult {
  std::vector<double> eps;
  std::vector<double> values;
  ExtendedReal extrapolated;
};

/// Default regularization schedule, one decade per step.
inline std::vector<double> default_eps_schedule() { return {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9}; }

/// Evaluates D_f(A || B + eps 1) along a strictly decreasing schedule.
///
/// The limit is declared +inf when the last value exceeds ten times the
/// previous one (and 1 in magnitude), or when successive increments stop
/// shrinking (ratio >= 0.9, which catches logarithmic growth). Otherwise the
/// last two points are extrapolated linearly to eps = 0.
inline EpsSweepResult quantum_f_divergence_eps_sweep(const Operator& a, const Operator& b,
                                                     const DivergenceFunction& f,
                                                     std::vector<double> schedule = default_eps_schedule()) {
  detail::require_same_shape(a, b, "quantum_f_divergence_eps_sweep");
  validate(f);
  if (schedule.empty()) throw DomainError("eps sweep: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1]))) {
      throw DomainError("eps sweep: schedule must be positive and strictly decreasing");
    }
  }
  const auto da = detail::psd_spectrum(a, "eps sweep", kDefaultClusterTol, kDefaultRankTol);
  // B + eps 1 has full rank; rank_tol 0 keeps every eigenvalue in the support.
  const auto db = detail::psd_spectrum(b, "eps sweep", kDefaultClusterTol, kDefaultRankTol);

  EpsSweepResult out;
  out.eps = schedule;
  for (double eps : schedule) {
    SpectralDecomposition shifted = db;
    for (auto& c : shifted.clusters) c.eigenvalue += eps;
    out.values.push_back(spectral_f_divergence(da, shifted, f, 0.0).value());
  }

  const std::size_t n = out.values.size();
  if (n == 1) {
    out.extrapolated = out.values[0];
    return out;
  }
  const double v1 = out.values[n - 2];
  const double v2 = out.values[n - 1];
  bool diverges = std::abs(v2) > 1.0 && std::abs(v2) > 10.0 * std::abs(v1);
  if (!diverges && n >= 3) {
    const double d_prev = v1 - out.values[n - 3];
    const double d_last = v2 - v1;
    diverges = d_last > 1e-9 * std::max(1.0, std::abs(v2)) && d_prev > 0.0 && d_last >= 0.9 * d_prev;
  }
  if (diverges) {
    out.extrapolated = ExtendedReal::infinity();
  } else {
    const double e1 = schedule[n - 2];
    const double e2 = schedule[n - 1];
    out.extrapolated = v2 - e2 * (v2 - v1) / (e2 - e1);
  }
  return out;
}

/// von Neumann relative entropy tr(A ln A - A ln B) on supports; +inf when
/// R(A) is not contained in R(B).
inline ExtendedReal vn_relative_entropy_closed(const Operator& a, const Operator& b,
                                               double rank_tol = kDefaultRankTol) {
  detail::require_same_shape(a, b, "vn_relative_entropy_closed");
  const auto da = detail::psd_spectrum(a, "vn_relative_entropy_closed", kDefaultClusterTol, rank_tol);
  const auto db = detail::psd_spectrum(b, "vn_relative_entropy_closed", kDefaultClusterTol, rank_tol);
  if (detail::kernel_mass(da, db) > rank_tol) return ExtendedReal::infinity();
  const auto log_fn = [](double x) { return std::log(x); };
  const Operator la = apply_spectral_function(da, log_fn, true);
  const Operator lb = apply_spectral_function(db, log_fn, true);
  return (a * la).trace().real() - (a * lb).trace().real();
}

/// Tsallis divergence (tr(A^alpha B^(1-alpha)) - tr A) / (alpha - 1), powers
/// on supports; +inf for alpha > 1 with R(A) outside R(B). Delegates to the
/// von Neumann form near alpha = 1.
inline ExtendedReal tsallis_divergence_closed(const Operator& a, const Operator& b, double alpha,
                                              double rank_tol = kDefaultRankTol) {
  if (!(alpha > 0.0)) throw DomainError("tsallis_divergence_closed: alpha must be positive");
  if (is_alpha_one(alpha)) return vn_relative_entropy_closed(a, b, rank_tol);
  detail::require_same_shape(a, b, "tsallis_divergence_closed");
  const auto da = detail::psd_spectrum(a, "tsallis_divergence_closed", kDefaultClusterTol, rank_tol);
  const auto db = detail::psd_spectrum(b, "tsallis_divergence_closed", kDefaultClusterTol, rank_tol);
  if (alpha > 1.0 && detail::kernel_mass(da, db) > rank_tol) return ExtendedReal::infinity();
  const Operator pa = support_power(da, alpha);
  const Operator pb = support_power(db, 1.0 - alpha);
  return ((pa * pb).trace().real() - real_trace(a)) / (alpha - 1.0);
}

/// tr f(X) for PSD X, using f(0+) on the kernel.
inline ExtendedReal trace_function(const Operator& x, const DivergenceFunction& f) {
  const auto dec = detail::psd_spectrum(x, "trace_function", kDefaultClusterTol, kDefaultRankTol);
  ExtendedReal total = 0.0;
  for (const auto& c : dec.clusters) {
    const auto mult = static_cast<double>(c.multiplicity());
    total += is_zero_cluster(c) ? f.f_at_zero.weighted(mult) : ExtendedReal(mult * f(c.eigenvalue));
  }
  return total;
}

}  // namespace qfdiv

#endif  // QFDIV_FDIV_HPP

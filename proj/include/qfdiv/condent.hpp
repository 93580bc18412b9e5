#ifndef QFDIV_CONDENT_HPP
#define QFDIV_CONDENT_HPP

// Conditional entropies H_f(rho_AB | B) = -min_sigma D_f(rho_AB || 1_A (x) sigma_B),
// the minimum running over normalized sigma_B supported on R(rho_B).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qfdiv/bipartite.hpp"
#include "qfdiv/channels.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/fdiv.hpp"
#include "qfdiv/linalg.hpp"
#include "qfdiv/optimize.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv {

/// ln_alpha(x) = (x^(1-alpha) - 1) / (1 - alpha); ln x near alpha = 1.
inline double alpha_log(double xi, double alpha) {
  if (!(xi > 0.0)) throw DomainError("alpha_log: argument must be positive");
  if (!(alpha > 0.0)) throw DomainError("alpha_log: alpha must be positive");
  if (is_alpha_one(alpha)) return std::log(xi);
  return (std::pow(xi, 1.0 - alpha) - 1.0) / (1.0 - alpha);
}

inline void require_alpha_in_validity_range(double alpha, const char* who) {
  if (!(alpha > 0.0) || alpha > 2.0) {
    throw PreconditionError(std::string(who) + ": alpha must lie in (0, 2]");
  }
}

/// -tr(rho ln rho).
inline double vn_entropy(const Operator& rho) {
  const auto dec = detail::psd_spectrum(rho, "vn_entropy", kDefaultClusterTol, kDefaultRankTol);
  double h = 0.0;
  for (const auto& c : dec.clusters) {
    if (c.eigenvalue > 0.0) h -= static_cast<double>(c.multiplicity()) * c.eigenvalue * std::log(c.eigenvalue);
  }
  return h;
}

/// Tsallis entropy (1 - tr rho^alpha) / (alpha - 1) = -D_alpha(rho || 1).
inline double tsallis_entropy(const Operator& rho, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("tsallis_entropy: alpha must be positive");
  if (is_alpha_one(alpha)) return vn_entropy(rho);
  const auto dec = detail::psd_spectrum(rho, "tsallis_entropy", kDefaultClusterTol, kDefaultRankTol);
  double tr = 0.0;
  for (const auto& c : dec.clusters) {
    if (c.eigenvalue > 0.0) tr += static_cast<double>(c.multiplicity()) * std::pow(c.eigenvalue, alpha);
  }
  return (1.0 - tr) / (alpha - 1.0);
}

/// D_f(rho_AB || 1_A (x) sigma_B) through the generic spectral engine.
inline ExtendedReal divergence_to_product_reference(const BipartiteState& s, const Operator& sigma_b,
                                                    const DivergenceFunction& f) {
  if (sigma_b.rows() != s.d_b()) throw DomainError("divergence_to_product_reference: sigma_B has wrong dimension");
  return quantum_f_divergence(s.rho(), kron(identity(s.d_a()), sigma_b), f);
}

struct OptimizerOptions {
  int starts = 4;
  double value_tol = 1e-6;
  int max_iters = 500;
  double fd_step = 1e-5;
  std::uint64_t seed = 0;
  int stall_window = 20;
  double stall_tol = 1e-10;
};

struct OptimizationReport {
  double value = 0.0;  // the conditional entropy
  Operator sigma_star;
  int starts = 0;
  std::vector<int> iterations_per_start;
  std::vector<double> start_values;  // minimized divergence per start
  int best_start_index = 0;
  bool converged = false;
};

/// Objective sigma -> D_f(rho_AB || 1_A (x) V sigma V^dagger) for sigma on the
/// r-dimensional support V of rho_B, parameterized as sigma = exp(H)/tr exp(H)
/// with H Hermitian r x r and H_{r-1,r-1} = 0 (r^2 - 1 real parameters).
///
/// The spectral double sum is evaluated per eigenvector: with
/// rho = sum_k lambda_k |u_k><u_k| and sigma = sum_j s_j |w_j><w_j|,
/// tr(P_k (1 (x) V w_j w_j^dagger V^dagger)) = |C_k conj(w_j)|^2 where
/// C_k = U_k conj(V) and U_k is u_k reshaped to d_A x d_B.
class SupportRestrictedObjective {
 public:
  SupportRestrictedObjective(const BipartiteState& s, DivergenceFunction f,
                             double rank_tol = kDefaultRankTol)
      : f_(std::move(f)), d_a_(s.d_a()), d_b_(s.d_b()), rank_tol_(rank_tol) {
    const Operator rho_b = s.reduced_b();
    Eigen::SelfAdjointEigenSolver<Operator> sb(rho_b);
    const double bmax = sb.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<Index> keep;
    for (Index i = 0; i < d_b_; ++i) {
      if (sb.eigenvalues()[i] > rank_tol * bmax) keep.push_back(i);
    }
    support_ = Operator(d_b_, static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) support_.col(static_cast<Index>(j)) = sb.eigenvectors().col(keep[j]);
    rho_b_on_support_ = support_.adjoint() * rho_b * support_;

    Eigen::SelfAdjointEigenSolver<Operator> sr(s.rho());
    const double rmax = sr.eigenvalues().cwiseAbs().maxCoeff();
    const Operator conj_v = support_.conjugate();
    kernel_ = 0.0;
    for (Index k = 0; k < s.dim(); ++k) {
      const double lam = sr.eigenvalues()[k];
      if (lam <= rank_tol * rmax) continue;  // f(0) = 0: zero eigenvalues contribute nothing
      const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> u(
          sr.eigenvectors().col(k).data(), d_a_, d_b_);
      Operator c = u * conj_v;
      kernel_ += lam * (1.0 - c.squaredNorm());
      eigenvalues_.push_back(lam);
      compressed_.push_back(std::move(c));
    }
    kernel_ = std::max(kernel_, 0.0);
  }

  Index support_dim() const { return support_.cols(); }
  Index num_params() const { return support_dim() * support_dim() - 1; }
  const Operator& support_basis() const { return support_; }
  const Operator& rho_b_on_support() const { return rho_b_on_support_; }
  double kernel_mass() const { return kernel_; }

  Operator hermitian_from_params(const Eigen::VectorXd& x) const {
    const Index r = support_dim();
    Operator h = Operator::Zero(r, r);
    Index p = 0;
    for (Index i = 0; i + 1 < r; ++i) h(i, i) = x[p++];
    for (Index i = 0; i < r; ++i) {
      for (Index j = i + 1; j < r; ++j) {
        h(i, j) = Complex(x[p], x[p + 1]);
        h(j, i) = std::conj(h(i, j));
        p += 2;
      }
    }
    return h;
  }

  Eigen::VectorXd params_from_hermitian(const Operator& h_in) const {
    const Index r = support_dim();
    const Operator h = h_in - h_in(r - 1, r - 1).real() * identity(r);
    Eigen::VectorXd x(num_params());
    Index p = 0;
    for (Index i = 0; i + 1 < r; ++i) x[p++] = h(i, i).real();
    for (Index i = 0; i < r; ++i) {
      for (Index j = i + 1; j < r; ++j) {
        x[p++] = h(i, j).real();
        x[p++] = h(i, j).imag();
      }
    }
    return x;
  }

  /// Spectrum of sigma(H) in support coordinates: weights s_j and vectors w_j.
  std::pair<Eigen::VectorXd, Operator> sigma_spectrum(const Eigen::VectorXd& x) const {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_from_params(x));
    Eigen::VectorXd w = (es.eigenvalues().array() - es.eigenvalues().maxCoeff()).exp();
    w /= w.sum();
    return {w, es.eigenvectors()};
  }

  /// sigma_B on the full H_B.
  Operator sigma(const Eigen::VectorXd& x) const {
    const auto [w, vecs] = sigma_spectrum(x);
    const Operator local = vecs * w.cast<Complex>().asDiagonal() * vecs.adjoint();
    return support_ * local * support_.adjoint();
  }

  /// Divergence for a sigma given by its spectrum on the support.
  double evaluate_spectrum(const Eigen::VectorXd& weights, const Operator& vecs) const {
    const Operator conj_w = vecs.conjugate();
    double sum = 0.0;
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
      const Operator proj = compressed_[k] * conj_w;  // d_A x r
      const double lam = eigenvalues_[k];
      for (Index j = 0; j < weights.size(); ++j) {
        const double b = weights[j];
        const double ov = proj.col(j).squaredNorm();
        if (b > 0.0) {
          sum += b * f_(lam / b) * ov;
        } else if (ov > 0.0) {
          sum += f_.ell.is_finite() ? f_.ell.value() * lam * ov : std::numeric_limits<double>::infinity();
        }
      }
    }
    if (f_.ell.is_finite()) return sum + f_.ell.value() * kernel_;
    return kernel_ > rank_tol_ ? std::numeric_limits<double>::infinity() : sum;
  }

  double operator()(const Eigen::VectorXd& x) const {
    const auto [w, vecs] = sigma_spectrum(x);
    return evaluate_spectrum(w, vecs);
  }

 private:
  DivergenceFunction f_;
  Index d_a_;
  Index d_b_;
  double rank_tol_;
  Operator support_;
  Operator rho_b_on_support_;
  std::vector<double> eigenvalues_;
  std::vector<Operator> compressed_;
  double kernel_ = 0.0;
};

inline void require_entropy_preconditions(const DivergenceFunction& f, const char* who) {
  validate(f);
  if (!f.operator_convex) {
    throw PreconditionError(std::string(who) + ": f must be operator convex (" + f.name + ")");
  }
  if (!(f.f_at_zero.is_finite() && f.f_at_zero.value() == 0.0)) {
    throw PreconditionError(std::string(who) + ": f(0) must vanish (" + f.name + ")");
  }
}

/// Generic conditional entropy by multi-start BFGS over sigma on R(rho_B).
///
/// Starts: completely mixed on the support, rho_B itself, then seeded random
/// Hermitian generators. Starts are merged by lowest value, ties to the lower
/// index. Throws ConvergenceError when no start converges.
inline OptimizationReport conditional_entropy_optimize(const BipartiteState& s, const DivergenceFunction& f,
                                                       const OptimizerOptions& opts = {}) {
  require_entropy_preconditions(f, "conditional_entropy_optimize");
  if (opts.starts < 1) throw DomainError("conditional_entropy_optimize: need at least one start");
  const SupportRestrictedObjective objective(s, f);
  const Index r = objective.support_dim();
  OptimizationReport report;

  if (r == 1) {
    // The feasible set is the single point sigma = rho_B^0.
    const Eigen::VectorXd none(0);
    report.value = -objective(none);
    report.sigma_star = objective.sigma(none);
    report.starts = 1;
    report.iterations_per_start = {0};
    report.start_values = {-report.value};
    report.best_start_index = 0;
    report.converged = std::isfinite(report.value);
    return report;
  }

  BfgsOptions bopts;
  bopts.max_iters = opts.max_iters;
  bopts.fd_step = opts.fd_step;
  bopts.stall_window = opts.stall_window;
  bopts.stall_tol = opts.stall_tol;

  const std::function<double(const Eigen::VectorXd&)> fn = [&objective](const Eigen::VectorXd& x) {
    return objective(x);
  };

  std::vector<BfgsResult> results;
  for (int k = 0; k < opts.starts; ++k) {
    Eigen::VectorXd x0;
    if (k == 0) {
      x0 = Eigen::VectorXd::Zero(objective.num_params());
    } else if (k == 1) {
      const Operator logb = apply_spectral_function(
          objective.rho_b_on_support(), [](double v) { return std::log(v); }, false);
      x0 = objective.params_from_hermitian(logb);
    } else {
      Rng rng(derive_seed(opts.seed, "start-" + std::to_string(k)));
      x0.resize(objective.num_params());
      for (Index i = 0; i < x0.size(); ++i) x0[i] = rng.normal();
    }
    auto res = minimize_bfgs(fn, x0, bopts);
    report.iterations_per_start.push_back(res.iterations);
    report.start_values.push_back(res.value);
    results.push_back(std::move(res));
  }
  report.starts = opts.starts;

  int best = -1;
  bool any_converged = false;
  bool all_converged = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.starts; ++k) {
    const auto& res = results[k];
    any_converged = any_converged || res.converged;
    all_converged = all_converged && res.converged;
    if (std::isfinite(res.value)) {
      lo = std::min(lo, res.value);
      hi = std::max(hi, res.value);
      if (best < 0 || res.value < results[best].value) best = k;
    }
  }
  if (!any_converged || best < 0) {
    std::ostringstream msg;
    msg << "conditional_entropy_optimize: no start converged (f = " << f.name << ", values:";
    for (double v : report.start_values) msg << ' ' << format_number(v);
    msg << ", iterations:";
    for (int it : report.iterations_per_start) msg << ' ' << it;
    msg << ')';
    throw ConvergenceError(msg.str());
  }
  report.best_start_index = best;
  report.value = -results[best].value;
  report.sigma_star = objective.sigma(results[best].x);
  report.converged = all_converged && (hi - lo) <= opts.value_tol;
  return report;
}

/// H_1(rho_AB) - H_1(rho_B).
inline double conditional_entropy_vn_closed(const BipartiteState& s) {
  return vn_entropy(s.rho()) - vn_entropy(s.reduced_b());
}

struct ClosedFormResult {
  double value = 0.0;
  Operator sigma_star;
};

/// Closed-form conditional Tsallis entropy for alpha in (0, 2].
///
/// With T = tr_A(rho_AB^alpha), the minimizer is sigma* = T^(1/alpha) / tr T^(1/alpha)
/// (Hoelder equality) and H = (1 - (tr T^(1/alpha))^alpha) / (alpha - 1).
inline ClosedFormResult conditional_entropy_tsallis_closed(const BipartiteState& s, double alpha) {
  require_alpha_in_validity_range(alpha, "conditional_entropy_tsallis_closed");
  if (is_alpha_one(alpha)) {
    return {conditional_entropy_vn_closed(s), s.reduced_b()};
  }
  const Operator rho_pow = support_power(eig_hermitian(s.rho()), alpha);
  const Operator t = partial_trace_first(rho_pow, s.d_a(), s.d_b());
  const Operator root = support_power(eig_hermitian(0.5 * (t + t.adjoint())), 1.0 / alpha);
  const double c = real_trace(root);
  return {(1.0 - std::pow(c, alpha)) / (alpha - 1.0), root / c};
}

/// H_f through the closed form when f is a Tsallis catalog entry, otherwise
/// through the optimizer.
inline double conditional_entropy(const BipartiteState& s, const DivergenceFunction& f,
                                  const OptimizerOptions& opts = {}) {
  if (f.tsallis_alpha) return conditional_entropy_tsallis_closed(s, *f.tsallis_alpha).value;
  return conditional_entropy_optimize(s, f, opts).value;
}

inline double conditional_tsallis(const BipartiteState& s, double alpha) {
  return conditional_entropy_tsallis_closed(s, alpha).value;
}

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// -tr f(d_B rho) / d_B <= H_f(rho|B) <= -tr f(rho).
inline Bounds thm2_bounds(const BipartiteState& s, const DivergenceFunction& f) {
  require_entropy_preconditions(f, "thm2_bounds");
  const auto db = static_cast<double>(s.d_b());
  const Operator scaled = db * s.rho();
  return {-trace_function(scaled, f).finite_value() / db, -trace_function(s.rho(), f).finite_value()};
}

/// ln_alpha(1/S) <= H_alpha(|AB>|B) <= ln_alpha(max c^2) for Schmidt
/// coefficients c with Schmidt number S.
inline Bounds pure_state_bounds_tsallis(std::span<const double> schmidt_coeffs, double alpha) {
  require_alpha_in_validity_range(alpha, "pure_state_bounds_tsallis");
  if (schmidt_coeffs.empty()) throw DomainError("pure_state_bounds_tsallis: no coefficients");
  double norm2 = 0.0;
  double max2 = 0.0;
  int schmidt_number = 0;
  for (double c : schmidt_coeffs) {
    if (c < 0.0) throw DomainError("pure_state_bounds_tsallis: coefficients must be nonnegative");
    norm2 += c * c;
    max2 = std::max(max2, c * c);
    if (c > 0.0) ++schmidt_number;
  }
  if (std::abs(norm2 - 1.0) > 1e-10) {
    throw DomainError("pure_state_bounds_tsallis: squared coefficients must sum to 1");
  }
  return {alpha_log(1.0 / schmidt_number, alpha), alpha_log(max2, alpha)};
}

/// Exact conditional Tsallis entropy of a state with a classical register,
/// from the per-block entropies H_y and weights p_y:
/// ((sum_y p_y (1 + (1-alpha) H_y)^(1/alpha))^alpha - 1) / (1 - alpha),
/// and sum_y p_y H_y at alpha = 1.
inline double classical_register_closed_form(std::span<const double> block_entropies,
                                             std::span<const double> p, double alpha) {
  require_alpha_in_validity_range(alpha, "classical_register_closed_form");
  if (block_entropies.size() != p.size() || p.empty()) {
    throw DomainError("classical_register_closed_form: entropy and weight counts differ");
  }
  double total = 0.0;
  for (double w : p) {
    if (w < 0.0) throw DomainError("classical_register_closed_form: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10) throw DomainError("classical_register_closed_form: weights must sum to 1");

  if (is_alpha_one(alpha)) {
    double h = 0.0;
    for (std::size_t y = 0; y < p.size(); ++y) h += p[y] * block_entropies[y];
    return h;
  }
  double mean = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    double t = 1.0 + (1.0 - alpha) * block_entropies[y];
    if (t < 0.0) {
      if (t < -1e-12) {
        throw DomainError("classical_register_closed_form: 1 + (1 - alpha) H_y is negative for block " +
                          std::to_string(y));
      }
      t = 0.0;
    }
    mean += p[y] * std::pow(t, 1.0 / alpha);
  }
  return (std::pow(mean, alpha) - 1.0) / (1.0 - alpha);
}

/// d_C^(1-alpha) h + ln_alpha(d_C): upper bound on H_alpha(rho_ABC|B) given
/// h = H_alpha(rho_ABC|BC).
inline double chain_rule_rhs(double h_abc_given_bc, Index d_c, double alpha) {
  if (d_c < 1) throw DomainError("chain_rule_rhs: d_C must be at least 1");
  require_alpha_in_validity_range(alpha, "chain_rule_rhs");
  const auto dc = static_cast<double>(d_c);
  if (is_alpha_one(alpha)) return h_abc_given_bc + std::log(dc);
  return std::pow(dc, 1.0 - alpha) * h_abc_given_bc + alpha_log(dc, alpha);
}

/// Regroups rho_ABC as a bipartite state (AC | B), so that conditioning is on
/// B alone.
inline BipartiteState condition_on_b_only(const BipartiteState& abc) {
  if (abc.dims().size() != 3) throw DomainError("condition_on_b_only: need a tripartite state");
  const auto& d = abc.dims();
  const std::vector<Index> perm{0, 2, 1};
  Operator moved = permute_subsystems(abc.rho(), d, perm);
  return BipartiteState(std::move(moved), {d[0] * d[2], d[1]});
}

/// rho_AB from rho_ABC through the trace channel on C.
inline BipartiteState trace_out_c(const BipartiteState& abc) {
  if (abc.dims().size() != 3) throw DomainError("trace_out_c: need a tripartite state");
  const auto& d = abc.dims();
  const KrausChannel psi = lift_channel(trace_channel(d[2]), d, 2);
  return BipartiteState(apply_channel(psi, abc.rho()), {d[0], d[1]});
}

/// (id_A (x) Psi_B) rho_AB.
inline BipartiteState apply_on_b(const BipartiteState& s, const KrausChannel& psi_b) {
  const std::vector<Index> dims{s.d_a(), s.d_b()};
  const KrausChannel lifted = lift_channel(psi_b, dims, 1);
  return BipartiteState(apply_channel(lifted, s.rho()), {s.d_a(), psi_b.d_out});
}

}  // namespace qfdiv

#endif  // QFDIV_CONDENT_HPP

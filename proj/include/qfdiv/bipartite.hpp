#ifndef QFDIV_BIPARTITE_HPP
#define QFDIV_BIPARTITE_HPP

#include <string>
#include <utility>
#include <vector>

#include "qfdiv/errors.hpp"
#include "qfdiv/fdiv.hpp"
#include "qfdiv/linalg.hpp"

namespace qfdiv {

inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNormalizationTol = 1e-10;

/// Names the first density-operator invariant m violates, or returns an
/// empty string. Sub-normalized operators (0 < tr <= 1) pass.
inline std::string density_violation(const Operator& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return "shape: matrix must be square and non-empty";
  if (!is_hermitian(m)) return "Hermiticity: |M - M^dagger| exceeds tolerance";
  const Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPsdTol) {
    return "positive semidefiniteness: eigenvalue " + format_number(solver.eigenvalues().minCoeff()) +
           " below -1e-10";
  }
  const double tr = real_trace(m);
  if (!(tr > 0.0) || tr > 1.0 + kTraceTol) {
    return "trace bound: trace " + format_number(tr) + " outside (0, 1]";
  }
  return {};
}

/// Throws DomainError naming the failed invariant.
inline void require_density(const Operator& m, const std::string& who) {
  if (auto v = density_violation(m); !v.empty()) throw DomainError(who + ": " + v);
}

/// A normalized density operator on H_1 (x) ... (x) H_k (k = 2 or 3 in
/// practice). For k = 3 the factors are (A, B, C).
class BipartiteState {
 public:
  BipartiteState() = default;

  BipartiteState(Operator rho, std::vector<Index> dims) : rho_(std::move(rho)), dims_(std::move(dims)) {
    if (dims_.size() < 2) throw DomainError("BipartiteState: need at least two factor dimensions");
    for (Index d : dims_) {
      if (d < 1) throw DomainError("BipartiteState: factor dimensions must be positive");
    }
    if (product(dims_) != rho_.rows()) {
      throw DomainError("BipartiteState: product of factor dimensions does not match matrix size");
    }
    require_density(rho_, "BipartiteState");
    if (std::abs(real_trace(rho_) - 1.0) > kNormalizationTol) {
      throw DomainError("BipartiteState: normalization: trace must equal 1");
    }
  }

  const Operator& rho() const { return rho_; }
  const std::vector<Index>& dims() const { return dims_; }
  Index dim() const { return rho_.rows(); }

  /// First factor.
  Index d_a() const { return dims_.front(); }
  /// Everything after the first factor, i.e. the conditioning system.
  Index d_b() const { return dim() / dims_.front(); }

  /// rho_B = tr_A rho (conditioning system B, or BC for three factors).
  Operator reduced_b() const { return partial_trace_first(rho_, d_a(), d_b()); }
  /// rho_A = tr_B rho.
  Operator reduced_a() const { return partial_trace_second(rho_, d_a(), d_b()); }

 private:
  Operator rho_;
  std::vector<Index> dims_;
};

enum class Subsystem { A, B };

/// tr_A or tr_B of a bipartite state.
inline Operator partial_trace(const BipartiteState& s, Subsystem keep) {
  return keep == Subsystem::B ? s.reduced_b() : s.reduced_a();
}

}  // namespace qfdiv

#endif  // QFDIV_BIPARTITE_HPP

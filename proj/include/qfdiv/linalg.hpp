#ifndef QFDIV_LINALG_HPP
#define QFDIV_LINALG_HPP

// Dense complex Hermitian kernel.
//
// Tensor index convention (fixed across the library): for A on H_A and B on
// H_B, kron(A, B) has row index iA * dB + iB, i.e. the A index is outer and
// the B index inner. Multipartite operators nest the same way, first factor
// outermost. Every partial trace and permutation below assumes it.
//
// Eigensolver: Eigen::SelfAdjointEigenSolver (Householder tridiagonalization
// followed by implicit symmetric QR). It is deterministic for fixed input bits.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qfdiv/errors.hpp"

namespace qfdiv {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultClusterTol = 1e-8;
inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;

/// Largest absolute entry.
inline double max_abs(const Operator& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Operator& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol * (1.0 + max_abs(m));
}

inline void require_hermitian(const Operator& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw DomainError(std::string(who) + ": matrix is not square");
  }
  if (!is_hermitian(m)) throw DomainError(std::string(who) + ": matrix is not Hermitian");
}

inline double real_trace(const Operator& m) { return m.trace().real(); }

/// One eigenvalue cluster: the eigenvalue (mean of the merged members), an
/// orthonormal basis of the eigenspace, and the projector onto it.
struct SpectralCluster {
  double eigenvalue = 0.0;
  Operator basis;      // dim x multiplicity, orthonormal columns
  Operator projector;  // basis * basis^dagger
  Index multiplicity() const { return basis.cols(); }
};

/// Clusters sorted by ascending eigenvalue.
struct SpectralDecomposition {
  Index dim = 0;
  std::vector<SpectralCluster> clusters;

  /// Operator norm of the decomposed matrix.
  double norm() const {
    double n = 0.0;
    for (const auto& c : clusters) n = std::max(n, std::abs(c.eigenvalue));
    return n;
  }

  Operator reconstruct() const {
    Operator out = Operator::Zero(dim, dim);
    for (const auto& c : clusters) out += c.eigenvalue * c.projector;
    return out;
  }
};

/// Hermitian eigendecomposition with eigenvalue clustering.
///
/// Eigenvalues with |lambda| <= rank_tol * ||M|| are snapped to exactly zero
/// and kept in their own cluster. Remaining eigenvalues are merged by single
/// linkage when consecutive gaps fall below cluster_tol * max(1, ||M||).
inline SpectralDecomposition eig_hermitian(const Operator& m,
                                           double cluster_tol = kDefaultClusterTol,
                                           double rank_tol = kDefaultRankTol) {
  require_hermitian(m, "eig_hermitian");
  const Index n = m.rows();
  SpectralDecomposition out;
  out.dim = n;
  if (n == 0) return out;

  const Operator h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(h);
  if (solver.info() != Eigen::Success) throw DomainError("eig_hermitian: eigensolver failed");
  const Eigen::VectorXd& vals = solver.eigenvalues();  // ascending
  const Operator& vecs = solver.eigenvectors();

  const double scale = vals.cwiseAbs().maxCoeff();
  const double zero_cut = rank_tol * scale;
  const double gap_cut = cluster_tol * std::max(1.0, scale);

  // 0: negative, 1: snapped zero, 2: positive. Clusters never cross groups.
  auto group = [&](double v) { return std::abs(v) <= zero_cut ? 1 : (v < 0 ? 0 : 2); };

  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    const int g = group(vals[start]);
    while (end < n && group(vals[end]) == g &&
           (g == 1 || vals[end] - vals[end - 1] < gap_cut)) {
      ++end;
    }
    SpectralCluster c;
    c.eigenvalue = g == 1 ? 0.0 : vals.segment(start, end - start).mean();
    c.basis = vecs.middleCols(start, end - start);
    c.projector = c.basis * c.basis.adjoint();
    out.clusters.push_back(std::move(c));
    start = end;
  }
  return out;
}

/// True when the cluster eigenvalue is (snapped) zero.
inline bool is_zero_cluster(const SpectralCluster& c) { return c.eigenvalue == 0.0; }

/// Projector onto the range of a PSD operator (zero operator -> zero projector).
inline Operator support_projector(const Operator& a, double rank_tol = kDefaultRankTol) {
  const auto dec = eig_hermitian(a, kDefaultClusterTol, rank_tol);
  Operator p = Operator::Zero(a.rows(), a.cols());
  for (const auto& c : dec.clusters) {
    if (c.eigenvalue > 0.0) p += c.projector;
  }
  return p;
}

inline bool is_projector(const Operator& p, double tol = 1e-10) {
  return is_hermitian(p) && max_abs(p * p - p) <= tol;
}

/// Projector onto R(P) + R(Q).
inline Operator projector_join(const Operator& p, const Operator& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw DomainError("projector_join: dimension mismatch");
  }
  if (!is_projector(p) || !is_projector(q)) {
    throw DomainError("projector_join: input is not an orthogonal projector");
  }
  return support_projector(p + q);
}

inline Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Operator identity(Index d) { return Operator::Identity(d, d); }

inline Index product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

/// Reorders tensor factors: output factor k is input factor perm[k].
inline Operator permute_subsystems(const Operator& m, std::span<const Index> dims,
                                   std::span<const Index> perm) {
  const Index total = product(dims);
  if (m.rows() != total || m.cols() != total) {
    throw DomainError("permute_subsystems: matrix size does not match subsystem dimensions");
  }
  const std::size_t k = dims.size();
  if (perm.size() != k) throw DomainError("permute_subsystems: permutation length mismatch");
  std::vector<bool> seen(k, false);
  for (Index p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= k || seen[p]) {
      throw DomainError("permute_subsystems: not a permutation");
    }
    seen[p] = true;
  }

  std::vector<Index> new_dims(k);
  for (std::size_t i = 0; i < k; ++i) new_dims[i] = dims[perm[i]];

  // Map each old flat index to its new flat index.
  std::vector<Index> remap(total);
  std::vector<Index> digits(k);
  for (Index flat = 0; flat < total; ++flat) {
    Index rest = flat;
    for (std::size_t i = k; i-- > 0;) {
      digits[i] = rest % dims[i];
      rest /= dims[i];
    }
    Index out = 0;
    for (std::size_t i = 0; i < k; ++i) out = out * new_dims[i] + digits[perm[i]];
    remap[flat] = out;
  }
  Operator out(total, total);
  for (Index r = 0; r < total; ++r) {
    for (Index c = 0; c < total; ++c) out(remap[r], remap[c]) = m(r, c);
  }
  return out;
}

/// Traces out every factor not listed in keep (kept factors stay in
/// ascending order).
inline Operator partial_trace_keep(const Operator& m, std::span<const Index> dims,
                                   std::vector<Index> keep) {
  const Index total = product(dims);
  if (m.rows() != total || m.cols() != total) {
    throw DomainError("partial_trace: matrix size does not match subsystem dimensions");
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  const Index k = static_cast<Index>(dims.size());
  for (Index i : keep) {
    if (i < 0 || i >= k) throw DomainError("partial_trace: subsystem index out of range");
  }
  std::vector<Index> perm(keep);
  for (Index i = 0; i < k; ++i) {
    if (!std::binary_search(keep.begin(), keep.end(), i)) perm.push_back(i);
  }
  const Operator moved = permute_subsystems(m, dims, perm);
  Index d_keep = 1;
  for (Index i : keep) d_keep *= dims[i];
  const Index d_drop = total / d_keep;
  Operator out = Operator::Zero(d_keep, d_keep);
  for (Index e = 0; e < d_drop; ++e) {
    for (Index r = 0; r < d_keep; ++r) {
      for (Index c = 0; c < d_keep; ++c) out(r, c) += moved(r * d_drop + e, c * d_drop + e);
    }
  }
  return out;
}

/// tr_A of an operator on H_A (x) H_B.
inline Operator partial_trace_first(const Operator& m, Index d_a, Index d_b) {
  if (m.rows() != d_a * d_b || m.cols() != d_a * d_b) {
    throw DomainError("partial_trace: dim(rho) != d_A * d_B");
  }
  Operator out = Operator::Zero(d_b, d_b);
  for (Index a = 0; a < d_a; ++a) out += m.block(a * d_b, a * d_b, d_b, d_b);
  return out;
}

/// tr_B of an operator on H_A (x) H_B.
inline Operator partial_trace_second(const Operator& m, Index d_a, Index d_b) {
  if (m.rows() != d_a * d_b || m.cols() != d_a * d_b) {
    throw DomainError("partial_trace: dim(rho) != d_A * d_B");
  }
  Operator out(d_a, d_a);
  for (Index i = 0; i < d_a; ++i) {
    for (Index j = 0; j < d_a; ++j) out(i, j) = m.block(i * d_b, j * d_b, d_b, d_b).trace();
  }
  return out;
}

/// Applies g to the clustered spectrum. With on_support_only the zero cluster
/// is dropped, so negative powers act as pseudo-inverses on the support.
template <class Fn>
Operator apply_spectral_function(const SpectralDecomposition& dec, Fn&& g, bool on_support_only) {
  Operator out = Operator::Zero(dec.dim, dec.dim);
  for (const auto& c : dec.clusters) {
    if (on_support_only && is_zero_cluster(c)) continue;
    const double v = g(c.eigenvalue);
    if (!std::isfinite(v)) {
      throw DomainError("apply_spectral_function: function undefined at eigenvalue " +
                        std::to_string(c.eigenvalue));
    }
    out += v * c.projector;
  }
  return out;
}

template <class Fn>
Operator apply_spectral_function(const Operator& a, Fn&& g, bool on_support_only) {
  return apply_spectral_function(eig_hermitian(a), std::forward<Fn>(g), on_support_only);
}

/// Power on the support: A^p with zero eigenvalues left at zero.
inline Operator support_power(const SpectralDecomposition& dec, double p) {
  return apply_spectral_function(dec, [p](double x) { return std::pow(x, p); }, true);
}

/// Hilbert-Schmidt inner product tr(X^dagger Y).
inline Complex hs_inner(const Operator& x, const Operator& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DomainError("hs_inner: dimension mismatch");
  }
  return (x.adjoint() * y).trace();
}

/// tr(P Q) for two clusters, computed from their bases.
inline double cluster_overlap(const SpectralCluster& p, const SpectralCluster& q) {
  return (p.basis.adjoint() * q.basis).squaredNorm();
}

/// Block-diagonal direct sum.
inline Operator direct_sum(const Operator& a, const Operator& b) {
  Operator out = Operator::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace qfdiv

#endif  // QFDIV_LINALG_HPP

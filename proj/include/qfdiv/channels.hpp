#ifndef QFDIV_CHANNELS_HPP
#define QFDIV_CHANNELS_HPP

// Kraus-form channels, seeded random states and channels, and structured
// state constructors.
//
// Haar isometries come from the QR factorization of a complex Gaussian
// (Ginibre) matrix with the columns of Q rephased by R_jj / |R_jj|.
// A d_in -> d_out * env isometry V yields Kraus operators K_e = (1 (x) <e|) V,
// with output index o * env + e.

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qfdiv/bipartite.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/linalg.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv {

struct KrausChannel {
  std::vector<Operator> kraus_ops;  // each d_out x d_in
  Index d_in = 0;
  Index d_out = 0;

  KrausChannel() = default;
  KrausChannel(std::vector<Operator> ops, Index in, Index out)
      : kraus_ops(std::move(ops)), d_in(in), d_out(out) {
    for (const auto& k : kraus_ops) {
      if (k.rows() != d_out || k.cols() != d_in) {
        throw DomainError("KrausChannel: Kraus operator has wrong shape");
      }
    }
  }
};

/// sum_n K_n^dagger K_n.
inline Operator kraus_gram(const KrausChannel& phi) {
  Operator g = Operator::Zero(phi.d_in, phi.d_in);
  for (const auto& k : phi.kraus_ops) g += k.adjoint() * k;
  return g;
}

inline bool validate_tpcp(const KrausChannel& phi, double tol = 1e-9) {
  if (phi.kraus_ops.empty()) return false;
  return max_abs(kraus_gram(phi) - identity(phi.d_in)) <= tol;
}

inline Operator apply_channel(const KrausChannel& phi, const Operator& rho) {
  if (rho.rows() != phi.d_in || rho.cols() != phi.d_in) {
    throw DomainError("apply_channel: input dimension does not match channel");
  }
  Operator out = Operator::Zero(phi.d_out, phi.d_out);
  for (const auto& k : phi.kraus_ops) out += k * rho * k.adjoint();
  return 0.5 * (out + out.adjoint());
}

inline KrausChannel identity_channel(Index d) { return KrausChannel({identity(d)}, d, d); }

/// Acts with phi on factor `which` of a multipartite space, identity elsewhere.
inline KrausChannel lift_channel(const KrausChannel& phi, std::span<const Index> dims, std::size_t which) {
  if (which >= dims.size()) throw DomainError("lift_channel: subsystem index out of range");
  if (dims[which] != phi.d_in) throw DomainError("lift_channel: channel input does not match subsystem");
  Index before = 1;
  Index after = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i < which) before *= dims[i];
    if (i > which) after *= dims[i];
  }
  std::vector<Operator> ops;
  ops.reserve(phi.kraus_ops.size());
  for (const auto& k : phi.kraus_ops) ops.push_back(kron(kron(identity(before), k), identity(after)));
  return KrausChannel(std::move(ops), before * phi.d_in * after, before * phi.d_out * after);
}

/// Complete dephasing in the computational basis.
inline KrausChannel dephasing_channel(Index d) {
  std::vector<Operator> ops;
  for (Index i = 0; i < d; ++i) {
    Operator k = Operator::Zero(d, d);
    k(i, i) = 1.0;
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops), d, d);
}

/// The trace map on a single factor: Kraus operators <c| (1 x d).
/// Its output space is one dimensional.
inline KrausChannel trace_channel(Index d) {
  std::vector<Operator> ops;
  for (Index c = 0; c < d; ++c) {
    Operator k = Operator::Zero(1, d);
    k(0, c) = 1.0;
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops), d, 1);
}

inline Operator ginibre(Index rows, Index cols, Rng& rng) {
  Operator g(rows, cols);
  // Column-major fill keeps draws independent of Eigen's storage details.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

/// Haar-distributed isometry (rows >= cols).
inline Operator random_isometry(Index rows, Index cols, Rng& rng) {
  if (rows < cols) throw DomainError("random_isometry: need rows >= cols");
  const Operator g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ() * Operator::Identity(rows, cols);
  const Operator r = qr.matrixQR().topLeftCorner(cols, cols);
  for (Index j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    if (ad > 0.0) q.col(j) *= d / ad;
  }
  return q;
}

inline Operator random_unitary(Index d, Rng& rng) { return random_isometry(d, d, rng); }

/// Channel from a Haar isometry d_in -> d_out * env_dim.
inline KrausChannel random_channel(Index d_in, Index d_out, Index env_dim, std::uint64_t seed) {
  if (d_in < 1 || d_out < 1 || env_dim < 1) throw DomainError("random_channel: dimensions must be positive");
  if (d_out * env_dim < d_in) throw DomainError("random_channel: need d_out * env_dim >= d_in");
  Rng rng(seed);
  const Operator v = random_isometry(d_out * env_dim, d_in, rng);
  std::vector<Operator> ops;
  for (Index e = 0; e < env_dim; ++e) {
    Operator k(d_out, d_in);
    for (Index o = 0; o < d_out; ++o) k.row(o) = v.row(o * env_dim + e);
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops), d_in, d_out);
}

/// G G^dagger / tr(G G^dagger) for a d x rank Ginibre matrix G.
inline Operator random_density(Index d, Index rank, Rng& rng) {
  if (d < 1 || rank < 1 || rank > d) throw DomainError("random_density: need 1 <= rank <= d");
  const Operator g = ginibre(d, rank, rng);
  Operator rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  return rho / real_trace(rho);
}

inline Operator random_density(Index d, Index rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(d, rank, rng);
}

/// Random pure state |AB> = sum_i c_i U_A|i> (x) U_B|i> with Haar local bases.
inline BipartiteState pure_bipartite_from_schmidt(std::span<const double> coeffs, Index d_a, Index d_b,
                                                  Rng& rng) {
  if (coeffs.empty() || static_cast<Index>(coeffs.size()) > std::min(d_a, d_b)) {
    throw DomainError("pure_bipartite_from_schmidt: need 1 <= #coeffs <= min(d_A, d_B)");
  }
  double norm2 = 0.0;
  for (double c : coeffs) {
    if (c < 0.0) throw DomainError("pure_bipartite_from_schmidt: coefficients must be nonnegative");
    norm2 += c * c;
  }
  if (std::abs(norm2 - 1.0) > 1e-10) {
    throw DomainError("pure_bipartite_from_schmidt: squared coefficients must sum to 1");
  }
  const Operator ua = random_unitary(d_a, rng);
  const Operator ub = random_unitary(d_b, rng);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d_a * d_b);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const auto ii = static_cast<Index>(i);
    for (Index a = 0; a < d_a; ++a) {
      psi.segment(a * d_b, d_b) += coeffs[i] * ua(a, ii) * ub.col(ii);
    }
  }
  Operator rho = psi * psi.adjoint();
  rho /= real_trace(rho);
  return BipartiteState(0.5 * (rho + rho.adjoint()), {d_a, d_b});
}

inline BipartiteState pure_bipartite_from_schmidt(std::span<const double> coeffs, Index d_a, Index d_b,
                                                  std::uint64_t seed) {
  Rng rng(seed);
  return pure_bipartite_from_schmidt(coeffs, d_a, d_b, rng);
}

/// Two-outcome pinching {1_A (x) P, 1_A (x) (1 - P)} with P the support of rho_B.
inline KrausChannel support_pinching_channel(const Operator& rho_b, Index d_a) {
  const Operator p = support_projector(rho_b);
  const Index d_b = rho_b.rows();
  return KrausChannel({kron(identity(d_a), p), kron(identity(d_a), identity(d_b) - p)}, d_a * d_b,
                      d_a * d_b);
}

/// Direct sum over the B factor: block y lives in the sector of B spanned by
/// basis vectors [offset_y, offset_y + d_By), sectors laid out in input order.
/// Returns sum_y p_y rho_ABy.
inline BipartiteState build_classical_register_state(std::span<const BipartiteState> blocks,
                                                     std::span<const double> p) {
  if (blocks.empty()) throw DomainError("build_classical_register_state: empty block list");
  if (p.size() != blocks.size()) throw DomainError("build_classical_register_state: weight count mismatch");
  double total = 0.0;
  for (double w : p) {
    if (w < 0.0) throw DomainError("build_classical_register_state: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10) throw DomainError("build_classical_register_state: weights must sum to 1");
  const Index d_a = blocks.front().d_a();
  Index d_b = 0;
  for (const auto& blk : blocks) {
    if (blk.d_a() != d_a) throw DomainError("build_classical_register_state: blocks must share d_A");
    d_b += blk.d_b();
  }
  Operator rho = Operator::Zero(d_a * d_b, d_a * d_b);
  Index offset = 0;
  for (std::size_t y = 0; y < blocks.size(); ++y) {
    const auto& blk = blocks[y];
    const Index dy = blk.d_b();
    for (Index i = 0; i < d_a; ++i) {
      for (Index j = 0; j < d_a; ++j) {
        rho.block(i * d_b + offset, j * d_b + offset, dy, dy) += p[y] * blk.rho().block(i * dy, j * dy, dy, dy);
      }
    }
    offset += dy;
  }
  return BipartiteState(std::move(rho), {d_a, d_b});
}

/// Zero-pads the B factor by extra_b_dim dimensions.
inline BipartiteState embed_ancilla(const BipartiteState& s, Index extra_b_dim) {
  if (extra_b_dim < 0) throw DomainError("embed_ancilla: extra dimension must be nonnegative");
  if (extra_b_dim == 0) return s;
  const Index d_a = s.d_a();
  const Index d_b = s.d_b();
  const Index nb = d_b + extra_b_dim;
  Operator rho = Operator::Zero(d_a * nb, d_a * nb);
  for (Index i = 0; i < d_a; ++i) {
    for (Index j = 0; j < d_a; ++j) rho.block(i * nb, j * nb, d_b, d_b) = s.rho().block(i * d_b, j * d_b, d_b, d_b);
  }
  return BipartiteState(std::move(rho), {d_a, nb});
}

}  // namespace qfdiv

#endif  // QFDIV_CHANNELS_HPP
